"""
시뮬레이션 반복 실험 실행기
반복마다 SeedSequence([seed, r])에서 난수열을 나눠 실행 순서나 워커 수와 무관하게 같은 결과를 냅니다.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List

import numpy as np
from tqdm import tqdm

from core.errors import FarError, InputError, UndefinedMetricError
from estimators import anh_fit, bosq_fit, cross_validate, default_lambda_grid, fit, mise
from simulator import FarGroundTruth, Scenario, make_scenario, simulate
from .config import ExperimentConfig
from .metrics import prediction_error
from .results import REFERENCE_METHODS, ExperimentResult, MethodRecord, summarize

logger = logging.getLogger(__name__)


def _child_seed(seq: np.random.SeedSequence) -> int:
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def build_truth(config: ExperimentConfig, replication: int) -> FarGroundTruth:
    """Scenario A는 반복 간 고정, B/C는 반복마다 새로 생성"""
    scenario = Scenario.parse(config.scenario)
    if scenario == Scenario.A:
        seq = np.random.SeedSequence([config.seed])
    else:
        seq = np.random.SeedSequence([config.seed, replication, 0])
    return make_scenario(
        config.scenario,
        config.q,
        config.D_true,
        config.kappas,
        rng=np.random.default_rng(seq),
        noise_half_width=config.noise_half_width,
    )


def _lagged_predictions(truth: FarGroundTruth, scores: np.ndarray, grid_points, targets) -> np.ndarray:
    """oracle 조건부 평균을 시험 목표 전체에 대해 한 번에 계산"""
    U = truth.basis.evaluate(grid_points)
    acc = np.zeros((len(targets), truth.q))
    for d, lam in enumerate(truth.lags, start=1):
        acc = acc + scores[targets - d] @ lam.T
    return acc @ U.T


def _mise_row(estimate, truth: FarGroundTruth) -> List[float]:
    row = []
    for d in range(1, truth.D + 1):
        try:
            row.append(mise(estimate, truth, d))
        except UndefinedMetricError:
            row.append(float("nan"))
    return row


def _run_method(
    method: str,
    config: ExperimentConfig,
    train,
    values: np.ndarray,
    targets: np.ndarray,
    truth: FarGroundTruth,
    replication: int,
    cv_seed: int,
) -> MethodRecord:
    record = MethodRecord(setting=config.label, replication=replication, method=method)
    actual = values[targets]
    if method == "naive":
        record.pe = prediction_error(values[targets - 1], actual)
        return record
    if method == "mean_zero":
        record.pe = prediction_error(np.zeros_like(actual), actual)
        return record

    if method == "rkhs":
        lambda_grid = config.lambda_grid
        if lambda_grid is None and config.lambda_count is not None:
            lambda_grid = default_lambda_grid(train, config.tuning_D_max, count=config.lambda_count)
        choice = cross_validate(
            train,
            config.tuning_D_max,
            lambda_grid=lambda_grid,
            folds=config.folds,
            seed=cv_seed,
            fold_scheme=config.fold_scheme,
        )
        estimate = fit(train, choice.order, choice.lambdas)
        record.D_sel = choice.order
        record.lambda_sel = [float(x) for x in choice.lambdas]
        record.diagnostics = {
            "iterations": float(estimate.report.iterations),
            "objective": estimate.report.objective,
            "converged": float(estimate.report.converged),
        }
    elif method == "anh":
        estimate = anh_fit(train, config.anh_D_max or config.tuning_D_max, num_basis=config.anh_basis)
        record.D_sel = estimate.order
        record.p_sel = estimate.p
        record.failed = estimate.failed
        record.diagnostics = {"ffpe": float(estimate.criterion)}
    elif method == "bosq":
        estimate = bosq_fit(train, config.D_true, tau=config.bosq_tau, num_basis=config.bosq_num_basis)
        record.D_sel = estimate.order
        record.p_sel = estimate.p
    else:
        raise InputError(f"알 수 없는 방법: {method}")

    record.pe = prediction_error(estimate.predict_rows(values, targets), actual)
    record.mise = _mise_row(estimate, truth)
    return record


def run_replication(config: ExperimentConfig, replication: int) -> List[MethodRecord]:
    """한 반복: 참 모형 → 시뮬레이션 → 분할 → 방법별 적합/예측/평가"""
    truth = build_truth(config, replication)
    sim_seq, cv_seq = np.random.SeedSequence([config.seed, replication, 1]).spawn(2)
    n_test = config.n_test
    sim = simulate(
        truth,
        config.T + n_test,
        config.n,
        grid_kind=config.grid_kind,
        burn_in=config.burn_in,
        seed=_child_seed(sim_seq),
    )
    values = np.asarray(sim.series.values)
    train = sim.series.head(config.T)
    targets = np.arange(config.T, config.T + n_test)

    records: List[MethodRecord] = []
    oracle = MethodRecord(setting=config.label, replication=replication, method="oracle")
    oracle.pe = prediction_error(
        _lagged_predictions(truth, sim.scores, sim.series.grid.points, targets), values[targets]
    )
    oracle.mise = [0.0 if np.any(lam) else float("nan") for lam in truth.lags]
    records.append(oracle)

    methods = [m for m in config.methods if m not in REFERENCE_METHODS] + ["mean_zero"]
    for method in methods:
        try:
            record = _run_method(method, config, train, values, targets, truth, replication, _child_seed(cv_seq))
        except (FarError, np.linalg.LinAlgError) as e:
            logger.warning(f"[{config.label}] replication={replication} {method} 실패: {e}")
            record = MethodRecord(
                setting=config.label, replication=replication, method=method, failed=True, error=str(e)
            )
        records.append(record)
    return records


def run_experiment(
    config: ExperimentConfig,
    threads: int = 1,
    progress: bool = False,
) -> ExperimentResult:
    """모든 반복을 실행하고 반복 번호 순으로 정렬해 집계"""
    threads = max(1, int(threads))
    logger.info(
        f"실험 시작: {config.label}, replications={config.replications}, methods={config.methods}, threads={threads}"
    )
    indices = list(range(config.replications))
    collected: Dict[int, List[MethodRecord]] = {}
    bar = tqdm(total=len(indices), desc=config.label, disable=not progress)
    try:
        if threads == 1:
            for r in indices:
                collected[r] = run_replication(config, r)
                bar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = {r: pool.submit(run_replication, config, r) for r in indices}
                for r, future in futures.items():
                    collected[r] = future.result()
                    bar.update(1)
    finally:
        bar.close()

    records = [rec for r in sorted(collected) for rec in collected[r]]
    summary = summarize(records, config.D_true)
    oracle = summary.oracle_pe
    logger.info(f"실험 완료: {config.label}, Oracle PE={oracle if oracle is None else round(oracle, 6)}")
    return ExperimentResult(config=config, records=records, summary=summary)
