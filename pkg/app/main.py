"""
FAR 추정/예측 벤치 CLI

    python -m app.main simulate --config config/experiments/far1_A_q6_T100.yaml --out data/series.csv
    python -m app.main fit --input data/series.csv --method rkhs --D 1 --out models/rkhs.json
    python -m app.main predict --model models/rkhs.json --input data/series.csv
    python -m app.main bench --config config/experiments/far1_A_q12_T400.yaml --format csv --out bench/out/a.csv
    python -m app.main forecast-eval --input data/demand.csv --train-size 100 --difference

종료 코드: 0 성공, 1 입력 오류, 2 수치 실패, 3 I/O 오류
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from app.deps import get_settings
from bench import (
    ForecastOptions,
    emit_results,
    forecast_eval,
    format_summary,
    load_experiment_config,
    prepare_forecast_split,
    run_experiment,
)
from bench.config import ExperimentConfig
from core.errors import FarError, InputError, StorageError
from estimators import (
    BaselineFit,
    OperatorEstimate,
    anh_fit,
    baseline_predict,
    bosq_fit,
    cross_validate,
    fit,
    load_model,
    predict_next,
    save_model,
)
from series import SampledSeries, load_csv, save_csv
from simulator import companion_spectral_radius, make_scenario, simulate

logger = logging.getLogger("app.main")

SURFACE_POINTS = 51


def _experiment_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {"seed": args.seed}
    if args.config:
        return load_experiment_config(args.config, **overrides)
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, ensure_ascii=False))


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _experiment_from_args(args)
    truth = make_scenario(
        config.scenario,
        config.q,
        config.D_true,
        config.kappas,
        seed=config.seed,
        noise_half_width=config.noise_half_width,
    )
    T = args.T if args.T is not None else config.T
    sim = simulate(truth, T, config.n, grid_kind=config.grid_kind, burn_in=config.burn_in, seed=config.seed)
    save_csv(sim.series, args.out)
    logger.info(
        f"시뮬레이션 저장: {args.out} (T={T}, n={config.n}, radius={companion_spectral_radius(truth):.4f})"
    )
    if args.truth_out:
        _write_json(args.truth_out, truth.to_dict())
    return 0


def _write_json(path: str, payload) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, ensure_ascii=False)
    except OSError as e:
        raise StorageError(f"JSON 저장 실패 ({e})", path=path)


def _fit_model(series: SampledSeries, args: argparse.Namespace):
    if args.method == "rkhs":
        if args.lambdas:
            return fit(series, args.D, args.lambdas)
        choice = cross_validate(series, args.D, folds=args.folds, seed=args.seed)
        return fit(series, choice.order, choice.lambdas)
    if args.method == "bosq":
        return bosq_fit(series, args.D, num_basis=args.num_basis)
    if args.method == "anh":
        return anh_fit(series, args.D, num_basis=args.num_basis)
    raise InputError(f"알 수 없는 방법: {args.method}")


def _surface_frame(model) -> pd.DataFrame:
    axis = np.linspace(0.0, 1.0, SURFACE_POINTS)
    rr, ss = np.meshgrid(axis, axis, indexing="ij")
    frames = []
    for d in range(1, model.order + 1):
        surface = model.operator_surface(d, axis, axis)
        frames.append(pd.DataFrame({"lag": d, "r": rr.ravel(), "s": ss.ravel(), "value": surface.ravel()}))
    return pd.concat(frames, ignore_index=True)


def cmd_fit(args: argparse.Namespace) -> int:
    series = load_csv(args.input)
    model = _fit_model(series, args)
    diagnostics = {"method": args.method, "order": model.order}
    diagnostics["singular_values"] = {
        str(d): model.singular_values(d).tolist() for d in range(1, model.order + 1)
    }
    if isinstance(model, OperatorEstimate):
        diagnostics["lambdas"] = model.lambdas.tolist()
        diagnostics["nuclear_norms"] = model.nuclear_norms()
        diagnostics["report"] = model.report.model_dump()
    elif isinstance(model, BaselineFit):
        diagnostics["p"] = model.p
        diagnostics["criterion"] = model.criterion
        diagnostics["failed"] = model.failed
    _print_json(diagnostics)

    if args.out:
        save_model(model, args.out)
    if args.surface_out:
        try:
            Path(args.surface_out).parent.mkdir(parents=True, exist_ok=True)
            _surface_frame(model).to_csv(args.surface_out, index=False, float_format="%.17g", lineterminator="\n")
        except OSError as e:
            raise StorageError(f"연산자 표면 저장 실패 ({e})", path=args.surface_out)
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    series = load_csv(args.input)
    history = np.asarray(series.values)[-model.order :]
    if isinstance(model, OperatorEstimate):
        if not model.grid.same_as(series.grid):
            raise InputError("모형 격자와 입력 격자가 다릅니다")
        prediction = predict_next(model, history)
    else:
        if not model.fpca.basis.grid.same_as(series.grid):
            raise InputError("모형 격자와 입력 격자가 다릅니다")
        prediction = baseline_predict(model, history)
    result = SampledSeries(grid=series.grid, values=prediction.reshape(1, -1))
    if args.out:
        save_csv(result, args.out)
    else:
        _print_json({"grid": series.grid.points.tolist(), "prediction": prediction.tolist()})
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    config = _experiment_from_args(args)
    threads = args.threads if args.threads is not None else get_settings().FAR_THREADS
    result = run_experiment(config, threads=threads, progress=args.progress)
    out = args.out or str(Path(get_settings().FAR_OUTPUT_DIR) / f"{config.label}.{args.format}")
    emit_results(result, args.format, out)
    print(format_summary(result, scale_pe_100=args.scale_pe_100))
    return 0


def cmd_forecast_eval(args: argparse.Namespace) -> int:
    series = load_csv(args.input)
    train, test = prepare_forecast_split(series, args.train_size, differenced=args.difference)
    options = ForecastOptions(D=args.D, lambdas=args.lambdas, folds=args.folds, seed=args.seed)
    report = forecast_eval(train, test, args.methods, options)
    if args.out:
        try:
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
            report.steps.to_csv(args.out, index=False, float_format="%.17g", lineterminator="\n")
        except OSError as e:
            raise StorageError(f"예측 평가 저장 실패 ({e})", path=args.out)
    _print_json(
        {"mean_rmse": report.mean_rmse, "mean_mae": report.mean_mae, "rkhs_win_pct": report.rkhs_win_pct}
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="far", description="RKHS 핵노름 FAR 추정 벤치")
    parser.add_argument("--log-level", default=None, help="DEBUG | INFO | WARNING | ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="시나리오에서 SampledSeries CSV 생성")
    p.add_argument("--config", help="실험 설정 YAML")
    p.add_argument("--seed", type=int)
    p.add_argument("--T", type=int, help="생성 길이 (기본: 설정의 T)")
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out", help="참 모형 JSON 경로")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("fit", help="시계열 CSV에 한 방법을 적합하고 연산자 진단 출력")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["rkhs", "bosq", "anh"], default="rkhs")
    p.add_argument("--D", type=int, default=1, help="차수 (rkhs CV/anh에서는 상한)")
    p.add_argument("--lambdas", type=float, nargs="+", help="rkhs λ (생략 시 CV)")
    p.add_argument("--folds", type=int)
    p.add_argument("--num-basis", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="모형 JSON 경로")
    p.add_argument("--surface-out", help="연산자 표면 CSV 경로 (lag, r, s, value)")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("predict", help="저장된 모형으로 한 단계 예측")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="마지막 D개 행을 이력으로 사용")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("bench", help="실험 설정 실행")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--threads", type=int)
    p.add_argument("--scale-pe-100", action="store_true", help="요약 표의 PE를 ×100으로 표시")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("forecast-eval", help="학습/시험 분할 한 단계 예측 평가")
    p.add_argument("--input", required=True)
    p.add_argument("--train-size", type=int, required=True)
    p.add_argument("--difference", action="store_true", help="1차 차분 후 분할")
    p.add_argument("--methods", nargs="+", default=["rkhs", "anh", "naive"])
    p.add_argument("--D", type=int, default=1)
    p.add_argument("--lambdas", type=float, nargs="+")
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="시점별 RMSE/MAE CSV 경로")
    p.set_defaults(handler=cmd_forecast_eval)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = args.log_level or get_settings().FAR_LOG_LEVEL
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO))
    try:
        return args.handler(args)
    except FarError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O 오류: {e}")
        return StorageError.exit_code


if __name__ == "__main__":
    sys.exit(main())
