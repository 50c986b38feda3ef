"""
(D, λ) 교차검증
목표 시점만 fold로 가리고 지연 관측은 가려진 시점까지 그대로 사용합니다.
"""
import logging
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from core.config_manager import get_system_config
from core.errors import InputError
from kernels import KernelSpec
from optim import AgmOptions
from series.models import SampledSeries
from .rkhs import KernelDesign, LambdaLike, fit, lambda_vector

logger = logging.getLogger(__name__)


class FoldScheme(str, Enum):
    CONTIGUOUS = "contiguous"
    RANDOM = "random"


class CvCell(BaseModel):
    order: int
    lambdas: List[float]
    score: float = Field(description="가려진 목표에서의 평균 제곱 예측 오차")


class TuningChoice(BaseModel):
    """선택된 (D, λ)와 전체 CV 표"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    order: int
    lambdas: np.ndarray
    cv_table: List[CvCell]

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {"D": c.order, "lambda": ";".join(format(x, ".17g") for x in c.lambdas), "score": c.score}
                for c in self.cv_table
            ]
        )

    def cell(self, order: int, lambdas: Sequence[float]) -> CvCell:
        for c in self.cv_table:
            if c.order == order and np.array_equal(c.lambdas, lambdas):
                return c
        raise KeyError((order, tuple(lambdas)))


def default_lambda_grid(
    series: SampledSeries,
    D: int,
    count: Optional[int] = None,
    low: Optional[float] = None,
    high: Optional[float] = None,
) -> List[float]:
    """[low, high]·‖X‖_F²/(T−D) 구간의 로그 등간격 λ 후보"""
    cfg = get_system_config().get_tuning_config()
    count = int(count if count is not None else cfg.get("lambda_count", 10))
    low = float(low if low is not None else cfg.get("lambda_low", 1e-4))
    high = float(high if high is not None else cfg.get("lambda_high", 1e2))
    if series.T <= D:
        raise InputError(f"T > D가 필요합니다: T={series.T}, D={D}")
    X = np.asarray(series.values)[D:]
    scale = float(np.vdot(X, X)) / (series.T - D)
    if not scale > 0:
        scale = 1.0
    return list(np.logspace(np.log10(low * scale), np.log10(high * scale), count))


def make_folds(targets: np.ndarray, folds: int, scheme: FoldScheme, seed: Optional[int]) -> List[np.ndarray]:
    if scheme == FoldScheme.RANDOM:
        targets = np.random.default_rng(seed).permutation(targets)
    return [np.sort(f) for f in np.array_split(targets, folds)]


def _lambda_key(lam: np.ndarray) -> float:
    return float(np.sum(lam))


def cross_validate(
    series: SampledSeries,
    D_max: int,
    lambda_grid: Optional[Sequence[LambdaLike]] = None,
    kernel: Optional[KernelSpec] = None,
    folds: Optional[int] = None,
    seed: Optional[int] = None,
    fold_scheme=None,
    agm_options: Optional[AgmOptions] = None,
) -> TuningChoice:
    """목표 인덱스 {D_max, …, T−1}(0 기준)을 fold로 나눠 (D, λ) 격자를 평가

    동점이면 작은 D, 그다음 큰 λ를 고릅니다.
    """
    cfg = get_system_config().get_tuning_config()
    folds = int(folds if folds is not None else cfg.get("folds", 5))
    scheme = FoldScheme(fold_scheme if fold_scheme is not None else cfg.get("fold_scheme", "contiguous"))
    if D_max < 1:
        raise InputError(f"D_max는 1 이상이어야 합니다: {D_max}")
    if folds < 2:
        raise InputError(f"fold 수는 2 이상이어야 합니다: {folds}")
    targets = np.arange(D_max, series.T)
    if targets.size < folds:
        raise InputError(f"CV에 쓸 목표 시점({targets.size})이 fold 수({folds})보다 적습니다")
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(series, D_max)
    if len(lambda_grid) == 0:
        raise InputError("λ 후보가 비어 있습니다")

    design = KernelDesign.build(series.grid, kernel)
    options = agm_options or AgmOptions.from_config()
    values = np.asarray(series.values)
    fold_list = make_folds(targets, folds, scheme, seed)

    table: List[CvCell] = []
    for D in range(1, D_max + 1):
        candidates = [lambda_vector(lam, D) for lam in lambda_grid]
        # 큰 λ부터 풀며 이전 해를 λ 비율로 재조정해 warm start
        order = sorted(range(len(candidates)), key=lambda i: -_lambda_key(candidates[i]))
        sse: Dict[int, float] = {i: 0.0 for i in order}
        count = 0
        for held_out in fold_list:
            train = np.setdiff1d(targets, held_out)[::-1]
            if train.size == 0:
                raise InputError("학습 목표가 비어 있는 fold가 있습니다")
            previous: Optional[Tuple[np.ndarray, List[np.ndarray]]] = None
            for i in order:
                lam = candidates[i]
                warm = None
                if previous is not None:
                    prev_lam, prev_blocks = previous
                    warm = [W * (lam[d] / prev_lam[d]) for d, W in enumerate(prev_blocks)]
                est = fit(series, D, lam, design=design, agm_options=options, targets=train, initial_blocks=warm)
                previous = (lam, est.blocks)
                resid = values[held_out] - est.predict_rows(values, held_out)
                sse[i] += float(np.vdot(resid, resid))
            count += held_out.size * series.n
        for i, lam in enumerate(candidates):
            table.append(CvCell(order=D, lambdas=lam.tolist(), score=sse[i] / count))
        logger.debug(f"CV D={D} 완료: 최소 점수={min(sse.values()) / count:.6e}")

    best = min(table, key=lambda c: (c.score, c.order, -_lambda_key(np.array(c.lambdas))))
    logger.info(f"CV 선택: D={best.order}, λ={best.lambdas}, score={best.score:.6e}")
    return TuningChoice(order=best.order, lambdas=np.array(best.lambdas), cv_table=table)
