"""
예측 오차 지표와 반복 실험 집계
"""
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np

from core.errors import InputError


def _pair(predictions, actuals) -> Tuple[np.ndarray, np.ndarray]:
    pred = np.atleast_2d(np.asarray(predictions, dtype=float))
    act = np.atleast_2d(np.asarray(actuals, dtype=float))
    if pred.shape != act.shape:
        raise InputError(f"예측/실측 크기 불일치: {pred.shape} vs {act.shape}")
    if pred.size == 0:
        raise InputError("시험 구간이 비어 있습니다")
    return pred, act


def prediction_error(predictions, actuals) -> float:
    """PE - 시험 목표와 격자 지점 전체의 평균 제곱 오차"""
    pred, act = _pair(predictions, actuals)
    resid = pred - act
    return float(np.mean(resid * resid))


def step_rmse(predictions, actuals) -> np.ndarray:
    """시점별 RMSE_t = sqrt(Σ_i e_ti² / n)"""
    pred, act = _pair(predictions, actuals)
    return np.sqrt(np.mean((pred - act) ** 2, axis=1))


def step_mae(predictions, actuals) -> np.ndarray:
    """시점별 MAE_t = Σ_i |e_ti| / n"""
    pred, act = _pair(predictions, actuals)
    return np.mean(np.abs(pred - act), axis=1)


def finite(values: Iterable[Optional[float]]) -> List[float]:
    return [float(v) for v in values if v is not None and math.isfinite(v)]


def fmean(values: Iterable[Optional[float]]) -> Optional[float]:
    """유한값의 정확한 합(fsum) 기반 평균 - 값이 없으면 None"""
    kept = finite(values)
    if not kept:
        return None
    return math.fsum(kept) / len(kept)


def fmedian(values: Iterable[Optional[float]]) -> Optional[float]:
    kept = finite(values)
    if not kept:
        return None
    return float(np.median(kept))
