"""
격자 위의 구적, 기저 평가, 차분 연산
"""
from typing import Optional

import numpy as np

from core.errors import InputError
from .models import CosineBasis, Grid, SampledSeries


def quad_inner(f, g, grid: Optional[Grid] = None) -> float:
    """(1/n) Σ_j f(s_j) g(s_j) - 격자 종류와 무관하게 가중치 1/n"""
    f = np.asarray(f, dtype=float).reshape(-1)
    g = np.asarray(g, dtype=float).reshape(-1)
    if f.shape != g.shape:
        raise InputError(f"길이 불일치: {f.size} vs {g.size}")
    if grid is not None and grid.size != f.size:
        raise InputError(f"격자 크기 불일치: {grid.size} vs {f.size}")
    if f.size == 0:
        raise InputError("빈 벡터의 내적은 정의되지 않습니다")
    return float(np.dot(f, g) / f.size)


def eval_cosine_basis(basis: CosineBasis, grid: Grid) -> np.ndarray:
    """n×q 행렬, i번째 열은 격자 위의 u_i"""
    return basis.evaluate(grid.points)


def difference(series: SampledSeries) -> SampledSeries:
    """1차 차분 X_{t+1} − X_t (길이 T−1)"""
    if series.T < 2:
        raise InputError(f"차분에는 T >= 2가 필요합니다: T={series.T}")
    return SampledSeries(grid=series.grid, values=np.diff(series.values, axis=0))


def cumulative_sum(diffs: SampledSeries, initial) -> SampledSeries:
    """difference의 역연산 - 첫 행 initial에서 누적합으로 복원"""
    initial = np.asarray(initial, dtype=float).reshape(1, -1)
    if initial.shape[1] != diffs.n:
        raise InputError(f"초기 행 길이 불일치: {initial.shape[1]} vs {diffs.n}")
    values = np.vstack([initial, initial + np.cumsum(diffs.values, axis=0)])
    return SampledSeries(grid=diffs.grid, values=values)
