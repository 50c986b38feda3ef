"""
연산자 추정 오차 (MISE)
∬(A_d − Â_d)² / ∬A_d² 를 균등 텐서 격자 위 사다리꼴 적분으로 계산합니다.
"""
import logging
from typing import Optional, Protocol

import numpy as np
from scipy.integrate import trapezoid

from core.config_manager import get_system_config
from core.errors import InputError, UndefinedMetricError

logger = logging.getLogger(__name__)


class SurfaceModel(Protocol):
    """operator_surface(d, r, s)를 제공하는 추정치 또는 참 모형"""

    @property
    def order(self) -> int: ...

    def operator_surface(self, d: int, r_points, s_points) -> np.ndarray: ...


def _integrate2d(surface: np.ndarray, axis_points: np.ndarray) -> float:
    return float(trapezoid(trapezoid(surface, axis_points, axis=1), axis_points))


def mise(est: SurfaceModel, truth: SurfaceModel, d: int, fine_grid_size: Optional[int] = None) -> float:
    """lag d의 정규화된 적분 제곱 오차

    추정 차수가 d보다 작으면 Â_d ≡ 0으로 봅니다.
    """
    if fine_grid_size is None:
        fine_grid_size = get_system_config().get_mise_grid_size()
    if fine_grid_size < 2:
        raise InputError(f"fine_grid_size는 2 이상이어야 합니다: {fine_grid_size}")
    if not 1 <= d <= truth.order:
        raise InputError(f"lag d={d}가 참 모형 범위 [1, {truth.order}] 밖입니다")

    axis = np.linspace(0.0, 1.0, fine_grid_size)
    true_surface = truth.operator_surface(d, axis, axis)
    denom = _integrate2d(true_surface * true_surface, axis)
    if not denom > 0.0:
        raise UndefinedMetricError(f"lag {d}의 참 연산자 노름이 0이라 MISE가 정의되지 않습니다")

    if d <= est.order:
        est_surface = est.operator_surface(d, axis, axis)
    else:
        est_surface = np.zeros_like(true_surface)
    diff = true_surface - est_surface
    return _integrate2d(diff * diff, axis) / denom
