"""
3차 B-spline 사전 평활
등간격 내부 매듭과 경계 중복 매듭을 쓰는 기저로 각 곡선을 최소제곱 적합하고 균등 세밀 격자에서 복원합니다.
"""
import logging
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.interpolate import BSpline

from core.config_manager import get_system_config
from core.errors import InputError
from series.models import Grid, GridKind, SampledSeries

logger = logging.getLogger(__name__)

_DEGREE = 3


def clamped_knots(num_basis: int) -> np.ndarray:
    """[0]*4 + 내부 등간격 매듭 + [1]*4 (길이 num_basis + 4)"""
    interior = np.linspace(0.0, 1.0, num_basis - _DEGREE + 1)[1:-1]
    return np.concatenate([np.zeros(_DEGREE + 1), interior, np.ones(_DEGREE + 1)])


def bspline_design(points, num_basis: int) -> np.ndarray:
    """len(points)×num_basis 기저 행렬"""
    if num_basis < _DEGREE + 1:
        raise InputError(f"3차 B-spline에는 num_basis >= 4가 필요합니다: {num_basis}")
    x = np.atleast_1d(np.asarray(points, dtype=float))
    return BSpline(clamped_knots(num_basis), np.eye(num_basis), _DEGREE)(x)


class SplineBasis(BaseModel):
    """관측 격자와 세밀 격자 위 B-spline 설계 행렬"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: Grid
    num_basis: int
    fine_grid: np.ndarray = Field(description="균등 세밀 격자 (기본 101점)")
    observed: np.ndarray = Field(description="n×num_basis 관측 격자 설계")
    fine: np.ndarray = Field(description="m×num_basis 세밀 격자 설계")

    @classmethod
    def build(cls, grid: Grid, num_basis: int, fine_grid_size: Optional[int] = None) -> "SplineBasis":
        if fine_grid_size is None:
            fine_grid_size = int(get_system_config().get_smoothing_config().get("fine_grid_size", 101))
        if grid.size < num_basis:
            raise InputError(f"관측 지점 수 n={grid.size}가 num_basis={num_basis}보다 적습니다")
        fine_grid = np.linspace(0.0, 1.0, fine_grid_size)
        observed = bspline_design(grid.points, num_basis)
        rank = np.linalg.matrix_rank(observed)
        if rank < num_basis:
            logger.warning(f"B-spline 설계가 계수 부족입니다: rank={rank} < {num_basis}")
        return cls(
            grid=grid,
            num_basis=num_basis,
            fine_grid=fine_grid,
            observed=observed,
            fine=bspline_design(fine_grid, num_basis),
        )

    def fit_coeffs(self, rows) -> np.ndarray:
        """행마다 최소제곱 계수 (rows: k×n → k×num_basis)"""
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        if rows.shape[1] != self.grid.size:
            raise InputError(f"행 길이 {rows.shape[1]}가 격자 크기 {self.grid.size}와 다릅니다")
        coeffs, *_ = np.linalg.lstsq(self.observed, rows.T, rcond=None)
        return coeffs.T

    def evaluate(self, points, coeffs) -> np.ndarray:
        return bspline_design(points, self.num_basis) @ np.asarray(coeffs, dtype=float).T

    def to_dict(self) -> Dict[str, Any]:
        return {
            "grid": self.grid.points.tolist(),
            "grid_kind": self.grid.kind.value,
            "num_basis": self.num_basis,
            "fine_grid_size": int(self.fine_grid.size),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SplineBasis":
        grid = Grid(points=data["grid"], kind=GridKind(data.get("grid_kind", GridKind.EXPLICIT.value)))
        return cls.build(grid, int(data["num_basis"]), int(data["fine_grid_size"]))


class SmoothedCurves(BaseModel):
    """평활된 곡선 - values = coeffs · B_fineᵀ"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis: SplineBasis
    coeffs: np.ndarray = Field(description="T×num_basis 계수")
    values: np.ndarray = Field(description="T×m 세밀 격자 복원값")

    @property
    def num_basis(self) -> int:
        return self.basis.num_basis

    @property
    def fine_grid(self) -> np.ndarray:
        return self.basis.fine_grid


def smooth_bsplines(
    series: SampledSeries,
    num_basis: Optional[int] = None,
    fine_grid_size: Optional[int] = None,
) -> SmoothedCurves:
    """곡선별 최소제곱 B-spline 평활"""
    if num_basis is None:
        num_basis = int(get_system_config().get_smoothing_config().get("num_basis", 10))
    if num_basis < _DEGREE + 1:
        raise InputError(f"3차 B-spline에는 num_basis >= 4가 필요합니다: {num_basis}")
    basis = SplineBasis.build(series.grid, num_basis, fine_grid_size)
    coeffs = basis.fit_coeffs(series.values)
    return SmoothedCurves(basis=basis, coeffs=coeffs, values=coeffs @ basis.fine.T)
