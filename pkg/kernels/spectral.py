"""
대칭 양반정치 행렬의 스펙트럼 대수
K^{1/2}, 의사역 제곱근 K^{-1/2}, 그리고 RKHS 연산자 핵노름 ‖K^{1/2} R K^{1/2}‖_* 을 계산합니다.
"""
import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.config_manager import get_system_config
from core.errors import InputError

logger = logging.getLogger(__name__)

_SYMMETRY_TOL = 1e-10


class SpectralFactor(BaseModel):
    """K의 대칭 제곱근과 의사역 제곱근"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sqrt: np.ndarray = Field(description="K^{1/2}")
    inv_sqrt: np.ndarray = Field(description="K^{-1/2} (하한 미만 고유값은 0으로 취급)")
    eigen_floor: float = Field(description="고유값 하한 floor_ratio·max(e)")

    @property
    def size(self) -> int:
        return self.sqrt.shape[0]


def spectral_sqrt(K: np.ndarray, floor_ratio: Optional[float] = None) -> SpectralFactor:
    """고유분해 K = U diag(e) Uᵀ 로부터 K^{1/2}, K^{-1/2} 계산

    sqrt에서는 하한 미만 고유값을 하한으로 올리고, inv_sqrt에서는 버립니다(의사역).
    """
    if floor_ratio is None:
        floor_ratio = get_system_config().get_floor_ratio()
    if floor_ratio <= 0:
        raise InputError(f"floor_ratio는 양수여야 합니다: {floor_ratio}")

    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] == 0:
        raise InputError(f"정방행렬이 필요합니다: shape={K.shape}")
    asym = float(np.max(np.abs(K - K.T)))
    if asym > _SYMMETRY_TOL * max(1.0, float(np.max(np.abs(K)))):
        raise InputError(f"대칭 행렬이 아닙니다: max|K-Kᵀ|={asym:.3e}")

    eigvals, eigvecs = np.linalg.eigh(0.5 * (K + K.T))
    top = float(eigvals.max())
    if top <= 0.0:
        raise InputError("양의 고유값이 없는 행렬입니다")
    floor = floor_ratio * top

    kept = eigvals >= floor
    sqrt_vals = np.sqrt(np.where(kept, eigvals, floor))
    inv_vals = np.zeros_like(eigvals)
    inv_vals[kept] = 1.0 / np.sqrt(eigvals[kept])

    sqrt = (eigvecs * sqrt_vals) @ eigvecs.T
    inv_sqrt = (eigvecs * inv_vals) @ eigvecs.T
    dropped = int((~kept).sum())
    if dropped:
        logger.debug(f"수치적 영공간 고유값 {dropped}개를 의사역에서 제외 (floor={floor:.3e})")

    return SpectralFactor(
        sqrt=0.5 * (sqrt + sqrt.T),
        inv_sqrt=0.5 * (inv_sqrt + inv_sqrt.T),
        eigen_floor=floor,
    )


def operator_nuclear_norm(R: np.ndarray, factor: SpectralFactor) -> float:
    """‖A‖_{H,*} = K^{1/2} R K^{1/2} 의 특이값 합"""
    R = np.asarray(R, dtype=float)
    n = factor.size
    if R.shape != (n, n):
        raise InputError(f"차원 불일치: R={R.shape}, K={n}x{n}")
    M = factor.sqrt @ R @ factor.sqrt
    return float(np.linalg.svd(M, compute_uv=False).sum())
