"""
재생핵(reproducing kernel) 평가
W^{2,2}[0,1]의 Bernoulli 다항식 커널과 Gram 행렬 계산을 제공합니다.
"""
import logging
from enum import Enum
from typing import Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.errors import InputError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]


class KernelName(str, Enum):
    SOBOLEV_BERNOULLI = "sobolev_bernoulli"


def _k1(x: np.ndarray) -> np.ndarray:
    return x - 0.5


def _k2(x: np.ndarray) -> np.ndarray:
    k1 = _k1(x)
    return 0.5 * (k1 * k1 - 1.0 / 12.0)


def _k4(x: np.ndarray) -> np.ndarray:
    k1 = _k1(x)
    k1_sq = k1 * k1
    return (k1_sq * k1_sq - k1_sq / 2.0 + 7.0 / 240.0) / 24.0


def _bernoulli(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """𝕂(x,y) = 1 + k1(x)k1(y) + k2(x)k2(y) − k4(|x−y|)"""
    return 1.0 + _k1(x) * _k1(y) + _k2(x) * _k2(y) - _k4(np.abs(x - y))


class KernelSpec(BaseModel):
    """이름으로 식별되는 재생핵 - 정의역은 [0,1]로 고정"""
    model_config = ConfigDict(frozen=True)

    name: KernelName = Field(default=KernelName.SOBOLEV_BERNOULLI, description="커널 이름")

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """브로드캐스팅 가능한 배열에 대한 점별 평가 (정의역 검사 없음)"""
        if self.name == KernelName.SOBOLEV_BERNOULLI:
            return _bernoulli(x, y)
        raise InputError(f"지원하지 않는 커널: {self.name}")


def _check_domain(points: np.ndarray, label: str) -> None:
    if points.size and (not np.all(np.isfinite(points)) or points.min() < 0.0 or points.max() > 1.0):
        raise InputError(f"{label}는 [0,1] 범위여야 합니다")


def eval_kernel(spec: KernelSpec, x: float, y: float) -> float:
    """스칼라 커널 값 𝕂(x,y)"""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim or ya.ndim:
        raise InputError("eval_kernel은 스칼라 인자만 받습니다")
    _check_domain(xa, "x")
    _check_domain(ya, "y")
    return float(spec.evaluate(xa, ya))


def kernel_matrix(spec: KernelSpec, xs: ArrayLike, ys: ArrayLike) -> np.ndarray:
    """교차 커널 행렬 [𝕂(x_a, y_b)] - 행은 xs, 열은 ys

    k(r)_j = 𝕂(r, s_j) 벡터를 여러 r에 대해 한꺼번에 얻을 때 사용합니다.
    """
    xa = np.atleast_1d(np.asarray(xs, dtype=float))
    ya = np.atleast_1d(np.asarray(ys, dtype=float))
    _check_domain(xa, "xs")
    _check_domain(ya, "ys")
    return spec.evaluate(xa[:, None], ya[None, :])


def gram_matrix(spec: KernelSpec, grid: ArrayLike) -> np.ndarray:
    """샘플링 격자 위의 Gram 행렬 K (채운 뒤 (K+Kᵀ)/2로 대칭화)"""
    points = np.atleast_1d(np.asarray(getattr(grid, "points", grid), dtype=float))
    if points.size == 0:
        raise InputError("빈 격자로 Gram 행렬을 만들 수 없습니다")
    K = kernel_matrix(spec, points, points)
    K = 0.5 * (K + K.T)
    logger.debug(f"Gram 행렬 생성: n={points.size}")
    return K
