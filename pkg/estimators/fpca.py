"""
함수형 주성분 분석 (FPCA)
세밀 격자 위 표본 공분산 C̃(s,r) = (1/T) Σ X_t(s) X_t(r) 를 1/m 구적 가중으로 고유분해합니다.
"""
import logging
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.errors import InputError, UndefinedMetricError
from .smoothing import SmoothedCurves, SplineBasis

logger = logging.getLogger(__name__)

_RATIO_TOL = 1e-12


class FpcaResult(BaseModel):
    """내림차순 고유값, 단위 L2 노름 고유함수, 점수"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis: SplineBasis
    eigenvalues: np.ndarray = Field(description="λ̂_i (내림차순, 0 이상)")
    eigenfunctions: np.ndarray = Field(description="m×p_max 세밀 격자 값")
    eigen_coeffs: np.ndarray = Field(description="num_basis×p_max 고유함수의 spline 계수")
    scores: np.ndarray = Field(description="T×p_max 점수 ⟨X_t, f̂_i⟩")

    @property
    def p_max(self) -> int:
        return int(self.eigenfunctions.shape[1])

    def eval_eigenfunctions(self, points, p: int) -> np.ndarray:
        """len(points)×p 행렬 f̂_i(points)"""
        if not 0 <= p <= self.p_max:
            raise InputError(f"p={p}가 범위 [0, {self.p_max}] 밖입니다")
        return self.basis.evaluate(points, self.eigen_coeffs[:, :p].T)

    def project(self, fine_values) -> np.ndarray:
        """세밀 격자 곡선의 점수 (1/m 구적)"""
        fine_values = np.atleast_2d(np.asarray(fine_values, dtype=float))
        m = self.eigenfunctions.shape[0]
        return fine_values @ self.eigenfunctions / m

    def to_dict(self) -> Dict[str, Any]:
        return {
            "basis": self.basis.to_dict(),
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenfunctions": self.eigenfunctions.tolist(),
            "eigen_coeffs": self.eigen_coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FpcaResult":
        eigenfunctions = np.array(data["eigenfunctions"], dtype=float)
        return cls(
            basis=SplineBasis.from_dict(data["basis"]),
            eigenvalues=np.array(data["eigenvalues"], dtype=float),
            eigenfunctions=eigenfunctions,
            eigen_coeffs=np.array(data["eigen_coeffs"], dtype=float),
            scores=np.zeros((0, eigenfunctions.shape[1])),
        )


def fpca(smoothed: SmoothedCurves, p_max: Optional[int] = None) -> FpcaResult:
    """세밀 격자 공분산의 고유분해

    고유함수는 (1/m)Σ f̂² = 1 로 정규화하고, 점수는 구적으로 계산합니다.
    보존 개수는 기본적으로 min(T, num_basis, m) - 자료의 계수가 그 이상일 수 없습니다.
    """
    V = np.asarray(smoothed.values)
    T, m = V.shape
    if T < 2:
        raise InputError(f"FPCA에는 T >= 2가 필요합니다: T={T}")
    limit = min(T, smoothed.num_basis, m)
    p_max = limit if p_max is None else min(int(p_max), limit)

    weighted = (V.T @ V) / T / m
    weighted = 0.5 * (weighted + weighted.T)
    eigvals, eigvecs = np.linalg.eigh(weighted)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order[:p_max]]

    eigenfunctions = eigvecs * np.sqrt(m)
    eigen_coeffs, *_ = np.linalg.lstsq(smoothed.basis.fine, eigenfunctions, rcond=None)
    scores = V @ eigenfunctions / m
    logger.debug(f"FPCA 완료: T={T}, m={m}, p_max={p_max}, λ̂_1={eigvals[0]:.4e}")
    return FpcaResult(
        basis=smoothed.basis,
        eigenvalues=eigvals,
        eigenfunctions=eigenfunctions,
        eigen_coeffs=eigen_coeffs,
        scores=scores,
    )


def explained_ratios(eigenvalues) -> np.ndarray:
    """누적 설명 분산 비율"""
    lam = np.asarray(eigenvalues, dtype=float).reshape(-1)
    if lam.size == 0 or np.any(lam < 0):
        raise InputError("고유값은 비어 있지 않은 0 이상 벡터여야 합니다")
    total = float(lam.sum())
    if total <= 0.0:
        raise UndefinedMetricError("모든 고유값이 0이라 설명 비율이 정의되지 않습니다")
    return np.cumsum(lam) / total


def select_p_threshold(eigenvalues, tau: float = 0.8) -> int:
    """누적 설명 비율이 tau 이상이 되는 최소 p"""
    if not 0.0 < tau <= 1.0:
        raise InputError(f"tau는 (0, 1] 범위여야 합니다: {tau}")
    ratios = explained_ratios(eigenvalues)
    return int(np.argmax(ratios >= tau - _RATIO_TOL)) + 1
