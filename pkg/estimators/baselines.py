"""
FPCA 기반 비교 추정기
Bosq의 Yule-Walker 추정기와 FPCA-VAR(ANH) 예측기 (fFPE로 (p, D) 선택).
"""
import logging
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.config_manager import get_system_config
from core.errors import InputError, NumericalFailure
from series.models import SampledSeries
from .fpca import FpcaResult, fpca, select_p_threshold
from .smoothing import smooth_bsplines

logger = logging.getLogger(__name__)

# 보존 고유값이 이 비율 이하이면 Λ̂가 특이하다고 봅니다.
_SINGULAR_RATIO = 1e-12


class BaselineKind(str, Enum):
    BOSQ = "bosq"
    ANH = "anh"


class BaselineFit(BaseModel):
    """Â_d(s,r) = f̂(s)ᵀ B̂_d f̂(r)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: BaselineKind
    p: int = Field(description="사용한 주성분 수")
    coeff_matrices: List[np.ndarray] = Field(description="p×p 계수 행렬 B̂_d (lag 1부터)")
    fpca: FpcaResult
    criterion: Optional[float] = Field(default=None, description="ANH 선택 시 fFPE 값")
    failed: bool = Field(default=False, description="선택된 VAR이 비정상(companion radius >= 1)")

    @field_validator("coeff_matrices", mode="before")
    @classmethod
    def _as_matrices(cls, v):
        return [np.atleast_2d(np.array(m, dtype=float)) for m in v]

    @property
    def order(self) -> int:
        return len(self.coeff_matrices)

    def _matrix(self, d: int) -> np.ndarray:
        if not 1 <= d <= self.order:
            raise InputError(f"lag d={d}가 범위 [1, {self.order}] 밖입니다")
        return self.coeff_matrices[d - 1]

    def operator_surface(self, d: int, r_points, s_points) -> np.ndarray:
        B = self._matrix(d)
        Fr = self.fpca.eval_eigenfunctions(r_points, self.p)
        Fs = self.fpca.eval_eigenfunctions(s_points, self.p)
        return Fr @ B @ Fs.T

    def singular_values(self, d: int) -> np.ndarray:
        return np.linalg.svd(self._matrix(d), compute_uv=False)

    def history_scores(self, history) -> np.ndarray:
        """원 격자의 이력 행 → 평활 → 앞쪽 p개 점수"""
        basis = self.fpca.basis
        coeffs = basis.fit_coeffs(history)
        fine_values = coeffs @ basis.fine.T
        return self.fpca.project(fine_values)[:, : self.p]

    def predict_rows(self, values, targets) -> np.ndarray:
        """각 목표 t에 대해 실제 지연 관측으로 한 단계 예측 (행 = 목표)"""
        values = np.asarray(values, dtype=float)
        out = np.zeros((len(targets), values.shape[1]))
        for row, t in enumerate(np.asarray(targets, dtype=int)):
            out[row] = baseline_predict(self, values[t - self.order : t])
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "p": self.p,
            "coeff_matrices": [B.tolist() for B in self.coeff_matrices],
            "fpca": self.fpca.to_dict(),
            "criterion": self.criterion,
            "failed": self.failed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BaselineFit":
        return cls(
            kind=BaselineKind(data["kind"]),
            p=int(data["p"]),
            coeff_matrices=data["coeff_matrices"],
            fpca=FpcaResult.from_dict(data["fpca"]),
            criterion=data.get("criterion"),
            failed=bool(data.get("failed", False)),
        )


def _companion_radius(coeffs: List[np.ndarray]) -> float:
    p = coeffs[0].shape[0]
    D = len(coeffs)
    C = np.zeros((p * D, p * D))
    C[:p, :] = np.hstack(coeffs)
    if D > 1:
        C[p:, : p * (D - 1)] = np.eye(p * (D - 1))
    return float(np.max(np.abs(np.linalg.eigvals(C))))


def bosq_coefficients(scores: np.ndarray, eigenvalues: np.ndarray, D: int) -> List[np.ndarray]:
    """점수 과정의 Yule-Walker 계수

    D=1: R = (1/(T−1)) Σ_t d̂_t d̂_{t−1}ᵀ diag(λ̂)^{-1}
    D>1: pD차원 동반 과정 y_t = (d̂_t, …, d̂_{t−D+1})에 같은 역산을 적용하고 첫 블록 행을 읽습니다.
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    T, p = scores.shape
    lam = np.asarray(eigenvalues, dtype=float)[:p]
    if T <= D:
        raise InputError(f"T > D가 필요합니다: T={T}, D={D}")
    if lam.size < p or lam[0] <= 0 or np.any(lam <= _SINGULAR_RATIO * lam[0]):
        raise NumericalFailure(f"특이한 Λ̂ 블록: 보존 고유값={lam.tolist()}")

    if D == 1:
        cross = scores[1:].T @ scores[:-1] / (T - 1)
        return [cross / lam[None, :]]

    stacked = np.hstack([scores[D - 1 - k : T - k] for k in range(D)])
    gamma0 = stacked.T @ stacked / stacked.shape[0]
    gamma1 = stacked[1:].T @ stacked[:-1] / (stacked.shape[0] - 1)
    try:
        R = scipy.linalg.solve(gamma0, gamma1.T, assume_a="pos").T
    except scipy.linalg.LinAlgError as e:
        raise NumericalFailure(f"동반 과정 Γ̂(0)이 특이합니다: {e}")
    return [R[:p, k * p : (k + 1) * p] for k in range(D)]


def bosq_fit(
    series: SampledSeries,
    D: int,
    tau: Optional[float] = None,
    num_basis: Optional[int] = None,
) -> BaselineFit:
    """평활 → FPCA → 설명 비율 tau로 p 선택 → Yule-Walker"""
    if D < 1:
        raise InputError(f"D는 1 이상이어야 합니다: {D}")
    if tau is None:
        tau = float(get_system_config().get_baselines_config().get("bosq_tau", 0.8))
    result = fpca(smooth_bsplines(series, num_basis))
    p = select_p_threshold(result.eigenvalues, tau)
    p = min(p, result.p_max)
    coeffs = bosq_coefficients(result.scores[:, :p], result.eigenvalues, D)
    logger.debug(f"Bosq 적합: D={D}, p={p}, tau={tau}")
    return BaselineFit(kind=BaselineKind.BOSQ, p=p, coeff_matrices=coeffs, fpca=result)


def fit_var_least_squares(
    scores: np.ndarray,
    D: int,
    condition_limit: Optional[float] = None,
) -> Tuple[List[np.ndarray], np.ndarray]:
    """절편 없는 VAR(D) 다변량 최소제곱 - (B̂_1..B̂_D, 잔차)"""
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    T, p = scores.shape
    if condition_limit is None:
        condition_limit = float(get_system_config().get_baselines_config().get("anh_condition_limit", 1e12))
    if T - D <= p * D:
        raise InputError(f"VAR 설계 행 수가 부족합니다: T={T}, p={p}, D={D}")
    design = np.hstack([scores[D - d : T - d] for d in range(1, D + 1)])
    response = scores[D:]
    cond = float(np.linalg.cond(design))
    if not np.isfinite(cond) or cond > condition_limit:
        raise NumericalFailure(f"VAR 설계가 악조건입니다: cond={cond:.3e} (p={p}, D={D})")
    solution, *_ = np.linalg.lstsq(design, response, rcond=None)
    coeffs = [solution[(d - 1) * p : d * p].T for d in range(1, D + 1)]
    return coeffs, response - design @ solution


def _ffpe_value(resid: np.ndarray, T: int, p: int, D: int, eigenvalues: np.ndarray) -> float:
    trace = float(np.vdot(resid, resid)) / (T - D)
    return (T + p * D) / (T - p * D) * trace + float(np.asarray(eigenvalues)[p:].sum())


def ffpe(scores: np.ndarray, p: int, D: int, eigenvalues) -> float:
    """fFPE(p,D) = ((T+pD)/(T−pD))·tr(Σ̂_ε) + Σ_{i>p} λ̂_i

    Σ̂_ε는 앞쪽 p개 점수에 대한 VAR(D) 잔차 공분산 (T−D로 정규화). p=0이면 Σ λ̂.
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    lam = np.asarray(eigenvalues, dtype=float).reshape(-1)
    T = scores.shape[0]
    if p < 0 or D < 1:
        raise InputError(f"p >= 0, D >= 1이 필요합니다: p={p}, D={D}")
    tail = float(lam[p:].sum())
    if p == 0:
        return tail
    if p > scores.shape[1]:
        raise InputError(f"점수 열 수({scores.shape[1]})가 p({p})보다 적습니다")
    if not T > p * D + 1:
        raise InputError(f"T > pD+1이 필요합니다: T={T}, p={p}, D={D}")
    _, resid = fit_var_least_squares(scores[:, :p], D, condition_limit=np.inf)
    return _ffpe_value(resid, T, p, D, lam)


def anh_fit(
    series: SampledSeries,
    D_max: int,
    num_basis: Optional[int] = None,
    max_p: Optional[int] = None,
    condition_limit: Optional[float] = None,
) -> BaselineFit:
    """모든 후보 (p, D)에 대해 VAR을 적합하고 fFPE 최소 후보를 선택

    악조건 후보는 경고 후 건너뜁니다. 동점이면 먼저 나온 (작은 p, 작은 D) 후보.
    """
    if D_max < 1:
        raise InputError(f"D_max는 1 이상이어야 합니다: {D_max}")
    cfg = get_system_config().get_baselines_config()
    max_p = int(max_p if max_p is not None else cfg.get("anh_max_p", 10))
    result = fpca(smooth_bsplines(series, num_basis))
    scores = result.scores
    T = scores.shape[0]

    best: Optional[Tuple[float, int, List[np.ndarray]]] = None
    for p in range(1, min(max_p, result.p_max) + 1):
        for D in range(1, D_max + 1):
            if not T > p * D + 1 or T - D <= p * D:
                continue
            try:
                coeffs, resid = fit_var_least_squares(scores[:, :p], D, condition_limit)
            except NumericalFailure as e:
                logger.warning(f"ANH 후보 제외: {e}")
                continue
            value = _ffpe_value(resid, T, p, D, result.eigenvalues)
            if best is None or value < best[0]:
                best = (value, p, coeffs)

    if best is None:
        raise NumericalFailure("ANH: 적합 가능한 (p, D) 후보가 없습니다")
    value, p, coeffs = best
    radius = _companion_radius(coeffs)
    failed = radius >= 1.0
    if failed:
        logger.warning(f"ANH 선택 VAR이 비정상입니다: radius={radius:.4f} (p={p}, D={len(coeffs)})")
    logger.debug(f"ANH 선택: p={p}, D={len(coeffs)}, fFPE={value:.6e}")
    return BaselineFit(
        kind=BaselineKind.ANH, p=p, coeff_matrices=coeffs, fpca=result, criterion=value, failed=failed
    )


def baseline_predict(fit: BaselineFit, history) -> np.ndarray:
    """X̂(s_i) = f̂(s_i)ᵀ Σ_d B̂_d x_{−d} (history는 시간 순 D개 행)"""
    history = np.atleast_2d(np.asarray(history, dtype=float))
    n = fit.fpca.basis.grid.size
    if history.shape != (fit.order, n):
        raise InputError(f"이력 크기 {history.shape}가 ({fit.order},{n})가 아닙니다")
    x = fit.history_scores(history)
    acc = np.zeros(fit.p)
    for d, B in enumerate(fit.coeff_matrices, start=1):
        acc = acc + B @ x[-d]
    return fit.fpca.eval_eigenfunctions(fit.fpca.basis.grid.points, fit.p) @ acc
