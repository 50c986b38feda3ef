"""
블록 trace norm 최소화
min_W ‖X − Σ_d 𝒦_d W_d Z_d‖_F² + Σ_d ‖W_d‖_* 를 가속 근접 경사법(AGM)과 특이값 임계(SVT)로 풉니다.
"""
import logging
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.config_manager import get_system_config
from core.errors import InputError, NumericalFailure

logger = logging.getLogger(__name__)

# 선탐색 최대 확대 횟수 (eta=2이면 L이 2^200배까지)
_MAX_LINE_SEARCH = 200


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


class TraceNormProblem(BaseModel):
    """목표 X (n×m), 좌측 인자 𝒦_d (n×p_d), 우측 인자 Z_d (r_d×m)

    블록 변수 W_d는 p_d×r_d 입니다.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    target: np.ndarray
    left_factors: List[np.ndarray]
    right_factors: List[np.ndarray]

    @field_validator("target", mode="before")
    @classmethod
    def _target(cls, v):
        return _frozen(v)

    @field_validator("left_factors", "right_factors", mode="before")
    @classmethod
    def _factors(cls, v):
        return [_frozen(m) for m in v]

    @model_validator(mode="after")
    def _check_dims(self) -> "TraceNormProblem":
        X = self.target
        if X.ndim != 2:
            raise InputError(f"X는 2차원 행렬이어야 합니다: shape={X.shape}")
        if len(self.left_factors) == 0 or len(self.left_factors) != len(self.right_factors):
            raise InputError(
                f"블록 수 불일치: left={len(self.left_factors)}, right={len(self.right_factors)}"
            )
        n, m = X.shape
        for d, (K, Z) in enumerate(zip(self.left_factors, self.right_factors), start=1):
            if K.ndim != 2 or K.shape[0] != n:
                raise InputError(f"𝒦_{d}의 행 수가 {n}이 아닙니다: {K.shape}")
            if Z.ndim != 2 or Z.shape[1] != m:
                raise InputError(f"Z_{d}의 열 수가 {m}이 아닙니다: {Z.shape}")
        if not np.all(np.isfinite(X)):
            raise InputError("X에 유한하지 않은 값이 있습니다")
        return self

    @property
    def num_blocks(self) -> int:
        return len(self.left_factors)

    def block_shape(self, d: int) -> tuple:
        return (self.left_factors[d - 1].shape[1], self.right_factors[d - 1].shape[0])

    def zero_blocks(self) -> List[np.ndarray]:
        return [np.zeros(self.block_shape(d)) for d in range(1, self.num_blocks + 1)]

    def check_blocks(self, blocks: Sequence[np.ndarray]) -> List[np.ndarray]:
        if len(blocks) != self.num_blocks:
            raise InputError(f"블록 수 {len(blocks)}가 {self.num_blocks}와 다릅니다")
        out = []
        for d, W in enumerate(blocks, start=1):
            W = np.asarray(W, dtype=float)
            if W.shape != self.block_shape(d):
                raise InputError(f"W_{d} 크기 {W.shape}가 {self.block_shape(d)}가 아닙니다")
            out.append(W)
        return out

    def residual(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        """X − Σ_d 𝒦_d W_d Z_d"""
        E = np.array(self.target, dtype=float)
        for K, W, Z in zip(self.left_factors, blocks, self.right_factors):
            E -= K @ W @ Z
        return E


class AgmOptions(BaseModel):
    """AGM 옵션 - 기본값은 config/far.yaml의 solver 섹션과 같습니다."""

    L0: float = Field(default=1.0, description="초기 Lipschitz 추정값")
    eta: float = Field(default=2.0, description="선탐색 확대 배율")
    max_iter: int = Field(default=5000, description="최대 반복 수")
    rel_tol: float = Field(default=1e-8, description="상대 감소량 종료 기준")

    @model_validator(mode="after")
    def _check(self) -> "AgmOptions":
        if not self.L0 > 0:
            raise InputError(f"L0는 양수여야 합니다: {self.L0}")
        if not self.eta > 1:
            raise InputError(f"eta는 1보다 커야 합니다: {self.eta}")
        if self.max_iter < 1:
            raise InputError(f"max_iter는 1 이상이어야 합니다: {self.max_iter}")
        if not self.rel_tol >= 0:
            raise InputError(f"rel_tol은 0 이상이어야 합니다: {self.rel_tol}")
        return self

    @classmethod
    def from_config(cls, **overrides: Any) -> "AgmOptions":
        values: Dict[str, Any] = get_system_config().get_solver_config()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class AgmState(BaseModel):
    """AGM 실행 결과"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    blocks: List[np.ndarray]
    search_blocks: List[np.ndarray]
    alpha: float
    lipschitz: float
    iteration: int
    objective_trace: List[float]
    converged: bool = False

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]


def _smooth(problem: TraceNormProblem, blocks: Sequence[np.ndarray]) -> float:
    E = problem.residual(blocks)
    return float(np.vdot(E, E))


def _nuclear(blocks: Sequence[np.ndarray]) -> float:
    return float(sum(np.linalg.svd(W, compute_uv=False).sum() for W in blocks))


def objective(problem: TraceNormProblem, blocks: Sequence[np.ndarray]) -> float:
    """‖X − Σ 𝒦_d W_d Z_d‖_F² + Σ ‖W_d‖_*"""
    blocks = problem.check_blocks(blocks)
    return _smooth(problem, blocks) + _nuclear(blocks)


def _gradients(problem: TraceNormProblem, blocks: Sequence[np.ndarray]) -> List[np.ndarray]:
    E = problem.residual(blocks)
    return [-2.0 * K.T @ E @ Z.T for K, Z in zip(problem.left_factors, problem.right_factors)]


def gradient_block(problem: TraceNormProblem, blocks: Sequence[np.ndarray], d: int) -> np.ndarray:
    """∇_{W_d} g = −2 𝒦_dᵀ (X − Σ 𝒦_{d'} W_{d'} Z_{d'}) Z_dᵀ"""
    if not 1 <= d <= problem.num_blocks:
        raise InputError(f"블록 번호 d={d}가 범위 [1, {problem.num_blocks}] 밖입니다")
    blocks = problem.check_blocks(blocks)
    E = problem.residual(blocks)
    return -2.0 * problem.left_factors[d - 1].T @ E @ problem.right_factors[d - 1].T


def svt_prox(M: np.ndarray, tau: float) -> np.ndarray:
    """특이값 연성 임계 U·max(Σ−τ, 0)·Vᵀ"""
    if tau < 0:
        raise InputError(f"tau는 0 이상이어야 합니다: {tau}")
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return M.copy()
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    shrunk = np.maximum(s - tau, 0.0)
    return (U * shrunk) @ Vt


def _prox_step(
    problem: TraceNormProblem,
    search: List[np.ndarray],
    lipschitz: float,
    eta: float,
    iteration: int,
):
    """탐색점에서 선탐색 후 근접 경사 단계 - (새 블록, 평활항 값, 갱신된 L)"""
    g_search = _smooth(problem, search)
    grads = _gradients(problem, search)
    for _ in range(_MAX_LINE_SEARCH):
        step = 1.0 / (2.0 * lipschitz)
        candidate = [svt_prox(Y - step * G, step) for Y, G in zip(search, grads)]
        g_candidate = _smooth(problem, candidate)
        diffs = [P - Y for P, Y in zip(candidate, search)]
        model = (
            g_search
            + sum(float(np.vdot(D, G)) for D, G in zip(diffs, grads))
            + lipschitz * sum(float(np.vdot(D, D)) for D in diffs)
        )
        if not math.isfinite(g_candidate) or not math.isfinite(model):
            raise NumericalFailure("선탐색 중 유한하지 않은 값", iteration=iteration)
        if g_candidate <= model + 1e-12 * max(1.0, abs(model)):
            return candidate, g_candidate, lipschitz
        lipschitz *= eta
        logger.debug(f"선탐색 L 확대: iteration={iteration}, L={lipschitz:.3e}")
    raise NumericalFailure(f"선탐색이 {_MAX_LINE_SEARCH}회 안에 끝나지 않았습니다", iteration=iteration)


def agm_minimize(
    problem: TraceNormProblem,
    options: Optional[AgmOptions] = None,
    initial_blocks: Optional[Sequence[np.ndarray]] = None,
) -> AgmState:
    """단조(monotone) 가속 근접 경사법

    목적함수가 증가하면 모멘텀을 버리고 현재 반복점에서 다시 근접 단계를 밟습니다.
    종료: (F_{k−1} − F_k)/max(F_{k−1}, 1e−300) < rel_tol 또는 max_iter.
    """
    options = options or AgmOptions()
    if initial_blocks is None:
        current = problem.zero_blocks()
    else:
        current = [np.array(W, dtype=float) for W in problem.check_blocks(initial_blocks)]

    F = objective(problem, current)
    if not math.isfinite(F):
        raise NumericalFailure("초기 목적함수가 유한하지 않습니다", iteration=0)

    previous = [W.copy() for W in current]
    search = [W.copy() for W in current]
    alpha = 1.0
    lipschitz = options.L0
    trace = [F]
    converged = False
    iteration = 0

    for iteration in range(1, options.max_iter + 1):
        candidate, g_candidate, lipschitz = _prox_step(problem, search, lipschitz, options.eta, iteration)
        F_candidate = g_candidate + _nuclear(candidate)
        if not math.isfinite(F_candidate):
            raise NumericalFailure("목적함수가 유한하지 않습니다", iteration=iteration)

        if F_candidate > F:
            # 재시작: 모멘텀 없이 현재 반복점에서 다시 계산
            alpha = 1.0
            search = [W.copy() for W in current]
            candidate, g_candidate, lipschitz = _prox_step(problem, search, lipschitz, options.eta, iteration)
            F_candidate = g_candidate + _nuclear(candidate)
            if not math.isfinite(F_candidate):
                raise NumericalFailure("목적함수가 유한하지 않습니다", iteration=iteration)
            if F_candidate > F:
                # 반올림 수준의 증가 - 현재 점이 사실상 정류점
                candidate, F_candidate = current, F

        alpha_next = (1.0 + math.sqrt(1.0 + 4.0 * alpha * alpha)) / 2.0
        momentum = (alpha - 1.0) / alpha_next
        previous, current = current, candidate
        search = [W + momentum * (W - Wp) for W, Wp in zip(current, previous)]
        alpha = alpha_next

        decrease = (F - F_candidate) / max(F, 1e-300)
        F = F_candidate
        trace.append(F)
        if iteration % 500 == 0:
            logger.debug(f"AGM iteration={iteration}, F={F:.10e}, L={lipschitz:.3e}")
        if decrease < options.rel_tol:
            converged = True
            break

    if not converged:
        logger.warning(f"AGM이 max_iter={options.max_iter} 안에 수렴하지 않았습니다 (F={F:.6e})")
    logger.debug(f"AGM 종료: iterations={iteration}, F={F:.10e}, L={lipschitz:.3e}")
    return AgmState(
        blocks=current,
        search_blocks=search,
        alpha=alpha,
        lipschitz=lipschitz,
        iteration=iteration,
        objective_trace=trace,
        converged=converged,
    )
