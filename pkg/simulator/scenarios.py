"""
유한 계수 FAR(D) 참 모형과 시나리오 생성기
A_d(r,s) = u_q(r)ᵀ Λ_d u_q(s) 형태의 전이 연산자를 코사인 기저 위에서 정의합니다.
"""
import logging
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.config_manager import get_system_config
from core.errors import InputError
from series.models import CosineBasis

logger = logging.getLogger(__name__)


class Scenario(str, Enum):
    A = "A"
    B = "B"
    CA = "Ca"
    CB = "Cb"

    @classmethod
    def parse(cls, value: Any) -> "Scenario":
        """'A2', 'Cb2' 같은 차수 선택 실험 별칭도 허용"""
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        if text.endswith("2") and len(text) > 1:
            text = text[:-1]
        for member in cls:
            if member.value.lower() == text.lower():
                return member
        raise InputError(f"알 수 없는 시나리오: {value}")


class NoiseKind(str, Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


class NoiseSpec(BaseModel):
    """기저 점수 잡음 z_t의 분포 - 균등 U(−a,a) 또는 좌표별 N(0,σ_i²)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: NoiseKind
    half_width: Optional[float] = Field(default=None, description="uniform 반폭 a")
    sigmas: Optional[np.ndarray] = Field(default=None, description="gaussian 표준편차 벡터")

    @field_validator("sigmas", mode="before")
    @classmethod
    def _as_vector(cls, v):
        if v is None:
            return None
        arr = np.array(v, dtype=float).reshape(-1)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check(self) -> "NoiseSpec":
        if self.kind == NoiseKind.UNIFORM:
            if self.half_width is None or not self.half_width > 0:
                raise InputError(f"uniform 잡음의 반폭은 양수여야 합니다: {self.half_width}")
        else:
            if self.sigmas is None or self.sigmas.size == 0 or not np.all(self.sigmas > 0):
                raise InputError("gaussian 잡음의 표준편차는 모두 양수여야 합니다")
        return self

    @classmethod
    def uniform(cls, half_width: float) -> "NoiseSpec":
        return cls(kind=NoiseKind.UNIFORM, half_width=half_width)

    @classmethod
    def gaussian(cls, sigmas: Sequence[float]) -> "NoiseSpec":
        return cls(kind=NoiseKind.GAUSSIAN, sigmas=sigmas)

    def draw(self, rng: np.random.Generator, count: int, q: int) -> np.ndarray:
        """count×q 잡음 점수 행렬"""
        if self.kind == NoiseKind.UNIFORM:
            return rng.uniform(-self.half_width, self.half_width, size=(count, q))
        if self.sigmas.size != q:
            raise InputError(f"sigmas 길이({self.sigmas.size})가 q({q})와 다릅니다")
        return rng.standard_normal(size=(count, q)) * self.sigmas[None, :]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "half_width": self.half_width,
            "sigmas": None if self.sigmas is None else self.sigmas.tolist(),
        }


class FarGroundTruth(BaseModel):
    """코사인 기저 위 전이 행렬 Λ_1..Λ_D와 잡음 명세"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis: CosineBasis
    lags: List[np.ndarray] = Field(description="q×q 전이 행렬 목록 (lag 1부터)")
    noise: NoiseSpec

    @field_validator("lags", mode="before")
    @classmethod
    def _as_matrices(cls, v):
        out = []
        for m in v:
            arr = np.array(m, dtype=float)
            arr.setflags(write=False)
            out.append(arr)
        return out

    @model_validator(mode="after")
    def _check_shapes(self) -> "FarGroundTruth":
        if len(self.lags) < 1:
            raise InputError("최소 한 개의 lag가 필요합니다 (D >= 1)")
        q = self.basis.q
        for d, lam in enumerate(self.lags, start=1):
            if lam.shape != (q, q):
                raise InputError(f"Λ_{d}의 크기 {lam.shape}가 ({q},{q})가 아닙니다")
        return self

    @property
    def D(self) -> int:
        return len(self.lags)

    @property
    def q(self) -> int:
        return self.basis.q

    def lag(self, d: int) -> np.ndarray:
        if not 1 <= d <= self.D:
            raise InputError(f"lag d={d}가 범위 [1, {self.D}] 밖입니다")
        return self.lags[d - 1]

    def companion_matrix(self) -> np.ndarray:
        """qD×qD 동반 행렬 - 첫 블록 행 [Λ_1 … Λ_D], 부대각선은 단위행렬"""
        q, D = self.q, self.D
        C = np.zeros((q * D, q * D))
        C[:q, :] = np.hstack(self.lags)
        if D > 1:
            C[q:, : q * (D - 1)] = np.eye(q * (D - 1))
        return C

    def operator_surface(self, d: int, r_points, s_points) -> np.ndarray:
        """A_d(r_a, s_b) 행렬"""
        Ur = self.basis.evaluate(r_points)
        Us = self.basis.evaluate(s_points)
        return Ur @ self.lag(d) @ Us.T

    @property
    def order(self) -> int:
        return self.D

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "lags": [lam.tolist() for lam in self.lags],
            "noise": self.noise.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FarGroundTruth":
        noise = data["noise"]
        return cls(
            basis=CosineBasis(q=int(data["q"])),
            lags=data["lags"],
            noise=NoiseSpec(kind=noise["kind"], half_width=noise.get("half_width"), sigmas=noise.get("sigmas")),
        )


def _scenario_c_sigmas(scenario: Scenario, q: int) -> np.ndarray:
    idx = np.arange(1, q + 1, dtype=float)
    if scenario == Scenario.CA:
        return 1.0 / idx
    return 1.2 ** (-idx)


def _rescale(raw: np.ndarray, kappa: float) -> np.ndarray:
    """κ·Λ*/σ_max(Λ*) - κ=0이면 영행렬"""
    if kappa == 0.0:
        return np.zeros_like(raw)
    top = float(np.linalg.norm(raw, 2))
    if top == 0.0:
        raise InputError("무작위 행렬의 최대 특이값이 0입니다")
    return kappa * raw / top


def make_scenario(
    scenario,
    q: int,
    D: int,
    kappas: Sequence[float],
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    noise_half_width: Optional[float] = None,
) -> FarGroundTruth:
    """시나리오 A/B/Ca/Cb의 참 모형 생성

    A: Λ_d = κ_d I, B: Λ* ~ N(0,1) 후 최대 특이값 κ_d로 재조정,
    Ca/Cb: Λ*_ij ~ N(0, σ_iσ_j) 후 같은 재조정, 잡음은 N(0, σ_i²).
    """
    scenario = Scenario.parse(scenario)
    if q < 1:
        raise InputError(f"q는 1 이상이어야 합니다: {q}")
    if D < 1:
        raise InputError(f"D는 1 이상이어야 합니다: {D}")
    kappas = [float(k) for k in np.atleast_1d(kappas)]
    if len(kappas) != D:
        raise InputError(f"kappas 길이({len(kappas)})가 D({D})와 다릅니다")
    if any(k < 0 or not np.isfinite(k) for k in kappas):
        raise InputError(f"κ_d는 0 이상이어야 합니다: {kappas}")

    rng = rng if rng is not None else np.random.default_rng(seed)
    if noise_half_width is None:
        noise_half_width = float(get_system_config().get_simulation_config().get("noise_half_width", 0.1))

    lags = []
    if scenario == Scenario.A:
        lags = [kappa * np.eye(q) for kappa in kappas]
        noise = NoiseSpec.uniform(noise_half_width)
    elif scenario == Scenario.B:
        for kappa in kappas:
            # κ=0이어도 난수는 소비 - 다른 lag의 난수열 고정
            lags.append(_rescale(rng.standard_normal(size=(q, q)), kappa))
        noise = NoiseSpec.uniform(noise_half_width)
    else:
        sigmas = _scenario_c_sigmas(scenario, q)
        scale = np.sqrt(np.outer(sigmas, sigmas))
        for kappa in kappas:
            lags.append(_rescale(rng.standard_normal(size=(q, q)) * scale, kappa))
        noise = NoiseSpec.gaussian(sigmas)

    truth = FarGroundTruth(basis=CosineBasis(q=q), lags=lags, noise=noise)
    logger.debug(f"시나리오 {scenario.value} 생성: q={q}, D={D}, kappas={kappas}")
    return truth


def companion_spectral_radius(truth: FarGroundTruth) -> float:
    """동반 행렬의 최대 절대 고유값"""
    return float(np.max(np.abs(np.linalg.eigvals(truth.companion_matrix()))))


def eval_true_operator(truth: FarGroundTruth, d: int, r: float, s: float) -> float:
    """A_d(r,s) = u_q(r)ᵀ Λ_d u_q(s)"""
    lam = truth.lag(d)
    ur = truth.basis.evaluate([r])[0]
    us = truth.basis.evaluate([s])[0]
    return float(ur @ lam @ us)
