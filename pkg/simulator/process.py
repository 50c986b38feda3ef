"""
FAR(D) 정확 시뮬레이션과 oracle 예측
점수 과정 x_t = Σ_d Λ_d x_{t−d} + z_t 를 반복하고 X_t(s_i) = u_q(s_i)ᵀ x_t 로 합성합니다.
"""
import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.config_manager import get_system_config
from core.errors import InputError, NonStationaryError
from series.models import Grid, GridKind, SampledSeries
from .scenarios import FarGroundTruth, companion_spectral_radius

logger = logging.getLogger(__name__)


class SimOutput(BaseModel):
    """시뮬레이션 결과 - 관측 시계열과 기저 점수, 잡음 점수"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    series: SampledSeries
    scores: np.ndarray = Field(description="T×q 점수 x_t")
    noise_scores: np.ndarray = Field(description="T×q 잡음 점수 z_t")


def recursion_step(lags, history: np.ndarray, t: int, noise: np.ndarray) -> np.ndarray:
    """z_t + Σ_d Λ_d x_{t−d} (t−d < 0 인 항은 0)

    시뮬레이터와 검증 코드가 같은 덧셈 순서를 공유합니다.
    """
    acc = noise.copy()
    for d, lam in enumerate(lags, start=1):
        if t - d >= 0:
            acc = acc + lam @ history[t - d]
    return acc


def simulate(
    truth: FarGroundTruth,
    T: int,
    n: int,
    grid_kind=None,
    burn_in: Optional[int] = None,
    seed: Optional[int] = None,
    grid: Optional[Grid] = None,
) -> SimOutput:
    """영 초기 점수에서 burn_in+T 단계를 반복하고 마지막 T개를 반환

    같은 seed는 비트 단위로 같은 결과를 냅니다. 잡음과 무작위 격자는 SeedSequence에서 나눈 별도 스트림을 씁니다.
    """
    config = get_system_config()
    if burn_in is None:
        burn_in = config.get_burn_in()
    if burn_in < 0:
        raise InputError(f"burn_in은 0 이상이어야 합니다: {burn_in}")
    if T < truth.D + 1:
        raise InputError(f"T >= D+1이 필요합니다: T={T}, D={truth.D}")

    radius = companion_spectral_radius(truth)
    if radius >= 1.0:
        raise NonStationaryError(radius)
    if radius >= config.get_warn_radius():
        logger.warning(f"정상성 경계에 가까운 설정입니다: spectral radius={radius:.4f}")

    noise_seq, grid_seq = np.random.SeedSequence(seed).spawn(2)
    noise_rng = np.random.default_rng(noise_seq)

    if grid is None:
        if grid_kind is None:
            grid_kind = config.get_simulation_config().get("grid_kind", GridKind.MIDPOINT_EQUISPACED.value)
        grid = Grid.build(GridKind(grid_kind), n, rng=np.random.default_rng(grid_seq))
    elif grid.size != n:
        raise InputError(f"격자 크기({grid.size})가 n({n})과 다릅니다")

    total = burn_in + T
    q = truth.q
    z = truth.noise.draw(noise_rng, total, q)
    x = np.zeros((total, q))
    for t in range(total):
        x[t] = recursion_step(truth.lags, x, t, z[t])

    scores = x[burn_in:]
    noise_scores = z[burn_in:]
    U = truth.basis.evaluate(grid.points)
    values = scores @ U.T
    logger.debug(f"시뮬레이션 완료: T={T}, n={n}, q={q}, D={truth.D}, radius={radius:.4f}")
    return SimOutput(
        series=SampledSeries(grid=grid, values=values),
        scores=scores,
        noise_scores=noise_scores,
    )


def oracle_predict(truth: FarGroundTruth, history_scores, grid: Grid) -> np.ndarray:
    """조건부 평균 u_q(s_i)ᵀ Σ_d Λ_d x_{t−d}

    history_scores는 시간 순 D개 행 (마지막 행이 x_{t−1}).
    """
    history = np.atleast_2d(np.asarray(history_scores, dtype=float))
    if history.shape != (truth.D, truth.q):
        raise InputError(f"이력 점수 크기 {history.shape}가 ({truth.D},{truth.q})가 아닙니다")
    acc = np.zeros(truth.q)
    for d, lam in enumerate(truth.lags, start=1):
        acc = acc + lam @ history[-d]
    return truth.basis.evaluate(grid.points) @ acc
