"""
실험 설정 (ExperimentConfig)
평면(flat) YAML 키-값 파일을 읽어 pydantic 모델로 검증합니다. 중첩 매핑은 허용하지 않습니다.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from core.config_manager import get_system_config
from core.errors import InputError, StorageError
from simulator.scenarios import Scenario

logger = logging.getLogger(__name__)

METHODS = ("rkhs", "anh", "bosq", "naive", "mean_zero")


def _bench_default(key: str, fallback: Any) -> Any:
    return get_system_config().get_bench_config().get(key, fallback)


class ExperimentConfig(BaseModel):
    """한 시뮬레이션 설정의 반복 실험 정의

    T는 학습 길이이며 시험 구간 길이는 round(test_fraction·T) 입니다.
    """
    model_config = ConfigDict(extra="forbid")

    setting: Optional[str] = Field(default=None, description="결과 표의 설정 이름")
    scenario: str = Field(default="A", description="A | B | Ca | Cb (A2 등 별칭 허용)")
    q: int = 6
    n: int = 20
    T: int = 100
    D_true: int = 1
    kappas: List[float] = Field(default_factory=lambda: [0.5])
    replications: int = Field(default_factory=lambda: int(_bench_default("replications", 10)))
    seed: int = 0
    methods: List[str] = Field(default_factory=lambda: list(METHODS))
    test_fraction: float = Field(default_factory=lambda: float(_bench_default("test_fraction", 0.2)))
    grid_kind: str = "midpoint_equispaced"
    burn_in: Optional[int] = None
    noise_half_width: Optional[float] = None

    # RKHS 튜닝
    D_max: Optional[int] = Field(default=None, description="CV 차수 상한 (기본 D_true)")
    lambda_grid: Optional[List[float]] = None
    lambda_count: Optional[int] = None
    folds: Optional[int] = None
    fold_scheme: Optional[str] = None

    # 비교 방법
    bosq_num_basis: int = 10
    bosq_tau: Optional[float] = None
    anh_num_basis: Optional[int] = Field(default=None, description="기본 10, q=21이면 20")
    anh_D_max: Optional[int] = None

    @field_validator("scenario")
    @classmethod
    def _scenario(cls, v: str) -> str:
        Scenario.parse(v)
        return v

    @field_validator("methods")
    @classmethod
    def _methods(cls, v: List[str]) -> List[str]:
        unknown = [m for m in v if m not in METHODS]
        if unknown:
            raise InputError(f"알 수 없는 방법: {unknown} (가능: {list(METHODS)})")
        return v

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        if self.replications < 1:
            raise InputError(f"replications는 1 이상이어야 합니다: {self.replications}")
        if not 0.0 < self.test_fraction < 1.0:
            raise InputError(f"test_fraction은 (0,1) 범위여야 합니다: {self.test_fraction}")
        if self.n_test < 1:
            raise InputError(f"시험 구간이 비어 있습니다: test_fraction·T={self.test_fraction * self.T}")
        if self.q < 1 or self.n < 1 or self.D_true < 1:
            raise InputError("q, n, D_true는 1 이상이어야 합니다")
        if len(self.kappas) != self.D_true:
            raise InputError(f"kappas 길이({len(self.kappas)})가 D_true({self.D_true})와 다릅니다")
        if self.T <= max(self.tuning_D_max, self.D_true) + 1:
            raise InputError(f"T가 너무 짧습니다: T={self.T}")
        return self

    @property
    def n_test(self) -> int:
        return int(round(self.test_fraction * self.T))

    @property
    def tuning_D_max(self) -> int:
        return self.D_max if self.D_max is not None else self.D_true

    @property
    def anh_basis(self) -> int:
        if self.anh_num_basis is not None:
            return self.anh_num_basis
        return 20 if self.q == 21 else 10

    @property
    def label(self) -> str:
        if self.setting:
            return self.setting
        kappa = "-".join(format(k, "g") for k in self.kappas)
        return f"{self.scenario}_q{self.q}_n{self.n}_T{self.T}_k{kappa}"


def _reject_nested(data: Dict[str, Any], path: str) -> None:
    for key, value in data.items():
        if isinstance(value, dict):
            raise InputError(f"설정 파일은 평면 키-값이어야 합니다: '{key}'가 중첩 매핑입니다 ({path})")
        if isinstance(value, list) and any(isinstance(item, (dict, list)) for item in value):
            raise InputError(f"설정 파일의 목록은 스칼라만 담을 수 있습니다: '{key}' ({path})")


def load_experiment_config(path: Union[str, Path], **overrides: Any) -> ExperimentConfig:
    """YAML 실험 설정 로드 - overrides(CLI 플래그)가 파일 값보다 우선"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise StorageError(f"실험 설정 읽기 실패 ({e})", path=str(path))
    except yaml.YAMLError as e:
        raise InputError(f"실험 설정 YAML 파싱 오류: {e}")
    if not isinstance(data, dict):
        raise InputError(f"실험 설정 최상위는 매핑이어야 합니다: {path}")
    _reject_nested(data, str(path))
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = ExperimentConfig(**data)
    except ValidationError as e:
        raise InputError(f"실험 설정 검증 실패: {e}")
    logger.info(f"실험 설정 로드: {config.label} (replications={config.replications}, seed={config.seed})")
    return config
