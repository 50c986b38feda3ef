"""
시스템 전역 설정 관리자
YAML 설정 파일(config/far.yaml)을 로드하고 시스템 전체에서 공유할 수 있는 수치 기본값을 제공합니다.
"""
import copy
import logging
import os
from typing import Any, Dict, Optional

import yaml

logger = logging.getLogger(__name__)

_DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(__file__), "..", "config", "far.yaml")


class ConfigManager:
    """시스템 전역 설정을 관리하는 싱글톤 클래스"""

    _instance: Optional["ConfigManager"] = None
    _config: Optional[Dict[str, Any]] = None

    def __new__(cls) -> "ConfigManager":
        """싱글톤 패턴 구현"""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        """설정 초기화 (한 번만 실행)"""
        if self._config is None:
            self._load_config()

    def _resolve_path(self) -> str:
        """환경 설정(FAR_CONFIG_PATH)이 있으면 우선 사용"""
        try:
            from app.deps import get_settings

            override = get_settings().FAR_CONFIG_PATH
            if override:
                return override
        except Exception as e:
            logger.debug(f"환경 설정 조회 실패, 기본 경로 사용: {e}")
        return _DEFAULT_CONFIG_PATH

    def _load_config(self) -> None:
        """YAML 설정 파일을 로드합니다."""
        config_path = self._resolve_path()
        try:
            with open(config_path, "r", encoding="utf-8") as file:
                loaded = yaml.safe_load(file) or {}
            self._config = self._merge(self._get_default_config(), loaded)
            logger.info(f"설정 파일이 성공적으로 로드되었습니다: {config_path}")
        except Exception as e:
            logger.error(f"설정 파일 로드 실패: {str(e)}")
            # 기본 설정으로 fallback
            self._config = self._get_default_config()

    @staticmethod
    def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
        """섹션 단위 병합 - 파일에 없는 키는 기본값 유지"""
        merged = copy.deepcopy(base)
        for section, values in override.items():
            if isinstance(values, dict) and isinstance(merged.get(section), dict):
                merged[section].update(values)
            else:
                merged[section] = values
        return merged

    def _get_default_config(self) -> Dict[str, Any]:
        """기본 설정을 반환합니다."""
        return {
            "kernel": {"name": "sobolev_bernoulli", "floor_ratio": 1e-12},
            "solver": {"L0": 1.0, "eta": 2.0, "max_iter": 5000, "rel_tol": 1e-8},
            "tuning": {
                "folds": 5,
                "fold_scheme": "contiguous",
                "lambda_count": 10,
                "lambda_low": 1e-4,
                "lambda_high": 1e2,
            },
            "simulation": {
                "burn_in": 200,
                "noise_half_width": 0.1,
                "grid_kind": "midpoint_equispaced",
                "warn_radius": 0.99,
            },
            "smoothing": {"num_basis": 10, "fine_grid_size": 101},
            "baselines": {"bosq_tau": 0.8, "anh_condition_limit": 1e12, "anh_max_p": 10},
            "metrics": {"mise_grid_size": 201},
            "bench": {"test_fraction": 0.2, "replications": 10},
        }

    def _section(self, name: str) -> Dict[str, Any]:
        return dict(self._config.get(name, {})) if self._config else {}

    def get_kernel_config(self) -> Dict[str, Any]:
        """커널/스펙트럼 관련 설정을 반환합니다."""
        return self._section("kernel")

    def get_solver_config(self) -> Dict[str, Any]:
        """AGM 솔버 설정을 반환합니다."""
        return self._section("solver")

    def get_tuning_config(self) -> Dict[str, Any]:
        """교차검증 설정을 반환합니다."""
        return self._section("tuning")

    def get_simulation_config(self) -> Dict[str, Any]:
        """시뮬레이터 설정을 반환합니다."""
        return self._section("simulation")

    def get_smoothing_config(self) -> Dict[str, Any]:
        """B-spline 평활 설정을 반환합니다."""
        return self._section("smoothing")

    def get_baselines_config(self) -> Dict[str, Any]:
        """FPCA 기반 비교 방법 설정을 반환합니다."""
        return self._section("baselines")

    def get_metrics_config(self) -> Dict[str, Any]:
        return self._section("metrics")

    def get_bench_config(self) -> Dict[str, Any]:
        """실험 하네스 설정을 반환합니다."""
        return self._section("bench")

    def get_floor_ratio(self) -> float:
        return float(self.get_kernel_config().get("floor_ratio", 1e-12))

    def get_burn_in(self) -> int:
        return int(self.get_simulation_config().get("burn_in", 200))

    def get_warn_radius(self) -> float:
        return float(self.get_simulation_config().get("warn_radius", 0.99))

    def get_mise_grid_size(self) -> int:
        return int(self.get_metrics_config().get("mise_grid_size", 201))

    def get_all_config(self) -> Dict[str, Any]:
        """전체 설정을 반환합니다."""
        return copy.deepcopy(self._config) if self._config else {}

    def reload_config(self) -> None:
        """설정을 다시 로드합니다."""
        self._config = None
        self._load_config()
        logger.info("설정이 다시 로드되었습니다.")


# 전역 설정 관리자 인스턴스
config_manager = ConfigManager()


def get_system_config() -> ConfigManager:
    """시스템 설정 관리자를 반환합니다."""
    return config_manager
