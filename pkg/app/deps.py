# deps.py: 실행 환경 설정
#
# 환경변수 (.env 지원):
# FAR_LOG_LEVEL=INFO            # 로그 레벨
# FAR_THREADS=1                 # 반복 실험 워커 수
# FAR_OUTPUT_DIR=bench/out      # 결과 기본 출력 경로
# FAR_CONFIG_PATH=              # config/far.yaml 대신 사용할 설정 파일

from functools import lru_cache
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    FAR_ENV: str = "dev"
    FAR_LOG_LEVEL: str = "INFO"
    FAR_THREADS: int = 1
    FAR_OUTPUT_DIR: str = "bench/out"
    FAR_CONFIG_PATH: Optional[str] = None


@lru_cache()
def get_settings() -> Settings:
    return Settings()
