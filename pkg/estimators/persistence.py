"""
적합된 모형의 JSON 저장/로드
predict 명령이 파일로부터 rkhs, bosq, anh 모형을 다시 불러올 수 있도록 합니다.
"""
import json
import logging
from pathlib import Path
from typing import Union

from core.errors import InputError, StorageError
from .baselines import BaselineFit
from .rkhs import OperatorEstimate

logger = logging.getLogger(__name__)

FittedModel = Union[OperatorEstimate, BaselineFit]


def model_to_dict(model: FittedModel) -> dict:
    if isinstance(model, OperatorEstimate):
        return {"method": "rkhs", "model": model.to_dict()}
    if isinstance(model, BaselineFit):
        return {"method": model.kind.value, "model": model.to_dict()}
    raise InputError(f"저장할 수 없는 모형 타입: {type(model).__name__}")


def model_from_dict(data: dict) -> FittedModel:
    method = data.get("method")
    if method == "rkhs":
        return OperatorEstimate.from_dict(data["model"])
    if method in ("bosq", "anh"):
        return BaselineFit.from_dict(data["model"])
    raise InputError(f"알 수 없는 모형 종류: {method}")


def save_model(model: FittedModel, path: Union[str, Path]) -> None:
    payload = model_to_dict(model)
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, ensure_ascii=False)
    except OSError as e:
        raise StorageError(f"모형 저장 실패 ({e})", path=str(path))
    logger.info(f"모형 저장 완료: {path} ({payload['method']})")


def load_model(path: Union[str, Path]) -> FittedModel:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise StorageError(f"모형 읽기 실패 ({e})", path=str(path))
    except json.JSONDecodeError as e:
        raise InputError(f"모형 파일 JSON 파싱 오류: {e}")
    return model_from_dict(data)
