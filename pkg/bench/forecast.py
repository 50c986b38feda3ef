"""
예측 평가 워크플로
(선택적) 1차 차분 후 학습/시험 분할, 학습 구간에서 한 번 적합, 시험 구간을 실제 지연 관측으로 한 단계씩 예측합니다.
"""
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from core.errors import InputError
from estimators import anh_fit, bosq_fit, cross_validate, fit
from series.models import SampledSeries
from series.ops import difference
from .metrics import step_mae, step_rmse

logger = logging.getLogger(__name__)

FORECAST_METHODS = ("rkhs", "anh", "bosq", "naive", "mean_zero")

# (전체 관측 행렬, 목표 행 t) → 예측 행
Predictor = Callable[[np.ndarray, int], np.ndarray]


class ForecastOptions(BaseModel):
    D: int = Field(default=1, description="RKHS/Bosq 차수 (ANH는 D_max)")
    lambdas: Optional[List[float]] = Field(default=None, description="지정하지 않으면 CV로 선택")
    lambda_grid: Optional[List[float]] = None
    folds: Optional[int] = None
    seed: Optional[int] = None
    bosq_num_basis: int = 10
    anh_num_basis: int = 10


class ForecastReport(BaseModel):
    """시점별 RMSE_t/MAE_t와 평균, RKHS 승률"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    steps: pd.DataFrame = Field(description="step, method, rmse, mae")
    mean_rmse: Dict[str, float]
    mean_mae: Dict[str, float]
    rkhs_win_pct: Optional[float] = Field(default=None, description="RKHS RMSE가 가장 작은 시점 비율(%)")


def prepare_forecast_split(
    series: SampledSeries, train_size: int, differenced: bool = False
) -> Tuple[SampledSeries, SampledSeries]:
    """차분(선택) 후 앞쪽 train_size개를 학습, 나머지를 시험으로"""
    data = difference(series) if differenced else series
    if not 1 <= train_size < data.T:
        raise InputError(f"train_size는 [1, {data.T - 1}] 범위여야 합니다: {train_size}")
    return data.head(train_size), data.tail(train_size)


def _fitted_predictor(method: str, train: SampledSeries, options: ForecastOptions) -> Predictor:
    if method == "naive":
        return lambda values, t: values[t - 1]
    if method == "mean_zero":
        return lambda values, t: np.zeros(values.shape[1])
    if method == "rkhs":
        if options.lambdas is not None:
            D, lambdas = options.D, options.lambdas
        else:
            choice = cross_validate(
                train, options.D, lambda_grid=options.lambda_grid, folds=options.folds, seed=options.seed
            )
            D, lambdas = choice.order, choice.lambdas
        model = fit(train, D, lambdas)
    elif method == "bosq":
        model = bosq_fit(train, options.D, num_basis=options.bosq_num_basis)
    elif method == "anh":
        model = anh_fit(train, options.D, num_basis=options.anh_num_basis)
    else:
        raise InputError(f"알 수 없는 방법: {method}")
    return lambda values, t: model.predict_rows(values, [t])[0]


def forecast_eval(
    train: SampledSeries,
    test: SampledSeries,
    methods: Sequence[str],
    options: Optional[ForecastOptions] = None,
    extra_predictors: Optional[Dict[str, Predictor]] = None,
) -> ForecastReport:
    """학습 구간에서 한 번 적합하고 시험 구간을 한 단계씩 굴려 평가"""
    if not train.grid.same_as(test.grid):
        raise InputError("학습/시험 시계열의 격자가 다릅니다")
    if test.T < 1:
        raise InputError("시험 구간이 비어 있습니다")
    options = options or ForecastOptions()
    predictors: Dict[str, Predictor] = {m: _fitted_predictor(m, train, options) for m in methods}
    predictors.update(extra_predictors or {})
    if not predictors:
        raise InputError("평가할 방법이 없습니다")

    values = np.vstack([train.values, test.values])
    targets = np.arange(train.T, values.shape[0])
    actual = values[targets]

    rows = []
    rmse: Dict[str, np.ndarray] = {}
    mae: Dict[str, np.ndarray] = {}
    for name, predictor in predictors.items():
        predictions = np.vstack([predictor(values, int(t)) for t in targets])
        rmse[name] = step_rmse(predictions, actual)
        mae[name] = step_mae(predictions, actual)
        for step, (r, a) in enumerate(zip(rmse[name], mae[name]), start=1):
            rows.append({"step": step, "method": name, "rmse": float(r), "mae": float(a)})

    win = None
    if "rkhs" in rmse and len(rmse) > 1:
        table = np.vstack([rmse[name] for name in rmse])
        rkhs_row = list(rmse).index("rkhs")
        wins = table[rkhs_row] <= table.min(axis=0)
        win = 100.0 * float(np.mean(wins))

    report = ForecastReport(
        steps=pd.DataFrame(rows, columns=["step", "method", "rmse", "mae"]),
        mean_rmse={name: float(np.mean(v)) for name, v in rmse.items()},
        mean_mae={name: float(np.mean(v)) for name, v in mae.items()},
        rkhs_win_pct=win,
    )
    logger.info(f"예측 평가 완료: steps={targets.size}, mean RMSE={report.mean_rmse}")
    return report
