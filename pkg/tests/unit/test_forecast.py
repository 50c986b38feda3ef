"""
예측 평가 워크플로 단위 테스트
"""

import sys
import os
import numpy as np
import pytest

# 프로젝트 루트를 Python 경로에 추가
project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, project_root)

from core.errors import InputError
from bench import ForecastOptions, forecast_eval, prepare_forecast_split
from estimators import fit
from series import Grid, SampledSeries
from tests.fixtures.test_data import make_series, small_far_series


@pytest.mark.unit
class TestSplit:
    """학습/시험 분할"""

    def test_plain_split(self):
        train, test = prepare_forecast_split(make_series(10, 3), 7)
        assert (train.T, test.T) == (7, 3)

    def test_differenced_split(self):
        series = make_series(10, 3, seed=1)
        train, test = prepare_forecast_split(series, 6, differenced=True)
        assert (train.T, test.T) == (6, 3)
        assert np.allclose(train.values[0], series.values[1] - series.values[0])

    @pytest.mark.parametrize("size", [0, 10])
    def test_invalid_size(self, size):
        with pytest.raises(InputError):
            prepare_forecast_split(make_series(10, 3), size)


@pytest.mark.unit
class TestForecastEval:
    """시점별 오차와 승률"""

    def test_reference_methods(self):
        series = SampledSeries(grid=Grid.midpoint(2), values=[[1.0, 1.0], [2.0, 2.0], [4.0, 0.0]])
        train, test = prepare_forecast_split(series, 2)
        report = forecast_eval(train, test, ["naive", "mean_zero"])
        assert report.mean_rmse["naive"] == pytest.approx(2.0)
        assert report.mean_rmse["mean_zero"] == pytest.approx(np.sqrt(8.0))
        assert report.mean_mae["naive"] == pytest.approx(2.0)
        assert report.rkhs_win_pct is None
        assert list(report.steps.columns) == ["step", "method", "rmse", "mae"]

    def test_win_pct_counts_ties(self, small_far_series):
        train, test = prepare_forecast_split(small_far_series, 50)
        options = ForecastOptions(lambdas=[0.1])
        model = fit(train, 1, [0.1])
        # RKHS와 같은 예측기를 추가하면 모든 시점이 동점이고 동점은 승리로 집계
        twin = {"twin": lambda values, t: model.predict_rows(values, [t])[0]}
        tied = forecast_eval(train, test, ["rkhs"], options, extra_predictors=twin)
        assert tied.rkhs_win_pct == pytest.approx(100.0)
        alone = forecast_eval(train, test, ["rkhs"], options)
        assert alone.rkhs_win_pct is None

    def test_all_methods_run(self, small_far_series):
        train, test = prepare_forecast_split(small_far_series, 45)
        options = ForecastOptions(lambda_grid=[0.01, 1.0], folds=3)
        report = forecast_eval(train, test, ["rkhs", "anh", "bosq", "naive", "mean_zero"], options)
        assert set(report.mean_rmse) == {"rkhs", "anh", "bosq", "naive", "mean_zero"}
        assert len(report.steps) == 5 * 15
        assert 0.0 <= report.rkhs_win_pct <= 100.0

    def test_grid_mismatch(self):
        with pytest.raises(InputError):
            forecast_eval(make_series(5, 3), make_series(3, 4), ["naive"])

    def test_unknown_method(self):
        with pytest.raises(InputError):
            forecast_eval(make_series(5, 3), make_series(3, 3), ["arima"])


@pytest.mark.unit
class TestForecastEdgeCases:
    """기준 예측기"""

    def test_naive_on_constant_series(self):
        series = SampledSeries(grid=Grid.midpoint(3), values=np.tile([1.0, -2.0, 0.5], (8, 1)))
        train, test = prepare_forecast_split(series, 5)
        report = forecast_eval(train, test, ["naive"])
        assert np.all(report.steps["rmse"] == 0.0)

    def test_perfect_predictor(self):
        series = make_series(8, 4, seed=2)
        train, test = prepare_forecast_split(series, 5)
        perfect = {"perfect": lambda values, t: values[t]}
        report = forecast_eval(train, test, [], extra_predictors=perfect)
        assert report.mean_mae["perfect"] == 0.0
