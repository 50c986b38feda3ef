"""
FPCA 기반 비교 추정기(Bosq, ANH) 단위 테스트
"""

import sys
import os
import numpy as np
import pytest

# 프로젝트 루트를 Python 경로에 추가
project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, project_root)

from core.errors import InputError, NumericalFailure
from estimators import (
    BaselineKind,
    anh_fit,
    baseline_predict,
    bosq_coefficients,
    bosq_fit,
    ffpe,
    fit_var_least_squares,
    load_model,
    save_model,
)
from estimators.baselines import _companion_radius
from tests.fixtures.test_data import make_series, small_far_series


def _ar_scores(coeffs, T, seed):
    """스칼라 AR(D) 점수열"""
    rng = np.random.default_rng(seed)
    x = np.zeros(T + 200)
    eps = rng.standard_normal(T + 200)
    for t in range(len(x)):
        x[t] = eps[t] + sum(c * x[t - d] for d, c in enumerate(coeffs, start=1) if t - d >= 0)
    return x[200:, None]


@pytest.fixture
def random_series():
    return make_series(60, 20, seed=12)


@pytest.mark.unit
class TestBosqCoefficients:
    """Yule-Walker 계수"""

    def test_constant_sequence(self):
        d = np.full((9, 1), 2.0)
        coeffs = bosq_coefficients(d, [float(np.mean(d ** 2))], 1)
        assert coeffs[0][0, 0] == pytest.approx(1.0, abs=1e-14)

    def test_alternating_sequence(self):
        d = (2.0 * (-1.0) ** np.arange(10))[:, None]
        coeffs = bosq_coefficients(d, [float(np.mean(d ** 2))], 1)
        assert coeffs[0][0, 0] == pytest.approx(-1.0, abs=1e-14)

    def test_second_order_recovery(self):
        scores = _ar_scores([0.5, 0.3], 20000, seed=1)
        coeffs = bosq_coefficients(scores, [float(np.mean(scores ** 2))], 2)
        assert coeffs[0][0, 0] == pytest.approx(0.5, abs=0.05)
        assert coeffs[1][0, 0] == pytest.approx(0.3, abs=0.05)

    def test_singular_eigenvalues(self):
        scores = np.random.default_rng(0).standard_normal((20, 2))
        with pytest.raises(NumericalFailure):
            bosq_coefficients(scores, [1.0, 0.0], 1)

    def test_too_short(self):
        with pytest.raises(InputError):
            bosq_coefficients(np.ones((2, 1)), [1.0], 2)


@pytest.mark.unit
class TestVarLeastSquares:
    """절편 없는 VAR 최소제곱"""

    def test_recovery(self):
        rng = np.random.default_rng(2)
        B = np.array([[0.5, 0.2], [-0.1, 0.3]])
        x = np.zeros((5000, 2))
        for t in range(1, 5000):
            x[t] = B @ x[t - 1] + rng.standard_normal(2)
        coeffs, resid = fit_var_least_squares(x, 1)
        assert np.allclose(coeffs[0], B, atol=0.05)
        assert resid.shape == (4999, 2)

    def test_too_few_rows(self):
        with pytest.raises(InputError):
            fit_var_least_squares(np.ones((5, 2)), 2)

    def test_ill_conditioned(self):
        col = np.random.default_rng(3).standard_normal((30, 1))
        with pytest.raises(NumericalFailure):
            fit_var_least_squares(np.hstack([col, col]), 1)


@pytest.mark.unit
class TestFfpe:
    """fFPE 기준"""

    def test_zero_components(self):
        assert ffpe(np.zeros((10, 0)), 0, 1, [3.0, 2.0, 1.0]) == pytest.approx(6.0)

    def test_manual_formula(self):
        scores = _ar_scores([0.6], 50, seed=4)
        lam = [float(np.mean(scores ** 2)), 0.2, 0.1]
        _, resid = fit_var_least_squares(scores, 1)
        expected = (50 + 1) / (50 - 1) * float(np.sum(resid ** 2)) / 49 + 0.3
        assert ffpe(scores, 1, 1, lam) == pytest.approx(expected, rel=1e-12)

    def test_requires_enough_samples(self):
        with pytest.raises(InputError):
            ffpe(np.ones((5, 2)), 2, 2, [1.0, 1.0])


@pytest.mark.unit
class TestBosqFit:
    """Bosq 추정기 전체 경로"""

    def test_fit_and_predict(self, random_series):
        fit = bosq_fit(random_series, D=1)
        assert fit.kind == BaselineKind.BOSQ
        assert fit.coeff_matrices[0].shape == (fit.p, fit.p)
        pred = baseline_predict(fit, random_series.values[-1:])
        assert pred.shape == (20,)
        assert np.all(np.isfinite(pred))

    def test_identity_propagation(self, random_series):
        fit = bosq_fit(random_series, D=1)
        identity = fit.model_copy(update={"coeff_matrices": [np.eye(fit.p)]})
        t = 17
        pred = baseline_predict(identity, random_series.values[t : t + 1])
        F = fit.fpca.eval_eigenfunctions(random_series.grid.points, fit.p)
        assert np.allclose(pred, F @ fit.fpca.scores[t, : fit.p], atol=1e-10)

    def test_predict_rows(self, random_series):
        fit = bosq_fit(random_series, D=2)
        rows = fit.predict_rows(random_series.values, [5, 30])
        assert np.allclose(rows[1], baseline_predict(fit, random_series.values[28:30]), atol=1e-14)

    def test_surface_and_singular_values(self, random_series):
        fit = bosq_fit(random_series, D=1)
        assert fit.operator_surface(1, [0.1, 0.5, 0.9], [0.3, 0.7]).shape == (3, 2)
        assert fit.singular_values(1).size == fit.p
        with pytest.raises(InputError):
            fit.singular_values(2)

    def test_history_shape(self, random_series):
        fit = bosq_fit(random_series, D=2)
        with pytest.raises(InputError):
            baseline_predict(fit, random_series.values[-1:])

    def test_tau_controls_components(self, random_series):
        assert bosq_fit(random_series, D=1, tau=0.3).p <= bosq_fit(random_series, D=1, tau=0.95).p


@pytest.mark.unit
class TestAnhFit:
    """fFPE 기반 (p, D) 선택"""

    def test_selects_minimum_criterion(self, random_series):
        fit = anh_fit(random_series, D_max=2)
        assert fit.kind == BaselineKind.ANH
        scores = fit.fpca.scores
        eigenvalues = fit.fpca.eigenvalues
        assert fit.criterion == pytest.approx(ffpe(scores, fit.p, fit.order, eigenvalues), rel=1e-12)
        for p in range(1, min(10, fit.fpca.p_max) + 1):
            for D in (1, 2):
                assert fit.criterion <= ffpe(scores, p, D, eigenvalues) * (1 + 1e-12)

    def test_degenerate_components_skipped(self, small_far_series):
        # 3차원 신호라 4번째 이후 성분은 fFPE 벌점만 늘림
        fit = anh_fit(small_far_series, D_max=1)
        assert fit.p <= 3
        assert np.isfinite(fit.criterion)

    def test_invalid_order(self, random_series):
        with pytest.raises(InputError):
            anh_fit(random_series, D_max=0)

    def test_companion_radius(self):
        radius = _companion_radius([np.array([[0.5]]), np.array([[0.3]])])
        assert radius == pytest.approx((0.5 + np.sqrt(1.45)) / 2, abs=1e-12)
        assert _companion_radius([np.eye(2)]) == pytest.approx(1.0)


@pytest.mark.unit
class TestBaselinePersistence:
    """비교 모형 저장/로드"""

    @pytest.mark.parametrize("method", ["bosq", "anh"])
    def test_round_trip_predictions(self, random_series, tmp_path, method):
        fit = bosq_fit(random_series, D=1) if method == "bosq" else anh_fit(random_series, D_max=2)
        path = tmp_path / f"{method}.json"
        save_model(fit, path)
        loaded = load_model(path)
        assert loaded.kind == fit.kind
        assert loaded.p == fit.p
        history = random_series.values[-loaded.order :]
        assert np.allclose(baseline_predict(loaded, history), baseline_predict(fit, history), atol=1e-12)


@pytest.mark.unit
class TestBaselineSanity:
    """표본 오차 수준의 회복"""

    def test_white_noise_scores(self):
        scores = np.random.default_rng(21).standard_normal((2000, 2))
        eigenvalues = np.mean(scores ** 2, axis=0)
        order = np.argsort(eigenvalues)[::-1]
        coeffs = bosq_coefficients(scores[:, order], eigenvalues[order], 1)
        assert np.linalg.norm(coeffs[0]) < 0.1

    def test_scalar_ar_recovery(self):
        scores = _ar_scores([0.7], 2000, seed=22)
        coeffs = bosq_coefficients(scores, [float(np.mean(scores ** 2))], 1)
        assert coeffs[0][0, 0] == pytest.approx(0.7, abs=0.1)

    def test_prediction_matches_induced_operator(self, random_series):
        fit = bosq_fit(random_series, D=1)
        history = random_series.values[-1:]
        basis = fit.fpca.basis
        fine_values = (basis.fit_coeffs(history) @ basis.fine.T)[0]
        m = basis.fine_grid.size
        surface = fit.operator_surface(1, random_series.grid.points, basis.fine_grid)
        assert np.allclose(surface @ fine_values / m, baseline_predict(fit, history), atol=1e-6)
