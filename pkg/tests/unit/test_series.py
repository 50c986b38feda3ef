"""
함수형 시계열 데이터 모델 단위 테스트
격자, 구적 내적, 코사인 기저, 차분/누적합을 검증합니다.
"""

import sys
import os
import numpy as np
import pytest

# 프로젝트 루트를 Python 경로에 추가
project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, project_root)

from core.errors import InputError
from series import CosineBasis, Grid, GridKind, SampledSeries, cumulative_sum, difference, eval_cosine_basis, quad_inner
from tests.fixtures.test_data import make_series


@pytest.mark.unit
class TestGrid:
    """샘플링 격자"""

    def test_midpoint_exact(self):
        grid = Grid.midpoint(7)
        assert grid.kind == GridKind.MIDPOINT_EQUISPACED
        for i, p in enumerate(grid.points):
            assert p == (i + 0.5) / 7

    def test_uniform_random_sorted_and_seeded(self):
        a = Grid.uniform_random(30, seed=5)
        b = Grid.uniform_random(30, seed=5)
        assert np.array_equal(a.points, b.points)
        assert np.all(np.diff(a.points) > 0)
        assert a.kind == GridKind.UNIFORM_RANDOM

    def test_rejects_non_increasing(self):
        with pytest.raises(InputError):
            Grid.explicit([0.1, 0.1, 0.3])
        with pytest.raises(InputError):
            Grid.explicit([0.3, 0.2])

    def test_rejects_out_of_range(self):
        with pytest.raises(InputError):
            Grid.explicit([-0.1, 0.5])
        with pytest.raises(InputError):
            Grid.explicit([0.5, 1.1])

    def test_rejects_empty(self):
        with pytest.raises(InputError):
            Grid.explicit([])


@pytest.mark.unit
class TestSampledSeries:
    """T×n 관측 컨테이너"""

    def test_row_length_must_match_grid(self):
        with pytest.raises(InputError):
            SampledSeries(grid=Grid.midpoint(3), values=np.zeros((4, 2)))

    def test_values_must_be_finite(self):
        values = np.zeros((2, 3))
        values[1, 2] = np.nan
        with pytest.raises(InputError):
            SampledSeries(grid=Grid.midpoint(3), values=values)

    def test_head_tail(self):
        s = make_series(10, 4)
        assert s.head(6).T == 6
        assert s.tail(6).T == 4
        assert np.array_equal(s.tail(6).values, s.values[6:])


@pytest.mark.unit
class TestQuadrature:
    """1/n 가중 구적 내적"""

    def test_constant_function(self):
        assert quad_inner(np.ones(10), np.ones(10)) == pytest.approx(1.0)

    def test_cosine_norm(self):
        grid = Grid.midpoint(100)
        u = eval_cosine_basis(CosineBasis(q=3), grid)
        assert quad_inner(u[:, 1], u[:, 1], grid) == pytest.approx(1.0, abs=1e-3)

    def test_cosine_orthogonality(self):
        grid = Grid.midpoint(100)
        u = eval_cosine_basis(CosineBasis(q=3), grid)
        assert abs(quad_inner(u[:, 1], u[:, 2], grid)) < 1e-3

    def test_symmetric_bilinear(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            f, g, h = rng.standard_normal((3, 25))
            a, b = rng.standard_normal(2)
            assert quad_inner(f, g) == pytest.approx(quad_inner(g, f), abs=1e-12)
            lhs = quad_inner(a * f + b * h, g)
            rhs = a * quad_inner(f, g) + b * quad_inner(h, g)
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            quad_inner(np.ones(3), np.ones(4))


@pytest.mark.unit
class TestCosineBasis:
    """u_1 ≡ 1, u_i(s) = √2 cos((i−1)πs)"""

    def test_single_column_is_ones(self):
        U = eval_cosine_basis(CosineBasis(q=1), Grid.midpoint(5))
        assert np.array_equal(U, np.ones((5, 1)))

    def test_value_at_zero(self):
        U = eval_cosine_basis(CosineBasis(q=2), Grid.explicit([0.0]))
        assert np.allclose(U[0], [1.0, np.sqrt(2.0)], atol=1e-15)

    def test_value_at_half(self):
        U = eval_cosine_basis(CosineBasis(q=3), Grid.explicit([0.5]))
        assert U[0, 0] == 1.0
        assert abs(U[0, 1]) < 1e-15
        assert U[0, 2] == pytest.approx(-np.sqrt(2.0), abs=1e-15)

    def test_discrete_gramian(self):
        grid = Grid.midpoint(100)
        for q in (1, 6, 12, 21):
            U = eval_cosine_basis(CosineBasis(q=q), grid)
            assert np.max(np.abs(U.T @ U / 100 - np.eye(q))) < 1e-3

    def test_q_must_be_positive(self):
        with pytest.raises(InputError):
            CosineBasis(q=0)


@pytest.mark.unit
class TestDifferencing:
    """1차 차분과 누적합"""

    def test_constant_series(self):
        s = SampledSeries(grid=Grid.midpoint(4), values=np.tile([1.0, 2.0, 3.0, 4.0], (6, 1)))
        d = difference(s)
        assert d.T == 5
        assert np.all(d.values == 0.0)

    def test_two_rows(self):
        s = SampledSeries(grid=Grid.midpoint(2), values=[[1.0, 2.0], [4.0, 0.5]])
        assert np.array_equal(difference(s).values, [[3.0, -1.5]])

    def test_inverse_identity(self):
        s = make_series(12, 5, seed=3)
        restored = cumulative_sum(difference(s), s.values[0])
        assert restored.T == s.T
        assert np.allclose(restored.values, s.values, atol=1e-12)

    def test_too_short(self):
        with pytest.raises(InputError):
            difference(make_series(1, 3))
