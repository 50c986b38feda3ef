"""
커널 및 스펙트럼 대수 단위 테스트
Bernoulli 커널 닫힌 형태, Gram 행렬의 대칭/양반정치성, K^{1/2}·K^{-1/2}, 연산자 핵노름을 검증합니다.
"""

import sys
import os
import numpy as np
import pytest

# 프로젝트 루트를 Python 경로에 추가
project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, project_root)

from core.errors import InputError
from kernels import KernelSpec, eval_kernel, gram_matrix, kernel_matrix, operator_nuclear_norm, spectral_sqrt
from series import Grid
from tests.fixtures.test_data import kernel


@pytest.mark.unit
class TestBernoulliKernel:
    """닫힌 형태 커널 값"""

    def test_closed_form_corner(self, kernel):
        # 1 + k1(0)² + k2(0)² − k4(0) = 1.25 + 1/144 + 1/720
        assert eval_kernel(kernel, 0.0, 0.0) == pytest.approx(1.25 + 1 / 144 + 1 / 720, abs=1e-12)

    def test_closed_form_center(self, kernel):
        assert eval_kernel(kernel, 0.5, 0.5) == pytest.approx(1 + 1 / 576 + 1 / 720, abs=1e-12)
        assert eval_kernel(kernel, 0.5, 0.5) == pytest.approx(1.003125, abs=1e-12)

    def test_closed_form_opposite_ends(self, kernel):
        assert eval_kernel(kernel, 0.0, 1.0) == pytest.approx(0.758333333333, abs=1e-11)
        assert eval_kernel(kernel, 0.0, 1.0) == pytest.approx(0.75 + 1 / 144 + 1 / 720, abs=1e-12)

    def test_exact_symmetry(self, kernel):
        rng = np.random.default_rng(0)
        pairs = rng.uniform(0, 1, size=(1000, 2))
        for x, y in pairs:
            assert eval_kernel(kernel, x, y) == eval_kernel(kernel, y, x)

    def test_diagonal_bound(self, kernel):
        r = np.linspace(0, 1, 1001)
        diag = kernel.evaluate(r, r)
        assert diag.max() <= 1.26

    def test_domain_violation(self, kernel):
        with pytest.raises(InputError):
            eval_kernel(kernel, -0.1, 0.5)
        with pytest.raises(InputError):
            eval_kernel(kernel, 0.5, 1.5)


@pytest.mark.unit
class TestGramMatrix:
    """Gram 행렬"""

    def test_single_point(self, kernel):
        K = gram_matrix(kernel, [0.5])
        assert K.shape == (1, 1)
        assert K[0, 0] == pytest.approx(1.003125, abs=1e-12)

    def test_bit_exact_symmetry(self, kernel):
        K = gram_matrix(kernel, Grid.uniform_random(37, seed=3))
        assert np.array_equal(K, K.T)

    def test_psd_midpoint(self, kernel):
        eig = np.linalg.eigvalsh(gram_matrix(kernel, Grid.midpoint(20)))
        assert eig.min() >= -1e-10 * eig.max()

    def test_psd_random_grids(self, kernel):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(2, 101))
            grid = Grid.uniform_random(n, rng=rng)
            eig = np.linalg.eigvalsh(gram_matrix(kernel, grid))
            assert eig.min() >= -1e-10 * eig.max()

    def test_empty_grid(self, kernel):
        with pytest.raises(InputError):
            gram_matrix(kernel, [])

    def test_cross_matrix_matches_gram(self, kernel):
        grid = Grid.midpoint(8)
        assert np.allclose(kernel_matrix(kernel, grid.points, grid.points), gram_matrix(kernel, grid), atol=1e-15)


@pytest.mark.unit
class TestSpectralSqrt:
    """대칭 제곱근과 의사역 제곱근"""

    def test_identity(self):
        f = spectral_sqrt(np.eye(2))
        assert np.allclose(f.sqrt, np.eye(2))
        assert np.allclose(f.inv_sqrt, np.eye(2))

    def test_rank_deficient_diagonal(self):
        f = spectral_sqrt(np.diag([4.0, 0.0]), floor_ratio=1e-12)
        assert f.eigen_floor == pytest.approx(4e-12)
        assert np.allclose(f.sqrt, np.diag([2.0, np.sqrt(4e-12)]), atol=1e-15)
        assert np.allclose(f.inv_sqrt, np.diag([0.5, 0.0]), atol=1e-15)

    def test_reconstruction(self):
        rng = np.random.default_rng(2)
        A = rng.standard_normal((10, 10))
        K = A @ A.T + np.eye(10)
        f = spectral_sqrt(K)
        assert np.linalg.norm(f.sqrt @ f.sqrt - K) / np.linalg.norm(K) < 1e-8

    def test_projection_idempotent(self, kernel):
        f = spectral_sqrt(gram_matrix(kernel, Grid.midpoint(12)))
        P = f.sqrt @ f.inv_sqrt
        assert np.linalg.norm(P @ P - P) < 1e-8

    def test_non_symmetric_rejected(self):
        with pytest.raises(InputError):
            spectral_sqrt(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_floor_ratio_must_be_positive(self):
        with pytest.raises(InputError):
            spectral_sqrt(np.eye(2), floor_ratio=0.0)


@pytest.mark.unit
class TestOperatorNuclearNorm:
    """‖K^{1/2} R K^{1/2}‖_*"""

    def test_zero_operator(self):
        assert operator_nuclear_norm(np.zeros((3, 3)), spectral_sqrt(np.eye(3))) == 0.0

    def test_identity_kernel(self):
        theta = 0.3
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        R = rot @ np.diag([2.0, 1.0])
        assert operator_nuclear_norm(R, spectral_sqrt(np.eye(2))) == pytest.approx(3.0, abs=1e-12)

    def test_eigenvalue_route_agrees(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            A = rng.standard_normal((6, 6))
            K = A @ A.T + 0.5 * np.eye(6)
            R = rng.standard_normal((6, 6))
            eig = np.linalg.eigvals(R.T @ K @ R @ K).real
            expected = np.sqrt(np.clip(eig, 0.0, None)).sum()
            value = operator_nuclear_norm(R, spectral_sqrt(K))
            assert value == pytest.approx(expected, rel=1e-8)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            operator_nuclear_norm(np.zeros((2, 3)), spectral_sqrt(np.eye(2)))
