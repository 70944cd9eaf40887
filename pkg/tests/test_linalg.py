from __future__ import annotations

import math

import numpy as np
import pytest

from sdcones import linalg
from sdcones.errors import PreconditionError

from conftest import random_orthogonal


def circulant_pentagon_eigenvalues() -> np.ndarray:
    """Independent oracle: eigenvalues of a symmetric 5-circulant with
    diagonal a and adjacent entries b are a + 2 b cos(2 pi k / 5)."""
    a = 1.0 + math.cos(math.pi / 5.0)
    b = math.sqrt(5.0) / 2.0
    vals = [a + 2.0 * b * math.cos(2.0 * math.pi * k / 5.0) for k in range(5)]
    return np.sort(np.asarray(vals))[::-1]


class TestSymEigen:
    def test_identity(self):
        eig = linalg.sym_eigen(np.eye(3))
        assert np.allclose(eig.values, [1.0, 1.0, 1.0], atol=0)
        assert np.allclose(eig.vectors @ eig.vectors.T, np.eye(3), atol=1e-12)

    def test_pentagon_circulant(self, pentagon_slack):
        eig = linalg.sym_eigen(pentagon_slack)
        expected = circulant_pentagon_eigenvalues()
        assert np.abs(eig.values - expected).max() <= 1e-9
        # Frozen values from the circulant formula.
        assert abs(eig.values[0] - 4.045084971874737) <= 1e-9
        assert abs(eig.values[1] - 2.5) <= 1e-9
        assert abs(eig.values[2] - 2.5) <= 1e-9
        assert abs(eig.values[3]) <= 1e-9
        assert abs(eig.values[4]) <= 1e-9

    def test_all_ones(self):
        eig = linalg.sym_eigen(np.ones((4, 4)))
        assert np.abs(eig.values - [4.0, 0.0, 0.0, 0.0]).max() <= 1e-12

    def test_rejects_non_square(self):
        with pytest.raises(PreconditionError, match="square"):
            linalg.sym_eigen(np.ones((2, 3)))

    def test_rejects_asymmetric_with_measure(self):
        with pytest.raises(PreconditionError, match="1.000e"):
            linalg.sym_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(8, 8))
        a = a + a.T
        e1 = linalg.sym_eigen(a)
        e2 = linalg.sym_eigen(a.copy())
        assert np.array_equal(e1.values, e2.values)
        assert np.array_equal(e1.vectors, e2.vectors)

    def test_reconstruction_orthonormality_trace_random(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            n = int(rng.integers(1, 13))
            a = rng.normal(size=(n, n)) * (10.0 ** rng.integers(-2, 3))
            a = 0.5 * (a + a.T)
            eig = linalg.sym_eigen(a)
            scale = max(np.abs(a).max(), 1e-300)
            recon = (eig.vectors * eig.values) @ eig.vectors.T
            assert np.abs(a - recon).max() <= 1e-10 * scale
            assert np.abs(eig.vectors.T @ eig.vectors - np.eye(n)).max() <= 1e-10
            assert abs(np.trace(a) - eig.values.sum()) <= 1e-10 * scale * n


class TestNumericRank:
    def test_pentagon(self, pentagon_slack):
        assert linalg.numeric_rank(pentagon_slack) == 3

    def test_prism(self, prism_slack):
        assert linalg.numeric_rank(prism_slack) == 4

    def test_zero(self):
        assert linalg.numeric_rank(np.zeros((3, 3))) == 0

    def test_rectangular(self):
        assert linalg.numeric_rank(np.array([[1.0, 2.0, 3.0]])) == 1

    def test_orthogonal_conjugation_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            r = int(rng.integers(1, n + 1))
            x = rng.normal(size=(n, r))
            a = x @ x.T
            q = random_orthogonal(rng, n)
            assert linalg.numeric_rank(q @ a @ q.T) == linalg.numeric_rank(a) == r


class TestNullSpace:
    def test_identity_empty(self):
        assert linalg.null_space(np.eye(2)).shape == (2, 0)

    def test_one_by_two(self):
        basis = linalg.null_space(np.array([[1.0, -1.0]]))
        assert basis.shape == (2, 1)
        expected = np.array([1.0, 1.0]) / math.sqrt(2.0)
        assert np.abs(basis[:, 0] - expected).max() <= 1e-12

    def test_pentagon_generators_full_column_rank(self, pentagon_rays):
        assert linalg.null_space(pentagon_rays).shape == (3, 0)

    def test_residual_bound(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(2, 9))
            r = int(rng.integers(1, n))
            a = rng.normal(size=(r, n))
            basis = linalg.null_space(a)
            assert basis.shape[1] >= n - r
            if basis.shape[1]:
                resid = np.abs(a @ basis).max()
                assert resid <= 1e-8 * max(np.abs(a).max(), 1e-300)
                gram = basis.T @ basis
                assert np.abs(gram - np.eye(basis.shape[1])).max() <= 1e-10


class TestPsdProject:
    def test_clip(self):
        out = linalg.psd_project(np.diag([2.0, -1.0]))
        assert np.abs(out - np.diag([2.0, 0.0])).max() <= 1e-12

    def test_psd_unchanged(self, pentagon_slack):
        out = linalg.psd_project(pentagon_slack)
        assert np.abs(out - pentagon_slack).max() <= 1e-12

    def test_negative_identity(self):
        assert np.abs(linalg.psd_project(-np.eye(3))).max() == 0.0

    def test_idempotent_and_contraction(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            a = rng.normal(size=(n, n))
            a = 0.5 * (a + a.T)
            p = linalg.psd_project(a)
            assert np.abs(linalg.psd_project(p) - p).max() <= 1e-11 * max(
                1.0, np.abs(p).max()
            )
            x = rng.normal(size=(n, n))
            b = x @ x.T  # arbitrary PSD point
            assert np.linalg.norm(p - b, "fro") <= np.linalg.norm(a - b, "fro") + 1e-12


class TestLowRankProject:
    def test_rank2_fixed_point(self):
        rng = np.random.default_rng(17)
        x = rng.normal(size=(5, 2))
        a = x @ x.T
        assert np.abs(linalg.low_rank_project(a, 2) - a).max() <= 1e-12 * np.abs(a).max()

    def test_diag(self):
        out = linalg.low_rank_project(np.diag([3.0, 2.0, 1.0]), 1)
        assert np.abs(out - np.diag([3.0, 0.0, 0.0])).max() <= 1e-12

    def test_pentagon_rank3(self, pentagon_slack):
        out = linalg.low_rank_project(pentagon_slack, 3)
        assert np.abs(out - pentagon_slack).max() <= 1e-9

    def test_rejects_rank_above_size(self):
        with pytest.raises(PreconditionError):
            linalg.low_rank_project(np.eye(2), 3)
        with pytest.raises(PreconditionError):
            linalg.low_rank_project(np.eye(2), 0)


class TestSingularValues:
    def test_against_numpy(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            n = int(rng.integers(1, 9))
            m = int(rng.integers(1, 9))
            a = rng.normal(size=(n, m))
            mine = linalg.singular_values(a)
            ref = np.linalg.svd(a, compute_uv=False)
            k = min(n, m)
            assert np.abs(mine[:k] - ref[:k]).max() <= 1e-10 * max(ref[0], 1.0)
