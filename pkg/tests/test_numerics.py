import numpy as np
import pytest

from risthz import numerics
from risthz.errors import DimensionError, InvalidInputError

from conftest import complex_gaussian


class TestSvd:
    def test_identity(self):
        _, s, _ = numerics.svd(np.eye(3))
        assert np.allclose(s, [1.0, 1.0, 1.0])

    def test_diagonal(self):
        u, s, v = numerics.svd(np.diag([3.0, 2.0, 1.0]))
        assert np.allclose(s, [3.0, 2.0, 1.0])
        # columns match identity up to phase; phase convention makes them exact
        assert np.allclose(u, np.eye(3), atol=1e-12)
        assert np.allclose(v, np.eye(3), atol=1e-12)

    def test_reconstruction_and_orthonormality(self, rng):
        m = complex_gaussian(rng, (4, 6))
        u, s, v = numerics.svd(m)
        recon = u @ np.diag(s) @ v.conj().T
        assert np.linalg.norm(recon - m) < 1e-10 * np.linalg.norm(m)
        assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-10)
        assert np.allclose(v.conj().T @ v, np.eye(4), atol=1e-10)
        assert np.all(np.diff(s) <= 0)

    def test_deterministic_phases(self, rng):
        m = complex_gaussian(rng, (5, 3))
        u1, _, v1 = numerics.svd(m)
        u2, _, v2 = numerics.svd(m.copy())
        assert np.array_equal(u1, u2) and np.array_equal(v1, v2)
        # pivot entries are real positive
        for k in range(3):
            pivot = u1[np.argmax(np.abs(u1[:, k])), k]
            assert pivot.imag == pytest.approx(0.0, abs=1e-14)
            assert pivot.real > 0

    def test_nonfinite_rejected(self):
        bad = np.array([[1.0, np.nan], [0.0, 1.0]])
        with pytest.raises(InvalidInputError):
            numerics.svd(bad)


class TestKron:
    def test_scalar_identity(self, rng):
        b = complex_gaussian(rng, (3, 2))
        assert np.array_equal(numerics.kron(np.array([[1.0]]), b), b)

    def test_identity_blocks(self):
        assert np.allclose(numerics.kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_elementwise_definition(self, rng):
        a = complex_gaussian(rng, (2, 2))
        b = complex_gaussian(rng, (2, 2))
        k = numerics.kron(a, b)
        for i in range(2):
            for j in range(2):
                for p in range(2):
                    for q in range(2):
                        assert k[2 * i + p, 2 * j + q] == pytest.approx(a[i, j] * b[p, q])

    def test_mixed_product(self, rng):
        a, b, c, d = (complex_gaussian(rng, (2, 2)) for _ in range(4))
        lhs = numerics.kron(a, b) @ numerics.kron(c, d)
        rhs = numerics.kron(a @ c, b @ d)
        assert np.linalg.norm(lhs - rhs) < 1e-10 * np.linalg.norm(rhs)


class TestVec:
    def test_column_major_stacking(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(numerics.vec(m).ravel(), [1.0, 3.0, 2.0, 4.0])

    def test_column_vector_fixed_point(self, rng):
        col = complex_gaussian(rng, (5, 1))
        assert np.array_equal(numerics.vec(col), col)

    def test_norm_identity(self, rng):
        m = complex_gaussian(rng, (4, 7))
        assert np.linalg.norm(numerics.vec(m)) == pytest.approx(np.linalg.norm(m), rel=1e-12)

    def test_roundtrip(self, rng):
        m = complex_gaussian(rng, (3, 5))
        assert np.array_equal(numerics.vec_inverse(numerics.vec(m), 3, 5), m)

    def test_dimension_error(self, rng):
        with pytest.raises(DimensionError):
            numerics.vec_inverse(complex_gaussian(rng, (6, 1)), 4, 2)


class TestHermitianLogdet2:
    def test_identity(self):
        assert numerics.hermitian_logdet2(np.eye(4)) == pytest.approx(0.0)

    def test_diag_two(self):
        assert numerics.hermitian_logdet2(np.diag([2.0, 2.0])) == pytest.approx(2.0)

    def test_matches_eigen_product(self, rng):
        a = complex_gaussian(rng, (3, 3))
        m = a @ a.conj().T + 0.5 * np.eye(3)
        expected = float(np.sum(np.log2(np.linalg.eigvalsh(m))))
        assert numerics.hermitian_logdet2(m) == pytest.approx(expected, rel=1e-12)

    def test_rank_deficient_is_minus_inf(self, rng):
        v = complex_gaussian(rng, (4, 1))
        assert numerics.hermitian_logdet2(v @ v.conj().T) == -np.inf

    def test_zero_matrix_is_minus_inf(self):
        assert numerics.hermitian_logdet2(np.zeros((2, 2))) == -np.inf

    def test_non_square_rejected(self, rng):
        with pytest.raises(InvalidInputError):
            numerics.hermitian_logdet2(complex_gaussian(rng, (2, 3)))

    def test_non_hermitian_rejected(self, rng):
        m = complex_gaussian(rng, (3, 3))
        m = m + m.conj().T + 1e-3 * 1j * np.eye(3)
        with pytest.raises(InvalidInputError):
            numerics.hermitian_logdet2(m)


def test_trace_norm_vec_identity(rng):
    for _ in range(20):
        m = complex_gaussian(rng, (3, 5))
        fro_sq = np.linalg.norm(m) ** 2
        assert np.trace(m @ m.conj().T).real == pytest.approx(fro_sq, rel=1e-10)
        assert np.linalg.norm(numerics.vec(m)) ** 2 == pytest.approx(fro_sq, rel=1e-10)
