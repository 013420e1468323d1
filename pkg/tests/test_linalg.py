import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from qfri.errors import CapExceeded, DimensionMismatch, ExpOverflow, NotHermitian
from qfri.linalg import (
    HermitianOperator,
    golden_thompson_gap,
    klein_gap,
    kron_power,
    matrix_function,
    random_density,
    random_hermitian,
    random_projective_povm,
    random_two_outcome_povm,
    random_unitary,
    spectral_decompose,
    trace_product,
)

from .conftest import PAULI_X, PAULI_Z


class TestHermitianOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            HermitianOperator(np.array([[0, 1], [0, 0]]))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            HermitianOperator(np.zeros((2, 3)))

    def test_symmetrizes_rounding_noise(self):
        m = np.array([[1.0, 0.5 + 1e-13], [0.5, 2.0]])
        h = HermitianOperator(m)
        np.testing.assert_array_equal(h.matrix, h.matrix.conj().T)

    def test_matrix_is_read_only(self):
        h = HermitianOperator(np.eye(2))
        with pytest.raises(ValueError):
            h.matrix[0, 0] = 3.0


class TestSpectralDecompose:
    def test_identity(self):
        sd = spectral_decompose(np.eye(2))
        np.testing.assert_allclose(sd.eigenvalues, [1.0, 1.0])
        np.testing.assert_allclose(sd.reconstruct(), np.eye(2), atol=1e-15)

    def test_pauli_z_ascending(self):
        np.testing.assert_allclose(spectral_decompose(PAULI_Z).eigenvalues, [-1.0, 1.0])

    def test_reconstruction_residual(self):
        h = random_hermitian(8, 3)
        sd = spectral_decompose(h)
        v = sd.eigenvectors
        rec = v @ np.diag(sd.eigenvalues) @ v.conj().T
        assert np.max(np.abs(rec - h.matrix)) < 1e-9


class TestMatrixFunction:
    def test_exp_of_zero(self):
        np.testing.assert_allclose(matrix_function(np.zeros((3, 3)), "exp").matrix, np.eye(3))

    def test_log_on_support_diagonal(self):
        out = matrix_function(np.diag([0.5, 0.5]), "log_on_support").matrix
        np.testing.assert_allclose(out, -math.log(2) * np.eye(2))

    def test_log_on_support_kernel_maps_to_zero(self):
        out = matrix_function(np.diag([1.0, 0.0]), "log_on_support").matrix
        np.testing.assert_allclose(out, np.zeros((2, 2)), atol=1e-15)

    def test_exp_log_round_trip(self):
        rho = random_density(6, 11)
        back = matrix_function(matrix_function(rho, "log_on_support"), "exp").matrix
        assert np.max(np.abs(back - rho.matrix)) < 1e-9

    def test_exp_against_scipy(self):
        h = random_hermitian(5, 4)
        np.testing.assert_allclose(matrix_function(h, "exp").matrix, expm(h.matrix), rtol=1e-10, atol=1e-12)

    def test_overflow_guard(self):
        with pytest.raises(ExpOverflow):
            matrix_function(np.diag([800.0, 0.0]), "exp")


class TestTraceProduct:
    def test_identity_with_density(self):
        rho = random_density(4, 2)
        assert trace_product(np.eye(4), rho) == pytest.approx(1.0, abs=1e-12)

    def test_hand_value(self):
        assert trace_product(PAULI_Z, np.diag([0.7, 0.3])) == pytest.approx(0.4, abs=1e-15)

    def test_entrywise_oracle(self):
        a, b = random_hermitian(5, 7).matrix, random_hermitian(5, 8).matrix
        oracle = sum(a[i, j] * b[j, i] for i in range(5) for j in range(5)).real
        assert abs(trace_product(a, b) - oracle) < 1e-10


class TestKronPower:
    def test_single_copy(self):
        rho = random_density(3, 1)
        np.testing.assert_allclose(kron_power(rho, 1).matrix, rho.matrix)

    def test_maximally_mixed(self):
        np.testing.assert_allclose(kron_power(np.diag([0.5, 0.5]), 2).matrix, np.eye(4) / 4)

    def test_eigenvalue_products(self):
        rho = random_density(2, 5)
        w = rho.eigenvalues
        prods = np.sort([a * b * c for a in w for b in w for c in w])
        np.testing.assert_allclose(np.sort(kron_power(rho, 3).eigenvalues), prods, atol=1e-14)

    def test_keeps_density_type(self):
        rho = random_density(2, 5)
        assert type(kron_power(rho, 2)) is type(rho)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            kron_power(np.eye(3), 8, cap=4096)


class TestTraceInequalities:
    def test_klein_equality(self):
        a = random_hermitian(4, 1)
        assert abs(klein_gap(a, a)) < 1e-12

    def test_klein_hand_value(self):
        expected = math.e + 1 / math.e - 2
        assert klein_gap(np.zeros((2, 2)), np.diag([1.0, -1.0])) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(1.0862, abs=1e-4)

    def test_golden_thompson_commuting(self):
        assert abs(golden_thompson_gap(np.diag([0.3, -1.0, 2.0]), np.diag([1.0, 0.5, -0.2]))) < 1e-10

    def test_golden_thompson_paulis(self):
        lhs = np.trace(expm(PAULI_X) @ expm(PAULI_Z)).real
        rhs = np.trace(expm(PAULI_X + PAULI_Z)).real
        gap = golden_thompson_gap(PAULI_X, PAULI_Z)
        assert gap > 0
        assert gap == pytest.approx(lhs - rhs, rel=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 2**32 - 1))
    def test_gaps_nonnegative(self, d, seed):
        rng = np.random.default_rng(seed)
        a = random_hermitian(d, rng).matrix.copy()
        b = random_hermitian(d, rng).matrix.copy()
        a *= 2 / np.max(np.abs(np.linalg.eigvalsh(a)))
        b *= 2 / np.max(np.abs(np.linalg.eigvalsh(b)))
        assert klein_gap(a, b) >= -1e-9
        assert golden_thompson_gap(a, b) >= -1e-9


class TestRandomEnsembles:
    def test_density_contract(self):
        rho = random_density(4, 9)
        assert rho.eigenvalues.min() >= -1e-12
        assert abs(np.trace(rho.matrix).real - 1) < 1e-12

    def test_density_rank(self):
        assert random_density(5, 9, rank=2).rank == 2

    def test_povm_contract(self):
        povm = random_two_outcome_povm(3, 4)
        w = np.linalg.eigvalsh(povm.m1.matrix)
        assert w.min() >= -1e-12 and w.max() <= 1 + 1e-12
        np.testing.assert_allclose(povm.m0.matrix + povm.m1.matrix, np.eye(3), atol=1e-12)

    def test_projective_povm(self):
        assert random_projective_povm(4, 2, rank=2).is_projective()

    def test_unitary(self):
        u = random_unitary(5, 3)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(5), atol=1e-12)

    def test_seed_determinism(self):
        np.testing.assert_array_equal(random_density(4, 123).matrix, random_density(4, 123).matrix)
        np.testing.assert_array_equal(random_hermitian(4, 123).matrix, random_hermitian(4, 123).matrix)
        np.testing.assert_array_equal(random_two_outcome_povm(3, 5).m1.matrix, random_two_outcome_povm(3, 5).m1.matrix)
