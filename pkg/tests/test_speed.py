import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from qfri.errors import DimensionMismatch, DomainError, FullRankRequired
from qfri.linalg import random_density, random_hermitian
from qfri.speed import (
    EvolutionStep,
    convergence_order,
    fisher_term,
    generator,
    kubo_mori_term,
    mandelstam_tamm_bound,
    observable_speed,
    qfri_speed_bound,
    relative_entropy_second_order,
    relative_entropy_second_order_kubo_mori,
    second_order_table,
    unitary_evolve,
)
from qfri.states import relative_entropy

from .conftest import PAULI_X, PAULI_Y


def random_triple(seed, d):
    rng = np.random.default_rng(seed)
    return random_hermitian(d, rng), random_hermitian(d, rng), random_density(d, rng)


class TestGenerator:
    def test_commuting_is_zero(self):
        np.testing.assert_allclose(generator(np.diag([1.0, 2.0]), np.diag([0.3, 0.7])).matrix, 0.0)

    def test_pauli_example(self):
        # -i[X, |0><0|] = -Y
        np.testing.assert_allclose(generator(PAULI_X, np.diag([1.0, 0.0])).matrix, -PAULI_Y, atol=1e-15)

    def test_traceless(self):
        _, h, rho = random_triple(1, 5)
        assert abs(np.trace(generator(h, rho).matrix)) < 1e-10

    def test_dims(self):
        with pytest.raises(DimensionMismatch):
            generator(np.eye(3), np.eye(2) / 2)


class TestObservableSpeed:
    def test_stationary(self):
        assert observable_speed(np.diag([1.0, -1.0]), np.diag([1.0, 2.0]), np.diag([0.3, 0.7])) == 0.0

    def test_energy_conserved(self):
        _, h, rho = random_triple(2, 4)
        assert abs(observable_speed(h, h, rho)) < 1e-12

    @pytest.mark.parametrize("seed", [3, 4, 5])
    def test_central_difference(self, seed):
        o, h, rho = random_triple(seed, 4)
        dt = 1e-6
        plus = np.trace(unitary_evolve(rho, h, dt).matrix @ o.matrix).real
        minus = np.trace(unitary_evolve(rho, h, -dt).matrix @ o.matrix).real
        fd = (plus - minus) / (2 * dt)
        assert observable_speed(o, h, rho) == pytest.approx(fd, rel=1e-6)


class TestSpeedBounds:
    def two_level(self, n1=0.3, n2=1.7):
        return np.diag([n1, n2]), np.eye(2) / 2

    def test_commuting_separation(self):
        h, rho = self.two_level()
        o = np.array([[0.2, 0.5], [0.5, -0.4]])
        assert observable_speed(o, h, rho) == 0.0
        assert qfri_speed_bound(o, h, rho) == 0.0
        assert mandelstam_tamm_bound(o, h, rho) > 0.0

    def test_energy_spread(self):
        n1, n2 = 0.3, 1.7
        h, rho = self.two_level(n1, n2)
        # with O = H both spreads equal |n1 - n2| / 2
        assert mandelstam_tamm_bound(h, h, rho) == pytest.approx(2 * (0.5 * abs(n1 - n2)) ** 2)

    def test_identity_observable(self):
        _, h, rho = random_triple(6, 3)
        assert qfri_speed_bound(np.eye(3), h, rho) == pytest.approx(0.0, abs=1e-12)
        assert mandelstam_tamm_bound(np.eye(3), h, rho) == pytest.approx(0.0, abs=1e-12)

    def test_needs_full_rank(self):
        o, h, _ = random_triple(7, 3)
        with pytest.raises(FullRankRequired):
            qfri_speed_bound(o, h, random_density(3, 1, rank=2))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 5), st.integers(0, 2**32 - 1))
    def test_sandwich(self, d, seed):
        o, h, rho = random_triple(seed, d)
        v = abs(observable_speed(o, h, rho))
        assert v <= qfri_speed_bound(o, h, rho) + 1e-8
        assert v <= mandelstam_tamm_bound(o, h, rho) + 1e-8


class TestQuadraticForms:
    def test_fisher_direct(self):
        _, h, rho = random_triple(8, 3)
        c = generator(h, rho).matrix
        direct = np.trace(c @ np.linalg.inv(rho.matrix) @ c).real
        assert fisher_term(h, rho) == pytest.approx(direct, rel=1e-10)

    def test_kubo_mori_below_fisher(self):
        for seed in range(10):
            _, h, rho = random_triple(seed, 4)
            assert kubo_mori_term(h, rho) <= fisher_term(h, rho) * (1 + 1e-12)

    def test_stationary(self):
        h, rho = np.diag([0.2, 1.0]), np.diag([0.4, 0.6])
        assert relative_entropy_second_order(h, rho, 0.1) == 0.0
        assert relative_entropy(unitary_evolve(rho, h, 0.1), rho) == pytest.approx(0.0, abs=1e-15)

    def test_quadratic_scaling(self):
        _, h, rho = random_triple(9, 3)
        ratio = relative_entropy_second_order(h, rho, 0.02) / relative_entropy_second_order(h, rho, 0.01)
        assert ratio == pytest.approx(4.0, rel=0.01)

    def test_positive_dt(self):
        _, h, rho = random_triple(9, 3)
        with pytest.raises(DomainError):
            relative_entropy_second_order(h, rho, 0.0)

    def test_kubo_mori_is_leading_term(self):
        _, h, rho = random_triple(10, 3)
        dts = np.logspace(-3, -1, 8)
        rows = second_order_table(h, rho, dts)
        for r in rows:
            assert r["kubo_mori"] == pytest.approx(r["exact"], rel=0.05)
        slope = convergence_order(dts, [r["kubo_mori_abs_error"] for r in rows])
        assert slope >= 2.7

    def test_km_form_matches_exact_limit(self):
        _, h, rho = random_triple(11, 4)
        dt = 1e-4
        exact = relative_entropy(unitary_evolve(rho, h, dt), rho)
        assert relative_entropy_second_order_kubo_mori(h, rho, dt) == pytest.approx(exact, rel=1e-3)


class TestUnitaryEvolve:
    def test_zero_time(self):
        _, h, rho = random_triple(12, 4)
        np.testing.assert_allclose(unitary_evolve(rho, h, 0.0).matrix, rho.matrix, atol=1e-15)

    def test_stationary(self):
        rho = np.diag([0.1, 0.9])
        np.testing.assert_allclose(unitary_evolve(rho, np.diag([3.0, -1.0]), 2.0).matrix, rho, atol=1e-15)

    def test_round_trip(self):
        _, h, rho = random_triple(13, 5)
        back = unitary_evolve(unitary_evolve(rho, h, 0.8), h, -0.8)
        assert np.max(np.abs(back.matrix - rho.matrix)) < 1e-9

    def test_against_expm(self):
        _, h, rho = random_triple(14, 4)
        u = expm(-1j * h.matrix * 0.37)
        np.testing.assert_allclose(unitary_evolve(rho, h, 0.37).matrix, u @ rho.matrix @ u.conj().T, atol=1e-12)

    def test_invariants(self):
        _, h, rho = random_triple(15, 6)
        out = EvolutionStep(h, rho, 1.3).evolve()
        np.testing.assert_allclose(out.eigenvalues, rho.eigenvalues, atol=1e-9)
        assert np.trace(out.matrix).real == pytest.approx(1.0, abs=1e-9)


class TestConvergenceOrder:
    def test_exact_power(self):
        dts = np.logspace(-3, -1, 8)
        assert convergence_order(dts, 5 * dts**3) == pytest.approx(3.0)
