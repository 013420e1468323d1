import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.special import logsumexp

from qfri.errors import DimensionMismatch, DomainError
from qfri.linalg import random_density, random_hermitian, random_two_outcome_povm
from qfri.subgaussian import (
    DiscreteDistribution,
    bernoulli_norm,
    bernoulli_sigma,
    cgf,
    induced_distribution,
    norm_upper_bounds,
    subgaussian_norm,
)

from .conftest import PAULI_Z


def brute_force_sigma(values, probs, npts=40001):
    """Dense-grid sup of 2K(t)/t^2, independent of the library kernels."""
    v = np.asarray(values, float)
    p = np.asarray(probs, float)
    x = v - p @ v
    scale = np.max(np.abs(x))
    if scale == 0:
        return 0.0
    x = x / scale
    grid = np.logspace(-3, 3, npts)
    t = np.concatenate([-grid, grid])
    k = logsumexp(t[:, None] * x[None, :], b=p[None, :], axis=1)
    ratio = np.max(np.append(2 * k / t**2, p @ x**2))
    return math.sqrt(ratio) * scale


class TestDiscreteDistribution:
    def test_validation(self):
        with pytest.raises(DimensionMismatch):
            DiscreteDistribution([0, 1], [1.0])
        with pytest.raises(DomainError):
            DiscreteDistribution([0, 1], [0.6, 0.6])
        with pytest.raises(DomainError):
            DiscreteDistribution([0, np.nan], [0.5, 0.5])
        with pytest.raises(DomainError):
            DiscreteDistribution([0, 1], [1.1, -0.1])

    def test_tiny_negative_clipped(self):
        d = DiscreteDistribution([0, 1], [1.0 + 1e-13, -1e-13])
        assert d.probs.min() == 0.0

    def test_moments(self):
        d = DiscreteDistribution([1, -1], [0.7, 0.3])
        assert d.mean == pytest.approx(0.4)
        assert d.variance == pytest.approx(1 - 0.16)


class TestInducedDistribution:
    def test_identity_collapses(self):
        d = induced_distribution(np.eye(3), random_density(3, 1), center=True)
        np.testing.assert_allclose(d.values, 0.0, atol=1e-15)
        assert d.probs.sum() == pytest.approx(1.0)
        assert subgaussian_norm(d).sigma == 0.0

    def test_diagonal(self):
        d = induced_distribution(PAULI_Z, np.diag([0.7, 0.3]))
        order = np.argsort(d.values)
        np.testing.assert_allclose(d.values[order], [-1.0, 1.0])
        np.testing.assert_allclose(d.probs[order], [0.3, 0.7])
        assert d.mean == pytest.approx(0.4)

    @pytest.mark.parametrize("t", [-1.0, 0.5, 2.0])
    def test_mgf_matches_matrix_exponential(self, t):
        o, g = random_hermitian(6, 2), random_density(6, 3)
        d = induced_distribution(o, g, center=True)
        oc = o.matrix - d.probs @ np.linalg.eigvalsh(o.matrix) * np.eye(6)
        oracle = np.trace(g.matrix @ expm(t * oc)).real
        assert d.probs @ np.exp(t * d.values) == pytest.approx(oracle, rel=1e-9)


class TestCgf:
    def test_zero(self):
        assert cgf(DiscreteDistribution([0.2, 5.0, -1.0], [0.2, 0.3, 0.5]), 0.0) == 0.0

    def test_fair_bernoulli(self):
        assert cgf(DiscreteDistribution([0, 1], [0.5, 0.5]), 2.0) == pytest.approx(math.log(math.cosh(1)), rel=1e-13)

    def test_rademacher(self):
        assert cgf(DiscreteDistribution([-1, 1], [0.5, 0.5]), 1.0) == pytest.approx(0.43378, abs=1e-5)

    def test_large_argument_stable(self):
        d = DiscreteDistribution([0, 1], [0.999, 0.001])
        t = 5000.0
        assert cgf(d, t) == pytest.approx(t * 0.999 + math.log(0.001), rel=1e-12)


class TestSubgaussianNorm:
    def test_point_mass(self):
        assert subgaussian_norm(DiscreteDistribution([3.0], [1.0])).sigma == 0.0

    def test_fair_bernoulli(self):
        assert subgaussian_norm(DiscreteDistribution([0, 1], [0.5, 0.5])).sigma == pytest.approx(0.5, rel=1e-9)

    def test_bernoulli_point_one(self):
        res = subgaussian_norm(DiscreteDistribution([0, 1], [0.9, 0.1]))
        assert res.sigma == pytest.approx(math.sqrt(0.4 / math.log(9)), abs=1e-6)
        assert res.sigma == pytest.approx(0.42664, abs=5e-5)
        assert res.method == "numeric_sup"

    def test_rademacher_limit_at_zero(self):
        res = subgaussian_norm(DiscreteDistribution([-1, 1], [0.5, 0.5]))
        assert res.sigma == pytest.approx(1.0, rel=1e-12)
        assert res.argmax_t == 0.0

    def test_certificate(self):
        res = subgaussian_norm(DiscreteDistribution([0, 0.2, 0.9], [0.5, 0.3, 0.2]))
        assert res.certificate_residual <= 1e-9

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            k = int(rng.integers(2, 7))
            v = rng.normal(size=k) * rng.uniform(0.1, 10)
            p = rng.dirichlet(np.ones(k) * 0.5)
            sigma = subgaussian_norm(DiscreteDistribution(v, p)).sigma
            assert sigma == pytest.approx(brute_force_sigma(v, p), rel=1e-5)

    @settings(max_examples=80, deadline=None)
    @given(
        st.lists(st.floats(-50, 50, allow_nan=False), min_size=2, max_size=6),
        st.integers(0, 2**32 - 1),
        st.floats(0.01, 100),
        st.floats(-100, 100),
    )
    def test_properties(self, values, seed, c, shift):
        v = np.asarray(values)
        assume(np.ptp(v) > 1e-3)
        p = np.random.default_rng(seed).dirichlet(np.ones(len(v)))
        assume(p.min() > 1e-9)
        d = DiscreteDistribution(v, p)
        res = subgaussian_norm(d)
        # variance limit and Hoeffding range bound
        assert res.sigma >= math.sqrt(d.variance) * (1 - 1e-9)
        assert res.sigma <= 0.5 * np.ptp(v) * (1 + 1e-9)
        assert res.certificate_residual <= 1e-9 * max(1.0, res.sigma**2)
        # shift invariance and scale equivariance
        moved = subgaussian_norm(DiscreteDistribution(c * v + shift, p)).sigma
        assert moved == pytest.approx(c * res.sigma, rel=1e-6)


class TestBernoulliNorm:
    @pytest.mark.parametrize("alpha", [0.001, 0.01, 0.1, 0.3, 0.5, 0.7, 0.999])
    def test_matches_numeric(self, alpha):
        closed = bernoulli_norm(alpha)
        numeric = subgaussian_norm(DiscreteDistribution([0, 1], [1 - alpha, alpha]))
        assert abs(closed.sigma - numeric.sigma) <= 1e-6
        assert closed.method == "closed_form_bernoulli"
        assert closed.certificate_residual <= 1e-12

    def test_half_exact(self):
        assert bernoulli_norm(0.5).sigma == 0.5

    def test_continuous_through_half(self):
        for eps in (1e-15, 1e-10, 1e-6):
            assert bernoulli_sigma(0.5 + eps) == pytest.approx(0.5, abs=1e-6)
            assert bernoulli_sigma(0.5 - eps) == pytest.approx(0.5, abs=1e-6)

    def test_small_alpha(self):
        sigma = bernoulli_norm(0.001).sigma
        assert sigma == pytest.approx(math.sqrt(0.499 / math.log(999)), rel=1e-12)
        assert sigma == pytest.approx(0.26879, abs=1e-5)
        approx = math.sqrt(-1 / (2 * math.log(0.001)))
        assert approx == pytest.approx(0.26907, abs=5e-5)
        assert abs(approx - sigma) / sigma < 2e-3

    def test_symmetric(self):
        for a in (0.01, 0.2, 0.45):
            assert bernoulli_sigma(a) == pytest.approx(bernoulli_sigma(1 - a), rel=1e-12)

    def test_tangency_point(self):
        alpha = 0.1
        res = bernoulli_norm(alpha)
        assert res.argmax_t == pytest.approx(2 * math.log(9))
        d = DiscreteDistribution([0, 1], [1 - alpha, alpha])
        assert 2 * cgf(d, res.argmax_t) / res.argmax_t**2 == pytest.approx(res.sigma**2, rel=1e-10)

    def test_degenerate_endpoints(self):
        assert bernoulli_norm(0.0).sigma == 0.0
        assert bernoulli_norm(1.0).sigma == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            bernoulli_norm(1.5)


class TestNormUpperBounds:
    def test_bernoulli(self):
        ub = norm_upper_bounds(DiscreteDistribution([0, 1], [0.7, 0.3]))
        assert ub.range_bound == 0.5
        assert ub.dominance_bound == pytest.approx(bernoulli_norm(0.3).sigma)
        assert ub.dominance_bound == pytest.approx(0.4860, abs=5e-4)

    def test_three_atoms(self):
        d = DiscreteDistribution([0, 0.2, 0.9], [0.5, 0.3, 0.2])
        ub = norm_upper_bounds(d)
        assert ub.dominance_bound == pytest.approx(bernoulli_norm(0.24).sigma)
        assert subgaussian_norm(d).sigma <= ub.dominance_bound

    def test_outside_unit_interval(self):
        ub = norm_upper_bounds(DiscreteDistribution([-3, 3], [0.5, 0.5]))
        assert ub.range_bound == 3.0
        assert ub.dominance_bound is None

    def test_effect_dominance(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            d = int(rng.integers(2, 8))
            povm = random_two_outcome_povm(d, rng)
            dist = induced_distribution(povm.m1, random_density(d, rng))
            assert subgaussian_norm(dist).sigma <= norm_upper_bounds(dist).dominance_bound + 1e-8
