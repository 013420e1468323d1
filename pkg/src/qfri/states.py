"""Density matrices, divergences and thermodynamic potentials.

All entropies are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import logsumexp, xlogy

from .errors import DomainError, NotPSD, SupportViolation, TraceNotOne
from .linalg import (
    LOG_CLIP,
    NEG_EIG_TOL,
    HermitianOperator,
    as_hermitian,
    check_same_dim,
    log_on_support_values,
)

TRACE_TOL = 1e-10
SUPPORT_TOL = 1e-10


class DensityMatrix(HermitianOperator):
    """Positive semidefinite, unit-trace Hermitian operator."""

    def __init__(self, matrix):
        super().__init__(matrix)
        if self.min_eigenvalue < -NEG_EIG_TOL:
            raise NotPSD(self.min_eigenvalue)
        if self.trace_residual > TRACE_TOL:
            raise TraceNotOne(float(np.trace(self.matrix).real))

    @cached_property
    def trace_residual(self) -> float:
        return abs(float(np.trace(self.matrix).real) - 1.0)

    @cached_property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.eigenvalues >= LOG_CLIP))

    def is_full_rank(self, tol: float = 1e-10) -> bool:
        return self.min_eigenvalue > tol


def validate_density(m) -> DensityMatrix:
    """Check Hermiticity, positivity and unit trace; raise on the first failure."""
    if isinstance(m, HermitianOperator):
        m = m.matrix
    return DensityMatrix(m)


def as_density(m) -> DensityMatrix:
    if isinstance(m, DensityMatrix):
        return m
    return validate_density(m)


def _clipped_spectrum(rho: DensityMatrix) -> np.ndarray:
    w = np.array(rho.eigenvalues)
    w[w < LOG_CLIP] = 0.0
    return w


def von_neumann_entropy(rho) -> float:
    """-Tr(rho ln rho) over the clipped spectrum."""
    w = _clipped_spectrum(as_density(rho))
    return max(0.0, float(-np.sum(xlogy(w, w))))


def relative_entropy(g1, g0) -> float:
    """S(g1 || g0) = Tr g1 ln g1 - Tr g1 ln g0.

    Raises SupportViolation when g1 has weight above 1e-10 on the null space
    of g0 instead of returning infinity.
    """
    g1, g0 = as_density(g1), as_density(g0)
    check_same_dim(g1, g0)
    sd0 = g0.spectrum
    # diagonal of g1 in g0's eigenbasis
    v = sd0.eigenvectors
    p1 = np.einsum("ki,kl,li->i", v.conj(), g1.matrix, v).real
    null = sd0.eigenvalues < LOG_CLIP
    leak = float(np.sum(p1[null]))
    if leak > SUPPORT_TOL:
        raise SupportViolation(f"Tr(g1 P_null(g0)) = {leak:.3e}")
    cross = float(np.dot(p1[~null], log_on_support_values(sd0.eigenvalues)[~null]))
    w1 = _clipped_spectrum(g1)
    value = float(np.sum(xlogy(w1, w1))) - cross
    return max(value, 0.0)


def trace_distance(a, b) -> float:
    """Half the trace norm of a - b."""
    a, b = as_density(a), as_density(b)
    check_same_dim(a, b)
    w = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(min(1.0, 0.5 * np.sum(np.abs(w))))


def thermal_state(h, temperature: float = 1.0) -> DensityMatrix:
    """Gibbs state e^{-H/T} / Tr e^{-H/T} (k_B = 1)."""
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    h = as_hermitian(h)
    sd = h.spectrum
    # shifting by the ground energy keeps every exponent <= 0
    weights = np.exp(-(sd.eigenvalues - sd.eigenvalues[0]) / temperature)
    weights /= weights.sum()
    rho = sd.reconstruct(weights)
    return DensityMatrix._trusted(0.5 * (rho + rho.conj().T))


def log_partition(h, temperature: float = 1.0) -> float:
    """ln Tr e^{-H/T}."""
    h = as_hermitian(h)
    return float(logsumexp(-h.eigenvalues / temperature))


@dataclass(frozen=True)
class ThermoPotentials:
    internal_energy: float
    entropy: float
    free_energy: float
    temperature: float


def thermo_potentials(rho, h, temperature: float = 1.0) -> ThermoPotentials:
    """U = Tr(rho H), S = von Neumann entropy, F = U - T S."""
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    rho, h = as_density(rho), as_hermitian(h)
    check_same_dim(rho, h)
    u = float(np.einsum("ij,ji->", rho.matrix, h.matrix).real)
    s = von_neumann_entropy(rho)
    return ThermoPotentials(u, s, u - temperature * s, temperature)
