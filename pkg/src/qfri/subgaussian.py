"""Sub-Gaussian norms of finite random variables.

The norm of X is the smallest sigma with E exp(t(X - EX)) <= exp(sigma^2 t^2 / 2)
for every real t. For finite support it equals sqrt(sup_{t != 0} 2K(t)/t^2),
K being the centered cumulant generating function; the supremum is either
attained at a tangency point t* (where K'(t*) t* = 2K(t*)) or in the t -> 0
limit, where 2K(t)/t^2 tends to the variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from .errors import DimensionMismatch, DomainError, ToleranceNotMet
from .linalg import as_hermitian, check_same_dim
from .states import as_density

T_MIN = 1e-4
T_MAX = 1e4
GRID_POINTS = 64
PROBE_POINTS = 256  # per sign
PROB_CLIP = 1e-12
SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite real random variable given by atoms and their probabilities."""

    values: np.ndarray
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        p = np.asarray(self.probs, dtype=np.float64).ravel()
        if v.shape != p.shape or v.size == 0:
            raise DimensionMismatch("values and probs must be non-empty and of equal length")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(p))):
            raise DomainError("non-finite values or probabilities")
        if np.any(p < -PROB_CLIP):
            raise DomainError(f"negative probability {p.min():.3e}")
        p = np.where(p < 0.0, 0.0, p)
        total = float(p.sum())
        if abs(total - 1.0) > 1e-10:
            raise DomainError(f"probabilities sum to {total!r}")
        v.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)

    @property
    def mean(self) -> float:
        return float(self.probs @ self.values)

    @property
    def variance(self) -> float:
        x = self.values - self.mean
        return float(self.probs @ (x * x))

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        keep = self.probs > 0.0
        return self.values[keep], self.probs[keep]

    def centered(self) -> "DiscreteDistribution":
        return DiscreteDistribution(self.values - self.mean, self.probs)


@dataclass(frozen=True)
class SubGaussianResult:
    sigma: float
    argmax_t: float
    method: str
    certificate_residual: float


class NormUpperBounds(NamedTuple):
    range_bound: float
    dominance_bound: Optional[float]


def induced_distribution(o, gamma0, center: bool = False) -> DiscreteDistribution:
    """Law of the observable ``o`` measured in its eigenbasis on state ``gamma0``.

    Atoms are the eigenvalues of ``o`` (shifted by -Tr(o gamma0) when
    ``center``); probabilities are the diagonal of ``gamma0`` in that basis.
    Degenerate eigenvalues stay separate atoms.
    """
    o, gamma0 = as_hermitian(o), as_density(gamma0)
    check_same_dim(o, gamma0)
    sd = o.spectrum
    v = sd.eigenvectors
    probs = np.einsum("ki,kl,li->i", v.conj(), gamma0.matrix, v).real
    probs = np.where(probs < 0.0, 0.0, probs)
    values = np.array(sd.eigenvalues)
    if center:
        values = values - float(probs @ values)
    return DiscreteDistribution(values, probs)


def _normalized_centered(d: DiscreteDistribution):
    v, p = d.support()
    x = v - float(p @ v)
    scale = float(np.max(np.abs(x)))
    return x, p, scale


def cgf(d: DiscreteDistribution, t: float) -> float:
    """Centered cumulant generating function ln E exp(t (X - EX))."""
    v, p = d.support()
    x = v - float(p @ v)
    return float(kernels.cgf(x, p, float(t)))


def certificate_residual(d: DiscreteDistribution, sigma: float, extra_t=()) -> float:
    """max over probe points of K(t) - sigma^2 t^2 / 2.

    The probes are 256 log-spaced points per sign over [1e-4, 1e4] in units of
    1/max|X - EX|, plus any ``extra_t`` given in the variable's own units.
    A nonpositive result certifies the sub-Gaussian inequality at ``sigma``.
    """
    x, p, scale = _normalized_centered(d)
    if scale == 0.0:
        return 0.0
    grid = np.logspace(math.log10(T_MIN), math.log10(T_MAX), PROBE_POINTS)
    probes = np.concatenate([-grid[::-1], grid, np.asarray(extra_t, dtype=float) * scale])
    probes = probes[probes != 0.0]
    k = kernels.cgf_many(x / scale, p, probes)
    s2 = (sigma / scale) ** 2
    return float(np.max(k - 0.5 * s2 * probes * probes))


def subgaussian_norm(d: DiscreteDistribution, tol: float = 1e-8) -> SubGaussianResult:
    """Numerical sub-Gaussian norm via the supremum of 2K(t)/t^2.

    The variable is centered and scaled to max|X| = 1; the supremum is
    searched on 64 log-spaced points per sign over [1e-4, 1e4], refined by
    golden section to relative tolerance ``tol``, and compared against the
    variance (the t -> 0 limit).
    """
    x, p, scale = _normalized_centered(d)
    if scale == 0.0:
        return SubGaussianResult(0.0, 0.0, "numeric_sup", 0.0)
    g, targ, status = kernels.sup_cgf_ratio(x / scale, p, T_MIN, T_MAX, GRID_POINTS, tol)
    if status == kernels.STATUS_BOUNDARY:
        raise ToleranceNotMet("sup of 2K(t)/t^2 sits at the grid boundary t = 1e4")
    if status == kernels.STATUS_STALLED:
        raise ToleranceNotMet("golden-section refinement did not converge")
    sigma = math.sqrt(g) * scale
    argmax_t = targ / scale
    resid = certificate_residual(d, sigma, extra_t=(argmax_t,) if argmax_t else ())
    return SubGaussianResult(sigma, argmax_t, "numeric_sup", resid)


def bernoulli_sigma(alpha: float) -> float:
    """sqrt((alpha - 1/2) / ln(alpha / (1 - alpha))), 1/2 at alpha = 1/2."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha={alpha!r} outside [0, 1]")
    if alpha in (0.0, 1.0):
        return 0.0
    delta = alpha - 0.5
    if delta == 0.0:
        return 0.5
    if abs(delta) < 0.25:
        # ln(a/(1-a)) = 2 atanh(2 delta), accurate near 1/2
        s2 = delta / (2.0 * math.atanh(2.0 * delta))
    else:
        s2 = delta / (math.log(alpha) - math.log1p(-alpha))
    return math.sqrt(s2)


def bernoulli_norm(alpha: float) -> SubGaussianResult:
    """Closed-form norm of a {0, 1} variable with mean ``alpha``.

    The tangency point is t* = 2 ln((1 - alpha)/alpha).
    """
    sigma = bernoulli_sigma(alpha)
    if alpha in (0.0, 1.0):
        return SubGaussianResult(0.0, 0.0, "closed_form_bernoulli", 0.0)
    t_star = 2.0 * (math.log1p(-alpha) - math.log(alpha))
    d = DiscreteDistribution([0.0, 1.0], [1.0 - alpha, alpha])
    resid = certificate_residual(d, sigma, extra_t=(t_star,) if t_star else ())
    return SubGaussianResult(sigma, t_star, "closed_form_bernoulli", resid)


def norm_upper_bounds(d: DiscreteDistribution) -> NormUpperBounds:
    """Range bound (b - a)/2, plus the Bernoulli dominance bound when X ⊆ [0, 1]."""
    lo, hi = float(d.values.min()), float(d.values.max())
    dominance = None
    if lo >= -SUPPORT_TOL and hi <= 1.0 + SUPPORT_TOL:
        dominance = bernoulli_sigma(min(1.0, max(0.0, d.mean)))
    return NormUpperBounds(0.5 * (hi - lo), dominance)
