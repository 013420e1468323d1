"""Fluctuation-response bounds on |Tr(g1 O) - Tr(g0 O)|.

Three members of the family, from tightest to loosest:

* ``tight``: inf_s (1/s) [ln Tr exp(xi s O_c + ln g0) + S(g1||g0)]
* ``golden_thompson``: inf_s (1/s) [ln Tr(g0 exp(xi s O_c)) + S(g1||g0)]
* ``sub_gaussian``: sigma sqrt(2 S(g1||g0)), sigma the sub-Gaussian norm of O
  under g0.

Here O_c = O - Tr(g0 O) I and xi is the sign of the mean difference. The
weighted (prior-aware) variant, the Gibbs variational gap and a few
thermodynamic corollaries live here as well.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import logsumexp

from . import kernels
from .errors import (
    DegenerateSigma,
    DomainError,
    FullRankRequired,
    NotThermal,
    ToleranceNotMet,
)
from .linalg import as_hermitian, check_same_dim, log_on_support_values, log_trace_exp
from .states import (
    as_density,
    log_partition,
    relative_entropy,
    thermal_state,
    thermo_potentials,
    von_neumann_entropy,
)
from .subgaussian import induced_distribution, subgaussian_norm

S_MIN = 1e-6
S_MAX = 1e6
S_GRID = 128
FULL_RANK_TOL = 1e-10
SIGMA_ZERO = 1e-14


@dataclass(frozen=True)
class BoundReport:
    bound: float
    exact_difference: float
    xi: int
    relative_entropy: float
    variant: str
    argmin_s: Optional[float] = None
    sigma_used: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _expect(o, rho) -> float:
    return float(np.einsum("ij,ji->", rho.matrix, o.matrix).real)


def mean_difference(o, gamma0, gamma1) -> float:
    """Signed Tr(g1 O) - Tr(g0 O)."""
    o, gamma0, gamma1 = as_hermitian(o), as_density(gamma0), as_density(gamma1)
    check_same_dim(o, gamma0, gamma1)
    return _expect(o, gamma1) - _expect(o, gamma0)


def _sign(x: float) -> int:
    return 1 if x >= 0.0 else -1


def _golden_min(f, a, b, tol, maxiter=200):
    # scalar golden section for objectives that are not kernel-backed
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while (b - a) > tol * 0.5 * (abs(a) + abs(b)) and it < maxiter:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        it += 1
    if it >= maxiter:
        raise ToleranceNotMet("s-optimization did not converge")
    return (c, fc) if fc < fd else (d, fd)


def _tight_minimize(o_c: np.ndarray, log_g0: np.ndarray, xi: int, rel_ent: float, s_tol: float):
    grid = np.logspace(math.log10(S_MIN), math.log10(S_MAX), S_GRID)
    stack = xi * grid[:, None, None] * o_c[None] + log_g0[None]
    with np.errstate(all="ignore"):
        vals = (logsumexp(np.linalg.eigvalsh(stack), axis=1) + rel_ent) / grid
    vals[~np.isfinite(vals)] = np.inf
    k = int(np.argmin(vals))
    lo = grid[k - 1] if k > 0 else grid[0] / (grid[1] / grid[0])
    hi = grid[k + 1] if k < S_GRID - 1 else grid[k]

    def obj(s):
        w = np.linalg.eigvalsh(xi * s * o_c + log_g0)
        return (float(logsumexp(w)) + rel_ent) / s

    s_ref, f_ref = _golden_min(obj, lo, hi, s_tol)
    if f_ref < vals[k]:
        return f_ref, s_ref
    return float(vals[k]), float(grid[k])


def qfri_bound(o, gamma0, gamma1, variant: str = "golden_thompson", s_tol: float = 1e-8) -> BoundReport:
    """Optimize the fluctuation-response bound over s > 0.

    ``s`` is searched on 128 log-spaced points in [1e-6, 1e6] and refined by
    golden section. Both objectives are quasi-convex in s (a convex function
    vanishing at 0, plus a constant, divided by s), so the bracketing grid
    point's neighbours always contain the minimizer.
    """
    o, gamma0, gamma1 = as_hermitian(o), as_density(gamma0), as_density(gamma1)
    check_same_dim(o, gamma0, gamma1)
    diff = _expect(o, gamma1) - _expect(o, gamma0)
    xi = _sign(diff)
    rel_ent = relative_entropy(gamma1, gamma0)
    if variant == "golden_thompson":
        d = induced_distribution(o, gamma0, center=True)
        v, p = d.support()
        x = v - float(p @ v)
        value, s_arg, status = kernels.min_qfri_objective(x, p, rel_ent, float(xi), S_MIN, S_MAX, S_GRID, s_tol)
        if status != kernels.STATUS_OK:
            raise ToleranceNotMet("s-optimization did not converge")
    elif variant == "tight":
        if not gamma0.is_full_rank(FULL_RANK_TOL):
            raise FullRankRequired(f"tight bound needs ln g0; min eigenvalue {gamma0.min_eigenvalue:.3e}")
        o_c = o.matrix - _expect(o, gamma0) * np.eye(o.dim)
        log_g0 = gamma0.spectrum.reconstruct(log_on_support_values(gamma0.eigenvalues))
        value, s_arg = _tight_minimize(o_c, log_g0, xi, rel_ent, s_tol)
    else:
        raise DomainError(f"unknown variant {variant!r}")
    return BoundReport(float(value), abs(diff), xi, rel_ent, variant, argmin_s=float(s_arg))


def qfri_objective(o, gamma0, gamma1, s: float, variant: str = "golden_thompson") -> float:
    """The bracketed objective of ``qfri_bound`` at a fixed s."""
    o, gamma0, gamma1 = as_hermitian(o), as_density(gamma0), as_density(gamma1)
    xi = _sign(mean_difference(o, gamma0, gamma1))
    rel_ent = relative_entropy(gamma1, gamma0)
    o_c = o.matrix - _expect(o, gamma0) * np.eye(o.dim)
    if variant == "golden_thompson":
        d = induced_distribution(o, gamma0, center=True)
        v, p = d.support()
        return (kernels.cgf(v - float(p @ v), p, xi * s) + rel_ent) / s
    if variant == "tight":
        log_g0 = gamma0.spectrum.reconstruct(log_on_support_values(gamma0.eigenvalues))
        return (log_trace_exp(xi * s * o_c + log_g0) + rel_ent) / s
    raise DomainError(f"unknown variant {variant!r}")


def subgaussian_qfri_bound(o, gamma0, gamma1) -> BoundReport:
    """sigma sqrt(2 S(g1||g0)) with sigma the norm of O_c under g0."""
    o, gamma0, gamma1 = as_hermitian(o), as_density(gamma0), as_density(gamma1)
    check_same_dim(o, gamma0, gamma1)
    diff = _expect(o, gamma1) - _expect(o, gamma0)
    rel_ent = relative_entropy(gamma1, gamma0)
    sigma = subgaussian_norm(induced_distribution(o, gamma0, center=True)).sigma
    bound = sigma * math.sqrt(2.0 * rel_ent)
    argmin_s = None
    if sigma > SIGMA_ZERO and rel_ent > 0.0:
        argmin_s = math.sqrt(2.0 * rel_ent) / sigma
    elif rel_ent > 0.0 and abs(diff) > 1e-10:
        raise DegenerateSigma(f"sigma = 0 but the mean difference is {diff:.3e}")
    return BoundReport(bound, abs(diff), _sign(diff), rel_ent, "sub_gaussian", argmin_s, sigma)


def bayesian_qfri_bound(o, gamma0, gamma1, pi0: float, pi1: float) -> BoundReport:
    """Bound on |pi1 Tr(g1 O) - pi0 Tr(g0 O)|.

    The bound is pi1 sigma sqrt(2S) + xi (pi1 - pi0) Tr(g0 O) with
    xi = sgn(pi1 Tr(g1 O) - pi0 Tr(g0 O)); at pi0 = pi1 = 1 it is the plain
    sub-Gaussian bound.
    """
    if not pi1 > 0:
        raise DomainError("pi1 must be positive")
    o, gamma0, gamma1 = as_hermitian(o), as_density(gamma0), as_density(gamma1)
    check_same_dim(o, gamma0, gamma1)
    e0, e1 = _expect(o, gamma0), _expect(o, gamma1)
    weighted = pi1 * e1 - pi0 * e0
    xi = _sign(weighted)
    rel_ent = relative_entropy(gamma1, gamma0)
    sigma = subgaussian_norm(induced_distribution(o, gamma0, center=True)).sigma
    bound = pi1 * sigma * math.sqrt(2.0 * rel_ent) + xi * (pi1 - pi0) * e0
    argmin_s = None
    if sigma > SIGMA_ZERO and rel_ent > 0.0:
        argmin_s = math.sqrt(2.0 * rel_ent) / (pi1 * sigma)
    return BoundReport(bound, abs(weighted), xi, rel_ent, "bayesian", argmin_s, sigma)


def gibbs_gap(h, gamma) -> float:
    """Tr(gamma H) + Tr(gamma ln gamma) + ln Tr e^{-H}; zero only at the thermal state."""
    h, gamma = as_hermitian(h), as_density(gamma)
    check_same_dim(h, gamma)
    if not gamma.is_full_rank(FULL_RANK_TOL):
        raise FullRankRequired(f"min eigenvalue {gamma.min_eigenvalue:.3e}")
    return _expect(h, gamma) - von_neumann_entropy(gamma) + log_partition(h)


class EnergyBounds(NamedTuple):
    entropy_form: float
    free_energy_form: Optional[float]


def energy_difference_bound(h, gamma0, gamma1, temperature: float | None = None) -> EnergyBounds:
    """Bounds on |U1 - U0| with U = Tr(gamma H).

    The entropy form is sigma sqrt(2 S(g1||g0)). When ``temperature`` is
    given, g0 must be the thermal state at that temperature and the free
    energy form sigma sqrt(2 (F1 - F0)/T) is returned too.
    """
    h, gamma0, gamma1 = as_hermitian(h), as_density(gamma0), as_density(gamma1)
    check_same_dim(h, gamma0, gamma1)
    sigma = subgaussian_norm(induced_distribution(h, gamma0, center=True)).sigma
    entropy_form = sigma * math.sqrt(2.0 * relative_entropy(gamma1, gamma0))
    free_form = None
    if temperature is not None:
        thermal = thermal_state(h, temperature)
        if float(np.max(np.abs(thermal.matrix - gamma0.matrix))) > 1e-8:
            raise NotThermal(f"gamma0 is not the thermal state at T={temperature}")
        f0 = thermo_potentials(gamma0, h, temperature).free_energy
        f1 = thermo_potentials(gamma1, h, temperature).free_energy
        free_form = sigma * math.sqrt(2.0 * max(0.0, f1 - f0) / temperature)
    return EnergyBounds(entropy_form, free_form)


def classical_error_bound(n: int, delta_s: float, sigma0: float = 0.5) -> float:
    """max(0, 1 - sigma0 sqrt(2 n dS)) for n trajectory observations."""
    if n < 1 or delta_s < 0 or not 0.0 <= sigma0 <= 0.5:
        raise DomainError("need n >= 1, delta_s >= 0 and sigma0 in [0, 0.5]")
    return max(0.0, 1.0 - sigma0 * math.sqrt(2.0 * n * delta_s))
