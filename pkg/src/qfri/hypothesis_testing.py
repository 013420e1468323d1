"""Two-outcome quantum hypothesis tests on n copies.

H0: the state is rho0^{⊗n}, H1: it is rho1^{⊗n}. A test is a two-outcome
POVM {M0, M1}; outcome 1 rejects H0. The error rates are

    alpha = Tr(rho0^{⊗n} M1),    beta = Tr(rho1^{⊗n} M0).

The measurement-aware lower bound on alpha + beta is
1 - sigma0 sqrt(2 n S(rho1||rho0)), where sigma0 is the sub-Gaussian norm of
M1 under rho0^{⊗n}; with sigma0 replaced by 1/2 it is the Pinsker bound.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    CapExceeded,
    DimensionMismatch,
    DomainError,
    NotCommuting,
    SpectrumOutOfRange,
    SupportViolation,
)
from .linalg import DEFAULT_CAP, HermitianOperator, as_hermitian, check_same_dim, kron_power
from .states import DensityMatrix, as_density, relative_entropy, trace_distance
from .subgaussian import (
    SubGaussianResult,
    bernoulli_norm,
    bernoulli_sigma,
    induced_distribution,
    subgaussian_norm,
)

EFFECT_TOL = 1e-10
PROJECTOR_TOL = 1e-9
COMMUTE_TOL = 1e-9
PLANNER_MODES = ("exact_sigma", "approx_sigma", "pinsker")


@dataclass(frozen=True, eq=False)
class Povm:
    """Two-outcome measurement {M0, M1} with M0 + M1 = I."""

    m0: HermitianOperator
    m1: HermitianOperator

    def __post_init__(self):
        m0, m1 = as_hermitian(self.m0), as_hermitian(self.m1)
        check_same_dim(m0, m1)
        for name, m in (("M0", m0), ("M1", m1)):
            w = m.eigenvalues
            if w[0] < -EFFECT_TOL or w[-1] > 1.0 + EFFECT_TOL:
                raise SpectrumOutOfRange(f"{name} spectrum [{w[0]:.3e}, {w[-1]:.3e}] not in [0, 1]")
        resid = float(np.max(np.abs(m0.matrix + m1.matrix - np.eye(m0.dim))))
        if resid > EFFECT_TOL:
            raise DomainError(f"M0 + M1 differs from identity by {resid:.3e}")
        object.__setattr__(self, "m0", m0)
        object.__setattr__(self, "m1", m1)

    @classmethod
    def from_effect(cls, m1) -> "Povm":
        m1 = as_hermitian(m1)
        return cls(HermitianOperator._trusted(np.eye(m1.dim) - m1.matrix), m1)

    @property
    def dim(self) -> int:
        return self.m1.dim

    def swapped(self) -> "Povm":
        return Povm(self.m1, self.m0)

    def is_projective(self, tol: float = PROJECTOR_TOL) -> bool:
        return _is_projector(self.m1, tol)


def _is_projector(m: HermitianOperator, tol: float = PROJECTOR_TOL) -> bool:
    w = m.eigenvalues
    return bool(np.all(np.minimum(np.abs(w), np.abs(w - 1.0)) <= tol))


def _n_copy(rho: DensityMatrix, n: int, cap: int) -> DensityMatrix:
    return kron_power(rho, n, cap)


def _check_povm_dim(rho: DensityMatrix, povm: Povm, n: int, cap: int):
    required = rho.dim ** n
    if required <= cap and povm.dim != required:
        raise DimensionMismatch(f"POVM acts on dimension {povm.dim}, expected {rho.dim}^{n} = {required}")


def error_rates(rho0, rho1, povm: Povm, n: int = 1, cap: int = DEFAULT_CAP) -> tuple[float, float]:
    """(alpha, beta) of ``povm`` applied to n copies, clipped to [0, 1]."""
    rho0, rho1 = as_density(rho0), as_density(rho1)
    check_same_dim(rho0, rho1)
    g0, g1 = _n_copy(rho0, n, cap), _n_copy(rho1, n, cap)
    _check_povm_dim(rho0, povm, n, cap)
    alpha = float(np.einsum("ij,ji->", g0.matrix, povm.m1.matrix).real)
    beta = float(np.einsum("ij,ji->", g1.matrix, povm.m0.matrix).real)
    return min(1.0, max(0.0, alpha)), min(1.0, max(0.0, beta))


def sigma0_for_test(m1, gamma0) -> SubGaussianResult:
    """Sub-Gaussian norm of the effect ``m1`` measured on ``gamma0``.

    Projectors get the Bernoulli closed form in alpha = Tr(gamma0 m1); general
    effects go through the numerical supremum.
    """
    m1, gamma0 = as_hermitian(m1), as_density(gamma0)
    check_same_dim(m1, gamma0)
    w = m1.eigenvalues
    if w[0] < -EFFECT_TOL or w[-1] > 1.0 + EFFECT_TOL:
        raise SpectrumOutOfRange(f"effect spectrum [{w[0]:.3e}, {w[-1]:.3e}] not in [0, 1]")
    if _is_projector(m1):
        alpha = float(np.einsum("ij,ji->", gamma0.matrix, m1.matrix).real)
        return bernoulli_norm(min(1.0, max(0.0, alpha)))
    return subgaussian_norm(induced_distribution(m1, gamma0, center=False))


class ErrorSumBounds(NamedTuple):
    lower: float
    twin_lower: Optional[float]
    upper: float


def error_sum_bounds(s01: float, n: int, sigma0: float, s10: float | None = None,
                     sigma1: float | None = None) -> ErrorSumBounds:
    """Raw (unclamped) lower, twin-lower and upper bounds on alpha + beta."""
    if s01 < 0 or n < 1 or not 0.0 <= sigma0 <= 0.5 + 1e-9:
        raise DomainError("need s01 >= 0, n >= 1 and sigma0 in [0, 0.5]")
    spread = sigma0 * math.sqrt(2.0 * n * s01)
    twin = None
    if s10 is not None and sigma1 is not None:
        if s10 < 0 or not 0.0 <= sigma1 <= 0.5 + 1e-9:
            raise DomainError("need s10 >= 0 and sigma1 in [0, 0.5]")
        twin = 1.0 - sigma1 * math.sqrt(2.0 * n * s10)
    return ErrorSumBounds(1.0 - spread, twin, 1.0 + spread)


def pinsker_bound(s01: float, n: int) -> float:
    """1 - (1/2) sqrt(2 n S), valid for every POVM."""
    if s01 < 0 or n < 1:
        raise DomainError("need s01 >= 0 and n >= 1")
    return 1.0 - 0.5 * math.sqrt(2.0 * n * s01)


def helstrom_bound(rho0, rho1, n: int = 1, cap: int = DEFAULT_CAP) -> float:
    """1 - (1/2)||rho0^{⊗n} - rho1^{⊗n}||_1, the optimum over all POVMs."""
    rho0, rho1 = as_density(rho0), as_density(rho1)
    check_same_dim(rho0, rho1)
    return 1.0 - trace_distance(_n_copy(rho0, n, cap), _n_copy(rho1, n, cap))


def example_states(m: int) -> tuple[DensityMatrix, DensityMatrix]:
    """Equal and slightly biased mixtures of |0...0> and |1...1> on m qubits.

    Both states live on span{|0^m>, |1^m>}, so they are returned in that
    2-dimensional basis: diag(1/2, 1/2) and diag((m-1)/2m, (m+1)/2m).
    """
    if int(m) != m or m < 2:
        raise DomainError("m must be an integer >= 2")
    rho0 = DensityMatrix(np.diag([0.5, 0.5]))
    rho1 = DensityMatrix(np.diag([(m - 1) / (2 * m), (m + 1) / (2 * m)]))
    return rho0, rho1


def planner_sigma(alpha: float, mode: str) -> float:
    if mode == "exact_sigma":
        return bernoulli_sigma(alpha)
    if mode == "approx_sigma":
        return math.sqrt(-1.0 / (2.0 * math.log(alpha)))
    if mode == "pinsker":
        return 0.5
    raise DomainError(f"unknown planner mode {mode!r}")


def plan_sample_size(alpha: float, beta_floor: float, s01: float, mode: str = "exact_sigma") -> int:
    """Smallest n with 1 - sigma sqrt(2 n S) <= beta_floor.

    With alpha held fixed the lower bound on beta is 1 - sigma sqrt(2nS); n is
    the number of copies needed before that floor drops to ``beta_floor``.
    sigma is the Bernoulli norm of alpha (exact_sigma), its small-alpha
    approximation sqrt(-1/(2 ln alpha)) (approx_sigma) or 1/2 (pinsker).
    """
    if not 0.0 < alpha < 0.5:
        raise DomainError("alpha must lie in (0, 0.5)")
    if not 0.0 < beta_floor < 1.0:
        raise DomainError("beta_floor must lie in (0, 1)")
    if not s01 > 0:
        raise DomainError("relative entropy must be positive")
    sigma = planner_sigma(alpha, mode)
    x = (1.0 - beta_floor) ** 2 / (2.0 * s01 * sigma * sigma)
    # absorb rounding when x is an exact integer in real arithmetic
    return max(1, math.ceil(x * (1.0 - 1e-12)))


def bound_curve(alpha: float, s01: float, ns, mode: str = "exact_sigma") -> np.ndarray:
    """Lower bound 1 - sigma sqrt(2 n S) evaluated at each n in ``ns``."""
    sigma = planner_sigma(alpha, mode)
    ns = np.asarray(ns, dtype=float)
    return 1.0 - sigma * np.sqrt(2.0 * ns * s01)


def _joint_eigenbasis(rho0: DensityMatrix, rho1: DensityMatrix) -> np.ndarray:
    # diagonalize rho0, then rho1 inside each degenerate eigenspace of rho0
    w0, v0 = np.linalg.eigh(rho0.matrix)
    basis = np.array(v0)
    start = 0
    while start < len(w0):
        stop = start + 1
        while stop < len(w0) and abs(w0[stop] - w0[start]) <= 1e-12:
            stop += 1
        if stop - start > 1:
            block = v0[:, start:stop]
            sub = block.conj().T @ rho1.matrix @ block
            _, u = np.linalg.eigh(0.5 * (sub + sub.conj().T))
            basis[:, start:stop] = block @ u
        start = stop
    return basis


def likelihood_ratio_povm(rho0, rho1, n: int, threshold: float, cap: int = DEFAULT_CAP) -> Povm:
    """Neyman-Pearson projector test for commuting states.

    M1 projects onto the joint eigenvectors k of the n-copy pair with
    p1(k) > threshold * p0(k); atoms with p0(k) = 0 are always put in M1.
    """
    rho0, rho1 = as_density(rho0), as_density(rho1)
    check_same_dim(rho0, rho1)
    if not threshold > 0:
        raise DomainError("threshold must be positive")
    comm = rho0.matrix @ rho1.matrix - rho1.matrix @ rho0.matrix
    if float(np.max(np.abs(comm))) > COMMUTE_TOL:
        raise NotCommuting("likelihood-ratio test needs commuting states")
    required = rho0.dim ** n
    if required > cap:
        raise CapExceeded(required, cap)
    v = _joint_eigenbasis(rho0, rho1)
    p0 = np.einsum("ki,kl,li->i", v.conj(), rho0.matrix, v).real
    p1 = np.einsum("ki,kl,li->i", v.conj(), rho1.matrix, v).real
    p0 = np.where(p0 < 1e-12, 0.0, p0)
    p1 = np.where(p1 < 1e-12, 0.0, p1)
    P0, P1, V = p0, p1, v
    for _ in range(n - 1):
        P0, P1, V = np.kron(P0, p0), np.kron(P1, p1), np.kron(V, v)
    accept = (P0 == 0.0) | (P1 > threshold * P0)
    cols = V[:, accept]
    m1 = cols @ cols.conj().T
    return Povm.from_effect(HermitianOperator._trusted(0.5 * (m1 + m1.conj().T)))


@dataclass(frozen=True)
class TestOutcome:
    alpha: float
    beta: float
    n: int
    sigma0: float
    lower_bound: float
    pinsker_bound: float
    upper_bound: float
    relative_entropy: float
    helstrom_bound: Optional[float] = None
    twin_lower_bound: Optional[float] = None
    sigma1: Optional[float] = None

    __test__ = False  # keep pytest from collecting this class

    @property
    def vacuous(self) -> bool:
        return self.lower_bound <= 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["vacuous"] = self.vacuous
        d["error_sum"] = self.alpha + self.beta
        return d


def evaluate_test(rho0, rho1, povm: Povm, n: int = 1, cap: int = DEFAULT_CAP,
                  helstrom: bool = True, twin: bool = True) -> TestOutcome:
    """Error rates of ``povm`` plus every bound on alpha + beta that applies."""
    rho0, rho1 = as_density(rho0), as_density(rho1)
    alpha, beta = error_rates(rho0, rho1, povm, n, cap)
    s01 = relative_entropy(rho1, rho0)
    sigma0 = sigma0_for_test(povm.m1, _n_copy(rho0, n, cap)).sigma
    s10 = sigma1 = None
    if twin:
        try:
            s10 = relative_entropy(rho0, rho1)
        except SupportViolation:
            s10 = None
        if s10 is not None:
            sigma1 = sigma0_for_test(povm.m0, _n_copy(rho1, n, cap)).sigma
    bounds = error_sum_bounds(s01, n, sigma0, s10, sigma1)
    return TestOutcome(
        alpha=alpha,
        beta=beta,
        n=n,
        sigma0=sigma0,
        lower_bound=bounds.lower,
        pinsker_bound=pinsker_bound(s01, n),
        upper_bound=bounds.upper,
        relative_entropy=s01,
        helstrom_bound=helstrom_bound(rho0, rho1, n, cap) if helstrom else None,
        twin_lower_bound=bounds.twin_lower,
        sigma1=sigma1,
    )
