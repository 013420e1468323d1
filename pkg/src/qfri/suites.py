"""Randomized property suites behind ``qfri verify``.

Every case draws from its own generator seeded by (seed, suite, case index),
so results do not depend on evaluation order or on parallelism. A case
returns a list of slacks: the distance from violating each checked
inequality, tolerance included. A negative slack is a violation.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import bounds, hypothesis_testing, linalg, speed, subgaussian
from .linalg import kron_power, random_density, random_hermitian, random_unitary
from .states import relative_entropy, thermal_state

DEFAULT_SEED = 1729
DEFAULT_CASES = 1000

SUITES = ("klein", "golden_thompson", "qfri_chain", "subgauss", "error_bounds", "bayesian", "gibbs", "speed")

_SUITE_IDS = {name: i for i, name in enumerate(SUITES)}

DEFAULT_DIMS = {
    "klein": (2, 8),
    "golden_thompson": (2, 8),
    "qfri_chain": (2, 8),
    "subgauss": (2, 8),
    "error_bounds": (2, 3),
    "bayesian": (2, 3),
    "gibbs": (2, 8),
    "speed": (2, 6),
}


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    cases_run: int
    violations: int
    worst_slack: float
    elapsed: float

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "suite": self.suite,
            "cases_run": self.cases_run,
            "violations": self.violations,
            "worst_slack": self.worst_slack,
        }
        if timing:
            d["elapsed"] = self.elapsed
        return d


def case_rng(seed: int, suite: str, case: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_SUITE_IDS[suite], case)))


def _dim(rng, dims) -> int:
    return int(rng.integers(dims[0], dims[1] + 1))


def _radius_scaled(rng, d, radius=2.0):
    h = random_hermitian(d, rng).matrix
    r = float(np.max(np.abs(np.linalg.eigvalsh(h))))
    return h * (radius * rng.uniform(0.05, 1.0) / r)


# -- individual cases ----------------------------------------------------------

def _klein_case(rng, dims, case):
    d = _dim(rng, dims)
    a, b = _radius_scaled(rng, d), _radius_scaled(rng, d)
    scale = linalg.trace_inequality_scale(a, b)
    return [linalg.klein_gap(a, b) + 1e-9 * scale]


def _golden_thompson_case(rng, dims, case):
    d = _dim(rng, dims)
    a, b = _radius_scaled(rng, d), _radius_scaled(rng, d)
    scale = linalg.trace_inequality_scale(a, b)
    slacks = [linalg.golden_thompson_gap(a, b) + 1e-9 * scale]
    # commuting pair sharing a random eigenbasis
    u = random_unitary(d, rng)
    ca = (u * rng.uniform(-2, 2, d)) @ u.conj().T
    cb = (u * rng.uniform(-2, 2, d)) @ u.conj().T
    slacks.append(1e-10 - abs(linalg.golden_thompson_gap(ca, cb)))
    return slacks


def _qfri_chain_case(rng, dims, case):
    d = _dim(rng, dims)
    o = random_hermitian(d, rng)
    g0 = random_density(d, rng)
    g1 = random_density(d, rng, rank=int(rng.integers(1, d + 1)))
    tight = bounds.qfri_bound(o, g0, g1, "tight")
    gt = bounds.qfri_bound(o, g0, g1, "golden_thompson")
    sg = bounds.subgaussian_qfri_bound(o, g0, g1)
    return [
        tight.bound - tight.exact_difference + 1e-8,
        gt.bound - tight.bound + 1e-8,
        sg.bound - gt.bound + 1e-8,
    ]


def _random_effect(rng, d):
    if rng.random() < 0.2:
        return linalg.random_projective_povm(d, rng)
    return linalg.random_two_outcome_povm(d, rng)


def _subgauss_case(rng, dims, case):
    d = _dim(rng, dims)
    g0 = random_density(d, rng, rank=int(rng.integers(1, d + 1)))
    povm = linalg.random_two_outcome_povm(d, rng)
    dist = subgaussian.induced_distribution(povm.m1, g0, center=False)
    res = subgaussian.subgaussian_norm(dist)
    ub = subgaussian.norm_upper_bounds(dist)
    return [
        ub.dominance_bound - res.sigma + 1e-8,
        1e-9 - res.certificate_residual,
        res.sigma - math.sqrt(dist.variance) + 1e-8,
        ub.range_bound - res.sigma + 1e-8,
    ]


def _error_bounds_case(rng, dims, case):
    d = _dim(rng, dims)
    n = int(rng.integers(1, 4))
    # redraw until rho0^{⊗n} stays clear of the 1e-12 support clip
    rho0 = random_density(d, rng)
    while rho0.min_eigenvalue ** n < 1e-9:
        rho0 = random_density(d, rng)
    rho1 = random_density(d, rng, rank=int(rng.integers(1, d + 1)))
    povm = _random_effect(rng, d ** n)
    out = hypothesis_testing.evaluate_test(rho0, rho1, povm, n, twin=False)
    s_direct = relative_entropy(kron_power(rho1, n), kron_power(rho0, n))
    err = out.alpha + out.beta
    slacks = [
        err - out.lower_bound + 1e-8,
        out.lower_bound - out.pinsker_bound + 1e-8,
        out.upper_bound - err + 1e-8,
        err - out.helstrom_bound + 1e-8,
        1e-8 - abs(s_direct - n * out.relative_entropy),
    ]
    if abs(out.alpha - 0.5) > 0.01:
        slacks.append(out.lower_bound - out.pinsker_bound - 1e-6)
    return slacks


def _bayesian_case(rng, dims, case):
    d = _dim(rng, dims)
    rho0 = random_density(d, rng)
    rho1 = random_density(d, rng)
    povm = _random_effect(rng, d)
    pi0 = float(rng.uniform(0.01, 0.99))
    pi1 = 1.0 - pi0
    alpha, beta = hypothesis_testing.error_rates(rho0, rho1, povm)
    s = relative_entropy(rho1, rho0)
    sigma = hypothesis_testing.sigma0_for_test(povm.m1, rho0).sigma
    spread = sigma * math.sqrt(2.0 * s)
    weighted = (2.0 * pi0 / pi1 - 1.0) * alpha + beta
    if pi1 * (1.0 - beta) > pi0 * alpha:
        slacks = [alpha + beta - (1.0 - spread) + 1e-8, 1.0 + spread - weighted + 1e-8]
    else:
        slacks = [weighted - (1.0 - spread) + 1e-8, 1.0 + spread - (alpha + beta) + 1e-8]
    # general observable with independent weights
    o = random_hermitian(d, rng)
    w0, w1 = (float(x) for x in rng.uniform(0.01, 1.0, 2))
    rep = bounds.bayesian_qfri_bound(o, rho0, rho1, w0, w1)
    slacks.append(rep.bound - rep.exact_difference + 1e-8)
    if case < 200:
        b1 = bounds.bayesian_qfri_bound(o, rho0, rho1, 1.0, 1.0).bound
        b2 = bounds.subgaussian_qfri_bound(o, rho0, rho1).bound
        slacks.append(1e-10 - abs(b1 - b2))
    return slacks


def _gibbs_case(rng, dims, case, thermal_cases=100):
    d = _dim(rng, dims)
    h = random_hermitian(d, rng)
    slacks = [bounds.gibbs_gap(h, random_density(d, rng)) + 1e-9]
    if case < thermal_cases:
        slacks.append(1e-9 - abs(bounds.gibbs_gap(h, thermal_state(h, 1.0))))
    return slacks


def _speed_case(rng, dims, case):
    d = _dim(rng, dims)
    o = random_hermitian(d, rng)
    h = random_hermitian(d, rng)
    rho = random_density(d, rng)
    v = abs(speed.observable_speed(o, h, rho))
    dt = float(rng.uniform(-1.0, 1.0))
    evolved = speed.unitary_evolve(rho, h, dt)
    spec_err = float(np.max(np.abs(evolved.eigenvalues - rho.eigenvalues)))
    purity = abs(np.trace(evolved.matrix @ evolved.matrix).real - np.trace(rho.matrix @ rho.matrix).real)
    return [
        speed.qfri_speed_bound(o, h, rho) - v + 1e-8,
        speed.mandelstam_tamm_bound(o, h, rho) - v + 1e-8,
        1e-9 - spec_err,
        1e-9 - purity,
    ]


_CASES: dict[str, Callable] = {
    "klein": _klein_case,
    "golden_thompson": _golden_thompson_case,
    "qfri_chain": _qfri_chain_case,
    "subgauss": _subgauss_case,
    "error_bounds": _error_bounds_case,
    "bayesian": _bayesian_case,
    "gibbs": _gibbs_case,
    "speed": _speed_case,
}


def run_case(suite: str, seed: int, case: int, dims=None) -> list[float]:
    dims = dims or DEFAULT_DIMS[suite]
    return _CASES[suite](case_rng(seed, suite, case), dims, case)


def _run_chunk(args):
    suite, seed, cases, dims = args
    return [min(run_case(suite, seed, c, dims)) for c in cases]


def run_suite(suite: str, cases: int = DEFAULT_CASES, seed: int = DEFAULT_SEED,
              dims: Optional[tuple[int, int]] = None, jobs: int = 1) -> SuiteReport:
    """Run ``cases`` seeded cases of one suite and aggregate the slacks."""
    if suite not in _CASES:
        raise KeyError(f"unknown suite {suite!r}")
    start = time.perf_counter()
    if jobs > 1:
        chunks = [list(range(i, cases, jobs)) for i in range(jobs)]
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(_run_chunk, [(suite, seed, ch, dims) for ch in chunks]))
        per_case = [0.0] * cases
        for ch, res in zip(chunks, parts):
            for c, s in zip(ch, res):
                per_case[c] = s
    else:
        per_case = _run_chunk((suite, seed, range(cases), dims))
    elapsed = time.perf_counter() - start
    violations = sum(1 for s in per_case if not s >= 0.0)
    worst = float(min(per_case)) if per_case else math.inf
    return SuiteReport(suite, cases, violations, worst, elapsed)


def run_verify(suites, cases: int = DEFAULT_CASES, seed: int = DEFAULT_SEED,
               dims=None, jobs: int = 1) -> list[SuiteReport]:
    names = SUITES if "all" in suites else tuple(suites)
    return [run_suite(name, cases, seed, dims, jobs) for name in names]
