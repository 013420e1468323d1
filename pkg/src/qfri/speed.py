"""Speed bounds for observables under unitary dynamics (hbar = 1).

Under d rho/dt = -i[H, rho] the expectation of O moves at speed Tr(C O) with
C = -i[H, rho]. Two upper bounds on that speed are provided:

* sigma * sqrt(Tr(C rho^{-1} C)), sigma the sub-Gaussian norm of O under rho,
* the Mandelstam-Tamm bound 2 ΔO ΔH.

``relative_entropy_second_order`` returns (dt^2/2) Tr(C rho^{-1} C).
``relative_entropy_second_order_kubo_mori`` returns the exact second-order
coefficient of S(rho_{t+dt}||rho_t), which weights |C_ij|^2 by the inverse
logarithmic mean of the eigenvalues instead of their inverse harmonic mean.
The two coincide only when C = 0, so the first one is an upper estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FullRankRequired
from .linalg import HermitianOperator, as_hermitian, check_same_dim
from .states import DensityMatrix, as_density, relative_entropy
from .subgaussian import induced_distribution, subgaussian_norm

FULL_RANK_TOL = 1e-10


def generator(h, rho) -> HermitianOperator:
    """C = -i[H, rho], the Hermitian rate of change of rho."""
    h, rho = as_hermitian(h), as_density(rho)
    check_same_dim(h, rho)
    c = -1j * (h.matrix @ rho.matrix - rho.matrix @ h.matrix)
    return HermitianOperator(c)


def observable_speed(o, h, rho) -> float:
    """d/dt Tr(rho_t O) = Tr(C O)."""
    o = as_hermitian(o)
    c = generator(h, rho)
    check_same_dim(o, c)
    return float(np.einsum("ij,ji->", c.matrix, o.matrix).real)


def _require_full_rank(rho: DensityMatrix):
    if not rho.is_full_rank(FULL_RANK_TOL):
        raise FullRankRequired(f"rho^-1 needed; min eigenvalue {rho.min_eigenvalue:.3e}")


def _c_in_rho_basis(h, rho: DensityMatrix):
    c = generator(h, rho).matrix
    v = rho.spectrum.eigenvectors
    return v.conj().T @ c @ v, rho.eigenvalues


def fisher_term(h, rho) -> float:
    """Tr(C rho^{-1} C), computed in the eigenbasis of rho."""
    rho = as_density(rho)
    _require_full_rank(rho)
    cr, w = _c_in_rho_basis(h, rho)
    return float(np.sum(np.abs(cr) ** 2 / w[None, :]))


def kubo_mori_term(h, rho) -> float:
    """sum_ij |C_ij|^2 (ln w_i - ln w_j)/(w_i - w_j) in the eigenbasis of rho."""
    rho = as_density(rho)
    _require_full_rank(rho)
    cr, w = _c_in_rho_basis(h, rho)
    wi, wj = w[:, None], w[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        weight = (np.log(wi) - np.log(wj)) / (wi - wj)
    close = np.abs(wi - wj) <= 1e-12 * np.maximum(wi, wj)
    weight = np.where(close, 1.0 / np.maximum(wi, wj), weight)
    return float(np.sum(np.abs(cr) ** 2 * weight))


def _observable_sigma(o, rho: DensityMatrix) -> float:
    return subgaussian_norm(induced_distribution(o, rho, center=True)).sigma


def qfri_speed_bound(o, h, rho) -> float:
    """sigma * sqrt(Tr(C rho^{-1} C)); needs rho full rank."""
    o, rho = as_hermitian(o), as_density(rho)
    check_same_dim(o, rho)
    q = fisher_term(h, rho)
    return _observable_sigma(o, rho) * math.sqrt(max(q, 0.0))


def _std(x, rho: DensityMatrix) -> float:
    # centered second moment avoids cancellation in E[X^2] - E[X]^2
    m = x.matrix
    first = float(np.einsum("ij,ji->", rho.matrix, m).real)
    mc = m - first * np.eye(m.shape[0])
    return math.sqrt(max(float(np.einsum("ij,ji->", rho.matrix, mc @ mc).real), 0.0))


def mandelstam_tamm_bound(o, h, rho) -> float:
    """2 ΔO ΔH with standard deviations taken in rho."""
    o, h, rho = as_hermitian(o), as_hermitian(h), as_density(rho)
    check_same_dim(o, h, rho)
    return 2.0 * _std(o, rho) * _std(h, rho)


def relative_entropy_second_order(h, rho, dt: float) -> float:
    """(dt^2/2) Tr(C rho^{-1} C)."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    return 0.5 * dt * dt * fisher_term(h, rho)


def relative_entropy_second_order_kubo_mori(h, rho, dt: float) -> float:
    """(dt^2/2) times the Kubo-Mori quadratic form of C: the exact leading term."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    return 0.5 * dt * dt * kubo_mori_term(h, rho)


def unitary_evolve(rho, h, dt: float) -> DensityMatrix:
    """e^{-iH dt} rho e^{iH dt}, exact through the spectral decomposition of H."""
    rho, h = as_density(rho), as_hermitian(h)
    check_same_dim(rho, h)
    sd = h.spectrum
    u = (sd.eigenvectors * np.exp(-1j * sd.eigenvalues * dt)) @ sd.eigenvectors.conj().T
    out = u @ rho.matrix @ u.conj().T
    return DensityMatrix._trusted(0.5 * (out + out.conj().T))


@dataclass(frozen=True)
class EvolutionStep:
    hamiltonian: HermitianOperator
    state: DensityMatrix
    dt: float

    def evolve(self) -> DensityMatrix:
        return unitary_evolve(self.state, self.hamiltonian, self.dt)


def second_order_table(h, rho, dts) -> list[dict]:
    """Exact S(rho_{t+dt}||rho_t) against both quadratic approximations."""
    rho = as_density(rho)
    rows = []
    for dt in dts:
        exact = relative_entropy(unitary_evolve(rho, h, dt), rho)
        approx = relative_entropy_second_order(h, rho, dt)
        km = relative_entropy_second_order_kubo_mori(h, rho, dt)
        rows.append({
            "dt": float(dt),
            "exact": exact,
            "second_order": approx,
            "abs_error": abs(exact - approx),
            "kubo_mori": km,
            "kubo_mori_abs_error": abs(exact - km),
        })
    return rows


def convergence_order(dts, errors) -> float:
    """Slope of the least-squares line through (log dt, log error)."""
    dts, errors = np.asarray(dts, float), np.asarray(errors, float)
    return float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
