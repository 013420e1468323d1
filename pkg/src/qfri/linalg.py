"""Validated Hermitian matrix algebra.

Everything here works on dense complex matrices through their spectral
decomposition: matrix functions, tensor powers, random test ensembles and the
two trace inequalities (Klein, Golden-Thompson) exposed as gap functions so
they can be checked numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Union

import numpy as np
from scipy.special import logsumexp

from .errors import (
    CapExceeded,
    DimensionMismatch,
    DomainError,
    ExpOverflow,
    InvalidRank,
    NotHermitian,
    NumericalFailure,
)

HERMITIAN_RTOL = 1e-10
LOG_CLIP = 1e-12
NEG_EIG_TOL = 1e-10
EXP_GUARD = 700.0
DEFAULT_CAP = 4096

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, None]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues with eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values=None) -> np.ndarray:
        """V diag(values) V^dagger, defaulting to the eigenvalues themselves."""
        w = self.eigenvalues if values is None else np.asarray(values)
        v = self.eigenvectors
        return (v * w) @ v.conj().T


def _as_square(matrix) -> np.ndarray:
    m = np.array(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


class HermitianOperator:
    """Immutable complex Hermitian matrix with a lazily computed spectrum.

    Inputs whose Hermiticity residual ``max|H_ij - conj(H_ji)|`` is at most
    ``1e-10 * max(1, max|H_ij|)`` are symmetrized; anything worse is rejected.
    """

    def __init__(self, matrix):
        m = _as_square(matrix)
        residual = float(np.max(np.abs(m - m.conj().T)))
        scale = max(1.0, float(np.max(np.abs(m))))
        if residual > HERMITIAN_RTOL * scale:
            raise NotHermitian(f"hermiticity residual {residual:.3e} exceeds tolerance")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        self._matrix = m
        self.hermiticity_residual = residual

    @classmethod
    def _trusted(cls, matrix: np.ndarray):
        # skips validation; caller guarantees an exactly Hermitian complex array
        obj = cls.__new__(cls)
        m = np.asarray(matrix, dtype=np.complex128)
        m.setflags(write=False)
        obj._matrix = m
        obj.hermiticity_residual = 0.0
        return obj

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return spectral_decompose(self)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._matrix
        return self._matrix.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


def as_hermitian(h) -> HermitianOperator:
    if isinstance(h, HermitianOperator):
        return h
    return HermitianOperator(h)


def check_same_dim(*ops):
    dims = {op.dim for op in ops}
    if len(dims) != 1:
        raise DimensionMismatch(f"operands have dimensions {sorted(dims)}")


def spectral_decompose(h) -> SpectralDecomposition:
    """Eigendecomposition ``h = V diag(w) V^dagger`` with ``w`` ascending."""
    if isinstance(h, HermitianOperator):
        m = h.matrix
    else:
        m = as_hermitian(h).matrix
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def _exp_guard(w: np.ndarray):
    if w.size and w[-1] > EXP_GUARD:
        raise ExpOverflow(f"eigenvalue {w[-1]:.3g} exceeds exp guard {EXP_GUARD}")


def log_on_support_values(w: np.ndarray) -> np.ndarray:
    """Elementwise ln on eigenvalues >= LOG_CLIP, 0 elsewhere."""
    if w.size and w[0] < -NEG_EIG_TOL:
        raise DomainError(f"log of matrix with negative eigenvalue {w[0]:.3e}")
    out = np.zeros_like(w)
    keep = w >= LOG_CLIP
    out[keep] = np.log(w[keep])
    return out


def matrix_function(h, f: str) -> HermitianOperator:
    """Apply ``exp`` or ``log_on_support`` through the spectral decomposition.

    ``log_on_support`` treats eigenvalues below 1e-12 as exact zeros and maps
    them to 0, i.e. the logarithm lives on the support only.
    """
    h = as_hermitian(h)
    sd = h.spectrum
    if f == "exp":
        _exp_guard(sd.eigenvalues)
        values = np.exp(sd.eigenvalues)
    elif f == "log_on_support":
        values = log_on_support_values(sd.eigenvalues)
    else:
        raise DomainError(f"unknown matrix function {f!r}")
    out = sd.reconstruct(values)
    return HermitianOperator._trusted(0.5 * (out + out.conj().T))


def trace_product(a, b) -> float:
    """Re Tr(AB); the imaginary part must vanish for Hermitian inputs."""
    a, b = as_hermitian(a), as_hermitian(b)
    check_same_dim(a, b)
    tr = complex(np.einsum("ij,ji->", a.matrix, b.matrix))
    if abs(tr.imag) > 1e-9 * max(1.0, abs(tr.real)):
        raise NumericalFailure(f"Tr(AB) has imaginary part {tr.imag:.3e}")
    return tr.real


def kron_power(h, n: int, cap: int = DEFAULT_CAP):
    """n-fold tensor power ``h ⊗ ... ⊗ h``; result keeps the input's type."""
    h = as_hermitian(h)
    if n < 1:
        raise DomainError("kron_power needs n >= 1")
    required = h.dim ** n
    if required > cap:
        raise CapExceeded(required, cap)
    if n == 1:
        return h
    m = reduce(np.kron, [h.matrix] * n)
    return type(h)._trusted(m)


def klein_gap(a, b) -> float:
    """Tr e^B - Tr e^A - Tr(e^A (B - A)), nonnegative by Klein's inequality."""
    a, b = as_hermitian(a), as_hermitian(b)
    check_same_dim(a, b)
    sa, sb = a.spectrum, b.spectrum
    _exp_guard(sa.eigenvalues)
    _exp_guard(sb.eigenvalues)
    exp_a = sa.reconstruct(np.exp(sa.eigenvalues))
    tr_eb = float(np.sum(np.exp(sb.eigenvalues)))
    tr_ea = float(np.sum(np.exp(sa.eigenvalues)))
    cross = np.einsum("ij,ji->", exp_a, b.matrix - a.matrix).real
    return tr_eb - tr_ea - float(cross)


def golden_thompson_gap(a, b) -> float:
    """Tr(e^A e^B) - Tr(e^{A+B}), nonnegative by Golden-Thompson."""
    a, b = as_hermitian(a), as_hermitian(b)
    check_same_dim(a, b)
    sa, sb = a.spectrum, b.spectrum
    _exp_guard(sa.eigenvalues)
    _exp_guard(sb.eigenvalues)
    w_sum = np.linalg.eigvalsh(a.matrix + b.matrix)
    _exp_guard(w_sum)
    exp_a = sa.reconstruct(np.exp(sa.eigenvalues))
    exp_b = sb.reconstruct(np.exp(sb.eigenvalues))
    lhs = np.einsum("ij,ji->", exp_a, exp_b).real
    return float(lhs) - float(np.sum(np.exp(w_sum)))


def trace_inequality_scale(a, b) -> float:
    """max(1, Tr e^A, Tr e^B): the tolerance scale for the gap contracts."""
    a, b = as_hermitian(a), as_hermitian(b)
    return max(1.0, float(np.exp(logsumexp(a.eigenvalues))), float(np.exp(logsumexp(b.eigenvalues))))


def log_trace_exp(h) -> float:
    """ln Tr e^H computed without overflow."""
    return float(logsumexp(as_hermitian(h).eigenvalues))


# -- random ensembles -------------------------------------------------------

def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_hermitian(dim: int, seed: SeedLike = None) -> HermitianOperator:
    """GUE-style draw: (G + G^dagger)/2 with G complex Gaussian."""
    if dim < 1:
        raise DomainError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    g = _ginibre(rng, dim, dim)
    return HermitianOperator._trusted(0.5 * (g + g.conj().T))


def random_unitary(dim: int, seed: SeedLike = None) -> np.ndarray:
    """Haar unitary from the QR decomposition of a Ginibre matrix."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(dim: int, seed: SeedLike = None, rank: int | None = None):
    """Ginibre state G G^dagger / Tr(G G^dagger); full rank unless ``rank`` given."""
    from .states import DensityMatrix

    if dim < 1:
        raise DomainError("dim must be >= 1")
    if rank is None:
        rank = dim
    if not 1 <= rank <= dim:
        raise InvalidRank(f"rank {rank} not in [1, {dim}]")
    rng = np.random.default_rng(seed)
    g = _ginibre(rng, dim, rank)
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return DensityMatrix._trusted(0.5 * (rho + rho.conj().T))


def random_two_outcome_povm(dim: int, seed: SeedLike = None):
    """Random effect pair: a GUE matrix affinely rescaled into [lo, hi] ⊆ [0, 1].

    The endpoints lo < hi are drawn uniformly so that the effect is generically
    not a projector.
    """
    from .hypothesis_testing import Povm

    rng = np.random.default_rng(seed)
    h = random_hermitian(dim, rng)
    w, v = np.linalg.eigh(h.matrix)
    lo, hi = np.sort(rng.uniform(0.0, 1.0, size=2))
    span = w[-1] - w[0]
    if span > 0:
        mapped = lo + (hi - lo) * (w - w[0]) / span
    else:
        mapped = np.full_like(w, 0.5 * (lo + hi))
    m1 = (v * mapped) @ v.conj().T
    return Povm.from_effect(0.5 * (m1 + m1.conj().T))


def random_projective_povm(dim: int, seed: SeedLike = None, rank: int | None = None):
    """Two-outcome projective measurement with M1 a random rank-``rank`` projector."""
    from .hypothesis_testing import Povm

    rng = np.random.default_rng(seed)
    if rank is None:
        rank = int(rng.integers(0, dim + 1))
    if not 0 <= rank <= dim:
        raise InvalidRank(f"rank {rank} not in [0, {dim}]")
    u = random_unitary(dim, rng)[:, :rank]
    m1 = u @ u.conj().T
    return Povm.from_effect(0.5 * (m1 + m1.conj().T))
