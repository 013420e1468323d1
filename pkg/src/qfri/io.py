"""JSON file formats.

Matrix: ``{"dim": d, "rows": [[[re, im], ...], ...]}`` with row-major complex
entries (a bare number is accepted for a real entry).
Distribution: ``{"values": [...], "probs": [...]}``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, DomainError
from .subgaussian import DiscreteDistribution


def _entry(x) -> complex:
    if isinstance(x, (int, float)):
        re, im = float(x), 0.0
    elif isinstance(x, (list, tuple)) and len(x) == 2:
        re, im = float(x[0]), float(x[1])
    else:
        raise DomainError(f"matrix entry {x!r} is neither a number nor [re, im]")
    if not (math.isfinite(re) and math.isfinite(im)):
        raise DomainError("matrix entry is not finite")
    return complex(re, im)


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        rows = obj["rows"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed matrix object: {exc}") from exc
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise DimensionMismatch(f"matrix is not {dim}x{dim}")
    return np.array([[_entry(x) for x in r] for r in rows], dtype=np.complex128)


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"not a square matrix: shape {m.shape}")
    return {
        "dim": int(m.shape[0]),
        "rows": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def write_matrix(path, m) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(m)))


def distribution_from_json(obj: dict) -> DiscreteDistribution:
    try:
        return DiscreteDistribution(obj["values"], obj["probs"])
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed distribution object: {exc}") from exc


def read_distribution(path) -> DiscreteDistribution:
    with open(path) as fh:
        return distribution_from_json(json.load(fh))


def write_distribution(path, d: DiscreteDistribution) -> None:
    Path(path).write_text(json.dumps({"values": d.values.tolist(), "probs": d.probs.tolist()}))
