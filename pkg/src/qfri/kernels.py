"""Backend selection for the scalar kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``QFRI_PURE_PYTHON`` is set to a non-empty value, the
numpy implementation is loaded instead. Both expose the same functions.
"""

import os

if os.environ.get("QFRI_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND
cgf = _impl.cgf
cgf_many = _impl.cgf_many
sup_cgf_ratio = _impl.sup_cgf_ratio
min_qfri_objective = _impl.min_qfri_objective

STATUS_OK = 0
STATUS_BOUNDARY = 1
STATUS_STALLED = 2

__all__ = ["BACKEND", "cgf", "cgf_many", "sup_cgf_ratio", "min_qfri_objective"]
