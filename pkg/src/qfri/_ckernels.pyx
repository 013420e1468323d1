# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twin of ``_pykernels``; same signatures, same search strategy."""

from libc.math cimport exp, expm1, log, log1p, log10, pow, sqrt, fabs, isfinite, INFINITY

import numpy as np

BACKEND = "cython"

cdef double INVPHI = (sqrt(5.0) - 1.0) / 2.0
cdef double SMALL_Z = 0.5

STATUS_OK = 0
STATUS_BOUNDARY = 1
STATUS_STALLED = 2

# objective selectors for the shared golden-section loop
cdef enum:
    RATIO = 0
    QFRI = 1


cdef double _cgf(const double[::1] x, const double[::1] p, double t) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double z, zmax = -INFINITY, zmin = INFINITY, acc = 0.0
    if t == 0.0:
        return 0.0
    for i in range(n):
        z = t * x[i]
        if z > zmax:
            zmax = z
        if z < zmin:
            zmin = z
    if zmax <= SMALL_Z and -zmin <= SMALL_Z:
        for i in range(n):
            acc += p[i] * expm1(t * x[i])
        return log1p(acc)
    for i in range(n):
        acc += p[i] * exp(t * x[i] - zmax)
    return zmax + log(acc)


cdef inline double _objective(int kind, const double[::1] x, const double[::1] p,
                              double u, double sign, double rel_ent) noexcept nogil:
    if kind == RATIO:
        return 2.0 * _cgf(x, p, sign * u) / (u * u)
    return (_cgf(x, p, sign * u) + rel_ent) / u


cdef int _golden(int kind, const double[::1] x, const double[::1] p, double sign,
                 double rel_ent, double a, double b, double tol, int maximize,
                 int maxiter, double* xout, double* fout) noexcept nogil:
    cdef double sgn = -1.0 if maximize else 1.0
    cdef double c = b - INVPHI * (b - a)
    cdef double d = a + INVPHI * (b - a)
    cdef double fc = sgn * _objective(kind, x, p, c, sign, rel_ent)
    cdef double fd = sgn * _objective(kind, x, p, d, sign, rel_ent)
    cdef int it = 0
    while (b - a) > tol * 0.5 * (fabs(a) + fabs(b)) and it < maxiter:
        if fc < fd:
            b = d
            d = c
            fd = fc
            c = b - INVPHI * (b - a)
            fc = sgn * _objective(kind, x, p, c, sign, rel_ent)
        else:
            a = c
            c = d
            fc = fd
            d = a + INVPHI * (b - a)
            fd = sgn * _objective(kind, x, p, d, sign, rel_ent)
        it += 1
    if fc < fd:
        xout[0] = c
        fout[0] = sgn * fc
    else:
        xout[0] = d
        fout[0] = sgn * fd
    return it < maxiter


cdef inline double _grid_point(double lmin, double lmax, int k, int npts) noexcept nogil:
    if npts == 1:
        return pow(10.0, lmin)
    return pow(10.0, lmin + (lmax - lmin) * k / (npts - 1))


def cgf(x, p, double t):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    return _cgf(xv, pv, t)


def cgf_many(x, p, ts):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(np.atleast_1d(ts), dtype=np.float64)
    out = np.empty(tv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(tv.shape[0]):
        ov[i] = _cgf(xv, pv, tv[i])
    return out


def sup_cgf_ratio(x, p, double tmin, double tmax, int npts, double tol):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t i, n = xv.shape[0]
    cdef double var = 0.0
    cdef double lmin = log10(tmin), lmax = log10(tmax)
    cdef double t, g, gbest = -INFINITY, sign = 1.0, lo, hi, u, gref, targ
    cdef int k, kbest = 0, ok, status
    for i in range(n):
        var += pv[i] * xv[i] * xv[i]
    # positive sign first so ties resolve as in the numpy twin
    for k in range(npts):
        t = _grid_point(lmin, lmax, k, npts)
        g = 2.0 * _cgf(xv, pv, t) / (t * t)
        if g > gbest:
            gbest, kbest, sign = g, k, 1.0
    cdef double gneg = -INFINITY
    cdef int kneg = 0
    for k in range(npts):
        t = _grid_point(lmin, lmax, k, npts)
        g = 2.0 * _cgf(xv, pv, -t) / (t * t)
        if g > gneg:
            gneg, kneg = g, k
    if gneg > gbest:
        gbest, kbest, sign = gneg, kneg, -1.0
    status = STATUS_BOUNDARY if kbest == npts - 1 else STATUS_OK
    if kbest > 0:
        lo = _grid_point(lmin, lmax, kbest - 1, npts)
    else:
        lo = _grid_point(lmin, lmax, 0, npts) / (_grid_point(lmin, lmax, 1, npts) / _grid_point(lmin, lmax, 0, npts))
    hi = _grid_point(lmin, lmax, kbest + 1 if kbest < npts - 1 else kbest, npts)
    ok = _golden(RATIO, xv, pv, sign, 0.0, lo, hi, tol, 1, 200, &u, &gref)
    if not ok and status == STATUS_OK:
        status = STATUS_STALLED
    targ = sign * _grid_point(lmin, lmax, kbest, npts)
    if gref > gbest:
        gbest = gref
        targ = sign * u
    if var >= gbest:
        return var, 0.0, status
    return gbest, targ, status


def min_qfri_objective(x, p, double rel_ent, double xi, double smin, double smax,
                       int npts, double tol):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef double lmin = log10(smin), lmax = log10(smax)
    cdef double s, f, fbest = INFINITY, lo, hi, sref, fref, sarg
    cdef int k, kbest = 0, ok
    for k in range(npts):
        s = _grid_point(lmin, lmax, k, npts)
        f = (_cgf(xv, pv, xi * s) + rel_ent) / s
        if not isfinite(f):
            f = INFINITY
        if f < fbest:
            fbest, kbest = f, k
    if kbest > 0:
        lo = _grid_point(lmin, lmax, kbest - 1, npts)
    else:
        lo = _grid_point(lmin, lmax, 0, npts) / (_grid_point(lmin, lmax, 1, npts) / _grid_point(lmin, lmax, 0, npts))
    hi = _grid_point(lmin, lmax, kbest + 1 if kbest < npts - 1 else kbest, npts)
    ok = _golden(QFRI, xv, pv, xi, rel_ent, lo, hi, tol, 0, 200, &sref, &fref)
    sarg = _grid_point(lmin, lmax, kbest, npts)
    if fref < fbest:
        fbest, sarg = fref, sref
    return fbest, sarg, STATUS_OK if ok else STATUS_STALLED
