"""Pure-Python/numpy implementation of the scalar hot loops.

Mirrors ``_ckernels.pyx`` function for function. The sup and inf searches
are a log-spaced grid followed by golden-section refinement inside the
bracket formed by the best grid point's neighbours.
"""

import math

import numpy as np

BACKEND = "python"

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
SMALL_Z = 0.5

STATUS_OK = 0
STATUS_BOUNDARY = 1
STATUS_STALLED = 2


def cgf_many(x, p, ts):
    """ln E[exp(t X)] for every t in ``ts`` (X given by atoms x, probs p)."""
    x = np.asarray(x, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    z = np.multiply.outer(ts, x)
    zmax = z.max(axis=1)
    zmin = z.min(axis=1)
    out = np.empty(ts.shape[0])
    small = np.maximum(zmax, -zmin) <= SMALL_Z
    if np.any(small):
        out[small] = np.log1p(np.expm1(z[small]) @ p)
    big = ~small
    if np.any(big):
        zb = z[big] - zmax[big, None]
        out[big] = zmax[big] + np.log(np.exp(zb) @ p)
    out[ts == 0.0] = 0.0
    return out


def cgf(x, p, t):
    return float(cgf_many(x, p, [t])[0])


def golden_section(f, a, b, tol, maximize=False, maxiter=200):
    """Golden-section search on [a, b] to relative width ``tol``.

    Returns (x, f(x), converged).
    """
    sgn = -1.0 if maximize else 1.0
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc = sgn * f(c)
    fd = sgn * f(d)
    it = 0
    while (b - a) > tol * 0.5 * (abs(a) + abs(b)) and it < maxiter:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = sgn * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = sgn * f(d)
        it += 1
    if fc < fd:
        return c, sgn * fc, it < maxiter
    return d, sgn * fd, it < maxiter


def _bracket(grid, k):
    n = grid.shape[0]
    ratio = grid[1] / grid[0] if n > 1 else 2.0
    lo = grid[k - 1] if k > 0 else grid[0] / ratio
    hi = grid[k + 1] if k < n - 1 else grid[k]
    return lo, hi


def sup_cgf_ratio(x, p, tmin, tmax, npts, tol):
    """sup over t != 0 of 2K(t)/t^2, including the t -> 0 limit (variance).

    ``x`` must be centered. Returns (value, argmax_t, status) with argmax_t = 0
    when the variance limit wins.
    """
    x = np.asarray(x, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    var = float(p @ (x * x))
    ts = np.logspace(math.log10(tmin), math.log10(tmax), npts)
    gpos = 2.0 * cgf_many(x, p, ts) / (ts * ts)
    gneg = 2.0 * cgf_many(x, p, -ts) / (ts * ts)
    kp, kn = int(np.argmax(gpos)), int(np.argmax(gneg))
    if gpos[kp] >= gneg[kn]:
        sign, k, gbest = 1.0, kp, float(gpos[kp])
    else:
        sign, k, gbest = -1.0, kn, float(gneg[kn])
    status = STATUS_BOUNDARY if k == npts - 1 else STATUS_OK
    lo, hi = _bracket(ts, k)

    def ratio(u):
        return 2.0 * cgf(x, p, sign * u) / (u * u)

    u, gref, ok = golden_section(ratio, lo, hi, tol, maximize=True)
    if not ok and status == STATUS_OK:
        status = STATUS_STALLED
    targ = sign * ts[k]
    if gref > gbest:
        gbest, targ = gref, sign * u
    if var >= gbest:
        return var, 0.0, status
    return gbest, float(targ), status


def min_qfri_objective(x, p, rel_ent, xi, smin, smax, npts, tol):
    """inf over s > 0 of (K(xi s) + rel_ent)/s for centered atoms ``x``.

    Returns (value, argmin_s, status).
    """
    x = np.asarray(x, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    ss = np.logspace(math.log10(smin), math.log10(smax), npts)
    f = (cgf_many(x, p, xi * ss) + rel_ent) / ss
    f[~np.isfinite(f)] = np.inf
    k = int(np.argmin(f))
    lo, hi = _bracket(ss, k)

    def obj(s):
        return (cgf(x, p, xi * s) + rel_ent) / s

    s, fref, ok = golden_section(obj, lo, hi, tol, maximize=False)
    best, sarg = float(f[k]), float(ss[k])
    if fref < best:
        best, sarg = fref, s
    return best, sarg, STATUS_OK if ok else STATUS_STALLED
