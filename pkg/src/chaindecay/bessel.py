"""Bessel functions of the first kind, integer order 0 and 1.

``j1`` uses Miller's downward recurrence normalised with the sum rule
``J0 + 2 (J2 + J4 + ...) = 1``; small arguments go through the power series.
Only what the uniform-chain survival amplitude ``J1(2t)/t`` needs is here.
"""
import math

import numpy as np

_SERIES_CUTOFF = 1.0
_RESCALE = 1e200


def j1_series(z, terms=60):
    """Power series ``sum (-1)^m (z/2)^(2m+1) / (m! (m+1)!)``.

    Accurate to double precision for ``|z|`` up to roughly 10.
    """
    z = np.asarray(z, dtype=float)
    half = z / 2.0
    term = half.copy()
    total = term.copy()
    h2 = half * half
    for m in range(1, terms):
        term = -term * h2 / (m * (m + 1))
        total = total + term
    return total[()]


def _start_order(zmax):
    n = int(zmax + 10.0 * zmax ** (1.0 / 3.0) + 30)
    return n + (n % 2)


def _miller(z):
    """Return (J0, J1) for positive ``z`` by downward recurrence."""
    n_start = _start_order(float(z.max()))
    j_up = np.zeros_like(z)             # J_{k+1}
    j_k = np.full_like(z, 1e-30)        # J_k, arbitrary scale
    norm = np.zeros_like(z)
    j1 = np.zeros_like(z)
    if n_start % 2 == 0:
        norm += 2.0 * j_k
    for k in range(n_start, 0, -1):
        j_down = (2.0 * k / z) * j_k - j_up   # J_{k-1}
        j_up, j_k = j_k, j_down
        order = k - 1
        if order == 1:
            j1 = j_k.copy()
        elif order > 0 and order % 2 == 0:
            norm += 2.0 * j_k
        big = np.abs(j_k) > _RESCALE
        if np.any(big):
            s = np.where(big, 1.0 / _RESCALE, 1.0)
            j_k *= s
            j_up *= s
            norm *= s
            j1 *= s
    norm += j_k    # J0
    return j_k / norm, j1 / norm


def j1(z):
    """Bessel function J1 for real arguments.

    Parameters
    ----------
    z : float or array_like

    Returns
    -------
    float or ndarray
    """
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    out = np.empty_like(a)
    small = a < _SERIES_CUTOFF
    if np.any(small):
        out[small] = j1_series(a[small])
    if np.any(~small):
        out[~small] = _miller(a[~small])[1]
    return (np.sign(z) * out)[()]


def j0(z):
    """Bessel function J0 for real arguments (downward recurrence)."""
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    out = np.ones_like(a)
    pos = a > 0
    if np.any(pos):
        out[pos] = _miller(a[pos])[0]
    return out[()]


def j1_over_z(z):
    """``J1(z) / z`` with its limit 1/2 at ``z = 0``."""
    z = np.asarray(z, dtype=float)
    out = np.full_like(z, 0.5)
    nz = z != 0
    out[nz] = j1(z[nz]) / z[nz]
    return out[()]


def first_zero_j1(tol=1e-14):
    """First positive zero of J1 (about 3.8317) by bisection on the series."""
    lo, hi = 3.0, 4.5
    flo = float(j1_series(lo))
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        fm = float(j1_series(mid))
        if math.copysign(1.0, fm) == math.copysign(1.0, flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
