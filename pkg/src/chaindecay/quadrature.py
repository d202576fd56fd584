"""Panel-wise composite Gauss-Legendre quadrature of oscillatory band integrals.

Evaluates ``I(t) = int F(theta) exp(-i eps(theta) t) d theta`` for many times
at once, with ``eps(theta) = 2 + 2 cos(theta)`` the band energy. Each panel
is split into equal subintervals carrying a 32-point Gauss-Legendre rule.
The subdivision starts from the phase the fastest time accumulates across
the panel and is doubled until results for ``n`` and ``2n`` subintervals
agree to the panel tolerance at a set of probe times of the block (the
largest times, where the oscillation is hardest to resolve, among them).
"""
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import QuadratureError

ORDER = 32
NODES, WEIGHTS = leggauss(ORDER)

_CHUNK_ELEMENTS = 1 << 18
_ANCHOR = 32
# phase advance one 32-point subinterval resolves to near machine precision
_PHASE_PER_SUB = 40.0
_N_PROBES = 8


def band_energy(theta):
    return 2.0 + 2.0 * np.cos(theta)


def _is_uniform(t):
    if t.size < 3:
        return False
    h = (t[-1] - t[0]) / (t.size - 1)
    if h <= 0:
        return False
    dev = np.max(np.abs(t - (t[0] + h * np.arange(t.size))))
    return dev <= 1e-12 * max(1.0, abs(t[-1]))


def phase_sums(times, energies, weights):
    """``sum_j weights[j, :] exp(-i energies[j] t)`` for every time.

    Parameters
    ----------
    times : (m,) ndarray
    energies : (n,) ndarray
    weights : (n,) or (n, k) ndarray

    Returns
    -------
    (m,) or (m, k) complex ndarray
    """
    times = np.asarray(times, dtype=float)
    energies = np.asarray(energies, dtype=float)
    w = np.asarray(weights)
    squeeze = w.ndim == 1
    if squeeze:
        w = w[:, None]
    out = np.empty((times.size, w.shape[1]), dtype=complex)
    rows = max(_ANCHOR, (_CHUNK_ELEMENTS // max(energies.size, 1)) // _ANCHOR * _ANCHOR)
    for start in range(0, times.size, rows):
        t = times[start:start + rows]
        if _is_uniform(t):
            h = (t[-1] - t[0]) / (t.size - 1)
            mat = np.empty((t.size, energies.size), dtype=complex)
            step = np.exp(-1j * h * energies)
            for a in range(0, t.size, _ANCHOR):
                b = min(a + _ANCHOR, t.size)
                mat[a] = np.exp(-1j * (t[0] + a * h) * energies)
                mat[a + 1:b] = step
                np.cumprod(mat[a:b], axis=0, out=mat[a:b])
        else:
            mat = np.exp(-1j * np.multiply.outer(t, energies))
        out[start:start + t.size] = mat @ w
    return out[:, 0] if squeeze else out


def _subdivision_nodes(a, b, n):
    edges = np.linspace(a, b, n + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    centre = 0.5 * (edges[1:] + edges[:-1])
    theta = (centre[:, None] + half[:, None] * NODES[None, :]).ravel()
    weight = (half[:, None] * WEIGHTS[None, :]).ravel()
    return theta, weight


def _rule(density, a, b, n):
    theta, weight = _subdivision_nodes(a, b, n)
    return band_energy(theta), density(theta) * weight


def probe_times(times, count=_N_PROBES):
    """Evenly spread subset of sorted ``times`` that always contains both ends."""
    if times.size <= count:
        return times
    idx = np.unique(np.linspace(0, times.size - 1, count).round().astype(int))
    return times[idx]


def integrate_panel(density, a, b, times, tol, n_start, max_subintervals):
    """Integrate one panel for sorted ``times``; returns (values, error, n_used).

    The error is ``max |I_n - I_2n|`` over :func:`probe_times`.
    """
    n = max(1, int(n_start))
    probes = probe_times(times)
    energies, weights = _rule(density, a, b, n)
    coarse = phase_sums(probes, energies, weights)
    while True:
        if 2 * n > max_subintervals:
            raise QuadratureError(
                f"panel [{a:.6g}, {b:.6g}] did not reach {tol:g} within "
                f"{max_subintervals} subintervals",
                residual=math.inf, panel=(float(band_energy(b)), float(band_energy(a))))
        fine_e, fine_w = _rule(density, a, b, 2 * n)
        fine = phase_sums(probes, fine_e, fine_w)
        err = float(np.max(np.abs(fine - coarse))) if probes.size else 0.0
        if err <= tol:
            return phase_sums(times, energies, weights), err, n
        if 4 * n > max_subintervals:
            raise QuadratureError(
                f"panel [{a:.6g}, {b:.6g}] did not reach {tol:g} within "
                f"{max_subintervals} subintervals (residual {err:.3g})",
                residual=err, panel=(float(band_energy(b)), float(band_energy(a))))
        n *= 2
        energies, weights, coarse = fine_e, fine_w, fine


def _time_blocks(t_sorted, first=8.0):
    """Split sorted times into blocks [0, first], (first, 2 first], ..."""
    bounds = [0, ]
    edge = first
    i = 0
    while i < t_sorted.size:
        j = int(np.searchsorted(t_sorted, edge, side="right"))
        if j > i:
            bounds.append(j)
            i = j
        edge *= 2.0
    return list(zip(bounds[:-1], bounds[1:]))


def band_transform(density, breakpoints, times, tol=1e-8, max_subintervals=1 << 15,
                   sharpness=None):
    """Fourier transform of a band density, evaluated panel by panel.

    Parameters
    ----------
    density : callable
        ``F(theta)`` on ``[0, pi]``, Jacobian included.
    breakpoints : sequence of float
        Interior panel boundaries in ``theta``.
    times : array_like
        Non-negative times, any order.
    tol : float
        Absolute tolerance per panel.
    max_subintervals : int
        Budget per panel; exceeding it raises :class:`QuadratureError`.
    sharpness : callable, optional
        ``sharpness(a, b)`` returns a starting subdivision count for the
        panel, used to resolve narrow features of ``F``.

    Returns
    -------
    complex ndarray
        Same shape and order as ``times``.
    """
    t = np.asarray(times, dtype=float)
    flat = t.ravel()
    order = np.argsort(flat, kind="stable")
    ts = flat[order]
    edges = [0.0, *sorted(breakpoints), math.pi]
    panels = [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    result = np.zeros(ts.size, dtype=complex)
    for lo, hi in _time_blocks(ts):
        block = ts[lo:hi]
        tmax = float(block[-1])
        for a, b in panels:
            span = abs(band_energy(a) - band_energy(b))
            n0 = math.ceil(tmax * span / _PHASE_PER_SUB)
            if sharpness is not None:
                n0 = max(n0, sharpness(a, b))
            vals, _, _ = integrate_panel(density, a, b, block, tol, max(n0, 1), max_subintervals)
            result[lo:hi] += vals
    out = np.empty_like(result)
    out[order] = result
    return out.reshape(t.shape)
