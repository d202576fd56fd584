"""Survival amplitude of site 1 by three independent routes.

* ``spectral``: Fourier transform of the LDOS plus bound states.
* ``diagonalization``: eigen-decomposition of a long finite chain.
* ``bessel``: the closed form ``exp(-2it) J1(2t)/t`` of the uniform chain.

All amplitudes carry the absolute phase ``exp(-i eps t)``; no frame
rotating with the band center is used.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .bessel import j1_over_z
from .errors import PreconditionError
from .lattice import BAND_CENTER, bound_states, band_breakpoints, ldos
from .quadrature import band_energy, band_transform, phase_sums
from .resonance import find_resonance, resonance_regime, t_R_estimate

SPECTRAL = "spectral"
DIAGONALIZATION = "diagonalization"
BESSEL = "bessel"
METHODS = (SPECTRAL, DIAGONALIZATION, BESSEL)

# shortest period of the survival probability: beating between the band edges
EDGE_PERIOD = 2 * math.pi / 4.0
FINE_STEP = EDGE_PERIOD / 40


@dataclass(frozen=True)
class SurvivalTrace:
    times: np.ndarray
    amplitude: np.ndarray
    method: str

    @property
    def probability(self):
        return np.abs(self.amplitude) ** 2


def _as_times(times):
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.ndim != 1:
        raise PreconditionError("times must be one-dimensional")
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise PreconditionError("times must be finite and non-negative")
    return t


def fine_grid(t_max, t_min=0.0, step=FINE_STEP):
    """Uniform grid resolving the fastest oscillation of P(t) with 40 points."""
    n = max(2, int(math.ceil((t_max - t_min) / step)) + 1)
    return np.linspace(t_min, t_max, n)


def _sharpness(model):
    if not resonance_regime(model):
        return None
    pole = find_resonance(model)

    def count(a, b):
        e_hi, e_lo = band_energy(a), band_energy(b)
        dist = max(pole.gamma0_amp, e_lo - pole.eps_r, pole.eps_r - e_hi)
        return math.ceil(2.0 * (e_hi - e_lo) / dist)

    return count


def evolve_spectral(model, times, quadrature_budget=1 << 15, tol=1e-8):
    """Survival amplitude from the spectral representation.

    ``c(t) = int_0^4 N1(eps) exp(-i eps t) d eps + sum_b w_b exp(-i eps_b t)``

    The band integral is taken in the angle variable ``eps = 2 + 2 cos(theta)``
    and split into panels at ``eps_r`` and ``eps_r +/- 10 Gamma0`` when a
    resonance exists, so the Lorentzian peak is resolved independently of the
    smooth background.

    Parameters
    ----------
    model : ChainModel
    times : array_like
        Non-negative times.
    quadrature_budget : int
        Maximum number of subintervals per panel.
    tol : float
        Absolute error tolerance per panel.

    Raises
    ------
    QuadratureError
        If a panel does not converge within ``quadrature_budget``.
    """
    t = _as_times(times)
    amp = np.zeros(t.size, dtype=complex)
    if model.delta > 0:
        def density(theta):
            e = np.clip(band_energy(theta), 0.0, 4.0)
            return ldos(model, e) * 2.0 * np.sin(theta)

        breaks = [float(np.arccos(np.clip((e - BAND_CENTER) / 2.0, -1.0, 1.0)))
                  for e in band_breakpoints(model)]
        amp += band_transform(density, breaks, t, tol=tol,
                              max_subintervals=quadrature_budget,
                              sharpness=_sharpness(model))
    states = bound_states(model)
    if states:
        e_b = np.array([e for e, _ in states])
        w_b = np.array([w for _, w in states])
        amp += phase_sums(t, e_b, w_b)
    return SurvivalTrace(t, amp, SPECTRAL)


def min_sites(times):
    """Chain length below which reflections from the far end reach site 1."""
    return int(math.ceil(2.0 * float(np.max(times)) + 100))


def chain_spectrum(model, n_sites, chunk=1000):
    """Eigenvalues and site-1 weights of the truncated chain.

    Returns
    -------
    energies, weights : ndarray
        ``weights[k] = |<k|1>|**2``.
    """
    diag = np.full(n_sites, BAND_CENTER)
    diag[0] = model.eps0
    off = np.ones(n_sites - 1)
    off[0] = model.delta
    energies = np.empty(n_sites)
    weights = np.empty(n_sites)
    for lo in range(0, n_sites, chunk):
        hi = min(lo + chunk, n_sites) - 1
        w, v = eigh_tridiagonal(diag, off, select="i", select_range=(lo, hi))
        energies[lo:hi + 1] = w
        weights[lo:hi + 1] = v[0] ** 2
    return energies, weights


def evolve_diagonalization(model, times, n_sites=None):
    """Survival amplitude from exact diagonalization of an ``n_sites`` chain.

    Site 1 has energy ``eps0`` and hopping ``delta`` to site 2, the rest of
    the chain is uniform. ``n_sites`` defaults to the smallest length that
    keeps the far-end reflection out of the time window.

    Raises
    ------
    PreconditionError
        If ``n_sites`` is below ``2 max(times) + 100``.
    """
    t = _as_times(times)
    need = min_sites(t)
    if n_sites is None:
        n_sites = need
    if n_sites < need:
        raise PreconditionError(
            f"n_sites={n_sites} lets reflections reach site 1; need at least {need}")
    energies, weights = chain_spectrum(model, n_sites)
    return SurvivalTrace(t, phase_sums(t, energies, weights), DIAGONALIZATION)


def evolve_bessel(times):
    """Uniform chain (``delta = 1``, ``eps0 = 2``): ``c(t) = exp(-2it) J1(2t)/t``."""
    t = _as_times(times)
    amp = np.exp(-1j * BAND_CENTER * t) * 2.0 * j1_over_z(2.0 * t)
    return SurvivalTrace(t, amp, BESSEL)


def evolve(model, times, method=SPECTRAL, **kwargs):
    """Dispatch to one of the three evolution routes by name."""
    if method == SPECTRAL:
        return evolve_spectral(model, times, **kwargs)
    if method == DIAGONALIZATION:
        return evolve_diagonalization(model, times, **kwargs)
    if method == BESSEL:
        if not (model.delta == 1.0 and model.eps0 == BAND_CENTER):
            raise PreconditionError("the Bessel closed form needs delta = 1 and eps0 = 2")
        return evolve_bessel(times)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def modulation_contrast(times, probability, start=None):
    """``(max - min) / (max + min)`` of ``P t**3`` for ``t >= start``.

    ``start`` defaults to ``t_end / 10``, the last decade of ``times``.
    """
    t = np.asarray(times, dtype=float)
    p = np.asarray(probability, dtype=float)
    if start is None:
        start = t[-1] / 10.0
    window = t >= start
    if np.count_nonzero(window) < 2 or t[-1] <= 0:
        raise PreconditionError("trace too short for the requested window")
    y = p[window] * t[window] ** 3
    hi, lo = float(y.max()), float(y.min())
    if hi + lo == 0:
        return 0.0
    return (hi - lo) / (hi + lo)


def long_time_modulation(model, trace, start=None):
    """Contrast of the long-time oscillation of ``P(t) t**3``.

    Close to one when the band-edge contributions interfere completely
    (``eps0 = 2``), smaller when the site energy is off center. The default
    window is the last decade of the trace; for a trace ending at ``10 t_R``
    it still contains the tail of the pole term, so ``start = 3 t_R``
    isolates the band-edge beating.

    Raises
    ------
    PreconditionError
        If the model has bound states or the trace ends before ``10 t_R``.
    """
    if bound_states(model):
        raise PreconditionError("long-time modulation needs a model without bound states")
    t = np.asarray(trace.times)
    if resonance_regime(model):
        t_r = t_R_estimate(model)
        if t[-1] < 10.0 * t_r:
            raise PreconditionError(
                f"trace ends at t={t[-1]:.6g}, needs at least 10 t_R = {10 * t_r:.6g}")
    return modulation_contrast(t, trace.probability, start)
