"""Pole plus return-amplitude split of the survival amplitude.

``c(t) = a exp(-i eps_p t) + R(t)`` where the first term comes from the
resonance pole and ``R`` is the band (branch-cut) remainder. The dip of
``P(t)`` at the crossover of the two terms and the end of the short-time
quadratic regime are located here numerically and set against their
closed-form estimates.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize

from .errors import RegimeError
from .evolution import FINE_STEP, EDGE_PERIOD, evolve_spectral
from .resonance import (BATH, DIP_ALPHA, DIP_BETA, SITE, find_resonance, t_R_estimate,
                        t_S_estimate)

ANALYSIS_TOL = 1e-11
# crossover deviating from the closed form by more than this is flagged
REGIME_DEVIATION = 0.5


def wrap_phase(x):
    """Map angles into ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    return (np.pi - np.mod(np.pi - x, 2 * np.pi))[()]


@dataclass(frozen=True)
class Decomposition:
    times: np.ndarray
    amplitude: np.ndarray
    pole_term: np.ndarray
    return_term: np.ndarray
    phase_diff: np.ndarray

    @property
    def probability(self):
        return np.abs(self.amplitude) ** 2


@dataclass(frozen=True)
class CharacteristicTimes:
    t_R_formula: float
    t_R_numeric: float
    t_S_formula_site: float
    t_S_formula_bath: float
    t_S_numeric: float
    alpha: float = DIP_ALPHA
    beta: float = DIP_BETA

    @property
    def t_R_in_regime(self):
        return abs(self.t_R_numeric - self.t_R_formula) <= REGIME_DEVIATION * self.t_R_formula

    @property
    def t_S_reading(self):
        """Which closed-form reading of ``t_S`` the numeric value is closer to (log scale)."""
        site = abs(math.log(self.t_S_numeric / self.t_S_formula_site))
        bath = abs(math.log(self.t_S_numeric / self.t_S_formula_bath))
        return SITE if site < bath else BATH


def decompose(model, times, tol=ANALYSIS_TOL, pole=None):
    """Split ``c(t)`` into the pole term and the return amplitude.

    Parameters
    ----------
    model : ChainModel
        Must be in the resonance regime.
    times : array_like
        Strictly increasing, non-negative.
    tol : float
        Quadrature tolerance for ``c(t)``.
    pole : ResonancePole, optional
        Reuse an already located pole.
    """
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    if pole is None:
        pole = find_resonance(model)
    c = evolve_spectral(model, t, tol=tol).amplitude
    p = pole.residue * np.exp(-1j * pole.energy * t)
    r = c - p
    return Decomposition(t, c, p, r, wrap_phase(np.angle(p) - np.angle(r)))


def _crossing_gap(model, pole, t, tol):
    d = decompose(model, [t], tol=tol, pole=pole)
    return float(np.abs(d.return_term[0]) - np.abs(d.pole_term[0]))


def t_R_numeric(model, step=FINE_STEP, chunk=2048, tol=ANALYSIS_TOL, horizon_factor=50.0):
    """Earliest destructive crossover of the pole and return terms.

    Scans ``|R| - |pole|`` on a grid of spacing ``step`` and bisects every
    upward sign change; the first root whose phase difference lies within
    ``pi/2`` of ``pi`` is returned. At ``eps0 = 2`` this is the first exact
    zero of ``P(t)``.

    Raises
    ------
    RegimeError
        If no such crossover occurs before ``horizon_factor / Gamma0``.
    """
    pole = find_resonance(model)
    horizon = horizon_factor / pole.gamma0_amp
    start = 0.0
    prev_t = prev_gap = None
    while start < horizon:
        stop = min(start + chunk * step, horizon)
        grid = np.arange(start, stop, step)
        if grid.size == 0:
            break
        d = decompose(model, grid, tol=tol, pole=pole)
        gap = np.abs(d.return_term) - np.abs(d.pole_term)
        if prev_t is not None:
            grid = np.concatenate([[prev_t], grid])
            gap = np.concatenate([[prev_gap], gap])
        for i in np.nonzero((gap[:-1] < 0) & (gap[1:] >= 0))[0]:
            root = optimize.brentq(lambda s: _crossing_gap(model, pole, s, tol),
                                   grid[i], grid[i + 1], xtol=1e-10 * grid[i + 1], rtol=1e-14)
            phase = decompose(model, [root], tol=tol, pole=pole).phase_diff[0]
            if abs(wrap_phase(phase - np.pi)) < np.pi / 2:
                return float(root)
        prev_t, prev_gap = grid[-1], gap[-1]
        start = prev_t + step
    raise RegimeError(f"no destructive crossover before t = {horizon:.6g}")


def t_S_numeric(model, step=1e-3, chunk=1000, t_max=100.0, tol=1e-13):
    """End of the quadratic short-time regime.

    Largest ``t`` of the initial stretch where
    ``|P(t) - (1 - delta**2 t**2)| <= 0.1 (1 - P(t))``, scanned on a grid of
    spacing ``step``. ``delta**2`` is the energy variance of site 1.
    """
    d2 = model.delta ** 2
    last = 0.0
    start = step
    while start <= t_max:
        grid = start + step * np.arange(chunk)
        p = evolve_spectral(model, grid, tol=tol).probability
        ok = np.abs(p - (1.0 - d2 * grid ** 2)) <= 0.1 * (1.0 - p)
        bad = np.nonzero(~ok)[0]
        if bad.size:
            return float(grid[bad[0] - 1]) if bad[0] > 0 else last
        last = float(grid[-1])
        start = last + step
    return last


def characteristic_times(model):
    """Closed-form and numeric dip and quadratic-regime times of a model."""
    return CharacteristicTimes(
        t_R_formula=t_R_estimate(model),
        t_R_numeric=t_R_numeric(model),
        t_S_formula_site=t_S_estimate(model, SITE),
        t_S_formula_bath=t_S_estimate(model, BATH),
        t_S_numeric=t_S_numeric(model),
    )


def asymptotic_slopes(model, t_lo, t_hi, n_windows=40, tol=ANALYSIS_TOL):
    """Log-log slopes of the envelopes of ``|R(t)|`` and ``P(t)`` on ``[t_lo, t_hi]``.

    Both quantities oscillate with the band-edge beating period, so each is
    sampled in ``n_windows`` short windows of two periods centred on a
    logarithmic grid and only the window maxima enter the fit.

    Returns
    -------
    (float, float)
        Slopes for the return amplitude and for the survival probability.
    """
    pole = find_resonance(model)
    centres = np.geomspace(t_lo + EDGE_PERIOD, t_hi - EDGE_PERIOD, n_windows)
    offsets = np.linspace(-EDGE_PERIOD, EDGE_PERIOD, 81)
    t = (centres[:, None] + offsets[None, :]).ravel()
    d = decompose(model, t, tol=tol, pole=pole)
    r = np.abs(d.return_term).reshape(n_windows, -1)
    p = d.probability.reshape(n_windows, -1)
    tt = t.reshape(n_windows, -1)
    rows = np.arange(n_windows)
    tr = tt[rows, np.argmax(r, axis=1)]
    tp = tt[rows, np.argmax(p, axis=1)]
    slope_r = np.polyfit(np.log(tr), np.log(r.max(axis=1)), 1)[0]
    slope_p = np.polyfit(np.log(tp), np.log(p.max(axis=1)), 1)[0]
    return float(slope_r), float(slope_p)
