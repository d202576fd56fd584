"""Decay under repeated projective measurements of site 1.

Projecting onto site 1 every ``tau`` restarts the evolution, so after ``n``
cycles the survival is ``P(tau)**n = exp(-gamma_eff(tau) n tau)`` with the
stroboscopic rate ``gamma_eff(tau) = -ln P(tau) / tau``. Measurement slows
the decay (Zeno) where ``gamma_eff`` is below the free rate and speeds it up
(anti-Zeno) where it is above.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .decomposition import ANALYSIS_TOL, t_R_numeric, t_S_numeric
from .errors import NoRootError, PreconditionError, RegimeError
from .evolution import FINE_STEP, evolve_spectral
from .resonance import reference_rate, resonance_regime, t_R_estimate

ZENO = "zeno"
ANTI_ZENO = "anti_zeno"
NEUTRAL = "neutral"

CLASSIFY_TOL = 1e-3
PEAK_PROMINENCE = 0.01
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Peak:
    """First qualifying maximum of ``gamma_eff``."""

    tau: float
    gamma_eff: float
    gamma0: float
    prominence: float

    @property
    def ratio(self):
        return self.gamma_eff / self.gamma0

    @property
    def anti_zeno(self):
        return self.gamma_eff > self.gamma0


@dataclass
class ZenoReport:
    tau_grid: np.ndarray
    gamma_eff: np.ndarray
    gamma0: float
    classification: list
    tau_star: float = None
    tau_star_star: float = None
    peak_ratio: float = None
    t_R: float = None
    t_S: float = None
    notes: dict = field(default_factory=dict)


def rate_from_probability(tau, probability):
    """``-ln P / tau``; exact zeros of ``P`` give ``inf``."""
    tau = np.asarray(tau, dtype=float)
    p = np.asarray(probability, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(p > 0, -np.log(np.where(p > 0, p, 1.0)) / tau, np.inf)
    return out[()]


def gamma_eff(model, tau, tol=ANALYSIS_TOL):
    """Effective decay rate for measurements with period ``tau``.

    Returns ``math.inf`` where the survival probability vanishes, i.e. where
    ``|c(tau)|`` is not distinguishable from zero at the quadrature
    tolerance ``tol``.
    """
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(tau_arr <= 0):
        raise PreconditionError("measurement period must be positive")
    amp = evolve_spectral(model, tau_arr, tol=tol).amplitude
    p = np.where(np.abs(amp) <= tol, 0.0, np.abs(amp) ** 2)
    out = rate_from_probability(tau_arr, p)
    return float(out[0]) if np.ndim(tau) == 0 else out


def measurement_survival(model, tau, n_cycles):
    """Survival after each of ``n_cycles`` measurements, ``P(tau)**k``."""
    if tau <= 0 or n_cycles < 1:
        raise PreconditionError("need tau > 0 and n_cycles >= 1")
    p = float(evolve_spectral(model, [tau], tol=ANALYSIS_TOL).probability[0])
    return p ** np.arange(1, int(n_cycles) + 1)


def classify_rate(rate, gamma0, tol=CLASSIFY_TOL):
    """Label a rate relative to the free decay rate."""
    if rate < gamma0 * (1.0 - tol):
        return ZENO
    if rate > gamma0 * (1.0 + tol):
        return ANTI_ZENO
    return NEUTRAL


def classify(model, tau, tol=CLASSIFY_TOL):
    """``'zeno'``, ``'anti_zeno'`` or ``'neutral'`` for one period or an array of them."""
    g0 = reference_rate(model)
    rates = gamma_eff(model, tau)
    if np.ndim(rates) == 0:
        return classify_rate(rates, g0, tol)
    return [classify_rate(r, g0, tol) for r in rates]


def first_rate_root(rate_fn, gamma0, step, horizon, rel=1e-6, chunk=4096, flat=1e-9):
    """Smallest ``tau`` where ``rate_fn(tau)`` climbs to ``gamma0``.

    ``rate_fn`` maps an array of periods to rates. Samples within ``flat``
    (relative) of ``gamma0`` count as neither below nor above, so a rate
    that equals ``gamma0`` identically has no root.

    Raises
    ------
    NoRootError
        If the rate does not reach ``gamma0`` from below before ``horizon``.
    """
    band = flat * gamma0
    prev_tau = None
    seen_below = False
    k0 = 1
    while k0 * step <= horizon:
        taus = step * np.arange(k0, k0 + chunk)
        taus = taus[taus <= horizon]
        diff = np.asarray(rate_fn(taus)) - gamma0
        for i, dv in enumerate(diff):
            if dv < -band:
                seen_below = True
                prev_tau = taus[i]
            elif dv >= 0 and seen_below and dv > band:
                lo, hi = prev_tau, taus[i]
                while hi - lo > rel * hi:
                    mid = 0.5 * (lo + hi)
                    if float(rate_fn(np.array([mid]))[0]) - gamma0 >= 0:
                        hi = mid
                    else:
                        lo = mid
                return 0.5 * (lo + hi)
        k0 += chunk
    raise NoRootError(f"gamma_eff does not reach {gamma0:.6g} below tau = {horizon:.6g}")


def _check_weak(model):
    if model.delta > 0.5 or not resonance_regime(model):
        raise PreconditionError("tau* is defined for weak coupling (delta <= 0.5) with a resonance")


def find_tau_star(model, t_S=None, horizon=None):
    """Smallest root of ``gamma_eff(tau) = gamma0``.

    Sign scan with step ``t_S_numeric / 20`` up to ``5 t_R`` followed by
    bisection to ``1e-6`` relative.
    """
    _check_weak(model)
    if t_S is None:
        t_S = t_S_numeric(model)
    if horizon is None:
        horizon = 5.0 * t_R_estimate(model)
    return first_rate_root(lambda t: gamma_eff(model, t), reference_rate(model),
                           t_S / 20.0, horizon)


def quadratic_landmark(model):
    """Where ``delta**2 tau`` would reach ``gamma0`` if ``P = 1 - delta**2 t**2`` held."""
    return reference_rate(model) / model.delta ** 2


def peak_grid(tau_min, tau_max, per_decade=200, max_step=FINE_STEP):
    """Log-spaced grid (``per_decade`` points) that turns linear once its step reaches ``max_step``."""
    ratio = 10.0 ** (1.0 / per_decade)
    switch = max_step / (ratio - 1.0)
    if switch >= tau_max:
        n = int(math.ceil(per_decade * math.log10(tau_max / tau_min))) + 1
        return np.geomspace(tau_min, tau_max, n)
    head = tau_min * ratio ** np.arange(int(math.log(switch / tau_min) / math.log(ratio)) + 1)
    tail = np.arange(head[-1] + max_step, tau_max + 0.5 * max_step, max_step)
    return np.concatenate([head, tail])


def _golden_max(f, a, b, rel):
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > rel * abs(c):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _qualifying_peak(g, min_prominence, final=False):
    """Index and prominence of the first local maximum of ``g`` that stands out.

    The bases are the lowest samples between the peak and its neighbouring
    local maxima (or the ends of the data). Unless ``final``, a peak with no
    later maximum is not judged yet because its right base may still drop.
    """
    inner = np.nonzero((g[1:-1] > g[:-2]) & (g[1:-1] >= g[2:]))[0] + 1
    for k, i in enumerate(inner):
        left_start = inner[k - 1] if k > 0 else 0
        if k + 1 < len(inner):
            right_end = inner[k + 1]
        elif final:
            right_end = len(g) - 1
        else:
            return None, None
        base = max(g[left_start:i].min(), g[i:right_end + 1].min())
        prom = g[i] - base
        if prom >= min_prominence:
            return int(i), float(prom)
    return None, None


def find_tau_star_star(model, tau_min=0.01, horizon=None, chunk=4096, rel=1e-4):
    """First peak of ``gamma_eff``.

    ``gamma_eff`` is sampled on :func:`peak_grid` over
    ``[tau_min, horizon]`` (default ``10 t_R``); the first local maximum that
    exceeds its neighbouring minima by 1% of ``gamma0`` is refined by
    golden-section search to ``rel``.

    Raises
    ------
    NoRootError
        If ``gamma_eff`` has no qualifying interior maximum.
    """
    g0 = reference_rate(model)
    if horizon is None:
        try:
            horizon = 10.0 * t_R_estimate(model)
        except (PreconditionError, RegimeError):
            horizon = 50.0 / g0
    grid = peak_grid(tau_min, horizon)
    taus = np.empty(0)
    rates = np.empty(0)
    for start in range(0, grid.size, chunk):
        block = grid[start:start + chunk]
        taus = np.concatenate([taus, block])
        rates = np.concatenate([rates, gamma_eff(model, block)])
        i, prom = _qualifying_peak(rates, PEAK_PROMINENCE * g0)
        if i is not None:
            break
    else:
        i, prom = _qualifying_peak(rates, PEAK_PROMINENCE * g0, final=True)
        if i is None:
            raise NoRootError(f"gamma_eff has no qualifying peak below tau = {horizon:.6g}")
    if math.isinf(rates[i]):
        return Peak(float(taus[i]), math.inf, g0, prom)
    tau, val = _golden_max(lambda t: gamma_eff(model, t), taus[i - 1], taus[i + 1], rel)
    if val < rates[i]:
        tau, val = float(taus[i]), float(rates[i])
    return Peak(float(tau), float(val), g0, prom)


def zeno_guarantee(model, t_S=None, tau_star=None, n=50):
    """Check ``gamma_eff < gamma0`` on ``n`` points below ``min(t_S, tau*)``.

    Returns
    -------
    taus, rates : ndarray
    holds : bool
    """
    g0 = reference_rate(model)
    if t_S is None:
        t_S = t_S_numeric(model)
    if tau_star is None:
        tau_star = find_tau_star(model, t_S=t_S)
    upper = min(t_S, tau_star)
    taus = np.linspace(upper / n, upper, n, endpoint=False)
    rates = gamma_eff(model, taus)
    return taus, rates, bool(np.all(rates < g0))


def zeno_report(model, tau_grid):
    """Rates, classification and characteristic periods of a model.

    Quantities that are undefined for the model (e.g. ``tau*`` at strong
    coupling) are left as ``None`` and the reason is stored in ``notes``.
    """
    taus = np.asarray(tau_grid, dtype=float)
    g0 = reference_rate(model)
    rates = gamma_eff(model, taus)
    report = ZenoReport(taus, rates, g0, [classify_rate(r, g0) for r in rates])
    report.t_S = t_S_numeric(model)
    if resonance_regime(model):
        try:
            report.t_R = t_R_numeric(model)
        except RegimeError as exc:
            report.notes["t_R"] = str(exc)
    try:
        report.tau_star = find_tau_star(model, t_S=report.t_S)
    except (PreconditionError, RegimeError) as exc:
        report.notes["tau_star"] = str(exc)
    try:
        peak = find_tau_star_star(model)
        report.tau_star_star = peak.tau
        report.peak_ratio = peak.ratio
    except (PreconditionError, RegimeError) as exc:
        report.notes["tau_star_star"] = str(exc)
    return report
