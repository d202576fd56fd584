"""Green function of the end site of a semi-infinite tight-binding chain.

The chain has a first site of energy ``eps0`` coupled with hopping ``delta``
to a uniform semi-infinite lead (site energy 2, hopping 1). Energies and
times are measured in units of the bulk hopping with hbar = 1, so the
continuum occupies the band ``[0, 4]``.

All functions accept scalars or numpy arrays and broadcast.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, PoleEvaluationError, PreconditionError

HBAR = 1.0
HOPPING = 1.0
BAND_CENTER = 2.0
BANDWIDTH = 4.0
BAND_EDGES = (0.0, 4.0)

PHYSICAL = "physical"
SECOND = "second"
_SHEETS = (PHYSICAL, SECOND)


@dataclass(frozen=True)
class ChainModel:
    """Physical parameters of the decaying site.

    Parameters
    ----------
    eps0 : float
        Energy of the first site.
    delta : float
        Hopping between the first and the second site, relative to the bulk
        hopping. ``delta = 1`` is the uniform chain.
    """

    eps0: float
    delta: float

    def __post_init__(self):
        if not math.isfinite(self.eps0):
            raise PreconditionError(f"eps0 must be finite, got {self.eps0!r}")
        if not math.isfinite(self.delta) or self.delta < 0:
            raise PreconditionError(f"delta must be finite and >= 0, got {self.delta!r}")

    @property
    def offset(self):
        """Reduced site energy ``(eps0 - 2) / 2`` measured from the band center."""
        return (self.eps0 - BAND_CENTER) / 2.0

    @property
    def in_band(self):
        return BAND_EDGES[0] <= self.eps0 <= BAND_EDGES[1]


@dataclass(frozen=True)
class SpectralData:
    """LDOS of site 1 sampled over the band plus its discrete part."""

    energies: np.ndarray
    ldos: np.ndarray
    bound_states: list = field(default_factory=list)

    @property
    def bound_weight(self):
        return sum(w for _, w in self.bound_states)


def _reduced(eps):
    return (np.asarray(eps) - BAND_CENTER) / 2.0


def _check_sheet(sheet):
    if sheet not in _SHEETS:
        raise ValueError(f"sheet must be one of {_SHEETS}, got {sheet!r}")


def lead_green(eps, sheet=PHYSICAL):
    r"""End-site Green function of the uniform semi-infinite lead.

    With :math:`x = (\varepsilon - 2)/2` the physical branch is
    :math:`g = x - \sqrt{x-1}\sqrt{x+1}`, which decays as :math:`1/(2x)` at
    infinity. Real arguments are read as :math:`\varepsilon + i0^+`, i.e. the
    retarded limit :math:`x - i\sqrt{1-x^2}` inside the band.

    The second sheet is reached by flipping the square-root branch,
    :math:`g_{II} = 2x - g = 1/g`. Approached from below the band it is the
    analytic continuation of the retarded function, which is where resonance
    poles live.

    Parameters
    ----------
    eps : complex or array_like
        Energy.
    sheet : {'physical', 'second'}

    Returns
    -------
    complex or ndarray
    """
    _check_sheet(sheet)
    z = np.asarray(eps, dtype=complex)
    # exact zeros of the imaginary part are taken as +i0 (retarded side)
    z = np.where(z.imag == 0, z.real + 0j, z)
    x = (z - BAND_CENTER) / 2.0
    root = np.sqrt(x - 1.0) * np.sqrt(x + 1.0)
    g = x - root if sheet == PHYSICAL else x + root
    return g[()]


def lead_green_derivative(eps, sheet=PHYSICAL):
    """Energy derivative of :func:`lead_green` on the requested sheet.

    Follows from differentiating ``g**2 - 2 x g + 1 = 0``; diverges at the
    band edges.
    """
    g = np.asarray(lead_green(eps, sheet))
    x = _reduced(np.asarray(eps, dtype=complex))
    with np.errstate(divide="ignore", invalid="ignore"):
        return (g / (2.0 * (g - x)))[()]


def bath_dos(eps):
    """Density of states of the unperturbed lead at its end site.

    ``sqrt(4 - (eps - 2)**2) / (2 pi)`` inside the band, zero outside.
    """
    x = _reduced(eps)
    return (np.sqrt(np.clip(1.0 - x * x, 0.0, None)) / np.pi)[()]


def self_energy(model, eps, sheet=PHYSICAL):
    """Self-energy ``delta**2 * g(eps)`` of site 1 due to the lead."""
    return model.delta ** 2 * lead_green(eps, sheet)


def green_denominator(model, eps, sheet=PHYSICAL):
    """``eps - eps0 - delta**2 g(eps)``; its zeros are the poles of G11."""
    return (np.asarray(eps, dtype=complex) - model.eps0 - self_energy(model, eps, sheet))[()]


def g11(model, eps, sheet=PHYSICAL):
    """Site-1 retarded Green function ``1 / (eps - eps0 - delta**2 g(eps))``.

    Raises
    ------
    PoleEvaluationError
        If the denominator vanishes exactly at a requested energy.
    """
    den = np.asarray(green_denominator(model, eps, sheet))
    if np.any(den == 0):
        raise PoleEvaluationError(f"G11 evaluated on a pole for {model}")
    return (1.0 / den)[()]


def ldos(model, eps):
    """Local density of states ``-Im G11(eps + i0) / pi`` of site 1.

    Only the continuous part inside the band is returned; discrete poles are
    reported by :func:`bound_states`. Uses the exact in-band limit rather than
    a finite broadening.

    Raises
    ------
    DomainError
        For energies outside ``[0, 4]``.
    """
    e = np.asarray(eps, dtype=float)
    if np.any((e < BAND_EDGES[0]) | (e > BAND_EDGES[1])) or np.any(~np.isfinite(e)):
        raise DomainError("ldos is defined inside the band [0, 4] only")
    x = _reduced(e)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    d2 = model.delta ** 2
    re = e - model.eps0 - d2 * x
    im = d2 * s
    den = re * re + im * im
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where((s > 0) & (den > 0), im / (np.pi * den), 0.0)
    return out[()]


def _denominator_real(model, eps):
    # real outside the band, physical sheet
    return (np.asarray(green_denominator(model, eps))).real


def bound_states(model, step=1e-3, xtol=1e-12):
    """Discrete eigenstates of the site-1 problem outside the band.

    Scans the real denominator of G11 for sign changes below and above the
    band (step ``step``, starting exactly at the band edges), then refines
    each bracket to ``xtol``. The weight of a state is the residue
    ``1 / (1 - delta**2 g'(eps_b))``.

    A decoupled site (``delta == 0``) is reported as a single level at
    ``eps0`` with unit weight, even when it lies inside the band.

    Returns
    -------
    list of (float, float)
        ``(energy, weight)`` pairs sorted by energy.
    """
    if model.delta == 0:
        return [(float(model.eps0), 1.0)]
    reach = max(10.0, abs(model.eps0 - BAND_CENTER) + model.delta ** 2 + 10.0)
    lower = BAND_EDGES[0] - np.arange(0.0, reach + step, step)
    upper = BAND_EDGES[1] + np.arange(0.0, reach + step, step)
    found = []
    for grid in (lower[::-1], upper):
        f = _denominator_real(model, grid)
        idx = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) <= 0)[0]
        for i in idx:
            a, b = grid[i], grid[i + 1]
            if f[i] == 0:
                root = a
            elif f[i + 1] == 0:
                continue
            else:
                root = optimize.brentq(lambda e: _denominator_real(model, e), a, b,
                                       xtol=xtol, rtol=4 * np.finfo(float).eps)
            found.append(float(root))
    states = []
    for e in sorted(set(found)):
        gp = lead_green_derivative(e).real
        weight = 1.0 / (1.0 - model.delta ** 2 * gp) if np.isfinite(gp) else 0.0
        states.append((e, float(weight)))
    return states


def band_breakpoints(model, width=10.0):
    """Energies inside the band at which the LDOS varies sharply.

    These are ``eps_r +/- width * Gamma0`` around the resonance when the
    model is in the resonance regime; empty otherwise.
    """
    from .resonance import resonance_regime, find_resonance

    if not resonance_regime(model):
        return []
    pole = find_resonance(model)
    lo, hi = BAND_EDGES
    pts = [pole.eps_r - width * pole.gamma0_amp, pole.eps_r,
           pole.eps_r + width * pole.gamma0_amp]
    return sorted(p for p in pts if lo < p < hi)


def _theta(eps):
    return np.arccos(np.clip(_reduced(eps), -1.0, 1.0))


def band_weight(model, epsabs=1e-13):
    """Integrated continuous weight ``int_0^4 N1(eps) d eps``.

    The integral is done in the angle variable ``eps = 2 + 2 cos(theta)``,
    which removes the square-root behaviour at the band edges, with
    breakpoints at the resonance.
    """
    def integrand(theta):
        e = BAND_CENTER + 2.0 * np.cos(theta)
        return ldos(model, np.clip(e, *BAND_EDGES)) * 2.0 * np.sin(theta)

    pts = sorted(float(_theta(e)) for e in band_breakpoints(model))
    edges = [0.0, *pts, np.pi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(integrand, a, b, epsabs=epsabs, epsrel=1e-13, limit=500)
        total += val
    return total


def sum_rule(model):
    """Total spectral weight of site 1: band integral plus bound-state weights.

    Equals one for every model, which makes it a convenient global check.
    """
    discrete = sum(w for _, w in bound_states(model))
    if model.delta == 0:
        return discrete
    return band_weight(model) + discrete


def spectral_data(model, n_points=801):
    """Sample the LDOS on a uniform grid over the band and collect bound states."""
    energies = np.linspace(*BAND_EDGES, n_points)
    return SpectralData(energies, np.asarray(ldos(model, energies)), bound_states(model))
