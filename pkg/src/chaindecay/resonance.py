"""Second-sheet resonance pole and the closed-form rate and time estimates.

The pole ``eps_p = eps_r - i Gamma0`` of G11 continued through the band
governs the exponential part of the survival amplitude,
``a exp(-i eps_r t - Gamma0 t)``. ``Gamma0`` is an *amplitude* rate; the
survival probability decays with ``2 Gamma0``.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, PreconditionError, RegimeError
from .lattice import (BAND_CENTER, BAND_EDGES, BANDWIDTH, HBAR, SECOND,
                      bath_dos, green_denominator, lead_green_derivative, ldos)

DIP_ALPHA = 2.5
DIP_BETA = 1.6

SITE = "site"
BATH = "bath"


@dataclass(frozen=True)
class ResonancePole:
    """Resonance pole of G11 on the second sheet.

    Attributes
    ----------
    eps_r : float
        Resonance energy (real part of the pole).
    gamma0_amp : float
        Amplitude decay rate, minus the imaginary part of the pole.
    residue : complex
        Residue ``a`` of G11 at the pole; the weight of the exponential term.
    iterations : int
        Newton steps used.
    """

    eps_r: float
    gamma0_amp: float
    residue: complex
    iterations: int = 0

    @property
    def energy(self):
        return complex(self.eps_r, -self.gamma0_amp)

    @property
    def Z(self):
        return abs(self.residue) ** 2

    @property
    def gamma0(self):
        """Probability decay rate ``2 Gamma0``."""
        return 2.0 * self.gamma0_amp


def band_center_rate(delta):
    """Probability decay rate ``2 delta**2 / sqrt(1 - delta**2)`` for ``eps0 = 2``."""
    if not 0 <= delta < 1:
        raise DomainError("band-center rate needs 0 <= delta < 1")
    return 2.0 * delta ** 2 / math.sqrt(1.0 - delta ** 2)


def resonance_width(delta, eps0):
    """Closed-form amplitude rate Gamma0 for arbitrary ``eps0``.

    ``delta**2 / (1 - delta**2) * sqrt(1 - delta**2 - (eps0/2 - 1)**2)``
    """
    disc = 1.0 - delta ** 2 - (eps0 / 2.0 - 1.0) ** 2
    if not 0 <= delta < 1 or disc <= 0:
        raise DomainError(f"no resonance for delta={delta}, eps0={eps0}")
    return delta ** 2 / (1.0 - delta ** 2) * math.sqrt(disc)


def golden_rule_rate(model):
    """Weak-coupling probability rate ``2 pi delta**2 rho_bath(eps0)``."""
    return 2.0 * math.pi * model.delta ** 2 * float(bath_dos(model.eps0))


def resonance_regime(model):
    """True when the pole is complex and can be reached through the band."""
    disc = 1.0 - model.delta ** 2 - model.offset ** 2
    return 0.0 < model.delta < 1.0 and disc > 0.0


def _newton_step(model, z):
    h = green_denominator(model, z, SECOND)
    hp = 1.0 - model.delta ** 2 * lead_green_derivative(z, SECOND)
    return h / hp


def pole_residue(model, eps_p, method="analytic", h=1e-6):
    """Residue of G11 at a second-sheet pole.

    ``method='analytic'`` uses ``1 / (1 - delta**2 g'(eps_p))``;
    ``method='fd'`` replaces ``g'`` by a central difference of step ``h``
    and serves as a cross-check.
    """
    d2 = model.delta ** 2
    if method == "analytic":
        gp = lead_green_derivative(eps_p, SECOND)
    elif method == "fd":
        from .lattice import lead_green
        gp = (lead_green(eps_p + h, SECOND) - lead_green(eps_p - h, SECOND)) / (2 * h)
    else:
        raise ValueError(f"unknown method {method!r}")
    return complex(1.0 / (1.0 - d2 * gp))


def find_resonance(model, max_iter=200, tol=1e-15):
    """Locate the resonance pole by complex Newton iteration.

    Solves ``eps - eps0 - delta**2 g_II(eps) = 0`` in the lower half plane,
    seeded at the golden-rule estimate ``eps0 - i delta**2 sqrt(1 - x0**2)``.

    Raises
    ------
    PreconditionError
        If ``delta`` is not in ``(0, 1)`` or the pole is real.
    RegimeError
        If Newton does not converge or the pole is not behind the band.
    """
    if not 0.0 < model.delta < 1.0:
        raise PreconditionError(f"resonance search needs 0 < delta < 1, got {model.delta}")
    if not resonance_regime(model):
        raise PreconditionError(
            f"eps0={model.eps0} is too close to a band edge for delta={model.delta}: "
            "the pole is real")
    x0 = model.offset
    z = complex(model.eps0, -model.delta ** 2 * math.sqrt(max(1.0 - x0 * x0, 0.0)))
    for it in range(1, max_iter + 1):
        step = _newton_step(model, z)
        z = z - step
        if abs(step) <= tol * max(1.0, abs(z)):
            break
    else:
        raise RegimeError(f"resonance search did not converge in {max_iter} iterations")
    if not (z.imag < 0 and BAND_EDGES[0] < z.real < BAND_EDGES[1]):
        raise RegimeError(f"pole {z} is not a resonance behind the band")
    return ResonancePole(float(z.real), float(-z.imag), pole_residue(model, z), it)


def gamma0_probability(model):
    """Probability decay rate ``2 Gamma0`` from the numerically located pole."""
    return find_resonance(model).gamma0


def reference_rate(model):
    """Free decay rate that measured rates are compared against.

    ``2 Gamma0`` of the resonance when it exists; outside the resonance
    regime (strong coupling, bound states) the golden-rule rate.
    """
    if resonance_regime(model):
        return gamma0_probability(model)
    if model.delta == 0:
        raise PreconditionError("delta = 0: the site does not decay")
    return golden_rule_rate(model)


def dip_time_formula(gamma0_amp, alpha=DIP_ALPHA, beta=DIP_BETA, bandwidth=BANDWIDTH, hbar=HBAR):
    """Closed-form interference dip time ``alpha hbar/G ln(beta B / 4 G)``.

    Raises
    ------
    RegimeError
        When the logarithm's argument drops below one (strong coupling).
    """
    arg = beta * bandwidth / (4.0 * gamma0_amp)
    if arg < 1.0:
        raise RegimeError(f"log argument {arg:.4g} < 1: coupling too strong for the estimate")
    return alpha * hbar / gamma0_amp * math.log(arg)


def t_R_estimate(model):
    """Dip time from the closed form, using the numeric Gamma0."""
    return dip_time_formula(find_resonance(model).gamma0_amp)


def t_S_estimate(model, reading=BATH):
    """Duration of the quadratic regime, ``hbar pi N(eps0)``.

    Parameters
    ----------
    reading : {'site', 'bath'}
        ``'site'`` evaluates the perturbed site-1 LDOS at ``eps0`` (giving
        ``1/delta**2`` at the band center), ``'bath'`` the unperturbed
        final-state density of the lead (giving 1 at the band center).
    """
    if not model.in_band:
        raise DomainError(f"eps0={model.eps0} is outside the band")
    if reading == SITE:
        return HBAR * np.pi * float(ldos(model, model.eps0))
    if reading == BATH:
        return HBAR * np.pi * float(bath_dos(model.eps0))
    raise ValueError(f"reading must be 'site' or 'bath', got {reading!r}")


def resonance_energy_closed_form(delta, eps0):
    """Exact ``eps_r = 2 + (eps0 - 2)(2 - delta**2) / (2 (1 - delta**2))``.

    Obtained by eliminating g from the pole equation and ``g + 1/g = 2x``.
    """
    return BAND_CENTER + (eps0 - BAND_CENTER) * (2.0 - delta ** 2) / (2.0 * (1.0 - delta ** 2))
