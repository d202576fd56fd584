"""Decay of a site coupled to a semi-infinite tight-binding chain.

Units: hbar = 1, bulk hopping V = 1, continuum band ``[0, 4]`` centred at 2.

Modules
-------
lattice
    Green functions, LDOS and bound states of the end site.
resonance
    Second-sheet resonance pole, decay rates and closed-form time estimates.
evolution
    Survival amplitude by spectral transform, diagonalization or Bessel form.
decomposition
    Pole plus return-amplitude split, crossover and quadratic-regime times.
zeno
    Effective decay rate under repeated measurements.
cli
    Command-line front end (``python -m chaindecay``).
"""
from .errors import (ChainDecayError, DomainError, NoRootError, PoleEvaluationError,
                     PreconditionError, QuadratureError, RegimeError)
from .lattice import (BAND_CENTER, BAND_EDGES, BANDWIDTH, HBAR, HOPPING, PHYSICAL, SECOND,
                      ChainModel, SpectralData, bath_dos, bound_states, g11, lead_green, ldos,
                      self_energy, spectral_data, sum_rule)
from .resonance import (BATH, DIP_ALPHA, DIP_BETA, SITE, ResonancePole, band_center_rate,
                        find_resonance, gamma0_probability, golden_rule_rate, pole_residue,
                        reference_rate, resonance_regime, resonance_width, t_R_estimate,
                        t_S_estimate)
from .evolution import (BESSEL, DIAGONALIZATION, SPECTRAL, SurvivalTrace, evolve,
                        evolve_bessel, evolve_diagonalization, evolve_spectral, fine_grid,
                        long_time_modulation, modulation_contrast)
from .decomposition import (CharacteristicTimes, Decomposition, asymptotic_slopes,
                            characteristic_times, decompose, t_R_numeric, t_S_numeric,
                            wrap_phase)
from .zeno import (ANTI_ZENO, NEUTRAL, ZENO, Peak, ZenoReport, classify, find_tau_star,
                   find_tau_star_star, gamma_eff, measurement_survival, zeno_guarantee,
                   zeno_report)

__version__ = "0.1.0"
