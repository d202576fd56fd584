import math

import numpy as np
import pytest

from chaindecay import (ChainModel, PreconditionError, RegimeError, asymptotic_slopes,
                        characteristic_times, decompose, evolve_diagonalization, find_resonance,
                        t_R_estimate, t_R_numeric, t_S_numeric, wrap_phase)
from chaindecay.evolution import FINE_STEP

WEAK = ChainModel(2.0, 0.2)
# computed by the crossover solver; the dip is confirmed by diagonalization below
T_R_WEAK = 341.8890250287851


@pytest.fixture(scope="module")
def t_r_weak():
    return t_R_numeric(WEAK)


def test_wrap_phase_range():
    x = np.array([-3 * np.pi, -np.pi, -1.0, 0.0, np.pi, 2.5 * np.pi, 7.0])
    w = wrap_phase(x)
    assert np.all(w > -np.pi) and np.all(w <= np.pi)
    assert np.allclose(np.exp(1j * w), np.exp(1j * x))
    assert wrap_phase(-np.pi) == np.pi


def test_split_at_time_zero():
    pole = find_resonance(WEAK)
    d = decompose(WEAK, [0.0])
    assert d.pole_term[0] == pytest.approx(pole.residue, abs=1e-15)
    assert d.return_term[0] == pytest.approx(1.0 - pole.residue, abs=1e-8)
    assert d.amplitude[0] == pytest.approx(1.0, abs=1e-8)


def test_pole_dominates_in_exponential_regime():
    d = decompose(WEAK, [50.0])
    pole = find_resonance(WEAK)
    assert abs(d.pole_term[0]) == pytest.approx(abs(pole.residue) * math.exp(-pole.gamma0_amp * 50), rel=1e-12)
    assert abs(d.pole_term[0]) >= 10 * abs(d.return_term[0])


def test_completeness_against_independent_oracle():
    t = np.arange(0.0, 2 * T_R_WEAK, 4 * FINE_STEP)
    d = decompose(WEAK, t)
    g = evolve_diagonalization(WEAK, t)
    assert np.max(np.abs(d.pole_term + d.return_term - g.amplitude)) <= 1e-4


def test_pole_term_strictly_decreasing():
    t = np.linspace(0, 500, 2001)
    mag = np.abs(decompose(ChainModel(2.4, 0.3), t).pole_term)
    assert np.all(np.diff(mag) < 0)


def test_grid_must_increase():
    with pytest.raises(ValueError):
        decompose(WEAK, [1.0, 1.0, 2.0])
    with pytest.raises(PreconditionError):
        decompose(ChainModel(2.0, 1.5), [1.0])


def test_crossover_weak_coupling(t_r_weak):
    assert t_r_weak == pytest.approx(T_R_WEAK, rel=1e-9)
    # the band-center dip is an exact zero of P; the brute-force chain agrees
    assert evolve_diagonalization(WEAK, [t_r_weak]).probability[0] < 1e-20
    d = decompose(WEAK, [t_r_weak])
    assert abs(d.return_term[0]) == pytest.approx(abs(d.pole_term[0]), rel=0.05)
    assert abs(wrap_phase(d.phase_diff[0] - np.pi)) < 0.3


def test_crossover_strong_side_is_flagged():
    times = characteristic_times(ChainModel(2.0, 0.5))
    assert times.t_R_numeric == pytest.approx(30.597185835206474, rel=1e-9)
    assert times.t_R_formula == pytest.approx(14.830312251723356, rel=1e-12)
    assert not times.t_R_in_regime


def test_crossover_off_center():
    m = ChainModel(2.6, 0.2)
    t = t_R_numeric(m)
    assert t == pytest.approx(352.86146473349925, rel=1e-9)
    d = decompose(m, [t])
    assert abs(d.return_term[0]) == pytest.approx(abs(d.pole_term[0]), rel=1e-6)
    assert abs(wrap_phase(d.phase_diff[0] - np.pi)) < np.pi / 2


def test_crossover_horizon():
    with pytest.raises(RegimeError):
        t_R_numeric(WEAK, horizon_factor=2.0)


def test_dip_interference_property(t_r_weak):
    t = np.arange(t_r_weak / 2, t_r_weak, FINE_STEP / 4)
    d = decompose(WEAK, t)
    p = d.probability
    minima = np.nonzero((p[1:-1] < p[:-2]) & (p[1:-1] <= p[2:]))[0] + 1
    maxima = np.nonzero((p[1:-1] > p[:-2]) & (p[1:-1] >= p[2:]))[0] + 1
    assert minima.size > 10 and maxima.size > 10
    assert np.all(np.abs(d.phase_diff[minima]) > np.pi - 0.5)
    assert np.all(np.abs(d.phase_diff[maxima]) < np.pi / 2)


def test_return_term_power_law():
    t_r = t_R_estimate(WEAK)
    slope_r, slope_p = asymptotic_slopes(WEAK, 3 * t_r, 10 * t_r)
    assert slope_r == pytest.approx(-1.5, abs=0.1)
    assert slope_p == pytest.approx(-3.0, abs=0.2)


def test_quadratic_regime_end():
    t_s = {d: t_S_numeric(ChainModel(2.0, d)) for d in (0.05, 0.1, 0.2)}
    assert t_s[0.2] == pytest.approx(1.008, abs=1e-9)
    # grows as the coupling weakens
    assert t_s[0.05] > t_s[0.1] > t_s[0.2]


def test_characteristic_times_weak(t_r_weak):
    times = characteristic_times(WEAK)
    assert times.t_S_formula_site == pytest.approx(25.0)
    assert times.t_S_formula_bath == pytest.approx(1.0)
    assert times.t_S_reading == "bath"
    assert times.t_R_numeric > times.t_S_numeric > 0
    assert (times.alpha, times.beta) == (2.5, 1.6)
