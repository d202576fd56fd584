import math

import numpy as np
import pytest

from chaindecay import (ChainModel, PreconditionError, QuadratureError, bound_states, evolve,
                        evolve_bessel, evolve_diagonalization, evolve_spectral, fine_grid,
                        gamma0_probability, long_time_modulation, modulation_contrast,
                        t_R_estimate)
from chaindecay.bessel import first_zero_j1
from chaindecay.evolution import SurvivalTrace, chain_spectrum, min_sites

ORACLE_MODELS = [(d, e) for d in (0.2, 0.5, 1.0, 1.5) for e in (2.0, 2.4)]


@pytest.fixture(scope="module")
def grid400():
    return fine_grid(400.0)


@pytest.mark.parametrize("delta,eps0", ORACLE_MODELS)
def test_spectral_matches_diagonalization(delta, eps0, grid400):
    m = ChainModel(eps0, delta)
    s = evolve_spectral(m, grid400)
    g = evolve_diagonalization(m, grid400)
    assert np.max(np.abs(s.amplitude - g.amplitude)) < 1e-4
    # the quadrature is in fact far more accurate than required
    assert np.max(np.abs(s.amplitude - g.amplitude)) < 1e-8


@pytest.mark.parametrize("delta,eps0", ORACLE_MODELS + [(0.05, 2.0), (1.6, 2.0), (0.5, 5.0)])
def test_normalization_and_bounds(delta, eps0):
    m = ChainModel(eps0, delta)
    t = fine_grid(60.0)
    s = evolve_spectral(m, t)
    g = evolve_diagonalization(m, t)
    assert abs(s.amplitude[0] - 1.0) < 1e-6
    assert abs(g.amplitude[0] - 1.0) < 1e-12
    for tr in (s, g):
        assert np.all(tr.probability >= 0) and np.all(tr.probability <= 1 + 1e-9)


def test_diagonalization_weights_are_unitary():
    for delta, eps0 in ORACLE_MODELS:
        _, w = chain_spectrum(ChainModel(eps0, delta), 900)
        assert abs(w.sum() - 1.0) < 1e-12


def test_spectral_matches_bessel():
    t = fine_grid(100.0)
    s = evolve_spectral(ChainModel(2.0, 1.0), t)
    assert np.max(np.abs(s.amplitude - evolve_bessel(t).amplitude)) < 1e-6


def test_bessel_normalization_and_first_dip():
    assert evolve_bessel([0.0]).amplitude[0] == 1.0
    t0 = first_zero_j1() / 2.0
    assert t0 == pytest.approx(1.9158529851, abs=1e-9)
    assert evolve_bessel([t0]).probability[0] < 1e-30
    assert evolve_diagonalization(ChainModel(2.0, 1.0), [t0]).probability[0] < 1e-6


def test_bessel_envelope_slope():
    t = np.linspace(20, 200, 20001)
    amp = np.abs(evolve_bessel(t).amplitude)
    # maxima of |c| on windows one oscillation long
    win = int(round(np.pi / 2 / (t[1] - t[0])))
    n = t.size // win
    idx = np.array([k * win + np.argmax(amp[k * win:(k + 1) * win]) for k in range(n)])
    slope = np.polyfit(np.log(t[idx]), np.log(amp[idx]), 1)[0]
    assert slope == pytest.approx(-1.5, abs=0.05)


def test_bessel_carries_band_center_phase():
    t = np.array([0.7, 3.1, 9.4])
    c = evolve_bessel(t).amplitude
    assert np.allclose((c * np.exp(2j * t)).imag, 0.0, atol=1e-16)


def test_exponential_regime_slope():
    m = ChainModel(2.0, 0.2)
    t = np.linspace(5.0, 50.0, 451)
    slope = np.polyfit(t, np.log(evolve_spectral(m, t).probability), 1)[0]
    assert slope == pytest.approx(-0.0816, rel=0.02)
    # frozen from the computed trace
    assert slope == pytest.approx(-0.081648, abs=1e-5)
    assert slope == pytest.approx(-gamma0_probability(m), rel=1e-3)


@pytest.mark.parametrize("delta,eps0", [(0.05, 2.0), (0.2, 2.0), (0.5, 2.4), (1.0, 2.0), (1.5, 2.0),
                                        (0.3, 0.8)])
def test_short_time_law(delta, eps0):
    p = evolve_spectral(ChainModel(eps0, delta), [0.01], tol=1e-13).probability[0]
    assert (1.0 - p) / 0.01 ** 2 == pytest.approx(delta ** 2, rel=0.01)


def test_fractional_decay_with_bound_states():
    m = ChainModel(2.0, 1.6)
    states = bound_states(m)
    w = np.array([s[1] for s in states])
    t = np.linspace(2000.0, 2030.0, 3001)
    p = evolve_spectral(m, t).probability
    # the bound pair beats: the upper envelope reaches (sum w)**2, the mean is sum w**2;
    # the decaying continuum still adds a small interference term
    assert p.max() == pytest.approx(w.sum() ** 2, abs=1e-3)
    assert p.mean() == pytest.approx((w ** 2).sum(), abs=2e-3)
    assert p.mean() >= 0.5 * w.sum() ** 2 - 2e-3


def test_decoupled_site_never_decays():
    m = ChainModel(2.3, 0.0)
    t = np.linspace(0, 50, 11)
    g = evolve_diagonalization(m, t)
    assert np.allclose(g.amplitude, np.exp(-2.3j * t), atol=1e-12)
    assert np.allclose(g.probability, 1.0, atol=1e-12)
    s = evolve_spectral(m, t)
    assert np.allclose(s.amplitude, np.exp(-2.3j * t), atol=1e-15)


def test_weak_coupling_chain_spectrum_inside_band():
    e, _ = chain_spectrum(ChainModel(2.0, 0.2), 1200)
    assert e.min() >= 0 and e.max() <= 4


def test_reflection_guard():
    assert min_sites([0.0, 400.0]) == 900
    with pytest.raises(PreconditionError, match="at least 900"):
        evolve_diagonalization(ChainModel(2.0, 0.2), [400.0], n_sites=899)


def test_spectral_rejects_negative_times():
    with pytest.raises(PreconditionError):
        evolve_spectral(ChainModel(2.0, 0.2), [-1.0, 2.0])


def test_quadrature_budget_exhaustion():
    with pytest.raises(QuadratureError) as info:
        evolve_spectral(ChainModel(2.0, 0.05), [3000.0], quadrature_budget=4)
    err = info.value
    assert len(err.panel) == 2 and err.panel[0] < err.panel[1]


def test_result_independent_of_time_order():
    m = ChainModel(2.4, 0.3)
    t = np.linspace(0, 300, 1201)
    perm = np.random.default_rng(7).permutation(t.size)
    a = evolve_spectral(m, t).amplitude
    b = evolve_spectral(m, t[perm]).amplitude
    assert np.array_equal(a[perm], b)


def test_evolve_dispatch():
    m = ChainModel(2.0, 1.0)
    t = [0.0, 1.0]
    assert evolve(m, t, "bessel").method == "bessel"
    assert evolve(m, t).method == "spectral"
    assert evolve(m, t, "diagonalization", n_sites=300).method == "diagonalization"
    with pytest.raises(PreconditionError):
        evolve(ChainModel(2.0, 0.2), t, "bessel")
    with pytest.raises(ValueError):
        evolve(m, t, "euler")


# --- long-time modulation ----------------------------------------------------

@pytest.fixture(scope="module")
def long_traces():
    out = {}
    for eps0 in (2.0, 2.5):
        m = ChainModel(eps0, 0.2)
        t = fine_grid(10.0 * t_R_estimate(m))
        out[eps0] = (m, evolve_spectral(m, t))
    return out


def test_modulation_center_is_deep(long_traces):
    m, tr = long_traces[2.0]
    assert long_time_modulation(m, tr) > 0.9


def test_modulation_off_center_is_smaller(long_traces):
    c2 = long_time_modulation(*long_traces[2.0])
    c25 = long_time_modulation(*long_traces[2.5])
    assert c25 < c2


def test_modulation_after_pole_has_died(long_traces):
    # from 3 t_R on only the band edges beat; their amplitudes differ off center
    out = {}
    for eps0, (m, tr) in long_traces.items():
        out[eps0] = long_time_modulation(m, tr, start=3 * t_R_estimate(m))
    assert out[2.0] > 0.999
    assert out[2.5] == pytest.approx(0.6267, abs=1e-3)


def test_modulation_of_flat_input_is_zero():
    t = np.linspace(1.0, 100.0, 500)
    assert modulation_contrast(t, 5.0 / t ** 3) == pytest.approx(0.0, abs=1e-14)


def test_modulation_preconditions():
    m = ChainModel(2.0, 0.2)
    short = evolve_spectral(m, fine_grid(100.0))
    with pytest.raises(PreconditionError):
        long_time_modulation(m, short)
    strong = ChainModel(2.0, 1.6)
    with pytest.raises(PreconditionError):
        long_time_modulation(strong, SurvivalTrace(np.arange(3.0), np.ones(3), "spectral"))
