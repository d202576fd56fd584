"""Pole and return contributions to the amplitude around their crossover.

Run with ``python3 demos/dip_interference.py``.
"""
import numpy as np

from chaindecay import ChainModel, decompose, long_time_modulation, evolve_spectral, fine_grid, \
    t_R_estimate, t_R_numeric

model = ChainModel(2.0, 0.2)
t_r = t_R_numeric(model)
print(f"crossover t_R = {t_r:.4f}")

# near t_R the two terms have equal size; P dips where their phases are opposite
t = np.linspace(0.9 * t_r, 1.1 * t_r, 9)
d = decompose(model, t)
print(f"\n{'t':>10} {'|pole|':>12} {'|return|':>12} {'phase':>8} {'P':>12}")
for row in zip(t, np.abs(d.pole_term), np.abs(d.return_term), d.phase_diff, d.probability):
    print("{:10.3f} {:12.4e} {:12.4e} {:8.3f} {:12.4e}".format(*row))

# long-time beating of the two band edges: complete at the center, partial off center
print(f"\n{'eps0':>6} {'last decade':>12} {'[3 t_R, 10 t_R]':>16}")
for eps0 in (2.0, 2.2, 2.5, 3.0):
    m = ChainModel(eps0, 0.2)
    est = t_R_estimate(m)
    trace = evolve_spectral(m, fine_grid(10 * est))
    print(f"{eps0:6.2f} {long_time_modulation(m, trace):12.6f} "
          f"{long_time_modulation(m, trace, start=3 * est):16.6f}")
