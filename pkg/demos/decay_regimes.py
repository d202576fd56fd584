"""Three regimes of the survival probability of a site coupled to a chain.

Run with ``python3 demos/decay_regimes.py``. Prints tables only.
"""
import numpy as np

from chaindecay import (ChainModel, characteristic_times, evolve_diagonalization, evolve_spectral,
                        find_resonance, fine_grid)

model = ChainModel(2.0, 0.2)  # site at band center, weak coupling
pole = find_resonance(model)
print(f"pole: eps_r = {pole.eps_r:.6f}, Gamma0 = {pole.gamma0_amp:.6f}, "
      f"gamma0 = {pole.gamma0:.6f}, Z = {pole.Z:.6f}")

# short times: 1 - P grows like delta**2 t**2
t = np.array([0.005, 0.01, 0.02, 0.05])
p = evolve_spectral(model, t, tol=1e-13).probability
print("\nshort times")
print(f"{'t':>8} {'(1-P)/t^2':>12}")
for ti, pi in zip(t, p):
    print(f"{ti:8.3f} {(1 - pi) / ti ** 2:12.6f}")

# intermediate times: exponential with the pole rate
t = np.linspace(5.0, 50.0, 451)
slope = np.polyfit(t, np.log(evolve_spectral(model, t).probability), 1)[0]
print(f"\nlog P slope on [5, 50]: {slope:.6f} (pole rate {-pole.gamma0:.6f})")

# long times: the pole term dies and a power law takes over
times = characteristic_times(model)
print(f"\nend of quadratic stretch t_S = {times.t_S_numeric:.4f}")
print(f"pole/return crossover t_R = {times.t_R_numeric:.4f} (estimate {times.t_R_formula:.4f})")
t = fine_grid(4 * times.t_R_numeric)[::400]
p = evolve_spectral(model, t).probability
print(f"\n{'t':>10} {'P':>14} {'P t^3':>12}")
for ti, pi in zip(t[1::4], p[1::4]):
    print(f"{ti:10.2f} {pi:14.6e} {pi * ti ** 3:12.4e}")

# the spectral trace agrees with brute-force diagonalization of a long chain
t = fine_grid(200.0)
err = np.max(np.abs(evolve_spectral(model, t).amplitude - evolve_diagonalization(model, t).amplitude))
print(f"\nmax |c_spectral - c_chain| on [0, 200]: {err:.2e}")
