"""Effective decay rate under repeated measurement with period tau.

Run with ``python3 demos/zeno_scan.py``.
"""
import numpy as np

from chaindecay import ChainModel, find_tau_star_star, zeno_report

for label, model in (("weak, center", ChainModel(2.0, 0.2)),
                     ("weak, off center", ChainModel(2.6, 0.2)),
                     ("strong", ChainModel(2.0, 1.5))):
    taus = np.geomspace(0.05, 400.0, 12)
    report = zeno_report(model, taus)
    print(f"\n{label}: gamma0 = {report.gamma0:.6f}")
    for tau, rate, kind in zip(report.tau_grid, report.gamma_eff, report.classification):
        print(f"  tau = {tau:9.3f}  gamma_eff/gamma0 = {rate / report.gamma0:9.5f}  {kind}")
    if report.tau_star is not None:
        print(f"  first crossing of gamma0: tau* = {report.tau_star:.4f}")
    peak = find_tau_star_star(model)
    print(f"  rate peak: tau** = {peak.tau:.4f}, ratio {peak.ratio:.6f}, "
          f"prominence {peak.prominence:.3e}")
    for key, text in report.notes.items():
        print(f"  note ({key}): {text}")
