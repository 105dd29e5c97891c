#!/usr/bin/env python3
"""Large-DGD behaviour: ESD threshold in |eta1|^2, ESD probability plateau and
the purity range.

$ python3 scripts/plateau_checks.py
"""

import numpy as np

from pmdesd.metrics import analytic_metrics, esd_threshold
from pmdesd.source import FilterSpec, gaussian_correlation
from pmdesd.validation import detected_threshold

rf = gaussian_correlation(FilterSpec())

print("delta_tau  detected  formula")
for dt in (0.0, 0.5, 1.0, 2.0, 3.0):
    found, _, _ = detected_threshold(20 + dt, 20, rf)
    print(f"{dt:9.2f}  {found:.5f}   {esd_threshold(dt, rf):.5f}")

x = (np.arange(512) + 0.5) / 512
for ta, tb in ((20, 20), (20, 0), (30, 20)):
    c = analytic_metrics(x, ta, tb, rf)["concurrence"]
    print(f"ESD probability at ({ta}, {tb}): {np.mean(c == 0):.6f}")

xs = np.linspace(0, 1, 20001)
for ta, tb in ((20, 20), (30, 20)):
    p = analytic_metrics(xs, ta, tb, rf)["purity"]
    print(f"min purity at ({ta}, {tb}): {p.min():.8f} at |eta1|^2 = {xs[np.argmin(p)]:.4f}")
