#!/usr/bin/env python3
"""ESD probability over (tau_A, tau_B), the S = 2 boundary, the ESD-free
boundary and the radial stretch factor relating them.

$ python3 scripts/fig2_esd_map.py [outdir]
"""

import sys
import time
from pathlib import Path

import numpy as np

from pmdesd.cli import MAP_COLUMNS, format_rows
from pmdesd.sweep import GridSpec, boundary_stretch_factor, esd_free_boundary, esd_probability_map, s2_boundary


def write_curve(path, curve):
    rows = zip(curve.tau_a, curve.tau_b)
    path.write_text(format_rows(("tau_a", "tau_b"), rows, "csv"))


if __name__ == "__main__":
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "results")
    out.mkdir(parents=True, exist_ok=True)
    grid = GridSpec(tau_a_count=200, tau_b_count=200, eta_count=512)

    t0 = time.perf_counter()
    m = esd_probability_map(grid)
    print(f"map {grid.tau_a_count}x{grid.tau_b_count}, {grid.eta_count} eta samples: {time.perf_counter() - t0:.1f} s")
    (out / "esd_map.csv").write_text(format_rows(MAP_COLUMNS, m.rows(), "csv"))

    s2 = s2_boundary(m)
    free = esd_free_boundary(m)
    write_curve(out / "boundary_s2.csv", s2)
    write_curve(out / "boundary_esd_free.csv", free)

    diag = np.diag(m.esd_probability)
    onset = m.tau_a[np.argmax(diag > 0)]
    s_onset = m.tau_a[np.argmax(np.diag(m.min_s) < 2)]
    print(f"diagonal: S < 2 from tau = {s_onset:.3f}, ESD from tau = {onset:.3f}, ratio {onset / s_onset:.3f}")
    print(f"probability at (4, 4): {m.esd_probability[-1, -1]:.4f}, on tau_B = 0 column: max {m.esd_probability[:, 0].max()}")
    fit = boundary_stretch_factor(s2, free)
    print(f"stretch factor {fit.factor:.4f} (relative RMS residual {fit.residual:.4f}, {fit.n_points} points)")
