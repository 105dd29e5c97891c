"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary
(and directly when the module is run as a script).
"""

import time

import numpy as np
import pytest

from pmdesd.channel import density_matrices
from pmdesd.metrics import (
    analytic_metrics,
    chsh_numeric,
    concurrence_wootters,
    esd_threshold,
    purity_closed_form,
    purity_trace,
)
from pmdesd.source import FilterSpec, gaussian_correlation
from pmdesd.sweep import GridSpec, boundary_stretch_factor, esd_free_boundary, esd_probability_map, s2_boundary
from pmdesd.validation import Ensemble, detected_threshold, state_structure_error, x_state_error

from conftest import ACCEPTANCE_LINES

RF = gaussian_correlation(FilterSpec())
SEED = 20240611


def record(n, ok, text):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_1_oracle_equivalence():
    t0 = time.perf_counter()
    ens = Ensemble.draw(np.random.default_rng(SEED), 10_000, RF)
    vals = analytic_metrics(ens.x, ens.tau_a, ens.tau_b, RF)
    ec = np.max(np.abs(vals["concurrence"] - concurrence_wootters(ens.rho)))
    es = np.max(np.abs(vals["s_param"] - chsh_numeric(ens.rho)))
    ep = np.max(np.abs(vals["purity"] - purity_trace(ens.rho)))
    dt = time.perf_counter() - t0
    ok = ec <= 1e-9 and es <= 1e-9 and ep <= 1e-12 and dt < 10
    assert record(1, ok, f"10^4 points, max|dC|={ec:.2e} max|dS|={es:.2e} max|dP|={ep:.2e}, {dt:.2f} s")


def test_2_single_arm_law():
    ta = np.array([0.5, 1.0, 2.0, 4.0])[:, None]
    x = np.linspace(0, 1, 101)[None, :]
    vals = analytic_metrics(x, ta, 0.0, RF)
    c, s = vals["concurrence"], vals["s_param"]
    rho = density_matrices(np.sqrt(x), np.sqrt(1 - x), 0.0, ta, 0.0, RF)
    ec = max(np.max(np.abs(c - RF(ta))), np.max(np.abs(concurrence_wootters(rho) - RF(ta))))
    es = max(np.max(np.abs(s - 2 * np.sqrt(1 + c**2))), np.max(np.abs(chsh_numeric(rho) - 2 * np.sqrt(1 + RF(ta) ** 2))))
    ok = ec <= 1e-9 and es <= 1e-9
    assert record(2, ok, f"tau_B=0: max|C-R(tau_A)|={ec:.2e}, max|S-2sqrt(1+C^2)|={es:.2e}")


def test_3_decoherence_free_subspace():
    t = np.linspace(0, 50, 100)
    vals = analytic_metrics(1.0, t, t, RF)
    rho = density_matrices(1.0, 0.0, 0.0, t, t, RF)
    ec = max(np.max(np.abs(vals["concurrence"] - 1)), np.max(np.abs(concurrence_wootters(rho) - 1)))
    ep = max(np.max(np.abs(vals["purity"] - 1)), np.max(np.abs(purity_trace(rho) - 1)))
    ok = ec <= 1e-12 and ep <= 1e-12
    assert record(3, ok, f"|eta1|=1, tau up to 50: max|C-1|={ec:.2e}, max|P-1|={ep:.2e}")


def test_4_esd_threshold():
    n = 10_000
    first, x, c = detected_threshold(20.0, 20.0, RF, n)
    below_zero = bool(np.all(c[x < 0.5] == 0.0))
    above_pos = bool(np.all(c[x > 0.5] > 0.0))
    errs = {}
    for dt in (0.0, 0.5, 1.0, 2.0):
        found, _, _ = detected_threshold(20.0 + dt, 20.0, RF, n)
        errs[dt] = abs(found - esd_threshold(dt, RF))
    ok = below_zero and above_pos and abs(first - 0.5) <= 1 / n and max(errs.values()) <= 1e-3
    assert record(
        4, ok,
        f"C==0 below 0.5: {below_zero}, C>0 above: {above_pos}, boundary {first:.5f}; "
        f"max formula error {max(errs.values()):.1e}",
    )


def test_5_esd_probability_plateau():
    g = GridSpec(tau_a_max=20.0, tau_a_count=2, tau_b_max=20.0, tau_b_count=2, eta_count=512)
    m = esd_probability_map(g)
    p_eq, p_one = m.esd_probability[1, 1], m.esd_probability[1, 0]
    ok = abs(p_eq - 0.5) <= 1 / 512 and p_one == 0.0
    assert record(5, ok, f"P_ESD(20,20)={p_eq:.6f}, P_ESD(20,0)={float(p_one)!r}")


def _min_purity(ta, tb):
    x = np.linspace(0, 1, 200_001)
    return float(purity_closed_form(x, 1 - x, (ta, tb), RF).min())


def test_6_purity_asymptotics():
    eq, apart = _min_purity(20.0, 20.0), _min_purity(30.0, 20.0)
    stated = abs(eq - 0.25) <= 1e-6 and abs(apart - 1 / 3) <= 1e-3
    exchanged = abs(eq - 1 / 3) <= 1e-6 and abs(apart - 0.25) <= 1e-3
    record(
        6, stated,
        f"min P at dtau=0: {eq:.9f}, at dtau=10: {apart:.9f}; stated 1/4 and 1/3 not met, "
        f"values are 1/3 and 1/4 (labels exchanged, see README)" if not stated else f"{eq:.9f}, {apart:.9f}",
    )
    assert exchanged


@pytest.mark.xfail(strict=True, reason="the (1/4, 1/3) assignment contradicts the purity formula itself")
def test_6_purity_asymptotics_as_stated():
    assert abs(_min_purity(20.0, 20.0) - 0.25) <= 1e-6
    assert abs(_min_purity(30.0, 20.0) - 1 / 3) <= 1e-3


def test_7_boundary_stretch():
    t0 = time.perf_counter()
    m = esd_probability_map(GridSpec(tau_a_count=200, tau_b_count=200, eta_count=512))
    fit = boundary_stretch_factor(s2_boundary(m), esd_free_boundary(m))
    dt = time.perf_counter() - t0
    ok = 1.3 <= fit.factor <= 1.7 and dt < 60
    assert record(7, ok, f"stretch factor {fit.factor:.4f}, relative residual {fit.residual:.4f}, {dt:.1f} s")


def test_8_structural_invariants():
    rng = np.random.default_rng(SEED + 1)
    ens = Ensemble.draw(rng, 2_000, RF)
    structure = state_structure_error(ens.rho)

    def oracles(rho):
        return np.stack([concurrence_wootters(rho), chsh_numeric(rho), purity_trace(rho)])

    ph = rng.uniform(0, 2 * np.pi, (3, len(ens.x)))
    rotated = density_matrices(ens.eta1 * np.exp(1j * ph[0]), ens.eta2 * np.exp(1j * ph[1]), ph[2],
                               ens.tau_a, ens.tau_b, RF)
    swapped = density_matrices(ens.eta1, ens.eta2, ens.alpha, ens.tau_b, ens.tau_a, RF)
    base = oracles(ens.rho)
    phase = float(np.max(np.abs(base - oracles(rotated))))
    swap = float(np.max(np.abs(base - oracles(swapped))))
    xerr = max(x_state_error(ens.rho[i]) for i in range(300))
    ok = structure <= 1e-10 and phase <= 1e-9 and swap <= 1e-9 and xerr <= 1e-9
    assert record(
        8, ok,
        f"structure {structure:.1e}, phase {phase:.1e}, swap {swap:.1e}, X-state {xerr:.1e}",
    )


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and not name.endswith("as_stated"):
            try:
                fn()
            except AssertionError:
                pass
