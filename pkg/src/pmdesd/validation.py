"""Invariant families checked by ``pmdesd validate``.

Each family returns a :class:`Check` with the largest observed error and
the tolerance it was held to. All randomness flows from one seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .channel import density_matrices, partial_trace
from .linalg import hermitian_eigenvalues_4x4
from .metrics import (
    analytic_metrics,
    chsh_numeric,
    concurrence_wootters,
    esd_threshold,
    purity_trace,
    x_state_concurrence,
    x_state_reduce,
)
from .source import CorrelationFunction, FilterSpec, gaussian_correlation

DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class Check:
    family: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.family:<24} max_error={self.max_error:.6e} tol={self.tolerance:.1e}"


@dataclass
class Ensemble:
    """Random launch/PMD points with both metric routes evaluated."""

    x: np.ndarray
    tau_a: np.ndarray
    tau_b: np.ndarray
    alpha: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    rho: np.ndarray

    @classmethod
    def draw(cls, rng: np.random.Generator, n: int, rf: CorrelationFunction, tau_max: float = 5.0):
        x = rng.uniform(0.0, 1.0, n)
        ta = rng.uniform(0.0, tau_max, n)
        tb = rng.uniform(0.0, tau_max, n)
        alpha = rng.uniform(0.0, 2 * np.pi, n)
        ph = rng.uniform(0.0, 2 * np.pi, (2, n))
        eta1 = np.sqrt(x) * np.exp(1j * ph[0])
        eta2 = np.sqrt(1 - x) * np.exp(1j * ph[1])
        rho = density_matrices(eta1, eta2, alpha, ta, tb, rf)
        return cls(x, ta, tb, alpha, eta1, eta2, rho)


def _oracle(rho):
    return concurrence_wootters(rho), chsh_numeric(rho), purity_trace(rho)


def ensemble_checks(ens: Ensemble, rf, tol: Optional[float] = None) -> list[Check]:
    vals = analytic_metrics(ens.x, ens.tau_a, ens.tau_b, rf)
    c, s, p = _oracle(ens.rho)
    return [
        Check("ensemble_concurrence", float(np.max(np.abs(vals["concurrence"] - c))), tol if tol is not None else 1e-9),
        Check("ensemble_s_param", float(np.max(np.abs(vals["s_param"] - s))), tol if tol is not None else 1e-9),
        Check("ensemble_purity", float(np.max(np.abs(vals["purity"] - p))), tol if tol is not None else 1e-12),
    ]


def state_structure_error(rho) -> float:
    """Largest violation of Hermiticity, unit trace, PSD and I/2 marginals."""
    rho = np.asarray(rho)
    herm = np.max(np.abs(rho - np.swapaxes(rho.conj(), -1, -2)))
    trace = np.max(np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1))
    neg = max(0.0, -float(np.min(hermitian_eigenvalues_4x4(rho))))
    half = np.eye(2) / 2
    marg = max(np.max(np.abs(partial_trace(rho, k) - half)) for k in ("a", "b"))
    return float(max(herm, trace, neg, marg))


def single_arm_check(rf, rng, tol=None) -> Check:
    ta = np.array([0.5, 1.0, 2.0, 4.0])[:, None]
    x = np.concatenate([[0.0, 0.5, 1.0], rng.uniform(0, 1, 29)])[None, :]
    vals = analytic_metrics(x, ta, 0.0, rf)
    c, s = vals["concurrence"], vals["s_param"]
    err_c = np.max(np.abs(c - rf.magnitude(ta)))
    err_s = np.max(np.abs(s - 2 * np.sqrt(1 + c**2)))
    rho = density_matrices(np.sqrt(x), np.sqrt(1 - x), 0.0, ta, 0.0, rf)
    err_o = np.max(np.abs(concurrence_wootters(rho) - rf.magnitude(ta)))
    return Check("single_arm_law", float(max(err_c, err_s, err_o)), tol if tol is not None else 1e-9)


def decoherence_free_check(rf, tol=None) -> Check:
    t = np.linspace(0.0, 50.0, 100)
    vals = analytic_metrics(1.0, t, t, rf)
    err = max(np.max(np.abs(vals["concurrence"] - 1)), np.max(np.abs(vals["purity"] - 1)))
    return Check("decoherence_free", float(err), tol if tol is not None else 1e-12)


def detected_threshold(tau_a, tau_b, rf, n=10_000) -> tuple[float, np.ndarray, np.ndarray]:
    """Smallest midpoint |eta1|^2 with C > 0, together with the sweep."""
    x = (np.arange(n) + 0.5) / n
    c = analytic_metrics(x, tau_a, tau_b, rf)["concurrence"]
    pos = np.nonzero(c > 0)[0]
    first = x[pos[0]] if pos.size else np.inf
    return float(first), x, c


def esd_threshold_checks(rf, tol=None, base=20.0, n=10_000) -> list[Check]:
    first, x, c = detected_threshold(base, base, rf, n)
    # C must be exactly zero below the threshold and positive above it
    wrong = np.count_nonzero((x < 0.5) & (c != 0.0)) + np.count_nonzero((x > 0.5) & (c <= 0.0))
    checks = [
        Check("esd_exact_zero", float(wrong), tol if tol is not None else 0.0),
        Check("esd_threshold_equal", abs(first - 0.5), tol if tol is not None else 1.0 / n),
    ]
    errs = []
    for dt in (0.0, 0.5, 1.0, 2.0):
        found, _, _ = detected_threshold(base + dt, base, rf, n)
        errs.append(abs(found - esd_threshold(dt, rf)))
    checks.append(Check("esd_threshold_formula", float(max(errs)), tol if tol is not None else 1e-3))
    return checks


def phase_invariance_check(ens: Ensemble, rf, rng, tol=None, m=500) -> Check:
    m = min(m, len(ens.x))
    sl = slice(0, m)
    ph = rng.uniform(0, 2 * np.pi, (3, m))
    rho2 = density_matrices(
        ens.eta1[sl] * np.exp(1j * ph[0]),
        ens.eta2[sl] * np.exp(1j * ph[1]),
        ph[2],
        ens.tau_a[sl],
        ens.tau_b[sl],
        rf,
    )
    a, b = np.array(_oracle(ens.rho[sl])), np.array(_oracle(rho2))
    return Check("phase_invariance", float(np.max(np.abs(a - b))), tol if tol is not None else 1e-9)


def swap_symmetry_check(ens: Ensemble, rf, tol=None, m=500) -> Check:
    sl = slice(0, min(m, len(ens.x)))
    rho2 = density_matrices(ens.eta1[sl], ens.eta2[sl], ens.alpha[sl], ens.tau_b[sl], ens.tau_a[sl], rf)
    a, b = np.array(_oracle(ens.rho[sl])), np.array(_oracle(rho2))
    return Check("swap_symmetry", float(np.max(np.abs(a - b))), tol if tol is not None else 1e-9)


X_ZERO = [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)]


def x_state_error(rho) -> float:
    """Off-X entries, diagonal pattern and concurrence mismatch after reduction."""
    red = x_state_reduce(rho)
    m = red.matrix
    off = max(abs(m[i, j]) for i, j in X_ZERO)
    diag = max(abs(m[0, 0] - m[3, 3]), abs(m[1, 1] - m[2, 2]))
    order = max(0.0, float((m[1, 1] - m[0, 0]).real))
    conc = abs(x_state_concurrence(m) - concurrence_wootters(rho))
    return float(max(off, diag, order, conc))


def x_state_check(ens: Ensemble, tol=None, m=200) -> Check:
    err = max(x_state_error(ens.rho[i]) for i in range(min(m, len(ens.x))))
    return Check("x_state_reduction", err, tol if tol is not None else 1e-9)


def run_all(
    seed: int = DEFAULT_SEED,
    samples: int = 10_000,
    tolerance: Optional[float] = None,
    spec: FilterSpec = FilterSpec(),
    log: Optional[Callable[[str], None]] = None,
) -> list[Check]:
    rf = gaussian_correlation(spec)
    rng = np.random.default_rng(seed)
    ens = Ensemble.draw(rng, samples, rf)
    checks = ensemble_checks(ens, rf, tolerance)
    checks.append(Check("state_structure", state_structure_error(ens.rho), tolerance if tolerance is not None else 1e-10))
    checks.append(single_arm_check(rf, rng, tolerance))
    checks.append(decoherence_free_check(rf, tolerance))
    checks.extend(esd_threshold_checks(rf, tolerance))
    checks.append(phase_invariance_check(ens, rf, rng, tolerance))
    checks.append(swap_symmetry_check(ens, rf, tolerance))
    checks.append(x_state_check(ens, tolerance))
    if log is not None:
        for c in checks:
            log(c.line())
    return checks
