"""Parameter sweeps over (tau_A, tau_B, |eta1|^2) and level-set extraction."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .metrics import analytic_metrics
from .source import FilterSpec, gaussian_correlation

REGIONS = ("C0", "S_le_2", "S_gt_2")


@dataclass(frozen=True)
class GridSpec:
    """Sweep grid; DGDs are in units of 1/B."""

    tau_a_min: float = 0.0
    tau_a_max: float = 4.0
    tau_a_count: int = 200
    tau_b_min: float = 0.0
    tau_b_max: float = 4.0
    tau_b_count: int = 200
    tau_b_fixed: float = 1.7
    eta_count: int = 512
    filter: FilterSpec = field(default_factory=FilterSpec)

    def __post_init__(self):
        for name in ("tau_a_count", "tau_b_count", "eta_count"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")
        for lo, hi in ((self.tau_a_min, self.tau_a_max), (self.tau_b_min, self.tau_b_max)):
            if lo < 0 or hi <= lo:
                raise ValueError(f"invalid DGD range [{lo}, {hi}]")
        if self.tau_b_fixed < 0:
            raise ValueError("tau_b_fixed must be non-negative")

    def tau_a(self) -> np.ndarray:
        return np.linspace(self.tau_a_min, self.tau_a_max, self.tau_a_count)

    def tau_b(self) -> np.ndarray:
        return np.linspace(self.tau_b_min, self.tau_b_max, self.tau_b_count)

    def eta_grid(self) -> np.ndarray:
        """Surface samples of |eta1|^2, endpoints included."""
        return np.linspace(0.0, 1.0, self.eta_count)

    def eta_midpoints(self) -> np.ndarray:
        """Midpoints of eta_count equal subintervals of [0, 1]."""
        return (np.arange(self.eta_count) + 0.5) / self.eta_count


@dataclass
class SurfaceTable:
    tau_a: np.ndarray
    tau_b: np.ndarray
    eta1_sq: np.ndarray
    concurrence: np.ndarray
    s_param: np.ndarray
    region: np.ndarray

    def rows(self):
        for i in range(len(self.tau_a)):
            yield (self.tau_a[i], self.eta1_sq[i], self.concurrence[i], self.s_param[i], self.region[i])


@dataclass
class EsdMap:
    """ESD probability on a (tau_A, tau_B) grid; arrays have shape (n_a, n_b)."""

    tau_a: np.ndarray
    tau_b: np.ndarray
    esd_probability: np.ndarray
    min_s: np.ndarray
    eta_count: int

    def rows(self):
        for i, ta in enumerate(self.tau_a):
            for j, tb in enumerate(self.tau_b):
                yield (ta, tb, self.esd_probability[i, j], self.min_s[i, j])


@dataclass
class BoundaryCurve:
    """Level-set points ordered by polar angle about the origin."""

    tau_a: np.ndarray
    tau_b: np.ndarray

    @property
    def angle(self) -> np.ndarray:
        return np.arctan2(self.tau_b, self.tau_a)

    @property
    def radius(self) -> np.ndarray:
        return np.hypot(self.tau_a, self.tau_b)

    def __len__(self):
        return len(self.tau_a)


def classify(concurrence, s_param) -> np.ndarray:
    c = np.asarray(concurrence)
    s = np.asarray(s_param)
    return np.where(c == 0.0, "C0", np.where(s > 2.0, "S_gt_2", "S_le_2"))


def concurrence_surface(grid: GridSpec, mode: str = "equal_dgd") -> SurfaceTable:
    """Concurrence and CHSH value over (tau_A, |eta1|^2).

    ``mode`` is ``equal_dgd`` (tau_B = tau_A) or ``fixed_tau_b``
    (tau_B = grid.tau_b_fixed). Rows are tau_A-major.
    """
    if mode not in ("equal_dgd", "fixed_tau_b"):
        raise ValueError(f"unknown surface mode {mode!r}")
    rf = gaussian_correlation(grid.filter)
    ta = grid.tau_a()[:, None]
    eta = grid.eta_grid()[None, :]
    tb = ta if mode == "equal_dgd" else np.full_like(ta, grid.tau_b_fixed)
    vals = analytic_metrics(eta, ta, tb, rf)
    shape = (ta.shape[0], eta.shape[1])
    c = vals["concurrence"].ravel()
    s = vals["s_param"].ravel()
    return SurfaceTable(
        tau_a=np.broadcast_to(ta, shape).ravel(),
        tau_b=np.broadcast_to(tb, shape).ravel(),
        eta1_sq=np.broadcast_to(eta, shape).ravel(),
        concurrence=c,
        s_param=s,
        region=classify(c, s),
    )


def _map_row(tau_a, tau_b, eta, rf):
    vals = analytic_metrics(eta[None, :], tau_a, tau_b[:, None], rf)
    prob = np.count_nonzero(vals["concurrence"] == 0.0, axis=1) / eta.size
    return prob, vals["s_param"].min(axis=1)


def esd_probability_map(grid: GridSpec, workers: int | None = None) -> EsdMap:
    """Fraction of uniformly spaced |eta1|^2 values with C = 0, per DGD cell.

    Rows of tau_A are evaluated concurrently and gathered in grid order, so
    the result does not depend on ``workers``.
    """
    if grid.eta_count < 100:
        raise ValueError("ESD probability needs at least 100 |eta1|^2 samples")
    rf = gaussian_correlation(grid.filter)
    ta, tb, eta = grid.tau_a(), grid.tau_b(), grid.eta_midpoints()
    workers = workers if workers is not None else (os.cpu_count() or 1)
    if workers <= 1:
        rows = [_map_row(t, tb, eta, rf) for t in ta]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda t: _map_row(t, tb, eta, rf), ta))
    prob = np.stack([r[0] for r in rows])
    min_s = np.stack([r[1] for r in rows])
    return EsdMap(ta, tb, prob, min_s, grid.eta_count)


def level_set(tau_a, tau_b, values, level: float) -> BoundaryCurve:
    """Crossings of ``values == level`` on grid edges, by linear interpolation.

    Every horizontal and vertical cell edge whose end values straddle the
    level contributes one point; endpoints lying exactly on the level count
    once. Points are returned ordered by polar angle.
    """
    f = np.asarray(values, dtype=float) - level
    ta = np.asarray(tau_a, dtype=float)
    tb = np.asarray(tau_b, dtype=float)
    pts = []
    # edges along tau_b (axis 1) and along tau_a (axis 0)
    for axis in (1, 0):
        f0 = f[:, :-1] if axis == 1 else f[:-1, :]
        f1 = f[:, 1:] if axis == 1 else f[1:, :]
        cross = ((f0 < 0) & (f1 > 0)) | ((f0 > 0) & (f1 < 0)) | ((f0 == 0) & (f1 != 0))
        i, j = np.nonzero(cross)
        w = f0[i, j] / (f0[i, j] - f1[i, j])
        if axis == 1:
            pts.append(np.column_stack([ta[i], tb[j] + w * (tb[j + 1] - tb[j])]))
        else:
            pts.append(np.column_stack([ta[i] + w * (ta[i + 1] - ta[i]), tb[j]]))
    pts = np.concatenate(pts) if pts else np.empty((0, 2))
    # a grid node exactly on the level is shared by up to four edges
    pts = np.unique(pts, axis=0)
    order = np.lexsort((np.hypot(pts[:, 0], pts[:, 1]), np.arctan2(pts[:, 1], pts[:, 0])))
    pts = pts[order]
    return BoundaryCurve(pts[:, 0], pts[:, 1])


def s2_boundary(esd_map: EsdMap) -> BoundaryCurve:
    """Level set min-over-eta S = 2."""
    curve = level_set(esd_map.tau_a, esd_map.tau_b, esd_map.min_s, 2.0)
    if len(curve) == 0:
        raise ValueError("min S does not cross 2 inside the map")
    return curve


def esd_free_boundary(esd_map: EsdMap) -> BoundaryCurve:
    """Edge of the region where no |eta1|^2 sample shows ESD.

    The probability field is contoured at half a sample spacing, i.e. the
    midpoint between 'no sample' and 'one sample' with C = 0.
    """
    level = 0.5 / esd_map.eta_count
    curve = level_set(esd_map.tau_a, esd_map.tau_b, esd_map.esd_probability, level)
    if len(curve) == 0:
        raise ValueError("no ESD-free boundary inside the map")
    return curve


@dataclass(frozen=True)
class StretchFit:
    factor: float
    residual: float
    n_points: int


def boundary_stretch_factor(b1: BoundaryCurve, b2: BoundaryCurve) -> StretchFit:
    """Scalar k minimizing sum (k r1(theta) - r2(theta))^2 over shared angles.

    r1 is interpolated in polar angle at the angles of b2 points that lie
    within b1's angular support. ``residual`` is the RMS radial mismatch
    relative to the RMS of r2.
    """
    th1, r1 = b1.angle, b1.radius
    th2, r2 = b2.angle, b2.radius
    if len(th1) < 2 or len(th2) < 1:
        raise ValueError("curves need at least two points")
    order = np.argsort(th1, kind="stable")
    th1, r1 = th1[order], r1[order]
    inside = (th2 >= th1[0]) & (th2 <= th1[-1])
    if not np.any(inside):
        raise ValueError("curves have disjoint angular support")
    r1i = np.interp(th2[inside], th1, r1)
    r2i = r2[inside]
    k = float(np.dot(r1i, r2i) / np.dot(r1i, r1i))
    resid = float(np.sqrt(np.mean((k * r1i - r2i) ** 2)) / np.sqrt(np.mean(r2i**2)))
    return StretchFit(k, resid, int(inside.sum()))
