"""Numerical tolerances shared across the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    algebraic: float = 1e-12
    iterative: float = 1e-9
    jacobi: float = 1e-13
    normalization: float = 1e-9
    psd: float = 1e-10
    marginal: float = 1e-10
    eig_clamp: float = 1e-10
    esd_oracle: float = 1e-9
    # double-precision concurrence margins closer to zero than this are
    # re-evaluated in extended precision before deciding C == 0
    refine_window: float = 1e-9
    refine_dps: int = 80
    cross_path: float = 1e-9


TOL = Tolerances()
