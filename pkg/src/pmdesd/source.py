"""Entangled-pair source description: launch state, filters, and the
normalized two-photon autocorrelation R_f(tau).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import mpmath
import numpy as np

from .linalg import JonesVector
from .tolerances import TOL


@dataclass(frozen=True)
class SourceConfig:
    """Launch polarizations of the two photons and the relative phase alpha."""

    u_a: JonesVector
    u_b: JonesVector
    alpha: float = 0.0

    @property
    def u_a_perp(self) -> JonesVector:
        return self.u_a.orthogonal()

    @property
    def u_b_perp(self) -> JonesVector:
        return self.u_b.orthogonal()


@dataclass(frozen=True)
class PspBases:
    """Principal states of polarization of the two fibers."""

    s_a: JonesVector
    s_b: JonesVector

    @property
    def s_a_perp(self) -> JonesVector:
        return self.s_a.orthogonal()

    @property
    def s_b_perp(self) -> JonesVector:
        return self.s_b.orthogonal()


@dataclass(frozen=True)
class SourceDecomposition:
    eta1: complex
    eta2: complex

    def __post_init__(self):
        total = abs(self.eta1) ** 2 + abs(self.eta2) ** 2
        if abs(total - 1.0) > TOL.normalization:
            raise ValueError(f"|eta1|^2 + |eta2|^2 = {total!r}, expected 1")

    @classmethod
    def from_eta1_sq(cls, eta1_sq: float, phase1: float = 0.0, phase2: float = 0.0):
        if not 0.0 <= eta1_sq <= 1.0:
            raise ValueError(f"|eta1|^2 must lie in [0, 1], got {eta1_sq!r}")
        return cls(
            complex(np.sqrt(eta1_sq) * np.exp(1j * phase1)),
            complex(np.sqrt(1.0 - eta1_sq) * np.exp(1j * phase2)),
        )

    @property
    def eta1_sq(self) -> float:
        return abs(self.eta1) ** 2

    @property
    def eta2_sq(self) -> float:
        return abs(self.eta2) ** 2


def psp_decompose(src: SourceConfig, bases: PspBases) -> SourceDecomposition:
    """Coefficients (eta1, eta2) of the launch state on the PSP product bases."""
    e = np.exp(1j * src.alpha)
    sa, sb, sbp = bases.s_a, bases.s_b, bases.s_b_perp
    ua, ub, uap, ubp = src.u_a, src.u_b, src.u_a_perp, src.u_b_perp
    eta1 = sa.dot(ua) * sb.dot(ub) + e * sa.dot(uap) * sb.dot(ubp)
    eta2 = sa.dot(ua) * sbp.dot(ub) + e * sa.dot(uap) * sbp.dot(ubp)
    return SourceDecomposition(complex(eta1), complex(eta2))


# --------------------------------------------------------------------------
# Autocorrelation


@dataclass(frozen=True)
class CorrelationFunction:
    """Normalized autocorrelation R(tau) with R(0) = 1.

    ``func`` maps an array of delays to values; ``mp_func``, when present,
    evaluates a single delay in mpmath arithmetic and is used to settle
    concurrence values that double precision cannot resolve.
    """

    func: Callable[[np.ndarray], np.ndarray]
    is_real: bool
    mp_func: Optional[Callable] = None
    label: str = ""

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        out = self.func(tau)
        return out.real if self.is_real else out

    def magnitude(self, tau):
        return np.abs(self(tau))


@dataclass(frozen=True)
class FilterSpec:
    """Gaussian intensity filters of RMS bandwidth B centred at +-omega_A."""

    bandwidth: float = 1.0
    detuning: float = 0.0

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth!r}")


def gaussian_power(omega, center, bandwidth):
    """|H(omega)|^2 for a Gaussian filter with RMS bandwidth ``bandwidth``."""
    return np.exp(-((np.asarray(omega) - center) ** 2) / (2 * bandwidth**2))


def gaussian_correlation(spec: FilterSpec) -> CorrelationFunction:
    """Closed-form R_f for Gaussian filters.

    The two-photon spectrum |H_A(w) H_B(-w)|^2 is a Gaussian centred at
    omega_A with variance B^2/2, so R_f(tau) = exp(i omega_A tau - B^2 tau^2 / 4).
    """
    b, w0 = float(spec.bandwidth), float(spec.detuning)

    if w0 == 0.0:

        def func(tau):
            return np.exp(-(b * tau) ** 2 / 4)

        def mp_func(tau):
            return mpmath.exp(-(mpmath.mpf(b) * tau) ** 2 / 4)

        return CorrelationFunction(func, True, mp_func, f"gaussian(B={b})")

    def cfunc(tau):
        return np.exp(1j * w0 * tau - (b * tau) ** 2 / 4)

    def mp_cfunc(tau):
        return mpmath.exp(1j * mpmath.mpf(w0) * tau - (mpmath.mpf(b) * tau) ** 2 / 4)

    return CorrelationFunction(cfunc, False, mp_cfunc, f"gaussian(B={b}, omega_A={w0})")


def gaussian_filter_spectrum(spec: FilterSpec, n: int = 4097, span: float = 8.0):
    """Tabulate |H_A(w)|^2 |H_B(-w)|^2 on a uniform grid.

    The grid covers +-``span`` standard deviations of the product spectrum
    around its centre; it is symmetric about zero when the filters are not
    detuned.
    """
    sigma = spec.bandwidth / np.sqrt(2.0)
    omega = spec.detuning + np.linspace(-span * sigma, span * sigma, n)
    power = gaussian_power(omega, spec.detuning, spec.bandwidth) * gaussian_power(
        -omega, -spec.detuning, spec.bandwidth
    )
    return omega, power


def numeric_correlation(omega, spectrum, chunk: int = 256) -> CorrelationFunction:
    """R_f by trapezoid quadrature of a tabulated two-photon power spectrum.

    R(tau) = int S(w) exp(i w tau) dw / int S(w) dw on the supplied uniform
    grid. A spectrum that is mirror-symmetric about w = 0 yields a real R.
    """
    omega = np.asarray(omega, dtype=float)
    spectrum = np.asarray(spectrum, dtype=float)
    if omega.ndim != 1 or omega.size < 2 or omega.shape != spectrum.shape:
        raise ValueError("omega and spectrum must be matching 1-d arrays with >= 2 samples")
    if np.any(spectrum < 0):
        raise ValueError("spectrum must be non-negative")
    weights = np.full(omega.size, np.diff(omega).mean())
    weights[[0, -1]] *= 0.5
    if not np.allclose(np.diff(omega), weights[1], rtol=1e-9, atol=0):
        raise ValueError("omega grid must be uniform")
    w = weights * spectrum
    total = w.sum()
    if not total > 0:
        raise ValueError("spectrum integrates to zero")
    w = w / total

    scale = np.max(np.abs(omega))
    symmetric = np.allclose(omega, -omega[::-1], rtol=0, atol=1e-12 * scale) and np.allclose(
        spectrum, spectrum[::-1], rtol=1e-12, atol=1e-300
    )

    def func(tau):
        flat = np.atleast_1d(tau).ravel()
        out = np.empty(flat.size, dtype=float if symmetric else complex)
        for i in range(0, flat.size, chunk):
            phase = np.outer(flat[i : i + chunk], omega)
            out[i : i + chunk] = np.cos(phase) @ w if symmetric else np.exp(1j * phase) @ w
        return out.reshape(np.shape(tau))

    return CorrelationFunction(func, bool(symmetric), None, "numeric")
