"""Output two-photon density matrix after two PMD fibers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import hermitian_eigenvalues_4x4
from .source import CorrelationFunction, SourceDecomposition
from .tolerances import TOL

# Ordered PSP product basis:
#   0 <-> (s_A, s_B), 1 <-> (s'_A, s_B), 2 <-> (s_A, s'_B), 3 <-> (s'_A, s'_B)
BASIS_LABELS = ("sA,sB", "sA',sB", "sA,sB'", "sA',sB'")


@dataclass(frozen=True)
class PmdRealization:
    """Differential group delays of the two fibers (units of 1/B unless noted)."""

    tau_a: float
    tau_b: float

    def __post_init__(self):
        if not (self.tau_a >= 0 and self.tau_b >= 0):
            raise ValueError(f"DGDs must be non-negative, got ({self.tau_a!r}, {self.tau_b!r})")

    @property
    def delta_tau(self) -> float:
        return self.tau_a - self.tau_b

    @property
    def has_pmd(self) -> bool:
        return self.tau_a > 0 or self.tau_b > 0


@dataclass(frozen=True)
class TwoPhotonDensityMatrix:
    matrix: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def partial_trace_a(self) -> np.ndarray:
        """Reduced state of photon B (trace over photon A)."""
        return partial_trace(self.matrix, keep="b")

    def partial_trace_b(self) -> np.ndarray:
        return partial_trace(self.matrix, keep="a")

    def check(self) -> None:
        """Raise ValueError unless Hermitian, unit trace, PSD, with I/2 marginals."""
        check_state(self.matrix)


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduced single-photon state in the PSP basis of its own fiber.

    Index ordering is (b, a) -> 2*b + a, i.e. photon A is the fast index.
    """
    r = np.asarray(rho).reshape(np.shape(rho)[:-2] + (2, 2, 2, 2))
    # axes: b, a, b', a'
    if keep == "a":
        return np.einsum("...iaib->...ab", r)
    if keep == "b":
        return np.einsum("...aibi->...ab", r)
    raise ValueError("keep must be 'a' or 'b'")


def check_state(rho) -> None:
    rho = np.asarray(rho)
    if np.max(np.abs(rho - np.swapaxes(rho.conj(), -1, -2))) > TOL.algebraic:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho, axis1=-2, axis2=-1)
    if np.max(np.abs(tr - 1.0)) > TOL.algebraic:
        raise ValueError("density matrix does not have unit trace")
    if np.min(hermitian_eigenvalues_4x4(rho)) < -TOL.psd:
        raise ValueError("density matrix is not positive semidefinite")
    half = np.eye(2) / 2
    for keep in ("a", "b"):
        if np.max(np.abs(partial_trace(rho, keep) - half)) > TOL.marginal:
            raise ValueError(f"marginal of photon {keep.upper()} is not maximally mixed")


def density_matrices(eta1, eta2, alpha, tau_a, tau_b, rf: CorrelationFunction) -> np.ndarray:
    """Vectorized density-matrix construction; inputs broadcast, output (..., 4, 4).

    The state after the fibers is a sum of four time-shifted copies of the
    two-photon waveform with amplitudes a_j and delays d_j; tracing over
    time leaves rho_jk = a_j a_k* R(d_k - d_j) / 2. For a real R this is
    exactly the tabulated closed form (rho_11 = |eta1|^2/2, ...,
    rho_23 = -(eta2*)^2 e^{i alpha} R(tau_A + tau_B)/2).
    """
    eta1, eta2, alpha, tau_a, tau_b = np.broadcast_arrays(
        *(np.asarray(v) for v in (eta1, eta2, alpha, tau_a, tau_b))
    )
    eta1 = eta1.astype(complex)
    eta2 = eta2.astype(complex)
    tau_a = tau_a.astype(float)
    tau_b = tau_b.astype(float)
    e = np.exp(1j * alpha)
    amp = np.stack([eta1, -np.conj(eta2) * e, eta2, np.conj(eta1) * e], axis=-1)
    diff, tot = (tau_a - tau_b) / 2, (tau_a + tau_b) / 2
    delay = np.stack([diff, -tot, tot, -diff], axis=-1)
    lag = delay[..., None, :] - delay[..., :, None]
    corr = np.asarray(rf(lag), dtype=complex)
    rho = amp[..., :, None] * np.conj(amp[..., None, :]) * corr / 2
    # entries on the diagonal are exact
    idx = np.arange(4)
    rho[..., idx, idx] = (np.abs(amp) ** 2 / 2).astype(complex)
    return rho


def build_density_matrix(
    dec: SourceDecomposition, alpha: float, pmd: PmdRealization, rf: CorrelationFunction
) -> TwoPhotonDensityMatrix:
    total = abs(dec.eta1) ** 2 + abs(dec.eta2) ** 2
    if abs(total - 1.0) > TOL.normalization:
        raise ValueError(f"decomposition not normalized: {total!r}")
    rho = density_matrices(dec.eta1, dec.eta2, alpha, pmd.tau_a, pmd.tau_b, rf)
    return TwoPhotonDensityMatrix(rho)


def single_photon_purity(overlap, tau, rg: CorrelationFunction):
    """Purity of a single polarized photon after a fiber with DGD ``tau``.

    ``overlap`` is |u . s|^2 between the launch and principal states.
    """
    overlap = np.asarray(overlap, dtype=float)
    if np.any((overlap < 0) | (overlap > 1)):
        raise ValueError("overlap must lie in [0, 1]")
    r2 = rg.magnitude(tau) ** 2
    p = 1 - 2 * overlap * (1 - overlap) * (1 - r2)
    return float(p) if np.ndim(p) == 0 else p
