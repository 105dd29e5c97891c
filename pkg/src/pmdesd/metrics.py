"""Purity, concurrence and maximal CHSH parameter of PMD-affected pairs.

Two independent routes are provided. The closed-form route works from
(|eta1|^2, tau_A, tau_B, R_f) through the eigenvalues of S^T S, where
S_nm = Tr(rho sigma_n x sigma_m). The numerical route works from the 4x4
density matrix itself: Wootters' concurrence, Tr rho^2 and the Horodecki
CHSH bound from a numerically diagonalized S^T S.

Tensor products follow ``np.kron``: the first factor acts on the slow index
of the PSP basis, which is photon B, so rows of S belong to photon B.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import mpmath
import numpy as np

from .channel import PmdRealization, build_density_matrix, partial_trace
from .linalg import (
    SIGMA_YY,
    hermitian_sqrt,
    jacobi_eigh,
    pauli,
    rotation_to_su2,
    jacobi_singular_values,
    sym_eigenvalues_3x3,
)
from .source import CorrelationFunction, SourceDecomposition
from .tolerances import TOL

_PAULI_PAIRS = np.array([[np.kron(pauli(n), pauli(m)) for m in (1, 2, 3)] for n in (1, 2, 3)])

TSIRELSON = 2 * np.sqrt(2)


@dataclass(frozen=True)
class EigenTriple:
    """Unsorted eigenvalues (l1, l2, l3) of S^T S.

    ``det_s`` is the determinant of S itself. Only its sign is used: for
    det S <= 0 the Bell weights give C = (sum of roots - 1)/2, otherwise the
    smallest root enters with a minus sign. Both expressions have the same
    positive part, but only the signed one is strictly negative for
    separable states instead of rounding around zero.
    """

    l1: float
    l2: float
    l3: float
    det_s: float = -1.0

    def sorted(self):
        return tuple(sorted((self.l1, self.l2, self.l3), reverse=True))


@dataclass(frozen=True)
class MetricValues:
    purity: float
    concurrence: float
    s_param: float
    esd: bool


@dataclass(frozen=True)
class EntanglementReport:
    purity: float
    concurrence: float
    s_param: float
    esd: bool
    analytic_used: bool
    analytic: Optional[MetricValues] = None
    oracle: Optional[MetricValues] = None

    def disagreement(self) -> float:
        """Largest |analytic - oracle| over the three metrics (0 if one path is missing)."""
        if self.analytic is None or self.oracle is None:
            return 0.0
        a, o = self.analytic, self.oracle
        return max(
            abs(a.purity - o.purity), abs(a.concurrence - o.concurrence), abs(a.s_param - o.s_param)
        )

    def to_dict(self) -> dict:
        out = {
            "purity": self.purity,
            "concurrence": self.concurrence,
            "s_param": self.s_param,
            "esd": self.esd,
            "analytic_used": self.analytic_used,
        }
        out["analytic"] = asdict(self.analytic) if self.analytic is not None else None
        out["oracle"] = asdict(self.oracle) if self.oracle is not None else None
        return out


# --------------------------------------------------------------------------
# numerical route


def correlation_matrix(rho) -> np.ndarray:
    """S_nm = Tr(rho sigma_n x sigma_m); works on stacks of matrices."""
    rho = np.asarray(rho, dtype=complex)
    # Tr(rho P) = sum_ij rho_ij P_ji
    s = np.einsum("...ij,nmji->...nm", rho, _PAULI_PAIRS)
    return s.real


def purity_trace(rho):
    rho = np.asarray(rho, dtype=complex)
    p = np.sum(np.abs(rho) ** 2, axis=(-2, -1))
    return float(p) if p.ndim == 0 else p


def concurrence_wootters(rho):
    """Wootters concurrence max(0, r1 - r2 - r3 - r4).

    r_i are the square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy),
    obtained as singular values of sqrt(rho) (sy x sy) sqrt(rho)*.
    """
    rho = np.asarray(rho, dtype=complex)
    root = hermitian_sqrt(rho)
    m = root @ SIGMA_YY @ np.conj(root)
    r = jacobi_singular_values(m)
    c = np.maximum(0.0, r[..., 0] - r[..., 1] - r[..., 2] - r[..., 3])
    return float(c) if c.ndim == 0 else c


def chsh_numeric(rho):
    """Maximal CHSH value 2 sqrt(lambda_1 + lambda_2) from the numerical S^T S."""
    s = correlation_matrix(rho)
    lam = sym_eigenvalues_3x3(np.swapaxes(s, -1, -2) @ s)
    lam = np.clip(lam, 0.0, None)
    val = 2 * np.sqrt(lam[..., 0] + lam[..., 1])
    return float(val) if val.ndim == 0 else val


# --------------------------------------------------------------------------
# closed-form route


def _as_taus(pmd):
    if isinstance(pmd, PmdRealization):
        return pmd.tau_a, pmd.tau_b
    tau_a, tau_b = pmd
    return tau_a, tau_b


def _check_eta_sq(x, y):
    if np.max(np.abs(np.asarray(x) + np.asarray(y) - 1.0)) > TOL.normalization:
        raise ValueError("|eta1|^2 + |eta2|^2 must equal 1")


def _require_real(rf: CorrelationFunction):
    if not rf.is_real:
        raise ValueError("closed-form path requires a real R_f (symmetric filters); use the numerical route")


def purity_closed_form(eta1_abs2, eta2_abs2, pmd, rf: CorrelationFunction):
    x, y = np.asarray(eta1_abs2, dtype=float), np.asarray(eta2_abs2, dtype=float)
    _check_eta_sq(x, y)
    tau_a, tau_b = _as_taus(pmd)
    ra2 = rf.magnitude(tau_a) ** 2
    rb2 = rf.magnitude(tau_b) ** 2
    rd2 = rf.magnitude(np.asarray(tau_a) - np.asarray(tau_b)) ** 2
    rs2 = rf.magnitude(np.asarray(tau_a) + np.asarray(tau_b)) ** 2
    p = (x * x + y * y) / 2 + x * y * (ra2 + rb2) + (x * x * rd2 + y * y * rs2) / 2
    return float(p) if np.ndim(p) == 0 else p


def _stst_terms(x, tau_a, tau_b, rf):
    """Vectorized (l1, l2, l3, det S) for |eta1|^2 = x and real R_f."""
    x = np.asarray(x, dtype=float)
    y = 1.0 - x
    tau_a = np.asarray(tau_a, dtype=float)
    tau_b = np.asarray(tau_b, dtype=float)
    a = rf(tau_a - tau_b)
    b = rf(tau_a + tau_b)
    ra = rf(tau_a)
    rb = rf(tau_b)
    g = np.sqrt(x * y)
    xa_yb = x * a - y * b
    m11 = xa_yb**2 + 4 * x * y * rb**2
    m22 = (x * a + y * b) ** 2
    m33 = 4 * x * y * ra**2 + (2 * x - 1) ** 2
    m13 = -2 * xa_yb * g * ra + 2 * g * rb * (2 * x - 1)
    # the 2x2 block is the Gram matrix of (xa - yb, 2g rb) and (-2g ra, 2x - 1),
    # so its determinant m11 m33 - m13^2 is det_k^2, free of cancellation
    det_k = xa_yb * (2 * x - 1) + 4 * x * y * ra * rb
    half_tr = (m11 + m33) / 2
    l1 = half_tr + np.hypot((m11 - m33) / 2, m13)
    l3 = np.divide(det_k**2, l1, out=np.zeros_like(l1), where=l1 > 0)
    det_s = -(x * a + y * b) * det_k
    return l1, m22, l3, det_s


def stst_analytic(eta1_abs, eta2_abs, pmd, rf: CorrelationFunction) -> EigenTriple:
    """Eigenvalues of S^T S from the PMD parameters (real R_f only)."""
    _require_real(rf)
    x, y = float(eta1_abs) ** 2, float(eta2_abs) ** 2
    _check_eta_sq(x, y)
    tau_a, tau_b = _as_taus(pmd)
    l1, l2, l3, det_s = _stst_terms(x, tau_a, tau_b, rf)
    return EigenTriple(float(l1), float(l2), float(l3), float(det_s))


def _roots_desc(l1, l2, l3):
    ls = np.stack(np.broadcast_arrays(l1, l2, l3), axis=-1)
    ls = np.where(ls < 0, np.where(ls >= -TOL.eig_clamp, 0.0, np.nan), ls)
    if np.any(np.isnan(ls)):
        raise ValueError("eigenvalue of S^T S below -1e-10")
    return np.sort(np.sqrt(ls), axis=-1)[..., ::-1]


def _margin(l1, l2, l3, det_s):
    r = _roots_desc(l1, l2, l3)
    sign = np.where(np.asarray(det_s) <= 0, 1.0, -1.0)
    return (r[..., 0] + r[..., 1] + sign * r[..., 2] - 1) / 2


def concurrence_margin(e: EigenTriple) -> float:
    """Signed quantity whose positive part is the concurrence."""
    return float(_margin(e.l1, e.l2, e.l3, e.det_s))


def concurrence_from_eigs(e: EigenTriple) -> float:
    """C = max(0, sqrt(l1) + sqrt(l2) -+ sqrt(l3) - 1) / 2, sign from det S.

    With the default ``det_s`` (negative) this is the plain sum of roots;
    the expression is symmetric, so sorted or unsorted eigenvalues give the
    same value.
    """
    return max(0.0, concurrence_margin(e))


def chsh_from_eigs(e: EigenTriple) -> float:
    l1, l2, l3 = (max(v, 0.0) if v >= -TOL.eig_clamp else v for v in (e.l1, e.l2, e.l3))
    if min(l1, l2, l3) < 0:
        raise ValueError("eigenvalue of S^T S below -1e-10")
    lam = sorted((l1, l2, l3), reverse=True)
    return float(2 * np.sqrt(lam[0] + lam[1]))


def _margin_mp(x: float, tau_a: float, tau_b: float, rf: CorrelationFunction) -> float:
    """Concurrence margin in mpmath arithmetic for a single point."""
    mp = mpmath.mp
    with mp.workdps(TOL.refine_dps):
        x = mpmath.mpf(x)
        y = 1 - x
        ta, tb = mpmath.mpf(tau_a), mpmath.mpf(tau_b)
        a, b = rf.mp_func(ta - tb), rf.mp_func(ta + tb)
        ra, rb = rf.mp_func(ta), rf.mp_func(tb)
        g = mpmath.sqrt(x * y)
        k11, k12, k21, k22 = x * a - y * b, -2 * g * ra, 2 * g * rb, 2 * x - 1
        s_plus = mpmath.sqrt((k11 + k22) ** 2 + (k12 - k21) ** 2)
        s_minus = mpmath.sqrt((k11 - k22) ** 2 + (k12 + k21) ** 2)
        sig1 = (s_plus + s_minus) / 2
        det_k = k11 * k22 - k12 * k21
        sig3 = abs(det_k) / sig1 if sig1 > 0 else mpmath.mpf(0)
        sig2 = abs(x * a + y * b)
        det_s = -(x * a + y * b) * det_k
        r = sorted([sig1, sig2, sig3], reverse=True)
        sign = 1 if det_s <= 0 else -1
        return float((r[0] + r[1] + sign * r[2] - 1) / 2)


def analytic_metrics(eta1_sq, tau_a, tau_b, rf: CorrelationFunction, refine: bool = True):
    """Closed-form purity, concurrence and CHSH value on broadcast arrays.

    Returns a dict of arrays: ``purity``, ``concurrence``, ``s_param``,
    ``margin``. Points whose double-precision margin lies within the
    refinement window of zero are recomputed in extended precision when the
    correlation function supports it, so that C == 0 means separable and an
    exponentially small positive C survives.
    """
    _require_real(rf)
    x, tau_a, tau_b = np.broadcast_arrays(
        np.asarray(eta1_sq, dtype=float), np.asarray(tau_a, dtype=float), np.asarray(tau_b, dtype=float)
    )
    if np.any((x < 0) | (x > 1)):
        raise ValueError("|eta1|^2 must lie in [0, 1]")
    l1, l2, l3, det_s = _stst_terms(x, tau_a, tau_b, rf)
    margin = np.atleast_1d(_margin(l1, l2, l3, det_s))
    if refine and rf.mp_func is not None:
        ambiguous = np.abs(margin) <= TOL.refine_window
        if np.any(ambiguous):
            margin = margin.copy()
            for idx in zip(*np.nonzero(ambiguous)):
                src = np.unravel_index(idx[0], x.shape) if x.ndim == 0 else idx
                margin[idx] = _margin_mp(float(x[src]), float(tau_a[src]), float(tau_b[src]), rf)
    margin = margin.reshape(x.shape)
    lam = np.sort(np.stack([l1, l2, l3], axis=-1), axis=-1)
    s_param = 2 * np.sqrt(np.clip(lam[..., 2] + lam[..., 1], 0.0, None))
    purity = purity_closed_form(x, 1.0 - x, (tau_a, tau_b), rf)
    return {
        "purity": np.asarray(purity),
        "concurrence": np.maximum(margin, 0.0),
        "s_param": s_param,
        "margin": margin,
    }


def asymptotic_concurrence(eta1_abs2, delta_tau, rf: CorrelationFunction):
    """Concurrence when both DGDs are much larger than 1/B."""
    c = np.maximum(0.0, (1 + rf.magnitude(delta_tau)) * np.asarray(eta1_abs2, dtype=float) - 1)
    return float(c) if np.ndim(c) == 0 else c


def esd_threshold(delta_tau, rf: CorrelationFunction):
    """|eta1|^2 below which the asymptotic concurrence vanishes."""
    t = 1.0 / (1.0 + rf.magnitude(delta_tau))
    return float(t) if np.ndim(t) == 0 else t


# --------------------------------------------------------------------------
# X-shape representation


@dataclass(frozen=True)
class XStateReduction:
    """Bell-diagonal (X-shape) form of a state with maximally mixed marginals.

    ``matrix = kron(unitary_b, unitary_a) rho kron(unitary_b, unitary_a)^dag``
    and ``correlations`` is the diagonal of S in the new basis. The columns
    of ``unitary_a^dag`` (``unitary_b^dag``) are the new Jones basis vectors
    of photon A (B), expressed in that photon's PSP basis.
    """

    matrix: np.ndarray
    unitary_a: np.ndarray
    unitary_b: np.ndarray
    correlations: np.ndarray


def _right_handed_completion(cols):
    """Fill missing (None) columns of a 3x3 frame to make a proper rotation."""
    have = [i for i, c in enumerate(cols) if c is not None]
    if not have:
        return np.eye(3)
    if len(have) == 1:
        u = cols[have[0]]
        trial = np.eye(3)[int(np.argmin(np.abs(u)))]
        v = trial - (trial @ u) * u
        v /= np.linalg.norm(v)
        missing = [i for i in range(3) if cols[i] is None]
        cols[missing[0]] = v
        have.append(missing[0])
    i = next(k for k in range(3) if cols[k] is None) if len(have) < 3 else None
    if i is not None:
        j, k = (i + 1) % 3, (i + 2) % 3
        cols[i] = np.cross(cols[j], cols[k])
    return np.stack(cols, axis=1)


def x_state_reduce(rho) -> XStateReduction:
    """Rotate a state with maximally mixed marginals into X shape.

    Photon A's new basis comes from the eigenvectors of S^T S and photon B's
    from S S^T. The largest correlation is put on sigma_3 x sigma_3 and the
    sign conventions are chosen so that rho_11 >= rho_22 and the
    rho_14 / rho_23 coefficients are non-negative whenever det S <= 0.
    """
    rho = np.asarray(rho, dtype=complex)
    half = np.eye(2) / 2
    for keep in ("a", "b"):
        if np.max(np.abs(partial_trace(rho, keep) - half)) > TOL.marginal:
            raise ValueError("x_state_reduce needs maximally mixed marginals")
    s = correlation_matrix(rho)
    w, v = jacobi_eigh(s.T @ s, vectors=True)
    order = np.argsort(-w, kind="stable")
    v = v[:, order]
    if np.linalg.det(v) < 0:
        v[:, 2] *= -1
    sv = s @ v
    norms = np.linalg.norm(sv, axis=0)
    cols = [sv[:, i] / norms[i] if norms[i] > TOL.algebraic else None for i in range(3)]
    u = _right_handed_completion(cols)
    if np.linalg.det(u) < 0:
        u[:, 2] *= -1
    # largest correlation on the third axis (cyclic, keeps det = +1)
    perm = [1, 2, 0]
    u, v = u[:, perm], v[:, perm]
    d = np.diag(u.T @ s @ v).copy()
    flips = np.ones(3)
    if d[2] < 0 and d[0] < 0:
        flips[[0, 2]] = -1
    elif d[2] < 0:
        flips[[1, 2]] = -1
    elif d[0] < 0:
        flips[[0, 1]] = -1
    u = u * flips
    d = d * flips
    # rows of S belong to the first kron factor (photon B)
    w_b = rotation_to_su2(u).conj().T
    w_a = rotation_to_su2(v).conj().T
    big = np.kron(w_b, w_a)
    rho_x = big @ rho @ big.conj().T
    return XStateReduction(rho_x, w_a, w_b, d)


def x_state_concurrence(rho_x) -> float:
    """C = 2 max(0, |rho_23| - rho_11, |rho_14| - rho_22) for an X-shaped matrix."""
    m = np.asarray(rho_x)
    r11, r22 = m[0, 0].real, m[1, 1].real
    return float(2 * max(0.0, abs(m[1, 2]) - r11, abs(m[0, 3]) - r22))


def bell_diagonal_from_eigs(lam1, lam2, lam3, zeta: int = 1, xi: int = 1) -> np.ndarray:
    """X-shaped state with S^T S eigenvalues lam1 >= lam2 >= lam3 (largest on sigma_3)."""
    r1, r2, r3 = np.sqrt([lam1, lam2, lam3])
    m = np.zeros((4, 4))
    m[0, 0] = m[3, 3] = 1 + r1
    m[1, 1] = m[2, 2] = 1 - r1
    m[0, 3] = m[3, 0] = zeta * (r2 + r3)
    m[1, 2] = m[2, 1] = xi * (r2 - r3)
    return (m / 4).astype(complex)


# --------------------------------------------------------------------------
# report


def full_report(
    dec: SourceDecomposition,
    alpha: float,
    pmd: PmdRealization,
    rf: CorrelationFunction,
    oracle: bool = True,
) -> EntanglementReport:
    """Metrics for one PMD realization.

    The closed form is used whenever R_f is real; the numerical route runs
    when requested and always when the closed form does not apply.
    """
    analytic = None
    if rf.is_real:
        vals = analytic_metrics(dec.eta1_sq, pmd.tau_a, pmd.tau_b, rf)
        c = float(vals["concurrence"])
        analytic = MetricValues(float(vals["purity"]), c, float(vals["s_param"]), c == 0.0 and pmd.has_pmd)
    numeric = None
    if oracle or analytic is None:
        rho = build_density_matrix(dec, alpha, pmd, rf).matrix
        c = concurrence_wootters(rho)
        numeric = MetricValues(
            purity_trace(rho), c, chsh_numeric(rho), c <= TOL.esd_oracle and pmd.has_pmd
        )
    top = analytic if analytic is not None else numeric
    return EntanglementReport(
        top.purity, top.concurrence, top.s_param, top.esd, analytic is not None, analytic, numeric
    )
