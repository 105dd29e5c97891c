"""Small fixed-size linear algebra: polarization vectors, Pauli algebra and
Jacobi eigen-solvers.

Matrices are plain numpy arrays. The solvers accept stacks of matrices with
shape ``(..., n, n)`` so that ensembles can be diagonalized in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tolerances import TOL

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

SIGMA_YY = np.kron(_PAULI[1], _PAULI[1])


@dataclass(frozen=True)
class JonesVector:
    c0: complex
    c1: complex

    def __post_init__(self):
        norm = abs(self.c0) ** 2 + abs(self.c1) ** 2
        if abs(norm - 1.0) > TOL.normalization:
            raise ValueError(f"Jones vector not normalized: |c|^2 = {norm!r}")

    @classmethod
    def from_array(cls, arr, normalize=False) -> "JonesVector":
        arr = np.asarray(arr, dtype=complex).reshape(2)
        if normalize:
            arr = arr / np.linalg.norm(arr)
        return cls(complex(arr[0]), complex(arr[1]))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.c0, self.c1], dtype=complex)

    def orthogonal(self) -> "JonesVector":
        """Orthogonal complement with the fixed convention (-c1*, c0*)."""
        return JonesVector(-np.conj(self.c1), np.conj(self.c0))

    def dot(self, other: "JonesVector") -> complex:
        """Conjugate-linear inner product, conjugating ``self``."""
        return complex(np.vdot(self.array, other.array))

    def with_phase(self, phi: float) -> "JonesVector":
        p = np.exp(1j * phi)
        return JonesVector(self.c0 * p, self.c1 * p)


@dataclass(frozen=True)
class StokesVector:
    x1: float
    x2: float
    x3: float

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    def norm(self) -> float:
        return float(np.linalg.norm(self.array))


def pauli(n: int) -> np.ndarray:
    """Pauli matrix sigma_n for n in {1, 2, 3}."""
    if n not in (1, 2, 3):
        raise ValueError(f"Pauli index must be 1, 2 or 3, got {n!r}")
    return _PAULI[n - 1].copy()


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def jones_to_stokes(j: JonesVector) -> StokesVector:
    v = j.array
    norm = float(np.vdot(v, v).real)
    if abs(norm - 1.0) > TOL.normalization:
        raise ValueError(f"Jones vector not normalized: |c|^2 = {norm!r}")
    x = [float(np.vdot(v, s @ v).real) for s in _PAULI]
    return StokesVector(*x)


def rotation_to_su2(rot) -> np.ndarray:
    """SU(2) matrix ``W`` with ``W sigma_k W^dag = sum_n rot[n, k] sigma_n``.

    ``rot`` must be a proper rotation (orthogonal, det +1).
    """
    rot = np.asarray(rot, dtype=float)
    if abs(np.linalg.det(rot) - 1.0) > 1e-9:
        raise ValueError("rotation must have determinant +1")
    # Shepperd's method: pick the largest of the four quaternion squares
    tr = np.trace(rot)
    cands = np.array([tr, rot[0, 0], rot[1, 1], rot[2, 2]])
    k = int(np.argmax(cands))
    if k == 0:
        w = 0.5 * np.sqrt(1.0 + tr)
        x = (rot[2, 1] - rot[1, 2]) / (4 * w)
        y = (rot[0, 2] - rot[2, 0]) / (4 * w)
        z = (rot[1, 0] - rot[0, 1]) / (4 * w)
    elif k == 1:
        x = 0.5 * np.sqrt(1.0 + 2 * rot[0, 0] - tr)
        w = (rot[2, 1] - rot[1, 2]) / (4 * x)
        y = (rot[0, 1] + rot[1, 0]) / (4 * x)
        z = (rot[0, 2] + rot[2, 0]) / (4 * x)
    elif k == 2:
        y = 0.5 * np.sqrt(1.0 + 2 * rot[1, 1] - tr)
        w = (rot[0, 2] - rot[2, 0]) / (4 * y)
        x = (rot[0, 1] + rot[1, 0]) / (4 * y)
        z = (rot[1, 2] + rot[2, 1]) / (4 * y)
    else:
        z = 0.5 * np.sqrt(1.0 + 2 * rot[2, 2] - tr)
        w = (rot[1, 0] - rot[0, 1]) / (4 * z)
        x = (rot[0, 2] + rot[2, 0]) / (4 * z)
        y = (rot[1, 2] + rot[2, 1]) / (4 * z)
    sx, sy, sz = _PAULI
    return w * np.eye(2) - 1j * (x * sx + y * sy + z * sz)


# --------------------------------------------------------------------------
# Jacobi eigen-solvers


def _unit_phase(z, mag):
    safe = np.where(mag > 0, mag, 1.0)
    return np.where(mag > 0, z.real / safe + 1j * (z.imag / safe), 1.0 + 0j)


def jacobi_eigh(a, tol: float = TOL.jacobi, vectors: bool = False, max_sweeps: int = 60):
    """Cyclic Jacobi diagonalization of a stack of symmetric or Hermitian matrices.

    Pairs are visited in the fixed row-major order (0,1), (0,2), ..., so the
    result is deterministic. For complex input each pivot is first made real
    by a diagonal phase, then annihilated by a real plane rotation. Sweeps
    stop once every matrix in the stack has off-diagonal Frobenius norm below
    ``tol`` times its own norm.

    Returns the (unsorted) real diagonal, and the accumulated unitary when
    ``vectors`` is set, such that ``a = V diag(w) V^dag``.
    """
    cplx = np.iscomplexobj(a)
    a = np.array(a, dtype=complex if cplx else float, copy=True)
    n = a.shape[-1]
    batch = a.shape[:-2]
    a = a.reshape((-1, n, n))
    v = np.broadcast_to(np.eye(n, dtype=a.dtype), a.shape).copy() if vectors else None
    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    scale = np.where(scale == 0, 1.0, scale)
    offmask = ~np.eye(n, dtype=bool)
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=1))
        if np.all(off <= tol * scale):
            break
        for p, q in pairs:
            apq = a[:, p, q]
            if not np.any(apq):
                continue
            if cplx:
                mag = np.abs(apq)
                ph = _unit_phase(apq, mag)
                a[:, :, q] *= np.conj(ph)[:, None]
                a[:, q, :] *= ph[:, None]
                if vectors:
                    v[:, :, q] *= np.conj(ph)[:, None]
                apq = mag
            d = (a[:, q, q] - a[:, p, p]).real
            den = np.abs(d) + np.hypot(d, 2 * apq)
            sgn = np.where(d < 0, -1.0, 1.0)
            t = np.divide(2 * apq * sgn, den, out=np.zeros_like(den), where=den > 0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            cc, ss = c[:, None], s[:, None]
            colp = a[:, :, p].copy()
            colq = a[:, :, q]
            a[:, :, p] = cc * colp - ss * colq
            a[:, :, q] = ss * colp + cc * colq
            rowp = a[:, p, :].copy()
            rowq = a[:, q, :]
            a[:, p, :] = cc * rowp - ss * rowq
            a[:, q, :] = ss * rowp + cc * rowq
            a[:, p, q] = 0.0
            a[:, q, p] = 0.0
            if vectors:
                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = cc * vp - ss * vq
                v[:, :, q] = ss * vp + cc * vq
    w = np.diagonal(a, axis1=1, axis2=2).real.reshape(batch + (n,))
    if vectors:
        return w, v.reshape(batch + (n, n))
    return w


def jacobi_singular_values(m, tol: float = TOL.jacobi, max_sweeps: int = 60) -> np.ndarray:
    """Singular values of a stack of square matrices by one-sided Jacobi.

    Columns are rotated pairwise until mutually orthogonal; the singular
    values are then the column norms. Small singular values keep absolute
    accuracy of order eps * ||m|| instead of going through sqrt(eig(m^dag m)).
    """
    m = np.array(m, dtype=complex, copy=True)
    n = m.shape[-1]
    batch = m.shape[:-2]
    m = m.reshape((-1,) + m.shape[-2:])
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(max_sweeps):
        worst = 0.0
        for p, q in pairs:
            cp, cq = m[:, :, p].copy(), m[:, :, q]
            alpha = np.sum(np.abs(cp) ** 2, axis=1)
            beta = np.sum(np.abs(cq) ** 2, axis=1)
            gamma = np.sum(np.conj(cp) * cq, axis=1)
            mag = np.abs(gamma)
            rel = np.divide(mag, np.sqrt(alpha * beta), out=np.zeros_like(mag), where=alpha * beta > 0)
            worst = max(worst, float(rel.max()))
            active = rel > tol
            if not np.any(active):
                continue
            ph = _unit_phase(gamma, mag)
            cq = cq * np.conj(ph)[:, None]
            zeta = np.divide(beta - alpha, 2 * mag, out=np.zeros_like(mag), where=active)
            t = np.where(active, np.where(zeta < 0, -1.0, 1.0) / (np.abs(zeta) + np.hypot(1.0, zeta)), 0.0)
            c = 1.0 / np.sqrt(1 + t * t)
            s = c * t
            m[:, :, p] = c[:, None] * cp - s[:, None] * cq
            m[:, :, q] = s[:, None] * cp + c[:, None] * cq
        if worst <= tol:
            break
    sv = np.sqrt(np.sum(np.abs(m) ** 2, axis=1))
    return np.sort(sv, axis=-1)[..., ::-1].reshape(batch + (n,))


def _check_symmetric(m, name):
    m = np.asarray(m)
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if np.max(np.abs(m - np.swapaxes(m.conj(), -1, -2))) > TOL.algebraic * scale:
        raise ValueError(f"{name} input is not symmetric/Hermitian")


def _desc(w):
    return np.sort(w, axis=-1)[..., ::-1]


def sym_eigenvalues_3x3(m) -> np.ndarray:
    """Eigenvalues of real symmetric 3x3 matrices, sorted descending."""
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (3, 3):
        raise ValueError(f"expected (..., 3, 3), got {m.shape}")
    _check_symmetric(m, "sym_eigenvalues_3x3")
    return _desc(jacobi_eigh(m))


def hermitian_eigenvalues_4x4(m) -> np.ndarray:
    """Eigenvalues of Hermitian 4x4 matrices, sorted descending."""
    m = np.asarray(m, dtype=complex)
    if m.shape[-2:] != (4, 4):
        raise ValueError(f"expected (..., 4, 4), got {m.shape}")
    _check_symmetric(m, "hermitian_eigenvalues_4x4")
    return _desc(jacobi_eigh(m))


def hermitian_sqrt(m, clamp: float = TOL.eig_clamp) -> np.ndarray:
    """Principal square root of positive semidefinite Hermitian matrices.

    Eigenvalues in ``[-clamp, 0)`` are treated as zero; anything more negative
    raises.
    """
    m = np.asarray(m, dtype=complex)
    _check_symmetric(m, "hermitian_sqrt")
    w, v = jacobi_eigh(m, vectors=True)
    if np.any(w < -clamp):
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})")
    root = np.sqrt(np.clip(w, 0.0, None))
    return np.einsum("...ik,...k,...jk->...ij", v, root, np.conj(v))
