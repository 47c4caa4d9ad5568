"""Dense symmetric spectral decomposition and matrix functions.

The eigendecomposition is a cyclic Jacobi iteration: simple, deterministic
for identical input, and unconditionally convergent on symmetric matrices.
Everything downstream (abs, sign, sqrt, pseudo-inverse solves, definiteness)
is built on it.  Matrices are plain ``numpy`` arrays; validation helpers
enforce the symmetry/finiteness contracts at the entry points.
"""

from __future__ import annotations

import enum
from typing import NamedTuple, Optional

import numpy as np

from .errors import DimMismatch, NotPSD, NotSymmetric, Singular
from .tolerances import DEFAULT_TOL, Tolerances

_MAX_JACOBI_SWEEPS = 60


def as_vector(x, dim: Optional[int] = None) -> np.ndarray:
    """Validate and return a finite 1-D float vector."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimMismatch(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if dim is not None and v.size != dim:
        raise DimMismatch(f"expected dimension {dim}, got {v.size}")
    return v


def as_matrix(m, dim: Optional[int] = None) -> np.ndarray:
    """Validate and return a finite square float matrix."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    if dim is not None and a.shape[0] != dim:
        raise DimMismatch(f"expected dimension {dim}, got {a.shape[0]}")
    return a


def is_symmetric(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    return float(np.max(np.abs(m - m.T))) <= tol.sym * scale


def as_symmetric(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Validate symmetry within tolerance and return the symmetrized matrix."""
    a = as_matrix(m)
    if not is_symmetric(a, tol):
        raise NotSymmetric("matrix violates the symmetry tolerance")
    return 0.5 * (a + a.T)


class Spectral(NamedTuple):
    """Eigendecomposition M = U diag(d) U^T with d sorted descending."""

    eigenvalues: np.ndarray
    vectors: np.ndarray  # orthogonal, eigenvectors in columns

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ self.vectors.T

    def apply(self, fn) -> np.ndarray:
        """Return U diag(fn(d)) U^T, symmetrized."""
        out = (self.vectors * fn(self.eigenvalues)) @ self.vectors.T
        return 0.5 * (out + out.T)


def eigendecompose(m, tol: Tolerances = DEFAULT_TOL) -> Spectral:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps Givens rotations over all (p, q) pairs until the off-diagonal
    Frobenius mass drops below ``tol.jacobi_off * ||M||_F``.  Eigenvalues are
    returned in descending order; each eigenvector has its first component
    of magnitude above 1e-12 made positive, so identical input produces an
    identical decomposition.
    """
    a = as_symmetric(m, tol)
    n = a.shape[0]
    u = np.eye(n)
    fro = float(np.linalg.norm(a, "fro"))
    if fro > 0.0:
        target = tol.jacobi_off * fro
        for _ in range(_MAX_JACOBI_SWEEPS):
            # off-diagonal mass summed directly: a difference of sums would
            # cancel catastrophically and stall convergence near sqrt(eps)
            shaved = a.copy()
            np.fill_diagonal(shaved, 0.0)
            if float(np.linalg.norm(shaved, "fro")) <= target:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if abs(theta) > 1e150:
                        t = 0.5 / theta
                    else:
                        sign = 1.0 if theta >= 0.0 else -1.0
                        t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    # two-sided rotation in the (p, q) plane
                    col_p = c * a[:, p] - s * a[:, q]
                    col_q = s * a[:, p] + c * a[:, q]
                    a[:, p], a[:, q] = col_p, col_q
                    row_p = c * a[p, :] - s * a[q, :]
                    row_q = s * a[p, :] + c * a[q, :]
                    a[p, :], a[q, :] = row_p, row_q
                    a[p, q] = a[q, p] = 0.0
                    ucol_p = c * u[:, p] - s * u[:, q]
                    ucol_q = s * u[:, p] + c * u[:, q]
                    u[:, p], u[:, q] = ucol_p, ucol_q

    d = np.diag(a).copy()
    order = np.argsort(-d, kind="stable")
    d = d[order]
    u = u[:, order]
    for j in range(n):
        col = u[:, j]
        lead = np.nonzero(np.abs(col) > 1e-12)[0]
        k = lead[0] if lead.size else int(np.argmax(np.abs(col)))
        if col[k] < 0.0:
            u[:, j] = -col
    return Spectral(d, u)


class Definiteness(enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    POSITIVE_SEMIDEFINITE = "PositiveSemidefinite"
    INDEFINITE = "Indefinite"
    NEGATIVE_SEMIDEFINITE = "NegativeSemidefinite"
    NEGATIVE_DEFINITE = "NegativeDefinite"


def definiteness(m, tol: Tolerances = DEFAULT_TOL) -> Definiteness:
    """Classify a symmetric matrix by the signs of its eigenvalues."""
    d = eigendecompose(m, tol).eigenvalues
    lo, hi = float(d[-1]), float(d[0])
    if lo > tol.pd:
        return Definiteness.POSITIVE_DEFINITE
    if hi < -tol.pd:
        return Definiteness.NEGATIVE_DEFINITE
    if lo > -tol.pd:
        return Definiteness.POSITIVE_SEMIDEFINITE
    if hi < tol.pd:
        return Definiteness.NEGATIVE_SEMIDEFINITE
    return Definiteness.INDEFINITE


def _eig_cutoff(d: np.ndarray, tol: Tolerances) -> float:
    return tol.sing_rel * max(1.0, float(np.max(np.abs(d))) if d.size else 1.0)


def matrix_abs(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Spectral absolute value U |diag(d)| U^T of a symmetric matrix."""
    return eigendecompose(m, tol).apply(np.abs)


def matrix_sign(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Spectral sign U sign(diag(d)) U^T of a symmetric invertible matrix."""
    spec = eigendecompose(m, tol)
    if float(np.min(np.abs(spec.eigenvalues))) <= _eig_cutoff(spec.eigenvalues, tol):
        raise Singular("matrix_sign requires an invertible matrix")
    return spec.apply(np.sign)


def matrix_sqrt(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Spectral square root of a positive semidefinite symmetric matrix."""
    spec = eigendecompose(m, tol)
    scale = max(1.0, float(np.max(np.abs(spec.eigenvalues))))
    if float(np.min(spec.eigenvalues)) < -tol.psd * scale:
        raise NotPSD("matrix_sqrt requires a positive semidefinite matrix")
    return spec.apply(lambda d: np.sqrt(np.clip(d, 0.0, None)))


def spectral_inverse(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Inverse of a symmetric matrix through its eigendecomposition."""
    spec = eigendecompose(m, tol)
    if float(np.min(np.abs(spec.eigenvalues))) <= _eig_cutoff(spec.eigenvalues, tol):
        raise Singular("matrix is singular within tolerance")
    return spec.apply(lambda d: 1.0 / d)


def invert(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Invert a general square matrix by Gauss-Jordan with partial pivoting."""
    a = as_matrix(m).copy()
    n = a.shape[0]
    inv = np.eye(n)
    pivot_floor = 1e-12 * max(1.0, float(np.max(np.abs(a))))
    for col in range(n):
        p = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[p, col]) <= pivot_floor:
            raise Singular("matrix is singular within tolerance")
        if p != col:
            a[[col, p]] = a[[p, col]]
            inv[[col, p]] = inv[[p, col]]
        piv = a[col, col]
        a[col] /= piv
        inv[col] /= piv
        for r in range(n):
            if r != col and a[r, col] != 0.0:
                f = a[r, col]
                a[r] -= f * a[col]
                inv[r] -= f * inv[col]
    return inv


def solve_min_norm(m, rhs, tol: Tolerances = DEFAULT_TOL) -> Optional[np.ndarray]:
    """Minimum-norm solution of M x = rhs, or None when inconsistent.

    Symmetric matrices are solved through the spectral pseudo-inverse,
    general ones through least squares.  The candidate is accepted when
    ``||M x - rhs|| <= cons_rel * (1 + ||rhs||)``; inconsistency is a value
    (None), not an error, because callers use it as a nonexistence signal.
    """
    a = as_matrix(m)
    b = as_vector(rhs, a.shape[0])
    if is_symmetric(a, tol):
        spec = eigendecompose(a, tol)
        cutoff = _eig_cutoff(spec.eigenvalues, tol)
        coeffs = spec.vectors.T @ b
        inv_d = np.where(np.abs(spec.eigenvalues) > cutoff, spec.eigenvalues, np.inf)
        x = spec.vectors @ (coeffs / inv_d)
    else:
        x = np.linalg.lstsq(a, b, rcond=None)[0]
    residual = float(np.linalg.norm(a @ x - b))
    if residual > tol.cons_rel * (1.0 + float(np.linalg.norm(b))):
        return None
    return x
