"""Dense matrix kernels.

Plain float64 numpy arrays are the carrier for every matrix in the package.
The symmetric eigensolver is a self-contained cyclic Jacobi iteration so that
no code path depends on LAPACK; at the desk scales this package targets
(n <= 64) it reaches machine precision in a handful of sweeps.

All tolerances are relative to the Frobenius norm of the input, with an
absolute floor of 1e-14.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NotPositiveDefiniteError,
    NotSymmetricError,
    SingularMatrixError,
)

ABS_FLOOR = 1e-14


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a fresh 2-D float64 array with finite entries."""
    m = np.array(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.size and not np.isfinite(m).all():
        raise ValueError(f"{name} contains non-finite entries")
    return m


def frobenius(a) -> float:
    """Frobenius norm of an array."""
    a = np.asarray(a, dtype=float)
    return float(np.sqrt((a * a).sum()))


def gauss_solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by Gaussian elimination with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides.  Intended for the
    small dense systems that arise here; raises :class:`SingularMatrixError`
    when a pivot falls below rounding scale.
    """
    a = as_matrix(a, "coefficient matrix")
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionMismatchError(f"coefficient matrix must be square, got {a.shape}")
    rhs = np.array(b, dtype=float)
    vector_rhs = rhs.ndim == 1
    if vector_rhs:
        rhs = rhs.reshape(-1, 1)
    if rhs.shape[0] != n:
        raise DimensionMismatchError(
            f"rhs has {rhs.shape[0]} rows, expected {n}"
        )
    aug = np.hstack([a, rhs])
    tiny = ABS_FLOOR * max(1.0, float(np.abs(a).max()) if a.size else 1.0)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(aug[k:, k])))
        if abs(aug[piv, k]) <= tiny:
            raise SingularMatrixError(f"negligible pivot at column {k}")
        if piv != k:
            aug[[k, piv]] = aug[[piv, k]]
        factors = aug[k + 1:, k] / aug[k, k]
        aug[k + 1:, k:] -= np.outer(factors, aug[k, k:])
    x = np.zeros((n, rhs.shape[1]))
    for k in range(n - 1, -1, -1):
        x[k] = (aug[k, n:] - aug[k, k + 1: n] @ x[k + 1:]) / aug[k, k]
    return x[:, 0] if vector_rhs else x


def determinant(a) -> float:
    """Determinant via the elimination pivots (small systems only)."""
    a = as_matrix(a, "matrix")
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionMismatchError(f"matrix must be square, got {a.shape}")
    work = a.copy()
    det = 1.0
    for k in range(n):
        piv = k + int(np.argmax(np.abs(work[k:, k])))
        if work[piv, k] == 0.0:
            return 0.0
        if piv != k:
            work[[k, piv]] = work[[piv, k]]
            det = -det
        det *= work[k, k]
        factors = work[k + 1:, k] / work[k, k]
        work[k + 1:, k:] -= np.outer(factors, work[k, k:])
    return float(det)


@dataclass(frozen=True)
class SymEigenResult:
    """Spectral decomposition of a symmetric matrix.

    ``eigenvalues`` are sorted descending; column ``i`` of ``eigenvectors``
    belongs to ``eigenvalues[i]`` and the columns are orthonormal.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def jacobi_eigh(m, max_sweeps: int = 100) -> SymEigenResult:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Uses the threshold strategy: early sweeps skip pivots that are small
    relative to the remaining off-diagonal mass, and once rotations are far
    smaller than the local diagonal they are flushed to zero.

    Raises
    ------
    NotSymmetricError
        if ``m`` deviates from symmetry by more than 1e-12 relative.
    NoConvergenceError
        if the off-diagonal mass has not vanished after ``max_sweeps``.
    """
    m = as_matrix(m, "matrix")
    n = m.shape[0]
    if m.shape[1] != n:
        raise DimensionMismatchError(f"matrix must be square, got {m.shape}")
    norm = frobenius(m)
    if frobenius(m - m.T) > 1e-12 * norm + ABS_FLOOR:
        raise NotSymmetricError("matrix is not symmetric within 1e-12 relative")

    a = 0.5 * (m + m.T)
    v = np.eye(n)
    if n == 1:
        return SymEigenResult(a.diagonal().copy(), v)

    eps = np.finfo(float).eps
    for sweep in range(max_sweeps):
        off = np.sqrt(2.0) * frobenius(np.triu(a, 1))
        if off <= 1e-14 * norm:
            break
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                small = 100.0 * abs(apq)
                if sweep > 3 and small <= eps * abs(a[p, p]) and small <= eps * abs(a[q, q]):
                    a[p, q] = a[q, p] = 0.0
                    continue
                if abs(apq) <= thresh:
                    continue
                h = a[q, q] - a[p, p]
                if small <= eps * abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + np.sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        raise NoConvergenceError(f"Jacobi sweeps did not converge in {max_sweeps}")

    w = a.diagonal().copy()
    order = np.argsort(-w, kind="stable")
    return SymEigenResult(w[order], v[:, order])


def spd_sqrt(s, tol: float = 1e-12) -> np.ndarray:
    """Symmetric positive definite square root of an SPD matrix.

    Returns the unique symmetric ``R`` with ``R @ R == s`` (to rounding).
    Raises :class:`NotPositiveDefiniteError` when an eigenvalue is at or
    below ``tol`` relative to the Frobenius norm of ``s``.
    """
    eig = jacobi_eigh(s)
    threshold = tol * max(frobenius(s), ABS_FLOOR)
    if eig.eigenvalues.size == 0 or eig.eigenvalues.min() <= threshold:
        raise NotPositiveDefiniteError(
            f"eigenvalue {eig.eigenvalues.min() if eig.eigenvalues.size else 0.0:g} "
            f"is not above the positivity threshold {threshold:g}"
        )
    root = (eig.eigenvectors * np.sqrt(eig.eigenvalues)) @ eig.eigenvectors.T
    return 0.5 * (root + root.T)


def spd_sqrt_pair(s, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(sqrt(s), sqrt(s)^-1)`` from a single decomposition."""
    eig = jacobi_eigh(s)
    threshold = tol * max(frobenius(s), ABS_FLOOR)
    if eig.eigenvalues.size == 0 or eig.eigenvalues.min() <= threshold:
        raise NotPositiveDefiniteError(
            "matrix is not positive definite within tolerance"
        )
    w = np.sqrt(eig.eigenvalues)
    root = (eig.eigenvectors * w) @ eig.eigenvectors.T
    inv = (eig.eigenvectors / w) @ eig.eigenvectors.T
    return 0.5 * (root + root.T), 0.5 * (inv + inv.T)


def sylvester_residual(a, s) -> float:
    """Frobenius norm of ``a.T @ s - s @ a``.

    Zero exactly when ``s`` solves the transpose-coupling equation for ``a``.
    """
    a = as_matrix(a, "a")
    s = as_matrix(s, "s")
    if a.shape != s.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(
            f"operands must be square with equal shape, got {a.shape} and {s.shape}"
        )
    return frobenius(a.T @ s - s @ a)


def lagrangian_frame_check(x, y) -> float:
    """Largest entry of ``x.T @ y - y.T @ x`` in absolute value.

    The stacked frame (x; y) spans a Lagrangian subspace exactly when this
    vanishes.
    """
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    if x.shape != y.shape or x.shape[0] != x.shape[1]:
        raise DimensionMismatchError(
            f"frames must be square with equal shape, got {x.shape} and {y.shape}"
        )
    skew = x.T @ y - y.T @ x
    return float(np.abs(skew).max()) if skew.size else 0.0
