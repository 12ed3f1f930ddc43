"""Independent reference eigensolvers used to certify flow results.

Two routes are provided.  ``reference_eigenpairs`` symmetrizes A explicitly
through sqrt(S) A sqrt(S)^-1 and runs the Jacobi eigensolver; it works for
any symmetrizable matrix.  ``rank_one_roots`` handles the rank-one family
diag(d) + a b^T by bisecting its characteristic polynomial on the
interlacing brackets d_i < lambda_i < d_{i+1} (and d_n < lambda_n <=
d_n + sum a_i b_i), entirely independent of the eigensolver, then
cross-checks the two routes against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ABS_FLOOR,
    as_matrix,
    frobenius,
    jacobi_eigh,
    spd_sqrt_pair,
)
from .errors import (
    BracketFailureError,
    DimensionMismatchError,
    NotSortedError,
    SignViolationError,
    SymmetrizationFailedError,
)
from .symmetrizer import char_poly_rank_one

SYMMETRIZED_JACOBI = "SymmetrizedJacobi"
CHAR_POLY_BISECTION = "CharPolyBisection"


@dataclass(frozen=True)
class ReferenceSpectrum:
    """Reference eigenpairs, sorted descending.

    Column i of ``eigenvectors`` is a unit eigenvector of A for
    ``eigenvalues[i]``; ``residuals`` holds the per-pair defect
    ||A v - lambda v||_2.  ``cross_check_deviation`` is populated by the
    bisection route with its worst disagreement against the symmetrized
    Jacobi route.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    method: str
    residuals: np.ndarray
    cross_check_deviation: float | None = None


def reference_eigenpairs(a, s) -> ReferenceSpectrum:
    """Eigenpairs of a symmetrizable matrix via explicit symmetrization.

    Forms A~ = sqrt(S) A sqrt(S)^-1, checks it is symmetric to 1e-8
    relative (raising :class:`SymmetrizationFailedError` otherwise), runs
    Jacobi, and maps eigenvectors back through sqrt(S)^-1.
    """
    a = as_matrix(a, "a")
    s = as_matrix(s, "s")
    if a.shape != s.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(
            f"a and s must be square of equal size, got {a.shape} and {s.shape}"
        )
    root, root_inv = spd_sqrt_pair(s)
    a_tilde = root @ a @ root_inv
    asym = frobenius(a_tilde - a_tilde.T)
    if asym > 1e-8 * max(frobenius(a_tilde), ABS_FLOOR):
        raise SymmetrizationFailedError(
            f"sqrt(S) A sqrt(S)^-1 deviates from symmetry by {asym:.3e} relative"
        )
    eig = jacobi_eigh(0.5 * (a_tilde + a_tilde.T))
    vectors = root_inv @ eig.eigenvectors
    norms = np.sqrt((vectors * vectors).sum(axis=0))
    vectors = vectors / norms
    residuals = np.array([
        frobenius(a @ vectors[:, i] - eig.eigenvalues[i] * vectors[:, i])
        for i in range(a.shape[0])
    ])
    return ReferenceSpectrum(
        eigenvalues=eig.eigenvalues.copy(),
        eigenvectors=vectors,
        method=SYMMETRIZED_JACOBI,
        residuals=residuals,
    )


def _bisect(f, lo: float, hi: float, f_lo: float) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= 1e-12:
            break
    return 0.5 * (lo + hi)


def rank_one_roots(d, a, b) -> ReferenceSpectrum:
    """Eigenpairs of diag(d) + a b^T by bisecting the secular polynomial.

    Brackets follow the interlacing 0 < d_1 < lambda_1 < d_2 < ... < d_n <
    lambda_n, with the last root below d_n + sum(a_i b_i) + 1; each root is
    refined to 1e-12 absolute.  Eigenvectors use the closed form
    v ~ a / (lambda - d).  Raises :class:`BracketFailureError` when an
    expected sign change is missing, which signals a hypothesis violation.
    """
    d = np.asarray(d, dtype=float).reshape(-1)
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    n = d.size
    if not (n == a.size == b.size) or n == 0:
        raise DimensionMismatchError("d, a, b must share a positive length")
    if d[0] <= 0.0 or (np.diff(d) <= 0.0).any():
        raise NotSortedError("d must be strictly increasing and positive")
    if (a * b <= 0.0).any():
        raise SignViolationError("every a_i * b_i must be positive")

    def phi(lam: float) -> float:
        return char_poly_rank_one(d, a, b, lam)

    upper = float(d[-1] + (a * b).sum() + 1.0)
    brackets = [(float(d[i]), float(d[i + 1])) for i in range(n - 1)]
    brackets.append((float(d[-1]), upper))

    roots = []
    for lo, hi in brackets:
        f_lo, f_hi = phi(lo), phi(hi)
        if f_lo == 0.0:
            roots.append(lo)
            continue
        if (f_lo < 0.0) == (f_hi < 0.0):
            raise BracketFailureError(
                f"no sign change on [{lo:g}, {hi:g}]: phi = {f_lo:g}, {f_hi:g}"
            )
        roots.append(_bisect(phi, lo, hi, f_lo))

    roots_desc = np.array(sorted(roots, reverse=True))
    dense = np.diag(d) + np.outer(a, b)
    vectors = np.zeros((n, n))
    residuals = np.zeros(n)
    for i, lam in enumerate(roots_desc):
        v = a / (lam - d)
        v = v / math.sqrt(float((v * v).sum()))
        vectors[:, i] = v
        residuals[i] = frobenius(dense @ v - lam * v)

    reference = reference_eigenpairs(dense, np.diag(b / a))
    deviation = float(np.abs(reference.eigenvalues - roots_desc).max())
    return ReferenceSpectrum(
        eigenvalues=roots_desc,
        eigenvectors=vectors,
        method=CHAR_POLY_BISECTION,
        residuals=residuals,
        cross_check_deviation=deviation,
    )
