"""Saddle-point block matrices and their shifted symmetrizers.

The family assembles A = [[P, Q^T], [-Q, R]] with P symmetric positive
definite, Q full rank (m <= n) and R symmetric positive semidefinite.  The
shifted matrix S_eps = [[P - eps*I, Q^T], [Q, eps*I - R]] satisfies
A_delta^T S_eps = S_eps A_delta for every delta and eps, and is positive
definite exactly when eps sits inside a window determined by lambda_min(P),
lambda_max(R) and sigma_max(Q).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ABS_FLOOR,
    as_matrix,
    frobenius,
    gauss_solve,
    jacobi_eigh,
    sylvester_residual,
)
from .errors import (
    BlockShapeMismatchError,
    ConditionsNotMetError,
    EpsilonAtEigenvalueError,
    NotFullRankError,
    NotPositiveDefiniteError,
    NotSymmetricError,
)

logger = logging.getLogger(__name__)


@dataclass
class SaddlePointBlocks:
    """Validated (P, Q, R) triple.

    P must be symmetric positive definite, R symmetric positive
    semidefinite, and Q of full row rank (certified through the spectrum of
    Q Q^T: smallest eigenvalue above 1e-10 times the largest).  P and R are
    stored exactly symmetrized so assembled matrices are symmetric to the
    bit.
    """

    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        self.P = as_matrix(self.P, "P")
        self.Q = as_matrix(self.Q, "Q")
        self.R = as_matrix(self.R, "R")
        n = self.P.shape[0]
        m = self.R.shape[0]
        if self.P.shape[1] != n:
            raise BlockShapeMismatchError(f"P must be square, got {self.P.shape}")
        if self.R.shape[1] != m:
            raise BlockShapeMismatchError(f"R must be square, got {self.R.shape}")
        if self.Q.shape != (m, n):
            raise BlockShapeMismatchError(
                f"Q must be {m}x{n} to match R and P, got {self.Q.shape}"
            )
        if m > n:
            raise BlockShapeMismatchError(f"m={m} exceeds n={n}")
        if frobenius(self.P - self.P.T) > 1e-12 * frobenius(self.P) + ABS_FLOOR:
            raise NotSymmetricError("P is not symmetric within 1e-12 relative")
        if m and frobenius(self.R - self.R.T) > 1e-12 * frobenius(self.R) + ABS_FLOOR:
            raise NotSymmetricError("R is not symmetric within 1e-12 relative")
        self.P = 0.5 * (self.P + self.P.T)
        self.R = 0.5 * (self.R + self.R.T)

        eig_p = jacobi_eigh(self.P).eigenvalues
        if eig_p.min() <= 1e-12 * max(frobenius(self.P), ABS_FLOOR):
            raise NotPositiveDefiniteError("P is not positive definite")
        self._lambda_p = eig_p
        if m:
            eig_r = jacobi_eigh(self.R).eigenvalues
            if eig_r.min() < -1e-12 * max(frobenius(self.R), ABS_FLOOR):
                raise NotPositiveDefiniteError("R is not positive semidefinite")
            self._lambda_r = eig_r
            gram = jacobi_eigh(self.Q @ self.Q.T).eigenvalues
            if gram.max() <= 0.0 or gram.min() <= 1e-10 * gram.max():
                raise NotFullRankError(
                    f"Q is rank deficient: Gram spectrum [{gram.min():g}, {gram.max():g}]"
                )
            self._sigma_max = math.sqrt(float(gram.max()))
        else:
            self._lambda_r = np.zeros(0)
            self._sigma_max = 0.0

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def m(self) -> int:
        return self.R.shape[0]

    @property
    def lambda_min_p(self) -> float:
        return float(self._lambda_p.min())

    @property
    def lambda_max_r(self) -> float:
        return float(self._lambda_r.max()) if self.m else 0.0

    @property
    def sigma_max_q(self) -> float:
        return self._sigma_max


def assemble_saddle(blocks: SaddlePointBlocks) -> np.ndarray:
    """Dense [[P, Q^T], [-Q, R]]; for m = 0 this is just P."""
    n, m = blocks.n, blocks.m
    out = np.zeros((n + m, n + m))
    out[:n, :n] = blocks.P
    out[:n, n:] = blocks.Q.T
    out[n:, :n] = -blocks.Q
    out[n:, n:] = blocks.R
    return out


def assemble_a_delta(blocks: SaddlePointBlocks, delta: float) -> np.ndarray:
    """Dense [[P + delta*I, Q^T], [-Q, delta*I + R]] with delta >= 0."""
    if delta < 0.0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    out = assemble_saddle(blocks)
    out[np.diag_indices_from(out)] += delta
    return out


def assemble_s_epsilon(blocks: SaddlePointBlocks, epsilon: float) -> np.ndarray:
    """Dense [[P - eps*I, Q^T], [Q, eps*I - R]], symmetric by construction."""
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    n, m = blocks.n, blocks.m
    out = np.zeros((n + m, n + m))
    out[:n, :n] = blocks.P - epsilon * np.eye(n)
    out[:n, n:] = blocks.Q.T
    out[n:, :n] = blocks.Q
    out[n:, n:] = epsilon * np.eye(m) - blocks.R
    return out


@dataclass(frozen=True)
class EpsilonWindow:
    """Admissible shift window for positive definiteness.

    ``exists`` reflects 2 sigma_max(Q) <= lambda_min(P) - lambda_max(R);
    when it fails both bounds carry the midpoint sentinel so the result is
    NaN-free.
    """

    exists: bool
    eps_minus: float
    eps_plus: float
    lambda_min_p: float
    lambda_max_r: float
    sigma_max_q: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.eps_minus + self.eps_plus)


def epsilon_window(blocks: SaddlePointBlocks) -> EpsilonWindow:
    """Window of shifts for which S_eps is positive definite."""
    lam_p = blocks.lambda_min_p
    lam_r = blocks.lambda_max_r
    sigma = blocks.sigma_max_q
    gap = lam_p - lam_r
    mid = 0.5 * (lam_p + lam_r)
    exists = 2.0 * sigma <= gap
    if exists:
        radius = 0.5 * math.sqrt((gap - 2.0 * sigma) * (gap + 2.0 * sigma))
        lo, hi = mid - radius, mid + radius
    else:
        lo = hi = mid
    return EpsilonWindow(exists=exists, eps_minus=lo, eps_plus=hi,
                         lambda_min_p=lam_p, lambda_max_r=lam_r,
                         sigma_max_q=sigma)


@dataclass(frozen=True)
class PDConditionReport:
    """Outcome of the positive-definiteness conditions at a given shift.

    ``cond_i``..``cond_iii`` are the necessary-and-sufficient tests (block
    shifts and the Schur complement), ``cond_iv``..``cond_vi`` the scalar
    sufficient tests.  ``pd_schur`` and ``pd_direct`` are the two
    independent overall verdicts and must agree.
    """

    epsilon: float
    cond_i: bool
    cond_ii: bool
    cond_iii: bool
    cond_iv: bool
    cond_v: bool
    cond_vi: bool
    pd_schur: bool
    pd_direct: bool
    lambda_min_direct: float
    lambda_min_schur: float

    @property
    def verdicts_agree(self) -> bool:
        return self.pd_schur == self.pd_direct

    @property
    def positive_definite(self) -> bool:
        return self.pd_direct


def _pd_threshold(m: np.ndarray) -> float:
    return 1e-10 * max(frobenius(m), ABS_FLOOR)


def schur_complement(blocks: SaddlePointBlocks, epsilon: float) -> np.ndarray:
    """W_eps = eps*I - R - Q (P - eps*I)^-1 Q^T (empty for m = 0)."""
    n, m = blocks.n, blocks.m
    if m == 0:
        return np.zeros((0, 0))
    shifted = blocks.P - epsilon * np.eye(n)
    w = epsilon * np.eye(m) - blocks.R - blocks.Q @ gauss_solve(shifted, blocks.Q.T)
    return 0.5 * (w + w.T)


def check_pd_conditions(blocks: SaddlePointBlocks, epsilon: float) -> PDConditionReport:
    """Evaluate all positive-definiteness conditions for S_eps.

    The overall verdict is computed two independent ways: through the block
    factorization (shifted (1,1) block and Schur complement) and directly
    through the eigenvalues of the assembled S_eps.

    Raises :class:`EpsilonAtEigenvalueError` when ``epsilon`` collides with
    an eigenvalue of P, which would make the Schur complement singular.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    lam_p_all = jacobi_eigh(blocks.P).eigenvalues
    guard = 1e-12 * max(frobenius(blocks.P), ABS_FLOOR)
    if np.abs(lam_p_all - epsilon).min() < guard:
        raise EpsilonAtEigenvalueError(
            f"epsilon={epsilon:g} coincides with an eigenvalue of P"
        )

    lam_p = blocks.lambda_min_p
    lam_r = blocks.lambda_max_r
    sigma = blocks.sigma_max_q

    shifted_p = blocks.P - epsilon * np.eye(blocks.n)
    eig_shifted = jacobi_eigh(shifted_p).eigenvalues
    cond_i = bool(eig_shifted.min() > _pd_threshold(shifted_p))

    if blocks.m:
        shifted_r = epsilon * np.eye(blocks.m) - blocks.R
        eig_shifted_r = jacobi_eigh(shifted_r).eigenvalues
        cond_ii = bool(eig_shifted_r.min() > _pd_threshold(shifted_r))
        w = schur_complement(blocks, epsilon)
        lam_min_w = float(jacobi_eigh(w).eigenvalues.min())
        cond_iii = bool(lam_min_w > _pd_threshold(w))
    else:
        cond_ii = True
        cond_iii = True
        lam_min_w = float(eig_shifted.min())

    cond_iv = lam_p - epsilon > 0.0
    cond_v = epsilon - lam_r > 0.0
    cond_vi = sigma * sigma < (lam_p - epsilon) * (epsilon - lam_r)

    pd_schur = cond_i and cond_iii
    s_eps = assemble_s_epsilon(blocks, epsilon)
    lam_min_direct = float(jacobi_eigh(s_eps).eigenvalues.min())
    pd_direct = bool(lam_min_direct > _pd_threshold(s_eps))

    return PDConditionReport(
        epsilon=epsilon,
        cond_i=cond_i, cond_ii=cond_ii, cond_iii=cond_iii,
        cond_iv=cond_iv, cond_v=cond_v, cond_vi=cond_vi,
        pd_schur=pd_schur, pd_direct=pd_direct,
        lambda_min_direct=lam_min_direct, lambda_min_schur=lam_min_w,
    )


@dataclass(frozen=True)
class EigenvalueInterval:
    """Verbatim interval bounds plus the empirical spectrum extremes.

    ``formula_real`` is False when the radicand of the printed formula is
    negative, in which case the bounds are NaN; containment is recorded,
    never asserted.
    """

    lam_minus: float
    lam_plus: float
    radicand: float
    formula_real: bool
    empirical_min: float
    empirical_max: float
    contained: bool


def eigenvalue_interval(blocks: SaddlePointBlocks, epsilon: float) -> EigenvalueInterval:
    """Evaluate the printed spectral-interval formula for S_eps.

    Requires the scalar sufficient conditions to hold; raises
    :class:`ConditionsNotMetError` otherwise.  The formula is evaluated
    verbatim; a negative radicand yields NaN bounds and is logged rather
    than patched.
    """
    report = check_pd_conditions(blocks, epsilon)
    if not (report.cond_iv and report.cond_v and report.cond_vi):
        raise ConditionsNotMetError(
            "scalar sufficient conditions (iv)-(vi) fail at this epsilon"
        )
    lam_p = blocks.lambda_min_p
    lam_r = blocks.lambda_max_r
    sigma2 = blocks.sigma_max_q ** 2
    lead = 0.5 * (lam_p - lam_r)
    radicand = ((lam_r + lam_p) ** 2 + 4.0 * sigma2
                - 4.0 * epsilon * lam_p + epsilon * (lam_r - epsilon))
    eig = jacobi_eigh(assemble_s_epsilon(blocks, epsilon)).eigenvalues
    emp_min, emp_max = float(eig.min()), float(eig.max())
    if radicand < 0.0:
        logger.info(
            "interval formula has negative radicand %.6g at epsilon=%.6g; "
            "no real bounds", radicand, epsilon,
        )
        return EigenvalueInterval(
            lam_minus=math.nan, lam_plus=math.nan, radicand=radicand,
            formula_real=False, empirical_min=emp_min, empirical_max=emp_max,
            contained=False,
        )
    half = 0.5 * math.sqrt(radicand)
    lo, hi = lead - half, lead + half
    contained = bool(lo <= emp_min and emp_max <= hi)
    return EigenvalueInterval(
        lam_minus=lo, lam_plus=hi, radicand=radicand, formula_real=True,
        empirical_min=emp_min, empirical_max=emp_max, contained=contained,
    )


def perturbed_sylvester_residual(blocks: SaddlePointBlocks, delta: float, epsilon: float) -> float:
    """|| A_delta^T S_eps - S_eps A_delta ||_F (structurally zero)."""
    a_delta = assemble_a_delta(blocks, delta)
    s_eps = assemble_s_epsilon(blocks, epsilon)
    return sylvester_residual(a_delta, s_eps)
