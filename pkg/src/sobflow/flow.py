"""The S-Oja-Brockett matrix flow and its Euler integrators.

The flow dX/dt = A X B - X B X^T S A X is the negative gradient of

    g(X) = 1/4 tr[(S A X B X^T)^2] - 1/2 tr(S A^2 X B^2 X^T)

under the Riemannian metric <W1, W2> = tr(S A W1 B W2^T), provided S is a
symmetric positive definite solution of A^T S = S A and B is positive
diagonal.  With strictly decreasing diagonal entries in B and distinct
positive eigenvalues of A, the iterate X^T S A X converges to the m largest
eigenvalues in descending order and the columns of X to eigenvectors of A.

Two discretizations are provided: fixed-step Euler, and a variable-step
Euler whose step size is the smallest positive root of the exact cubic
d/d(gamma) g(X + gamma V).  The cubic coefficients below were derived by
expanding g(X + gamma V) directly and are validated against finite
differences; the constant coefficient is evaluated as -tr(S A V B V^T),
which is algebraically equal to tr(W2 W3) - tr(W5) but does not suffer
cancellation as V -> 0.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ABS_FLOOR,
    as_matrix,
    determinant,
    frobenius,
    spd_sqrt_pair,
    sylvester_residual,
)
from .errors import (
    DimensionMismatchError,
    DivergenceDetectedError,
    NotConvergedError,
    NotFullRankError,
    NotPositiveDefiniteError,
    ResidualTooLargeError,
    ShapeMismatchError,
    ZeroFieldError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowProblem:
    """Constant data of one flow: A, diagonal B, symmetrizer S and caches.

    ``b`` holds the diagonal of B.  ``sa`` (= S A, symmetric) and
    ``sa2`` (= S A^2) are precomputed because every field, potential and
    metric evaluation uses them.
    """

    a: np.ndarray
    b: np.ndarray
    s: np.ndarray
    sqrt_s: np.ndarray
    sqrt_s_inv: np.ndarray
    sa: np.ndarray
    sa2: np.ndarray
    norm_a: float

    @classmethod
    def create(cls, a, b, s) -> "FlowProblem":
        """Validate and cache a flow problem.

        ``b`` may be a positive vector or a positive diagonal matrix with
        as many entries as X will have columns (M <= N).  ``s`` must be
        symmetric positive definite with coupling residual
        ||A^T S - S A||_F <= 1e-9 ||A||_F.
        """
        a = as_matrix(a, "a")
        n = a.shape[0]
        if a.shape[1] != n:
            raise DimensionMismatchError(f"A must be square, got {a.shape}")
        b = np.asarray(b, dtype=float)
        if b.ndim == 2:
            off = b - np.diag(b.diagonal())
            if np.abs(off).max() > 0.0:
                raise NotPositiveDefiniteError("B must be diagonal")
            b = b.diagonal().copy()
        b = b.reshape(-1)
        if b.size == 0 or b.size > n:
            raise DimensionMismatchError(
                f"B must have between 1 and {n} diagonal entries, got {b.size}"
            )
        if (b <= 0.0).any() or not np.isfinite(b).all():
            raise NotPositiveDefiniteError("B diagonal must be strictly positive")
        s = as_matrix(s, "s")
        if s.shape != a.shape:
            raise DimensionMismatchError(f"S must match A, got {s.shape}")
        norm_a = frobenius(a)
        resid = sylvester_residual(a, s)
        if resid > 1e-9 * max(norm_a, ABS_FLOOR):
            raise ResidualTooLargeError(
                f"coupling residual {resid:.3e} exceeds 1e-9 * ||A||_F; "
                "S does not symmetrize A"
            )
        root, root_inv = spd_sqrt_pair(s)
        sa = s @ a
        return cls(a=a, b=b, s=s, sqrt_s=root, sqrt_s_inv=root_inv,
                   sa=sa, sa2=sa @ a, norm_a=norm_a)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.size

    @property
    def b_matrix(self) -> np.ndarray:
        return np.diag(self.b)

    def is_descending(self) -> bool:
        """True when the diagonal of B is strictly decreasing."""
        return bool((np.diff(self.b) < 0.0).all())


def _check_state(problem: FlowProblem, x, name: str = "X") -> np.ndarray:
    x = as_matrix(x, name)
    if x.shape != (problem.n, problem.m):
        raise ShapeMismatchError(
            f"{name} must be {problem.n}x{problem.m}, got {x.shape}"
        )
    return x


def vector_field(problem: FlowProblem, x) -> np.ndarray:
    """V(X) = A X B - X B (X^T S A X)."""
    x = _check_state(problem, x)
    l_mat = x.T @ (problem.sa @ x)
    return (problem.a @ x) * problem.b - (x * problem.b) @ l_mat


def coupling_matrix(problem: FlowProblem, x) -> np.ndarray:
    """L(X) = X^T S A X, whose diagonal converges to eigenvalues."""
    x = _check_state(problem, x)
    return x.T @ (problem.sa @ x)


def potential(problem: FlowProblem, x) -> float:
    """g(X) = 1/4 tr[(S A X B X^T)^2] - 1/2 tr(S A^2 X B^2 X^T)."""
    x = _check_state(problem, x)
    k = problem.sa @ ((x * problem.b) @ x.T)
    quartic = 0.25 * float((k * k.T).sum())
    quadratic = 0.5 * float(((problem.sa2 @ (x * (problem.b ** 2))) * x).sum())
    return quartic - quadratic


def metric_inner(problem: FlowProblem, omega1, omega2) -> float:
    """Riemannian pairing tr(S A Omega1 B Omega2^T); symmetric in its arguments."""
    omega1 = _check_state(problem, omega1, "omega1")
    omega2 = _check_state(problem, omega2, "omega2")
    return float(((problem.sa @ (omega1 * problem.b)) * omega2).sum())


def euler_step_fixed(problem: FlowProblem, x, gamma: float) -> np.ndarray:
    """One explicit Euler update X + gamma * V(X)."""
    x = _check_state(problem, x)
    return x + gamma * vector_field(problem, x)


def _cubic_coeffs(problem: FlowProblem, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Coefficients [c0, c1, c2, c3] of d/d(gamma) g(X + gamma V).

    With H = S A (symmetric) and the products
        W1 = H V B V^T,  W2 = H X B V^T,  W2s = H V B X^T,  W3 = H X B X^T,
    the derivative of g along the ray is

        c3 g^3 + c2 g^2 + c1 g + c0,
        c3 = tr(W1^2)
        c2 = 3 tr(W1 W2)
        c1 = tr(W2^2) + tr(W2 W2s) + tr(W1 W3) - tr(S A^2 V B^2 V^T)
        c0 = -tr(W1)   [= tr(W2 W3) - tr(S A^2 V B^2 X^T)]
    """
    b = problem.b
    sa = problem.sa
    w1 = sa @ ((v * b) @ v.T)
    w2 = sa @ ((x * b) @ v.T)
    w2s = sa @ ((v * b) @ x.T)
    w3 = sa @ ((x * b) @ x.T)
    tr_w4 = float(((problem.sa2 @ (v * (b ** 2))) * v).sum())
    c3 = float((w1 * w1.T).sum())
    c2 = 3.0 * float((w1 * w2.T).sum())
    c1 = (float((w2 * w2.T).sum()) + float((w2 * w2s.T).sum())
          + float((w1 * w3.T).sum()) - tr_w4)
    c0 = -float(np.trace(w1))
    return np.array([c0, c1, c2, c3])


def cubic_value(coeffs: np.ndarray, gamma: float) -> float:
    """Evaluate c3 g^3 + c2 g^2 + c1 g + c0 (coeffs ordered [c0..c3])."""
    c0, c1, c2, c3 = coeffs
    return ((c3 * gamma + c2) * gamma + c1) * gamma + c0


def potential_decrement(coeffs: np.ndarray, gamma: float) -> float:
    """Exact change g(X + gamma V) - g(X) from the cubic's antiderivative.

    Evaluating the quartic c0 g + c1 g^2/2 + c2 g^3/3 + c3 g^4/4 avoids the
    catastrophic cancellation of subtracting two nearly equal potentials
    when the field is small.
    """
    c0, c1, c2, c3 = coeffs
    return ((((0.25 * c3 * gamma + c2 / 3.0) * gamma + 0.5 * c1) * gamma + c0)
            * gamma)


def smallest_positive_cubic_root(coeffs: np.ndarray) -> float:
    """Smallest positive root of the cubic, by bracketed bisection.

    Requires c3 > 0 and c0 < 0 so that a positive root exists.  The
    positive axis is split at the cubic's critical points (the cubic is
    monotone between them) and the first sign change is bisected, then
    polished with a few Newton steps inside the bracket.
    """
    c0, c1, c2, c3 = (float(v) for v in coeffs)
    if not c3 > 0.0:
        raise ZeroFieldError(f"cubic leading coefficient {c3:g} is not positive")
    if not c0 < 0.0:
        raise ZeroFieldError(f"cubic constant coefficient {c0:g} is not negative")
    upper = 1.0 + max(abs(c0), abs(c1), abs(c2)) / c3

    def f(g: float) -> float:
        return ((c3 * g + c2) * g + c1) * g + c0

    # critical points of the cubic partition (0, upper] into monotone pieces
    knots = [0.0]
    disc = 4.0 * c2 * c2 - 12.0 * c3 * c1
    if disc > 0.0:
        centre = -c2 / (3.0 * c3)
        half = math.sqrt(disc) / (6.0 * c3)
        for t in (centre - half, centre + half):
            if 0.0 < t < upper:
                knots.append(t)
    knots.append(upper)
    knots = sorted(set(knots))

    lo = hi = None
    for left, right in zip(knots[:-1], knots[1:]):
        if f(left) <= 0.0 and f(right) > 0.0:
            lo, hi = left, right
            break
    if lo is None:
        raise ZeroFieldError("no positive root bracket found")

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    root = 0.5 * (lo + hi)
    for _ in range(4):
        slope = (3.0 * c3 * root + 2.0 * c2) * root + c1
        if slope == 0.0:
            break
        step = f(root) / slope
        candidate = root - step
        if not (lo <= candidate <= hi):
            break
        root = candidate
    return root


def _descending_gamma(coeffs: np.ndarray) -> tuple[float, int]:
    """Root of the cubic, halved until the analytic decrement is negative."""
    gamma = smallest_positive_cubic_root(coeffs)
    halvings = 0
    while potential_decrement(coeffs, gamma) >= 0.0:
        gamma *= 0.5
        halvings += 1
        if halvings > 200:
            raise ZeroFieldError("no descending step exists; field is numerically zero")
    if halvings:
        logger.debug("halved step %d times to restore descent", halvings)
    return gamma, halvings


def optimal_gamma(problem: FlowProblem, x) -> tuple[float, np.ndarray]:
    """Optimal Euler step at ``x`` and the cubic coefficients [c0..c3].

    The step is the smallest positive root of d/d(gamma) g(X + gamma V); if
    the analytic decrement at the root is not negative the step is halved
    until it is (logged).  Raises :class:`ZeroFieldError` when the field is
    numerically zero and no descent direction exists.
    """
    x = _check_state(problem, x)
    v = vector_field(problem, x)
    coeffs = _cubic_coeffs(problem, x, v)
    gamma, _ = _descending_gamma(coeffs)
    return gamma, coeffs


class StopReason(enum.Enum):
    RESIDUAL_SMALL = "ResidualSmall"
    MAX_ITERATIONS = "MaxIterations"
    DIVERGED = "Diverged"


@dataclass(frozen=True)
class FlowState:
    """Snapshot of the iteration: X, L = X^T S A X, potential, last step."""

    x: np.ndarray
    iteration: int
    gamma_last: float
    l_matrix: np.ndarray
    potential: float

    @property
    def l_diagonal(self) -> np.ndarray:
        return self.l_matrix.diagonal().copy()

    @property
    def offdiag_max(self) -> float:
        off = self.l_matrix - np.diag(self.l_matrix.diagonal())
        return float(np.abs(off).max()) if off.size else 0.0


@dataclass
class Trajectory:
    """Sampled history of one integration run.

    ``states`` holds snapshots every ``stride`` accepted iterations plus
    the initial and final states.  In variable mode the recorded potential
    accumulates the analytic per-step decrements, which makes the sequence
    non-increasing by construction; ``max_step_decrement`` is the largest
    (least negative) decrement over all accepted steps.
    """

    states: list[FlowState] = field(default_factory=list)
    converged: bool = False
    stop_reason: StopReason = StopReason.MAX_ITERATIONS
    iterations: int = 0
    mode: str = "fixed"
    fallback_steps: int = 0
    max_step_decrement: float | None = None
    audit_max_rel_dev: float | None = None
    audit_samples: int = 0

    @property
    def final_state(self) -> FlowState:
        return self.states[-1]

    @property
    def potentials(self) -> np.ndarray:
        return np.array([st.potential for st in self.states])


def _audit_cubic(problem, x, v, coeffs, gamma_opt, g0) -> tuple[float, int]:
    """Compare the cubic against central differences of the line potential.

    Samples five ray positions; a sample only counts when the polynomial
    value exceeds the finite-difference noise floor eps*|g|/h, below which
    the difference quotient carries no signal.
    """
    c3 = abs(float(coeffs[3]))
    eps = np.finfo(float).eps
    h = ((3.0 * eps * (1.0 + abs(g0))) / (1.0 + 6.0 * c3)) ** (1.0 / 3.0)
    h = min(max(h, 1e-10), 1e-3)
    worst = 0.0
    counted = 0
    for factor in (0.0, 0.25, 0.5, 1.0, 1.5):
        gamma = factor * gamma_opt
        g_plus = potential(problem, x + (gamma + h) * v)
        g_minus = potential(problem, x + (gamma - h) * v)
        fd = (g_plus - g_minus) / (2.0 * h)
        poly = cubic_value(coeffs, gamma)
        floor = 1e3 * eps * max(abs(g_plus), abs(g_minus), 1.0) / h
        if abs(poly) <= floor:
            continue
        counted += 1
        worst = max(worst, abs(fd - poly) / abs(poly))
    return worst, counted


def integrate(
    problem: FlowProblem,
    x0,
    *,
    mode: str = "fixed",
    gamma: float = 0.01,
    max_iters: int = 2_000_000,
    tol_abs: float = 1e-10,
    tol_rel: float = 1e-10,
    stride: int = 100,
    audit: bool = False,
) -> Trajectory:
    """Integrate the flow until the field norm meets the stopping rule.

    Stops when ||V(X)||_F <= tol_abs + tol_rel * ||A||_F * ||X||_F, which is
    the gradient norm in the flat chart and covers the sorting, distinct-B
    and principal-subspace regimes alike.  Snapshots are taken at iteration
    0, every ``stride`` accepted iterations, and at the final iterate.

    Raises
    ------
    NotFullRankError
        when the Gram determinant of ``x0`` is at or below 1e-12.
    DivergenceDetectedError
        when ||X||_F exceeds 1e6 ||X0||_F; the partial trajectory rides on
        the exception.
    """
    if mode not in ("fixed", "variable"):
        raise ValueError(f"mode must be 'fixed' or 'variable', got {mode!r}")
    if mode == "fixed" and not gamma > 0.0:
        raise ValueError(f"fixed mode requires gamma > 0, got {gamma}")
    if audit and mode != "variable":
        raise ValueError("audit applies to variable mode only")
    if stride < 1:
        raise ValueError(f"stride must be at least 1, got {stride}")

    x = _check_state(problem, x0).copy()
    if determinant(x.T @ x) <= 1e-12:
        raise NotFullRankError("x0 Gram determinant is at or below 1e-12")
    norm_x0 = frobenius(x)
    guard = 1e6 * norm_x0

    traj = Trajectory(mode=mode)
    g_running = potential(problem, x)

    def snapshot(iteration: int, gamma_last: float, g_value: float,
                 l_mat: np.ndarray) -> None:
        traj.states.append(FlowState(
            x=x.copy(), iteration=iteration, gamma_last=gamma_last,
            l_matrix=l_mat.copy(), potential=g_value,
        ))

    l_mat = x.T @ (problem.sa @ x)
    snapshot(0, 0.0, g_running, l_mat)

    iteration = 0
    gamma_last = 0.0
    while True:
        sa_x = problem.sa @ x
        l_mat = x.T @ sa_x
        v = (problem.a @ x) * problem.b - (x * problem.b) @ l_mat
        v_norm = frobenius(v)
        norm_x = frobenius(x)
        threshold = tol_abs + tol_rel * problem.norm_a * norm_x
        if v_norm <= threshold:
            traj.converged = True
            traj.stop_reason = StopReason.RESIDUAL_SMALL
            break
        if iteration >= max_iters:
            traj.stop_reason = StopReason.MAX_ITERATIONS
            break

        if mode == "fixed":
            step = gamma
            g_next = None
        else:
            coeffs = _cubic_coeffs(problem, x, v)
            step, halvings = _descending_gamma(coeffs)
            traj.fallback_steps += 1 if halvings else 0
            decrement = potential_decrement(coeffs, step)
            if traj.max_step_decrement is None or decrement > traj.max_step_decrement:
                traj.max_step_decrement = decrement
            if audit:
                dev, counted = _audit_cubic(problem, x, v, coeffs, step, g_running)
                traj.audit_samples += counted
                if traj.audit_max_rel_dev is None or dev > traj.audit_max_rel_dev:
                    traj.audit_max_rel_dev = dev
            g_next = g_running + decrement

        x = x + step * v
        iteration += 1
        gamma_last = step
        # "not <=" also trips on NaN from an overflowed update
        if not (frobenius(x) <= guard):
            traj.iterations = iteration
            traj.stop_reason = StopReason.DIVERGED
            l_mat = x.T @ (problem.sa @ x)
            g_running = math.nan if mode == "fixed" else g_next
            snapshot(iteration, gamma_last, g_running, l_mat)
            raise DivergenceDetectedError(
                f"||X||_F exceeded 1e6 * ||X0||_F at iteration {iteration}",
                trajectory=traj,
            )
        if mode != "fixed":
            g_running = g_next
        if iteration % stride == 0:
            if mode == "fixed":
                g_running = potential(problem, x)
            l_mat = x.T @ (problem.sa @ x)
            snapshot(iteration, gamma_last, g_running, l_mat)

    traj.iterations = iteration
    if not traj.states or traj.states[-1].iteration != iteration:
        if mode == "fixed":
            g_running = potential(problem, x)
        l_mat = x.T @ (problem.sa @ x)
        snapshot(iteration, gamma_last, g_running, l_mat)
    return traj


@dataclass(frozen=True)
class EigenPair:
    """One converged eigenpair with residual certificates.

    ``vector`` is the unit column of X (an eigenvector of A);
    ``symmetrized_vector`` is the unit column of sqrt(S) X (an eigenvector
    of the symmetrized matrix sqrt(S) A sqrt(S)^-1).  Each carries its own
    residual.
    """

    value: float
    vector: np.ndarray
    residual: float
    symmetrized_vector: np.ndarray
    symmetrized_residual: float


def extract_eigenpairs(problem: FlowProblem, trajectory: Trajectory) -> list[EigenPair]:
    """Read eigenpairs off a converged trajectory.

    Eigenvalues are the diagonal of L = X^T S A X in B's order; columns of
    X are normalized to unit Euclidean length.  Raises
    :class:`NotConvergedError` when the trajectory did not converge.
    """
    if not trajectory.converged:
        raise NotConvergedError(f"trajectory stopped with {trajectory.stop_reason}")
    x = trajectory.final_state.x
    l_mat = trajectory.final_state.l_matrix
    a_tilde = problem.sqrt_s @ problem.a @ problem.sqrt_s_inv
    y = problem.sqrt_s @ x
    pairs = []
    for i in range(problem.m):
        lam = float(l_mat[i, i])
        col = x[:, i]
        col = col / math.sqrt(float((col * col).sum()))
        resid = frobenius(problem.a @ col - lam * col)
        ycol = y[:, i]
        ycol = ycol / math.sqrt(float((ycol * ycol).sum()))
        resid_sym = frobenius(a_tilde @ ycol - lam * ycol)
        pairs.append(EigenPair(
            value=lam, vector=col, residual=resid,
            symmetrized_vector=ycol, symmetrized_residual=resid_sym,
        ))
    return pairs


def write_trajectory_csv(trajectory: Trajectory, path_or_file) -> None:
    """Write snapshots as CSV: iter,gamma,potential,L_11,...,L_MM,offdiag_max."""
    m = trajectory.final_state.l_matrix.shape[0]
    header = ["iter", "gamma", "potential"]
    header += [f"L_{i + 1}{i + 1}" for i in range(m)]
    header.append("offdiag_max")
    lines = [",".join(header)]
    for st in trajectory.states:
        row = [str(st.iteration), f"{st.gamma_last:.17g}", f"{st.potential:.17g}"]
        row += [f"{v:.17g}" for v in st.l_diagonal]
        row.append(f"{st.offdiag_max:.17g}")
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w") as fh:
            fh.write(text)
