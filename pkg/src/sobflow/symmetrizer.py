"""Positive diagonal symmetrizers for axisymmetric structure matrices.

An axisymmetric structure matrix is a diagonal plus paired strictly-lower
entries a_ij and strictly-upper entries b_ji whose products are positive.
Such a matrix admits a positive diagonal S with A^T S = S A, and S can be
built from the off-diagonal data alone: put a graph edge on every stored
pair, pick the lowest node of each connected component as a seed with
s_seed = 1, and propagate s_i = (b_ji / a_ij) * s_j along a spanning tree.
Every non-tree edge imposes a ratio constraint ("connection equation");
the construction succeeds only if all of them agree.

The module also carries the rank-one family diag(d) + a b^T (symmetrizer
diag(b_i / a_i) and its characteristic polynomial), the eigenbasis-based
construction S = V^-T Z V^-1, and the Gershgorin-style localization discs
for the symmetrized matrix.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ABS_FLOOR,
    as_matrix,
    frobenius,
    gauss_solve,
    sylvester_residual,
)
from .errors import (
    DimensionMismatchError,
    InconsistentConnectionError,
    NonPositiveError,
    NotPositiveDefiniteError,
    NotSortedError,
    ResidualTooLargeError,
    SignViolationError,
    SingularEigenbasisError,
    SingularMatrixError,
)


@dataclass
class AxisymmetricMatrix:
    """Diagonal d plus paired off-diagonal entries.

    ``lower[(i, j)]`` holds the entry at row i, column j (j < i) and
    ``upper[(i, j)]`` holds the paired entry at row j, column i.  Stored
    pairs must have a strictly positive product; a pair where exactly one
    side vanishes is rejected, and all-zero pairs are simply absent.
    """

    d: np.ndarray
    lower: dict[tuple[int, int], float] = field(default_factory=dict)
    upper: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        self.d = np.asarray(self.d, dtype=float).reshape(-1)
        if self.d.size == 0:
            raise DimensionMismatchError("dimension must be at least 1")
        if not np.isfinite(self.d).all():
            raise ValueError("diagonal contains non-finite entries")
        if set(self.lower) != set(self.upper):
            raise SignViolationError(
                "lower and upper sparsity patterns differ: a stored pair "
                "must have both entries nonzero"
            )
        n = self.d.size
        self.lower = {k: float(v) for k, v in self.lower.items()}
        self.upper = {k: float(v) for k, v in self.upper.items()}
        for (i, j), a in self.lower.items():
            if not (0 <= j < i < n):
                raise DimensionMismatchError(f"pair index {(i, j)} out of range")
            b = self.upper[(i, j)]
            if not (np.isfinite(a) and np.isfinite(b)):
                raise ValueError(f"pair {(i, j)} has non-finite entries")
            if a * b <= 0.0:
                raise SignViolationError(
                    f"pair a[{i},{j}]={a:g}, b[{j},{i}]={b:g} has non-positive product"
                )

    @property
    def n(self) -> int:
        return self.d.size

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.d)
        for (i, j), v in self.lower.items():
            a[i, j] = v
        for (i, j), v in self.upper.items():
            a[j, i] = v
        return a

    @classmethod
    def from_dense(cls, a) -> "AxisymmetricMatrix":
        """Extract the structured form of a dense matrix.

        Raises :class:`SignViolationError` when the sparsity pattern is not
        axisymmetric or a stored pair has a non-positive product.
        """
        a = as_matrix(a, "matrix")
        n = a.shape[0]
        if a.shape[1] != n:
            raise DimensionMismatchError(f"matrix must be square, got {a.shape}")
        lower: dict[tuple[int, int], float] = {}
        upper: dict[tuple[int, int], float] = {}
        for i in range(n):
            for j in range(i):
                lo, up = a[i, j], a[j, i]
                if lo == 0.0 and up == 0.0:
                    continue
                lower[(i, j)] = lo
                upper[(i, j)] = up
        return cls(d=a.diagonal().copy(), lower=lower, upper=upper)


@dataclass
class CoordinateGraph:
    """Undirected graph on row/column indices, one edge per stored pair.

    ``ratios[(i, j)]`` is b_ji / a_ij, the factor taking s_j to s_i across
    the edge.  Components are sorted node lists; each component's seed is
    its lowest index.
    """

    n: int
    edges: list[tuple[int, int]]
    ratios: dict[tuple[int, int], float]
    components: list[list[int]]
    seeds: list[int]


def build_coordinate_graph(a: AxisymmetricMatrix) -> CoordinateGraph:
    """Build the coordinate graph of the off-diagonal pattern.

    Components are found by breadth-first traversal from the lowest
    unvisited index, so node lists and seeds are deterministic.
    """
    n = a.n
    edges = sorted(a.lower)
    ratios = {key: a.upper[key] / a.lower[key] for key in edges}
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adjacency[i].append(j)
        adjacency[j].append(i)
    seen = [False] * n
    components, seeds = [], []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        nodes = []
        while queue:
            node = queue.popleft()
            nodes.append(node)
            for nbr in sorted(adjacency[node]):
                if not seen[nbr]:
                    seen[nbr] = True
                    queue.append(nbr)
        components.append(sorted(nodes))
        seeds.append(start)
    return CoordinateGraph(n=n, edges=edges, ratios=ratios,
                           components=components, seeds=seeds)


@dataclass
class DiagonalSymmetrizer:
    """Positive diagonal symmetrizer with its certificates.

    ``residual`` is the Frobenius norm of A^T S - S A evaluated on the dense
    matrix; ``consistency_violation`` is the worst relative disagreement of
    the ratio constraints across non-tree edges.
    """

    s: np.ndarray
    residual: float
    consistency_violation: float

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.s)


def solve_diagonal_symmetrizer(
    a: AxisymmetricMatrix,
    tol: float = 1e-10,
    order: str = "bfs",
) -> DiagonalSymmetrizer:
    """Construct the diagonal symmetrizer by graph propagation.

    Seeds carry s = 1; crossing edge (i, j) multiplies by b_ji / a_ij (or
    divides in the opposite direction).  ``order`` selects the spanning
    tree traversal ("bfs" or "dfs"); when the connection equations hold the
    result does not depend on it.

    Raises
    ------
    InconsistentConnectionError
        when a connection equation is violated beyond ``tol`` (relative),
        or the certified residual exceeds 1e-10 * ||A||_F.
    NonPositiveError
        when a propagated entry is not strictly positive.
    """
    if order not in ("bfs", "dfs"):
        raise ValueError(f"order must be 'bfs' or 'dfs', got {order!r}")
    graph = build_coordinate_graph(a)
    n = graph.n
    adjacency: list[list[tuple[int, tuple[int, int]]]] = [[] for _ in range(n)]
    for key in graph.edges:
        i, j = key
        adjacency[i].append((j, key))
        adjacency[j].append((i, key))

    s = np.full(n, np.nan)
    for seed in graph.seeds:
        s[seed] = 1.0
        frontier = deque([seed])
        while frontier:
            node = frontier.popleft() if order == "bfs" else frontier.pop()
            for nbr, key in sorted(adjacency[node]):
                if not np.isnan(s[nbr]):
                    continue
                ratio = graph.ratios[key]
                hi, lo = key
                s[nbr] = s[node] * ratio if nbr == hi else s[node] / ratio
                frontier.append(nbr)

    if np.isnan(s).any():
        raise InconsistentConnectionError("traversal failed to reach every node")
    if (s <= 0.0).any():
        worst = int(np.argmin(s))
        raise NonPositiveError(f"propagated entry s[{worst}] = {s[worst]:g} <= 0")

    violation = 0.0
    for (i, j), ratio in graph.ratios.items():
        expected = ratio * s[j]
        violation = max(violation, abs(s[i] - expected) / max(s[i], expected))
    if violation > tol:
        raise InconsistentConnectionError(
            f"connection equations disagree by {violation:.3e} "
            f"(tolerance {tol:.3e}); the ratio system is over-determined"
        )

    dense = a.to_dense()
    residual = sylvester_residual(dense, np.diag(s))
    if residual > 1e-10 * max(frobenius(dense), ABS_FLOOR):
        raise InconsistentConnectionError(
            f"certified residual {residual:.3e} exceeds 1e-10 * ||A||_F"
        )
    return DiagonalSymmetrizer(s=s, residual=residual,
                               consistency_violation=violation)


def gershgorin_intervals(a: AxisymmetricMatrix) -> list[tuple[float, float]]:
    """Localization intervals [d_i - r_i, d_i + r_i] for the spectrum.

    Each stored pair contributes the geometric mean sqrt(a_ij * b_ji) to the
    radii of both of its rows, matching the discs of the symmetrized matrix.
    """
    radii = np.zeros(a.n)
    for (i, j), lo in a.lower.items():
        root = np.sqrt(lo * a.upper[(i, j)])
        radii[i] += root
        radii[j] += root
    return [(float(c), float(r)) for c, r in zip(a.d, radii)]


def gershgorin_all_positive(intervals: list[tuple[float, float]]) -> bool:
    """True when every interval lies strictly right of zero (r_i < d_i)."""
    return all(r < c for c, r in intervals)


def rank_one_symmetrizer(d, a, b) -> DiagonalSymmetrizer:
    """Symmetrizer diag(b_i / a_i) for the family diag(d) + a b^T.

    Requires 0 < d_1 < ... < d_n and a_i * b_i > 0 for every i; the returned
    certificate is evaluated on the dense assembled matrix.
    """
    d = np.asarray(d, dtype=float).reshape(-1)
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if not (d.size == a.size == b.size) or d.size == 0:
        raise DimensionMismatchError("d, a, b must share a positive length")
    if d[0] <= 0.0 or (np.diff(d) <= 0.0).any():
        raise NotSortedError("d must be strictly increasing and positive")
    if (a * b <= 0.0).any():
        bad = int(np.argmin(a * b))
        raise SignViolationError(f"a[{bad}] * b[{bad}] = {a[bad] * b[bad]:g} <= 0")
    s = b / a
    dense = np.diag(d) + np.outer(a, b)
    residual = sylvester_residual(dense, np.diag(s))
    if residual > 1e-12 * max(frobenius(dense), ABS_FLOOR):
        raise ResidualTooLargeError(
            f"certified residual {residual:.3e} exceeds 1e-12 * ||A||_F"
        )
    return DiagonalSymmetrizer(s=s, residual=residual, consistency_violation=0.0)


def char_poly_rank_one(d, a, b, lam: float) -> float:
    """Characteristic polynomial of diag(d) + a b^T at ``lam``.

    Evaluates the expanded form prod(lam - d_i) - sum_i a_i b_i *
    prod_{j != i}(lam - d_j), which is finite everywhere including at the
    poles d_i of the quotient form.
    """
    d = np.asarray(d, dtype=float).reshape(-1)
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if not (d.size == a.size == b.size):
        raise DimensionMismatchError("d, a, b must share a length")
    diffs = lam - d
    total = float(np.prod(diffs))
    correction = 0.0
    for i in range(d.size):
        correction += a[i] * b[i] * float(np.prod(np.delete(diffs, i)))
    return total - correction


def symmetrizer_from_eigenbasis(a, v, z) -> np.ndarray:
    """Symmetrizer S = V^-T Z V^-1 from a real eigenbasis V of ``a``.

    ``z`` is a positive diagonal (vector or diagonal matrix); any choice
    yields a symmetric positive definite S, and when the columns of V are
    eigenvectors of ``a`` the coupling residual vanishes.  The residual is
    certified against 1e-8 * ||a||_F and a failure signals an invalid V.
    """
    a = as_matrix(a, "a")
    v = as_matrix(v, "eigenbasis")
    n = a.shape[0]
    if a.shape[1] != n or v.shape != a.shape:
        raise DimensionMismatchError(
            f"matrix and eigenbasis must be square of equal size, got {a.shape} and {v.shape}"
        )
    z = np.asarray(z, dtype=float)
    if z.ndim == 2:
        z = z.diagonal().copy()
    z = z.reshape(-1)
    if z.size != n:
        raise DimensionMismatchError(f"z has length {z.size}, expected {n}")
    if (z <= 0.0).any():
        raise NotPositiveDefiniteError("z must be strictly positive")
    try:
        v_inv = gauss_solve(v, np.eye(n))
    except SingularMatrixError as exc:
        raise SingularEigenbasisError("eigenbasis is numerically singular") from exc
    s = v_inv.T @ (z[:, None] * v_inv)
    s = 0.5 * (s + s.T)
    residual = sylvester_residual(a, s)
    if residual > 1e-8 * max(frobenius(a), ABS_FLOOR):
        raise ResidualTooLargeError(
            f"residual {residual:.3e} exceeds 1e-8 * ||A||_F; "
            "the supplied columns are not an eigenbasis"
        )
    return s


def rank_perturbation_terms(
    a: AxisymmetricMatrix,
) -> tuple[np.ndarray, list[tuple[np.ndarray, np.ndarray]]]:
    """Decompose A as diag(d - 2) + sum_j (a_j e_j^T + e_j b_j^T).

    The j-th pair of vectors carries a 1 in slot j plus the stored column
    (rows > j) and row (columns > j) entries; the two inserted ones per
    index account for the -2 diagonal shift.
    """
    n = a.n
    terms = []
    for j in range(n):
        col = np.zeros(n)
        row = np.zeros(n)
        col[j] = 1.0
        row[j] = 1.0
        for i in range(j + 1, n):
            col[i] = a.lower.get((i, j), 0.0)
            row[i] = a.upper.get((i, j), 0.0)
        terms.append((col, row))
    return a.d - 2.0, terms


def assemble_rank_perturbation(
    d_shifted: np.ndarray,
    terms: list[tuple[np.ndarray, np.ndarray]],
) -> np.ndarray:
    """Rebuild the dense matrix from its rank-perturbation terms."""
    n = len(d_shifted)
    out = np.diag(np.asarray(d_shifted, dtype=float))
    basis = np.eye(n)
    for j, (col, row) in enumerate(terms):
        out += np.outer(col, basis[j]) + np.outer(basis[j], row)
    return out
