"""Shared random-instance generators for the test suite.

Instances are constructed with planted answers: structured matrices get a
planted positive diagonal symmetrizer (so the ratio constraints hold by
construction), symmetrizable dense matrices get a planted spectrum and
symmetrizer, and saddle blocks are scaled so the shift window exists when
asked for.
"""

import numpy as np

from sobflow import AxisymmetricMatrix, SaddlePointBlocks
from sobflow.symmetrizer import gershgorin_intervals


def random_axisymmetric(rng, n, extra_edges=0, n_components=1, positive=False):
    """Consistent structured instance with a planted symmetrizer.

    Returns (matrix, planted_s).  Nodes are split into ``n_components``
    groups; a random spanning tree connects each group and ``extra_edges``
    additional in-group pairs make the ratio system over-determined (still
    consistent, because the pairs are generated from the planted s).
    """
    s = rng.uniform(0.2, 5.0, n)
    labels = np.sort(rng.integers(0, n_components, n)) if n_components > 1 else np.zeros(n, int)
    groups = [np.flatnonzero(labels == c) for c in range(n_components)]
    groups = [g for g in groups if g.size]

    pairs = set()
    for group in groups:
        for idx in range(1, group.size):
            i = int(group[idx])
            j = int(group[rng.integers(0, idx)])
            pairs.add((max(i, j), min(i, j)))
    candidates = [
        (int(i), int(j))
        for g in groups
        for k, i in enumerate(g)
        for j in g[:k]
    ]
    rng.shuffle(candidates)
    for i, j in candidates:
        if len(pairs) >= sum(g.size - 1 for g in groups) + extra_edges:
            break
        pairs.add((max(i, j), min(i, j)))

    lower, upper = {}, {}
    for i, j in pairs:
        a_ij = rng.uniform(0.3, 2.0) * rng.choice([-1.0, 1.0])
        lower[(i, j)] = a_ij
        upper[(i, j)] = s[i] * a_ij / s[j]

    d = rng.uniform(0.5, 4.0, n)
    mat = AxisymmetricMatrix(d=d, lower=lower, upper=upper)
    if positive:
        intervals = gershgorin_intervals(mat)
        d = np.array([r + rng.uniform(0.1, 2.0) for _, r in intervals])
        mat = AxisymmetricMatrix(d=d, lower=lower, upper=upper)
    return mat, s


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_spd(rng, n, shift=None):
    m = rng.standard_normal((n, n))
    return m @ m.T + (shift if shift is not None else n) * np.eye(n)


def random_symmetrizable(rng, n, eigenvalues=None):
    """Dense matrix with planted SPD symmetrizer and optional spectrum.

    Returns (a, s, eigenvalues, eigenvectors_of_a).  Built as
    a = sqrt(s)^-1 (V diag(lam) V^T) sqrt(s) with V orthogonal, so the
    spectrum is exactly ``eigenvalues`` and columns of sqrt(s)^-1 V are
    eigenvectors.
    """
    if eigenvalues is None:
        eigenvalues = np.sort(rng.uniform(0.5, 6.0, n))[::-1]
        while np.abs(np.diff(eigenvalues)).min() < 0.1:
            eigenvalues = np.sort(rng.uniform(0.5, 6.0, n))[::-1]
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    v = random_orthogonal(rng, n)
    s = random_spd(rng, n)
    w, u = np.linalg.eigh(s)
    root = (u * np.sqrt(w)) @ u.T
    root_inv = (u / np.sqrt(w)) @ u.T
    a_tilde = (v * eigenvalues) @ v.T
    a = root_inv @ a_tilde @ root
    vectors = root_inv @ v
    vectors = vectors / np.sqrt((vectors * vectors).sum(axis=0))
    return a, s, eigenvalues, vectors


def random_sylvester_pair(rng, n):
    """(a, s) with s SPD and a = s^-1 t for symmetric t (spectrum unconstrained)."""
    s = random_spd(rng, n)
    t = rng.standard_normal((n, n))
    t = t + t.T
    a = np.linalg.solve(s, t)
    return a, s


def random_blocks(rng, n, m, windowed=True):
    """Saddle blocks; with ``windowed`` the shift window is guaranteed."""
    p = random_spd(rng, n, shift=1.0)
    p = p / np.linalg.eigvalsh(p).min()          # lambda_min(P) = 1
    if m:
        r = random_spd(rng, m, shift=0.0)
        lam_max = np.linalg.eigvalsh(r).max()
        r = r * (rng.uniform(0.05, 0.2) / lam_max)   # lambda_max(R) in (0.05, 0.2)
        q = rng.standard_normal((m, n))
        sigma = np.sqrt(np.linalg.eigvalsh(q @ q.T).max())
        gap = 1.0 - np.linalg.eigvalsh(r).max()
        target = rng.uniform(0.1, 0.45 if windowed else 2.0) * gap
        q = q * (target / sigma)
    else:
        r = np.zeros((0, 0))
        q = np.zeros((0, n))
    return SaddlePointBlocks(P=p, Q=q, R=r)
