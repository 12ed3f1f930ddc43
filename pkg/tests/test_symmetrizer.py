"""Coordinate-graph symmetrizer construction, rank-one family, Gershgorin."""

import numpy as np
import pytest

from helpers import random_axisymmetric
from sobflow import (
    AxisymmetricMatrix,
    build_coordinate_graph,
    char_poly_rank_one,
    frobenius,
    gershgorin_all_positive,
    gershgorin_intervals,
    jacobi_eigh,
    rank_one_symmetrizer,
    reference_eigenpairs,
    solve_diagonal_symmetrizer,
    spd_sqrt,
    sylvester_residual,
    symmetrizer_from_eigenbasis,
)
from sobflow.errors import (
    InconsistentConnectionError,
    NotSortedError,
    ResidualTooLargeError,
    SignViolationError,
    SingularEigenbasisError,
)
from sobflow.symmetrizer import (
    assemble_rank_perturbation,
    rank_perturbation_terms,
)


def two_component_example(consistent=True):
    """5x5 sparsity of the non-simply-connected example, planted values.

    Node 0 is isolated; nodes 1..4 are connected with one extra edge whose
    ratio closes the cycle consistently (or not, when ``consistent`` is
    False).
    """
    lower = {(2, 1): 1.0, (3, 2): 1.0, (4, 1): 1.0, (4, 2): 1.0}
    upper = {(2, 1): 2.0, (3, 2): 3.0, (4, 1): 4.0,
             (4, 2): 2.0 if consistent else 2.5}
    return AxisymmetricMatrix(d=np.arange(1.0, 6.0), lower=lower, upper=upper)


def one_component_example():
    """5x5 sparsity of the simply-connected example with a planted s."""
    s = np.array([1.0, 0.5, 2.0, 4.0, 0.25])
    pairs = [(2, 0), (2, 1), (3, 0), (3, 2), (4, 0), (4, 1), (4, 3)]
    lower, upper = {}, {}
    for i, j in pairs:
        lower[(i, j)] = 1.0
        upper[(i, j)] = s[i] / s[j]
    return AxisymmetricMatrix(d=np.full(5, 3.0), lower=lower, upper=upper), s


def structured_ex1(ex1):
    return AxisymmetricMatrix.from_dense(ex1.a)


class TestAxisymmetricMatrix:
    def test_dense_round_trip(self, ex1):
        mat = structured_ex1(ex1)
        assert np.array_equal(mat.to_dense(), ex1.a)
        assert set(mat.lower) == {(1, 0), (2, 0), (2, 1)}

    def test_rejects_sign_violation(self):
        with pytest.raises(SignViolationError):
            AxisymmetricMatrix(d=[1.0, 1.0], lower={(1, 0): 1.0},
                               upper={(1, 0): -1.0})

    def test_rejects_one_sided_pair(self):
        bad = np.array([[1.0, 0.0], [1.0, 1.0]])
        with pytest.raises(SignViolationError):
            AxisymmetricMatrix.from_dense(bad)

    def test_rejects_zero_paired_with_nonzero(self):
        with pytest.raises(SignViolationError):
            AxisymmetricMatrix(d=[1.0, 1.0], lower={(1, 0): 0.0},
                               upper={(1, 0): 1.0})


class TestCoordinateGraph:
    def test_two_components(self):
        graph = build_coordinate_graph(two_component_example())
        assert graph.components == [[0], [1, 2, 3, 4]]
        assert graph.seeds == [0, 1]

    def test_single_component(self):
        mat, _ = one_component_example()
        graph = build_coordinate_graph(mat)
        assert graph.components == [[0, 1, 2, 3, 4]]
        assert graph.seeds == [0]

    def test_diagonal_only(self):
        graph = build_coordinate_graph(AxisymmetricMatrix(d=np.ones(4)))
        assert graph.components == [[0], [1], [2], [3]]
        assert graph.seeds == [0, 1, 2, 3]
        assert graph.edges == []

    def test_one_edge_per_pair(self, ex1):
        graph = build_coordinate_graph(structured_ex1(ex1))
        assert graph.edges == [(1, 0), (2, 0), (2, 1)]


class TestSolveDiagonalSymmetrizer:
    def test_structured_ex1_recovers_printed_s(self, ex1):
        result = solve_diagonal_symmetrizer(structured_ex1(ex1))
        assert np.allclose(result.s, [1.0, 1.0, 2.0 / 3.0], rtol=1e-15)
        assert result.residual <= 1e-10 * frobenius(ex1.a)
        assert result.consistency_violation <= 1e-12

    def test_two_component_unique_solution(self):
        result = solve_diagonal_symmetrizer(two_component_example())
        assert np.allclose(result.s, [1.0, 1.0, 2.0, 6.0, 4.0], rtol=1e-15)

    def test_single_edge(self):
        mat = AxisymmetricMatrix(d=[7.0, -3.0], lower={(1, 0): 1.0},
                                 upper={(1, 0): 2.0})
        result = solve_diagonal_symmetrizer(mat)
        assert np.array_equal(result.s, [1.0, 2.0])

    def test_diagonal_gives_identity(self):
        result = solve_diagonal_symmetrizer(AxisymmetricMatrix(d=np.ones(3)))
        assert np.array_equal(result.s, np.ones(3))

    def test_inconsistent_connection_raises(self):
        with pytest.raises(InconsistentConnectionError):
            solve_diagonal_symmetrizer(two_component_example(consistent=False))

    def test_simply_connected_planted(self):
        mat, s = one_component_example()
        result = solve_diagonal_symmetrizer(mat)
        assert np.allclose(result.s, s / s[0], rtol=1e-12)

    def test_seed_invariance_up_to_component_scale(self, rng):
        # relabeling the nodes moves the seeds; per component the two
        # solutions differ by one positive scalar
        for _ in range(10):
            n = int(rng.integers(4, 9))
            mat, _ = random_axisymmetric(rng, n, extra_edges=2, n_components=2)
            base = solve_diagonal_symmetrizer(mat).s
            perm = rng.permutation(n)
            dense = mat.to_dense()
            permuted = AxisymmetricMatrix.from_dense(dense[np.ix_(perm, perm)])
            other = solve_diagonal_symmetrizer(permuted).s
            mapped = other[np.argsort(perm)]     # back to original labels
            graph = build_coordinate_graph(mat)
            for comp in graph.components:
                ratios = mapped[comp] / base[comp]
                assert ratios.min() > 0.0
                assert np.allclose(ratios, ratios[0], rtol=1e-10)

    def test_propagation_order_invariance(self, rng):
        for _ in range(10):
            n = int(rng.integers(3, 11))
            mat, _ = random_axisymmetric(rng, n, extra_edges=3)
            bfs = solve_diagonal_symmetrizer(mat, order="bfs").s
            dfs = solve_diagonal_symmetrizer(mat, order="dfs").s
            assert np.allclose(bfs, dfs, rtol=1e-12)

    def test_similarity_transform_symmetrizes(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 9))
            mat, _ = random_axisymmetric(rng, n, extra_edges=1)
            dense = mat.to_dense()
            s_mat = solve_diagonal_symmetrizer(mat).matrix
            root = spd_sqrt(s_mat)
            root_inv = np.diag(1.0 / root.diagonal())
            tilde = root @ dense @ root_inv
            assert frobenius(tilde - tilde.T) <= 1e-9 * max(frobenius(tilde), 1.0)


class TestGershgorin:
    def test_diagonal_only(self):
        intervals = gershgorin_intervals(AxisymmetricMatrix(d=[2.0, 5.0]))
        assert intervals == [(2.0, 0.0), (5.0, 0.0)]
        assert gershgorin_all_positive(intervals)

    def test_structured_ex1_radii(self, ex1):
        intervals = gershgorin_intervals(structured_ex1(ex1))
        root6 = np.sqrt(6.0)
        expected = [(4.5, 2.0 + root6), (4.5, 2.0 + root6), (7.0, 2.0 * root6)]
        for (c, r), (ec, er) in zip(intervals, expected):
            assert c == ec
            assert r == pytest.approx(er, rel=1e-15)
        assert gershgorin_all_positive(intervals)

    def test_boundary_is_not_positive(self):
        mat = AxisymmetricMatrix(d=[1.0, 5.0], lower={(1, 0): 1.0},
                                 upper={(1, 0): 1.0})
        intervals = gershgorin_intervals(mat)
        assert intervals[0] == (1.0, 1.0)
        assert not gershgorin_all_positive(intervals)

    def test_soundness_on_random_instances(self, rng):
        # every eigenvalue of the symmetrized matrix lies inside the union
        for _ in range(20):
            n = int(rng.integers(2, 9))
            mat, s = random_axisymmetric(rng, n, extra_edges=1, positive=True)
            result = solve_diagonal_symmetrizer(mat)
            spectrum = reference_eigenpairs(mat.to_dense(), result.matrix)
            intervals = gershgorin_intervals(mat)
            for lam in spectrum.eigenvalues:
                assert any(abs(lam - c) <= r + 1e-9 for c, r in intervals)
            if gershgorin_all_positive(intervals):
                assert spectrum.eigenvalues.min() > 0.0


class TestRankOneSymmetrizer:
    def test_symmetric_case_identity(self):
        result = rank_one_symmetrizer([1.0, 2.0], [1.0, 3.0], [1.0, 3.0])
        assert np.array_equal(result.s, [1.0, 1.0])

    def test_direct_formula(self):
        result = rank_one_symmetrizer([1.0, 2.0], [1.0, 1.0], [2.0, 3.0])
        assert np.array_equal(result.s, [2.0, 3.0])

    def test_three_by_three(self):
        result = rank_one_symmetrizer([1.0, 2.0, 3.0], [1.0, 2.0, 1.0],
                                      [1.0, 1.0, 2.0])
        assert np.array_equal(result.s, [1.0, 0.5, 2.0])
        assert result.residual <= 1e-14

    def test_sign_violation(self):
        with pytest.raises(SignViolationError):
            rank_one_symmetrizer([1.0, 2.0], [1.0, -1.0], [1.0, 1.0])

    def test_not_sorted(self):
        with pytest.raises(NotSortedError):
            rank_one_symmetrizer([2.0, 1.0], [1.0, 1.0], [1.0, 1.0])
        with pytest.raises(NotSortedError):
            rank_one_symmetrizer([-1.0, 1.0], [1.0, 1.0], [1.0, 1.0])


class TestCharPolyRankOne:
    def test_scalar_case(self):
        # 1x1: A = d + a*b, so the polynomial vanishes at d + a*b
        assert char_poly_rank_one([2.0], [1.0], [1.0], 3.0) == 0.0

    def test_roots_match_closed_form(self):
        # diag(1,2) + ones gives [[2,1],[1,3]] with eigenvalues (5±sqrt5)/2
        d, a, b = [1.0, 2.0], [1.0, 1.0], [1.0, 1.0]
        lo, hi = 1.0, 2.0
        f_lo = char_poly_rank_one(d, a, b, lo)
        f_hi = char_poly_rank_one(d, a, b, hi)
        assert f_lo * f_hi < 0.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if char_poly_rank_one(d, a, b, mid) * f_lo > 0.0:
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        assert root == pytest.approx((5.0 - np.sqrt(5.0)) / 2.0, abs=1e-10)

    def test_monic_leading_behavior(self):
        d, a, b = [1.0, 2.0, 3.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]
        values = [char_poly_rank_one(d, a, b, lam) for lam in (10.0, 100.0, 1e4)]
        assert values[0] > 0.0 and values[1] > values[0] and values[2] > values[1]

    def test_finite_at_poles(self):
        assert np.isfinite(char_poly_rank_one([1.0, 2.0], [1.0, 1.0], [1.0, 1.0], 1.0))


class TestSymmetrizerFromEigenbasis:
    def test_symmetric_orthogonal_gives_identity(self, rng):
        m = rng.standard_normal((4, 4))
        m = m + m.T
        v = jacobi_eigh(m).eigenvectors
        s = symmetrizer_from_eigenbasis(m, v, np.ones(4))
        assert np.allclose(s, np.eye(4), atol=1e-10)

    def test_structured_ex1_with_oracle_basis(self, ex1):
        spectrum = reference_eigenpairs(ex1.a, ex1.s)
        s = symmetrizer_from_eigenbasis(ex1.a, spectrum.eigenvectors, np.ones(3))
        assert sylvester_residual(ex1.a, s) <= 1e-8 * frobenius(ex1.a)
        assert jacobi_eigh(s).eigenvalues.min() > 0.0

    def test_weight_choice_changes_s(self, ex1):
        spectrum = reference_eigenpairs(ex1.a, ex1.s)
        s1 = symmetrizer_from_eigenbasis(ex1.a, spectrum.eigenvectors, np.ones(3))
        s2 = symmetrizer_from_eigenbasis(ex1.a, spectrum.eigenvectors,
                                         np.array([1.0, 2.0, 3.0]))
        assert not np.allclose(s1, s2)
        for s in (s1, s2):
            assert sylvester_residual(ex1.a, s) <= 1e-8 * frobenius(ex1.a)

    def test_singular_basis_raises(self, ex1):
        with pytest.raises(SingularEigenbasisError):
            symmetrizer_from_eigenbasis(ex1.a, np.ones((3, 3)), np.ones(3))

    def test_invalid_basis_raises(self, ex1, rng):
        with pytest.raises(ResidualTooLargeError):
            symmetrizer_from_eigenbasis(ex1.a, rng.standard_normal((3, 3)) + 3 * np.eye(3),
                                        np.ones(3))


class TestRankPerturbation:
    def test_reconstruction_is_bitwise(self):
        # dyadic data keeps (d - 2) + 1 + 1 exact
        lower = {(1, 0): 1.5, (2, 0): 3.0, (2, 1): 0.5}
        upper = {(1, 0): 0.75, (2, 0): 2.0, (2, 1): 1.0}
        mat = AxisymmetricMatrix(d=[1.0, 2.5, -3.0], lower=lower, upper=upper)
        shifted, terms = rank_perturbation_terms(mat)
        assert np.array_equal(assemble_rank_perturbation(shifted, terms),
                              mat.to_dense())

    def test_band_invariant_under_diagonal_similarity(self, rng):
        mat, _ = random_axisymmetric(rng, 6, extra_edges=2)
        _, terms = rank_perturbation_terms(mat)
        t = np.diag(rng.uniform(0.5, 2.0, 6))
        t_inv = np.diag(1.0 / t.diagonal())
        basis = np.eye(6)
        for j, (col, row) in enumerate(terms):
            band = np.outer(col, basis[j]) + np.outer(basis[j], row)
            moved = t @ band @ t_inv
            mask = np.zeros((6, 6), dtype=bool)
            mask[:, j] = True
            mask[j, :] = True
            assert np.all(moved[~mask] == 0.0)
