"""Eigenvalues and eigenvectors of symmetrizable matrices via a matrix flow.

The flow dX/dt = A X B - X B X^T S A X drives X^T S A X to the largest
eigenvalues of A (sorted when B has strictly decreasing positive diagonal)
whenever S is a symmetric positive definite solution of A^T S = S A.  This
package constructs and certifies such symmetrizers for two matrix families,
integrates the flow with fixed or optimal variable Euler steps, and ships a
self-contained reference eigensolver used to certify every result.
"""

from .core import (
    SymEigenResult,
    as_matrix,
    frobenius,
    gauss_solve,
    jacobi_eigh,
    lagrangian_frame_check,
    spd_sqrt,
    sylvester_residual,
)
from .errors import SobflowError
from .flow import (
    EigenPair,
    FlowProblem,
    FlowState,
    StopReason,
    Trajectory,
    euler_step_fixed,
    extract_eigenpairs,
    integrate,
    metric_inner,
    optimal_gamma,
    potential,
    vector_field,
    write_trajectory_csv,
)
from .matio import read_matrix, read_sections, write_matrix, write_sections
from .oracle import ReferenceSpectrum, rank_one_roots, reference_eigenpairs
from .presets import PRESETS, get_preset
from .saddle import (
    EpsilonWindow,
    SaddlePointBlocks,
    assemble_a_delta,
    assemble_s_epsilon,
    assemble_saddle,
    check_pd_conditions,
    eigenvalue_interval,
    epsilon_window,
    perturbed_sylvester_residual,
)
from .symmetrizer import (
    AxisymmetricMatrix,
    CoordinateGraph,
    DiagonalSymmetrizer,
    build_coordinate_graph,
    char_poly_rank_one,
    gershgorin_all_positive,
    gershgorin_intervals,
    rank_one_symmetrizer,
    solve_diagonal_symmetrizer,
    symmetrizer_from_eigenbasis,
)

__version__ = "0.1.0"

__all__ = [
    "AxisymmetricMatrix",
    "CoordinateGraph",
    "DiagonalSymmetrizer",
    "EigenPair",
    "EpsilonWindow",
    "FlowProblem",
    "FlowState",
    "PRESETS",
    "ReferenceSpectrum",
    "SaddlePointBlocks",
    "SobflowError",
    "StopReason",
    "SymEigenResult",
    "Trajectory",
    "as_matrix",
    "assemble_a_delta",
    "assemble_s_epsilon",
    "assemble_saddle",
    "build_coordinate_graph",
    "char_poly_rank_one",
    "check_pd_conditions",
    "eigenvalue_interval",
    "epsilon_window",
    "euler_step_fixed",
    "extract_eigenpairs",
    "frobenius",
    "gauss_solve",
    "integrate",
    "gershgorin_all_positive",
    "gershgorin_intervals",
    "get_preset",
    "jacobi_eigh",
    "lagrangian_frame_check",
    "metric_inner",
    "optimal_gamma",
    "perturbed_sylvester_residual",
    "potential",
    "rank_one_roots",
    "rank_one_symmetrizer",
    "read_matrix",
    "read_sections",
    "reference_eigenpairs",
    "solve_diagonal_symmetrizer",
    "spd_sqrt",
    "sylvester_residual",
    "symmetrizer_from_eigenbasis",
    "vector_field",
    "write_matrix",
    "write_sections",
    "write_trajectory_csv",
]
