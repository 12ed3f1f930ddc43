"""Command-line front end.

Verbs:
  symmetrize  build a symmetrizer for a matrix (or preset) and certify it
  solve       integrate the flow, write the trajectory CSV, report eigenpairs
  verify      audit a given (A, S) pair
  preset      list the shipped benchmark problems

Exit codes: 0 success, 2 input or constraint violation, 3 divergence,
4 non-convergence at the iteration cap.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import flow, matio, oracle, presets
from .core import frobenius, jacobi_eigh, lagrangian_frame_check, sylvester_residual
from .errors import DivergenceDetectedError, SobflowError
from .saddle import (
    SaddlePointBlocks,
    assemble_s_epsilon,
    assemble_saddle,
    check_pd_conditions,
    epsilon_window,
)
from .symmetrizer import (
    AxisymmetricMatrix,
    rank_one_symmetrizer,
    solve_diagonal_symmetrizer,
    symmetrizer_from_eigenbasis,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIVERGED = 3
EXIT_NOT_CONVERGED = 4


@dataclass
class RunConfig:
    """Solve-run settings, mirroring the solve verb's flags."""

    mode: str = "fixed"
    gamma: float = 0.01
    max_iters: int = 2_000_000
    tol: float = 1e-10
    stride: int = 100
    seed: int = 0
    output_path: str = "trajectory.csv"

    def validate(self) -> None:
        if self.mode not in ("fixed", "variable"):
            raise ValueError(f"mode must be fixed|variable, got {self.mode!r}")
        if self.mode == "fixed" and not self.gamma > 0.0:
            raise ValueError("fixed mode requires --gamma > 0")


def _parse_b(spec: str) -> np.ndarray:
    """B from an inline comma list ('3,2,1') or a matrix file."""
    if "," in spec or spec.replace(".", "").replace("-", "").isdigit():
        values = np.array([float(tok) for tok in spec.split(",") if tok.strip()])
        return values
    mat = matio.read_matrix(spec)
    if 1 in mat.shape:
        return mat.reshape(-1)
    return mat.diagonal().copy()


def _resolve_epsilon(spec: str, blocks: SaddlePointBlocks) -> float:
    if spec == "auto":
        window = epsilon_window(blocks)
        if not window.exists:
            raise ValueError(
                "no admissible shift window exists for these blocks; "
                "2*sigma_max(Q) exceeds lambda_min(P) - lambda_max(R)"
            )
        return window.midpoint
    return float(spec)


def _load_blocks(path: str) -> SaddlePointBlocks:
    sections = matio.read_sections(path)
    missing = {"P", "Q", "R"} - set(sections)
    if missing:
        raise ValueError(f"blocks file lacks sections: {sorted(missing)}")
    return SaddlePointBlocks(P=sections["P"], Q=sections["Q"], R=sections["R"])


def _emit_matrix(mat: np.ndarray, output: str | None) -> None:
    text = matio.format_matrix(mat)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_preset(args) -> int:
    if args.action == "list":
        for name in sorted(presets.PRESETS):
            print(f"{name}: {presets.PRESETS[name].description}")
    return EXIT_OK


def cmd_symmetrize(args) -> int:
    window_text = ""
    if args.preset:
        preset = presets.get_preset(args.preset)
        family = preset.family
        if family == "saddle":
            blocks = preset.blocks
            a_dense = assemble_saddle(blocks)
        else:
            a_dense = preset.a
            blocks = None
    else:
        if not args.input:
            raise ValueError("symmetrize needs an input file or --preset")
        family = args.family
        if family == "saddle":
            blocks = _load_blocks(args.input)
            a_dense = assemble_saddle(blocks)
        elif family == "rank-one":
            blocks = None
            a_dense = None
        else:
            blocks = None
            a_dense = matio.read_matrix(args.input)

    if family == "axisymmetric":
        structured = AxisymmetricMatrix.from_dense(a_dense)
        if args.validate:
            print("membership: ok (axisymmetric sparsity and sign constraints hold)")
        result = solve_diagonal_symmetrizer(structured)
        s_mat = result.matrix
        residual = result.residual
        pd = bool((result.s > 0.0).all())
    elif family == "saddle":
        eps = _resolve_epsilon(args.epsilon, blocks)
        s_mat = assemble_s_epsilon(blocks, eps)
        report = check_pd_conditions(blocks, eps)
        window = epsilon_window(blocks)
        a_dense = assemble_saddle(blocks)
        residual = sylvester_residual(a_dense, s_mat)
        pd = report.positive_definite
        window_text = f" window=[{window.eps_minus:.17g},{window.eps_plus:.17g}]"
    elif family == "rank-one":
        sections = matio.read_sections(args.input)
        missing = {"d", "a", "b"} - set(sections)
        if missing:
            raise ValueError(f"rank-one file lacks sections: {sorted(missing)}")
        d = sections["d"].reshape(-1)
        a_vec = sections["a"].reshape(-1)
        b_vec = sections["b"].reshape(-1)
        result = rank_one_symmetrizer(d, a_vec, b_vec)
        s_mat = result.matrix
        residual = result.residual
        pd = True
    elif family == "eigenbasis":
        if not args.eigenbasis:
            raise ValueError("family=eigenbasis requires --eigenbasis FILE")
        v = matio.read_matrix(args.eigenbasis)
        s_mat = symmetrizer_from_eigenbasis(a_dense, v, np.ones(v.shape[0]))
        residual = sylvester_residual(a_dense, s_mat)
        pd = bool(jacobi_eigh(s_mat).eigenvalues.min() > 0.0)
    else:
        raise ValueError(f"unknown family {family!r}")

    _emit_matrix(s_mat, args.output)
    print(f"residual={residual:.17g} pd={str(pd).lower()}{window_text}")
    return EXIT_OK


def _build_solve_inputs(args):
    if args.preset:
        preset = presets.get_preset(args.preset)
        if preset.b is None or preset.x0 is None:
            raise ValueError(f"preset {preset.name!r} has no flow configuration")
        a, s = preset.a, preset.s
        b = _parse_b(args.b) if args.b else preset.b
        x0 = matio.read_matrix(args.x0) if args.x0 else preset.x0
        mode = args.mode or preset.mode
        gamma = args.gamma if args.gamma is not None else preset.gamma
    else:
        if not args.a:
            raise ValueError("solve needs a matrix file or --preset")
        if not args.b:
            raise ValueError("solve needs --b (inline list or file)")
        b = _parse_b(args.b)
        if args.family == "saddle":
            blocks = _load_blocks(args.a)
            a = assemble_saddle(blocks)
            eps = _resolve_epsilon(args.epsilon, blocks)
            s = assemble_s_epsilon(blocks, eps)
        else:
            a = matio.read_matrix(args.a)
            if args.s_file:
                s = matio.read_matrix(args.s_file)
            elif args.family == "axisymmetric":
                s = solve_diagonal_symmetrizer(AxisymmetricMatrix.from_dense(a)).matrix
            else:
                raise ValueError("solve needs --s-file or --family to build S")
        if args.x0:
            x0 = matio.read_matrix(args.x0)
        else:
            rng = np.random.default_rng(args.seed)
            x0 = rng.standard_normal((a.shape[0], b.size))
        mode = args.mode or "fixed"
        gamma = args.gamma if args.gamma is not None else 0.01
    return a, b, s, x0, mode, gamma


def cmd_solve(args) -> int:
    a, b, s, x0, mode, gamma = _build_solve_inputs(args)
    config = RunConfig(mode=mode, gamma=gamma, max_iters=args.max_iters,
                       tol=args.tol, stride=args.stride, seed=args.seed,
                       output_path=args.output)
    config.validate()
    problem = flow.FlowProblem.create(a, b, s)
    try:
        traj = flow.integrate(
            problem, x0, mode=config.mode, gamma=config.gamma,
            max_iters=config.max_iters, tol_abs=config.tol,
            tol_rel=config.tol, stride=config.stride,
        )
    except DivergenceDetectedError as exc:
        if exc.trajectory is not None:
            flow.write_trajectory_csv(exc.trajectory, config.output_path)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED

    flow.write_trajectory_csv(traj, config.output_path)
    print(f"trajectory: {config.output_path} ({len(traj.states)} snapshots, "
          f"{traj.iterations} iterations, mode={traj.mode})")

    if not traj.converged:
        print(f"error: not converged after {traj.iterations} iterations",
              file=sys.stderr)
        return EXIT_NOT_CONVERGED

    pairs = flow.extract_eigenpairs(problem, traj)
    reference = oracle.reference_eigenpairs(a, s)
    top = reference.eigenvalues[:problem.m]
    print("eigenpairs (descending B order):")
    for i, pair in enumerate(pairs):
        err = abs(pair.value - top[i]) if i < top.size else float("nan")
        print(f"  lambda_{i + 1} = {pair.value:.17g}  residual={pair.residual:.3e}  "
              f"oracle_abs_err={err:.3e}")
    print("machine-readable:")
    for pair in pairs:
        fields = [f"{pair.value:.17g}", f"{pair.residual:.17g}"]
        fields += [f"{v:.17g}" for v in pair.vector]
        print(",".join(fields))
    return EXIT_OK


def cmd_verify(args) -> int:
    a = matio.read_matrix(args.a_file)
    s = matio.read_matrix(args.s_file)
    residual = sylvester_residual(a, s)
    frame = lagrangian_frame_check(a, s)
    sa = s @ a
    asym = frobenius(sa - sa.T)
    eigs = jacobi_eigh(0.5 * (s + s.T)).eigenvalues
    pd = bool(eigs.min() > 0.0)
    print(f"sylvester_residual={residual:.17g}")
    print(f"lagrangian_frame_check={frame:.17g}")
    print(f"sa_asymmetry={asym:.17g}")
    print(f"s_positive_definite={str(pd).lower()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sobflow",
        description="Eigenvalues of symmetrizable matrices via a matrix gradient flow",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sym = sub.add_parser("symmetrize", help="build and certify a symmetrizer")
    p_sym.add_argument("input", nargs="?", help="matrix file (or blocks/rank-one sections)")
    p_sym.add_argument("--preset", help="use a named preset instead of a file")
    p_sym.add_argument("--family", default="axisymmetric",
                       choices=["axisymmetric", "saddle", "rank-one", "eigenbasis"])
    p_sym.add_argument("--epsilon", default="auto",
                       help="shift for family=saddle: a number or 'auto' (window midpoint)")
    p_sym.add_argument("--eigenbasis", help="eigenvector matrix file for family=eigenbasis")
    p_sym.add_argument("--validate", action="store_true",
                       help="report structural membership before solving")
    p_sym.add_argument("--output", help="write S here instead of stdout")
    p_sym.set_defaults(func=cmd_symmetrize)

    p_solve = sub.add_parser("solve", help="integrate the flow and report eigenpairs")
    p_solve.add_argument("a", nargs="?", help="matrix file (dense or blocks per --family)")
    p_solve.add_argument("--preset", help="run a named preset")
    p_solve.add_argument("--b", help="diagonal of B: inline list '3,2,1' or file")
    p_solve.add_argument("--s-file", help="symmetrizer matrix file")
    p_solve.add_argument("--family", choices=["axisymmetric", "saddle"],
                         help="build S from the input instead of --s-file")
    p_solve.add_argument("--epsilon", default="auto", help="shift for family=saddle")
    p_solve.add_argument("--x0", help="initial state file (default: seeded random)")
    p_solve.add_argument("--mode", choices=["fixed", "variable"])
    p_solve.add_argument("--gamma", type=float, default=None, help="fixed-mode step size")
    p_solve.add_argument("--max-iters", type=int, default=2_000_000)
    p_solve.add_argument("--tol", type=float, default=1e-10,
                         help="stopping tolerance (absolute and relative)")
    p_solve.add_argument("--stride", type=int, default=100, help="snapshot stride")
    p_solve.add_argument("--seed", type=int, default=0, help="seed for random x0")
    p_solve.add_argument("--output", default="trajectory.csv", help="trajectory CSV path")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="audit an (A, S) pair")
    p_verify.add_argument("a_file")
    p_verify.add_argument("s_file")
    p_verify.set_defaults(func=cmd_verify)

    p_preset = sub.add_parser("preset", help="preset utilities")
    p_preset.add_argument("action", choices=["list"])
    p_preset.set_defaults(func=cmd_preset)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DivergenceDetectedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (SobflowError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
