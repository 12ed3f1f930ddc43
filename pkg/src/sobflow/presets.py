"""Named benchmark problems shipped with the package.

Each preset bundles the exact matrices of a published benchmark run: the
3x3 structured example with diagonal symmetrizer (paper-ex1) and the 5x5
saddle-point example with its shifted symmetrizer at eps = 1/2
(paper-liesen and the B3/B5 flow runs).  A checksum over the canonical
serialization guards the data against drift.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .matio import format_matrix
from .saddle import SaddlePointBlocks, assemble_s_epsilon, assemble_saddle


def _ex1_matrices():
    a = np.array([
        [4.5, -2.0, 2.0],
        [-2.0, 4.5, 2.0],
        [3.0, 3.0, 7.0],
    ])
    s = np.diag([1.0, 1.0, 2.0 / 3.0])
    x0 = np.array([
        [1.0, 0.0, -1.0],
        [0.0, -1.0, 1.0],
        [-2.0, -1.0, 0.0],
    ])
    return a, s, x0


def liesen_blocks() -> SaddlePointBlocks:
    """The 5x5 saddle-point benchmark blocks (b = 1/4, c = 1/12)."""
    p = np.diag([1.0, 2.0, 3.0])
    q = np.array([
        [0.25, 0.0, 0.0],
        [0.0, 0.25, 0.0],
    ])
    r = np.array([
        [1.0 / 6.0, -1.0 / 12.0],
        [-1.0 / 12.0, 1.0 / 6.0],
    ])
    return SaddlePointBlocks(P=p, Q=q, R=r)


def _liesen_x0_b3() -> np.ndarray:
    return np.array([
        [1.0, 0.0, -1.0],
        [0.0, -1.0, 1.0],
        [-2.0, -1.0, 0.0],
        [0.0, 1.0, 1.0],
        [2.0, -1.0, 0.0],
    ])


def _liesen_x0_b5() -> np.ndarray:
    return np.array([
        [1.0, 0.0, -1.0, 2.0, 3.0],
        [0.0, -1.0, 1.0, 6.0, 1.0],
        [-2.0, -1.0, 0.0, 1.0, 9.0],
        [0.0, -1.0, 1.0, -3.0, 4.0],
        [-2.0, -1.0, 0.0, 1.0, 3.0],
    ])


@dataclass(frozen=True)
class Preset:
    """One named benchmark: matrices plus the published run settings."""

    name: str
    description: str
    family: str                      # "axisymmetric" | "saddle"
    a: np.ndarray
    s: np.ndarray
    b: np.ndarray | None = None      # diagonal of B; None for symmetrize-only
    x0: np.ndarray | None = None
    gamma: float = 0.01
    mode: str = "fixed"
    blocks: SaddlePointBlocks | None = None
    epsilon: float | None = None


def _build_registry() -> dict[str, Preset]:
    a3, s3, x03 = _ex1_matrices()
    blocks = liesen_blocks()
    a5 = assemble_saddle(blocks)
    s5 = assemble_s_epsilon(blocks, 0.5)
    registry = {}

    registry["paper-ex1"] = Preset(
        name="paper-ex1",
        description="3x3 structured matrix, diagonal symmetrizer, fixed step 0.01",
        family="axisymmetric",
        a=a3, s=s3, b=np.array([3.0, 2.0, 1.0]), x0=x03,
        gamma=0.01, mode="fixed",
    )
    registry["paper-liesen"] = Preset(
        name="paper-liesen",
        description="5x5 saddle-point blocks with shifted symmetrizer at eps=1/2",
        family="saddle",
        a=a5, s=s5, blocks=blocks, epsilon=0.5,
    )
    registry["paper-liesen-b3"] = Preset(
        name="paper-liesen-b3",
        description="saddle-point benchmark, three largest eigenpairs, fixed step 0.001",
        family="saddle",
        a=a5, s=s5, b=np.array([3.0, 2.0, 1.0]), x0=_liesen_x0_b3(),
        gamma=0.001, mode="fixed", blocks=blocks, epsilon=0.5,
    )
    registry["paper-liesen-b5"] = Preset(
        name="paper-liesen-b5",
        description="saddle-point benchmark, all five eigenpairs, fixed step 0.001",
        family="saddle",
        a=a5, s=s5, b=np.array([5.0, 4.0, 3.0, 2.0, 1.0]), x0=_liesen_x0_b5(),
        gamma=0.001, mode="fixed", blocks=blocks, epsilon=0.5,
    )
    registry["paper-liesen-b5-variable"] = Preset(
        name="paper-liesen-b5-variable",
        description="saddle-point benchmark, all five eigenpairs, variable step",
        family="saddle",
        a=a5, s=s5, b=np.array([5.0, 4.0, 3.0, 2.0, 1.0]), x0=_liesen_x0_b5(),
        gamma=0.001, mode="variable", blocks=blocks, epsilon=0.5,
    )
    return registry


PRESETS = _build_registry()


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ValueError(f"unknown preset {name!r}; available: {known}") from None


def checksum() -> str:
    """SHA-256 over the canonical serialization of every preset matrix."""
    digest = hashlib.sha256()
    for name in sorted(PRESETS):
        preset = PRESETS[name]
        digest.update(name.encode())
        for mat in (preset.a, preset.s, preset.b, preset.x0):
            if mat is None:
                digest.update(b"-")
            else:
                digest.update(format_matrix(np.atleast_2d(mat)).encode())
    return digest.hexdigest()
