"""Plain-text matrix serialization shared by the library, CLI and file formats.

A matrix is written as a header line ``rows cols`` followed by one line per
row of whitespace-separated decimal values printed with 17 significant
digits, which round-trips float64 exactly.  Files holding several matrices
label each one with a bare name on its own line (used for saddle blocks
``P``/``Q``/``R`` and rank-one data ``d``/``a``/``b``).
"""

from __future__ import annotations

import os

import numpy as np

from .core import as_matrix


def format_matrix(a) -> str:
    """Render a matrix in the shared text format."""
    m = as_matrix(a, "matrix")
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def write_matrix(path, a) -> None:
    with open(path, "w") as fh:
        fh.write(format_matrix(a))


def _parse_header(token_a: str, token_b: str, where: str) -> tuple[int, int]:
    try:
        rows, cols = int(token_a), int(token_b)
    except ValueError as exc:
        raise ValueError(f"bad matrix header at {where}: {token_a!r} {token_b!r}") from exc
    if rows < 0 or cols < 0:
        raise ValueError(f"negative dimensions at {where}")
    return rows, cols


def _parse_body(lines: list[str], pos: int, rows: int, cols: int) -> tuple[np.ndarray, int]:
    data = np.zeros((rows, cols))
    for r in range(rows):
        if pos >= len(lines):
            raise ValueError(f"unexpected end of data in row {r + 1}")
        values = lines[pos].split()
        if len(values) != cols:
            raise ValueError(
                f"row {r + 1} has {len(values)} values, expected {cols}"
            )
        data[r] = [float(v) for v in values]
        pos += 1
    return data, pos


def parse_matrix(text: str) -> np.ndarray:
    """Parse a single matrix from text in the shared format."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"bad matrix header: {lines[0]!r}")
    rows, cols = _parse_header(header[0], header[1], "line 1")
    body, pos = _parse_body(lines, 1, rows, cols)
    if pos != len(lines):
        raise ValueError("trailing content after matrix body")
    return as_matrix(body, "matrix")


def read_matrix(path) -> np.ndarray:
    if not os.path.exists(path):
        raise ValueError(f"no such file: {path}")
    with open(path) as fh:
        return parse_matrix(fh.read())


def format_sections(named: dict[str, np.ndarray]) -> str:
    """Render labeled matrices, one ``label`` line ahead of each matrix."""
    parts = []
    for label, mat in named.items():
        parts.append(label + "\n" + format_matrix(mat))
    return "".join(parts)


def write_sections(path, named: dict[str, np.ndarray]) -> None:
    with open(path, "w") as fh:
        fh.write(format_sections(named))


def parse_sections(text: str) -> dict[str, np.ndarray]:
    """Parse labeled matrices from text.

    Each section is a label on its own line followed by a matrix in the
    shared format.  Labels must be unique.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    out: dict[str, np.ndarray] = {}
    pos = 0
    while pos < len(lines):
        label = lines[pos].strip()
        if not label.isidentifier():
            raise ValueError(f"expected a section label, got {lines[pos]!r}")
        if label in out:
            raise ValueError(f"duplicate section label {label!r}")
        pos += 1
        if pos >= len(lines):
            raise ValueError(f"section {label!r} has no matrix")
        header = lines[pos].split()
        if len(header) != 2:
            raise ValueError(f"bad matrix header in section {label!r}")
        rows, cols = _parse_header(header[0], header[1], f"section {label!r}")
        body, pos = _parse_body(lines, pos + 1, rows, cols)
        out[label] = as_matrix(body, label)
    return out


def read_sections(path) -> dict[str, np.ndarray]:
    if not os.path.exists(path):
        raise ValueError(f"no such file: {path}")
    with open(path) as fh:
        return parse_sections(fh.read())
