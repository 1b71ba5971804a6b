"""Readers and writers for the on-disk formats.

* state CSV: header ``x,re,im`` (coordinate) or ``p,re,im`` (momentum)
* characteristic function CSV: ``u,re,im``
* samples: one float per line, ``#`` comments and blank lines ignored
* matrices: CSV, row-major
* finite states: JSON list of ``[re, im]`` pairs; operators: row-major
  nested lists of pairs
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .charfunc import CharFunc
from .errors import InputError
from .estimation.sampling import Sample
from .finite import FiniteState, HermitianOp, new_finite_state
from .grid import CoordState, Grid, MomentumState, new_coord_state, new_momentum_state

__all__ = [
    "FileFormatError",
    "fmt",
    "state_to_csv",
    "write_state_csv",
    "read_state_csv",
    "charfunc_to_csv",
    "read_charfunc_csv",
    "read_sample",
    "write_sample",
    "matrix_to_csv",
    "complex_pairs",
    "finite_state_from_json",
    "operator_from_json",
    "operator_to_json",
]


class FileFormatError(InputError):
    module = "io"


def fmt(value: float) -> str:
    """Shortest repr that round-trips a double (at least 15 significant digits)."""
    return repr(float(value))


def _rows_to_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def state_to_csv(state: CoordState | MomentumState) -> str:
    if isinstance(state, MomentumState):
        axis, points = "p", state.grid.p
    else:
        axis, points = "x", state.grid.x
    rows = ((fmt(q), fmt(a.real), fmt(a.imag)) for q, a in zip(points, state.amplitudes))
    return _rows_to_text((axis, "re", "im"), rows)


def write_state_csv(path, state: CoordState | MomentumState) -> None:
    Path(path).write_text(state_to_csv(state))


def _read_table(path, expected_tail=("re", "im")) -> tuple[str, np.ndarray]:
    text = Path(path).read_text()
    reader = csv.reader(line for line in text.splitlines() if line.strip())
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise FileFormatError(f"{path}: empty file") from None
    if len(header) != 3 or tuple(header[1:]) != expected_tail:
        raise FileFormatError(f"{path}: unexpected header {header}")
    try:
        data = np.array([[float(v) for v in row] for row in reader])
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 3:
        raise FileFormatError(f"{path}: expected three columns")
    return header[0], data


def read_state_csv(path) -> CoordState | MomentumState:
    """Load a state and rebuild its grid from the first axis column.

    The grid must be the package's centered grid; the amplitudes are
    renormalized on load.
    """
    axis, data = _read_table(path)
    n = data.shape[0]
    points = data[:, 0]
    amps = data[:, 1] + 1j * data[:, 2]
    if axis == "x":
        grid = Grid(n, -2.0 * points[0])
        expected = grid.x
        builder = new_coord_state
    elif axis == "p":
        grid = Grid(n, 2 * np.pi / (-points[0] / (n // 2)))
        expected = grid.p
        builder = new_momentum_state
    else:
        raise FileFormatError(f"{path}: first column must be 'x' or 'p', got {axis!r}")
    scale = max(1.0, float(np.abs(expected).max()))
    if np.max(np.abs(points - expected)) > 1e-9 * scale:
        raise FileFormatError(f"{path}: {axis} column is not a centered uniform grid")
    return builder(grid, amps)


def charfunc_to_csv(f: CharFunc) -> str:
    rows = ((fmt(u), fmt(v.real), fmt(v.imag)) for u, v in zip(f.u_grid, f.values))
    return _rows_to_text(("u", "re", "im"), rows)


def read_charfunc_csv(path) -> CharFunc:
    axis, data = _read_table(path)
    if axis not in ("u", "t"):
        raise FileFormatError(f"{path}: first column must be 'u' or 't', got {axis!r}")
    return CharFunc(data[:, 0], data[:, 1] + 1j * data[:, 2])


def read_sample(path) -> Sample:
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise FileFormatError(f"{path}:{lineno}: not a number: {line!r}") from None
    return Sample(np.array(values))


def write_sample(path, sample: Sample | np.ndarray, comment: str | None = None) -> None:
    values = sample.values if isinstance(sample, Sample) else np.asarray(sample, float)
    lines = [f"# {comment}"] if comment else []
    lines.extend(fmt(v) for v in values)
    Path(path).write_text("\n".join(lines) + "\n")


def matrix_to_csv(matrix) -> str:
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    return "".join(",".join(fmt(v) for v in row) + "\n" for row in m)


def complex_pairs(values) -> list:
    arr = np.asarray(values, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [complex_pairs(v) for v in arr]


def _from_pairs(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1:] != (2,):
        raise FileFormatError("complex values must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def finite_state_from_json(obj, normalize: bool = True) -> FiniteState:
    amps = _from_pairs(obj)
    return new_finite_state(amps) if normalize else FiniteState(amps)


def operator_from_json(obj) -> HermitianOp:
    return HermitianOp(_from_pairs(obj))


def operator_to_json(op: HermitianOp) -> list:
    return complex_pairs(op.matrix)


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON: {exc}") from None
