from __future__ import annotations

"""Plain-text matrix files.

A file holds one or more matrices. Each starts with a header line
``rows cols`` followed by ``rows`` lines, one per matrix row, each holding
``cols`` entries as ``re im`` pairs. Entries are written with 17
significant digits, so save -> load is bit exact and a file in this
canonical form is reproduced byte for byte. Blank lines and lines starting
with ``#`` are skipped on reading.

    2 2
    1.0000000000000000e+00 0.0000000000000000e+00 0.0000000000000000e+00 0.0000000000000000e+00
    0.0000000000000000e+00 0.0000000000000000e+00 1.0000000000000000e+00 0.0000000000000000e+00
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Sequence, Union

import numpy as np

from . import tensor
from .errors import MatrixParseError, NotHermitianError, ValidationError
from .tensor import ComplexMatrix, MatrixLike

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    column: int


def _lines(text: str) -> Iterator[List[_Token]]:
    """Tokens of each non-blank, non-comment line."""
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield [_Token(match.group(0), line_no, match.start() + 1) for match in _TOKEN.finditer(line)]


def _parse_dimension(token: _Token, what: str) -> int:
    try:
        value = int(token.text)
    except ValueError:
        raise MatrixParseError(f"expected integer {what}, got {token.text!r}", token.line, token.column) from None
    if value < 1:
        raise MatrixParseError(f"{what} must be positive, got {value}", token.line, token.column)
    return value


def _parse_float(token: _Token) -> float:
    try:
        return float(token.text)
    except ValueError:
        raise MatrixParseError(f"expected a number, got {token.text!r}", token.line, token.column) from None


def parse_matrices(text: str) -> List[ComplexMatrix]:
    """Parse every matrix in ``text``; each matrix row must sit on its own line."""
    matrices: List[ComplexMatrix] = []
    lines = _lines(text)
    for header in lines:
        if len(header) != 2:
            raise MatrixParseError("header must be 'rows cols'", header[0].line, header[0].column)
        rows = _parse_dimension(header[0], "row count")
        cols = _parse_dimension(header[1], "column count")

        values = np.empty((rows, 2 * cols), dtype=float)
        last = header[-1]
        for row in range(rows):
            tokens = next(lines, None)
            if tokens is None:
                raise MatrixParseError(
                    f"expected {rows} rows for a {rows}x{cols} matrix, file ended after {row}",
                    last.line,
                    last.column + len(last.text),
                )
            if len(tokens) != 2 * cols:
                at = tokens[2 * cols] if len(tokens) > 2 * cols else tokens[-1]
                raise MatrixParseError(
                    f"row {row + 1} has {len(tokens)} values, expected {2 * cols} (re im pairs)",
                    at.line,
                    at.column,
                )
            values[row] = [_parse_float(token) for token in tokens]
            last = tokens[-1]
        matrices.append(values[:, 0::2] + 1j * values[:, 1::2])
    return matrices


def load_matrices(path: PathLike) -> List[ComplexMatrix]:
    """Every matrix in ``path``, in file order."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"Cannot read matrix file {path}: {exc}") from exc
    matrices = parse_matrices(text)
    if not matrices:
        raise MatrixParseError(f"no matrix found in {path}", line=1)
    logger.debug("Loaded %d matrices from %s", len(matrices), path)
    return matrices


def load_matrix(
    path: PathLike,
    square: bool = True,
    hermitian: bool = False,
    tol: float = 1e-12,
) -> ComplexMatrix:
    """The single matrix in ``path``, checked for the slot it fills."""
    matrices = load_matrices(path)
    if len(matrices) != 1:
        raise ValidationError(f"{path}: expected one matrix, found {len(matrices)}")
    m = matrices[0]
    if square and m.shape[0] != m.shape[1]:
        raise ValidationError(f"{path}: expected a square matrix, got {m.shape[0]}x{m.shape[1]}")
    if hermitian:
        scale = max(1.0, float(np.max(np.abs(m))))
        if not tensor.is_hermitian(m, tol * scale):
            deviation = float(np.max(np.abs(m - tensor.dagger(m))))
            raise NotHermitianError(f"{path}: matrix is not hermitian (max |M - M^dagger| = {deviation:.2e})")
    return m


def format_matrix(m: MatrixLike) -> str:
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    if m.ndim != 2:
        raise ValidationError(f"expected a 2-d matrix, got shape {m.shape}")
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(f"{z.real:.16e} {z.imag:.16e}" for z in row))
    return "\n".join(lines) + "\n"


def save_matrices(path: PathLike, matrices: Sequence[MatrixLike], comment: str = "") -> Path:
    path = Path(path)
    chunks = [f"# {line}\n" for line in comment.splitlines()]
    chunks.extend(format_matrix(m) for m in matrices)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(chunks), encoding="utf-8")
    logger.debug("Wrote %d matrices to %s", len(matrices), path)
    return path
