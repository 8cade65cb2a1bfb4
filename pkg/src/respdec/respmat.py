"""Observed and reconstructed response matrices.

A response matrix is an m x n grid of optional values in [0, 1]: rows are
examinees, columns are items.  Missing cells (items an examinee never
attempted) are nulls; the observation mask marks which cells are present.
Values are stored as float64 with NaN at null cells, and the arrays are
frozen after construction so instances are safe to share across threads.
"""

from __future__ import annotations

import io
import os
from typing import BinaryIO, TextIO, Union

import numpy as np

from .errors import IncompleteMatrixError, MatrixFormatError

CsvSource = Union[str, bytes, TextIO, BinaryIO, os.PathLike]


class ResponseMatrix:
    """Dense grid of optional unit-interval responses with a derived mask."""

    __slots__ = ("_values", "_mask")

    def __init__(self, values, mask=None):
        arr = np.array(values, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"matrix must be at least 1x1, got {arr.shape}")
        if mask is None:
            msk = ~np.isnan(arr)
        else:
            msk = np.array(mask, dtype=bool, copy=True)
            if msk.shape != arr.shape:
                raise ValueError(
                    f"mask shape {msk.shape} does not match values {arr.shape}"
                )
            if np.isnan(arr[msk]).any():
                raise ValueError("NaN value at a cell the mask marks observed")
            arr[~msk] = np.nan
        observed = arr[msk]
        if np.isinf(observed).any():
            raise ValueError("non-finite value in observed cells")
        out_of_range = msk & ((arr < 0.0) | (arr > 1.0))
        if out_of_range.any():
            i, j = np.argwhere(out_of_range)[0]
            raise ValueError(
                f"cell ({i}, {j}) value {arr[i, j]} outside [0, 1]"
            )
        self._check_values(observed)
        arr.flags.writeable = False
        msk.flags.writeable = False
        self._values = arr
        self._mask = msk

    @staticmethod
    def _check_values(observed: np.ndarray) -> None:
        """Subclass hook for extra per-value validation."""

    # -- structure ---------------------------------------------------------

    @property
    def values(self) -> np.ndarray:
        """Read-only m x n float array, NaN at null cells."""
        return self._values

    @property
    def mask(self) -> np.ndarray:
        """Read-only boolean observation indicator, True where present."""
        return self._mask

    @property
    def m(self) -> int:
        return self._values.shape[0]

    @property
    def n(self) -> int:
        return self._values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._values.shape

    @property
    def observed_count(self) -> int:
        return int(self._mask.sum())

    @property
    def is_complete(self) -> bool:
        return bool(self._mask.all())

    def observed_values(self) -> np.ndarray:
        """1-D array of the present cell values, row-major order."""
        return self._values[self._mask]

    def filled(self, fill: float = 0.0) -> np.ndarray:
        """Dense copy with null cells replaced by ``fill``."""
        out = self._values.copy()
        out[~self._mask] = fill
        return out

    def require_complete(self, context: str = "this operation") -> np.ndarray:
        if not self.is_complete:
            raise IncompleteMatrixError(
                f"{context} requires a fully observed matrix "
                f"({self.shape[0] * self.shape[1] - self.observed_count} null "
                "cells present); use the gradient-descent factorization for "
                "incomplete matrices"
            )
        return self._values

    def __eq__(self, other):
        if not isinstance(other, ResponseMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self._mask, other._mask)
            and np.array_equal(
                self._values[self._mask], other._values[other._mask]
            )
        )

    def __hash__(self):
        return hash((self.shape, self._values.tobytes()))

    def __repr__(self):
        kind = "complete" if self.is_complete else "incomplete"
        return f"{type(self).__name__}({self.m}x{self.n}, {kind})"


class DiscreteResponseMatrix(ResponseMatrix):
    """Response matrix whose present values are exactly 0 or 1."""

    __slots__ = ()

    @staticmethod
    def _check_values(observed: np.ndarray) -> None:
        if observed.size and not np.isin(observed, (0.0, 1.0)).all():
            bad = observed[~np.isin(observed, (0.0, 1.0))][0]
            raise ValueError(f"discrete matrix holds non-binary value {bad}")


# -- CSV ------------------------------------------------------------------


def _read_text(source: CsvSource) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    if isinstance(source, os.PathLike):
        with open(source, "rb") as fh:
            return fh.read().decode("utf-8")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def load_csv(source: CsvSource) -> ResponseMatrix:
    """Parse CSV text into a ResponseMatrix.

    Cells are decimal values in [0, 1]; an empty cell is a null.  ``source``
    may be a str/bytes payload, an open file, or a path-like.  Raises
    MatrixFormatError for ragged rows, non-numeric or out-of-range cells,
    and empty input (line/column references in messages are 1-based).
    """
    text = _read_text(source)
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MatrixFormatError("empty input: no rows")
    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        cells = [c.strip() for c in line.split(",")]
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise MatrixFormatError(
                f"ragged row at line {lineno}: expected {width} cells, "
                f"got {len(cells)}",
                line=lineno,
            )
        row = []
        for colno, cell in enumerate(cells, start=1):
            if cell == "":
                row.append(np.nan)
                continue
            try:
                value = float(cell)
            except ValueError:
                raise MatrixFormatError(
                    f"line {lineno}, column {colno}: not a number: {cell!r}",
                    line=lineno,
                    column=colno,
                ) from None
            if not (0.0 <= value <= 1.0):
                raise MatrixFormatError(
                    f"line {lineno}, column {colno}: value {cell} "
                    "outside [0, 1]",
                    line=lineno,
                    column=colno,
                )
            row.append(value)
        rows.append(row)
    if width == 0 or all(len(r) == 0 for r in rows):
        raise MatrixFormatError("empty input: no columns")
    return ResponseMatrix(np.array(rows, dtype=np.float64))


def _format_cell(value: float) -> str:
    if value == 0.0:
        return "0"
    if value == 1.0:
        return "1"
    return repr(float(value))


def save_csv(matrix: ResponseMatrix) -> bytes:
    """Serialize to CSV bytes; inverse of load_csv.

    0/1 cells write as bare digits, continuous cells use the shortest
    repr that parses back to the identical float, nulls are empty cells.
    Rows end with "\\n" including the last.
    """
    lines = []
    for i in range(matrix.m):
        cells = [
            _format_cell(matrix.values[i, j]) if matrix.mask[i, j] else ""
            for j in range(matrix.n)
        ]
        lines.append(",".join(cells))
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_csv(matrix: ResponseMatrix, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_csv(matrix))


def read_csv(path) -> ResponseMatrix:
    with open(path, "rb") as fh:
        return load_csv(fh)


# -- masking and binarization ----------------------------------------------


def mask_random(matrix: ResponseMatrix, ratio: float, seed: int) -> ResponseMatrix:
    """Null out exactly round(ratio*m*n) cells chosen uniformly at random.

    Sampling is without replacement from a Philox-seeded generator, so the
    null count is exact and the result is reproducible per seed.  The input
    must be fully observed.
    """
    if not (0.0 <= ratio < 1.0):
        raise ValueError(f"mask ratio must be in [0, 1), got {ratio}")
    matrix.require_complete("random masking")
    total = matrix.m * matrix.n
    count = int(ratio * total + 0.5)
    values = matrix.values.copy()
    if count:
        rng = np.random.Generator(np.random.Philox(seed))
        hit = rng.choice(total, size=count, replace=False)
        flat = values.reshape(-1)
        flat[hit] = np.nan
    return ResponseMatrix(values)


def binarize(matrix: ResponseMatrix, threshold: float = 0.5) -> DiscreteResponseMatrix:
    """Threshold present cells to 0/1; ties at the threshold go to 1.

    Nulls stay null, so the observation mask is preserved cell-for-cell.
    """
    if not (0.0 <= threshold <= 1.0):
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    values = np.where(matrix.values >= threshold, 1.0, 0.0)
    values[~matrix.mask] = np.nan
    return DiscreteResponseMatrix(values)
