"""Problem representation and I/O for positive linear programs.

A packing LP is ``max 1'x  s.t.  Ax <= 1, x >= 0`` with a non-negative
constraint matrix A (m rows = constraints, n columns = variables).  A
covering LP is stored with one row per covering constraint, i.e.
``min 1'y  s.t.  My >= 1, y >= 0``; its dual is the packing LP over the
transposed matrix.

Instances are kept in a normalized form where the minimum column
infinity-norm equals 1; the recorded ``column_scale`` maps solutions of the
normalized problem back to the units of the matrix that was passed in.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass
from typing import IO, Union

import numpy as np

from .errors import (
    DuplicateEntry,
    NegativeEntry,
    NonFinite,
    ParseError,
    ZeroColumn,
)

MM_HEADER = "%%MatrixMarket matrix coordinate real general"

# relative slack on the normalized-form invariant min_i ||A_:i||_inf == 1
NORMALIZATION_RTOL = 1e-12


class SparseNonnegMatrix:
    """Sparse matrix of strictly positive reals with row and column views.

    Entries are stored once in canonical (row, col)-sorted order together
    with CSR-style row pointers; a permutation sorted by (col, row) plus
    column pointers provides the column view.  Both views enumerate exactly
    the same entry multiset.  Explicit zeros and duplicate coordinates are
    rejected at construction.
    """

    def __init__(self, n_rows: int, n_cols: int, rows, cols, vals):
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        cols = np.ascontiguousarray(cols, dtype=np.int64)
        vals = np.ascontiguousarray(vals, dtype=np.float64)
        if not (rows.shape == cols.shape == vals.shape) or rows.ndim != 1:
            raise ValueError("rows, cols, vals must be 1-d arrays of equal length")
        if n_rows < 1 or n_cols < 1:
            raise ValueError("matrix must have at least one row and one column")
        if vals.size:
            bad = np.flatnonzero(~np.isfinite(vals))
            if bad.size:
                k = bad[0]
                raise NonFinite(int(rows[k]), int(cols[k]), float(vals[k]))
            neg = np.flatnonzero(vals < 0.0)
            if neg.size:
                k = neg[0]
                raise NegativeEntry(int(rows[k]), int(cols[k]))
            zero = np.flatnonzero(vals == 0.0)
            if zero.size:
                k = zero[0]
                raise ValueError(
                    f"explicit zero entry at ({int(rows[k])}, {int(cols[k])}); "
                    "structural zeros must be omitted"
                )
            if rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols:
                raise ValueError("entry index out of bounds")

        order = np.lexsort((cols, rows))  # canonical order: by row, then col
        rows, cols, vals = rows[order], cols[order], vals[order]
        if rows.size > 1:
            same = (np.diff(rows) == 0) & (np.diff(cols) == 0)
            dup = np.flatnonzero(same)
            if dup.size:
                k = dup[0]
                raise DuplicateEntry(int(rows[k]), int(cols[k]))

        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.rows = rows
        self.cols = cols
        self.vals = vals
        # row view: canonical arrays sliced by row_ptr
        self.row_ptr = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_rows), out=self.row_ptr[1:])
        # column view: permutation of canonical entries sorted by (col, row)
        self.csc_perm = np.lexsort((rows, cols))
        self.col_ptr = np.zeros(n_cols + 1, dtype=np.int64)
        np.cumsum(np.bincount(cols, minlength=n_cols), out=self.col_ptr[1:])

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_dense(cls, arr) -> "SparseNonnegMatrix":
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows, cols = np.nonzero(arr)
        return cls(arr.shape[0], arr.shape[1], rows, cols, arr[rows, cols])

    # -- basic properties --------------------------------------------------

    @property
    def nnz(self) -> int:
        return int(self.vals.size)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols))
        out[self.rows, self.cols] = self.vals
        return out

    def entry_set(self) -> set[tuple[int, int, float]]:
        return {(int(r), int(c), float(v)) for r, c, v in zip(self.rows, self.cols, self.vals)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseNonnegMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.vals, other.vals)
        )

    def __repr__(self) -> str:
        return f"SparseNonnegMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"

    # -- linear maps -------------------------------------------------------
    # Summation order is fixed by the views (within a row: ascending column;
    # within a column: ascending row), so results are reproducible bit for
    # bit no matter how the work is scheduled.

    def row_activity(self, x: np.ndarray) -> np.ndarray:
        """A @ x via the row view."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n_cols,):
            raise ValueError(f"expected vector of length {self.n_cols}")
        return np.bincount(self.rows, weights=self.vals * x[self.cols], minlength=self.n_rows)

    def col_activity(self, y: np.ndarray) -> np.ndarray:
        """A.T @ y via the column view."""
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.n_rows,):
            raise ValueError(f"expected vector of length {self.n_rows}")
        p = self.csc_perm
        return np.bincount(self.cols[p], weights=self.vals[p] * y[self.rows[p]], minlength=self.n_cols)

    def column_inf_norms(self) -> np.ndarray:
        """Per-column maximum entry; zero for empty columns."""
        out = np.zeros(self.n_cols)
        np.maximum.at(out, self.cols, self.vals)
        return out

    def column_entries(self, col: int) -> tuple[np.ndarray, np.ndarray]:
        """(rows, values) of one column, rows ascending."""
        sel = self.csc_perm[self.col_ptr[col] : self.col_ptr[col + 1]]
        return self.rows[sel], self.vals[sel]

    def transpose(self) -> "SparseNonnegMatrix":
        return SparseNonnegMatrix(self.n_cols, self.n_rows, self.cols, self.rows, self.vals)

    def divided_by(self, divisor: float) -> "SparseNonnegMatrix":
        return SparseNonnegMatrix(self.n_rows, self.n_cols, self.rows, self.cols, self.vals / divisor)

    def kernel_arrays(self):
        """(row_ptr, row_cols, row_vals, col_ptr, col_rows, col_vals) for the solver kernel."""
        p = self.csc_perm
        return (
            self.row_ptr,
            self.cols,
            self.vals,
            self.col_ptr,
            np.ascontiguousarray(self.rows[p]),
            np.ascontiguousarray(self.vals[p]),
        )


@dataclass(frozen=True)
class PackingInstance:
    """Normalized packing LP ``max 1'x : Ax <= 1, x >= 0``.

    ``matrix`` equals the original matrix divided by ``column_scale``, chosen
    so the minimum column infinity-norm is 1.  Instances built through
    :func:`normalize` satisfy that invariant; the dataclass itself does not
    re-validate.
    """

    matrix: SparseNonnegMatrix
    column_scale: float

    @property
    def n(self) -> int:  # number of variables
        return self.matrix.n_cols

    @property
    def m(self) -> int:  # number of constraints
        return self.matrix.n_rows


@dataclass(frozen=True)
class CoveringInstance:
    """Normalized covering LP ``min 1'y : My >= 1, y >= 0``.

    Rows of ``matrix`` are the covering constraints.  The packing dual uses
    the transposed matrix; see :func:`dualize`.
    """

    matrix: SparseNonnegMatrix
    column_scale: float

    @property
    def n_vars(self) -> int:
        return self.matrix.n_cols

    @property
    def n_constraints(self) -> int:
        return self.matrix.n_rows


def _normalize_matrix(raw: SparseNonnegMatrix) -> tuple[SparseNonnegMatrix, float]:
    norms = raw.column_inf_norms()
    empty = np.flatnonzero(norms == 0.0)
    if empty.size:
        raise ZeroColumn(int(empty[0]))
    row_counts = np.diff(raw.row_ptr)
    n_zero_rows = int(np.count_nonzero(row_counts == 0))
    if n_zero_rows:
        warnings.warn(
            f"{n_zero_rows} empty row(s): the corresponding constraints are vacuous",
            RuntimeWarning,
            stacklevel=3,
        )
    scale = float(norms.min())
    if scale == 1.0:
        return raw, 1.0
    return raw.divided_by(scale), scale


def normalize(raw_matrix: SparseNonnegMatrix) -> PackingInstance:
    """Scale a raw matrix so the minimum column infinity-norm equals 1.

    The whole matrix is divided by one global scalar (the minimum column
    infinity-norm of the input), which preserves multiplicative
    approximation quality.  Zero columns are a hard error (the packing
    objective would be unbounded); zero rows merely warn.
    """
    mat, scale = _normalize_matrix(raw_matrix)
    return PackingInstance(matrix=mat, column_scale=scale)


def normalize_covering(raw_matrix: SparseNonnegMatrix) -> CoveringInstance:
    """Covering counterpart of :func:`normalize`; rows are covering constraints."""
    mat, scale = _normalize_matrix(raw_matrix)
    return CoveringInstance(matrix=mat, column_scale=scale)


def unscale_packing_solution(x_normalized: np.ndarray, column_scale: float) -> np.ndarray:
    """Map a solution of the normalized instance back to original units.

    Stored A = raw A / column_scale, hence raw A @ (x/column_scale) equals
    stored A @ x, and objectives divide by the same factor.
    """
    return np.asarray(x_normalized, dtype=np.float64) / column_scale


def dualize(covering: CoveringInstance) -> PackingInstance:
    """Packing dual of a covering instance: transpose, then renormalize.

    The packing LP over the transposed matrix has one variable per covering
    constraint, so the solver's per-variable gradients are exactly the
    covering-constraint slacks.  A zero column after transposition is an
    empty covering constraint, which no y >= 0 can satisfy; it surfaces as
    :class:`ZeroColumn`.
    """
    try:
        return normalize(covering.matrix.transpose())
    except ZeroColumn as exc:
        raise ZeroColumn(
            exc.col,
            f"covering constraint {exc.col} has no entries and can never be satisfied",
        ) from None


# -- Matrix Market coordinate format ---------------------------------------


def parse_matrix_market(source: Union[str, bytes, IO]) -> SparseNonnegMatrix:
    """Read a matrix in Matrix Market "coordinate real general" format.

    Indices are 1-based.  Values may use decimal or scientific notation.
    Duplicate coordinates, negative values, and explicit zeros are rejected.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty input")
    header = lines[0].strip()
    fields = header.lower().split()
    if len(fields) != 5 or fields[0] != "%%matrixmarket" or fields[1:] != [
        "matrix",
        "coordinate",
        "real",
        "general",
    ]:
        raise ParseError(1, f"unsupported header {header!r}")

    it = ((i + 1, ln) for i, ln in enumerate(lines[1:], start=1))
    dims = None
    for line_no, ln in it:
        s = ln.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        if len(parts) != 3:
            raise ParseError(line_no, f"expected 'rows cols nnz', got {s!r}")
        try:
            m, n, nnz = (int(p) for p in parts)
        except ValueError:
            raise ParseError(line_no, f"non-integer size line {s!r}") from None
        if m < 1 or n < 1 or nnz < 0:
            raise ParseError(line_no, f"invalid sizes {s!r}")
        dims = (m, n, nnz)
        break
    if dims is None:
        raise ParseError(len(lines), "missing size line")
    m, n, nnz = dims

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    k = 0
    for line_no, ln in it:
        s = ln.strip()
        if not s or s.startswith("%"):
            continue
        if k >= nnz:
            raise ParseError(line_no, "more entries than declared")
        parts = s.split()
        if len(parts) != 3:
            raise ParseError(line_no, f"expected 'row col value', got {s!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
            v = float(parts[2])
        except ValueError:
            raise ParseError(line_no, f"malformed entry {s!r}") from None
        if not (1 <= i <= m and 1 <= j <= n):
            raise ParseError(line_no, f"index ({i}, {j}) outside {m}x{n}")
        if not math.isfinite(v):
            raise NonFinite(i - 1, j - 1, v)
        if v < 0.0:
            raise NegativeEntry(i - 1, j - 1)
        if v == 0.0:
            raise ParseError(line_no, "explicit zero entry; omit structural zeros")
        rows[k], cols[k], vals[k] = i - 1, j - 1, v
        k += 1
    if k != nnz:
        raise ParseError(len(lines), f"declared {nnz} entries but found {k}")
    return SparseNonnegMatrix(m, n, rows, cols, vals)


def write_matrix_market(mat: SparseNonnegMatrix, target: Union[IO, None] = None) -> str:
    """Serialize to Matrix Market coordinate format with 17 significant digits."""
    buf = io.StringIO()
    buf.write(MM_HEADER + "\n")
    buf.write(f"{mat.n_rows} {mat.n_cols} {mat.nnz}\n")
    for r, c, v in zip(mat.rows, mat.cols, mat.vals):
        buf.write(f"{r + 1} {c + 1} {v:.17g}\n")
    text = buf.getvalue()
    if target is not None:
        target.write(text)
    return text


# -- random instances -------------------------------------------------------


def generate_random(n_rows: int, n_cols: int, density: float, seed: int) -> SparseNonnegMatrix:
    """Random sparse matrix: each coordinate present independently with
    probability ``density``, values uniform in (0, 1].

    The pattern is re-drawn until no column is empty, so the result is
    always a valid packing input.  Deterministic per seed (counter-based
    generator).
    """
    if n_rows < 1 or n_cols < 1:
        raise ValueError("n_rows and n_cols must be >= 1")
    if not (0.0 < density <= 1.0):
        raise ValueError("density must be in (0, 1]")
    rng = np.random.Generator(np.random.Philox(seed))
    while True:
        mask = rng.random((n_rows, n_cols)) < density
        if mask.any(axis=0).all():
            break
    rows, cols = np.nonzero(mask)
    vals = 1.0 - rng.random(rows.size)  # uniform in (0, 1]
    return SparseNonnegMatrix(n_rows, n_cols, rows, cols, vals)
