"""Exact structured matrix algebra built around column-basis ("logical") matrices.

A logical matrix has exactly one 1 per column and is stored as its row count
plus one row index per column; every construction here stays in that
representation, so products over k^n-sized state spaces cost O(columns)
instead of O(k^n * k^n).  The semi-tensor product generalises the ordinary
matrix product to arbitrary shapes by Kronecker-padding both factors to the
least common multiple of the inner dimensions; on logical operands it closes
within logical matrices and is computed index-wise.

Index conventions: the Python API is 0-based throughout.  The delta notation
(`LogicalMatrix.delta`, `delta_indices`, JSON files) is 1-based, matching the
conventional way these matrices are written down.

All values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError

__all__ = [
    "LogicalMatrix",
    "IntMatrix",
    "stp",
    "khatri_rao",
    "kron",
    "swap_matrix",
    "power_reduce_matrix",
    "retrieval_matrix",
]


def _as_index_array(cols: Iterable[int]) -> np.ndarray:
    arr = np.asarray(list(cols) if not isinstance(cols, np.ndarray) else cols,
                     dtype=np.int64)
    if arr.ndim != 1:
        raise DimensionError("column index data must be one-dimensional")
    return arr


@dataclass(frozen=True, eq=False)
class LogicalMatrix:
    """A 0/1 matrix whose every column is a standard basis vector.

    ``cols[j]`` is the 0-based row holding the 1 of column ``j``.  Use
    :meth:`delta` / :attr:`delta_indices` for the 1-based basis-vector view.
    """

    rows: int
    cols: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.rows < 1:
            raise DimensionError("a logical matrix needs at least one row")
        arr = _as_index_array(self.cols)
        if arr.size < 1:
            raise DimensionError("a logical matrix needs at least one column")
        if arr.min() < 0 or arr.max() >= self.rows:
            raise DimensionError(
                f"column index out of range for {self.rows} rows")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "cols", arr)

    # -- constructors ------------------------------------------------------

    @classmethod
    def delta(cls, rows: int, indices: Sequence[int]) -> "LogicalMatrix":
        """Build from 1-based basis indices, mirroring delta_m[i1,...,in]."""
        return cls(rows, [i - 1 for i in indices])

    @classmethod
    def basis(cls, rows: int, index: int) -> "LogicalMatrix":
        """The basis column vector with a 1 in 0-based position ``index``."""
        return cls(rows, [index])

    @classmethod
    def identity(cls, n: int) -> "LogicalMatrix":
        return cls(n, np.arange(n, dtype=np.int64))

    # -- views -------------------------------------------------------------

    @property
    def n_cols(self) -> int:
        return int(self.cols.size)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.n_cols)

    @property
    def delta_indices(self) -> tuple[int, ...]:
        """1-based basis indices, column by column."""
        return tuple(int(c) + 1 for c in self.cols)

    def column(self, j: int) -> int:
        """0-based row of the 1 in column ``j``."""
        return int(self.cols[j])

    def dense(self) -> np.ndarray:
        """Expand to a dense 0/1 integer array (tests and interop only)."""
        out = np.zeros(self.shape, dtype=np.int64)
        out[self.cols, np.arange(self.n_cols)] = 1
        return out

    def is_identity(self) -> bool:
        return self.rows == self.n_cols and bool(
            np.array_equal(self.cols, np.arange(self.rows)))

    # -- equality ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogicalMatrix):
            return NotImplemented
        return self.rows == other.rows and np.array_equal(self.cols, other.cols)

    def __repr__(self) -> str:
        body = ",".join(str(i) for i in self.delta_indices[:12])
        if self.n_cols > 12:
            body += ",..."
        return f"delta_{self.rows}[{body}]"

    # -- JSON exchange format ---------------------------------------------

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": list(self.delta_indices)}

    @classmethod
    def from_json(cls, obj: dict) -> "LogicalMatrix":
        try:
            rows, cols = obj["rows"], obj["cols"]
        except (KeyError, TypeError):
            raise DimensionError("matrix JSON needs 'rows' and 'cols'")
        return cls.delta(int(rows), [int(c) for c in cols])


@dataclass(frozen=True, eq=False)
class IntMatrix:
    """A small dense integer matrix (column differences of basis vectors)."""

    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.int64)
        if arr.ndim != 2 or arr.size == 0:
            raise DimensionError("integer matrix must be 2-D and non-empty")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.n_cols)

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return bool(np.array_equal(self.data, other.data))

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.n_cols})"

    def to_json(self) -> dict:
        return {"rows": self.rows,
                "colsDense": [self.data[:, j].tolist()
                              for j in range(self.n_cols)]}

    @classmethod
    def from_json(cls, obj: dict) -> "IntMatrix":
        try:
            rows, cols = int(obj["rows"]), obj["colsDense"]
        except (KeyError, TypeError):
            raise DimensionError("matrix JSON needs 'rows' and 'colsDense'")
        arr = np.asarray(cols, dtype=np.int64).T
        if arr.shape[0] != rows:
            raise DimensionError("colsDense entries do not match 'rows'")
        return cls(arr)


def _to_dense(x) -> np.ndarray:
    if isinstance(x, LogicalMatrix):
        return x.dense()
    if isinstance(x, IntMatrix):
        return x.data
    return np.asarray(x, dtype=np.int64)


def _stp_dense(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, p = a.shape[1], b.shape[0]
    t = lcm(n, p)
    left = np.kron(a, np.eye(t // n, dtype=np.int64))
    right = np.kron(b, np.eye(t // p, dtype=np.int64))
    return left @ right


def stp(a, b):
    """Semi-tensor product.

    Both factors are Kronecker-padded to the lcm of a's column count and b's
    row count, then multiplied; for matching dimensions this is the ordinary
    product.  Two logical operands take a pure index fast path and return a
    :class:`LogicalMatrix`; any other combination is computed densely in
    exact integer arithmetic and returns an :class:`IntMatrix`.
    """
    if isinstance(a, LogicalMatrix) and isinstance(b, LogicalMatrix):
        n, p = a.n_cols, b.rows
        t = lcm(n, p)
        alpha, beta = t // n, t // p
        # columns of (b kron I_beta), then routed through (a kron I_alpha)
        m = np.arange(b.n_cols * beta, dtype=np.int64)
        v = b.cols[m // beta] * beta + m % beta
        out = a.cols[v // alpha] * alpha + v % alpha
        return LogicalMatrix(a.rows * alpha, out)
    return IntMatrix(_stp_dense(_to_dense(a), _to_dense(b)))


def kron(a: LogicalMatrix, b: LogicalMatrix) -> LogicalMatrix:
    """Kronecker product of two logical matrices (stays logical)."""
    ja = np.repeat(np.arange(a.n_cols, dtype=np.int64), b.n_cols)
    jb = np.tile(np.arange(b.n_cols, dtype=np.int64), a.n_cols)
    return LogicalMatrix(a.rows * b.rows, a.cols[ja] * b.rows + b.cols[jb])


def khatri_rao(mats: Sequence[LogicalMatrix]) -> LogicalMatrix:
    """Column-wise stacking product: column j is the stack of all columns j.

    The row index of the result is the mixed-radix encoding of the factors'
    row indices, so stacking n single-node maps of a shared column space
    yields the global map over the product state space.
    """
    if not mats:
        raise DimensionError("khatri_rao needs at least one factor")
    q = mats[0].n_cols
    for m in mats:
        if m.n_cols != q:
            raise DimensionError(
                f"khatri_rao factors must share the column count "
                f"({m.n_cols} != {q})")
    rows = 1
    cols = np.zeros(q, dtype=np.int64)
    for m in mats:
        rows *= m.rows
        cols = cols * m.rows + m.cols
    return LogicalMatrix(rows, cols)


def swap_matrix(m: int, n: int) -> LogicalMatrix:
    """The mn x mn permutation commuting stacked factors: W (x kron y) = y kron x."""
    if m < 1 or n < 1:
        raise DimensionError("swap factors must be positive")
    i = np.repeat(np.arange(m, dtype=np.int64), n)
    j = np.tile(np.arange(n, dtype=np.int64), m)
    return LogicalMatrix(m * n, j * m + i)


def power_reduce_matrix(k: int) -> LogicalMatrix:
    """The k^2 x k logical matrix M_r with x kron x = M_r x for basis x."""
    if k < 1:
        raise DimensionError("power reduction needs k >= 1")
    i = np.arange(k, dtype=np.int64)
    return LogicalMatrix(k * k, i * k + i)


def retrieval_matrix(k: int, n: int, i: int) -> LogicalMatrix:
    """The k x k^n projector onto the i-th factor of a stacked state.

    ``i`` is 0-based; applied to a stacked basis vector it recovers digit
    ``i`` of the base-k positional decomposition of the column index.
    """
    if not 0 <= i < n:
        raise DimensionError(f"factor index {i} out of range for n={n}")
    c = np.arange(k ** n, dtype=np.int64)
    return LogicalMatrix(k, (c // k ** (n - 1 - i)) % k)
