"""Sparse and bit-packed linear algebra over GF(2).

Matrices are stored sparsely (per-row sorted column indices); all elimination
work runs on bit-packed rows, one Python int per row with bit j = column j.
Python ints give word-parallel XOR at arbitrary width, which is what the
rank / kernel / row-space-membership loads here need.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


# -- bit-vector helpers -------------------------------------------------------

def vec_from_support(support: Iterable[int]) -> int:
    v = 0
    for c in support:
        v |= 1 << c
    return v


def support_from_vec(v: int) -> tuple[int, ...]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return tuple(out)


def weight(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class SparseBinMatrix:
    """Binary matrix as per-row sorted column-index tuples."""

    nrows: int
    ncols: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise DimensionError("row count mismatch")
        for r in self.rows:
            if any(c < 0 or c >= self.ncols for c in r):
                raise DimensionError("column index out of range")
            if any(r[i] >= r[i + 1] for i in range(len(r) - 1)):
                raise ValueError("row supports must be strictly increasing")

    @classmethod
    def from_rows(cls, nrows: int, ncols: int, rows: Sequence[Iterable[int]]) -> "SparseBinMatrix":
        return cls(nrows, ncols, tuple(tuple(sorted(set(r))) for r in rows))

    @classmethod
    def from_cols(cls, nrows: int, ncols: int, cols: Sequence[Iterable[int]]) -> "SparseBinMatrix":
        rows: list[list[int]] = [[] for _ in range(nrows)]
        for c, rr in enumerate(cols):
            for r in rr:
                rows[r].append(c)
        return cls(nrows, ncols, tuple(tuple(sorted(r)) for r in rows))

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]]) -> "SparseBinMatrix":
        nrows = len(dense)
        ncols = len(dense[0]) if nrows else 0
        rows = tuple(
            tuple(j for j, v in enumerate(row) if int(v) % 2) for row in dense
        )
        return cls(nrows, ncols, rows)

    def bitrows(self) -> list[int]:
        return [vec_from_support(r) for r in self.rows]

    def col_support(self) -> list[list[int]]:
        cols: list[list[int]] = [[] for _ in range(self.ncols)]
        for r, rr in enumerate(self.rows):
            for c in rr:
                cols[c].append(r)
        return cols

    def transpose(self) -> "SparseBinMatrix":
        return SparseBinMatrix.from_cols(self.ncols, self.nrows, self.rows)

    def row_weights(self) -> list[int]:
        return [len(r) for r in self.rows]

    def col_weights(self) -> list[int]:
        w = [0] * self.ncols
        for r in self.rows:
            for c in r:
                w[c] += 1
        return w

    def mul_vec(self, v: int) -> int:
        """Matrix-vector product over GF(2); v and result are bit-packed."""
        syn = 0
        for r, rr in enumerate(self.rows):
            acc = 0
            for c in rr:
                acc ^= (v >> c) & 1
            syn |= acc << r
        return syn

    def __str__(self) -> str:
        return f"SparseBinMatrix({self.nrows}x{self.ncols}, nnz={sum(len(r) for r in self.rows)})"


# -- elimination --------------------------------------------------------------

def _echelon(bitrows: list[int]) -> tuple[list[int], list[int]]:
    """Reduced echelon form of bit-packed rows: (rows, pivot columns).

    Pivots are the lowest set bit of each retained row; rows are fully
    reduced against each other, so membership tests are single passes.
    """
    basis: list[int] = []
    pivots: list[int] = []
    for r in bitrows:
        for b, p in zip(basis, pivots):
            if (r >> p) & 1:
                r ^= b
        if r == 0:
            continue
        p = (r & -r).bit_length() - 1
        for i, b in enumerate(basis):
            if (b >> p) & 1:
                basis[i] ^= r
        basis.append(r)
        pivots.append(p)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [basis[i] for i in order], [pivots[i] for i in order]


def rank_gf2(matrix: SparseBinMatrix) -> int:
    """Exact GF(2) rank via bit-packed elimination."""
    rows, _ = _echelon(matrix.bitrows())
    return len(rows)


@dataclass(frozen=True)
class RowSpaceBasis:
    """Reduced echelon basis of a matrix's row space, for membership tests."""

    ncols: int
    rows: tuple[int, ...]
    pivots: tuple[int, ...]

    @classmethod
    def from_matrix(cls, matrix: SparseBinMatrix) -> "RowSpaceBasis":
        rows, pivots = _echelon(matrix.bitrows())
        return cls(matrix.ncols, tuple(rows), tuple(pivots))

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: int) -> int:
        for b, p in zip(self.rows, self.pivots):
            if (v >> p) & 1:
                v ^= b
        return v

    def contains(self, v: int, length: Optional[int] = None) -> bool:
        if length is not None and length != self.ncols:
            raise DimensionError(f"vector length {length} != {self.ncols}")
        if v.bit_length() > self.ncols:
            raise DimensionError("vector has bits beyond the column count")
        return self.reduce(v) == 0


def in_row_space(basis: RowSpaceBasis, v: int, length: Optional[int] = None) -> bool:
    """True iff v is a GF(2) combination of the basis rows."""
    return basis.contains(v, length)


def kernel_basis(matrix: SparseBinMatrix) -> list[int]:
    """Basis of {x : Mx = 0}, as bit-packed vectors; size = ncols - rank."""
    rows, pivots = _echelon(matrix.bitrows())
    pivot_set = set(pivots)
    basis = []
    for f in range(matrix.ncols):
        if f in pivot_set:
            continue
        v = 1 << f
        for row, p in zip(rows, pivots):
            if (row >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def product_is_zero(a: SparseBinMatrix, b: SparseBinMatrix) -> bool:
    """True iff A . B^T = 0 over GF(2).

    Only row pairs that share at least one column can have odd intersection,
    so candidate pairs are generated from the columns.
    """
    if a.ncols != b.ncols:
        raise DimensionError(f"inner dimensions differ: {a.ncols} vs {b.ncols}")
    counts: dict[tuple[int, int], int] = {}
    cols_a = a.col_support()
    cols_b = b.col_support()
    for c in range(a.ncols):
        for ra in cols_a[c]:
            for rb in cols_b[c]:
                key = (ra, rb)
                counts[key] = counts.get(key, 0) + 1
    return all(v % 2 == 0 for v in counts.values())


# -- alist-compatible import/export -------------------------------------------

def to_alist(matrix: SparseBinMatrix) -> str:
    """Alist-compatible sparse text format, 1-based indices.

    Layout: "nrows ncols", max row/col degrees, per-row degrees, per-column
    degrees, per-row supports, per-column supports.
    """
    cols = matrix.col_support()
    rw = matrix.row_weights()
    cw = [len(c) for c in cols]
    lines = [
        f"{matrix.nrows} {matrix.ncols}",
        f"{max(rw, default=0)} {max(cw, default=0)}",
        " ".join(map(str, rw)),
        " ".join(map(str, cw)),
    ]
    for r in matrix.rows:
        lines.append(" ".join(str(c + 1) for c in r))
    for c in cols:
        lines.append(" ".join(str(r + 1) for r in c))
    return "\n".join(lines) + "\n"


def from_alist(text: str) -> SparseBinMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    nrows, ncols = map(int, lines[0].split())
    row_deg = list(map(int, lines[2].split())) if nrows else []
    rows = []
    for i in range(nrows):
        entries = [int(x) - 1 for x in lines[4 + i].split()]
        if len(entries) != row_deg[i]:
            raise ValueError(f"row {i}: degree mismatch")
        rows.append(entries)
    return SparseBinMatrix.from_rows(nrows, ncols, rows)
