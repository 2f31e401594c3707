"""Exact integer matrix arithmetic.

Everything in this package that decides smoothness, completeness, or ray
membership reduces to integer determinants and integer inverses, so the
linear algebra must be exact.  Entries are Python ints (arbitrary
precision); no floating point anywhere.

Determinants use the Bareiss fraction-free elimination; inverses and
adjugates use the fraction-free Gauss-Jordan variant (Montante's method),
where every intermediate entry is a minor of the input and every division
is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes."""


class NotUnimodular(ValueError):
    """The matrix has no integer inverse; carries the offending determinant."""

    def __init__(self, determinant: int):
        super().__init__(f"not unimodular: determinant is {determinant}")
        self.determinant = determinant


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatch(f"negative shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )
        for e in self.entries:
            if not isinstance(e, int):
                raise TypeError(f"entries must be int, got {type(e).__name__}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> IntMatrix:
        rows = [list(r) for r in rows]
        r = len(rows)
        c = len(rows[0]) if rows else 0
        if any(len(row) != c for row in rows):
            raise DimensionMismatch("ragged rows")
        return cls(r, c, tuple(e for row in rows for e in row))

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence[int]]) -> IntMatrix:
        cols = [list(c) for c in cols]
        c = len(cols)
        r = len(cols[0]) if cols else 0
        if any(len(col) != r for col in cols):
            raise DimensionMismatch("ragged columns")
        return cls(r, c, tuple(cols[k][i] for i in range(r) for k in range(c)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, ik: tuple[int, int]) -> int:
        i, k = ik
        if not (0 <= i < self.rows and 0 <= k < self.cols):
            raise IndexError(f"({i}, {k}) out of range for {self.rows}x{self.cols}")
        return self.entries[i * self.cols + k]

    def row(self, i: int) -> tuple[int, ...]:
        if not 0 <= i < self.rows:
            raise IndexError(i)
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, k: int) -> tuple[int, ...]:
        if not 0 <= k < self.cols:
            raise IndexError(k)
        return self.entries[k :: self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> IntMatrix:
        return IntMatrix.from_cols(self.to_rows())

    def is_square(self) -> bool:
        return self.rows == self.cols


def identity(k: int) -> IntMatrix:
    return IntMatrix(k, k, tuple(1 if i == j else 0 for i in range(k) for j in range(k)))


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.rows}x{a.cols} times {b.rows}x{b.cols}")
    brows = b.to_rows()
    out: list[int] = []
    for i in range(a.rows):
        arow = a.row(i)
        acc = [0] * b.cols
        for k, aik in enumerate(arow):
            if aik:
                brow = brows[k]
                for j in range(b.cols):
                    acc[j] += aik * brow[j]
        out.extend(acc)
    return IntMatrix(a.rows, b.cols, tuple(out))


def mat_add(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise DimensionMismatch(f"{a.rows}x{a.cols} plus {b.rows}x{b.cols}")
    return IntMatrix(a.rows, a.cols, tuple(x + y for x, y in zip(a.entries, b.entries)))


def hstack(blocks: Iterable[IntMatrix]) -> IntMatrix:
    blocks = list(blocks)
    if not blocks:
        raise DimensionMismatch("nothing to stack")
    r = blocks[0].rows
    if any(b.rows != r for b in blocks):
        raise DimensionMismatch("row counts differ")
    rows = [[e for b in blocks for e in b.row(i)] for i in range(r)]
    return IntMatrix.from_rows(rows)


def _det_rows(rows: list[list[int]]) -> int:
    # Bareiss elimination; mutates its argument.  Each intermediate entry
    # is a minor of the input, so the // divisions are exact.
    n = len(rows)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for p in range(n - 1):
        if rows[p][p] == 0:
            for q in range(p + 1, n):
                if rows[q][p]:
                    rows[p], rows[q] = rows[q], rows[p]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[p][p]
        rp = rows[p]
        for i in range(p + 1, n):
            ri = rows[i]
            f = ri[p]
            for j in range(p + 1, n):
                ri[j] = (pivot * ri[j] - f * rp[j]) // prev
            ri[p] = 0
        prev = pivot
    return sign * rows[n - 1][n - 1]


def det(m: IntMatrix) -> int:
    if not m.is_square():
        raise DimensionMismatch(f"determinant of {m.rows}x{m.cols}")
    return _det_rows(m.to_rows())


def adjugate_det(m: IntMatrix) -> tuple[IntMatrix, int]:
    """Adjugate and determinant, computed together fraction-free.

    adj(m) @ m == det(m) * identity, with adj integral even when det is 0
    on paper; this implementation bails out with det 0 and an unspecified
    adjugate slot only when elimination meets a vanishing column, so
    callers must check the determinant before using the adjugate.
    """
    if not m.is_square():
        raise DimensionMismatch(f"adjugate of {m.rows}x{m.cols}")
    n = m.rows
    if n == 0:
        return identity(0), 1
    # Fraction-free Gauss-Jordan on [m | I].  Row swaps act on whole
    # augmented rows, so the right block ends as det(P m) * inverse(m)
    # and the left block as det(P m) * I, P the pivoting permutation.
    aug = [list(m.row(i)) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    swap_sign = 1
    prev = 1
    for p in range(n):
        if aug[p][p] == 0:
            for q in range(p + 1, n):
                if aug[q][p]:
                    aug[p], aug[q] = aug[q], aug[p]
                    swap_sign = -swap_sign
                    break
            else:
                return IntMatrix.zero(n, n), 0
        pivot = aug[p][p]
        ap = aug[p]
        for i in range(n):
            if i == p:
                continue
            ai = aug[i]
            f = ai[p]
            for j in range(2 * n):
                ai[j] = (pivot * ai[j] - f * ap[j]) // prev
        prev = pivot
    d = aug[n - 1][n - 1] * swap_sign  # true determinant of m
    # right block is det(P m) * inverse(m); adjugate is det(m) * inverse(m)
    adj_rows = [[swap_sign * e for e in aug[i][n:]] for i in range(n)]
    return IntMatrix.from_rows(adj_rows), d


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    """Integer inverse of a matrix with determinant +-1.

    Raises NotUnimodular (carrying the determinant) otherwise.
    """
    adj, d = adjugate_det(m)
    if d not in (1, -1):
        raise NotUnimodular(d)
    if d == 1:
        return adj
    return IntMatrix(adj.rows, adj.cols, tuple(-e for e in adj.entries))
