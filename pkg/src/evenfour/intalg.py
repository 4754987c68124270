"""Exact integer matrices and Smith normal form.

Everything here works on Python ints, so there is no overflow anywhere,
including inside the elimination steps of :func:`smith_normal_form`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntegerMatrix:
    """Immutable rectangular integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )
        for x in self.entries:
            if not isinstance(x, int) or isinstance(x, bool):
                raise TypeError(f"matrix entries must be int, got {x!r}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntegerMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix literal")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> IntegerMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntegerMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, diag: Iterable[int], rows: int | None = None,
                 cols: int | None = None) -> IntegerMatrix:
        diag = list(diag)
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(diag):
            data[i][i] = d
        return cls.from_rows(data, cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def transpose(self) -> IntegerMatrix:
        return IntegerMatrix.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)],
            self.rows,
        )

    def __matmul__(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        a, b = self.to_rows(), other.to_rows()
        out = [
            [sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
            for i in range(self.rows)
        ]
        return IntegerMatrix.from_rows(out, other.cols)

    def __neg__(self) -> IntegerMatrix:
        return IntegerMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i)
        )

    def diagonal_entries(self) -> list[int]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows)
                   for j in range(self.cols) if i != j)


@dataclass(frozen=True)
class SNFResult:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form."""

    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix

    @property
    def invariant_factors(self) -> list[int]:
        return self.D.diagonal_entries()

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d != 0)


def det(M: IntegerMatrix) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    if not M.is_square():
        raise ValueError(f"determinant needs a square matrix, got {M.shape}")
    n = M.rows
    if n == 0:
        return 1
    a = M.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exact by Sylvester's identity
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _swap_rows(a: list[list[int]], i: int, j: int) -> None:
    a[i], a[j] = a[j], a[i]


def _swap_cols(a: list[list[int]], i: int, j: int) -> None:
    for row in a:
        row[i], row[j] = row[j], row[i]


def _add_row(a: list[list[int]], dst: int, src: int, q: int) -> None:
    # row_dst += q * row_src
    rs, rd = a[src], a[dst]
    for j in range(len(rd)):
        rd[j] += q * rs[j]


def _add_col(a: list[list[int]], dst: int, src: int, q: int) -> None:
    for row in a:
        row[dst] += q * row[src]


def _find_pivot(a: list[list[int]], k: int) -> tuple[int, int] | None:
    best = None
    best_abs = 0
    for i in range(k, len(a)):
        row = a[i]
        for j in range(k, len(row)):
            v = abs(row[j])
            # strict < keeps the lowest (row, col) on ties
            if v and (best is None or v < best_abs):
                best, best_abs = (i, j), v
    return best


def smith_normal_form(M: IntegerMatrix) -> SNFResult:
    """Return ``U, D, V`` with ``U @ M @ V == D``.

    The pivot at each stage is the nonzero entry of least absolute value in
    the trailing submatrix (ties to the lowest row, then column). Diagonal
    entries come out nonnegative with each dividing the next; zeros trail.
    """
    if M.rows == 0 or M.cols == 0:
        raise ValueError("smith_normal_form needs a nonempty matrix")
    m, n = M.rows, M.cols
    a = M.to_rows()
    u = IntegerMatrix.identity(m).to_rows()
    v = IntegerMatrix.identity(n).to_rows()

    for k in range(min(m, n)):
        while True:
            piv = _find_pivot(a, k)
            if piv is None:
                break
            pi, pj = piv
            if pi != k:
                _swap_rows(a, k, pi)
                _swap_rows(u, k, pi)
            if pj != k:
                _swap_cols(a, k, pj)
                _swap_cols(v, k, pj)
            p = a[k][k]

            dirty = False
            for i in range(k + 1, m):
                if a[i][k]:
                    q = a[i][k] // p
                    _add_row(a, i, k, -q)
                    _add_row(u, i, k, -q)
                    dirty = dirty or a[i][k] != 0
            for j in range(k + 1, n):
                if a[k][j]:
                    q = a[k][j] // p
                    _add_col(a, j, k, -q)
                    _add_col(v, j, k, -q)
                    dirty = dirty or a[k][j] != 0
            if dirty:
                # a smaller remainder now exists; re-pivot
                continue

            bad = next(
                (i for i in range(k + 1, m)
                 if any(a[i][j] % p for j in range(k + 1, n))),
                None,
            )
            if bad is None:
                break
            _add_row(a, k, bad, 1)
            _add_row(u, k, bad, 1)
        if a[k][k] < 0:
            a[k] = [-x for x in a[k]]
            u[k] = [-x for x in u[k]]

    return SNFResult(
        IntegerMatrix.from_rows(u, m),
        IntegerMatrix.from_rows(a, n),
        IntegerMatrix.from_rows(v, n),
    )


def parse_matrix(obj) -> IntegerMatrix:
    """Build a matrix from a JSON array-of-arrays literal."""
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ValueError("matrix literal must be a nonempty array of arrays")
    return IntegerMatrix.from_rows(obj)
