"""Even unimodular symmetric bilinear forms and the ``pE8 + qH`` bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .intalg import IntegerMatrix, det


class FormError(ValueError):
    """Base class for form construction and classification failures."""


class DegenerateFormError(FormError):
    pass


class NotEvenUnimodularError(FormError):
    """Signature not divisible by 8."""


class DefiniteFormError(FormError):
    """(rank, signature) with no hyperbolic summand left over."""


class InconsistentRankError(FormError):
    """rank and signature of different parity."""


# Bourbaki labelling: chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
_E8_EDGES = ((1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4))


@dataclass(frozen=True)
class BilinearForm:
    gram: IntegerMatrix

    def __post_init__(self) -> None:
        if not self.gram.is_symmetric():
            raise FormError("Gram matrix must be square and symmetric")

    @classmethod
    def from_rows(cls, rows) -> BilinearForm:
        return cls(IntegerMatrix.from_rows(rows))

    @property
    def rank(self) -> int:
        return self.gram.rows

    def __neg__(self) -> BilinearForm:
        return BilinearForm(-self.gram)


@dataclass(frozen=True)
class EvenIndefiniteType:
    """``p`` copies of E8 (of -E8 when ``p < 0``) plus ``q >= 1`` copies of H."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.q < 1:
            raise DefiniteFormError(f"q = {self.q}: an even indefinite form needs q >= 1")

    @property
    def signature(self) -> int:
        return -8 * self.p

    @property
    def rank(self) -> int:
        return 8 * abs(self.p) + 2 * self.q

    def satisfies_five_fourths(self) -> bool:
        return abs(self.p) <= self.q


def empty_form() -> BilinearForm:
    return BilinearForm(IntegerMatrix.zeros(0, 0))


def e8() -> BilinearForm:
    """Negative definite E8: minus the Cartan matrix."""
    rows = [[0] * 8 for _ in range(8)]
    for i in range(8):
        rows[i][i] = -2
    for a, b in _E8_EDGES:
        rows[a - 1][b - 1] = rows[b - 1][a - 1] = 1
    return BilinearForm.from_rows(rows)


def hyperbolic() -> BilinearForm:
    return BilinearForm.from_rows([[0, 1], [1, 0]])


def direct_sum(a: BilinearForm, b: BilinearForm) -> BilinearForm:
    n, m = a.rank, b.rank
    rows = [[0] * (n + m) for _ in range(n + m)]
    for i in range(n):
        for j in range(n):
            rows[i][j] = a.gram[i, j]
    for i in range(m):
        for j in range(m):
            rows[n + i][n + j] = b.gram[i, j]
    return BilinearForm(IntegerMatrix.from_rows(rows, n + m))


def is_even(f: BilinearForm) -> bool:
    return all(d % 2 == 0 for d in f.gram.diagonal_entries())


def is_unimodular(f: BilinearForm) -> bool:
    return abs(det(f.gram)) == 1


def inertia(f: BilinearForm) -> tuple[int, int]:
    """``(n_plus, n_minus)`` by exact symmetric elimination over Q.

    A nonzero leading diagonal entry is split off as a 1x1 block. If it is
    zero but the row is not, the 2x2 block on that row and a partner column
    has negative determinant and contributes one of each sign.
    """
    a = [[Fraction(x) for x in row] for row in f.gram.to_rows()]
    pos = neg = 0
    while a:
        if a[0][0] != 0:
            p = a[0][0]
            if p > 0:
                pos += 1
            else:
                neg += 1
            a = [
                [a[i][j] - a[i][0] * a[0][j] / p for j in range(1, len(a))]
                for i in range(1, len(a))
            ]
            continue
        k = next((j for j in range(1, len(a)) if a[0][j] != 0), None)
        if k is None:
            raise DegenerateFormError("form is degenerate (zero row after reduction)")
        pos += 1
        neg += 1
        # Schur complement of the block B on indices {0, k}
        b00, b01, b11 = a[0][0], a[0][k], a[k][k]
        d = b00 * b11 - b01 * b01
        inv = ((b11 / d, -b01 / d), (-b01 / d, b00 / d))
        rest = [i for i in range(1, len(a)) if i != k]
        blk = (0, k)
        a = [
            [
                a[i][j] - sum(
                    a[i][blk[s]] * inv[s][t] * a[blk[t]][j]
                    for s in range(2) for t in range(2)
                )
                for j in rest
            ]
            for i in rest
        ]
    return pos, neg


def signature(f: BilinearForm) -> int:
    pos, neg = inertia(f)
    return pos - neg


def classify_even_indefinite(rank: int, tau: int) -> EvenIndefiniteType:
    """Read off ``(p, q)`` from rank and signature of an even unimodular form."""
    if rank < 0:
        raise FormError("rank must be nonnegative")
    if tau % 8:
        raise NotEvenUnimodularError(
            f"signature {tau} is not divisible by 8, so no even unimodular form has it"
        )
    if (rank - abs(tau)) % 2:
        raise InconsistentRankError(f"rank {rank} and signature {tau} differ in parity")
    q = (rank - abs(tau)) // 2
    if q <= 0:
        raise DefiniteFormError(
            f"rank {rank}, signature {tau} leaves q = {q}: definite, excluded "
            "(a nontrivial even form is indefinite)"
        )
    return EvenIndefiniteType(-tau // 8, q)


def build(t: EvenIndefiniteType) -> BilinearForm:
    block = e8() if t.p > 0 else -e8()
    out = empty_form()
    for _ in range(abs(t.p)):
        out = direct_sum(out, block)
    for _ in range(t.q):
        out = direct_sum(out, hyperbolic())
    return out


def classify_form(f: BilinearForm) -> EvenIndefiniteType:
    """Classify a Gram matrix, checking evenness and unimodularity first."""
    if not is_even(f):
        raise NotEvenUnimodularError("form is odd (some diagonal entry is odd)")
    if not is_unimodular(f):
        raise NotEvenUnimodularError(f"form is not unimodular (det = {det(f.gram)})")
    return classify_even_indefinite(f.rank, signature(f))
