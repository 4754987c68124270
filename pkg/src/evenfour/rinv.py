"""Bounds on the group invariant r.

r(G) is the minimum of ``e(X) - (5/4)|tau(X)|`` over closed oriented smooth
even 4-manifolds X with fundamental group G. It is always an even integer.
Here it is tracked as an interval ``[lo, hi]``; ``None`` on either end
stands for an unbounded side and is printed as ``-inf`` / ``+inf``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .manifold import FIVE_FOURTHS, ManifoldDescriptor, derive

TAGS = (
    "trivial", "free", "finite_cyclic", "surface", "free_abelian",
    "free_product", "times_Z", "finite_index_subgroup", "opaque",
)


class InconsistentBounds(ValueError):
    pass


class InconsistentWitness(ValueError):
    pass


@dataclass(frozen=True)
class GroupDescriptor:
    tag: str
    n: int | None = None
    a: GroupDescriptor | None = None
    b: GroupDescriptor | None = None
    index: int | None = None
    amenable: bool | None = None
    dim_h1_z2: int | None = None
    b1: int | None = None
    label: str | None = None

    def __post_init__(self) -> None:
        t = self.tag
        if t not in TAGS:
            raise ValueError(f"unknown group tag {t!r}")
        need_n = {"free": 0, "finite_cyclic": 2, "surface": 1, "free_abelian": 0}
        if t in need_n:
            if not isinstance(self.n, int) or self.n < need_n[t]:
                raise ValueError(f"{t} needs an integer parameter >= {need_n[t]}")
        if t == "free_product" and (self.a is None or self.b is None):
            raise ValueError("free_product needs two factors")
        if t in ("times_Z", "finite_index_subgroup") and self.a is None:
            raise ValueError(f"{t} needs a group")
        if t == "finite_index_subgroup" and (not isinstance(self.index, int) or self.index < 1):
            raise ValueError("subgroup index must be >= 1")

    @property
    def h1_z2_dim(self) -> int | None:
        """dim H^1(G; Z2), given or derived from the tag."""
        if self.dim_h1_z2 is not None:
            return self.dim_h1_z2
        t, n = self.tag, self.n
        if t == "trivial":
            return 0
        if t in ("free", "free_abelian"):
            return n
        if t == "finite_cyclic":
            return 1 if n % 2 == 0 else 0
        if t == "surface":
            return 2 * n
        if t == "free_product":
            da, db = self.a.h1_z2_dim, self.b.h1_z2_dim
            return None if da is None or db is None else da + db
        if t == "times_Z":
            da = self.a.h1_z2_dim
            return None if da is None else da + 1
        return None

    @property
    def is_amenable(self) -> bool | None:
        if self.amenable is not None:
            return self.amenable
        t, n = self.tag, self.n
        if t in ("trivial", "finite_cyclic", "free_abelian"):
            return True
        if t == "free":
            return n <= 1
        if t == "surface":
            return n == 1
        if t == "finite_index_subgroup":
            return self.a.is_amenable
        return None

    def is_infinite_cyclic(self) -> bool:
        return self.tag in ("free", "free_abelian") and self.n == 1

    def describe(self) -> str:
        if self.label:
            return self.label
        t, n = self.tag, self.n
        return {
            "trivial": lambda: "1",
            "free": lambda: f"F_{n}",
            "finite_cyclic": lambda: f"Z_{n}",
            "surface": lambda: f"Gamma_{n}",
            "free_abelian": lambda: f"Z^{n}",
            "free_product": lambda: f"({self.a.describe()} * {self.b.describe()})",
            "times_Z": lambda: f"({self.a.describe()} * Z)",
            "finite_index_subgroup": lambda: f"[{self.a.describe()} : index {self.index}]",
            "opaque": lambda: "G",
        }[t]()


def trivial() -> GroupDescriptor:
    return GroupDescriptor("trivial")


def free(k: int) -> GroupDescriptor:
    return GroupDescriptor("free", n=k)


def finite_cyclic(n: int) -> GroupDescriptor:
    return GroupDescriptor("finite_cyclic", n=n)


def surface(g: int) -> GroupDescriptor:
    return GroupDescriptor("surface", n=g)


def free_abelian(n: int) -> GroupDescriptor:
    return GroupDescriptor("free_abelian", n=n)


def free_product(a: GroupDescriptor, b: GroupDescriptor) -> GroupDescriptor:
    return GroupDescriptor("free_product", a=a, b=b)


def times_Z(a: GroupDescriptor) -> GroupDescriptor:
    return GroupDescriptor("times_Z", a=a)


def finite_index_subgroup(parent: GroupDescriptor, index: int, **kw) -> GroupDescriptor:
    return GroupDescriptor("finite_index_subgroup", a=parent, index=index, **kw)


def opaque(**kw) -> GroupDescriptor:
    return GroupDescriptor("opaque", **kw)


_GROUP_KEYS = {"tag", "n", "k", "g", "a", "b", "parent", "group", "index",
               "amenable", "dim_h1_z2", "b1", "label"}


def parse_group_descriptor(obj) -> GroupDescriptor:
    """JSON mirror of the tag algebra.

    ``{"tag": "free", "k": 3}``, ``{"tag": "surface", "g": 2}``,
    ``{"tag": "free_product", "a": {...}, "b": {...}}``,
    ``{"tag": "times_Z", "group": {...}}``,
    ``{"tag": "finite_index_subgroup", "parent": {...}, "index": 2}``.
    """
    if not isinstance(obj, dict) or "tag" not in obj:
        raise ValueError("group descriptor must be an object with a 'tag'")
    unknown = set(obj) - _GROUP_KEYS
    if unknown:
        raise ValueError(f"unknown group descriptor keys: {sorted(unknown)}")
    n = next((obj[k] for k in ("n", "k", "g") if k in obj), None)
    sub = lambda key: parse_group_descriptor(obj[key]) if key in obj else None  # noqa: E731
    a = sub("a") or sub("parent") or sub("group")
    for key in ("n", "k", "g", "index", "dim_h1_z2", "b1"):
        if key in obj and (not isinstance(obj[key], int) or isinstance(obj[key], bool)):
            raise ValueError(f"{key} must be an integer")
    if "amenable" in obj and not isinstance(obj["amenable"], bool):
        raise ValueError("amenable must be a boolean")
    return GroupDescriptor(
        tag=obj["tag"], n=n, a=a, b=sub("b"), index=obj.get("index"),
        amenable=obj.get("amenable"), dim_h1_z2=obj.get("dim_h1_z2"),
        b1=obj.get("b1"), label=obj.get("label"),
    )


def _fmt_bound(x: int | None, neg: bool) -> str:
    if x is None:
        return "-inf" if neg else "+inf"
    return str(x)


@dataclass(frozen=True)
class RInterval:
    lo: int | None
    hi: int | None
    trail: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        for x in (self.lo, self.hi):
            if x is not None and x % 2:
                raise InconsistentBounds(f"r bounds must be even, got {x}")
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise InconsistentBounds(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v: int, why: str) -> RInterval:
        return cls(v, v, (why,))

    @property
    def exact(self) -> int | None:
        return self.lo if self.lo is not None and self.lo == self.hi else None

    def shift(self, by: int, why: str) -> RInterval:
        mv = lambda x: None if x is None else x + by  # noqa: E731
        return RInterval(mv(self.lo), mv(self.hi), self.trail + (why,))

    def raise_lo(self, lo: int | None, why: str) -> RInterval:
        if lo is None or (self.lo is not None and self.lo >= lo):
            return self
        return RInterval(lo, self.hi, self.trail + (why,))

    def lower_hi(self, hi: int | None, why: str) -> RInterval:
        if hi is None or (self.hi is not None and self.hi <= hi):
            return self
        return RInterval(self.lo, hi, self.trail + (why,))

    def __str__(self) -> str:
        return f"[{_fmt_bound(self.lo, True)}, {_fmt_bound(self.hi, False)}]"

    def to_json(self) -> dict:
        return {
            "lo": _fmt_bound(self.lo, True) if self.lo is None else self.lo,
            "hi": _fmt_bound(self.hi, False) if self.hi is None else self.hi,
            "trail": list(self.trail),
        }


UNBOUNDED = RInterval(None, None)


def lemma7_floor(dim_h1_z2: int) -> int:
    """``2 (1 - dim H^1(G; Z2))``."""
    return 2 * (1 - dim_h1_z2)


def _closed_value(g: GroupDescriptor) -> RInterval | None:
    t, n = g.tag, g.n
    if t == "trivial" or (t in ("free", "free_abelian") and n == 0):
        return RInterval.point(2, "trivial group: r = 2 (table)")
    if t == "free":
        return RInterval.point(2 - 2 * n, f"Prop 1(1): r(F_{n}) = 2 - 2k")
    if t == "finite_cyclic":
        return RInterval.point(2, "Prop 1(2): r(Z_n) = 2")
    if t == "surface":
        return RInterval.point(4 - 4 * n, f"Prop 1(5): r(Gamma_{n}) = 4 - 4g")
    if t == "free_abelian":
        if n == 1:
            return RInterval.point(0, "Prop 1(1): r(Z) = r(F_1) = 0")
        if n in (2, 4):
            return RInterval.point(0, f"Prop 1(6): r(Z^{n}) = 0")
        if n == 3:
            return RInterval(0, 2, ("Prop 1(6): 0 <= r(Z^3) <= 2",))
    return None


def _structural(g: GroupDescriptor) -> RInterval:
    t = g.tag
    closed = _closed_value(g)
    if closed is not None:
        return closed
    if t == "times_Z":
        return r_bounds(g.a).shift(-2, "Prop 1(3): r(G * Z) = r(G) - 2")
    if t == "free_product":
        if g.b.is_infinite_cyclic():
            return r_bounds(g.a).shift(-2, "Prop 1(3): r(G * Z) = r(G) - 2")
        if g.a.is_infinite_cyclic():
            return r_bounds(g.b).shift(-2, "Prop 1(3): r(Z * G) = r(G) - 2")
        ra, rb = r_bounds(g.a), r_bounds(g.b)
        if ra.hi is not None and rb.hi is not None:
            return RInterval(None, ra.hi + rb.hi - 2,
                             ("Lemma 8: r(G1 * G2) <= r(G1) + r(G2) - 2",))
        return UNBOUNDED
    if t == "finite_index_subgroup":
        rp = r_bounds(g.a)
        if rp.hi is not None:
            return RInterval(None, g.index * rp.hi,
                             (f"Lemma 8: r(G') <= [G : G'] r(G) with index {g.index}",))
        return UNBOUNDED
    # opaque, free_abelian(n >= 5)
    return UNBOUNDED


def r_bounds(g: GroupDescriptor, witnesses: tuple[ManifoldDescriptor, ...] = ()) -> RInterval:
    """Tightest interval for r(g) from the exact values and propagation rules."""
    out = _structural(g)
    dim = g.h1_z2_dim
    if dim is not None:
        out = out.raise_lo(lemma7_floor(dim), f"Lemma 7: r >= 2(1 - {dim})")
    if g.is_amenable:
        out = out.raise_lo(0, "Prop 1(4): amenable, r >= 0")
    for d in witnesses:
        out = out.lower_hi(witness_upper_bound(g, d), "witness: r <= e - (5/4)|tau|")
    return out


def witness_upper_bound(g: GroupDescriptor, d: ManifoldDescriptor) -> int:
    """``e(d) - (5/4)|tau(d)|`` for an even witness declared to have fundamental group ``g``."""
    if not d.even:
        raise InconsistentWitness("witness must have even intersection form")
    dims = derive(d)
    val = Fraction(dims.e) - FIVE_FOURTHS * abs(d.tau)
    if val.denominator != 1 or val.numerator % 2:
        raise InconsistentWitness(f"e - (5/4)|tau| = {val} is not an even integer")
    val = val.numerator
    dim = g.h1_z2_dim
    if dim is not None:
        # H^1(X; Z2) = H^1(pi_1; Z2) = b1 + t
        if dims.b1_z2 != dim:
            raise InconsistentWitness(
                f"witness has dim H^1(X;Z2) = {dims.b1_z2}, group has {dim}"
            )
        if val < lemma7_floor(dim):
            raise InconsistentWitness(f"value {val} is below the Lemma 7 floor")
    return val


@dataclass(frozen=True)
class Prop15Replay:
    g: int
    assumed_r: int
    h: int
    cover_value: int
    floor_h: int
    inequality_holds: bool
    conclusion: int

    @property
    def contradiction(self) -> bool:
        return not self.inequality_holds


def replay_prop15(g: int) -> Prop15Replay:
    """Rule out ``r(Gamma_g) = 2 - 4g`` via the double cover of genus ``2g - 1``."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    assumed = 2 - 4 * g
    h = 2 * g - 1
    cover_value = 2 * assumed
    floor_h = lemma7_floor(2 * h)
    return Prop15Replay(
        g=g, assumed_r=assumed, h=h, cover_value=cover_value, floor_h=floor_h,
        inequality_holds=cover_value >= floor_h, conclusion=4 - 4 * g,
    )


@dataclass(frozen=True)
class TableRow:
    group: str
    p: str
    q: str
    r: str


PRQ_TABLE = (
    TableRow("1", "2", "2", "2"),
    TableRow("F_r", "2 - 2r", "2 - 2r", "2 - 2r"),
    TableRow("Z_n", "2", "2", "2"),
    TableRow("Gamma' * Z", "p(Gamma') - 2", "q(Gamma') - 2", "r(Gamma') - 2"),
    TableRow("Z^2", "0", "0", "0"),
    TableRow("Z^4", "0", "0", "0"),
    TableRow("Z^3", "2", "2", "?"),
    TableRow("Gamma_g", "4 - 4g", "4 - 4g", "4 - 4g"),
)


def _row_samples(row: TableRow, upto: int):
    """(group, expected r interval) pairs instantiating a table row."""
    name = row.group
    if name == "1":
        yield trivial(), RInterval(2, 2)
    elif name == "F_r":
        for k in range(upto + 1):
            yield free(k), RInterval(2 - 2 * k, 2 - 2 * k)
    elif name == "Z_n":
        for n in range(2, upto + 2):
            yield finite_cyclic(n), RInterval(2, 2)
    elif name == "Gamma' * Z":
        for base in (trivial(), free(2), finite_cyclic(3), surface(2), free_abelian(2)):
            yield times_Z(base), r_bounds(base).shift(-2, "")
    elif name in ("Z^2", "Z^4"):
        yield free_abelian(int(name[-1])), RInterval(0, 0)
    elif name == "Z^3":
        yield free_abelian(3), RInterval(0, 2)
    elif name == "Gamma_g":
        for g in range(1, upto + 1):
            yield surface(g), RInterval(4 - 4 * g, 4 - 4 * g)


def cross_check_row(row: TableRow, upto: int = 6) -> bool:
    """True when r_bounds reproduces the row; the ``?`` row must stay an interval."""
    for grp, expected in _row_samples(row, upto):
        got = r_bounds(grp)
        if got != expected:
            return False
        if row.r == "?" and got.exact is not None:
            return False
    return True


def prq_table() -> tuple[TableRow, ...]:
    for row in PRQ_TABLE:
        if not cross_check_row(row):
            raise AssertionError(f"r column of row {row.group} disagrees with r_bounds")
    return PRQ_TABLE


@dataclass(frozen=True)
class Theorem6Bounds:
    r_upper: int
    p_value: int
    q_value: int


def theorem6_inequality(e: int, tau: int) -> Theorem6Bounds:
    """``(e - (5/4)tau, e - tau, e)`` for a spin aspherical witness, checked strictly increasing."""
    if tau <= 0:
        raise ValueError("needs positive signature")
    if e <= 0:
        raise ValueError("needs positive Euler characteristic")
    r = Fraction(e) - FIVE_FOURTHS * tau
    if r.denominator != 1:
        raise InconsistentWitness(f"e - (5/4)tau = {r} is not an integer")
    out = Theorem6Bounds(r.numerator, e - tau, e)
    if not out.r_upper < out.p_value < out.q_value:
        raise InconsistentWitness("r < p < q fails")
    return out
