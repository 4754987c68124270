"""Numerical profiles of closed oriented 4-manifolds and the signature checkers.

A :class:`ManifoldDescriptor` is not a manifold. It records the invariants
the inequalities talk about. A checker that comes back with ``holds=False``
means no even manifold with that profile exists, by the cited result.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import forms
from .abgrp import FGAbelianGroup, GroupError, two_primary

FIVE_FOURTHS = Fraction(5, 4)
ELEVEN_EIGHTHS = Fraction(11, 8)

PI1_FLAGS = frozenset({
    "finite",
    "abelian",
    "amenable",
    "residually_finite",
    "cyclic_2torsion",
    "not_large",
    "extension_over_amenable_positive_b1",
    "hyperbolic",
})

# finite and abelian groups are amenable
_AMENABLE_IMPLIED_BY = frozenset({"finite", "abelian", "amenable"})


class DescriptorError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    citation: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.message} [{self.citation}]"


@dataclass(frozen=True)
class ManifoldDescriptor:
    b1: int
    b2: int
    tau: int
    torsion: tuple[int, ...] = ()
    even: bool = False
    spin: bool = False
    flags: frozenset[str] = frozenset()
    b1_l2: Fraction | None = None
    pi1_infinite: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "torsion", tuple(self.torsion))
        object.__setattr__(self, "flags", frozenset(self.flags))
        if self.b1_l2 is not None:
            object.__setattr__(self, "b1_l2", Fraction(self.b1_l2))

    @property
    def h1(self) -> FGAbelianGroup:
        return FGAbelianGroup(self.b1, self.torsion)

    @property
    def euler(self) -> int:
        return 2 - 2 * self.b1 + self.b2

    @property
    def amenable(self) -> bool:
        return bool(self.flags & _AMENABLE_IMPLIED_BY)

    def to_json(self) -> dict:
        out = {
            "b1": self.b1, "b2": self.b2, "tau": self.tau,
            "torsion": list(self.torsion), "even": self.even, "spin": self.spin,
            "flags": sorted(self.flags),
        }
        if self.b1_l2 is not None:
            out["b1_l2"] = fraction_json(self.b1_l2)
        if self.pi1_infinite:
            out["pi1_infinite"] = True
        return out


def fraction_json(x: Fraction | int):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


_DESCRIPTOR_KEYS = {
    "b1", "b2", "tau", "torsion", "even", "spin", "flags", "b1_l2", "pi1_infinite",
}


def parse_descriptor(obj, extra_keys: frozenset[str] = frozenset()) -> ManifoldDescriptor:
    """Build a descriptor from its JSON object; structural errors raise ``ValueError``."""
    if not isinstance(obj, dict):
        raise ValueError("descriptor must be a JSON object")
    unknown = set(obj) - _DESCRIPTOR_KEYS - extra_keys
    if unknown:
        raise ValueError(f"unknown descriptor keys: {sorted(unknown)}")
    for key in ("b1", "b2", "tau"):
        if key not in obj:
            raise ValueError(f"descriptor is missing {key!r}")
        if not isinstance(obj[key], int) or isinstance(obj[key], bool):
            raise ValueError(f"{key} must be an integer")
    for key in ("even", "spin", "pi1_infinite"):
        if key in obj and not isinstance(obj[key], bool):
            raise ValueError(f"{key} must be a boolean")
    torsion = obj.get("torsion", [])
    if not isinstance(torsion, list) or not all(
        isinstance(d, int) and not isinstance(d, bool) for d in torsion
    ):
        raise ValueError("torsion must be a list of integers")
    flags = obj.get("flags", [])
    if not isinstance(flags, list) or not all(isinstance(f, str) for f in flags):
        raise ValueError("flags must be a list of strings")
    bad = set(flags) - PI1_FLAGS
    if bad:
        raise ValueError(f"unknown fundamental-group flags: {sorted(bad)}")
    b1_l2 = obj.get("b1_l2")
    if b1_l2 is not None:
        try:
            b1_l2 = Fraction(b1_l2)
        except (TypeError, ValueError, ZeroDivisionError):
            raise ValueError("b1_l2 must be a rational number or a string like '1/2'")
    pi1_infinite = obj.get("pi1_infinite", False)
    return ManifoldDescriptor(
        b1=obj["b1"], b2=obj["b2"], tau=obj["tau"], torsion=tuple(torsion),
        even=obj.get("even", False), spin=obj.get("spin", False),
        flags=frozenset(flags), b1_l2=b1_l2, pi1_infinite=pi1_infinite,
    )


def _l2_second_betti(d: ManifoldDescriptor) -> Fraction | None:
    # e = -2 b1^(2) + b2^(2) once b0^(2) = 0 (infinite pi_1) and b3^(2) = b1^(2)
    if d.b1_l2 is None or not (d.pi1_infinite or "hyperbolic" in d.flags):
        return None
    return d.euler + 2 * d.b1_l2


def validate(d: ManifoldDescriptor) -> list[Violation]:
    out: list[Violation] = []
    add = lambda rule, msg, cite: out.append(Violation(rule, msg, cite))  # noqa: E731

    if d.b1 < 0 or d.b2 < 0:
        add("nonnegative_betti", "Betti numbers must be nonnegative", "definition")
    try:
        h1 = d.h1
    except GroupError as exc:
        add("torsion_canonical", str(exc), "invariant-factor form of H_1")
        h1 = None
    if abs(d.tau) > d.b2:
        add("signature_bound", f"|tau| = {abs(d.tau)} exceeds b2 = {d.b2}",
            "tau = b+ - b-, b2 = b+ + b-")
    if d.spin and not d.even:
        add("spin_implies_even", "a spin manifold has even intersection form",
            "w2 is the mod 2 characteristic class")
    if h1 is not None and d.even and not d.spin and two_primary(h1).t == 0:
        add("even_no_2torsion_spin",
            "even with no 2-torsion in H_1 forces spin",
            "w2 restricts to Ext(H_1; Z2), which is zero without 2-torsion")
    if d.even and d.b2 > 0 and abs(d.tau) <= d.b2:
        try:
            forms.classify_even_indefinite(d.b2, d.tau)
        except forms.DefiniteFormError as exc:
            add("even_indefinite", str(exc), "Donaldson: a definite smooth form is diagonal")
        except forms.FormError as exc:
            add("even_unimodular", str(exc), "even indefinite unimodular forms are pE8 + qH")
    if d.b1_l2 is not None and d.b1_l2 < 0:
        add("l2_nonnegative", "b1_l2 must be nonnegative", "L2-Betti numbers are >= 0")
    b2_l2 = _l2_second_betti(d)
    if b2_l2 is not None and b2_l2 < 0:
        add("l2_nonnegative",
            f"e + 2*b1_l2 = {b2_l2} would make the second L2-Betti number negative",
            "L2 Euler characteristic equals e")
    if "hyperbolic" in d.flags and d.b1_l2 not in (None, 0):
        add("hyperbolic_l2", "hyperbolic fundamental groups have b1_l2 = 0",
            "Corollary 3")
    return out


def ensure_valid(d: ManifoldDescriptor) -> None:
    problems = validate(d)
    if problems:
        raise DescriptorError(problems)


@dataclass(frozen=True)
class DerivedDims:
    e: int
    t: int
    h2_z2: int
    b1_z2: int
    b2_l2: Fraction | None = None


def derive(d: ManifoldDescriptor) -> DerivedDims:
    ensure_valid(d)
    t = two_primary(d.h1).t
    return DerivedDims(
        e=d.euler,
        t=t,
        h2_z2=d.b2 + 2 * t,
        b1_z2=d.b1 + t,
        b2_l2=_l2_second_betti(d),
    )


@dataclass(frozen=True)
class CheckVerdict:
    name: str
    applicable: bool
    holds: bool | None
    slack: Fraction | None
    citation: str
    statement: str = ""
    note: str = ""
    conditional: bool = False

    def __post_init__(self) -> None:
        if self.applicable != (self.holds is not None):
            raise ValueError("holds must be set exactly when the check applies")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "applicable": self.applicable,
            "holds": self.holds,
            "slack": None if self.slack is None else fraction_json(self.slack),
            "statement": self.statement,
            "citation": self.citation,
            "conditional": self.conditional,
            "note": self.note,
        }


def _inapplicable(name: str, citation: str, reason: str) -> CheckVerdict:
    return CheckVerdict(name, False, None, None, citation, note=reason)


def _verdict(name, citation, lhs, rhs, statement, strict=False, note="", conditional=False):
    slack = Fraction(rhs) - Fraction(lhs)
    holds = slack > 0 if strict else slack >= 0
    if not holds and not note:
        note = "no such manifold exists" if not conditional else "would contradict the 11/8-conjecture"
    return CheckVerdict(name, True, holds, slack, citation, statement, note, conditional)


def check_conjecture_54(d: ManifoldDescriptor) -> CheckVerdict:
    name, cite = "conjecture_54", "5/4-conjecture"
    if not d.even:
        return _inapplicable(name, cite, "intersection form not even")
    lhs = FIVE_FOURTHS * abs(d.tau)
    return _verdict(name, cite, lhs, d.b2, "(5/4)|tau| <= b2",
                    note="" if lhs <= d.b2 else "violates the 5/4-conjecture")


def furuta_predicate(d: ManifoldDescriptor) -> bool:
    """``(5/4)|tau| - b2 <= 0``, the form used inside the amenable argument."""
    return FIVE_FOURTHS * abs(d.tau) - d.b2 <= 0


def furuta_strong_predicate(d: ManifoldDescriptor) -> bool:
    """``(5/4)|tau| <= b2 - 2`` for spin manifolds with nonzero signature."""
    return d.tau == 0 or FIVE_FOURTHS * abs(d.tau) <= d.b2 - 2


def check_theorem3_even(d: ManifoldDescriptor) -> CheckVerdict:
    name, cite = "theorem3_even", "Theorem 3(1)"
    if not d.even:
        return _inapplicable(name, cite, "intersection form not even")
    if d.tau == 0:
        return _inapplicable(name, cite, "needs non-zero signature")
    dims = derive(d)
    return _verdict(name, cite, FIVE_FOURTHS * abs(d.tau), dims.h2_z2 - 2,
                    "(5/4)|tau| <= dim H^2(X;Z2) - 2")


def check_theorem3_abelian_cover(d: ManifoldDescriptor, cover_is_even: bool) -> CheckVerdict:
    name, cite = "theorem3_abelian_cover", "Theorem 3(2)"
    if not cover_is_even:
        return _inapplicable(name, cite, "no finite abelian cover known to be even")
    if d.tau == 0:
        return _inapplicable(name, cite, "needs non-zero signature")
    dims = derive(d)
    return _verdict(name, cite, FIVE_FOURTHS * abs(d.tau), dims.h2_z2,
                    "(5/4)|tau| < dim H^2(X;Z2)", strict=True)


def _amenable_like(d: ManifoldDescriptor) -> bool:
    return d.amenable or "not_large" in d.flags


def check_theorem4_amenable(d: ManifoldDescriptor, cover_is_even: bool = False) -> CheckVerdict:
    """Amenable (or not large) fundamental group: ``(5/4)|tau| <= e``.

    By multiplicativity this also applies when only a finite cover is even.
    """
    name, cite = "theorem4_amenable", "Theorem 4, Remark 2"
    if not (d.even or cover_is_even):
        return _inapplicable(name, cite, "neither X nor a finite cover is even")
    if not _amenable_like(d):
        return _inapplicable(name, cite, "fundamental group not flagged amenable or not large")
    return _verdict(name, cite, FIVE_FOURTHS * abs(d.tau), d.euler, "(5/4)|tau| <= e")


def check_remark3_118(d: ManifoldDescriptor, cover_is_even: bool = False) -> CheckVerdict:
    name, cite = "remark3_118", "Remark 3 (conditional on the 11/8-conjecture)"
    if not (d.even or cover_is_even):
        return _inapplicable(name, cite, "neither X nor a finite cover is even")
    if not _amenable_like(d):
        return _inapplicable(name, cite, "fundamental group not flagged amenable or not large")
    return _verdict(name, cite, ELEVEN_EIGHTHS * abs(d.tau), d.euler,
                    "(11/8)|tau| <= e", conditional=True)


def check_theorem5_l2(d: ManifoldDescriptor) -> CheckVerdict:
    name, cite = "theorem5_l2", "Theorem 5"
    if not d.even:
        return _inapplicable(name, cite, "intersection form not even")
    rf = "residually_finite" in d.flags or "hyperbolic" in d.flags
    if not rf:
        return _inapplicable(name, cite, "fundamental group not flagged residually finite")
    if d.b1_l2 is None:
        return _inapplicable(name, cite, "b1_l2 not given")
    if not (d.pi1_infinite or "hyperbolic" in d.flags):
        return _inapplicable(name, cite, "needs infinite fundamental group")
    dims = derive(d)
    return _verdict(name, cite, FIVE_FOURTHS * abs(d.tau), dims.b2_l2,
                    "(5/4)|tau| <= b2_l2 = e + 2*b1_l2")


def check_corollary1(d: ManifoldDescriptor) -> CheckVerdict:
    name, cite = "corollary1", "Corollary 1"
    if not d.even:
        return _inapplicable(name, cite, "intersection form not even")
    dims = derive(d)
    if dims.t >= 2:
        return _inapplicable(name, cite, f"2-torsion of H_1 is not cyclic (t = {dims.t})")
    note = "t = 0: spin, Furuta's theorem applies" if dims.t == 0 else ""
    return _verdict(name, cite, FIVE_FOURTHS * abs(d.tau), d.b2, "(5/4)|tau| <= b2", note=note)


def check_corollary2(d: ManifoldDescriptor) -> CheckVerdict:
    name, cite = "corollary2", "Corollary 2"
    if not d.even:
        return _inapplicable(name, cite, "intersection form not even")
    if not ({"finite", "abelian"} & d.flags):
        return _inapplicable(name, cite, "fundamental group not flagged finite or abelian")
    return _verdict(name, cite, FIVE_FOURTHS * abs(d.tau), d.b2, "(5/4)|tau| <= b2")


def check_corollary3(d: ManifoldDescriptor) -> CheckVerdict:
    """Hyperbolic fundamental group (dimension >= 3): ``(5/4)|tau| <= e``."""
    name, cite = "corollary3", "Corollary 3"
    if not d.even:
        return _inapplicable(name, cite, "intersection form not even")
    if "hyperbolic" not in d.flags:
        return _inapplicable(name, cite, "fundamental group not flagged hyperbolic (dim >= 3)")
    return _verdict(name, cite, FIVE_FOURTHS * abs(d.tau), d.euler, "(5/4)|tau| <= e")


def check_corollary4(d: ManifoldDescriptor) -> CheckVerdict:
    name, cite = "corollary4", "Corollary 4"
    if not d.even:
        return _inapplicable(name, cite, "intersection form not even")
    if "extension_over_amenable_positive_b1" not in d.flags:
        return _inapplicable(name, cite, "no extension over an amenable group with b1 > 0")
    return _verdict(name, cite, FIVE_FOURTHS * abs(d.tau), d.euler, "(5/4)|tau| <= e")


def run_all_checks(d: ManifoldDescriptor, cover_is_even: bool = False) -> list[CheckVerdict]:
    """Every checker, in a fixed order. ``cover_is_even`` means some finite
    abelian cover is known to be even; X itself counts when X is even."""
    cover_even = cover_is_even or d.even
    return [
        check_conjecture_54(d),
        check_theorem3_even(d),
        check_theorem3_abelian_cover(d, cover_even),
        check_theorem4_amenable(d, cover_even),
        check_remark3_118(d, cover_even),
        check_theorem5_l2(d),
        check_corollary1(d),
        check_corollary2(d),
        check_corollary3(d),
        check_corollary4(d),
    ]
