"""Covering-space arithmetic.

Euler characteristic and signature multiply by the degree under a finite
cover. First Betti numbers of covers are not determined by the base, so
they only appear here as upper bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .abgrp import (
    Character,
    Ext2Class,
    GroupError,
    character_image_exponent,
    ext_induced_oracle,
    is_power_of_two,
    lemma2_character,
    restrict_to_image,
    two_primary,
    v2,
)
from .manifold import (
    FIVE_FOURTHS,
    ManifoldDescriptor,
    check_theorem3_even,
    derive,
    ensure_valid,
)

STRUCTURES = ("cyclic", "abelian2", "abelian", "odd", "general")


class NotApplicable(ValueError):
    """The hypotheses of the invoked result are not met."""


@dataclass(frozen=True)
class CoverTransform:
    degree: int
    structure: str = "general"

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise ValueError("cover degree must be >= 1")
        if self.structure not in STRUCTURES:
            raise ValueError(f"unknown cover structure {self.structure!r}")
        if self.structure in ("cyclic", "abelian2") and not is_power_of_two(self.degree):
            raise ValueError(f"{self.structure} covers here have 2-power degree")
        if self.structure == "odd" and self.degree % 2 == 0:
            raise ValueError("odd cover with even degree")


@dataclass(frozen=True)
class CoverProfile:
    """What the base determines about a finite cover.

    ``even``/``spin`` are ``True`` when inherited from the base and ``None``
    when unknown. ``b1_z2_upper`` is only set for 2-power abelian covers.
    """

    degree: int
    e: int
    tau: int
    even: bool | None
    spin: bool | None
    b1_z2_upper: int | None = None

    @property
    def euler(self) -> int:
        return self.e


def transform(d: ManifoldDescriptor | CoverProfile, c: CoverTransform) -> CoverProfile:
    m = c.degree
    if isinstance(d, ManifoldDescriptor):
        ensure_valid(d)
        base_deg, b1_z2 = 1, derive(d).b1_z2
        even, spin = d.even or None, d.spin or None
        abelian_base = True
    else:
        base_deg, b1_z2 = d.degree, d.b1_z2_upper
        even, spin = d.even, d.spin
        abelian_base = False
    bound = None
    if abelian_base and c.structure in ("cyclic", "abelian2") and b1_z2 is not None:
        bound = lemma4_bound(b1_z2, m)
    return CoverProfile(base_deg * m, m * d.euler, m * d.tau, even, spin, bound)


def lemma4_bound(b1_z2_base: int, m: int) -> int:
    """Upper bound ``m*b - m + 1`` for dim H^1 of a connected abelian ``m``-fold cover."""
    if not is_power_of_two(m):
        raise NotApplicable(f"degree {m} is not a power of two")
    return m * b1_z2_base - m + 1


def lemma4_bound_inductive(b1_z2_base: int, m: int) -> int:
    """Same bound built one double cover at a time: ``2*bound(m/2) - 1``."""
    if not is_power_of_two(m):
        raise NotApplicable(f"degree {m} is not a power of two")
    b = b1_z2_base
    while m > 1:
        b = 2 * b - 1
        m //= 2
    return b


@dataclass(frozen=True)
class BaseFlags:
    even: bool | None
    spin: bool | None


def odd_descent(cover_even: bool, cover_spin: bool, m: int) -> BaseFlags:
    """Flags of the base of an odd-degree cover; ``None`` means undetermined."""
    if m < 1 or m % 2 == 0:
        raise NotApplicable(f"descent needs an odd degree, got {m}")
    return BaseFlags(
        even=True if (cover_even or cover_spin) else None,
        spin=True if cover_spin else None,
    )


def abelian_reduce_to_2group(m: int) -> int:
    """2-power part of ``m``: the degree left after quotienting the odd part of the deck group."""
    if m < 1:
        raise ValueError("degree must be >= 1")
    return 2 ** v2(m)


def lemma3_spin_equivalent(k: int) -> bool:
    """Connected double covers of a manifold with H_1 = Z/2^k reflect spin iff ``k >= 2``."""
    return k >= 2


@dataclass(frozen=True)
class TowerStep:
    level: int
    degree: int
    subgroup_exponent: int
    lemma3_applies: bool


@dataclass(frozen=True)
class SpinCoverPlan:
    character: Character
    degree: int
    tower: tuple[TowerStep, ...]
    already_spin: bool
    certificate: tuple[int, ...]

    @property
    def nu(self) -> int:
        return len(self.tower)


def _tower(mu: int, nu: int) -> tuple[TowerStep, ...]:
    # step k passes from the cover with (cyclic) group of order 2^(mu-k+1) to 2^(mu-k)
    return tuple(
        TowerStep(
            level=k,
            degree=2,
            subgroup_exponent=mu - k,
            lemma3_applies=lemma3_spin_equivalent(mu - k + 1),
        )
        for k in range(1, nu + 1)
    )


def spin_cover_plan(d: ManifoldDescriptor, w2: Ext2Class) -> SpinCoverPlan:
    """Cyclic 2-power cover killing ``w2``.

    The character comes from :func:`lemma2_character` (zero on the free
    part) restricted to its image ``Z/2^nu``; the cover has degree ``2^nu``.
    The induced Ext map is re-derived with the resolution oracle and must
    send the generator to ``w2``.
    """
    if not d.even:
        raise NotApplicable("w2 lies in Ext(H_1; Z2) only for even intersection forms")
    ensure_valid(d)
    G = d.h1
    tp = two_primary(G)
    if len(w2) != tp.t:
        raise GroupError(f"w2 has {len(w2)} bits, H_1 has {tp.t} even torsion slots")
    if d.spin and not w2.is_zero():
        raise NotApplicable("descriptor is spin, so w2 must vanish")
    f = restrict_to_image(lemma2_character(G, w2))
    nu = character_image_exponent(f)
    image = ext_induced_oracle(f).image_of_generator
    if nu and image != w2.bits:
        raise AssertionError(f"Ext certificate failed: {image} != {w2.bits}")
    return SpinCoverPlan(
        character=f,
        degree=2 ** nu,
        tower=_tower(tp.mu, nu),
        already_spin=nu == 0,
        certificate=image,
    )


def minimal_spin_degree_cyclic(mu: int) -> int:
    """Least degree of a spin cover over the non-spin ``Z/2^mu`` witness.

    Walk down the tower of double covers: while Lemma 3 applies to the base
    of a step, spin is reflected, so the cover stays non-spin. Only the last
    step (base with H_1 = Z/2) can turn spin.
    """
    if mu < 1:
        return 1
    degree = 1
    for step in _tower(mu, mu):
        degree *= step.degree
        if not step.lemma3_applies:
            break
    return degree


@dataclass(frozen=True)
class ChainLine:
    label: str
    betti: str
    expression: str
    value: int | None


@dataclass(frozen=True)
class Theorem3Replay:
    m: int
    e: int
    tau: int
    b1_z2: int
    h2_z2: int
    cover_tau: int
    cover_b1_z2_bound: int
    lines: tuple[ChainLine, ...]
    furuta_lhs: Fraction
    furuta_rhs: int
    scaled_bound: Fraction
    final_bound: int
    holds: bool

    @property
    def chain_consistent(self) -> bool:
        vals = [ln.value for ln in self.lines[1:4]]
        return len(set(vals)) == 1


def replay_theorem3(d: ManifoldDescriptor, w2: Ext2Class) -> Theorem3Replay:
    """Numerically replay the chain behind ``(5/4)|tau| <= dim H^2(X;Z2) - 2``."""
    if d.tau == 0:
        raise NotApplicable("Theorem 3 needs non-zero signature")
    plan = spin_cover_plan(d, w2)
    dims = derive(d)
    m, e, b1, b2 = plan.degree, dims.e, dims.b1_z2, dims.h2_z2
    cover_b1 = lemma4_bound(b1, m)
    lines = (
        ChainLine("identity", "b2(X~;Z2)", "m*e(X) - 2 + 2*b1(X~;Z2)", None),
        ChainLine("lemma4", "b2(X~;Z2)", "m*e(X) - 2 + 2*(m*b1(X;Z2) - m + 1)",
                  m * e - 2 + 2 * cover_b1),
        ChainLine("expand", "b2(X~;Z2)", "m*(2 + b2(X;Z2) - 2*b1(X;Z2)) + 2*(m*b1(X;Z2) - m)",
                  m * (2 + b2 - 2 * b1) + 2 * (m * b1 - m)),
        ChainLine("collapse", "b2(X~;Z2)", "m*b2(X;Z2)", m * b2),
        ChainLine("integral", "b2(X~)", "m*b2(X;Z2)  (b2(X~) <= b2(X~;Z2))", m * b2),
    )
    cover_tau = m * d.tau
    furuta_lhs = FIVE_FOURTHS * abs(cover_tau)
    furuta_rhs = m * b2 - 2
    scaled = Fraction(b2) - Fraction(2, m)
    holds = FIVE_FOURTHS * abs(d.tau) <= scaled
    return Theorem3Replay(
        m=m, e=e, tau=d.tau, b1_z2=b1, h2_z2=b2,
        cover_tau=cover_tau, cover_b1_z2_bound=cover_b1, lines=lines,
        furuta_lhs=furuta_lhs, furuta_rhs=furuta_rhs,
        scaled_bound=scaled, final_bound=b2 - 2, holds=holds,
    )


def replay_agrees_with_checker(d: ManifoldDescriptor, w2: Ext2Class) -> bool:
    return replay_theorem3(d, w2).holds == check_theorem3_even(d).holds
