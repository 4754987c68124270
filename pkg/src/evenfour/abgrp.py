"""Finitely generated abelian groups and their Z/2 functors.

Groups are kept in invariant-factor form ``Z^k + Z/d_1 + ... + Z/d_s`` with
``d_1 | d_2 | ... | d_s``. Ext(-; Z/2) and characters into cyclic 2-groups
are written in the coordinates of that decomposition: one slot per torsion
coefficient, and Ext bits only on the slots with even ``d_i``.

Two independent routes compute the same thing here. :func:`lemma2_character`
is the closed form for a character whose induced Ext map hits a prescribed
class; :func:`ext_induced_oracle` gets the induced map by lifting a character
through the presentation resolutions and reading off cokernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from .intalg import IntegerMatrix, smith_normal_form


class GroupError(ValueError):
    """Malformed group data."""


class IllDefinedCharacter(ValueError):
    """Coefficients that do not respect the torsion relations."""


def v2(n: int) -> int:
    """2-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("v2(0) is undefined")
    n = abs(n)
    return (n & -n).bit_length() - 1


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class FGAbelianGroup:
    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "torsion", tuple(self.torsion))
        if self.free_rank < 0:
            raise GroupError("free rank must be nonnegative")
        for d in self.torsion:
            if d < 2:
                raise GroupError(f"torsion coefficients must be >= 2, got {d}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise GroupError(f"torsion coefficients {a}, {b} break the divisibility chain")

    @classmethod
    def from_orders(cls, orders: Sequence[int], free_rank: int = 0) -> FGAbelianGroup:
        """Canonical form of ``Z^free_rank + sum Z/n`` for arbitrary orders ``n``."""
        orders = [n for n in orders if n != 1]
        if not orders:
            return cls(free_rank, ())
        G = from_presentation(IntegerMatrix.diagonal(orders))
        return cls(free_rank + G.free_rank, G.torsion)

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    @property
    def even_slots(self) -> tuple[int, ...]:
        """Indices of torsion slots whose coefficient is even."""
        return tuple(i for i, d in enumerate(self.torsion) if d % 2 == 0)

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def parse_group(obj) -> FGAbelianGroup:
    """Parse ``{"free_rank": k, "torsion": [d1, ...]}``; the chain is validated."""
    if not isinstance(obj, dict):
        raise GroupError("group literal must be an object")
    unknown = set(obj) - {"free_rank", "torsion"}
    if unknown:
        raise GroupError(f"unknown group keys: {sorted(unknown)}")
    k = obj.get("free_rank", 0)
    tors = obj.get("torsion", [])
    if not isinstance(k, int) or not isinstance(tors, list) or not all(
        isinstance(d, int) for d in tors
    ):
        raise GroupError("free_rank must be an int and torsion a list of ints")
    return FGAbelianGroup(k, tuple(tors))


def from_presentation(relations: IntegerMatrix) -> FGAbelianGroup:
    """Group with one generator per column and one relation per row."""
    if relations.rows == 0 or relations.cols == 0:
        return FGAbelianGroup(relations.cols, ())
    snf = smith_normal_form(relations)
    diag = snf.invariant_factors
    rank = sum(1 for d in diag if d)
    return FGAbelianGroup(relations.cols - rank, tuple(d for d in diag if d > 1))


@dataclass(frozen=True)
class TwoPrimaryData:
    exponents: tuple[int, ...]

    @property
    def mu(self) -> int:
        return max(self.exponents, default=0)

    @property
    def t(self) -> int:
        return len(self.exponents)

    @property
    def exponent(self) -> int:
        """Exponent ``2^mu`` of the 2-primary part."""
        return 2 ** self.mu


def two_primary(G: FGAbelianGroup) -> TwoPrimaryData:
    return TwoPrimaryData(tuple(sorted(v2(d) for d in G.torsion if d % 2 == 0)))


def ext_z2_dim(G: FGAbelianGroup) -> int:
    """dim Ext(G; Z/2): one copy of Z/2 per even-order cyclic factor."""
    return len(G.even_slots)


@dataclass(frozen=True)
class Ext2Class:
    """Element of Ext(G; Z/2) as bits over the even torsion slots of G."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", tuple(self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise GroupError(f"Ext class bits must be 0 or 1, got {self.bits}")

    @classmethod
    def zero(cls, t: int) -> Ext2Class:
        return cls((0,) * t)

    def is_zero(self) -> bool:
        return not any(self.bits)

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class Character:
    """Homomorphism ``G -> Z/2^target_exponent``.

    ``coeffs`` are the images of the torsion generators and ``free_coeffs``
    the images of the free generators, as raw integers. Well-definedness is
    a separate check (:meth:`is_well_defined`), not enforced here.
    """

    group: FGAbelianGroup
    target_exponent: int
    coeffs: tuple[int, ...]
    free_coeffs: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        fc = tuple(self.free_coeffs) or (0,) * self.group.free_rank
        object.__setattr__(self, "free_coeffs", fc)
        if self.target_exponent < 0:
            raise GroupError("target exponent must be nonnegative")
        if len(self.coeffs) != len(self.group.torsion):
            raise GroupError(
                f"{len(self.coeffs)} torsion coefficients for {len(self.group.torsion)} slots"
            )
        if len(self.free_coeffs) != self.group.free_rank:
            raise GroupError("free coefficient count does not match free rank")

    @property
    def modulus(self) -> int:
        return 2 ** self.target_exponent

    def is_well_defined(self) -> bool:
        n = self.modulus
        return all((d * a) % n == 0 for d, a in zip(self.group.torsion, self.coeffs))

    def __call__(self, torsion_part: Sequence[int], free_part: Sequence[int] = ()) -> int:
        free_part = tuple(free_part) or (0,) * self.group.free_rank
        s = sum(a * x for a, x in zip(self.coeffs, torsion_part))
        s += sum(a * x for a, x in zip(self.free_coeffs, free_part))
        return s % self.modulus

    def to_json(self) -> dict:
        return {
            "target_exponent": self.target_exponent,
            "coeffs": list(self.coeffs),
            "free_coeffs": list(self.free_coeffs),
        }


def lemma2_character(G: FGAbelianGroup, w: Ext2Class) -> Character:
    """Character ``G -> Z/2^mu`` whose induced Ext map sends 1 to ``w``.

    ``mu`` is the exponent of the 2-primary part; the coefficient on the even
    slot with 2-exponent ``mu_i`` is ``2^(mu - mu_i) * w_i``. Odd slots and
    free generators map to zero.
    """
    slots = G.even_slots
    if len(w) != len(slots):
        raise GroupError(f"Ext class has {len(w)} bits but G has {len(slots)} even slots")
    mu = two_primary(G).mu
    coeffs = [0] * len(G.torsion)
    for bit, i in zip(w.bits, slots):
        coeffs[i] = 2 ** (mu - v2(G.torsion[i])) * bit
    return Character(G, mu, tuple(coeffs))


def character_image_exponent(f: Character) -> int:
    """``nu`` such that the image of ``f`` is the cyclic subgroup of order ``2^nu``."""
    n = f.modulus
    g = n
    for a in f.coeffs + f.free_coeffs:
        g = gcd(g, a)
    return v2(n // g)


def restrict_to_image(f: Character) -> Character:
    """Corestrict ``f`` onto its image ``Z/2^nu``, making it surjective.

    The image is generated by ``2^(mu - nu)``; dividing every coefficient by
    that generator gives the surjection.
    """
    if not f.is_well_defined():
        raise IllDefinedCharacter("cannot restrict an ill-defined character")
    nu = character_image_exponent(f)
    step = 2 ** (f.target_exponent - nu)
    reduce = lambda a: (a % f.modulus) // step  # noqa: E731
    return Character(
        f.group, nu,
        tuple(reduce(a) for a in f.coeffs),
        tuple(reduce(a) for a in f.free_coeffs),
    )


def compose(h: Character, f: Character) -> Character:
    """``h o f`` for ``f: G -> Z/2^nu`` and ``h: Z/2^nu -> Z/2^kappa``."""
    if h.group != cyclic_group(f.modulus):
        raise GroupError("h must be defined on the codomain of f")
    c = h.coeffs[0] if h.coeffs else 0
    m = h.modulus
    return Character(
        f.group, h.target_exponent,
        tuple((c * a) % m for a in f.coeffs),
        tuple((c * a) % m for a in f.free_coeffs),
    )


def cyclic_group(n: int) -> FGAbelianGroup:
    return FGAbelianGroup(0, (n,)) if n > 1 else FGAbelianGroup()


def identity_character(nu: int) -> Character:
    G = cyclic_group(2 ** nu)
    return Character(G, nu, (1,) if nu else ())


@dataclass(frozen=True)
class InducedExtMap:
    """``Ext(f; Z/2): Ext(Z/2^nu; Z/2) -> Ext(G; Z/2)``.

    ``source_dim`` is 1 when ``nu >= 1`` and 0 for the trivial target. When
    the source is nonzero, ``image_of_generator`` is the image of its
    nonzero element in Ext(G; Z/2) coordinates.
    """

    source_dim: int
    image_of_generator: tuple[int, ...]
    f2_row: tuple[int, ...]

    def __call__(self, x: int) -> tuple[int, ...]:
        if self.source_dim == 0 or x % 2 == 0:
            return (0,) * len(self.image_of_generator)
        return self.image_of_generator

    def is_zero(self) -> bool:
        return not any(self.image_of_generator)


def _presentation_map(G: FGAbelianGroup) -> IntegerMatrix:
    # iota: Z^s -> Z^(s + k), e_i -> d_i e_i; free generators carry no relation
    s, k = len(G.torsion), G.free_rank
    rows = [[0] * s for _ in range(s + k)]
    for i, d in enumerate(G.torsion):
        rows[i][i] = d
    return IntegerMatrix.from_rows(rows, s)


def _z2_cokernel_coords(iota: IntegerMatrix) -> list[int]:
    """Coordinates of Hom(Z^s, Z/2) surviving modulo the image of ``iota^*``.

    ``iota`` is diagonal in our presentation, so ``iota^*`` acts on Hom(Z^s, Z/2)
    coordinatewise; a coordinate survives when that diagonal entry is even.
    """
    if not iota.is_diagonal():
        raise ValueError("expected a diagonal presentation map")
    return [i for i in range(iota.cols) if iota[i, i] % 2 == 0]


def ext_induced_oracle(f: Character) -> InducedExtMap:
    """Compute Ext(f; Z/2) by lifting ``f`` through the standard resolutions.

    Source: ``0 -> Z^s --iota--> Z^(s+k) -> G -> 0``. Target:
    ``0 -> Z --j--> Z -> Z/2^nu -> 0`` with ``j = 2^nu``. The lift on
    generators is ``f1`` (the raw coefficients); the lift on relations is the
    unique ``f2`` with ``j f2 = f1 iota``. Applying Hom(-, Z/2) and passing to
    cokernels of ``iota^*`` and ``j^*`` gives the induced map.
    """
    G = f.group
    iota = _presentation_map(G)
    f1 = IntegerMatrix.from_rows([list(f.coeffs) + list(f.free_coeffs)])
    f1_iota = f1 @ iota
    j = f.modulus
    f2 = []
    for x in f1_iota.entries:
        if x % j:
            raise IllDefinedCharacter(
                f"coefficient row {f.coeffs} does not lift: {x} not divisible by {j}"
            )
        f2.append(x // j)
    # j^* is multiplication by 2^nu on Hom(Z, Z/2): zero iff nu >= 1
    source_dim = 1 if f.target_exponent >= 1 else 0
    slots = _z2_cokernel_coords(iota)
    image = tuple(f2[i] % 2 for i in slots) if source_dim else (0,) * len(slots)
    return InducedExtMap(source_dim, image, tuple(f2))


def hom_count(G: FGAbelianGroup, n: int) -> int:
    """``|Hom(G, Z/n)| = n^free_rank * prod gcd(d_i, n)``."""
    if n < 1:
        raise ValueError("modulus must be >= 1")
    out = n ** G.free_rank
    for d in G.torsion:
        out *= gcd(d, n)
    return out


def _cyclic_hom_images(d: int, n: int) -> set[int]:
    # images of a generator of Z/d (d = 0 for Z) under maps to Z/n
    return {x for x in range(n) if (d * x) % n == 0}


def reduction_onto(G: FGAbelianGroup, big: int = 4, small: int = 2) -> bool:
    """Whether reduction mod ``small`` maps Hom(G, Z/big) onto Hom(G, Z/small)."""
    if big % small:
        raise ValueError("reduction needs small | big")
    for d in (0,) * G.free_rank + G.torsion:
        reduced = {x % small for x in _cyclic_hom_images(d, big)}
        if reduced != _cyclic_hom_images(d, small):
            return False
    return True
