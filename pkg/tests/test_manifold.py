from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from evenfour.manifold import (
    DescriptorError,
    ManifoldDescriptor as MD,
    check_conjecture_54,
    check_corollary1,
    check_corollary2,
    check_corollary3,
    check_corollary4,
    check_remark3_118,
    check_theorem3_abelian_cover,
    check_theorem3_even,
    check_theorem4_amenable,
    check_theorem5_l2,
    derive,
    furuta_predicate,
    furuta_strong_predicate,
    parse_descriptor,
    run_all_checks,
    validate,
)

K3 = MD(b1=0, b2=22, tau=-16, even=True, spin=True)


def rules(d):
    return {v.rule for v in validate(d)}


# -------------------------------------------------------------- derive

def test_derive_examples():
    dd = derive(MD(0, 22, 0))
    assert (dd.e, dd.t, dd.h2_z2) == (24, 0, 22)
    dd = derive(MD(0, 0, 0, torsion=(2,)))
    assert (dd.e, dd.t, dd.h2_z2) == (2, 1, 2)
    dd = derive(MD(1, 0, 0))
    assert (dd.e, dd.h2_z2) == (0, 0)


def test_derive_rejects_invalid():
    with pytest.raises(DescriptorError):
        derive(MD(0, 2, 4))


# -------------------------------------------------------------- validate

def test_validate_examples():
    assert "even_indefinite" in rules(MD(0, 8, -8, even=True, spin=True))
    assert "even_no_2torsion_spin" in rules(MD(0, 22, -16, even=True))
    assert "spin_implies_even" in rules(MD(0, 2, 0, spin=True))
    assert validate(K3) == []


def test_validate_other_rules():
    assert "signature_bound" in rules(MD(0, 2, 4))
    assert "nonnegative_betti" in rules(MD(-1, 2, 0))
    assert "torsion_canonical" in rules(MD(0, 2, 0, torsion=(4, 2)))
    assert "even_unimodular" in rules(MD(0, 12, -4, even=True, spin=True))
    assert "l2_nonnegative" in rules(MD(4, 2, 0, b1_l2=1, pi1_infinite=True))
    assert "hyperbolic_l2" in rules(MD(0, 2, 0, flags={"hyperbolic"}, b1_l2=1))


def test_violation_carries_citation():
    (v,) = validate(MD(0, 2, 0, spin=True))
    assert v.citation and v.rule in str(v)


def test_parse_descriptor():
    d = parse_descriptor({"b1": 1, "b2": 12, "tau": -8, "torsion": [2], "even": True,
                          "flags": ["amenable"], "b1_l2": "1/2"})
    assert d.b1_l2 == Fraction(1, 2) and d.amenable
    assert parse_descriptor(d.to_json()) == d
    for bad in ({"b1": 0, "b2": 0}, {"b1": 0, "b2": 0, "tau": 0, "junk": 1},
                {"b1": 0, "b2": 0, "tau": 0, "flags": ["weird"]},
                {"b1": True, "b2": 0, "tau": 0}, [1, 2]):
        with pytest.raises(ValueError):
            parse_descriptor(bad)


# -------------------------------------------------------------- checkers

def test_conjecture_54():
    v = check_conjecture_54(MD(0, 22, -16, even=True, spin=True))
    assert v.holds and v.slack == 2
    v = check_conjecture_54(MD(0, 10, -8, even=True, spin=True))
    assert v.holds and v.slack == 0
    assert check_conjecture_54(MD(0, 2, 0, even=True, spin=True)).holds
    assert not check_conjecture_54(MD(0, 2, 0)).applicable


def test_theorem3_even():
    v = check_theorem3_even(MD(0, 10, -8, even=True, spin=True))
    assert v.holds is False and v.slack == -2 and "no such manifold" in v.note
    v = check_theorem3_even(MD(0, 12, -8, torsion=(2,), even=True))
    assert v.holds and v.slack == 2
    v = check_theorem3_even(K3)
    assert v.holds and v.slack == 0
    assert not check_theorem3_even(MD(0, 2, 0, even=True, spin=True)).applicable


def test_theorem3_abelian_cover():
    v = check_theorem3_abelian_cover(MD(0, 10, -8, even=True, spin=True), True)
    assert v.holds is False and v.slack == 0
    v = check_theorem3_abelian_cover(MD(0, 12, -8, even=True, spin=True), True)
    assert v.holds and v.slack == 2
    assert not check_theorem3_abelian_cover(MD(0, 2, 0, even=True, spin=True), True).applicable
    assert not check_theorem3_abelian_cover(K3, False).applicable


def test_theorem4_amenable():
    v = check_theorem4_amenable(MD(1, 12, -8, even=True, spin=True, flags={"amenable"}))
    assert v.holds and v.slack == 2
    v = check_theorem4_amenable(MD(3, 10, -8, even=True, spin=True, flags={"amenable"}))
    assert v.holds is False and v.slack == -4
    v = check_theorem4_amenable(MD(0, 2, 0, even=True, spin=True, flags={"finite"}))
    assert v.holds
    assert not check_theorem4_amenable(K3).applicable
    # a finite even cover is enough
    v = check_theorem4_amenable(MD(0, 3, 1, flags={"not_large"}), cover_is_even=True)
    assert v.applicable and v.slack == Fraction(15, 4)


def test_remark3():
    v = check_remark3_118(MD(1, 12, -8, even=True, spin=True, flags={"amenable"}))
    assert v.holds and v.slack == 1 and v.conditional
    v = check_remark3_118(MD(1, 11, -8, flags={"amenable"}), cover_is_even=True)
    assert v.holds and v.slack == 0
    v = check_remark3_118(MD(0, 2, 0, even=True, spin=True, flags={"abelian"}))
    assert v.holds


def test_theorem5_l2():
    base = dict(even=True, spin=True, flags={"residually_finite"}, pi1_infinite=True)
    v = check_theorem5_l2(MD(1, 12, -8, b1_l2=0, **base))
    assert v.holds and v.slack == 2
    # S^2 x surface of genus 2
    d = MD(4, 2, 0, b1_l2=2, **base)
    dd = derive(d)
    assert (dd.e, d.tau, dd.b2_l2) == (-4, 0, 0)
    v = check_theorem5_l2(d)
    assert v.holds and v.slack == 0
    assert not check_theorem5_l2(MD(1, 12, -8, **base)).applicable


@pytest.mark.parametrize("b1,b2,tau", [(1, 12, -8), (2, 26, 16), (3, 10, 0)])
def test_theorem5_reduces_to_conjecture(b1, b2, tau):
    d = MD(b1, b2, tau, even=True, spin=True, flags={"residually_finite"},
           b1_l2=b1 - 1, pi1_infinite=True)
    assert check_theorem5_l2(d).slack == check_conjecture_54(d).slack


def test_corollary1():
    v = check_corollary1(MD(0, 12, -8, torsion=(2,), even=True))
    assert v.holds
    v = check_corollary1(K3)
    assert v.holds and "spin" in v.note
    assert not check_corollary1(MD(0, 12, -8, torsion=(2, 2), even=True)).applicable


def test_corollaries_2_to_4():
    d = MD(0, 12, -8, torsion=(2,), even=True, flags={"finite"})
    assert check_corollary2(d).holds
    assert not check_corollary2(K3).applicable
    h = MD(1, 12, -8, even=True, spin=True, flags={"hyperbolic"}, b1_l2=0)
    assert check_corollary3(h).holds and check_theorem5_l2(h).holds
    x = MD(1, 12, -8, even=True, spin=True, flags={"extension_over_amenable_positive_b1"})
    assert check_corollary4(x).slack == 2
    assert not check_corollary4(K3).applicable


def test_run_all_checks_k3():
    vs = run_all_checks(K3)
    applicable = [v for v in vs if v.applicable]
    assert all(v.holds for v in applicable)
    assert {v.name for v in applicable} >= {"conjecture_54", "theorem3_even"}


def test_furuta_predicates():
    assert furuta_predicate(K3) and furuta_strong_predicate(K3)
    d = MD(0, 20, -16, even=True, spin=True)
    assert furuta_predicate(d) and not furuta_strong_predicate(d)


# -------------------------------------------------------------- properties

@st.composite
def descriptors(draw):
    b1 = draw(st.integers(0, 6))
    exps = sorted(draw(st.lists(st.integers(0, 4), max_size=3)))
    odd = draw(st.sampled_from([1, 1, 3, 5]))
    torsion = []
    for e in exps:
        torsion.append(2 ** e * odd)
    torsion = [x for x in torsion if x > 1]
    # keep the chain canonical
    assume(all(b % a == 0 for a, b in zip(torsion, torsion[1:])))
    even = draw(st.booleans())
    if even:
        p = draw(st.integers(-3, 3))
        q = draw(st.integers(1, 8))
        b2, tau = 8 * abs(p) + 2 * q, -8 * p
        t = sum(1 for x in torsion if x % 2 == 0)
        spin = True if t == 0 else draw(st.booleans())
    else:
        b2 = draw(st.integers(0, 30))
        tau = draw(st.integers(-b2, b2))
        spin = False
    return MD(b1, b2, tau, tuple(torsion), even, spin)


@settings(max_examples=300, deadline=None)
@given(descriptors(), st.integers(0, 5), st.integers(0, 10), st.integers(-10, 10))
def test_derived_identities(d, db1, db2, dtau):
    assert validate(d) == []
    dd = derive(d)
    t = sum(1 for x in d.torsion if x % 2 == 0)
    assert dd.e == 2 - 2 * d.b1 + d.b2
    assert dd.t == t
    assert dd.h2_z2 == d.b2 + 2 * t
    assert dd.b1_z2 == d.b1 + t
    assert dd.h2_z2 == dd.e - 2 + 2 * dd.b1_z2
    b2 = d.b2 + db2
    other = MD(d.b1 + db1, b2, max(-b2, min(b2, d.tau + dtau)), d.torsion)
    assert derive(other).h2_z2 - other.b2 == dd.h2_z2 - d.b2
    if d.even:
        assert dd.h2_z2 % 2 == 0


@settings(max_examples=300, deadline=None)
@given(descriptors())
def test_checker_invariants(d):
    for v in run_all_checks(d):
        assert (v.holds is None) == (not v.applicable)
        if v.applicable:
            assert isinstance(v.slack, Fraction)
    if d.even and d.tau:
        dd = derive(d)
        v = check_theorem3_even(d)
        p, q = -d.tau // 8, (d.b2 - abs(d.tau)) // 2
        if abs(p) <= q and dd.t >= 1:
            assert v.holds
        if dd.t == 0:
            assert v.holds == furuta_strong_predicate(d)
