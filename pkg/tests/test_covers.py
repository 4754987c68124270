from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from evenfour.abgrp import Ext2Class, GroupError, two_primary
from evenfour.covers import (
    CoverProfile,
    CoverTransform,
    NotApplicable,
    abelian_reduce_to_2group,
    lemma3_spin_equivalent,
    lemma4_bound,
    lemma4_bound_inductive,
    minimal_spin_degree_cyclic,
    odd_descent,
    replay_agrees_with_checker,
    replay_theorem3,
    spin_cover_plan,
    transform,
)
from evenfour.manifold import ManifoldDescriptor as MD, check_theorem3_even


def even_desc(torsion, b1=0, b2=12, tau=-8):
    return MD(b1, b2, tau, tuple(torsion), even=True)


# -------------------------------------------------------------- transform

def test_transform_identity_and_scaling():
    d = MD(1, 12, -8, even=True, spin=True)
    c = transform(d, CoverTransform(1))
    assert (c.degree, c.e, c.tau) == (1, 12, -8)
    c = transform(d, CoverTransform(3, "odd"))
    assert (c.e, c.tau) == (36, -24)
    assert c.b1_z2_upper is None
    c = transform(d, CoverTransform(4, "cyclic"))
    assert c.b1_z2_upper == lemma4_bound(1, 4)


def test_transform_rejects_bad_structure():
    with pytest.raises(ValueError):
        CoverTransform(4, "odd")
    with pytest.raises(ValueError):
        CoverTransform(6, "cyclic")
    with pytest.raises(ValueError):
        CoverTransform(0)


@pytest.mark.parametrize("m1,m2", list(product(range(1, 17), repeat=2)))
def test_transform_composes(m1, m2):
    d = MD(2, 7, 3)
    two_step = transform(transform(d, CoverTransform(m1)), CoverTransform(m2))
    one_step = transform(d, CoverTransform(m1 * m2))
    assert (two_step.degree, two_step.e, two_step.tau) == (one_step.degree, one_step.e, one_step.tau)


def test_profile_base_keeps_unknowns():
    p = CoverProfile(2, 4, 0, None, None)
    assert transform(p, CoverTransform(2)).even is None


# -------------------------------------------------------------- Lemma 4

def test_lemma4_examples():
    assert lemma4_bound(5, 1) == 5
    assert lemma4_bound(3, 4) == 9
    assert lemma4_bound(1, 2) == 1
    with pytest.raises(NotApplicable):
        lemma4_bound(2, 6)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 50), st.integers(0, 8))
def test_lemma4_inductive_matches_closed_form(b, k):
    m = 2 ** k
    assert lemma4_bound_inductive(b, m) == lemma4_bound(b, m)
    if k:
        assert lemma4_bound(b, m) == 2 * lemma4_bound(b, m // 2) - 1


# -------------------------------------------------------------- descent

def test_odd_descent():
    assert odd_descent(True, False, 3).even is True
    assert odd_descent(True, True, 5).spin is True
    f = odd_descent(False, False, 1)
    assert f.even is None and f.spin is None
    with pytest.raises(NotApplicable):
        odd_descent(True, True, 2)


@pytest.mark.parametrize("m,out", [(12, 4), (8, 8), (1, 1), (9, 1), (40, 8)])
def test_abelian_reduce(m, out):
    assert abelian_reduce_to_2group(m) == out


def test_lemma3_predicate():
    assert not lemma3_spin_equivalent(1)
    assert all(lemma3_spin_equivalent(k) for k in range(2, 8))


# -------------------------------------------------------------- planner

def test_plan_z8_z2():
    # invariant-factor order is (Z/2, Z/8)
    d = even_desc((2, 8))
    plan = spin_cover_plan(d, Ext2Class((0, 1)))
    assert plan.degree == 8
    assert plan.character.coeffs == (0, 1) and plan.character.target_exponent == 3
    assert plan.certificate == (0, 1)
    plan = spin_cover_plan(d, Ext2Class((1, 0)))
    assert plan.degree == 2
    assert plan.character.coeffs == (1, 0) and plan.character.target_exponent == 1


def test_plan_zero_class():
    plan = spin_cover_plan(even_desc((2, 8)), Ext2Class.zero(2))
    assert plan.degree == 1 and plan.already_spin and plan.tower == ()


def test_plan_errors():
    with pytest.raises(NotApplicable):
        spin_cover_plan(MD(0, 2, 0, (2,)), Ext2Class((1,)))
    with pytest.raises(GroupError):
        spin_cover_plan(even_desc((2, 8)), Ext2Class((1,)))


def test_plan_tower_chain():
    plan = spin_cover_plan(even_desc((4, 16)), Ext2Class((1, 1)))
    assert plan.degree == 16 == 2 ** plan.nu
    assert all(s.degree == 2 for s in plan.tower)
    assert [s.subgroup_exponent for s in plan.tower] == [3, 2, 1, 0]
    assert [s.lemma3_applies for s in plan.tower] == [True, True, True, False]


def test_plan_degree_divides_exponent_everywhere():
    for r in range(1, 4):
        for exps in product(range(1, 5), repeat=r):
            if list(exps) != sorted(exps):
                continue
            torsion = tuple(2 ** e for e in exps)
            d = even_desc(torsion)
            exponent = two_primary(d.h1).exponent
            for bits in product((0, 1), repeat=r):
                w = Ext2Class(bits)
                plan = spin_cover_plan(d, w)
                assert exponent % plan.degree == 0
                assert (plan.degree == 1) == w.is_zero()
                assert 2 ** plan.nu == plan.degree


@pytest.mark.parametrize("mu,deg", [(0, 1), (1, 2), (2, 4), (3, 8), (4, 16)])
def test_minimal_spin_degree(mu, deg):
    assert minimal_spin_degree_cyclic(mu) == deg


# -------------------------------------------------------------- replay

def test_replay_z2_example():
    r = replay_theorem3(even_desc((2,)), Ext2Class((1,)))
    assert r.m == 2 and r.h2_z2 == 14 and r.cover_b1_z2_bound == 1
    assert r.chain_consistent
    assert r.lines[3].value == 28
    assert r.furuta_lhs == 20 and r.furuta_rhs == 26
    assert r.final_bound == 12 and r.holds


def test_replay_z4_example():
    r = replay_theorem3(even_desc((4,)), Ext2Class((1,)))
    assert r.m == 4 and r.lines[-1].value == 4 * 14


def test_replay_spin_degenerates_to_furuta():
    d = MD(0, 22, -16, even=True, spin=True)
    r = replay_theorem3(d, Ext2Class(()))
    assert r.m == 1 and r.furuta_rhs == 20 and r.holds
    assert r.holds == check_theorem3_even(d).holds


def test_replay_needs_signature():
    with pytest.raises(NotApplicable):
        replay_theorem3(even_desc((2,), b2=2, tau=0), Ext2Class((1,)))


def test_replay_labels_betti_numbers():
    r = replay_theorem3(even_desc((2,)), Ext2Class((1,)))
    assert r.lines[-1].betti == "b2(X~)"
    assert all(ln.betti == "b2(X~;Z2)" for ln in r.lines[:-1])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 4), st.integers(-3, 3).filter(bool), st.integers(1, 8),
       st.lists(st.integers(1, 4), min_size=1, max_size=3), st.data())
def test_replay_agrees_with_checker(b1, p, q, exps, data):
    torsion = tuple(2 ** e for e in sorted(exps))
    d = even_desc(torsion, b1, 8 * abs(p) + 2 * q, -8 * p)
    bits = data.draw(st.tuples(*[st.integers(0, 1)] * len(torsion)))
    assert replay_agrees_with_checker(d, Ext2Class(bits))
