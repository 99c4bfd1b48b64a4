from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartierlab import cartier_ring as cr
from cartierlab import families as fam
from cartierlab.operators import LinearOperator
from cartierlab.precartier import TrivialAssociatorRequired
from cartierlab.tensor_algebra import TensorElement, embed_legs
from conftest import en_specs

letters = st.builds(lambda k, i: f"{k}{i}", st.sampled_from("bBg"), st.integers(1, 2))
words = st.lists(letters, max_size=4).map(" ".join)


@pytest.fixture(scope="module")
def e1():
    P = fam.build_en(fam.EnSpec(1, [[2]], [[-1]]))
    return P, cr.regular_module(P.algebra)


@settings(max_examples=25)
@given(words, words)
def test_evaluate_word_is_multiplicative(w1, w2):
    P = fam.build_en(fam.EnSpec(1, [[2]], [[-1]]))
    V = cr.regular_module(P.algebra)
    a, b = cr.CartierWord.parse(w1), cr.CartierWord.parse(w2)
    assert cr.evaluate_word(a + b, P, V, 3) == cr.evaluate_word(a, P, V, 3) @ cr.evaluate_word(b, P, V, 3)


def test_word_examples(e1):
    P, V = e1
    ident = LinearOperator.identity(V.dim_v ** 3)
    assert cr.evaluate_word(cr.CartierWord.parse(""), P, V, 3) == ident
    assert cr.evaluate_word(cr.CartierWord.parse("b1 B1"), P, V, 3) == ident
    assert cr.evaluate_word(cr.CartierWord.parse("b1 b2 b1"), P, V, 3) == \
        cr.evaluate_word(cr.CartierWord.parse("b2 b1 b2"), P, V, 3)


def test_word_parse_and_errors(e1):
    P, V = e1
    w = cr.CartierWord.parse("b1  b2 g1 B1")
    assert str(w) == "b1 b2 g1 B1" and w.max_index() == 2
    for bad in ("x1", "b", "b0", "g-1"):
        with pytest.raises(ValueError):
            cr.CartierWord.parse(bad)
    with pytest.raises(cr.OutOfRangeError):
        cr.evaluate_word(cr.CartierWord.parse("b3"), P, V, 3)


@settings(max_examples=15)
@given(en_specs(sizes=(1,)))
def test_braid_group_representation(spec):
    P = fam.build_en(spec)
    rep = cr.check_cartier_ring_relations(P, cr.regular_module(P.algebra), 4)
    assert rep.passed
    assert {e.tag for e in rep.entries} >= {"braid", "distant-beta", "distant-gamma", "distant-mixed", "mixed"}


@settings(max_examples=15)
@given(en_specs())
def test_gamma_matches_tensor_action(spec):
    P = fam.build_en(spec)
    V = cr.regular_module(P.algebra)
    chi12 = embed_legs(P.chi, (1, 2), 3)
    assert cr.rep_gamma(P, V, 1, 3) == cr.tensor_action(chi12, V)
    assert cr.rep_gamma(P, V, 2, 3) == cr.tensor_action(embed_legs(P.chi, (2, 3), 3), V)


def test_beta_is_flip_after_r(e1):
    P, V = e1
    d = V.dim_v
    R_op = TensorElement(P.algebra, 2, {(b, a): c for (a, b), c in P.qt.rmatrix.terms.items()})
    expect = cr.tensor_action(R_op, V) @ cr.flip_operator(d)
    assert cr.rep_beta(P, V, 1, 2) == expect
    assert cr.rep_beta(P, V, 1, 2) @ cr.rep_beta_inv(P, V, 1, 2) == LinearOperator.identity(d * d)


def test_regular_module_is_module():
    for n in (1, 2):
        V = cr.regular_module(fam.en_algebra(n))
        assert V.morphism_failures() == [] and V.is_unital()


def test_module_validation():
    alg = fam.en_algebra(1)
    with pytest.raises(ValueError):
        cr.ModuleRep(alg, 2, [LinearOperator.identity(2)])


def test_trivial_module_rep():
    alg = fam.en_algebra(1)
    # the counit module: g acts by 1, x by 0
    ops = [LinearOperator.identity(1), LinearOperator.zero(1), LinearOperator.identity(1), LinearOperator.zero(1)]
    V = cr.ModuleRep(alg, 1, ops, name="counit")
    assert V.morphism_failures() == []
    P = fam.build_en(fam.EnSpec(1, [[1]], [[2]]))
    assert cr.check_cartier_ring_relations(P, V, 3).passed


def test_zero_chi_presentations_vanish():
    P = fam.build_en(fam.EnSpec(2, [[1, 2], [0, 1]], [[0, 0], [0, 0]]))
    V = cr.regular_module(P.algebra)
    for op in cr.t13_presentations(P, V).values():
        assert op.is_zero()
    assert cr.check_tij_braid_relations(P, V).passed


def test_symmetric_case_presentations_I_III():
    P = fam.build_en(fam.EnSpec(1, [[0]], [[3]]))
    pres = cr.t13_presentations(P, cr.regular_module(P.algebra))
    assert pres["I"] == pres["III"]


def test_presentations_e1(e1):
    P, V = e1
    for rep in (cr.check_t13_presentations(P, V), cr.check_t14_presentations(P, V),
                cr.check_tij_braid_relations(P, V)):
        assert rep.passed
    assert len(cr.check_t14_presentations(P, V)) == 6


def test_corrupted_t13_fails():
    P = fam.build_en(fam.EnSpec(2, [[1, 2], [0, 1]], [[0, 1], [-1, 3]]))
    V = cr.regular_module(P.algebra)
    rho = cr.representation(P, V, 3)
    ops = cr.tij_operators(P, V, 3)
    assert ops["13"] == cr.t13_presentations(P, V)["I"]
    ops["13"] = rho.beta_inv(2) @ rho.gamma(1)
    assert not cr.braid_report_for_operators(ops, 3).passed


def test_corrupted_gamma_fails_mixed(e1):
    P, V = e1
    g = P.algebra.element("g")
    rep = cr.check_cartier_ring_relations(P.with_chi(TensorElement.outer(g, g)), V, 3)
    assert any(e.tag == "mixed" for e in rep.failures())


def test_nontrivial_reassociator_rejected():
    Pt = fam.build_en_twisted(fam.EnSpec(1, [[1]], [[1]]))
    V = cr.regular_module(Pt.algebra)
    with pytest.raises(TrivialAssociatorRequired):
        cr.representation(Pt, V, 3)
    with pytest.raises(TrivialAssociatorRequired):
        cr.check_t13_presentations(Pt, V)


def test_representation_cache(e1):
    P, V = e1
    assert cr.representation(P, V, 3) is cr.representation(P, V, 3)
