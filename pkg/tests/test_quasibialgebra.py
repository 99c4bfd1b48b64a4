from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cartierlab import families as fam
from cartierlab.precartier import check_qybe
from cartierlab.quasibialgebra import (
    CheckEntry,
    CheckReport,
    QuasiTriangularData,
    check_triangular,
    delta_op,
    gauge_twist,
    verify_quasibialgebra,
    verify_quasitriangular,
)
from cartierlab.tensor_algebra import NotInvertibleError, TensorElement, exp_element, tensor_invert
from conftest import en_specs, int_matrix


@st.composite
def gauges(draw, n: int):
    """exp(Σ c gx_i⊗x_j) · (1⊗g)^e · (g⊗1)^f, invertible by construction."""
    alg = fam.en_algebra(n)
    g, one = alg.element("g"), alg.one()
    F = exp_element(fam.gx_x_sum(alg, draw(int_matrix(n, -2, 2))))
    if draw(st.booleans()):
        F = F * TensorElement.outer(one, g)
    if draw(st.booleans()):
        F = F * TensorElement.outer(g, one)
    return F


@given(st.data())
def test_twist_then_untwist_is_identity(data):
    spec = data.draw(en_specs())
    Q = fam.build_en(spec).qt
    F = data.draw(gauges(spec.n))
    QF = gauge_twist(Q, F)
    back = gauge_twist(QF, tensor_invert(F))
    assert back == Q
    assert back.base.ell == Q.base.ell and back.base.r_elt == Q.base.r_elt


@given(st.data())
def test_twisted_bundles_verify(data):
    spec = data.draw(en_specs())
    QF = gauge_twist(fam.build_en(spec).qt, data.draw(gauges(spec.n)))
    assert verify_quasibialgebra(QF.base).passed
    assert verify_quasitriangular(QF).passed
    assert check_qybe(QF)


def test_twist_needs_invertible():
    alg = fam.en_algebra(1)
    p = alg.one() + alg.element("g")
    with pytest.raises(NotInvertibleError):
        gauge_twist(fam.build_en(fam.EnSpec.zero(1)).qt, TensorElement.outer(p, p))


def test_non_normalized_gauge_corrects_ell_r():
    spec = fam.EnSpec(1, [[2]], [[1]])
    alg = fam.en_algebra(1)
    g = alg.element("g")
    Q = gauge_twist(fam.build_en(spec).qt, TensorElement.outer(g, alg.one()))
    assert Q.base.r_elt == g and Q.base.ell == alg.one()
    assert verify_quasibialgebra(Q.base).passed


def test_report_entries_carry_tags():
    rep = verify_quasitriangular(fam.build_h2("+"))
    assert [e.tag for e in rep.entries] == ["qtqb1", "qtqb2", "qtqb3"]
    assert rep["qtqb2"].name == "hexagon_right_leg"
    assert rep.passed and bool(rep)


def test_corrupted_rmatrix_fails():
    Q = fam.build_en(fam.EnSpec(1, [[1]], [[0]])).qt
    alg = Q.algebra
    bad = QuasiTriangularData(Q.base, Q.rmatrix * TensorElement.outer(alg.element("g"), alg.one()))
    rep = verify_quasitriangular(bad)
    assert not rep.passed
    assert rep.failures()[0].witness is not None


def test_corrupted_reassociator_fails_pentagon():
    Q = fam.build_h2("+")
    alg = Q.algebra
    g = alg.element("g")
    base = dataclasses.replace(Q.base, reassociator=TensorElement.outer(g, alg.one(), alg.one()))
    rep = verify_quasibialgebra(base)
    # H(2) is commutative and g⊗1⊗1 group-like, so only the counit condition sees it
    assert rep["pentagon"].passed
    assert not rep["counit_reassociator"].passed


def test_corrupted_coproduct_fails():
    B = fam.build_en(fam.EnSpec.zero(1)).base
    alg = B.algebra
    bad = fam.en_coproduct(alg, 1, sign=-1)
    images = list(B.coproduct.images)
    images[alg.index("x1")] = bad.images[alg.index("x1")]
    mixed = dataclasses.replace(B.coproduct, images=images)
    rep = verify_quasibialgebra(dataclasses.replace(B, coproduct=mixed))
    assert not rep["coproduct_is_algebra_map"].passed


def test_triangular():
    assert check_triangular(fam.build_en(fam.EnSpec.zero(2)).qt)
    # E(n) is triangular exactly for symmetric a; every 1x1 matrix is symmetric
    assert check_triangular(fam.build_en(fam.EnSpec(1, [[3]], [[0]])).qt)
    assert check_triangular(fam.build_en(fam.EnSpec(2, [[1, 2], [2, 0]], [[0, 0], [0, 0]])).qt)
    assert not check_triangular(fam.build_en(fam.EnSpec(2, [[1, 2], [0, 1]], [[0, 0], [0, 0]])).qt)
    for s in "+-":
        assert not check_triangular(fam.build_h2(s))


def test_delta_op():
    Q = fam.build_en(fam.EnSpec.zero(1)).qt
    alg = Q.algebra
    x, g, one = alg.element("x1"), alg.element("g"), alg.one()
    assert delta_op(Q, x) == TensorElement.outer(one, x) + TensorElement.outer(x, g)


def test_check_entry_contract():
    with pytest.raises(ValueError):
        CheckEntry("x", False)
    assert CheckEntry("x", True, witness="ignored").witness is None
    one = fam.en_algebra(1).one(2)
    rep = CheckReport()
    rep.add("trivial", one, one, tag="t")
    rep.add("broken", one, one.scale(2), tag="u")
    assert not rep.passed and len(rep) == 2
    assert rep["u"].witness == one.scale(-1)
    assert [e.name for e in rep.failures()] == ["broken"]
