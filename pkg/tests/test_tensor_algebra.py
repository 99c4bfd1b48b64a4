from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cartierlab.families import en_algebra, en_coproduct, gx_x_sum, h2_algebra
from cartierlab.scalars import HPoly
from cartierlab.tensor_algebra import (
    AlgebraMismatchError,
    NotInvertibleError,
    NotNilpotentError,
    TensorElement,
    apply_morphism_leg,
    embed_legs,
    exp_element,
    flip_op,
    nilpotency_probe,
    permute_legs,
    tensor_commutator,
    tensor_invert,
    tensor_mul,
)
from conftest import int_matrix


@st.composite
def tensors(draw, n: int, arity: int, order: int = 0, max_terms: int = 6):
    alg = en_algebra(n).with_order(order)
    out = TensorElement.zero(alg, arity)
    for _ in range(draw(st.integers(0, max_terms))):
        key = tuple(draw(st.integers(0, alg.dim - 1)) for _ in range(arity))
        coeffs = [draw(st.integers(-3, 3)) for _ in range(order + 1)]
        out = out + TensorElement(alg, arity, {key: HPoly(coeffs, order=order)})
    return out


@st.composite
def invertible(draw, order: int):
    """λ·(g^s ⊗ g^t) times (1 + nilpotent): always a unit."""
    alg = en_algebra(1).with_order(order)
    lam = draw(st.sampled_from([1, -1, 2, -3]))
    g = [alg.one(), alg.element("g")]
    u = TensorElement.outer(g[draw(st.integers(0, 1))], g[draw(st.integers(0, 1))]).scale(lam)
    nil = TensorElement.zero(alg, 2)
    nil_keys = [k for k in itertools.product(range(4), repeat=2) if 1 in k or 3 in k]
    for key in draw(st.lists(st.sampled_from(nil_keys), max_size=4)):
        nil = nil + TensorElement(alg, 2, {key: HPoly.constant(draw(st.integers(-2, 2)), order)})
    if order:
        nil = nil + TensorElement(alg, 2, {(2, 2): HPoly.hbar(order)})
    return u * (TensorElement.unit(alg, 2) + nil)


@given(tensors(1, 2), tensors(1, 2), tensors(1, 2))
def test_associativity_e1_squared(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(tensors(2, 3, max_terms=4), tensors(2, 3, max_terms=4), tensors(2, 3, max_terms=4))
def test_associativity_e2_cubed(a, b, c):
    assert tensor_mul(tensor_mul(a, b), c) == tensor_mul(a, tensor_mul(b, c))


@given(tensors(1, 2), tensors(1, 2))
def test_distributive_and_unit(a, b):
    one = TensorElement.unit(a.algebra, 2)
    assert a * one == a == one * a
    assert (a + b) * a == a * a + b * a


@given(tensors(1, 2), st.permutations([1, 2, 3, 4]), st.sampled_from([(1, 2), (2, 4), (4, 1), (3, 2)]))
def test_embed_then_permute(T, q, p):
    m = 4
    composed = [q[x - 1] for x in p]
    assert permute_legs(embed_legs(T, p, m), q) == embed_legs(T, composed, m)


def test_embed_legs_examples():
    alg = en_algebra(1)
    g, x = alg.element("g"), alg.element("x1")
    T = TensorElement.outer(g, x)
    one = alg.one()
    assert embed_legs(T, (1, 3), 3) == TensorElement.outer(g, one, x)
    assert embed_legs(T, (3, 1), 3) == TensorElement.outer(x, one, g)
    assert flip_op(T) == TensorElement.outer(x, g)
    with pytest.raises(ValueError):
        embed_legs(T, (1, 1), 3)


@pytest.mark.parametrize("order", [0, 2])
@given(data=st.data())
def test_tensor_invert_two_sided(order, data):
    u = data.draw(invertible(order))
    v = tensor_invert(u)
    one = TensorElement.unit(u.algebra, 2)
    assert u * v == one and v * u == one


def test_tensor_invert_singular():
    alg = en_algebra(1)
    p = alg.one() + alg.element("g")
    with pytest.raises(NotInvertibleError):
        tensor_invert(TensorElement.outer(p, alg.one()))


@given(int_matrix(2), int_matrix(2))
def test_exp_homomorphism_on_commuting_pairs(a, b):
    alg = en_algebra(2)
    A, B = gx_x_sum(alg, a), gx_x_sum(alg, b)
    assert tensor_commutator(A, B).is_zero()
    assert exp_element(A + B) == exp_element(A) * exp_element(B)
    assert exp_element(A) * exp_element(-A) == TensorElement.unit(alg, 2)


def test_exp_with_hbar():
    alg = en_algebra(1).with_order(3)
    g = alg.element("g")
    h = TensorElement.outer(g, g).scale(HPoly.hbar(3))
    E = exp_element(h)
    # (g⊗g)^2 = 1, so exp(ħ g⊗g) = cosh ħ + g⊗g sinh ħ to order 3
    expect = TensorElement.unit(alg, 2).scale(HPoly([1, 0, "1/2", 0])) + \
        TensorElement.outer(g, g).scale(HPoly([0, 1, 0, "1/6"]))
    assert E == expect


def test_exp_rejects_non_nilpotent():
    alg = en_algebra(1)
    with pytest.raises(NotNilpotentError):
        exp_element(TensorElement.outer(alg.element("g"), alg.one()))


def test_nilpotency_probe():
    alg = en_algebra(2)
    X = gx_x_sum(alg, [[1, 1], [1, 1]])
    assert nilpotency_probe(X)
    assert not nilpotency_probe(alg.one(2))


def test_algebra_mismatch():
    a = en_algebra(1).one(2)
    b = h2_algebra().one(2)
    with pytest.raises(AlgebraMismatchError):
        a * b


@pytest.mark.parametrize("n", [1, 2])
def test_structure_constants_exhaustive(n):
    alg = en_algebra(n)
    assert alg.dim == 2 ** (n + 1)
    assert alg.check_associativity() == []
    assert alg.check_unit() == []


def test_apply_morphism_leg():
    alg = en_algebra(1)
    delta = en_coproduct(alg, 1)
    g, x = alg.element("g"), alg.element("x1")
    T = TensorElement.outer(x, g)
    assert apply_morphism_leg(T, 2, delta) == TensorElement.outer(x, g, g)
    assert apply_morphism_leg(T, 1, delta) == TensorElement.outer(x, alg.one(), g) + TensorElement.outer(g, x, g)
    with pytest.raises(ValueError):
        apply_morphism_leg(T, 3, delta)


def test_hbar_coefficient_and_degree0():
    alg = en_algebra(1).with_order(2)
    g = alg.element("g")
    T = TensorElement.outer(g, g).scale(HPoly([1, 2, 3]))
    assert T.degree0() == TensorElement.outer(g, g)
    assert T.hbar_coefficient(2) == TensorElement.outer(g, g).scale(3)
    assert T.with_order(0).with_order(2) == T.degree0()
