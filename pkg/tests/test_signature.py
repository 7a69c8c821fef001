import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mtypes.catalog import sig1, sig2
from mtypes.signature import (
    PfElement,
    Signature,
    SignatureError,
    SignatureMorphism,
    apply_functor,
    apply_on_function,
    functor_cardinality,
    identity_morphism,
    point_inclusion,
    point_signature,
    shape_relabelling,
    transform_element,
    validate_signature,
)

from conftest import signatures


def test_validate_accepts_sig1():
    assert validate_signature(sig1()) == sig1()


def test_duplicate_position_rejected():
    with pytest.raises(SignatureError, match="duplicate position"):
        Signature.of({"a": ["p", "p"]})


def test_duplicate_shape_rejected():
    with pytest.raises(SignatureError, match="duplicate shape"):
        Signature((("a", ()), ("a", ("p",))))


def test_point_with_positions_rejected():
    with pytest.raises(SignatureError, match="no positions"):
        Signature.of({"leaf": [], "node": ["L", "R"]}, point="node")


def test_apply_functor_sig1_two_elements():
    pf = apply_functor(sig1(), ["x", "y"])
    node = sig1().element
    assert pf == [
        node("leaf"),
        node("node", ["x", "x"]),
        node("node", ["x", "y"]),
        node("node", ["y", "x"]),
        node("node", ["y", "y"]),
    ]


def test_apply_functor_empty_carrier_keeps_nullary():
    assert apply_functor(sig1(), []) == [PfElement("leaf")]


def test_apply_functor_unary():
    assert len(apply_functor(Signature.of({"u": ["p"]}), ["x"])) == 1


def test_apply_on_function_examples():
    sig = sig1()
    e = sig.element("node", {"L": "x", "R": "y"})
    assert apply_on_function(sig, {"x": "x", "y": "y"}, e) == e
    assert apply_on_function(sig, {"x": "y", "y": "y"}, e) == sig.element("node", {"L": "y", "R": "y"})


def test_apply_on_function_outside_domain():
    e = sig1().element("node", ["x", "z"])
    with pytest.raises(ValueError, match="outside the domain"):
        apply_on_function(sig1(), {"x": "x"}, e)


def test_point_signature_examples():
    p2 = point_signature(sig2())
    assert len(p2) == 3 and p2.point == "⊥" and p2.positions("⊥") == ()
    p1 = point_signature(sig1())
    assert p1.point not in sig1() and "leaf" in p1
    assert point_signature(Signature(())).shapes == ("⊥",)
    # a fresh name is generated when ⊥ is taken
    assert point_signature(p1).point == "⊥1"


def test_transform_element_collapse():
    src = Signature.of({"nodeA": ["L", "R"], "nodeB": ["L", "R"]})
    m = shape_relabelling(src, sig1(), {"nodeA": "node", "nodeB": "node"})
    e = src.element("nodeA", {"L": "x", "R": "y"})
    assert transform_element(m, e) == sig1().element("node", {"L": "x", "R": "y"})


def test_transform_element_moves_positions_along_bijection():
    src = Signature.of({"n": ["a", "b"]})
    m = SignatureMorphism(src, sig1(), {"n": "node"}, {"n": {"a": "R", "b": "L"}})
    assert transform_element(m, src.element("n", ["x", "y"])) == sig1().element("node", {"L": "y", "R": "x"})


def test_morphism_requires_bijection():
    with pytest.raises(SignatureError, match="bijection"):
        SignatureMorphism(Signature.of({"u": ["p"]}), sig1(), {"u": "node"}, {"u": {"p": "L"}})


def test_transform_unknown_shape():
    with pytest.raises(SignatureError):
        transform_element(identity_morphism(sig1()), PfElement("nope"))


@given(signatures(max_shapes=4, max_arity=3), st.integers(0, 4))
def test_cardinality(sig, n):
    carrier = [f"c{k}" for k in range(n)]
    pf = apply_functor(sig, carrier)
    assert len(pf) == functor_cardinality(sig, n) == sum(n ** sig.arity(a) for a in sig.shapes)
    assert len(set(pf)) == len(pf)


@given(signatures(), st.integers(0, 3), st.integers(0, 2**32))
def test_functor_laws(sig, n, seed):
    rng = random.Random(seed)
    X = [f"x{k}" for k in range(n)]
    Y = [f"y{k}" for k in range(3)]
    Z = [f"z{k}" for k in range(2)]
    f = {x: rng.choice(Y) for x in X}
    g = {y: rng.choice(Z) for y in Y}
    gf = {x: g[f[x]] for x in X}
    for e in apply_functor(sig, X):
        assert apply_on_function(sig, {x: x for x in X}, e) == e
        assert apply_on_function(sig, gf, e) == apply_on_function(sig, g, apply_on_function(sig, f, e))
        assert apply_on_function(sig, f, e).shape == e.shape


@given(signatures(max_shapes=3, max_arity=2), st.integers(0, 2**32))
def test_transform_element_natural(sig, seed):
    rng = random.Random(seed)
    # a random square into a signature with renamed shapes and reversed positions
    target = Signature(tuple((("t", a), tuple(reversed(ps))) for a, ps in sig.arities))
    bij = {a: {p: q for p, q in zip(sig.positions(a), reversed(sig.positions(a)))} for a in sig.shapes}
    m = SignatureMorphism(sig, target, {a: ("t", a) for a in sig.shapes}, bij)
    for n in range(4):
        X = list(range(n))
        phi = {x: rng.randrange(3) for x in X}
        for e in apply_functor(sig, X):
            lhs = transform_element(m, apply_on_function(sig, phi, e))
            rhs = apply_on_function(target, phi, transform_element(m, e))
            assert lhs == rhs
            assert lhs.shape == m(e.shape)


@given(signatures(max_shapes=4, max_arity=3))
def test_point_inclusion_injective(sig):
    inc = point_inclusion(sig)
    validate_signature(inc.target)
    images = [inc(a) for a in sig.shapes]
    assert len(set(images)) == len(images)
    assert inc.target.point not in images
