import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mtypes.catalog import c1, c2, sig1, sig2
from mtypes.coalgebra import (
    Coalgebra,
    CoalgebraError,
    bisimilar,
    bisimulation_blocks,
    check_coalgebra_morphism,
    coalgebra_morphisms,
    enumerate_paths,
    inverse_step,
    is_minimal,
    is_path,
    lift_path,
    map_path,
    minimize,
    quotient,
    relabel,
    relabel_tree,
    serialize,
)
from mtypes.generators import random_coalgebra, random_signature
from mtypes.signature import Signature, identity_morphism, shape_relabelling
from mtypes.trees import truncate

from conftest import coalgebras


def streams():
    return Coalgebra.build(sig2(), {"z": ("out0", ["z"]), "o": ("out1", ["o"])})


def test_morphism_examples():
    assert check_coalgebra_morphism(c1(), c1(), {"s": "s"})
    assert check_coalgebra_morphism(c2(), c1(), {"u": "s", "v": "s"})
    s = streams()
    assert not check_coalgebra_morphism(s.restrict_to(["z"]), s, {"z": "o"})


def test_morphism_requires_total_function():
    with pytest.raises(CoalgebraError, match="undefined"):
        check_coalgebra_morphism(c2(), c1(), {"u": "s"})


def test_coalgebra_validation():
    with pytest.raises(CoalgebraError, match="unknown state"):
        Coalgebra.build(sig1(), {"s": ("node", ["s", "t"])})


def test_enumerate_paths_examples():
    assert enumerate_paths(c1(), "s", 1) == [("s",)]
    paths = enumerate_paths(c1(), "s", 3)
    assert len(paths) == 7
    assert sum(1 for p in paths if len(p) == 5) == 4
    leaf = Coalgebra.build(sig1(), {"x": ("leaf", [])})
    assert enumerate_paths(leaf, "x", 5) == [("x",)]


def test_enumerate_paths_errors():
    with pytest.raises(CoalgebraError):
        enumerate_paths(c1(), "nope", 2)


def test_lift_path_examples():
    h = {"u": "s", "v": "s"}
    assert lift_path(c2(), c1(), h, ("s",), "u") == ("u",)
    assert lift_path(c2(), c1(), h, ("s", "L", "s"), "u") == ("u", "L", "v")
    assert lift_path(c2(), c1(), h, ("s", "L", "s", "L", "s"), "u") == ("u", "L", "v", "L", "u")


def test_lift_path_precondition():
    with pytest.raises(CoalgebraError, match="unknown state"):
        lift_path(c1(), c1(), {"s": "s"}, ("s",), "t")


def test_bisimilar_examples():
    assert bisimilar(c1(), "s", c1(), "s")
    assert bisimilar(c1(), "s", c2(), "u")
    s = streams()
    assert not bisimilar(s, "z", s, "o")


def test_minimize_examples():
    h = minimize(c2(), "u")
    assert len(h.universe.states) == 1
    assert bisimilar(h.universe, h.state, c1(), "s")
    assert serialize(minimize(c1(), "s").universe) == (sig1(), (("node", (0, 0)),))
    chain = Coalgebra.build(sig1(), {"a": ("node", ["b", "b"]), "b": ("node", ["c", "c"]), "c": ("leaf", [])})
    assert len(minimize(chain, "a").universe.states) == 3


def test_relabel_collapse():
    src = Signature.of({"nodeA": ["L", "R"], "nodeB": ["L", "R"]})
    alt = Coalgebra.build(src, {"p": ("nodeA", ["q", "q"]), "q": ("nodeB", ["p", "p"])})
    m = shape_relabelling(src, sig1(), {"nodeA": "node", "nodeB": "node"})
    assert relabel_tree(m, minimize(alt, "p")) == minimize(c1(), "s")
    assert relabel(identity_morphism(sig1()), c2()) == c2()


def test_tree_handle_equality():
    assert minimize(c1(), "s") == minimize(c2(), "v")
    assert hash(minimize(c1(), "s")) == hash(minimize(c2(), "u"))


@given(coalgebras(max_states=6))
def test_bisimilarity_is_equivalence(c):
    blocks = bisimulation_blocks([c])
    for x, y in itertools.product(c.states, repeat=2):
        assert bisimilar(c, x, c, y) == (blocks[(0, x)] == blocks[(0, y)])
        assert bisimilar(c, x, c, y) == bisimilar(c, y, c, x)


@given(coalgebras(max_states=5))
def test_bisimilar_iff_truncations_agree(c):
    depth = 2 * len(c.states)
    for x, y in itertools.product(c.states, repeat=2):
        same = truncate(minimize(c, x), depth) is truncate(minimize(c, y), depth)
        assert bisimilar(c, x, c, y) == same


@given(coalgebras(max_states=6))
def test_quotient_is_morphism(c):
    universe, h = quotient(c)
    assert check_coalgebra_morphism(c, universe, h)
    assert is_minimal(universe)
    for x in c.states:
        assert bisimilar(c, x, universe, h[x])


@given(coalgebras(max_states=6))
def test_minimize_canonical(c):
    handles = {x: minimize(c, x) for x in c.states}
    for x, y in itertools.product(c.states, repeat=2):
        assert (serialize(handles[x].universe) == serialize(handles[y].universe)) == bisimilar(c, x, c, y)
    for h in handles.values():
        again = minimize(h.universe, h.state)
        assert serialize(again.universe) == serialize(h.universe)


@given(coalgebras(max_states=4))
def test_path_lifting_unique(c):
    universe, h = quotient(c)
    for x in c.states:
        for tau in enumerate_paths(universe, h[x], 4):
            sigma = lift_path(c, universe, h, tau, x)
            assert is_path(c, sigma) and map_path(h, sigma) == tau
            rivals = [p for p in enumerate_paths(c, x, len(tau) // 2 + 1)
                      if len(p) == len(tau) and map_path(h, p) == tau]
            assert rivals == [sigma]


@given(coalgebras(max_states=4))
def test_morphisms_are_functional_bisimulations(c):
    universe, _ = quotient(c)
    for h in itertools.islice(coalgebra_morphisms(c, universe), 3):
        assert all(bisimilar(c, x, universe, h[x]) for x in c.states)


@given(coalgebras(max_states=5))
def test_lambek_on_universe(c):
    universe, _ = quotient(c)
    sup = inverse_step(universe)
    assert all(sup[universe.step[x]] == x for x in universe.states)
    assert all(universe.step[x] == e for e, x in sup.items())


@given(st.integers(0, 2**32))
def test_relabel_preserves_roots(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, 3, 2)
    # collapse shapes of equal arity
    by_arity = {}
    for a, ps in sig.arities:
        by_arity.setdefault(len(ps), a)
    tgt = Signature(tuple((f"n{k}", tuple(f"p{j}" for j in range(k))) for k in sorted(by_arity)))
    m = shape_relabelling(sig, tgt, {a: f"n{sig.arity(a)}" for a in sig.shapes})
    c = random_coalgebra(rng, sig, 4)
    r = relabel(m, c)
    for x in c.states:
        assert r.shape(x) == m(c.shape(x))
        assert relabel_tree(m, minimize(c, x)) == minimize(r, x)
