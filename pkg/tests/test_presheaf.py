import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mtypes.catalog import c1, interval_category, interval_map, sig1
from mtypes.coalgebra import Coalgebra, minimize, relabel_tree
from mtypes.presheaf import (
    CategoryError,
    EnumerationLimitError,
    FiniteCategory,
    Presheaf,
    PresheafError,
    PresheafMorphism,
    fibre_presheaf,
    group_category,
    natural_transformations,
    natural_tree,
    poset_category,
    presheaf_apply_pf,
    presheaf_coalgebras,
    presheaf_from_signature,
    restrict_tree,
    root_object,
    set_level_morphism,
    terminal_presheaf,
    trivial_category,
    underlying_map,
    unfold_presheaf_coalgebra,
)
from mtypes.signature import PfElement, apply_functor, transform_element


def brute_natural(S: Presheaf, T: Presheaf) -> list[dict]:
    cat = S.category
    items = S.underlying()
    out = []
    for values in itertools.product(*[T.sections[C] for _, C in items]):
        t = {C: {} for C in cat.objects}
        for (x, C), v in zip(items, values):
            t[C][x] = v
        try:
            PresheafMorphism(S, T, t)
        except PresheafError:
            continue
        out.append(t)
    return out


def chain_category(n: int) -> FiniteCategory:
    objs = [f"c{k}" for k in range(n)]
    return poset_category(objs, [(objs[k], objs[k + 1]) for k in range(n - 1)])


def random_presheaf(rng: random.Random, cat: FiniteCategory, max_sections: int = 3) -> Presheaf:
    """Random presheaf on a chain ``c0 -> c1 -> ...``: choose restrictions
    along the generating arrows and compose."""
    objs = list(cat.objects)
    sections = {C: tuple(f"{C}s{k}" for k in range(rng.randint(1, max_sections))) for C in objs}
    step = {k: {x: rng.choice(sections[objs[k]]) for x in sections[objs[k + 1]]} for k in range(len(objs) - 1)}
    restriction = {}
    for f, (D, C) in cat.arrows.items():
        i, j = objs.index(D), objs.index(C)
        r = {}
        for x in sections[C]:
            y = x
            for k in range(j - 1, i - 1, -1):
                y = step[k][y]
            r[x] = y
        restriction[f] = r
    return Presheaf(cat, sections, restriction)


def random_map(rng: random.Random, cat: FiniteCategory) -> PresheafMorphism:
    """A random natural ``f: B -> A`` between random presheaves on a chain."""
    while True:
        A, B = random_presheaf(rng, cat, 2), random_presheaf(rng, cat, 3)
        maps = list(natural_transformations(B, A))
        if maps:
            return PresheafMorphism(B, A, rng.choice(maps))


# -- categories --------------------------------------------------------------

def test_category_builders():
    assert trivial_category().objects == ("*",)
    cat = interval_category()
    assert cat.hom("D", "C") == ["u"] and cat.compose("u", "id_D") == "u"
    z2 = group_category(["e", "g"], {("e", "e"): "e", ("e", "g"): "g", ("g", "e"): "g", ("g", "g"): "e"}, "e")
    assert z2.compose("g", "g") == "e"


def test_category_missing_composite():
    with pytest.raises(CategoryError, match="not given"):
        FiniteCategory.build(["A", "B", "C"], {"f": ("A", "B"), "g": ("B", "C")})


def test_category_non_universal_pullback():
    # in the chain 0 <= 1 <= 2, choosing 0 as the pullback of 1 -> 2 with itself is not universal
    cat = chain_category(3)
    pbs = dict(cat.pullbacks)
    pbs[("c1_c2", "c1_c2")] = ("c0", "c0_c1", "c0_c1")
    with pytest.raises(CategoryError, match="universal"):
        FiniteCategory(cat.objects, cat.arrows, cat.identities, cat.composition, pbs)


def test_presheaf_functoriality_checked():
    cat = chain_category(3)
    with pytest.raises(PresheafError):
        Presheaf(cat, {"c0": ("a", "b"), "c1": ("x",), "c2": ("y",)},
                 {"c0_c1": {"x": "a"}, "c1_c2": {"y": "x"}, "c0_c2": {"y": "b"}})


def test_presheaf_morphism_naturality_checked():
    cat = interval_category()
    X = Presheaf(cat, {"C": ("p", "q"), "D": ("p", "q")}, {"u": {"p": "p", "q": "q"}})
    Y = Presheaf(cat, {"C": ("p", "q"), "D": ("p", "q")}, {"u": {"p": "q", "q": "p"}})
    with pytest.raises(PresheafError, match="naturality"):
        PresheafMorphism(X, X, {"C": {"p": "p", "q": "q"}, "D": {"p": "q", "q": "p"}})
    assert len(brute_natural(X, Y)) == len(list(natural_transformations(X, Y)))


# -- fibres and the functor ----------------------------------------------------

def test_fibre_presheaf_trivial_is_set_fibre():
    f = presheaf_from_signature(sig1())
    B = fibre_presheaf(f, "node", "*")
    assert B.sections["*"] == (("id_*", ("node", "L")), ("id_*", ("node", "R")))
    assert fibre_presheaf(f, "leaf", "*").sections["*"] == ()


def test_fibre_presheaf_interval():
    f = interval_map()
    B = fibre_presheaf(f, "n", "C")
    assert B.sections["D"] == (("u", "P"),)
    assert B.sections["C"] == (("id_C", "L"), ("id_C", "R"))
    assert B.restrict(("id_C", "L"), "u") == ("u", "P")


def test_fibre_presheaf_empty_source():
    cat = interval_category()
    A = terminal_presheaf(cat)
    B = Presheaf(cat, {}, {})
    f = PresheafMorphism(B, A, {})
    assert all(not xs for xs in fibre_presheaf(f, "*", "C").sections.values())


def test_fibre_presheaf_unknown_section():
    with pytest.raises(PresheafError):
        fibre_presheaf(interval_map(), "zz", "C")


def test_apply_pf_trivial_matches_apply_functor():
    sig = sig1()
    f = presheaf_from_signature(sig)
    X = Presheaf(trivial_category(), {"*": ("x", "y")}, {})
    m = set_level_morphism(sig, f)
    pf = presheaf_apply_pf(f, X).sections["*"]
    assert [PfElement((e.shape, "*"), e.assignment) for e in pf] == [
        transform_element(m, e) for e in apply_functor(sig, ["x", "y"])
    ]


def test_apply_pf_terminal():
    f = interval_map()
    PX = presheaf_apply_pf(f, terminal_presheaf(f.category))
    assert {C: len(xs) for C, xs in PX.sections.items()} == {C: len(xs) for C, xs in f.target.sections.items()}


def test_apply_pf_matches_brute_force_interval():
    f = interval_map()
    cat = f.category
    X = Presheaf(cat, {"C": ("p", "q", "r"), "D": ("p", "q")}, {"u": {"p": "p", "q": "q", "r": "q"}})
    PX = presheaf_apply_pf(f, X)
    for C in cat.objects:
        expected = sum(len(brute_natural(fibre_presheaf(f, a, C), X)) for a in f.target.sections[C])
        assert len(PX.sections[C]) == expected


def test_enumeration_guard():
    f = interval_map()
    X = Presheaf(f.category, {"C": tuple(range(6)), "D": tuple(range(6))}, {"u": {k: k for k in range(6)}})
    with pytest.raises(EnumerationLimitError):
        presheaf_apply_pf(f, X, guard=10)


@given(st.integers(0, 2**32), st.integers(1, 3))
def test_apply_pf_small_random(seed, n):
    rng = random.Random(seed)
    cat = chain_category(n)
    f = random_map(rng, cat)
    X = random_presheaf(rng, cat, 3)
    PX = presheaf_apply_pf(f, X)  # Presheaf validates functoriality
    for C in cat.objects:
        expected = sum(len(brute_natural(fibre_presheaf(f, a, C), X)) for a in f.target.sections[C])
        assert len(PX.sections[C]) == expected


@given(st.integers(0, 2**32))
def test_natural_transformations_match_brute_force(seed):
    rng = random.Random(seed)
    cat = chain_category(rng.randint(1, 3))
    S, T = random_presheaf(rng, cat, 2), random_presheaf(rng, cat, 3)
    fast = list(natural_transformations(S, T))
    assert sorted(map(repr, fast)) == sorted(map(repr, brute_natural(S, T)))


def test_group_presheaf_apply():
    z2 = group_category(["e", "g"], {("e", "e"): "e", ("e", "g"): "g", ("g", "e"): "g", ("g", "g"): "e"}, "e")
    A = terminal_presheaf(z2)
    B = Presheaf(z2, {"*": ("l", "r")}, {"g": {"l": "r", "r": "l"}})
    f = PresheafMorphism(B, A, {"*": {"l": "*", "r": "*"}})
    X = Presheaf(z2, {"*": ("p", "q", "s")}, {"g": {"p": "q", "q": "p", "s": "s"}})
    PX = presheaf_apply_pf(f, X)
    for C in z2.objects:
        assert len(PX.sections[C]) == len(brute_natural(fibre_presheaf(f, "*", C), X))


# -- underlying map and natural trees ------------------------------------------

def test_underlying_map_examples():
    f = presheaf_from_signature(sig1())
    assert underlying_map(f).shapes == (("leaf", "*"), ("node", "*"))
    g = interval_map()
    cat = g.category
    one = terminal_presheaf(cat)
    assert len(underlying_map(PresheafMorphism(one, one, {C: {"*": "*"} for C in cat.objects})).shapes) == 2
    empty = Presheaf(cat, {}, {})
    assert underlying_map(PresheafMorphism(empty, empty, {})).shapes == ()


def interval_tree(left: str, right: str):
    """A node at C with the given root shapes below L and R."""
    f = interval_map()
    sig = underlying_map(f)
    steps = {
        "r": (("n", "C"), {("u", "P"): "d", ("id_C", "L"): left, ("id_C", "R"): right}),
        "nc": (("n", "C"), {("u", "P"): "ld", ("id_C", "L"): "lc", ("id_C", "R"): "lc"}),
        "lc": (("l", "C"), {}),
        "d": (("n", "D"), {("id_D", "P"): "ld"}),
        "ld": (("l", "D"), {}),
    }
    return f, minimize(Coalgebra.build(sig, steps), "r")


def test_natural_tree_examples():
    f = presheaf_from_signature(sig1())
    c = relabel_tree(set_level_morphism(sig1(), f), minimize(c1(), "s"))
    assert natural_tree(f, c)
    g, bad = interval_tree("lc", "nc")
    assert not natural_tree(g, bad)
    g, good = interval_tree("nc", "nc")
    assert natural_tree(g, good)


def test_natural_tree_rejects_wrong_signature():
    assert not natural_tree(interval_map(), minimize(c1(), "s"))


def test_restrict_tree_examples():
    f, h = interval_tree("nc", "nc")
    assert restrict_tree(f, h, "id_C") == h
    r = restrict_tree(f, h, "u")
    assert r.shape == ("n", "D") and root_object(r) == "D"
    with pytest.raises(Exception):
        restrict_tree(f, interval_tree("lc", "nc")[1], "u")


@given(st.integers(0, 2**32))
def test_trees_from_presheaf_coalgebras_are_natural(seed):
    rng = random.Random(seed)
    cat = chain_category(rng.randint(1, 3))
    f = random_map(rng, cat)
    X = random_presheaf(rng, cat, 2)
    for gamma in itertools.islice(presheaf_coalgebras(f, X, rng=rng), 3):
        c = unfold_presheaf_coalgebra(f, X, gamma)
        for s in c.states:
            h = minimize(c, s)
            assert natural_tree(f, h)
            C = root_object(h)
            # restriction makes natural trees a presheaf
            assert restrict_tree(f, h, cat.identity(C)) == h
            for beta in cat.arrows_into(C):
                for delta in cat.arrows_into(cat.dom(beta)):
                    lhs = restrict_tree(f, restrict_tree(f, h, beta), delta)
                    assert lhs == restrict_tree(f, h, cat.compose(beta, delta))
            # and the unfolding is itself natural in X
            x, C = s
            for beta in cat.arrows_into(C):
                moved = minimize(c, (X.restrict(x, beta), cat.dom(beta)))
                assert restrict_tree(f, h, beta) == moved
