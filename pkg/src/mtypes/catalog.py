"""Small named examples shared by tests, scripts and the bundled documents."""
from __future__ import annotations

from .coalgebra import Coalgebra
from .presheaf import FiniteCategory, Presheaf, PresheafMorphism, poset_category, trivial_category
from .sheaf import Site
from .signature import Signature


def sig1() -> Signature:
    """Binary trees with leaves."""
    return Signature.of({"leaf": [], "node": ["L", "R"]})


def sig2() -> Signature:
    """Binary streams."""
    return Signature.of({"out0": ["tl"], "out1": ["tl"]})


def c1() -> Coalgebra:
    """One state ``s`` with ``s = node(s, s)``."""
    return Coalgebra.build(sig1(), {"s": ("node", {"L": "s", "R": "s"})})


def c2() -> Coalgebra:
    """Two states ``u = node(v, u)``, ``v = node(u, v)``: bisimilar to ``c1``."""
    return Coalgebra.build(sig1(), {"u": ("node", {"L": "v", "R": "u"}), "v": ("node", {"L": "u", "R": "v"})})


def interval_category() -> FiniteCategory:
    """Two objects ``D -> C`` joined by one arrow ``u``."""
    return poset_category(["D", "C"], [("D", "C")], {("D", "C"): "u"})


def interval_map() -> PresheafMorphism:
    """``B -> A`` over the interval: a binary node and a leaf at each object,
    with a single position at ``D`` that ``C``'s node sees along ``u``."""
    cat = interval_category()
    A = Presheaf(cat, {"C": ("n", "l"), "D": ("n", "l")}, {"u": {"n": "n", "l": "l"}})
    B = Presheaf(cat, {"C": ("L", "R"), "D": ("P",)}, {"u": {"L": "P", "R": "P"}})
    return PresheafMorphism(B, A, {"C": {"L": "n", "R": "n"}, "D": {"P": "n"}})


_DISJOINT_NAMES = {("V1", "U"): "i1", ("V2", "U"): "i2", ("0", "V1"): "z1", ("0", "V2"): "z2", ("0", "U"): "zu"}


def disjoint_site() -> Site:
    """``U`` covered by ``V1`` and ``V2`` meeting in the initial object ``0``,
    which is covered by the empty family."""
    cat = poset_category(["0", "V1", "V2", "U"], [("0", "V1"), ("0", "V2"), ("V1", "U"), ("V2", "U")], _DISJOINT_NAMES)
    return Site.build(cat, {"U": [["i1", "i2"]], "0": [[]]})


def disjoint_map(site: Site | None = None) -> PresheafMorphism:
    """Binary trees over each of ``V1`` and ``V2``; over ``U`` a pair of them.

    Every shape also has a position along the arrow into ``0``, where the
    only tree is the unary stream on ``*``.
    """
    site = site or disjoint_site()
    cat = site.category
    au = tuple((x, y) for x in "ln" for y in "ln")
    A = Presheaf(cat, {"0": ("*",), "V1": ("l", "n"), "V2": ("l", "n"), "U": au}, {
        "i1": {p: p[0] for p in au}, "i2": {p: p[1] for p in au},
        "z1": {"l": "*", "n": "*"}, "z2": {"l": "*", "n": "*"}, "zu": {p: "*" for p in au},
    })
    bu = tuple((x, y) for x in "LR" for y in "LR")
    B = Presheaf(cat, {"0": ("*",), "V1": ("L", "R"), "V2": ("L", "R"), "U": bu}, {
        "i1": {p: p[0] for p in bu}, "i2": {p: p[1] for p in bu},
        "z1": {"L": "*", "R": "*"}, "z2": {"L": "*", "R": "*"}, "zu": {p: "*" for p in bu},
    })
    return PresheafMorphism(B, A, {
        "0": {"*": "*"}, "V1": {"L": "n", "R": "n"}, "V2": {"L": "n", "R": "n"}, "U": {p: ("n", "n") for p in bu},
    })


_DIAMOND_NAMES = {("V1", "U"): "i1", ("V2", "U"): "i2", ("W", "V1"): "w1", ("W", "V2"): "w2", ("W", "U"): "wu"}


def diamond_site() -> Site:
    """``U`` covered by ``V1`` and ``V2`` whose overlap ``W`` is a genuine object."""
    cat = poset_category(["W", "V1", "V2", "U"], [("W", "V1"), ("W", "V2"), ("V1", "U"), ("V2", "U")], _DIAMOND_NAMES)
    return Site.build(cat, {"U": [["i1", "i2"]]})


def diamond_map(site: Site | None = None) -> PresheafMorphism:
    """Over ``W`` binary trees; over ``V_i`` a second binary node ``m`` (with
    positions ``L'``, ``R'``) that looks like ``n`` on the overlap."""
    site = site or diamond_site()
    cat = site.category
    a_to_w = {"l": "l", "n": "n", "m": "n"}
    b_to_w = {"L": "L", "R": "R", "L'": "L", "R'": "R"}
    au = tuple((x, y) for x in a_to_w for y in a_to_w if a_to_w[x] == a_to_w[y])
    bu = tuple((x, y) for x in b_to_w for y in b_to_w if b_to_w[x] == b_to_w[y])
    A = Presheaf(cat, {"W": ("l", "n"), "V1": tuple(a_to_w), "V2": tuple(a_to_w), "U": au}, {
        "w1": a_to_w, "w2": a_to_w, "wu": {p: a_to_w[p[0]] for p in au},
        "i1": {p: p[0] for p in au}, "i2": {p: p[1] for p in au},
    })
    B = Presheaf(cat, {"W": ("L", "R"), "V1": tuple(b_to_w), "V2": tuple(b_to_w), "U": bu}, {
        "w1": b_to_w, "w2": b_to_w, "wu": {p: b_to_w[p[0]] for p in bu},
        "i1": {p: p[0] for p in bu}, "i2": {p: p[1] for p in bu},
    })
    fv = {"L": "n", "R": "n", "L'": "m", "R'": "m"}
    return PresheafMorphism(B, A, {
        "W": {"L": "n", "R": "n"}, "V1": fv, "V2": fv, "U": {(x, y): (fv[x], fv[y]) for x, y in bu},
    })


def trivial_site(obj="*") -> Site:
    return Site.build(trivial_category(obj), {})
