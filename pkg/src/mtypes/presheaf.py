"""Finite categories, presheaves on them, and polynomial functors on presheaves.

Composition is written ``compose(g, f)`` for ``g ∘ f`` (first ``f``, then
``g``).  A section ``x`` of ``X(C)`` restricts along ``beta: D -> C`` to
``X.restrict(x, beta)`` in ``X(D)``.

Trees for a presheaf map ``f: B -> A`` live over the set-level signature
``underlying_map(f)``: shapes are pairs ``(a, C)`` and the positions of
``(a, C)`` are the pairs ``(beta, b)`` making up the fibre presheaf ``B_a``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

from .coalgebra import Coalgebra, TreeHandle, bisimulation_blocks, minimize
from .signature import PfElement, Signature, SignatureMorphism

Obj = Hashable
Arrow = Hashable

DEFAULT_GUARD = 100_000


class CategoryError(ValueError):
    pass


class PresheafError(ValueError):
    pass


class EnumerationLimitError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteCategory:
    """A finite category with a chosen pullback for every cospan."""

    objects: tuple
    arrows: Mapping[Arrow, tuple[Obj, Obj]]
    identities: Mapping[Obj, Arrow]
    composition: Mapping[tuple[Arrow, Arrow], Arrow]
    pullbacks: Mapping[tuple[Arrow, Arrow], tuple[Obj, Arrow, Arrow]]

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        self._validate()

    @classmethod
    def build(cls, objects: Iterable[Obj], arrows: Mapping[Arrow, tuple[Obj, Obj]],
              compose: Mapping[tuple[Arrow, Arrow], Arrow] = (),
              pullbacks: Mapping[tuple[Arrow, Arrow], tuple[Obj, Arrow, Arrow]] = (),
              identities: Mapping[Obj, Arrow] | None = None) -> FiniteCategory:
        """Fill in identities, composites with identities, pullbacks with an
        identity leg, and mirror images of declared pullbacks."""
        objects = tuple(objects)
        identities = dict(identities or {C: f"id_{C}" for C in objects})
        table = {identities[C]: (C, C) for C in objects}
        for name, (d, c) in dict(arrows).items():
            if name in table and table[name] != (d, c):
                raise CategoryError(f"arrow {name!r} declared twice")
            table[name] = (d, c)
        comp = dict(compose)
        for f, (d, c) in table.items():
            comp.setdefault((identities[c], f), f)
            comp.setdefault((f, identities[d]), f)
        pbs = {}
        for (f, g), (P, p1, p2) in dict(pullbacks).items():
            pbs[(f, g)] = (P, p1, p2)
            pbs.setdefault((g, f), (P, p2, p1))
        for f, (d, c) in table.items():
            idc = identities[c]
            pbs.setdefault((idc, f), (d, f, identities[d]))
            pbs.setdefault((f, idc), (d, identities[d], f))
        return cls(objects, table, identities, comp, pbs)

    # -- structure --

    def dom(self, f: Arrow) -> Obj:
        return self.arrows[f][0]

    def cod(self, f: Arrow) -> Obj:
        return self.arrows[f][1]

    def identity(self, C: Obj) -> Arrow:
        return self.identities[C]

    def compose(self, g: Arrow, f: Arrow) -> Arrow:
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise CategoryError(f"{g!r} ∘ {f!r} is not defined") from None

    def hom(self, D: Obj, C: Obj) -> list[Arrow]:
        return [f for f, (d, c) in self.arrows.items() if d == D and c == C]

    def arrows_into(self, C: Obj) -> list[Arrow]:
        return [f for f, (_, c) in self.arrows.items() if c == C]

    def pullback(self, f: Arrow, g: Arrow) -> tuple[Obj, Arrow, Arrow]:
        """Chosen ``(P, p1, p2)`` with ``f ∘ p1 = g ∘ p2``."""
        try:
            return self.pullbacks[(f, g)]
        except KeyError:
            raise CategoryError(f"no chosen pullback for ({f!r}, {g!r})") from None

    def _validate(self) -> None:
        objs = set(self.objects)
        for f, (d, c) in self.arrows.items():
            if d not in objs or c not in objs:
                raise CategoryError(f"arrow {f!r} has unknown endpoints")
        for C in self.objects:
            i = self.identities.get(C)
            if i not in self.arrows or self.arrows[i] != (C, C):
                raise CategoryError(f"identity of {C!r} is missing or misplaced")
        for g, (dg, cg) in self.arrows.items():
            for f, (df, cf) in self.arrows.items():
                if cf != dg:
                    continue
                h = self.composition.get((g, f))
                if h is None:
                    raise CategoryError(f"composite {g!r} ∘ {f!r} is not given")
                if self.arrows.get(h) != (df, cg):
                    raise CategoryError(f"composite {g!r} ∘ {f!r} = {h!r} has the wrong type")
        for f, (d, c) in self.arrows.items():
            if self.compose(self.identities[c], f) != f or self.compose(f, self.identities[d]) != f:
                raise CategoryError(f"identity law fails at {f!r}")
        for h in self.arrows:
            for g in self.arrows_into(self.dom(h)):
                for f in self.arrows_into(self.dom(g)):
                    if self.compose(h, self.compose(g, f)) != self.compose(self.compose(h, g), f):
                        raise CategoryError(f"associativity fails at ({h!r}, {g!r}, {f!r})")
        for f in self.arrows:
            for g in self.arrows_into(self.cod(f)):
                self._check_pullback(f, g)

    def _check_pullback(self, f: Arrow, g: Arrow) -> None:
        P, p1, p2 = self.pullback(f, g)
        if self.arrows.get(p1) != (P, self.dom(f)) or self.arrows.get(p2) != (P, self.dom(g)):
            raise CategoryError(f"pullback legs for ({f!r}, {g!r}) have the wrong type")
        if self.compose(f, p1) != self.compose(g, p2):
            raise CategoryError(f"pullback square for ({f!r}, {g!r}) does not commute")
        for W in self.objects:
            for u in self.hom(W, self.dom(f)):
                for v in self.hom(W, self.dom(g)):
                    if self.compose(f, u) != self.compose(g, v):
                        continue
                    through = [w for w in self.hom(W, P)
                               if self.compose(p1, w) == u and self.compose(p2, w) == v]
                    if len(through) != 1:
                        raise CategoryError(
                            f"chosen pullback of ({f!r}, {g!r}) is not universal for the cone ({u!r}, {v!r})"
                        )


def trivial_category(obj: Obj = "*") -> FiniteCategory:
    return FiniteCategory.build([obj], {})


def poset_category(elements: Iterable[Obj], leq: Iterable[tuple[Obj, Obj]],
                   names: Mapping[tuple[Obj, Obj], Arrow] | None = None) -> FiniteCategory:
    """A finite poset as a category; pullbacks are meets.

    ``leq`` lists generating pairs ``x <= y``; ``names`` optionally names the
    arrow ``x -> y``.
    """
    elements = tuple(elements)
    below = {(x, x) for x in elements} | set(leq)
    changed = True
    while changed:
        changed = False
        for (x, y), (y2, z) in itertools.product(list(below), repeat=2):
            if y == y2 and (x, z) not in below:
                below.add((x, z))
                changed = True
    for x, y in below:
        if x != y and (y, x) in below:
            raise CategoryError(f"{x!r} and {y!r} are not antisymmetric")
    names = dict(names or {})
    ident = {x: f"id_{x}" for x in elements}

    def name(x, y):
        return ident[x] if x == y else names.get((x, y), f"{x}_{y}")

    arrows = {name(x, y): (x, y) for x in elements for y in elements if (x, y) in below}
    compose = {}
    for (x, y) in below:
        for (y2, z) in below:
            if y == y2:
                compose[(name(y, z), name(x, y))] = name(x, z)
    pullbacks = {}
    for (x, z) in below:
        for (y, z2) in below:
            if z != z2:
                continue
            lower = [w for w in elements if (w, x) in below and (w, y) in below]
            meets = [m for m in lower if all((w, m) in below for w in lower)]
            if not meets:
                raise CategoryError(f"{x!r} and {y!r} have no meet")
            m = meets[0]
            pullbacks[(name(x, z), name(y, z))] = (m, name(m, x), name(m, y))
    return FiniteCategory.build(elements, arrows, compose, pullbacks, ident)


def group_category(elements: Sequence[Arrow], multiply: Mapping[tuple[Arrow, Arrow], Arrow],
                   unit: Arrow, obj: Obj = "*") -> FiniteCategory:
    """A finite group as a one-object category (``multiply[(g, h)] = g ∘ h``)."""
    inverse = {g: next(h for h in elements if multiply[(g, h)] == unit) for g in elements}
    arrows = {g: (obj, obj) for g in elements if g != unit}
    pullbacks = {(g, h): (obj, unit, multiply[(inverse[h], g)]) for g in elements for h in elements}
    return FiniteCategory.build([obj], arrows, multiply, pullbacks, {obj: unit})


@dataclass(frozen=True, eq=False)
class Presheaf:
    """A contravariant functor from a finite category to finite sets."""

    category: FiniteCategory
    sections: Mapping[Obj, tuple]
    restriction: Mapping[Arrow, Mapping[Any, Any]]

    def __post_init__(self):
        cat = self.category
        sections = {C: tuple(self.sections.get(C, ())) for C in cat.objects}
        restriction = {}
        for beta, (D, C) in cat.arrows.items():
            given = self.restriction.get(beta)
            if given is None:
                if beta != cat.identity(C) and sections[C]:
                    raise PresheafError(f"restriction along {beta!r} is missing")
                given = {x: x for x in sections[C]}
            restriction[beta] = dict(given)
        object.__setattr__(self, "sections", sections)
        object.__setattr__(self, "restriction", restriction)
        self._validate()

    def restrict(self, x, beta: Arrow):
        return self.restriction[beta][x]

    def underlying(self) -> list[tuple[Any, Obj]]:
        """``|X|``: pairs ``(x, C)`` with ``x`` in ``X(C)``."""
        return [(x, C) for C in self.category.objects for x in self.sections[C]]

    def _validate(self) -> None:
        cat = self.category
        for C, xs in self.sections.items():
            if len(set(xs)) != len(xs):
                raise PresheafError(f"duplicate sections at {C!r}")
        for beta, (D, C) in cat.arrows.items():
            r = self.restriction[beta]
            if set(r) != set(self.sections[C]):
                raise PresheafError(f"restriction along {beta!r} must be defined on exactly X({C!r})")
            targets = set(self.sections[D])
            if any(v not in targets for v in r.values()):
                raise PresheafError(f"restriction along {beta!r} leaves X({D!r})")
        for C in cat.objects:
            i = cat.identity(C)
            if any(self.restrict(x, i) != x for x in self.sections[C]):
                raise PresheafError(f"restriction along the identity of {C!r} is not the identity")
        for g in cat.arrows:
            for f in cat.arrows_into(cat.dom(g)):
                gf = cat.compose(g, f)
                for x in self.sections[cat.cod(g)]:
                    if self.restrict(x, gf) != self.restrict(self.restrict(x, g), f):
                        raise PresheafError(f"functoriality fails for {g!r} ∘ {f!r} at {x!r}")


def terminal_presheaf(cat: FiniteCategory, point="*") -> Presheaf:
    return Presheaf(cat, {C: (point,) for C in cat.objects},
                    {beta: {point: point} for beta in cat.arrows})


@dataclass(frozen=True, eq=False)
class PresheafMorphism:
    source: Presheaf
    target: Presheaf
    components: Mapping[Obj, Mapping[Any, Any]]
    _fibres: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        if self.source.category is not self.target.category:
            raise PresheafError("presheaves live on different categories")
        cat = self.category
        comps = {C: dict(self.components.get(C, {})) for C in cat.objects}
        object.__setattr__(self, "components", comps)
        for C in cat.objects:
            if set(comps[C]) != set(self.source.sections[C]):
                raise PresheafError(f"component at {C!r} must be defined on the source sections")
            if any(v not in self.target.sections[C] for v in comps[C].values()):
                raise PresheafError(f"component at {C!r} leaves the target")
        for beta, (D, C) in cat.arrows.items():
            for x in self.source.sections[C]:
                if comps[D][self.source.restrict(x, beta)] != self.target.restrict(comps[C][x], beta):
                    raise PresheafError(f"naturality fails along {beta!r} at {x!r}")

    @property
    def category(self) -> FiniteCategory:
        return self.source.category

    def __call__(self, C: Obj, x):
        return self.components[C][x]

    def fibre_elements(self, a, C: Obj) -> tuple:
        """``|B_a|``: all ``(beta, b)`` with ``beta: D -> C`` and ``a·beta = f(b)``."""
        key = (a, C)
        hit = self._fibres.get(key)
        if hit is None:
            if a not in self.target.sections[C]:
                raise PresheafError(f"{a!r} is not a section at {C!r}")
            cat, A, B = self.category, self.target, self.source
            hit = tuple(
                (beta, b)
                for D in cat.objects
                for beta in cat.hom(D, C)
                for b in B.sections[D]
                if A.restrict(a, beta) == self.components[D][b]
            )
            self._fibres[key] = hit
        return hit

    @cached_property
    def underlying_signature(self) -> Signature:
        A = self.target
        return Signature(tuple(
            ((a, C), self.fibre_elements(a, C)) for C in self.category.objects for a in A.sections[C]
        ))


def fibre_presheaf(f: PresheafMorphism, a, C: Obj) -> Presheaf:
    """``B_a``: sections over ``D`` are ``(beta: D -> C, b)`` with ``a·beta = f(b)``."""
    cat, B = f.category, f.source
    elements = f.fibre_elements(a, C)
    sections = {D: tuple(e for e in elements if cat.dom(e[0]) == D) for D in cat.objects}
    restriction = {
        delta: {(beta, b): (cat.compose(beta, delta), B.restrict(b, delta)) for beta, b in sections[cat.cod(delta)]}
        for delta in cat.arrows
    }
    return Presheaf(cat, sections, restriction)


def underlying_map(f: PresheafMorphism) -> Signature:
    """``f'``: the set-level container whose fibre over ``(a, C)`` is ``|B_a|``."""
    return f.underlying_signature


# -- natural transformations --------------------------------------------------

def natural_transformations(S: Presheaf, T: Presheaf, guard: int = DEFAULT_GUARD,
                            rng: random.Random | None = None) -> Iterator[dict]:
    """All presheaf morphisms ``S -> T`` as ``{object: {section: section}}``.

    Backtracking over the elements of ``|S|`` with naturality checked as soon
    as both ends of a restriction are assigned.  ``guard`` bounds the number
    of candidate extensions tried; exceeding it raises
    :class:`EnumerationLimitError`.  With ``rng`` the candidates are tried in
    random order.
    """
    cat = S.category
    items = S.underlying()
    index = {(x, C): k for k, (x, C) in enumerate(items)}
    # constraints checked when the later of the two items is assigned
    checks: list[list[tuple[int, Arrow, int]]] = [[] for _ in items]
    for k, (x, C) in enumerate(items):
        for beta in cat.arrows_into(C):
            j = index[(S.restrict(x, beta), cat.dom(beta))]
            checks[max(k, j)].append((k, beta, j))
    value: list = [None] * len(items)
    budget = [guard]

    def consistent(k: int) -> bool:
        return all(T.restrict(value[src], beta) == value[dst] for src, beta, dst in checks[k])

    def go(k: int) -> Iterator[dict]:
        if k == len(items):
            out = {C: {} for C in cat.objects}
            for (x, C), v in zip(items, value):
                out[C][x] = v
            yield out
            return
        candidates = list(T.sections[items[k][1]])
        if rng is not None:
            rng.shuffle(candidates)
        for v in candidates:
            budget[0] -= 1
            if budget[0] < 0:
                raise EnumerationLimitError(f"more than {guard} candidate assignments explored")
            value[k] = v
            if consistent(k):
                yield from go(k + 1)
        value[k] = None

    yield from go(0)


def presheaf_apply_pf(f: PresheafMorphism, X: Presheaf, guard: int = DEFAULT_GUARD) -> Presheaf:
    """``P_f(X)``: sections over ``C`` are ``(a, t)`` with ``t: B_a -> X`` natural.

    Each section is a :class:`PfElement` whose assignment runs over ``|B_a|``.
    """
    cat, A = f.category, f.target
    sections = {}
    for C in cat.objects:
        out = []
        for a in A.sections[C]:
            elements = f.fibre_elements(a, C)
            for t in natural_transformations(fibre_presheaf(f, a, C), X, guard):
                out.append(PfElement(a, tuple(((beta, b), t[cat.dom(beta)][(beta, b)]) for beta, b in elements)))
        sections[C] = tuple(out)
    restriction = {}
    for alpha, (C2, C) in cat.arrows.items():
        restriction[alpha] = {e: pf_restrict(f, e, alpha) for e in sections[C]}
    return Presheaf(cat, sections, restriction)


def pf_restrict(f: PresheafMorphism, e: PfElement, alpha: Arrow) -> PfElement:
    """``(a, t)·alpha = (a·alpha, alpha*(t))`` with ``alpha*(t)(beta, b) = t(alpha beta, b)``."""
    cat = f.category
    a2 = f.target.restrict(e.shape, alpha)
    t = e.as_dict()
    return PfElement(a2, tuple(
        ((beta, b), t[(cat.compose(alpha, beta), b)]) for beta, b in f.fibre_elements(a2, cat.dom(alpha))
    ))


def presheaf_coalgebras(f: PresheafMorphism, X: Presheaf, guard: int = DEFAULT_GUARD,
                        rng: random.Random | None = None) -> Iterator[dict]:
    """Natural ``gamma: X -> P_f(X)``, each as ``{object: {section: PfElement}}``."""
    yield from natural_transformations(X, presheaf_apply_pf(f, X, guard), guard, rng)


def unfold_presheaf_coalgebra(f: PresheafMorphism, X: Presheaf, gamma: Mapping) -> Coalgebra:
    """The set-level coalgebra on ``|X|`` whose states unfold to natural trees."""
    cat = f.category
    sig = underlying_map(f)
    step = {}
    for x, C in X.underlying():
        e = gamma[C][x]
        step[(x, C)] = PfElement((e.shape, C), tuple(((beta, b), (v, cat.dom(beta))) for (beta, b), v in e.assignment))
    return Coalgebra(sig, tuple(X.underlying()), step)


def natural_tree_pool(f: PresheafMorphism, X: Presheaf, limit: int = 50,
                      rng: random.Random | None = None, guard: int = DEFAULT_GUARD) -> dict[Obj, list[TreeHandle]]:
    """Distinct natural trees per root object, unfolded from up to ``limit``
    natural coalgebras on ``X``."""
    found: dict = {C: {} for C in f.category.objects}
    for gamma in itertools.islice(presheaf_coalgebras(f, X, guard, rng), limit):
        c = unfold_presheaf_coalgebra(f, X, gamma)
        for s in c.states:
            h = minimize(c, s)
            found[root_object(h)].setdefault(h.key, h)
    return {C: list(hs.values()) for C, hs in found.items()}


# -- natural trees ------------------------------------------------------------

def root_object(h: TreeHandle) -> Obj:
    return h.shape[1]


def _restriction_extension(f: PresheafMorphism, u: Coalgebra, states: Iterable) -> Coalgebra:
    """``u`` plus a state ``(1, s, delta)`` for the restriction of every listed
    state ``s`` along every arrow ``delta`` into its root object."""
    cat, A = f.category, f.target
    step = {(0, s): PfElement(e.shape, tuple((p, (0, v)) for p, v in e.assignment)) for s, e in u.step.items()}
    for s in states:
        a, C = u.shape(s)
        for delta in cat.arrows_into(C):
            a2, D = A.restrict(a, delta), cat.dom(delta)
            step[(1, s, delta)] = PfElement((a2, D), tuple(
                ((beta, b), (0, u.child(s, (cat.compose(delta, beta), b))))
                for beta, b in f.fibre_elements(a2, D)
            ))
    return Coalgebra(u.signature, tuple(step), step)


def natural_tree(f: PresheafMorphism, h: TreeHandle) -> bool:
    """Is every node's child family the underlying family of a presheaf
    morphism ``B_a -> M``?"""
    if h.signature != underlying_map(f):
        return False
    cat, B = f.category, f.source
    u = h.universe
    reach = h.reachable()
    ext = _restriction_extension(f, u, reach)
    blocks = bisimulation_blocks([ext])
    for s in reach:
        for (beta, b), child in u.step[s].assignment:
            D = cat.dom(beta)
            if u.shape(child)[1] != D:
                return False
            for delta in cat.arrows_into(D):
                moved = u.child(s, (cat.compose(beta, delta), B.restrict(b, delta)))
                if blocks[(0, (0, moved))] != blocks[(0, (1, child, delta))]:
                    return False
    return True


def restrict_tree(f: PresheafMorphism, h: TreeHandle, alpha: Arrow, check: bool = True) -> TreeHandle:
    """``sup_(a,C) t · alpha = sup_(a·alpha, C') alpha*(t)``."""
    cat = f.category
    if h.signature != underlying_map(f):
        raise PresheafError("tree is not over the underlying signature of the presheaf map")
    if cat.cod(alpha) != root_object(h):
        raise PresheafError(f"{alpha!r} does not end at the root object {root_object(h)!r}")
    if check and not natural_tree(f, h):
        raise PresheafError("tree is not natural")
    ext = _restriction_extension(f, h.universe, [h.state])
    return minimize(ext, (1, h.state, alpha))


# -- the set-level case -------------------------------------------------------

def presheaf_from_signature(sig: Signature, obj: Obj = "*") -> PresheafMorphism:
    """A signature as a presheaf map over the one-object, identity-only category."""
    cat = trivial_category(obj)
    A = Presheaf(cat, {obj: sig.shapes}, {})
    B = Presheaf(cat, {obj: tuple((a, p) for a in sig.shapes for p in sig.positions(a))}, {})
    return PresheafMorphism(B, A, {obj: {(a, p): a for a, p in B.sections[obj]}})


def set_level_morphism(sig: Signature, f: PresheafMorphism) -> SignatureMorphism:
    """The isomorphism ``sig -> underlying_map(f)`` for ``f = presheaf_from_signature(sig)``."""
    cat = f.category
    (obj,) = cat.objects
    i = cat.identity(obj)
    target = underlying_map(f)
    bij = {a: {p: (i, (a, p)) for p in sig.positions(a)} for a in sig.shapes}
    return SignatureMorphism(sig, target, {a: (a, obj) for a in sig.shapes}, bij)
