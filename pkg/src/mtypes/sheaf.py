"""Grothendieck pretopologies on finite categories, the sheaf condition, and
gluing of compatible families of natural trees."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .coalgebra import Coalgebra, TreeHandle, minimize
from .presheaf import (
    Arrow,
    FiniteCategory,
    Obj,
    Presheaf,
    PresheafMorphism,
    natural_tree,
    restrict_tree,
    root_object,
    underlying_map,
)
from .signature import PfElement


class SiteError(ValueError):
    pass


class GlueError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Site:
    """Declared covers per object; a family is covering when it contains one."""

    category: FiniteCategory
    covers: Mapping[Obj, tuple[tuple[Arrow, ...], ...]]

    def __post_init__(self):
        cat = self.category
        covers = {C: tuple(tuple(K) for K in self.covers.get(C, ())) for C in cat.objects}
        object.__setattr__(self, "covers", covers)
        for C, Ks in covers.items():
            for K in Ks:
                for k in K:
                    if k not in cat.arrows or cat.cod(k) != C:
                        raise SiteError(f"cover leg {k!r} does not end at {C!r}")
        self._validate()

    @classmethod
    def build(cls, category: FiniteCategory, covers: Mapping[Obj, Sequence[Sequence[Arrow]]]) -> Site:
        """Add the identity cover of every object if it is not declared."""
        table = {C: [tuple(K) for K in covers.get(C, ())] for C in category.objects}
        for C in category.objects:
            ident = (category.identity(C),)
            if ident not in table[C]:
                table[C].insert(0, ident)
        return cls(category, table)

    def is_covering(self, C: Obj, family: Sequence[Arrow]) -> bool:
        legs = set(family)
        if any(self.category.cod(k) != C for k in legs):
            return False
        return any(set(K) <= legs for K in self.covers[C])

    def pull_back_family(self, family: Sequence[Arrow], beta: Arrow) -> list[tuple[Arrow, Arrow]]:
        """For each leg ``c``, the pair ``(d, beta_c)`` with ``c beta_c = beta d``."""
        out = []
        for c in family:
            _, p1, p2 = self.category.pullback(c, beta)
            out.append((p2, p1))
        return out

    def _validate(self) -> None:
        cat = self.category
        for C in cat.objects:
            if not self.is_covering(C, [cat.identity(C)]):
                raise SiteError(f"the identity of {C!r} is not covering")
        for C, Ks in self.covers.items():
            for K in Ks:
                for beta in cat.arrows_into(C):
                    pulled = [d for d, _ in self.pull_back_family(K, beta)]
                    if not self.is_covering(cat.dom(beta), pulled):
                        raise SiteError(f"cover {list(K)} of {C!r} is not stable along {beta!r}")
                choices = [self.covers[cat.dom(k)] for k in K]
                for pick in itertools.product(*choices):
                    composite = [cat.compose(k, j) for k, Kk in zip(K, pick) for j in Kk]
                    if not self.is_covering(C, composite):
                        raise SiteError(f"cover {list(K)} of {C!r} is not transitive")


def matching_families(X: Presheaf, site: Site, family: Sequence[Arrow]) -> Iterator[tuple]:
    """Tuples of sections, one per leg, agreeing on chosen pullbacks."""
    cat = site.category
    pools = [X.sections[cat.dom(k)] for k in family]
    for xs in itertools.product(*pools):
        if _matches(X, cat, family, xs):
            yield xs


def _matches(X: Presheaf, cat: FiniteCategory, family: Sequence[Arrow], xs: Sequence) -> bool:
    for i, j in itertools.combinations_with_replacement(range(len(family)), 2):
        _, p1, p2 = cat.pullback(family[i], family[j])
        if X.restrict(xs[i], p1) != X.restrict(xs[j], p2):
            return False
    return True


def amalgamations(X: Presheaf, site: Site, C: Obj, family: Sequence[Arrow], xs: Sequence) -> list:
    return [x for x in X.sections[C] if all(X.restrict(x, k) == v for k, v in zip(family, xs))]


def sheaf_violations(X: Presheaf, site: Site) -> Iterator[tuple]:
    """``(object, cover, family, amalgamations)`` for every matching family
    without exactly one amalgamation."""
    for C, Ks in site.covers.items():
        for K in Ks:
            for xs in matching_families(X, site, K):
                found = amalgamations(X, site, C, K, xs)
                if len(found) != 1:
                    yield C, K, xs, found


def sheaf_check(X: Presheaf, site: Site) -> bool:
    if X.category is not site.category:
        raise SiteError("presheaf and site live on different categories")
    return next(sheaf_violations(X, site), None) is None


@lru_cache(maxsize=256)
def _is_sheaf_cached(X: Presheaf, site: Site) -> bool:
    return sheaf_check(X, site)


# -- the plus construction on natural trees -----------------------------------

@dataclass(frozen=True, eq=False)
class CompatibleFamily:
    """Natural trees ``T_i`` over ``dom(c_i)`` for a covering family ``{c_i}``
    that agree on chosen pullbacks."""

    site: Site
    f: PresheafMorphism
    target: Obj
    legs: tuple
    trees: tuple

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(self.legs))
        object.__setattr__(self, "trees", tuple(self.trees))
        cat = self.site.category
        if self.f.category is not cat:
            raise SiteError("presheaf map and site live on different categories")
        if len(self.legs) != len(self.trees):
            raise SiteError("one tree per leg is required")
        if not self.site.is_covering(self.target, self.legs):
            raise SiteError(f"legs {list(self.legs)} do not cover {self.target!r}")
        for c, t in zip(self.legs, self.trees):
            if not natural_tree(self.f, t):
                raise SiteError(f"tree on leg {c!r} is not natural")
            if root_object(t) != cat.dom(c):
                raise SiteError(f"tree on leg {c!r} is not rooted at {cat.dom(c)!r}")
        for i, j in itertools.combinations(range(len(self.legs)), 2):
            _, p1, p2 = cat.pullback(self.legs[i], self.legs[j])
            left = restrict_tree(self.f, self.trees[i], p1, check=False)
            right = restrict_tree(self.f, self.trees[j], p2, check=False)
            if left != right:
                raise SiteError(f"trees on legs {self.legs[i]!r} and {self.legs[j]!r} disagree on the overlap")


def eta(site: Site, f: PresheafMorphism, h: TreeHandle) -> CompatibleFamily:
    """A tree as the one-leg family along the identity."""
    C = root_object(h)
    return CompatibleFamily(site, f, C, (site.category.identity(C),), (h,))


def plus_restrict(F: CompatibleFamily, beta: Arrow) -> CompatibleFamily:
    """``[{c_i}, T_i]·beta = [{d_i}, T_i·beta_i]`` along chosen pullbacks."""
    cat = F.site.category
    if cat.cod(beta) != F.target:
        raise SiteError(f"{beta!r} does not end at {F.target!r}")
    pulled = F.site.pull_back_family(F.legs, beta)
    trees = [restrict_tree(F.f, t, b, check=False) for t, (_, b) in zip(F.trees, pulled)]
    return CompatibleFamily(F.site, F.f, cat.dom(beta), [d for d, _ in pulled], trees)


def _amalgamate_shape(F_site: Site, A: Presheaf, C: Obj, legs: Sequence[Arrow], shapes: Sequence):
    found = amalgamations(A, F_site, C, legs, shapes)
    if len(found) != 1:
        raise GlueError(f"root shapes {list(shapes)} have {len(found)} amalgamations at {C!r}")
    return found[0]


def plus_step(F: CompatibleFamily) -> tuple:
    """The coalgebra structure on families: the amalgamated root shape and
    the family of children at every position ``(beta, b)``."""
    cat, B = F.site.category, F.f.source
    a = _amalgamate_shape(F.site, F.f.target, F.target, F.legs, [t.shape[0] for t in F.trees])
    children = {}
    for beta, b in F.f.fibre_elements(a, F.target):
        legs, trees = [], []
        for c, t in zip(F.legs, F.trees):
            _, p1, p2 = cat.pullback(c, beta)
            legs.append(p2)
            trees.append(t.child((p1, B.restrict(b, p2))))
        children[(beta, b)] = CompatibleFamily(F.site, F.f, cat.dom(beta), legs, trees)
    return a, children


def family_equivalent(F: CompatibleFamily, G: CompatibleFamily) -> bool:
    """Do the families agree on a common covering refinement?

    Tried refinements: the family of pairwise chosen pullbacks, and each
    declared cover of the target.
    """
    if F.target != G.target or F.site is not G.site or F.f is not G.f:
        return False
    cat, f = F.site.category, F.f

    def restricted(fam, i, sigma):
        return restrict_tree(f, fam.trees[i], sigma, check=False)

    pairwise = True
    for i, c in enumerate(F.legs):
        for j, d in enumerate(G.legs):
            _, p1, p2 = cat.pullback(c, d)
            if restricted(F, i, p1) != restricted(G, j, p2):
                pairwise = False
                break
        if not pairwise:
            break
    if pairwise:
        return True

    def factorizations(fam, k):
        D = cat.dom(k)
        return [
            (i, s) for i, c in enumerate(fam.legs) for s in cat.hom(D, cat.dom(c)) if cat.compose(c, s) == k
        ]

    for K in F.site.covers[F.target]:
        ok = True
        for k in K:
            left = {restricted(F, i, s) for i, s in factorizations(F, k)}
            right = {restricted(G, j, s) for j, s in factorizations(G, k)}
            if not left & right:
                ok = False
                break
        if ok:
            return True
    return False


def glue(F: CompatibleFamily) -> TreeHandle:
    """The amalgamated natural tree of a compatible family."""
    site, f = F.site, F.f
    if not _is_sheaf_cached(f.target, site):
        raise GlueError("the shape presheaf is not a sheaf for this site")
    if not _is_sheaf_cached(f.source, site):
        raise GlueError("the position presheaf is not a sheaf for this site")
    cat, A, B = site.category, f.target, f.source
    universes = [t.universe for t in F.trees]
    root = (F.target, tuple((c, i, t.state) for i, (c, t) in enumerate(zip(F.legs, F.trees))))
    step: dict = {}
    queue = deque([root])
    seen = {root}
    while queue:
        state = queue.popleft()
        C, parts = state
        legs = [c for c, _, _ in parts]
        shapes = [universes[i].shape(s)[0] for _, i, s in parts]
        a = _amalgamate_shape(site, A, C, legs, shapes)
        assignment = []
        for beta, b in f.fibre_elements(a, C):
            child_parts = []
            for c, i, s in parts:
                _, p1, p2 = cat.pullback(c, beta)
                child_parts.append((p2, i, universes[i].child(s, (p1, B.restrict(b, p2)))))
            child = (cat.dom(beta), tuple(child_parts))
            if child not in seen:
                seen.add(child)
                queue.append(child)
            assignment.append(((beta, b), child))
        step[state] = PfElement((a, C), tuple(assignment))
    return minimize(Coalgebra(underlying_map(f), tuple(step), step), root)
