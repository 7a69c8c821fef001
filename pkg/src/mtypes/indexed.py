"""Signatures over an index set: trees that stay inside one fibre, the
tagging map ``chi`` and reindexing along ``x: J -> I``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .coalgebra import Coalgebra, TreeHandle, bisimilar, minimize, relabel
from .signature import (
    PfElement,
    Signature,
    SignatureError,
    SignatureMorphism,
    apply_functor,
    shape_relabelling,
)


@dataclass(frozen=True)
class IndexedSignature:
    """A container living over ``I``: every shape sits in a fibre."""

    base: Signature
    index: tuple
    fibre_of: Mapping[Hashable, Hashable]

    def __post_init__(self):
        object.__setattr__(self, "index", tuple(self.index))
        for a in self.base.shapes:
            if a not in self.fibre_of:
                raise SignatureError(f"fibre of shape {a!r} is not given")
            if self.fibre_of[a] not in self.index:
                raise SignatureError(f"shape {a!r} sits over unknown index {self.fibre_of[a]!r}")


def indexed_apply(isig: IndexedSignature, carrier: Iterable, xi: Mapping) -> list[PfElement]:
    """``P^I_f(X, xi)`` inside ``P_f(X)``: every child sits in its parent's fibre."""
    return [
        e for e in apply_functor(isig.base, carrier)
        if all(xi[v] == isig.fibre_of[e.shape] for v in e.values)
    ]


def fibre_coherent(isig: IndexedSignature, h: TreeHandle) -> bool:
    root = isig.fibre_of[h.shape]
    return all(isig.fibre_of[h.universe.shape(y)] == root for y in h.reachable())


def tagged_signature(isig: IndexedSignature) -> Signature:
    """Shapes ``(a, i)`` for ``a`` in ``A`` and ``i`` in ``I``, positions of ``a``."""
    return Signature(tuple(((a, i), ps) for a, ps in isig.base.arities for i in isig.index))


def tag_morphism(isig: IndexedSignature) -> SignatureMorphism:
    """``<id, alpha>``: tag each shape with its own fibre."""
    return shape_relabelling(isig.base, tagged_signature(isig), {a: (a, isig.fibre_of[a]) for a in isig.base.shapes})


def untag_morphism(isig: IndexedSignature) -> SignatureMorphism:
    tagged = tagged_signature(isig)
    return shape_relabelling(tagged, isig.base, {t: t[0] for t in tagged.shapes})


def chi(isig: IndexedSignature, h: TreeHandle, i) -> TreeHandle:
    """Tag every node of the tree with the constant index ``i``."""
    if i not in isig.index:
        raise SignatureError(f"unknown index {i!r}")
    u = h.universe
    reach = h.reachable()
    step = {y: PfElement((u.shape(y), i), u.step[y].assignment) for y in reach}
    return minimize(Coalgebra(tagged_signature(isig), tuple(reach), step), h.state)


def equaliser_characterization(isig: IndexedSignature, h: TreeHandle) -> bool:
    """Do ``<id, alpha>_!`` and ``chi(-, alpha rho(-))`` agree on the tree?"""
    own = relabel(tag_morphism(isig), h.universe)
    const = chi(isig, h, isig.fibre_of[h.shape])
    return bisimilar(own, h.state, const.universe, const.state)


def reindex(isig: IndexedSignature, J: Iterable, x: Mapping) -> tuple[IndexedSignature, SignatureMorphism]:
    """Pull the container back along ``x: J -> I``.

    Returns the reindexed signature (shapes ``(j, a)`` with ``x(j)`` the
    fibre of ``a``) and the projection square ``(j, a) -> a``.
    """
    J = tuple(J)
    for j in J:
        if x.get(j) not in isig.index:
            raise SignatureError(f"{j!r} is not sent into the index set")
    arities = tuple(
        ((j, a), ps) for j in J for a, ps in isig.base.arities if isig.fibre_of[a] == x[j]
    )
    base = Signature(arities)
    pulled = IndexedSignature(base, J, {s: s[0] for s in base.shapes})
    projection = shape_relabelling(base, isig.base, {s: s[1] for s in base.shapes})
    return pulled, projection


def pull_tree(isig: IndexedSignature, pulled: IndexedSignature, h: TreeHandle, j) -> TreeHandle:
    """Read a fibre-coherent tree over ``x(j)`` as a tree of the reindexed
    signature in fibre ``j``."""
    if not fibre_coherent(isig, h):
        raise SignatureError("tree is not fibre-coherent")
    u = h.universe
    reach = h.reachable()
    step = {y: PfElement((j, u.shape(y)), u.step[y].assignment) for y in reach}
    return minimize(Coalgebra(pulled.base, tuple(reach), step), h.state)
