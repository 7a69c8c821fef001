"""Finite approximations of trees, the pointed-signature pipeline and
path-set membership.

Finite trees are hash-consed: structurally equal trees are the same object,
so equality and hashing are O(1) and shared subtrees stay shared.
"""
from __future__ import annotations

import itertools
import json
import weakref
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .coalgebra import Coalgebra, CoalgebraError, TreeHandle, enumerate_paths, minimize, relabel
from .signature import Signature, SignatureError, point_inclusion


class FiniteTree:
    __slots__ = ("__weakref__",)

    is_cut = False


class _Cut(FiniteTree):
    __slots__ = ()
    is_cut = True

    def __repr__(self) -> str:
        return "⊥"

    def __reduce__(self):
        return "CUT"


CUT = _Cut()

_NODES: weakref.WeakValueDictionary = weakref.WeakValueDictionary()


class Node(FiniteTree):
    """A node labelled by a shape with one child per position, in order."""

    __slots__ = ("shape", "children")

    def __new__(cls, shape: Hashable, children: Mapping | Iterable = ()):
        if isinstance(children, Mapping):
            children = children.items()
        children = tuple((p, t) for p, t in children)
        for _, t in children:
            if not isinstance(t, FiniteTree):
                raise TypeError(f"child {t!r} is not a FiniteTree")
        key = (shape, children)
        node = _NODES.get(key)
        if node is None:
            node = super().__new__(cls)
            node.shape = shape
            node.children = children
            _NODES[key] = node
        return node

    def child(self, position) -> FiniteTree:
        for p, t in self.children:
            if p == position:
                return t
        raise KeyError(position)

    def __repr__(self) -> str:
        if not self.children:
            return f"{self.shape}()"
        return f"{self.shape}(" + ", ".join(f"{p}: {t!r}" for p, t in self.children) + ")"

    def __reduce__(self):
        return (Node, (self.shape, self.children))


def depth(t: FiniteTree) -> int:
    if t.is_cut:
        return 0
    return 1 + max((depth(c) for _, c in t.children), default=0)


def check_tree(sig: Signature, t: FiniteTree) -> None:
    if t.is_cut:
        return
    if tuple(p for p, _ in t.children) != sig.positions(t.shape):
        raise SignatureError(f"children of {t.shape!r} do not match its positions")
    for _, c in t.children:
        check_tree(sig, c)


def unfold(c: Coalgebra, x, n: int) -> FiniteTree:
    """Unfold state ``x`` for ``n`` levels, cutting below."""
    memo: dict = {}

    def go(y, k):
        if k == 0:
            return CUT
        hit = memo.get((y, k))
        if hit is None:
            e = c.step[y]
            hit = memo[(y, k)] = Node(e.shape, tuple((p, go(v, k - 1)) for p, v in e.assignment))
        return hit

    if x not in c.step:
        raise CoalgebraError(f"unknown state {x!r}")
    return go(x, n)


def truncate(h: TreeHandle, n: int) -> FiniteTree:
    return unfold(h.universe, h.state, n)


@lru_cache(maxsize=65536)
def truncate_tree(t: FiniteTree, n: int) -> FiniteTree:
    if n == 0 or t.is_cut:
        return CUT
    return Node(t.shape, tuple((p, truncate_tree(c, n - 1)) for p, c in t.children))


def check_approximation_sequence(seq: Sequence[FiniteTree]) -> bool:
    """``seq[k]`` is read as the depth ``k + 1`` approximation."""
    for m in range(len(seq)):
        for n in range(m):
            if truncate_tree(seq[m], n + 1) is not seq[n]:
                return False
    return True


def retag(t: FiniteTree, shape_map: Callable[[Hashable], Hashable] | Mapping) -> FiniteTree:
    fn = shape_map.__getitem__ if isinstance(shape_map, Mapping) else shape_map
    if t.is_cut:
        return CUT
    return Node(fn(t.shape), tuple((p, retag(c, fn)) for p, c in t.children))


# -- pointed signatures -------------------------------------------------------

def lift_to_pointed(c: Coalgebra) -> Coalgebra:
    """Read a coalgebra over ``f`` as one over ``f_⊥``."""
    return relabel(point_inclusion(c.signature), c)


def strip_point(pointed: Coalgebra, x) -> TreeHandle | None:
    """The tree of ``x`` over the unpointed signature, if no ``⊥`` is reachable."""
    sig = pointed.signature
    if sig.point is None:
        raise SignatureError("coalgebra is not over a pointed signature")
    reach = pointed.reachable(x)
    if any(pointed.shape(y) == sig.point for y in reach):
        return None
    base = sig.without_point()
    return minimize(Coalgebra(base, tuple(reach), {y: pointed.step[y] for y in reach}), x)


# -- path sequences -----------------------------------------------------------

def is_sequence(sig: Signature, seq: Sequence) -> bool:
    if len(seq) % 2 != 1:
        return False
    if any(seq[i] not in sig for i in range(0, len(seq), 2)):
        return False
    return all(seq[i + 1] in sig.positions(seq[i]) for i in range(0, len(seq) - 1, 2))


def enumerate_sequences(sig: Signature, max_len: int) -> list[tuple]:
    """All sequences ``<a0, b0, ..., an>`` with at most ``max_len`` shapes."""
    if max_len < 1:
        return []
    layer = [(a,) for a in sig.shapes]
    out = list(layer)
    for _ in range(max_len - 1):
        layer = [s + (b, a) for s in layer for b in sig.positions(s[-1]) for a in sig.shapes]
        out.extend(layer)
    return out


def parse_sequence(text: str) -> tuple:
    return tuple(tok.strip() for tok in text.split(",")) if text.strip() else ()


def pathset_member(h: TreeHandle, seq: Sequence) -> bool:
    """Is ``seq`` in the path-set of the tree?  Checked clause by clause:
    the head must be the root shape, and the tail must be in the subtree
    at the named position."""
    if not is_sequence(h.signature, seq):
        raise ValueError(f"{tuple(seq)!r} is not a valid sequence for this signature")
    c, x = h.universe, h.state
    for i in range(0, len(seq), 2):
        if c.shape(x) != seq[i]:
            return False
        if i + 1 < len(seq):
            x = c.child(x, seq[i + 1])
    return True


def pathset_coherent(h: TreeHandle | Callable[[tuple], bool], max_len: int,
                     signature: Signature | None = None) -> bool:
    """Check on a bounded window that a membership oracle describes a tree:
    a unique root shape, and a unique extension of every member along every
    position of its last shape."""
    if isinstance(h, TreeHandle):
        sig = h.signature
        oracle = lambda s: pathset_member(h, s)  # noqa: E731
    else:
        if signature is None:
            raise ValueError("a signature is required for a bare membership oracle")
        sig, oracle = signature, h
    if sum(1 for a in sig.shapes if oracle((a,))) != 1:
        return False
    for s in enumerate_sequences(sig, max_len - 1):
        if not oracle(s):
            continue
        for b in sig.positions(s[-1]):
            if sum(1 for a in sig.shapes if oracle(s + (b, a))) != 1:
                return False
    return True


def projected_paths(h: TreeHandle, max_nodes: int) -> Iterator[tuple]:
    """Shape/position projections of the coalgebra paths from the handle's state."""
    c = h.universe
    for path in enumerate_paths(c, h.state, max_nodes):
        yield tuple(c.shape(v) if i % 2 == 0 else v for i, v in enumerate(path))


# -- serialization ------------------------------------------------------------

def to_json(t: FiniteTree, label: Callable = str, position_label: Callable | None = None) -> str:
    plabel = position_label or label

    def conv(u):
        if u.is_cut:
            return {"cut": True}
        return {"shape": label(u.shape), "children": {plabel(p): conv(c) for p, c in u.children}}

    return json.dumps(conv(t), separators=(",", ":"), ensure_ascii=False)


def from_json(data) -> FiniteTree:
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("cut"):
        return CUT
    return Node(data["shape"], tuple((p, from_json(c)) for p, c in data.get("children", {}).items()))


def to_dot(t: FiniteTree, label: Callable = str, name: str = "tree",
           position_label: Callable | None = None) -> str:
    plabel = position_label or label
    lines = [f"digraph {json.dumps(name)} {{"]
    counter = itertools.count()

    def walk(u) -> str:
        ident = f"n{next(counter)}"
        if u.is_cut:
            lines.append(f'  {ident} [label="⊥", shape=plaintext];')
            return ident
        lines.append(f"  {ident} [label={json.dumps(label(u.shape), ensure_ascii=False)}];")
        for p, c in u.children:
            child = walk(c)
            lines.append(f"  {ident} -> {child} [label={json.dumps(plabel(p), ensure_ascii=False)}];")
        return ident

    walk(t)
    lines.append("}")
    return "\n".join(lines) + "\n"

