"""Finite coalgebras, paths, bisimulation and rational tree handles."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

from .signature import PfElement, Signature, SignatureMorphism, apply_on_function, transform_element

State = Hashable
Path = tuple  # x0, b0, x1, b1, ..., xn


class CoalgebraError(ValueError):
    pass


@dataclass(frozen=True)
class Coalgebra:
    """A finite ``P_f``-coalgebra ``gamma: X -> P_f(X)``."""

    signature: Signature
    states: tuple[State, ...]
    step: Mapping[State, PfElement]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if len(set(self.states)) != len(self.states):
            raise CoalgebraError("duplicate state identifiers")
        known = set(self.states)
        if set(self.step) != known:
            missing = [x for x in self.states if x not in self.step]
            raise CoalgebraError(f"step must be defined exactly on the states (missing {missing})")
        for x, e in self.step.items():
            self.signature.check_element(e)
            for v in e.values:
                if v not in known:
                    raise CoalgebraError(f"state {x!r} steps to unknown state {v!r}")

    @classmethod
    def build(cls, sig: Signature, steps: Mapping[State, Any]) -> Coalgebra:
        """``steps`` maps each state to a PfElement or a ``(shape, assignment)`` pair."""
        table = {}
        for x, e in steps.items():
            if not isinstance(e, PfElement):
                shape, assignment = e
                e = sig.element(shape, assignment)
            table[x] = e
        return cls(sig, tuple(steps), table)

    def shape(self, x: State):
        return self.step[x].shape

    def child(self, x: State, position) -> State:
        return self.step[x][position]

    def reachable(self, x: State) -> list[State]:
        """States reachable from ``x``, breadth first, children in position order."""
        if x not in self.step:
            raise CoalgebraError(f"unknown state {x!r}")
        seen, order, queue = {x}, [x], deque([x])
        while queue:
            for y in self.step[queue.popleft()].values:
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    queue.append(y)
        return order

    def restrict_to(self, states: Iterable[State]) -> Coalgebra:
        states = tuple(states)
        return Coalgebra(self.signature, states, {x: self.step[x] for x in states})


def check_coalgebra_morphism(source: Coalgebra, target: Coalgebra, h: Mapping[State, State]) -> bool:
    """Does ``h`` make the coalgebra square commute?"""
    if source.signature != target.signature:
        raise CoalgebraError("coalgebras live over different signatures")
    for x in source.states:
        if x not in h:
            raise CoalgebraError(f"function undefined on state {x!r}")
        if h[x] not in target.step:
            raise CoalgebraError(f"{x!r} is sent to unknown state {h[x]!r}")
    for x in source.states:
        if target.step[h[x]] != apply_on_function(source.signature, h, source.step[x]):
            return False
    return True


def coalgebra_morphisms(source: Coalgebra, target: Coalgebra) -> Iterator[dict]:
    """Every coalgebra morphism ``source -> target``, by exhaustive search."""
    for values in itertools.product(target.states, repeat=len(source.states)):
        h = dict(zip(source.states, values))
        if check_coalgebra_morphism(source, target, h):
            yield h


def is_path(c: Coalgebra, entries: Sequence) -> bool:
    if len(entries) % 2 != 1 or entries[0] not in c.step:
        return False
    for i in range(0, len(entries) - 1, 2):
        x, b, y = entries[i], entries[i + 1], entries[i + 2]
        e = c.step.get(x)
        if e is None or b not in e.positions or e[b] != y:
            return False
    return True


def enumerate_paths(c: Coalgebra, x0: State, max_nodes: int) -> list[Path]:
    """All paths starting at ``x0`` with at most ``max_nodes`` state entries,
    shortest first."""
    if x0 not in c.step:
        raise CoalgebraError(f"unknown state {x0!r}")
    if max_nodes < 1:
        raise ValueError("max_nodes must be at least 1")
    layer = [(x0,)]
    out = list(layer)
    for _ in range(max_nodes - 1):
        layer = [p + (b, y) for p in layer for b, y in c.step[p[-1]].assignment]
        out.extend(layer)
    return out


def lift_path(source: Coalgebra, target: Coalgebra, h: Mapping[State, State], tau: Sequence, x0: State) -> Path:
    """The unique path from ``x0`` whose image under ``h`` is ``tau``."""
    if not check_coalgebra_morphism(source, target, h):
        raise CoalgebraError("not a coalgebra morphism")
    if not is_path(target, tau):
        raise CoalgebraError(f"{tuple(tau)!r} is not a path in the target")
    if x0 not in source.step:
        raise CoalgebraError(f"unknown state {x0!r}")
    if h[x0] != tau[0]:
        raise CoalgebraError(f"{x0!r} is not sent to the start {tau[0]!r} of the path")
    sigma = [x0]
    for i in range(1, len(tau), 2):
        b = tau[i]
        sigma += [b, source.child(sigma[-1], b)]
    return tuple(sigma)


def map_path(h: Mapping[State, State], sigma: Sequence) -> Path:
    return tuple(h[v] if i % 2 == 0 else v for i, v in enumerate(sigma))


def bisimulation_blocks(coalgebras: Sequence[Coalgebra]) -> dict[tuple[int, State], int]:
    """Coarsest bisimulation on the disjoint union, by partition refinement.

    Keys are ``(index of coalgebra, state)``; equal block numbers mean
    bisimilar states.
    """
    sigs = {c.signature for c in coalgebras}
    if len(sigs) > 1:
        raise CoalgebraError("coalgebras live over different signatures")
    nodes = [(k, x) for k, c in enumerate(coalgebras) for x in c.states]
    block: dict = {}
    labels: dict = {}
    for k, x in nodes:
        block[(k, x)] = labels.setdefault(coalgebras[k].step[x].shape, len(labels))
    count = len(labels)
    while True:
        labels = {}
        refined = {}
        for k, x in nodes:
            e = coalgebras[k].step[x]
            key = (block[(k, x)], tuple(block[(k, y)] for y in e.values))
            refined[(k, x)] = labels.setdefault(key, len(labels))
        block = refined
        if len(labels) == count:
            return block
        count = len(labels)


def bisimilar(c1: Coalgebra, x1: State, c2: Coalgebra, x2: State) -> bool:
    blocks = bisimulation_blocks([c1, c2])
    return blocks[(0, x1)] == blocks[(1, x2)]


def disjoint_union(coalgebras: Sequence[Coalgebra]) -> Coalgebra:
    """Tag states with the index of their coalgebra."""
    sig = coalgebras[0].signature
    step = {}
    for k, c in enumerate(coalgebras):
        if c.signature != sig:
            raise CoalgebraError("coalgebras live over different signatures")
        for x in c.states:
            e = c.step[x]
            step[(k, x)] = PfElement(e.shape, tuple((p, (k, v)) for p, v in e.assignment))
    return Coalgebra(sig, tuple(step), step)


@dataclass(frozen=True, eq=False)
class TreeHandle:
    """A rational tree: a state of a minimized coalgebra.

    Handles compare equal exactly when they denote the same element of the
    final coalgebra.
    """

    universe: Coalgebra
    state: State

    @property
    def signature(self) -> Signature:
        return self.universe.signature

    @property
    def shape(self):
        return self.universe.step[self.state].shape

    @property
    def step(self) -> PfElement:
        return self.universe.step[self.state]

    def child(self, position) -> TreeHandle:
        return TreeHandle(self.universe, self.universe.child(self.state, position))

    def reachable(self) -> list[State]:
        return self.universe.reachable(self.state)

    @cached_property
    def key(self) -> tuple:
        """Canonical serialization of the minimized, BFS-numbered universe."""
        return serialize(minimize(self.universe, self.state).universe)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TreeHandle):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"TreeHandle({self.shape!r}, states={len(self.universe.states)}, at={self.state!r})"


def serialize(c: Coalgebra) -> tuple:
    index = {x: i for i, x in enumerate(c.states)}
    return (c.signature, tuple((c.step[x].shape, tuple(index[y] for y in c.step[x].values)) for x in c.states))


def quotient(c: Coalgebra) -> tuple[Coalgebra, dict]:
    """Quotient of the whole coalgebra by bisimilarity and the quotient map.

    Classes are numbered by first appearance in state order.
    """
    blocks = bisimulation_blocks([c])
    rename: dict = {}
    for x in c.states:
        rename.setdefault(blocks[(0, x)], len(rename))
    h = {x: rename[blocks[(0, x)]] for x in c.states}
    step = {}
    for x in c.states:
        step.setdefault(h[x], apply_on_function(c.signature, h, c.step[x]))
    universe = Coalgebra(c.signature, tuple(range(len(rename))), step)
    return universe, h


def minimize(c: Coalgebra, x: State) -> TreeHandle:
    """Canonical handle for the tree of ``x``: reachable part of ``c`` modulo
    bisimilarity, numbered breadth first from ``x``."""
    reach = c.reachable(x)
    sub = c.restrict_to(reach)
    blocks = bisimulation_blocks([sub])
    rep: dict = {}
    for y in reach:
        rep.setdefault(blocks[(0, y)], y)
    number = {blocks[(0, x)]: 0}
    order = [rep[blocks[(0, x)]]]
    i = 0
    while i < len(order):
        for y in c.step[order[i]].values:
            b = blocks[(0, y)]
            if b not in number:
                number[b] = len(order)
                order.append(rep[b])
        i += 1
    step = {
        number[blocks[(0, y)]]: PfElement(
            c.step[y].shape, tuple((p, number[blocks[(0, v)]]) for p, v in c.step[y].assignment)
        )
        for y in order
    }
    universe = Coalgebra(c.signature, tuple(range(len(order))), step)
    return TreeHandle(universe, 0)


def is_minimal(c: Coalgebra) -> bool:
    blocks = bisimulation_blocks([c])
    return len(set(blocks.values())) == len(c.states)


def relabel(m: SignatureMorphism, c: Coalgebra) -> Coalgebra:
    """Post-compose the structure map with the induced natural transformation."""
    if c.signature != m.source:
        raise CoalgebraError("coalgebra is not over the source of the morphism")
    return Coalgebra(m.target, c.states, {x: transform_element(m, c.step[x]) for x in c.states})


def relabel_tree(m: SignatureMorphism, h: TreeHandle) -> TreeHandle:
    """The image of a rational tree under the induced map of M-types."""
    return minimize(relabel(m, h.universe), h.state)


def inverse_step(c: Coalgebra) -> dict[PfElement, State]:
    """``sup``: inverse of the structure map on its image (requires injectivity)."""
    inv: dict = {}
    for x in c.states:
        e = c.step[x]
        if e in inv:
            raise CoalgebraError(f"structure map is not injective: {inv[e]!r} and {x!r} share {e!r}")
        inv[e] = x
    return inv
