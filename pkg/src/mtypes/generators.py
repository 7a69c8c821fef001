"""Seeded random and exhaustive generators of small signatures, coalgebras,
indexed signatures and proto-coalgebras."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator

from .coalgebra import Coalgebra
from .indexed import IndexedSignature
from .proto import ProtoCoalgebra
from .signature import PfElement, Signature, apply_functor


@dataclass(frozen=True)
class GenConfig:
    max_shapes: int = 4
    max_arity: int = 3
    max_states: int = 6
    max_index: int = 3
    seed: int = 0

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def random_signature(rng: random.Random, max_shapes: int = 4, max_arity: int = 3,
                     min_shapes: int = 1) -> Signature:
    n = rng.randint(min_shapes, max_shapes)
    return Signature(tuple(
        (f"a{k}", tuple(f"p{j}" for j in range(rng.randint(0, max_arity)))) for k in range(n)
    ))


def random_coalgebra(rng: random.Random, sig: Signature, n_states: int) -> Coalgebra:
    if not sig.shapes:
        raise ValueError("a coalgebra needs at least one shape")
    states = tuple(f"x{k}" for k in range(n_states))
    step = {}
    for x in states:
        a = rng.choice(sig.shapes)
        step[x] = PfElement(a, tuple((p, rng.choice(states)) for p in sig.positions(a)))
    return Coalgebra(sig, states, step)


def all_coalgebras(sig: Signature, n_states: int) -> Iterator[Coalgebra]:
    """Every coalgebra on states ``x0 .. x(n-1)``."""
    states = tuple(f"x{k}" for k in range(n_states))
    pf = apply_functor(sig, states)
    for choice in itertools.product(pf, repeat=n_states):
        yield Coalgebra(sig, states, dict(zip(states, choice)))


def random_indexed(rng: random.Random, max_shapes: int = 4, max_arity: int = 2,
                   max_index: int = 3) -> IndexedSignature:
    sig = random_signature(rng, max_shapes, max_arity)
    index = tuple(range(rng.randint(1, max_index)))
    return IndexedSignature(sig, index, {a: rng.choice(index) for a in sig.shapes})


def random_proto(rng: random.Random, sig: Signature, n_carrier: int, n_ambient: int,
                 hit: float = 0.7) -> ProtoCoalgebra | None:
    """A proto-coalgebra with ``gamma`` landing in the image of ``m`` with
    probability ``hit``; ``None`` when ``P_f(X)`` does not fit in ``Y``."""
    carrier = tuple(f"x{k}" for k in range(n_carrier))
    ambient = tuple(f"y{k}" for k in range(n_ambient))
    pf = apply_functor(sig, carrier)
    if len(pf) > len(ambient):
        return None
    image = rng.sample(ambient, len(pf))
    m = dict(zip(pf, image))
    rest = [y for y in ambient if y not in set(image)] or list(ambient)
    gamma = {x: rng.choice(image) if image and rng.random() < hit else rng.choice(rest) for x in carrier}
    return ProtoCoalgebra(sig, carrier, ambient, gamma, m)
