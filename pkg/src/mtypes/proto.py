"""Proto-coalgebras ``X -> Y <- P_f(X)`` and their coreflection onto coalgebras."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping

from .coalgebra import Coalgebra, CoalgebraError, check_coalgebra_morphism, inverse_step
from .signature import PfElement, Signature, apply_functor, apply_on_function


class ProtoError(ValueError):
    pass


@dataclass(frozen=True)
class ProtoCoalgebra:
    """A pair ``gamma: X -> Y`` and monic ``m: P_f(X) -> Y``."""

    signature: Signature
    carrier: tuple
    ambient: tuple
    gamma: Mapping[Any, Any]
    m: Mapping[PfElement, Any]
    _branch: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "carrier", tuple(self.carrier))
        object.__setattr__(self, "ambient", tuple(self.ambient))
        ambient = set(self.ambient)
        for x in self.carrier:
            if x not in self.gamma:
                raise ProtoError(f"gamma undefined on {x!r}")
            if self.gamma[x] not in ambient:
                raise ProtoError(f"gamma sends {x!r} outside the ambient set")
        inverse: dict = {}
        for e in apply_functor(self.signature, self.carrier):
            if e not in self.m:
                raise ProtoError(f"m undefined on {e!r}")
            y = self.m[e]
            if y not in ambient:
                raise ProtoError(f"m sends {e!r} outside the ambient set")
            if y in inverse:
                raise ProtoError(f"m is not injective: {inverse[y]!r} and {e!r} both go to {y!r}")
            inverse[y] = e
        object.__setattr__(self, "_branch", inverse)


@dataclass(frozen=True)
class CohResult:
    """The coherent part of a proto-coalgebra with its coalgebra structure."""

    coherent: tuple
    coalgebra: Coalgebra
    inclusion: dict


def embed(c: Coalgebra) -> ProtoCoalgebra:
    """The inclusion ``I``: a coalgebra read as ``(gamma, id)``."""
    pf = apply_functor(c.signature, c.states)
    return ProtoCoalgebra(c.signature, c.states, tuple(pf), dict(c.step), {e: e for e in pf})


def branching(p: ProtoCoalgebra, x) -> PfElement | None:
    if x not in p.gamma:
        raise ProtoError(f"{x!r} is not in the carrier")
    return p._branch.get(p.gamma[x])


def chain(p: ProtoCoalgebra, n: int) -> tuple:
    """``X_n``: elements with ``n`` generations of branching descendants."""
    current = tuple(p.carrier)
    for _ in range(n):
        keep = set(current)
        nxt = []
        for x in current:
            e = branching(p, x)
            if e is not None and all(v in keep for v in e.values):
                nxt.append(x)
        if len(nxt) == len(current):
            break
        current = tuple(nxt)
    return current


def coh(p: ProtoCoalgebra) -> CohResult:
    coherent = chain(p, len(p.carrier))
    step = {x: branching(p, x) for x in coherent}
    coalgebra = Coalgebra(p.signature, coherent, step)
    return CohResult(coherent, coalgebra, {x: x for x in coherent})


def coherent_by_paths(p: ProtoCoalgebra, x) -> bool:
    """Coherence read off from paths: every path from ``x`` ends at a
    branching element."""
    seen, stack = set(), [x]
    while stack:
        y = stack.pop()
        if y in seen:
            continue
        seen.add(y)
        e = branching(p, y)
        if e is None:
            return False
        stack.extend(e.values)
    return True


def check_proto_morphism(p: ProtoCoalgebra, q: ProtoCoalgebra, alpha: Mapping, beta: Mapping) -> bool:
    """Both squares of a proto-coalgebra morphism commute."""
    if p.signature != q.signature:
        raise ProtoError("proto-coalgebras live over different signatures")
    for x in p.carrier:
        if alpha.get(x, _MISSING) not in q.gamma:
            raise ProtoError(f"alpha is not a function into the target carrier at {x!r}")
    ambient = set(q.ambient)
    for y in p.ambient:
        if beta.get(y, _MISSING) not in ambient:
            raise ProtoError(f"beta is not a function into the target ambient set at {y!r}")
    if any(beta[p.gamma[x]] != q.gamma[alpha[x]] for x in p.carrier):
        return False
    for e, y in p.m.items():
        if beta[y] != q.m[apply_on_function(p.signature, alpha, e)]:
            return False
    return True


_MISSING = object()


def transpose_to_proto(z: Coalgebra, p: ProtoCoalgebra, phi: Mapping) -> tuple[dict, dict]:
    """A coalgebra morphism ``z -> Coh(p)`` as a proto-morphism ``I(z) -> p``:
    the pair ``(i phi, m P_f(i phi))``."""
    result = coh(p)
    if not check_coalgebra_morphism(z, result.coalgebra, phi):
        raise CoalgebraError("phi is not a coalgebra morphism into the coherent part")
    alpha = {x: result.inclusion[phi[x]] for x in z.states}
    beta = {e: p.m[apply_on_function(z.signature, alpha, e)] for e in apply_functor(z.signature, z.states)}
    return alpha, beta


def transpose_to_coalgebra(z: Coalgebra, p: ProtoCoalgebra, alpha: Mapping, beta: Mapping) -> dict:
    """A proto-morphism ``I(z) -> p`` corestricted to the coherent part."""
    if not check_proto_morphism(embed(z), p, alpha, beta):
        raise ProtoError("the pair does not commute with the proto-coalgebra structure")
    result = coh(p)
    coherent = set(result.coherent)
    inverse = {v: k for k, v in result.inclusion.items()}
    for x in z.states:
        if alpha[x] not in coherent:
            raise ProtoError(f"image {alpha[x]!r} of {x!r} is not coherent")
    phi = {x: inverse[alpha[x]] for x in z.states}
    if not check_coalgebra_morphism(z, result.coalgebra, phi):
        raise ProtoError("corestriction is not a coalgebra morphism")
    return phi


def prefixed_to_fixed(sig: Signature, carrier: Iterable, alpha: Mapping[PfElement, Any]) -> CohResult:
    """The largest fixed point inside a prefixed point ``alpha: P_f(X) >-> X``."""
    carrier = tuple(carrier)
    p = ProtoCoalgebra(sig, carrier, carrier, {x: x for x in carrier}, alpha)
    result = coh(p)
    sup = inverse_step(result.coalgebra)
    if set(sup) != set(apply_functor(sig, result.coherent)):
        raise ProtoError("coherent part is not a fixed point")
    return result


def embedded_proto_morphisms(z: Coalgebra, p: ProtoCoalgebra) -> Iterator[tuple[dict, dict]]:
    """All proto-morphisms ``I(z) -> p``.

    The ambient set of ``I(z)`` is ``P_f(Z)`` with ``m = id``, so the second
    square forces ``beta = m P_f(alpha)``; only ``alpha`` is searched.
    """
    source = embed(z)
    pf = apply_functor(z.signature, z.states)
    for values in itertools.product(p.carrier, repeat=len(z.states)):
        alpha = dict(zip(z.states, values))
        beta = {e: p.m[apply_on_function(z.signature, alpha, e)] for e in pf}
        if check_proto_morphism(source, p, alpha, beta):
            yield alpha, beta
