"""Polynomial signatures (containers) and the action of their functors.

A map ``f: B -> A`` is stored fibrewise: every shape ``a`` in ``A`` carries
the ordered tuple of its positions ``B_a``.  Elements of ``P_f(X)`` are
:class:`PfElement` values, a shape together with an assignment of carrier
elements to its positions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Mapping, Sequence

Shape = Hashable
Position = Hashable

BOTTOM = "⊥"


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class PfElement:
    """An element ``(a, t)`` of ``P_f(X)``.

    ``assignment`` lists ``(position, value)`` pairs in the declared
    position order of ``shape``.
    """

    shape: Shape
    assignment: tuple[tuple[Position, Any], ...] = ()

    def __getitem__(self, position: Position) -> Any:
        for p, v in self.assignment:
            if p == position:
                return v
        raise KeyError(position)

    @property
    def positions(self) -> tuple[Position, ...]:
        return tuple(p for p, _ in self.assignment)

    @property
    def values(self) -> tuple[Any, ...]:
        return tuple(v for _, v in self.assignment)

    def as_dict(self) -> dict[Position, Any]:
        return dict(self.assignment)

    def __repr__(self) -> str:
        inner = ", ".join(f"{p!r}: {v!r}" for p, v in self.assignment)
        return f"{self.shape!r}({inner})"


@dataclass(frozen=True)
class Signature:
    """Shapes with finite, ordered position sets, optionally pointed.

    ``arities`` is a sequence of ``(shape, positions)`` pairs in declaration
    order.  ``point`` names a shape with no positions, the constant ``⊥``.
    """

    arities: tuple[tuple[Shape, tuple[Position, ...]], ...]
    point: Shape | None = None
    _fibres: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        arities = tuple((a, tuple(ps)) for a, ps in self.arities)
        object.__setattr__(self, "arities", arities)
        validate_signature(self)
        object.__setattr__(self, "_fibres", dict(arities))

    @classmethod
    def of(cls, fibres: Mapping[Shape, Iterable[Position]], point: Shape | None = None) -> Signature:
        return cls(tuple((a, tuple(ps)) for a, ps in fibres.items()), point)

    @property
    def shapes(self) -> tuple[Shape, ...]:
        return tuple(a for a, _ in self.arities)

    def positions(self, shape: Shape) -> tuple[Position, ...]:
        try:
            return self._fibres[shape]
        except KeyError:
            raise SignatureError(f"unknown shape {shape!r}") from None

    def arity(self, shape: Shape) -> int:
        return len(self.positions(shape))

    def __contains__(self, shape: object) -> bool:
        return shape in self._fibres

    def __len__(self) -> int:
        return len(self.arities)

    def element(self, shape: Shape, assignment: Mapping[Position, Any] | Sequence[Any] = ()) -> PfElement:
        """Build a validated :class:`PfElement`; ``assignment`` may be a mapping
        or a sequence of values in position order."""
        positions = self.positions(shape)
        if isinstance(assignment, Mapping):
            if set(assignment) != set(positions):
                missing = [p for p in positions if p not in assignment]
                extra = [p for p in assignment if p not in positions]
                raise SignatureError(
                    f"assignment for {shape!r} must cover exactly its positions "
                    f"(missing {missing}, unexpected {extra})"
                )
            values = [assignment[p] for p in positions]
        else:
            values = list(assignment)
            if len(values) != len(positions):
                raise SignatureError(f"{shape!r} takes {len(positions)} arguments, got {len(values)}")
        return PfElement(shape, tuple(zip(positions, values)))

    def check_element(self, e: PfElement) -> None:
        if e.shape not in self:
            raise SignatureError(f"unknown shape {e.shape!r}")
        if e.positions != self.positions(e.shape):
            raise SignatureError(f"element {e!r} does not match the positions of {e.shape!r}")

    def without_point(self) -> Signature:
        """The signature with its designated point shape removed."""
        if self.point is None:
            raise SignatureError("signature is not pointed")
        return Signature(tuple((a, ps) for a, ps in self.arities if a != self.point))


def validate_signature(sig: Signature) -> Signature:
    seen: set = set()
    for shape, positions in sig.arities:
        if shape in seen:
            raise SignatureError(f"duplicate shape {shape!r}")
        seen.add(shape)
        if len(set(positions)) != len(positions):
            raise SignatureError(f"duplicate position in shape {shape!r}: {list(positions)}")
    if sig.point is not None:
        fibres = dict(sig.arities)
        if sig.point not in fibres:
            raise SignatureError(f"point {sig.point!r} is not a shape")
        if fibres[sig.point]:
            raise SignatureError(f"point {sig.point!r} must have no positions")
    return sig


def apply_functor(sig: Signature, carrier: Iterable[Any]) -> list[PfElement]:
    """All elements of ``P_f(X)`` for a finite carrier, in a deterministic order."""
    carrier = list(dict.fromkeys(carrier))
    out = []
    for shape, positions in sig.arities:
        for values in itertools.product(carrier, repeat=len(positions)):
            out.append(PfElement(shape, tuple(zip(positions, values))))
    return out


def functor_cardinality(sig: Signature, n: int) -> int:
    return sum(n ** len(ps) for _, ps in sig.arities)


def apply_on_function(sig: Signature, phi: Mapping[Any, Any], e: PfElement) -> PfElement:
    """``P_f(phi)``: post-compose the assignment with ``phi``, keeping the shape."""
    sig.check_element(e)
    try:
        return PfElement(e.shape, tuple((p, phi[v]) for p, v in e.assignment))
    except KeyError as exc:
        raise ValueError(f"value {exc.args[0]!r} of {e!r} is outside the domain of the function") from None


@dataclass(frozen=True)
class SignatureMorphism:
    """A pullback square between containers, stored fibrewise.

    ``shape_map`` sends source shapes to target shapes and
    ``position_bijections[a]`` maps the positions of ``a`` bijectively onto
    those of ``shape_map[a]``.
    """

    source: Signature
    target: Signature
    shape_map: Mapping[Shape, Shape]
    position_bijections: Mapping[Shape, Mapping[Position, Position]]

    def __post_init__(self):
        for a in self.source.shapes:
            if a not in self.shape_map:
                raise SignatureError(f"shape map undefined on {a!r}")
            image = self.shape_map[a]
            if image not in self.target:
                raise SignatureError(f"{a!r} is sent to unknown shape {image!r}")
            beta = self.position_bijections.get(a, {})
            src, tgt = self.source.positions(a), self.target.positions(image)
            values = list(beta.values())
            if set(beta) != set(src) or set(values) != set(tgt) or len(values) != len(tgt):
                raise SignatureError(f"positions of {a!r} are not in bijection with those of {image!r}")

    def __call__(self, shape: Shape) -> Shape:
        return self.shape_map[shape]


def shape_relabelling(source: Signature, target: Signature, shape_map: Mapping[Shape, Shape]) -> SignatureMorphism:
    """Morphism that renames shapes and matches positions by declared order."""
    bijections = {
        a: dict(zip(source.positions(a), target.positions(shape_map[a])))
        for a in source.shapes
    }
    return SignatureMorphism(source, target, dict(shape_map), bijections)


def identity_morphism(sig: Signature) -> SignatureMorphism:
    return shape_relabelling(sig, sig, {a: a for a in sig.shapes})


def transform_element(m: SignatureMorphism, e: PfElement) -> PfElement:
    """The natural transformation induced by the square: relabel the shape and
    transport the assignment along the position bijection."""
    if e.shape not in m.source:
        raise SignatureError(f"shape {e.shape!r} is not in the source signature")
    m.source.check_element(e)
    target_shape = m.shape_map[e.shape]
    beta = m.position_bijections[e.shape]
    moved = {beta[p]: v for p, v in e.assignment}
    return PfElement(target_shape, tuple((q, moved[q]) for q in m.target.positions(target_shape)))


def fresh_point_name(sig: Signature) -> str:
    name, k = BOTTOM, 0
    while name in sig:
        k += 1
        name = f"{BOTTOM}{k}"
    return name


def point_signature(sig: Signature) -> Signature:
    """``f_⊥``: freely add a nullary shape and designate it as the point."""
    bottom = fresh_point_name(sig)
    return Signature(sig.arities + ((bottom, ()),), point=bottom)


def point_inclusion(sig: Signature) -> SignatureMorphism:
    """The square ``A -> A + 1`` inducing the monic ``P_f -> P_{f_⊥}``."""
    return shape_relabelling(sig, point_signature(sig), {a: a for a in sig.shapes})
