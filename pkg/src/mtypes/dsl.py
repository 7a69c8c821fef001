"""A small text format for signatures, coalgebras, indexed signatures,
proto-coalgebras, finite categories, presheaves, sites and compatible
families.

Every declaration has the form ``KIND NAME [header] { item; item; ... }``;
see ``samples/`` for complete documents.  Coalgebras over a presheaf map
write the underlying shapes as ``a@C`` and positions as ``beta.b``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable

from .coalgebra import Coalgebra, CoalgebraError, TreeHandle, minimize
from .indexed import IndexedSignature
from .presheaf import (
    CategoryError,
    FiniteCategory,
    Presheaf,
    PresheafError,
    PresheafMorphism,
    underlying_map,
)
from .proto import ProtoCoalgebra, ProtoError
from .sheaf import CompatibleFamily, Site, SiteError
from .signature import PfElement, Signature, SignatureError

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)|(?P<arrow>->)"
    r"|(?P<ident>[A-Za-z0-9_⊥'@.*]+)|(?P<punct>[{}\[\]();:,=/])"
)

_SEMANTIC_ERRORS = (SignatureError, CoalgebraError, ProtoError, CategoryError, PresheafError, SiteError)


class DslError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col, self.message = line, col, message
        super().__init__(f"line {line}, col {col}: {message}" if line else message)


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DslError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind in ("ident", "punct", "arrow"):
            tokens.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - start + 1))
    return tokens


@dataclass
class Document:
    signatures: dict[str, Signature] = field(default_factory=dict)
    coalgebras: dict[str, Coalgebra] = field(default_factory=dict)
    indexed: dict[str, IndexedSignature] = field(default_factory=dict)
    maps: dict[str, tuple[str, tuple, dict]] = field(default_factory=dict)
    protos: dict[str, ProtoCoalgebra] = field(default_factory=dict)
    categories: dict[str, FiniteCategory] = field(default_factory=dict)
    presheaves: dict[str, Presheaf] = field(default_factory=dict)
    natmaps: dict[str, PresheafMorphism] = field(default_factory=dict)
    sites: dict[str, Site] = field(default_factory=dict)
    families: dict[str, CompatibleFamily] = field(default_factory=dict)
    # names referenced in declaration headers, for emission
    refs: dict[tuple[str, str], tuple] = field(default_factory=dict)
    order: list[tuple[str, str]] = field(default_factory=list)

    def coalgebra_over_natmap(self, name: str) -> str | None:
        base = self.refs[("coalgebra", name)][0]
        return base if base in self.natmaps else None

    def labels(self, coalg: str) -> tuple[Callable, Callable]:
        """Printable names for the shapes and positions of a coalgebra."""
        if self.coalgebra_over_natmap(coalg):
            return (lambda s: f"{s[0]}@{s[1]}"), (lambda p: f"{p[0]}.{p[1]}")
        return str, str

    def summary(self) -> str:
        parts = [
            ("signature", self.signatures), ("coalgebra", self.coalgebras), ("indexed", self.indexed),
            ("map", self.maps), ("proto", self.protos), ("category", self.categories),
            ("presheaf", self.presheaves), ("natmap", self.natmaps), ("site", self.sites),
            ("family", self.families),
        ]
        return ", ".join(f"{len(table)} {kind}" for kind, table in parts if table) or "empty document"


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.doc = Document()

    # -- token helpers --

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None) -> DslError:
        tok = tok or self.tok
        return DslError(message, tok.line, tok.col)

    def accept(self, value: str) -> bool:
        if self.tok.kind != "ident" and self.tok.value == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> Token:
        tok = self.tok
        if tok.kind == "ident" or tok.value != value:
            raise self.error(f"expected {value!r}, found {tok.value or 'end of input'!r}")
        self.i += 1
        return tok

    def keyword(self, word: str) -> Token:
        tok = self.tok
        if tok.kind != "ident" or tok.value != word:
            raise self.error(f"expected {word!r}, found {tok.value or 'end of input'!r}")
        self.i += 1
        return tok

    def ident(self, what: str = "identifier") -> str:
        tok = self.tok
        if tok.kind != "ident":
            raise self.error(f"expected {what}, found {tok.value or 'end of input'!r}")
        self.i += 1
        return tok.value

    def ident_list(self) -> list[str]:
        self.expect("[")
        out = []
        if not self.accept("]"):
            out.append(self.ident())
            while self.accept(","):
                out.append(self.ident())
            self.expect("]")
        return out

    def mapping(self) -> dict[str, str]:
        self.expect("{")
        out: dict[str, str] = {}
        if not self.accept("}"):
            while True:
                tok = self.tok
                k = self.ident()
                self.expect(":")
                if k in out:
                    raise self.error(f"key {k!r} given twice", tok)
                out[k] = self.ident()
                if not self.accept(","):
                    break
            self.expect("}")
        return out

    def body(self, item: Callable[[str, Token], None]) -> None:
        self.expect("{")
        while not self.accept("}"):
            tok = self.tok
            item(self.ident("item keyword"), tok)
            self.expect(";")

    def lookup(self, table: dict, name: str, what: str, tok: Token):
        if name not in table:
            raise self.error(f"unknown {what} {name!r}", tok)
        return table[name]

    # -- document --

    def parse(self) -> Document:
        handlers = {
            "signature": self.signature, "coalgebra": self.coalgebra, "indexed": self.indexed,
            "map": self.index_map, "proto": self.proto, "category": self.category,
            "presheaf": self.presheaf, "natmap": self.natmap, "site": self.site, "family": self.family,
        }
        while self.tok.kind != "eof":
            tok = self.tok
            kind = self.ident("declaration keyword")
            if kind not in handlers:
                raise self.error(f"unknown declaration {kind!r}", tok)
            name_tok = self.tok
            name = self.ident("declaration name")
            if "." in name or "@" in name:
                raise self.error(f"declaration names may not contain '.' or '@': {name!r}", name_tok)
            if (kind, name) in self.doc.refs:
                raise self.error(f"{kind} {name!r} declared twice", name_tok)
            try:
                handlers[kind](name, tok)
            except _SEMANTIC_ERRORS as exc:
                raise self.error(f"{kind} {name}: {exc}", tok) from None
            self.doc.order.append((kind, name))
        return self.doc

    def signature(self, name: str, start: Token) -> None:
        arities: list = []
        point: list = []

        def item(kw, tok):
            if kw == "shape":
                shape = self.ident("shape")
                self.expect("/")
                arities.append((shape, tuple(self.ident_list())))
            elif kw == "point":
                point.append(self.ident("shape"))
            else:
                raise self.error(f"unknown signature item {kw!r}", tok)

        self.body(item)
        if len(point) > 1:
            raise self.error("more than one point", start)
        self.doc.signatures[name] = Signature(tuple(arities), point[0] if point else None)
        self.doc.refs[("signature", name)] = ()

    def _base_signature(self, tok: Token) -> tuple[str, Signature, bool]:
        base = self.ident("signature")
        if base in self.doc.signatures:
            return base, self.doc.signatures[base], False
        if base in self.doc.natmaps:
            return base, underlying_map(self.doc.natmaps[base]), True
        raise self.error(f"unknown signature or natmap {base!r}", tok)

    def coalgebra(self, name: str, start: Token) -> None:
        self.keyword("over")
        base, sig, over_map = self._base_signature(self.tok)
        steps: dict = {}

        def item(kw, tok):
            if kw != "state":
                raise self.error(f"unknown coalgebra item {kw!r}", tok)
            state = self.ident("state")
            if state in steps:
                raise self.error(f"state {state!r} defined twice", tok)
            self.expect("=")
            shape_tok = self.tok
            shape = self._split(self.ident("shape"), "@", over_map, shape_tok)
            assignment = {}
            if self.accept("("):
                if not self.accept(")"):
                    while True:
                        ptok = self.tok
                        pos = self._split(self.ident("position"), ".", over_map, ptok)
                        self.expect(":")
                        if pos in assignment:
                            raise self.error(f"position {pos!r} given twice", ptok)
                        assignment[pos] = self.ident("state")
                        if not self.accept(","):
                            break
                    self.expect(")")
            try:
                steps[state] = sig.element(shape, assignment)
            except SignatureError as exc:
                raise self.error(f"state {state}: {exc}", shape_tok) from None

        self.body(item)
        self.doc.coalgebras[name] = Coalgebra(sig, tuple(steps), steps)
        self.doc.refs[("coalgebra", name)] = (base,)

    def _split(self, text: str, sep: str, active: bool, tok: Token):
        if not active:
            return text
        left, found, right = text.partition(sep) if sep == "." else text.rpartition(sep)
        if not found:
            raise self.error(f"expected a name of the form x{sep}y, found {text!r}", tok)
        return (left, right)

    def indexed(self, name: str, start: Token) -> None:
        self.keyword("over")
        tok = self.tok
        base = self.ident("signature")
        sig = self.lookup(self.doc.signatures, base, "signature", tok)
        index: list = []
        fibre: dict = {}

        def item(kw, tok):
            if kw == "index":
                index.extend(self.ident_list())
            elif kw == "fibre":
                shape = self.ident("shape")
                self.expect("=")
                fibre[shape] = self.ident("index")
            else:
                raise self.error(f"unknown indexed item {kw!r}", tok)

        self.body(item)
        self.doc.indexed[name] = IndexedSignature(sig, tuple(index), fibre)
        self.doc.refs[("indexed", name)] = (base,)

    def index_map(self, name: str, start: Token) -> None:
        self.expect(":")
        J = self.ident_list()
        self.expect("->")
        tok = self.tok
        target = self.ident("indexed signature")
        isig = self.lookup(self.doc.indexed, target, "indexed signature", tok)
        values: dict = {}

        def item(j, tok):
            if j not in J:
                raise self.error(f"{j!r} is not in the domain", tok)
            self.expect("=")
            vtok = self.tok
            v = self.ident("index")
            if v not in isig.index:
                raise self.error(f"{v!r} is not an index of {target}", vtok)
            values[j] = v

        self.body(item)
        missing = [j for j in J if j not in values]
        if missing:
            raise self.error(f"map {name} undefined on {missing}", start)
        self.doc.maps[name] = (target, tuple(J), values)
        self.doc.refs[("map", name)] = (target,)

    def proto(self, name: str, start: Token) -> None:
        self.keyword("over")
        tok = self.tok
        base = self.ident("signature")
        sig = self.lookup(self.doc.signatures, base, "signature", tok)
        carrier: list = []
        ambient: list = []
        gamma: dict = {}
        m: dict = {}

        def item(kw, tok):
            if kw == "carrier":
                carrier.extend(self.ident_list())
            elif kw == "ambient":
                ambient.extend(self.ident_list())
            elif kw == "gamma":
                x = self.ident("element")
                self.expect("=")
                gamma[x] = self.ident("element")
            elif kw == "m":
                stok = self.tok
                shape = self.ident("shape")
                assignment = {}
                if self.accept("("):
                    if not self.accept(")"):
                        while True:
                            p = self.ident("position")
                            self.expect(":")
                            assignment[p] = self.ident("element")
                            if not self.accept(","):
                                break
                        self.expect(")")
                self.expect("=")
                try:
                    e = sig.element(shape, assignment)
                except SignatureError as exc:
                    raise self.error(str(exc), stok) from None
                m[e] = self.ident("element")
            else:
                raise self.error(f"unknown proto item {kw!r}", tok)

        self.body(item)
        self.doc.protos[name] = ProtoCoalgebra(sig, tuple(carrier), tuple(ambient), gamma, m)
        self.doc.refs[("proto", name)] = (base,)

    def category(self, name: str, start: Token) -> None:
        objects: list = []
        arrows: dict = {}
        compose: dict = {}
        pullbacks: dict = {}

        def plain(tok):
            v = self.ident()
            if "." in v or "@" in v:
                raise self.error(f"names in categories may not contain '.' or '@': {v!r}", tok)
            return v

        def item(kw, tok):
            if kw == "object":
                objects.append(plain(self.tok))
                while self.accept(","):
                    objects.append(plain(self.tok))
            elif kw == "morphism":
                f = plain(self.tok)
                self.expect(":")
                d = self.ident("object")
                self.expect("->")
                arrows[f] = (d, self.ident("object"))
            elif kw == "compose":
                g = self.ident("morphism")
                self.keyword("after")
                f = self.ident("morphism")
                self.expect("=")
                compose[(g, f)] = self.ident("morphism")
            elif kw == "pullback":
                f = self.ident("morphism")
                self.expect(",")
                g = self.ident("morphism")
                self.expect("=")
                P = self.ident("object")
                self.expect("(")
                p1 = self.ident("morphism")
                self.expect(",")
                p2 = self.ident("morphism")
                self.expect(")")
                pullbacks[(f, g)] = (P, p1, p2)
            else:
                raise self.error(f"unknown category item {kw!r}", tok)

        self.body(item)
        self.doc.categories[name] = FiniteCategory.build(objects, arrows, compose, pullbacks)
        self.doc.refs[("category", name)] = ()

    def presheaf(self, name: str, start: Token) -> None:
        self.keyword("over")
        tok = self.tok
        cname = self.ident("category")
        cat = self.lookup(self.doc.categories, cname, "category", tok)
        sections: dict = {}
        restriction: dict = {}

        def item(kw, tok):
            if kw == "sections":
                C = self.ident("object")
                self.expect("=")
                xs = self.ident_list()
                bad = [x for x in xs if "." in x or "@" in x]
                if bad:
                    raise self.error(f"section names may not contain '.' or '@': {bad}", tok)
                sections[C] = tuple(xs)
            elif kw == "restrict":
                beta = self.ident("morphism")
                self.expect("=")
                restriction[beta] = self.mapping()
            else:
                raise self.error(f"unknown presheaf item {kw!r}", tok)

        self.body(item)
        unknown = [C for C in sections if C not in cat.objects]
        if unknown:
            raise self.error(f"unknown objects {unknown}", start)
        self.doc.presheaves[name] = Presheaf(cat, sections, restriction)
        self.doc.refs[("presheaf", name)] = (cname,)

    def natmap(self, name: str, start: Token) -> None:
        self.expect(":")
        tok = self.tok
        src = self.ident("presheaf")
        self.expect("->")
        tok2 = self.tok
        tgt = self.ident("presheaf")
        B = self.lookup(self.doc.presheaves, src, "presheaf", tok)
        A = self.lookup(self.doc.presheaves, tgt, "presheaf", tok2)
        comps: dict = {}

        def item(kw, tok):
            if kw != "at":
                raise self.error(f"unknown natmap item {kw!r}", tok)
            C = self.ident("object")
            self.expect("=")
            comps[C] = self.mapping()

        self.body(item)
        self.doc.natmaps[name] = PresheafMorphism(B, A, comps)
        self.doc.refs[("natmap", name)] = (src, tgt)

    def site(self, name: str, start: Token) -> None:
        self.keyword("over")
        tok = self.tok
        cname = self.ident("category")
        cat = self.lookup(self.doc.categories, cname, "category", tok)
        covers: dict = {}

        def item(kw, tok):
            if kw != "cover":
                raise self.error(f"unknown site item {kw!r}", tok)
            C = self.ident("object")
            self.expect("=")
            covers.setdefault(C, []).append(self.ident_list())

        self.body(item)
        self.doc.sites[name] = Site.build(cat, covers)
        self.doc.refs[("site", name)] = (cname,)

    def family(self, name: str, start: Token) -> None:
        self.keyword("over")
        tok = self.tok
        sname = self.ident("site")
        site = self.lookup(self.doc.sites, sname, "site", tok)
        self.keyword("for")
        tok = self.tok
        fname = self.ident("natmap")
        f = self.lookup(self.doc.natmaps, fname, "natmap", tok)
        self.keyword("at")
        target = self.ident("object")
        legs, trees, refs = [], [], []

        def item(kw, tok):
            if kw != "leg":
                raise self.error(f"unknown family item {kw!r}", tok)
            legs.append(self.ident("morphism"))
            self.expect("=")
            ttok = self.tok
            ref = self.ident("tree reference")
            refs.append(ref)
            trees.append(self.tree_ref(ref, ttok, fname))

        self.body(item)
        self.doc.families[name] = CompatibleFamily(site, f, target, tuple(legs), tuple(trees))
        self.doc.refs[("family", name)] = (sname, fname, tuple(refs))

    def tree_ref(self, text: str, tok: Token, natmap: str) -> TreeHandle:
        coalg, _, state = text.partition(".")
        c = self.lookup(self.doc.coalgebras, coalg, "coalgebra", tok)
        if self.doc.refs[("coalgebra", coalg)][0] != natmap:
            raise self.error(f"coalgebra {coalg} is not over natmap {natmap}", tok)
        if state not in c.step:
            raise self.error(f"unknown state {state!r} of {coalg}", tok)
        return minimize(c, state)


def parse(text: str) -> Document:
    return _Parser(text).parse()


# -- emission -----------------------------------------------------------------

def _names(xs) -> str:
    return "[" + ", ".join(str(x) for x in xs) + "]"


def _pairs(mapping) -> str:
    return "{ " + ", ".join(f"{k}: {v}" for k, v in mapping.items()) + " }" if mapping else "{ }"


def emit_coalgebra(name: str, base: str, c: Coalgebra, shape_label: Callable = str,
                   position_label: Callable = str, state_label: Callable = str) -> str:
    lines = [f"coalgebra {name} over {base} {{"]
    for x in c.states:
        e = c.step[x]
        args = ", ".join(f"{position_label(p)}: {state_label(v)}" for p, v in e.assignment)
        lines.append(f"  state {state_label(x)} = {shape_label(e.shape)}({args});")
    lines.append("}")
    return "\n".join(lines)


def emit(doc: Document) -> str:
    """Render a document in declaration order; parsing the result gives an
    equivalent document."""
    out = []
    for kind, name in doc.order:
        refs = doc.refs[(kind, name)]
        if kind == "signature":
            sig = doc.signatures[name]
            lines = [f"signature {name} {{"]
            lines += [f"  shape {a} / {_names(ps)};" for a, ps in sig.arities]
            if sig.point is not None:
                lines.append(f"  point {sig.point};")
            out.append("\n".join(lines + ["}"]))
        elif kind == "coalgebra":
            shape_label, position_label = doc.labels(name)
            out.append(emit_coalgebra(name, refs[0], doc.coalgebras[name], shape_label, position_label))
        elif kind == "indexed":
            isig = doc.indexed[name]
            lines = [f"indexed {name} over {refs[0]} {{", f"  index {_names(isig.index)};"]
            lines += [f"  fibre {a} = {isig.fibre_of[a]};" for a in isig.base.shapes]
            out.append("\n".join(lines + ["}"]))
        elif kind == "map":
            target, J, values = doc.maps[name]
            lines = [f"map {name} : {_names(J)} -> {target} {{"] + [f"  {j} = {values[j]};" for j in J]
            out.append("\n".join(lines + ["}"]))
        elif kind == "proto":
            p = doc.protos[name]
            lines = [f"proto {name} over {refs[0]} {{", f"  carrier {_names(p.carrier)};",
                     f"  ambient {_names(p.ambient)};"]
            lines += [f"  gamma {x} = {p.gamma[x]};" for x in p.carrier]
            for e, y in p.m.items():
                args = ", ".join(f"{q}: {v}" for q, v in e.assignment)
                lines.append(f"  m {e.shape}({args}) = {y};")
            out.append("\n".join(lines + ["}"]))
        elif kind == "category":
            cat = doc.categories[name]
            ids = set(cat.identities.values())
            lines = [f"category {name} {{"] + [f"  object {C};" for C in cat.objects]
            lines += [f"  morphism {f} : {d} -> {c};" for f, (d, c) in cat.arrows.items() if f not in ids]
            lines += [f"  compose {g} after {f} = {h};" for (g, f), h in cat.composition.items()
                      if g not in ids and f not in ids]
            lines += [f"  pullback {f}, {g} = {P} ({p1}, {p2});" for (f, g), (P, p1, p2) in cat.pullbacks.items()
                      if f not in ids and g not in ids]
            out.append("\n".join(lines + ["}"]))
        elif kind == "presheaf":
            X = doc.presheaves[name]
            ids = set(X.category.identities.values())
            lines = [f"presheaf {name} over {refs[0]} {{"]
            lines += [f"  sections {C} = {_names(xs)};" for C, xs in X.sections.items()]
            lines += [f"  restrict {b} = {_pairs(r)};" for b, r in X.restriction.items() if b not in ids]
            out.append("\n".join(lines + ["}"]))
        elif kind == "natmap":
            f = doc.natmaps[name]
            lines = [f"natmap {name} : {refs[0]} -> {refs[1]} {{"]
            lines += [f"  at {C} = {_pairs(comp)};" for C, comp in f.components.items()]
            out.append("\n".join(lines + ["}"]))
        elif kind == "site":
            site = doc.sites[name]
            lines = [f"site {name} over {refs[0]} {{"]
            lines += [f"  cover {C} = {_names(K)};" for C, Ks in site.covers.items() for K in Ks]
            out.append("\n".join(lines + ["}"]))
        elif kind == "family":
            out.append(_emit_family(doc, name))
    return "\n\n".join(out) + "\n"


def _emit_family(doc: Document, name: str) -> str:
    F = doc.families[name]
    sname, fname, refs = doc.refs[("family", name)]
    lines = [f"family {name} over {sname} for {fname} at {F.target} {{"]
    lines += [f"  leg {c} = {ref};" for c, ref in zip(F.legs, refs)]
    return "\n".join(lines + ["}"])


def tree_declaration(name: str, base: str, h: TreeHandle, over_natmap: bool) -> str:
    """A minimized tree as a coalgebra declaration with states ``q0, q1, ...``."""
    if over_natmap:
        return emit_coalgebra(name, base, h.universe, lambda s: f"{s[0]}@{s[1]}",
                              lambda p: f"{p[0]}.{p[1]}", lambda x: f"q{x}")
    return emit_coalgebra(name, base, h.universe, state_label=lambda x: f"q{x}")


def load(path: str) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def element_text(e: PfElement, label: Callable[[Any], str] = str) -> str:
    return f"{e.shape}(" + ", ".join(f"{p}: {label(v)}" for p, v in e.assignment) + ")"
