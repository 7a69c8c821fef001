"""Command-line driver: ``mtypes COMMAND DOCUMENT [flags]``.

Exit codes: 0 on success or a positive verdict, 1 on a negative verdict,
2 on parse, validation or usage errors.
"""
from __future__ import annotations

import argparse
import sys
from typing import Callable, Sequence

from .coalgebra import bisimilar, enumerate_paths, minimize
from .dsl import Document, DslError, emit_coalgebra, load, tree_declaration
from .indexed import chi, equaliser_characterization, fibre_coherent, reindex
from .presheaf import EnumerationLimitError, restrict_tree
from .proto import coh
from .sheaf import GlueError, SiteError, glue, sheaf_violations
from .signature import SignatureError
from .trees import parse_sequence, pathset_member, to_dot, to_json, truncate


class UsageError(Exception):
    pass


def _get(table: dict, name: str, what: str):
    if name not in table:
        raise UsageError(f"unknown {what} {name!r}")
    return table[name]


def _state_ref(doc: Document, text: str) -> tuple[str, str]:
    coalg, dot, state = text.partition(".")
    if not dot:
        raise UsageError(f"expected COALGEBRA.STATE, found {text!r}")
    c = _get(doc.coalgebras, coalg, "coalgebra")
    if state not in c.step:
        raise UsageError(f"unknown state {state!r} of {coalg}")
    return coalg, state


def _coalg_state(doc: Document, args) -> tuple:
    c = _get(doc.coalgebras, args.coalg, "coalgebra")
    if args.state not in c.step:
        raise UsageError(f"unknown state {args.state!r} of {args.coalg}")
    return c, args.state


def _verdict(ok: bool, out: list[str]) -> int:
    out.append("true" if ok else "false")
    return 0 if ok else 1


def cmd_check(doc: Document, args, out: list[str]) -> int:
    out.append(f"ok: {doc.summary()}")
    return 0


def cmd_truncate(doc: Document, args, out: list[str]) -> int:
    c, x = _coalg_state(doc, args)
    if args.depth < 0:
        raise UsageError("depth must be non-negative")
    shape_label, position_label = doc.labels(args.coalg)
    t = truncate(minimize(c, x), args.depth)
    if args.format == "json":
        out.append(to_json(t, shape_label, position_label))
    else:
        out.append(to_dot(t, shape_label, f"{args.coalg}.{x}", position_label).rstrip("\n"))
    return 0


def cmd_paths(doc: Document, args, out: list[str]) -> int:
    c, x = _coalg_state(doc, args)
    if args.max_nodes < 1:
        raise UsageError("--max-nodes must be at least 1")
    _, position_label = doc.labels(args.coalg)
    for path in enumerate_paths(c, x, args.max_nodes):
        out.append(",".join(str(v) if i % 2 == 0 else position_label(v) for i, v in enumerate(path)))
    return 0


def cmd_bisim(doc: Document, args, out: list[str]) -> int:
    c1, x1 = _state_ref(doc, args.left)
    c2, x2 = _state_ref(doc, args.right)
    left, right = doc.coalgebras[c1], doc.coalgebras[c2]
    if left.signature != right.signature:
        raise UsageError(f"{c1} and {c2} live over different signatures")
    return _verdict(bisimilar(left, x1, right, x2), out)


def cmd_minimize(doc: Document, args, out: list[str]) -> int:
    c, x = _coalg_state(doc, args)
    base = doc.refs[("coalgebra", args.coalg)][0]
    h = minimize(c, x)
    out.append(tree_declaration(f"{args.coalg}_{x}_min", base, h, doc.coalgebra_over_natmap(args.coalg) is not None))
    return 0


def cmd_coh(doc: Document, args, out: list[str]) -> int:
    p = _get(doc.protos, args.proto, "proto-coalgebra")
    base = doc.refs[("proto", args.proto)][0]
    result = coh(p)
    out.append("coherent: [" + ", ".join(str(x) for x in result.coherent) + "]")
    out.append(emit_coalgebra(f"{args.proto}_coh", base, result.coalgebra))
    return 0


def cmd_member(doc: Document, args, out: list[str]) -> int:
    c, x = _coalg_state(doc, args)
    if doc.coalgebra_over_natmap(args.coalg):
        raise UsageError("member works on coalgebras over plain signatures")
    seq = parse_sequence(args.seq)
    try:
        ok = pathset_member(minimize(c, x), seq)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return _verdict(ok, out)


def cmd_slice_filter(doc: Document, args, out: list[str]) -> int:
    isig = _get(doc.indexed, args.indexed, "indexed signature")
    c, x = _coalg_state(doc, args)
    if c.signature != isig.base:
        raise UsageError(f"{args.coalg} is not over the base signature of {args.indexed}")
    h = minimize(c, x)
    coherent = fibre_coherent(isig, h)
    if coherent != equaliser_characterization(isig, h):
        raise AssertionError("the two characterizations of fibre-coherent trees disagree")
    if coherent:
        i = isig.fibre_of[h.shape]
        out.append(f"fibre: {i}")
        tagged = chi(isig, h, i)
        out.append(emit_coalgebra(f"{args.coalg}_{x}_tagged", f"{args.indexed}_tagged", tagged.universe,
                                  lambda s: f"{s[0]}@{s[1]}", str, lambda q: f"q{q}"))
    return _verdict(coherent, out)


def cmd_reindex(doc: Document, args, out: list[str]) -> int:
    isig = _get(doc.indexed, args.indexed, "indexed signature")
    target, J, x = _get(doc.maps, args.map, "map")
    if target != args.indexed:
        raise UsageError(f"map {args.map} goes into {target}, not {args.indexed}")
    pulled, projection = reindex(isig, J, x)
    name = f"{args.indexed}_{args.map}"
    lines = [f"signature {name}_base {{"]
    lines += [f"  shape {j}@{a} / [" + ", ".join(ps) + "];" for (j, a), ps in pulled.base.arities]
    lines += ["}", "", f"indexed {name} over {name}_base {{", "  index [" + ", ".join(J) + "];"]
    lines += [f"  fibre {j}@{a} = {j};" for (j, a) in pulled.base.shapes]
    lines += ["}"]
    out.extend(lines)
    return 0


def cmd_sheaf_check(doc: Document, args, out: list[str]) -> int:
    site = _get(doc.sites, args.site, "site")
    X = _get(doc.presheaves, args.presheaf, "presheaf")
    if X.category is not site.category:
        raise UsageError(f"{args.presheaf} and {args.site} live on different categories")
    violations = list(sheaf_violations(X, site))
    for C, K, xs, found in violations:
        out.append(f"cover {C} = [{', '.join(K)}]: family ({', '.join(xs)}) has {len(found)} amalgamations")
    return _verdict(not violations, out)


def cmd_glue(doc: Document, args, out: list[str]) -> int:
    site = _get(doc.sites, args.site, "site")
    F = _get(doc.families, args.family, "family")
    if F.site is not site:
        raise UsageError(f"family {args.family} is not over site {args.site}")
    _, fname, _ = doc.refs[("family", args.family)]
    T = glue(F)
    for c, t in zip(F.legs, F.trees):
        if restrict_tree(F.f, T, c, check=False) != t:
            raise AssertionError(f"glued tree does not restrict to the tree on leg {c}")
    out.append(tree_declaration(f"{args.family}_glued", fname, T, True))
    return 0


COMMANDS: dict[str, Callable] = {
    "check": cmd_check,
    "truncate": cmd_truncate,
    "paths": cmd_paths,
    "bisim": cmd_bisim,
    "minimize": cmd_minimize,
    "coh": cmd_coh,
    "member": cmd_member,
    "slice-filter": cmd_slice_filter,
    "reindex": cmd_reindex,
    "sheaf-check": cmd_sheaf_check,
    "glue": cmd_glue,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtypes", description="Finite coalgebras, rational trees and sheaves of trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("document", help="path to a DSL document")
        return p

    command("check", "parse and validate a document")
    p = command("truncate", "cut a tree at a depth")
    p.add_argument("--coalg", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p = command("paths", "list paths from a state")
    p.add_argument("--coalg", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--max-nodes", type=int, default=3)
    p = command("bisim", "decide bisimilarity of two states")
    p.add_argument("--left", required=True, metavar="C.s")
    p.add_argument("--right", required=True, metavar="D.t")
    p = command("minimize", "print the minimized coalgebra of a state")
    p.add_argument("--coalg", required=True)
    p.add_argument("--state", required=True)
    p = command("coh", "coherent part of a proto-coalgebra")
    p.add_argument("--proto", required=True)
    p = command("member", "decide path-set membership of a sequence")
    p.add_argument("--coalg", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--seq", required=True, help='comma separated, e.g. "node,L,node"')
    p = command("slice-filter", "decide whether a tree stays in one fibre")
    p.add_argument("--indexed", required=True)
    p.add_argument("--coalg", required=True)
    p.add_argument("--state", required=True)
    p = command("reindex", "pull an indexed signature back along a map")
    p.add_argument("--indexed", required=True)
    p.add_argument("--map", required=True)
    p = command("sheaf-check", "decide the sheaf condition")
    p.add_argument("--site", required=True)
    p.add_argument("--presheaf", required=True)
    p = command("glue", "glue a compatible family of trees")
    p.add_argument("--site", required=True)
    p.add_argument("--family", required=True)
    return parser


def run(argv: Sequence[str]) -> tuple[int, str, str]:
    """Run one command; returns ``(exit code, stdout, stderr)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return (2 if exc.code else 0), "", ""
    out: list[str] = []
    try:
        doc = load(args.document)
        code = COMMANDS[args.command](doc, args, out)
    except OSError as exc:
        return 2, "", f"error: {exc}\n"
    except DslError as exc:
        return 2, "", f"{args.document}: {exc}\n"
    except (UsageError, SignatureError, SiteError, GlueError, EnumerationLimitError) as exc:
        return 2, "", f"error: {exc}\n"
    return code, "".join(line + "\n" for line in out), ""


def main(argv: Sequence[str] | None = None) -> int:
    code, stdout, stderr = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(stdout)
    sys.stderr.write(stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
