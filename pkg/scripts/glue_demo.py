"""Glue every compatible family of natural trees over a two-leg cover."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from _config import parse_config
from mtypes.catalog import diamond_map, diamond_site, disjoint_map, disjoint_site
from mtypes.dsl import emit_coalgebra
from mtypes.presheaf import natural_tree_pool, restrict_tree
from mtypes.sheaf import CompatibleFamily, SiteError, glue

SITES = {"disjoint": (disjoint_site, disjoint_map), "diamond": (diamond_site, diamond_map)}


def flat(x) -> str:
    return "".join(x) if isinstance(x, tuple) else str(x)


@dataclass
class GlueConfig:
    site: str = "diamond"
    coalgebras: int = 40
    seed: int = 0
    show: int = 1


def main(cfg: GlueConfig) -> None:
    make_site, make_map = SITES[cfg.site]
    site = make_site()
    f = make_map(site)
    pool = natural_tree_pool(f, f.target, cfg.coalgebras, random.Random(cfg.seed))
    print("natural trees per object:", {C: len(ts) for C, ts in pool.items()})
    glued, rejected = [], 0
    for T1, T2 in itertools.product(pool["V1"], pool["V2"]):
        try:
            F = CompatibleFamily(site, f, "U", ("i1", "i2"), (T1, T2))
        except SiteError:
            rejected += 1
            continue
        T = glue(F)
        assert all(restrict_tree(f, T, c) == t for c, t in zip(F.legs, F.trees))
        glued.append(T)
    print(f"compatible families: {len(glued)}, incompatible pairs: {rejected}, distinct glued trees: {len(set(glued))}")
    for k, T in enumerate(glued[: cfg.show]):
        print(emit_coalgebra(f"G{k}", "f", T.universe, lambda s: f"{flat(s[0])}@{s[1]}",
                             lambda p: f"{p[0]}.{flat(p[1])}", lambda q: f"q{q}"))


if __name__ == "__main__":
    main(parse_config(GlueConfig, __doc__))
