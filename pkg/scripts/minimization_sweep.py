"""How much do random coalgebras shrink under minimization?"""
from __future__ import annotations

import random
import statistics
import time
from collections import defaultdict
from dataclasses import dataclass

from _config import parse_config
from mtypes.coalgebra import minimize
from mtypes.generators import random_coalgebra, random_signature


@dataclass
class SweepConfig:
    seed: int = 0
    samples: int = 200
    max_states: int = 12
    max_shapes: int = 3
    max_arity: int = 2


def main(cfg: SweepConfig) -> None:
    rng = random.Random(cfg.seed)
    sizes: dict[int, list[int]] = defaultdict(list)
    start = time.perf_counter()
    for _ in range(cfg.samples):
        sig = random_signature(rng, cfg.max_shapes, cfg.max_arity)
        n = rng.randint(1, cfg.max_states)
        c = random_coalgebra(rng, sig, n)
        sizes[n].append(len(minimize(c, c.states[0]).universe.states))
    elapsed = time.perf_counter() - start
    print(f"{'states':>6} {'runs':>5} {'mean min':>9} {'max min':>8}")
    for n in sorted(sizes):
        xs = sizes[n]
        print(f"{n:>6} {len(xs):>5} {statistics.mean(xs):>9.2f} {max(xs):>8}")
    print(f"{cfg.samples} coalgebras in {elapsed:.2f}s")


if __name__ == "__main__":
    main(parse_config(SweepConfig, __doc__))
