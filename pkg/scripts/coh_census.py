"""Coherent parts of random proto-coalgebras: size and chain length."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from _config import parse_config
from mtypes.generators import random_proto, random_signature
from mtypes.proto import chain, coh


@dataclass
class CensusConfig:
    seed: int = 0
    samples: int = 500
    max_carrier: int = 4
    ambient: int = 12
    hit: float = 0.7


def stabilization(p) -> int:
    """First ``n`` with ``chain(p, n) == chain(p, n + 1)``."""
    n = 0
    while chain(p, n) != chain(p, n + 1):
        n += 1
    return n


def main(cfg: CensusConfig) -> None:
    rng = random.Random(cfg.seed)
    fraction: list[float] = []
    steps: Counter = Counter()
    while len(fraction) < cfg.samples:
        sig = random_signature(rng, 2, 2)
        p = random_proto(rng, sig, rng.randint(1, cfg.max_carrier), cfg.ambient, cfg.hit)
        if p is None:
            continue
        fraction.append(len(coh(p).coherent) / len(p.carrier))
        steps[stabilization(p)] += 1
    print(f"mean coherent fraction: {sum(fraction) / len(fraction):.3f}")
    print("chain stabilizes after n steps:")
    for n in sorted(steps):
        print(f"  n={n}: {steps[n]}")


if __name__ == "__main__":
    main(parse_config(CensusConfig, __doc__))
