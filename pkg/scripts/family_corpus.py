"""Run every verifier over a seeded random E(n) corpus and tabulate pass counts per check."""

from __future__ import annotations

import argparse
import json
import random
import time
from collections import Counter
from dataclasses import asdict, dataclass, field

from cartierlab import families as fam
from cartierlab.cli import run_checks


@dataclass
class CorpusConfig:
    sizes: list[int] = field(default_factory=lambda: [1, 2])
    per_size: int = 20
    entry_range: int = 3
    seed: int = 0
    twisted: bool = True


def random_matrix(rng: random.Random, n: int, r: int) -> list[list[int]]:
    return [[rng.randint(-r, r) for _ in range(n)] for _ in range(n)]


def run(cfg: CorpusConfig) -> dict:
    rng = random.Random(cfg.seed)
    passed, total = Counter(), Counter()
    times = []
    for n in cfg.sizes:
        for _ in range(cfg.per_size):
            spec = fam.EnSpec(n, random_matrix(rng, n, cfg.entry_range), random_matrix(rng, n, cfg.entry_range))
            builders = [fam.build_en] + ([fam.build_en_twisted] if cfg.twisted else [])
            for build in builders:
                t0 = time.perf_counter()
                rep = run_checks(build(spec), ["all"])
                times.append(time.perf_counter() - t0)
                for e in rep.entries:
                    key = f"{e.tag or e.name}"
                    total[key] += 1
                    passed[key] += e.passed
    return {
        "config": asdict(cfg),
        "instances": len(times),
        "max_seconds": round(max(times), 3),
        "checks": {k: f"{passed[k]}/{total[k]}" for k in sorted(total)},
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--per-size", type=int, default=CorpusConfig.per_size)
    ap.add_argument("--seed", type=int, default=CorpusConfig.seed)
    ap.add_argument("--no-twisted", action="store_true")
    args = ap.parse_args()
    cfg = CorpusConfig(per_size=args.per_size, seed=args.seed, twisted=not args.no_twisted)
    print(json.dumps(run(cfg), indent=1))


if __name__ == "__main__":
    main()
