"""Exhaustive scan over small b-matrices for E(2): is the Cartier condition exactly skew-symmetry of b?"""

from __future__ import annotations

import argparse
import itertools
from dataclasses import dataclass

from cartierlab import families as fam
from cartierlab.precartier import verify_cartier


@dataclass
class ScanConfig:
    n: int = 2
    entries: tuple[int, ...] = (-1, 0, 1)
    a_matrix: tuple = ((1, 2), (0, -1))


def scan(cfg: ScanConfig) -> tuple[int, int, list]:
    agree = total = 0
    mismatches = []
    for flat in itertools.product(cfg.entries, repeat=cfg.n * cfg.n):
        b = [list(flat[i * cfg.n:(i + 1) * cfg.n]) for i in range(cfg.n)]
        skew = all(b[i][j] == -b[j][i] for i in range(cfg.n) for j in range(cfg.n))
        cartier = verify_cartier(fam.build_en(fam.EnSpec(cfg.n, cfg.a_matrix, b)))
        total += 1
        if cartier == skew:
            agree += 1
        else:
            mismatches.append(b)
    return agree, total, mismatches


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--range", type=int, default=1, help="entries in [-range, range]")
    args = ap.parse_args()
    cfg = ScanConfig(entries=tuple(range(-args.range, args.range + 1)))
    agree, total, bad = scan(cfg)
    print(f"{agree}/{total} matrices agree with the skew-symmetry criterion")
    for b in bad:
        print("mismatch:", b)


if __name__ == "__main__":
    main()
