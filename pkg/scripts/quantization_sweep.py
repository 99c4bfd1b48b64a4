"""Quantize E(1)/E(2), plain and twisted, over scales and truncation orders.

For each bundle this records whether the quasitriangular axioms hold mod ħ^{N+1},
whether the ħ¹ term of R⁻¹R̃ equals scale·χ, and (plain E(2) only) whether
quantizing commutes with the twist by 1⊗g.
"""

from __future__ import annotations

import argparse
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from cartierlab import families as fam
from cartierlab import precartier as pc
from cartierlab.quasibialgebra import gauge_twist, verify_quasitriangular


@dataclass
class SweepConfig:
    orders: list[int] = field(default_factory=lambda: [1, 2, 3, 4])
    scales: list[Fraction] = field(default_factory=lambda: [Fraction(1), Fraction(1, 2)])
    seed: int = 1


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-order", type=int, default=4)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    args = ap.parse_args()
    cfg = SweepConfig(orders=list(range(1, args.max_order + 1)), seed=args.seed)
    rng = random.Random(cfg.seed)
    print(f"{'bundle':<14}{'scale':>6}{'N':>3}  axioms  first-order  commutes  seconds")
    for n in (1, 2):
        a = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        b = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        spec = fam.EnSpec(n, a, b)
        for label, P in ((f"E({n})", fam.build_en(spec)), (f"E({n}) twisted", fam.build_en_twisted(spec))):
            for s in cfg.scales:
                for N in cfg.orders:
                    t0 = time.perf_counter()
                    Q = pc.quantize(P, s, N)
                    ok = verify_quasitriangular(Q).passed
                    first = pc.quantized_first_order(Q) == P.chi.with_order(N).scale(s)
                    commutes = "-"
                    if n == 2 and P.base.has_trivial_reassociator():
                        F = fam.en_twist(P.algebra)
                        commutes = str(gauge_twist(Q, F.with_order(N)) == pc.quantize(pc.twist_chi(P, F), s, N))
                    dt = time.perf_counter() - t0
                    print(f"{label:<14}{str(s):>6}{N:>3}  {str(ok):<6}  {str(first):<11}  {commutes:<8}  {dt:.2f}")


if __name__ == "__main__":
    main()
