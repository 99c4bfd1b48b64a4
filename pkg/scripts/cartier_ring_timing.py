"""Timing of the Cartier ring relation checks and the t13/t14/t^{ij} module checks on regular modules."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from cartierlab import cartier_ring as cr
from cartierlab import families as fam


@dataclass
class TimingConfig:
    a1: tuple = ((2,),)
    b1: tuple = ((-1,),)
    a2: tuple = ((1, 2), (0, 1))
    b2: tuple = ((0, 1), (-1, 3))
    skip_e2_t14: bool = False


def timed(fn, *args):
    t0 = time.perf_counter()
    rep = fn(*args)
    return rep, time.perf_counter() - t0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--skip-e2-t14", action="store_true", help="skip the 4096-dim E(2) run")
    cfg = TimingConfig(skip_e2_t14=ap.parse_args().skip_e2_t14)
    jobs = []
    P1 = fam.build_en(fam.EnSpec(1, cfg.a1, cfg.b1))
    V1 = cr.regular_module(P1.algebra)
    P2 = fam.build_en(fam.EnSpec(2, cfg.a2, cfg.b2))
    V2 = cr.regular_module(P2.algebra)
    for n in (3, 4):
        jobs.append((f"E(1) relations n={n}", 4 ** n, cr.check_cartier_ring_relations, P1, V1, n))
    jobs.append(("E(2) relations n=3", 8 ** 3, cr.check_cartier_ring_relations, P2, V2, 3))
    jobs.append(("E(1) t13", 64, cr.check_t13_presentations, P1, V1))
    jobs.append(("E(1) t14", 256, cr.check_t14_presentations, P1, V1))
    jobs.append(("E(1) tij", 256, cr.check_tij_braid_relations, P1, V1))
    jobs.append(("E(2) t13", 512, cr.check_t13_presentations, P2, V2))
    if not cfg.skip_e2_t14:
        jobs.append(("E(2) t14", 4096, cr.check_t14_presentations, P2, V2))
    print(f"{'job':<22}{'dim':>6}  {'checks':>6}  passed  seconds")
    for label, dim, fn, *args in jobs:
        rep, dt = timed(fn, *args)
        print(f"{label:<22}{dim:>6}  {len(rep):>6}  {str(rep.passed):<6}  {dt:.2f}")


if __name__ == "__main__":
    main()
