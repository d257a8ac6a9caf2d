"""Star discrepancy of psi(a_n) mod 1 along a set, next to the unrestricted baseline.

    python3 scripts/equidist_ladder.py --set "rfree 2" --poly "0 0 surd 0 1 2 1"
"""

import argparse

from subconvex.cli import parse_ladder
from subconvex.equidist import equidist_experiment
from subconvex.sets import Naturals, parse_set
from subconvex.weyl import parse_poly


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--set", default="rfree 2")
    ap.add_argument("--poly", default="0 0 surd 0 1 2 1")
    ap.add_argument("--m-ladder", default="1e3:1e5:x10")
    ap.add_argument("--mmax", type=int, default=4)
    args = ap.parse_args()

    poly, Ms = parse_poly(args.poly), parse_ladder(args.m_ladder)
    restricted = equidist_experiment(parse_set(args.set), poly, Ms, args.mmax)
    baseline = equidist_experiment(Naturals(), poly, Ms, args.mmax)
    print(f"{'M':>8}  {'D* set':>10}  {'D* naturals':>12}  weyl stats (set, m=1..{args.mmax})")
    for r, b in zip(restricted, baseline):
        stats = " ".join(f"{v:.4f}" for _, v in r.weyl_stats)
        print(f"{r.M:>8d}  {r.star_discrepancy:>10.6f}  {b.star_discrepancy:>12.6f}  {stats}")


if __name__ == "__main__":
    main()
