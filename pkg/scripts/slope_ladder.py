"""Fit log I_p against log N for a set expression and print the ratio table.

    python3 scripts/slope_ladder.py --set "rfree 2" --p 1.5 1.75 --ladder 1024:65536:x2
"""

import argparse

from subconvex.cli import parse_ladder
from subconvex.moments import subconvexity_fit
from subconvex.sets import parse_set


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--set", default="naturals")
    ap.add_argument("--p", type=float, nargs="+", default=[1.25, 1.5, 1.75])
    ap.add_argument("--ladder", default="1024:65536:x2")
    args = ap.parse_args()

    expr = parse_set(args.set)
    Ns = parse_ladder(args.ladder)
    for p in args.p:
        fit = subconvexity_fit(expr, p, Ns)
        print(f"{expr.to_text()}  p={p}  slope={fit.slope:.4f}  rms={fit.residual_rms:.2e}  "
              f"ratio spread={fit.ratio_spread:.2f}  screen={'pass' if fit.passes else 'fail'}")
        for e, r in zip(fit.estimates, fit.ratios):
            print(f"    N={e.N:>8d}  A(N)={e.count:>8d}  I_p={e.value:.6g}  ratio={r:.4f}  delta={e.refinement_delta:.2e}")


if __name__ == "__main__":
    main()
