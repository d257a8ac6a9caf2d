"""Restricted Weyl sums against the omega_p(k) envelope over a grid of (k, p, N).

    python3 scripts/weyl_screen.py --set "rfree 2" --alpha "surd 0 1 2 1" --degrees 2 3 4
"""

import argparse
from fractions import Fraction

from subconvex.reals import parse_real_text
from subconvex.sets import materialize, parse_set
from subconvex.weyl import PolyCoeffs, weyl_screen


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--set", default="rfree 2")
    ap.add_argument("--alpha", default="surd 0 1 2 1")
    ap.add_argument("--degrees", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--p", nargs="+", default=["1", "4/3", "3/2", "7/4"])
    ap.add_argument("--N", type=int, nargs="+", default=[10**3, 10**4, 10**5])
    ap.add_argument("--epsilon", type=float, default=0.1)
    args = ap.parse_args()

    expr, alpha = parse_set(args.set), parse_real_text(args.alpha)
    print("k  p      N        q            omega     |F_k|        envelope     ratio")
    for N in args.N:
        s = materialize(expr, N)
        for k in args.degrees:
            poly = PolyCoeffs.monomial(k, alpha)
            for ptxt in args.p:
                r = weyl_screen(s, poly, Fraction(ptxt), args.epsilon)
                print(f"{k}  {ptxt:<6} {N:<8d} {r.q:<12d} {r.omega:.5f}  {r.observed:<12.5g} {r.envelope:<12.5g} {r.ratio:.4f}")


if __name__ == "__main__":
    main()
