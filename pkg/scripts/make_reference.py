"""Recompute the pinned regression values in reference/reference_values.json.

Run after any change that legitimately moves a screened quantity:

    python3 scripts/make_reference.py
"""

import json
import math
from fractions import Fraction
from pathlib import Path

from subconvex.arith import dirichlet_char, restricted_average, restricted_char_sum, sieve
from subconvex.equidist import equidist_experiment
from subconvex.moments import discrete_screen
from subconvex.reals import QuadraticSurd
from subconvex.sets import Affine, Naturals, RFree, materialize
from subconvex.weyl import PolyCoeffs, weyl_screen

OUT = Path(__file__).resolve().parents[1] / "reference" / "reference_values.json"
SQRT2 = QuadraticSurd(0, 1, 2, 1)
DISCRETE_QS = [2, 8, 64, 512, 4096, 10_000, 40_000]


def main():
    ref = {}

    s = materialize(RFree(2), 10_000)
    r = weyl_screen(s, PolyCoeffs.monomial(3, SQRT2), Fraction(4, 3), 0.1)
    ref["weyl_screen_rfree2_k3"] = {"ratio": r.ratio, "a": r.a, "q": r.q, "observed": r.observed}

    reps = equidist_experiment(RFree(2), PolyCoeffs((0, 0, SQRT2)), [1000, 10_000, 100_000])
    ref["equidist_rfree2_sqrt2_n2"] = {str(x.M): x.star_discrepancy for x in reps}

    N = 1_000_000
    mu = sieve("mobius", N)
    shifted = materialize(Affine(1, 1, RFree(2)), N)
    ref["mobius_shifted_squarefree_1e6"] = abs(restricted_average(mu, shifted))
    ref["mobius_naturals_1e6"] = abs(restricted_average(mu, materialize(Naturals(), N)))

    screen = {}
    for name, expr in (("naturals", Naturals()), ("rfree 2", RFree(2))):
        rows = discrete_screen(materialize(expr, 10_000), 1.5, DISCRETE_QS)
        screen[name] = {str(row.q): row.ratio for row in rows}
    worst = max(v for d in screen.values() for v in d.values())
    ref["discrete_ratios"] = screen
    ref["discrete_ratio_ceiling"] = math.ceil(worst * 1.2 * 100) / 100

    chi = dirichlet_char(10007, 5003)
    cs = restricted_char_sum(chi, materialize(RFree(2), 100_000), 1.1)
    ref["char_sum_q10007_rfree2"] = {"abs": abs(cs.value), "envelope": cs.envelope, "ratio": cs.ratio}

    OUT.write_text(json.dumps(ref, indent=2, sort_keys=True) + "\n")
    print(json.dumps(ref, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
