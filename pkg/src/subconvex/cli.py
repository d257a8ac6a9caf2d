"""Batch front-end: one subcommand per experiment, CSV out, manifest sidecar.

Exit codes: 0 success, 1 compute error (class name on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__
from .arith import dirichlet_char, hf_norms, minor_arc_ok, restricted_average, sieve
from .equidist import equidist_experiment
from .errors import SubconvexError, UsageError
from .moments import default_grid, discrete_moment, moment_lp
from .reals import parse_real, parse_real_text
from .sets import count_ladder, materialize, parse_set
from .weyl import PolyCoeffs, parse_poly, weyl_screen


def fmt(x) -> str:
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".12g")


def parse_number(tok: str) -> float:
    try:
        return float(Fraction(tok))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {tok!r}") from None


def _int_number(tok: str) -> int:
    v = parse_number(tok)
    if v != int(v):
        raise UsageError(f"expected an integer, got {tok!r}")
    return int(v)


def parse_ladder(text: str) -> list[int]:
    """``start:end:xF`` (geometric), ``start:end:+S`` (linear) or ``a,b,c``."""
    text = text.strip()
    if ":" not in text:
        vals = [_int_number(t) for t in text.split(",") if t]
        if not vals:
            raise UsageError("empty ladder")
        return vals
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"ladder must be start:end:xF or start:end:+S, got {text!r}")
    start, end = _int_number(parts[0]), _int_number(parts[1])
    step = parts[2]
    if start < 1 or end < start:
        raise UsageError("ladder needs 1 <= start <= end")
    out = []
    if step.startswith("x"):
        f = parse_number(step[1:])
        if f <= 1:
            raise UsageError("geometric factor must exceed 1")
        i = 0
        while True:
            v = start * f**i
            if v > end * (1 + 1e-12):
                break
            out.append(int(round(v)))
            i += 1
    elif step.startswith("+"):
        s = _int_number(step[1:])
        if s < 1:
            raise UsageError("linear step must be positive")
        out = list(range(start, end + 1, s))
    else:
        raise UsageError(f"ladder step must start with 'x' or '+', got {step!r}")
    return out


def parse_p_list(text: str) -> list[float]:
    return [parse_number(t) for t in text.split(",") if t]


def _threads() -> int:
    env = os.environ.get("SUBCONVEX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError("SUBCONVEX_THREADS must be an integer") from None
    return os.cpu_count() or 1


def _pmap(fn, items):
    items = list(items)
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))  # map preserves input order


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(_cell(c) for c in r) + "\n")
    return buf.getvalue()


def _cell(c) -> str:
    if isinstance(c, str):
        return '"' + c.replace('"', '""') + '"' if ("," in c or '"' in c) else c
    return fmt(c)


# ---------------------------------------------------------------- subcommands


def cmd_set_report(args) -> str:
    expr = parse_set(args.set)
    text = expr.to_text()
    rows = [[text, N, c, d] for N, c, d in count_ladder(expr, parse_ladder(args.ladder))]
    return _csv(["set_expr", "N", "count", "density"], rows)


MOMENT_HEADER = ["set_expr", "p", "N", "M", "value", "refinement_delta", "ratio_to_bound"]


def moment_rows(expr, ps, Ns, grid_factor: int) -> list[list]:
    text = expr.to_text()

    def one(N):
        s = materialize(expr, N)
        return s, [moment_lp(s, p, default_grid(N, grid_factor)) for p in ps]

    results = _pmap(one, Ns)
    rows = []
    for N, (s, ests) in zip(Ns, results):
        for e in ests:
            bound = s.count**e.p / N if s.count else 0.0
            ratio = e.value / bound if bound else math.inf
            rows.append([text, e.p, N, e.grid_size, e.value, e.refinement_delta, ratio])
    rows.sort(key=lambda r: (r[1], r[2]))
    return rows


def cmd_moment_scan(args) -> str:
    expr = parse_set(args.set)
    Ns = parse_ladder(args.ladder)
    ps = parse_p_list(args.p)
    if args.grid_factor < 4:
        raise UsageError("--grid-factor must be at least 4")
    return _csv(MOMENT_HEADER, moment_rows(expr, ps, Ns, args.grid_factor))


def cmd_discrete_moment(args) -> str:
    expr = parse_set(args.set)
    ps = parse_p_list(args.p)
    N = _int_number(args.N)
    qs = parse_ladder(args.q_ladder)
    s = materialize(expr, N)
    text = expr.to_text()
    rows = []
    for p in ps:
        for q in qs:
            v = discrete_moment(s, p, q)
            bound = N ** (p - 1) + N**p / q
            rows.append([text, p, N, q, v, bound, v / bound])
    rows.sort(key=lambda r: (r[1], r[3]))
    return _csv(["set_expr", "p", "N", "q", "value", "bound", "ratio"], rows)


WEYL_HEADER = ["set_expr", "k", "p", "N", "a", "q", "epsilon", "omega", "envelope", "observed_abs", "ratio"]


def cmd_weyl_scan(args) -> str:
    expr = parse_set(args.set)
    alpha = parse_real_text(args.alpha)
    if args.degree < 2:
        raise UsageError("--degree must be at least 2")
    poly = PolyCoeffs.monomial(args.degree, alpha)
    text = expr.to_text()
    rows = []
    for N in parse_ladder(args.N):
        s = materialize(expr, N)
        for p in parse_p_list(args.p):
            r = weyl_screen(s, poly, p, args.epsilon)
            rows.append([text, r.k, r.p, r.N, r.a, r.q, r.epsilon, r.omega, r.envelope, r.observed, r.ratio])
    rows.sort(key=lambda r: (r[2], r[3]))
    return _csv(WEYL_HEADER, rows)


def cmd_equidist(args) -> str:
    expr = parse_set(args.set)
    poly = parse_poly(args.poly)
    Ms = parse_ladder(args.m_ladder)
    reports = equidist_experiment(expr, poly, Ms, args.mmax)
    text, ptext = expr.to_text(), poly.to_text()
    if args.stats == "weyl":
        rows = [[text, ptext, r.M, m, v] for r in reports for m, v in r.weyl_stats]
        return _csv(["set_expr", "poly", "M", "m", "weyl_stat"], rows)
    rows = [[text, ptext, r.M, r.star_discrepancy] for r in reports]
    return _csv(["set_expr", "poly", "M", "star_discrepancy"], rows)


def parse_fn(text: str, N: int):
    """Parse --fn into (ArithFn, theta); theta is None unless the function carries a phase."""
    tokens = text.split()
    if not tokens:
        raise UsageError("empty --fn")
    head = tokens[0].lower()
    if head in ("mobius", "mangoldt", "tau") and len(tokens) == 1:
        return sieve(head, N), None
    if head == "chi" and len(tokens) == 3:
        chi = dirichlet_char(_int_number(tokens[1]), _int_number(tokens[2]))
        return sieve("character", N, chi=chi), None
    if head in ("mobius_phase", "mangoldt_phase") and len(tokens) >= 3:
        k = _int_number(tokens[1])
        theta, pos = parse_real(tokens, 2)
        if pos != len(tokens):
            raise UsageError("trailing tokens in --fn")
        return sieve(head, N, k=k, theta=theta), theta
    raise UsageError(f"cannot parse --fn {text!r}")


def cmd_arith_avg(args) -> str:
    expr = parse_set(args.set)
    rows = []
    for N in parse_ladder(args.N):
        f, theta = parse_fn(args.fn, N)
        if theta is not None and not minor_arc_ok(theta, N, args.arc_A):
            print(f"skip N={N}: theta is on a major arc at A={args.arc_A}", file=sys.stderr)
            continue
        s = materialize(expr, N)
        avg = abs(restricted_average(f, s))
        h = hf_norms(f)
        for p in parse_p_list(args.p):
            if not 1 <= p < 2:
                raise UsageError("--p must lie in [1, 2)")
            bound = h.sup_norm ** (2 / p - 1) * h.l2_norm ** (2 - 2 / p)
            rows.append([args.fn, expr.to_text(), N, p, avg, h.sup_norm, h.l2_norm, bound, avg / bound if bound else math.inf])
    rows.sort(key=lambda r: (r[3], r[2]))
    header = ["fn", "set_expr", "N", "p", "restricted_avg_abs", "hf_sup", "hf_l2", "bound_rhs", "ratio"]
    return _csv(header, rows)


# ---------------------------------------------------------------- manifests


def sha256_text(s: str) -> str:
    return hashlib.sha256(s.encode()).hexdigest()


def write_manifest(path: str, args, csv_text: str, wall: float) -> None:
    lines = [f"subcommand={args.command}"]
    for key in sorted(vars(args)):
        if key in ("command", "func", "out", "manifest"):
            continue
        lines.append(f"flag.{key}={getattr(args, key)}")
    lines.append(f"tool_version={__version__}")
    lines.append(f"wall_clock_seconds={wall:.3f}")
    lines.append(f"output_sha256={sha256_text(csv_text)}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_manifest(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line:
                k, _, v = line.partition("=")
                out[k] = v
    return out


def verify_manifest(manifest_path: str, csv_path: str) -> bool:
    m = read_manifest(manifest_path)
    with open(csv_path, newline="") as fh:
        return m.get("output_sha256") == sha256_text(fh.read())


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="subconvex", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("replay", help="re-run the command stored in a manifest (replay MANIFEST [--out])")

    def common(p):
        p.add_argument("--out", help="CSV output path (default stdout)")
        p.add_argument("--manifest", help="manifest path (default OUT.manifest when --out is given)")

    p = sub.add_parser("set-report", help="A(N) and density over a ladder")
    p.add_argument("--set", required=True)
    p.add_argument("--ladder", required=True)
    common(p)
    p.set_defaults(func=cmd_set_report)

    p = sub.add_parser("moment-scan", help="continuous moments I_p over a ladder")
    p.add_argument("--set", required=True)
    p.add_argument("--p", required=True, help="exponent or comma list")
    p.add_argument("--ladder", required=True)
    p.add_argument("--grid-factor", type=int, default=32)
    common(p)
    p.set_defaults(func=cmd_moment_scan)

    p = sub.add_parser("discrete-moment", help="discrete moments S_p over moduli")
    p.add_argument("--set", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--q-ladder", required=True)
    common(p)
    p.set_defaults(func=cmd_discrete_moment)

    p = sub.add_parser("weyl-scan", help="restricted Weyl sum against its envelope")
    p.add_argument("--set", default="naturals")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    common(p)
    p.set_defaults(func=cmd_weyl_scan)

    p = sub.add_parser("equidist", help="star discrepancy / Weyl statistics of psi(a_n)")
    p.add_argument("--set", required=True)
    p.add_argument("--poly", required=True, help="coefficients alpha_0 .. alpha_k")
    p.add_argument("--m-ladder", required=True)
    p.add_argument("--mmax", type=int, default=8)
    p.add_argument("--stats", choices=("discrepancy", "weyl"), default="discrepancy")
    common(p)
    p.set_defaults(func=cmd_equidist)

    p = sub.add_parser("arith-avg", help="restricted averages of arithmetic functions")
    p.add_argument("--fn", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--p", default="1.5")
    p.add_argument("--arc-A", dest="arc_A", type=float, default=1.0,
                   help="phase functions skip N where theta has q <= log^A(2N)")
    common(p)
    p.set_defaults(func=cmd_arith_avg)
    return ap


def manifest_argv(path: str, ap: argparse.ArgumentParser | None = None) -> list[str]:
    """Rebuild the command line recorded in a manifest (without --out/--manifest)."""
    ap = ap or build_parser()
    m = read_manifest(path)
    cmd = m.get("subcommand")
    subs = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction))
    if cmd not in subs.choices or cmd == "replay":
        raise UsageError(f"manifest names unknown subcommand {cmd!r}")
    options = {a.dest: a.option_strings[-1] for a in subs.choices[cmd]._actions if a.option_strings}
    argv = [cmd]
    for key, value in m.items():
        if not key.startswith("flag."):
            continue
        dest = key[len("flag."):]
        if dest not in options:
            raise UsageError(f"manifest flag {dest!r} not accepted by {cmd}")
        if value != "None":
            argv += [options[dest], value]
    return argv


def main(argv=None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["replay"]:
        rp = _Parser(prog="subconvex replay", description="re-run the command recorded in a manifest")
        rp.add_argument("manifest")
        rp.add_argument("--out")
        rp.add_argument("--manifest", dest="new_manifest")
        r = rp.parse_args(argv[1:])
        try:
            argv = manifest_argv(r.manifest, ap)
        except (OSError, UsageError) as exc:
            sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
            return 2
        if r.out:
            argv += ["--out", r.out]
        if r.new_manifest:
            argv += ["--manifest", r.new_manifest]
    args = ap.parse_args(argv)
    t0 = time.time()
    try:
        text = args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 2
    except SubconvexError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1
    wall = time.time() - t0
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
        write_manifest(args.manifest or args.out + ".manifest", args, text, wall)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
        if args.manifest:
            write_manifest(args.manifest, args, text, wall)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
