"""Command-line front end: deterministic tables and reports.

Every subcommand writes CSV (or JSON with --format json) to --out, or to
stdout when --out is omitted.  The exit code is nonzero when a requested
check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import horospheres as hs
from . import inversion as inv
from . import spectral as sp
from .horospheres import EDGE, FLAG, VERTEX, FiniteFn
from .tree_core import (
    E0,
    F0,
    Flag,
    FlagMetricParam,
    TreeParams,
    dist_f,
    edge_from_str,
    edges_within,
    flag_from_str,
    flag_to_str,
    flags_within,
    iter_ball,
    word_from_str,
    word_to_str,
)


def _fmt(x: Any) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return repr(x.real) if x.imag == 0 else f"{x.real!r}{x.imag:+.17g}j"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit(rows: Sequence[Sequence[Any]], header: Sequence[str], args: argparse.Namespace, name: str = "out") -> None:
    """Write one table; with a directory --out, it becomes <out>/<name>.<ext>."""
    if args.format == "json":
        text = json.dumps([dict(zip(header, map(_fmt, r))) for r in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows([[_fmt(x) for x in r] for r in rows])
        text = buf.getvalue()
    if args.out is None:
        sys.stdout.write(f"# {name}\n" if args.multi else "")
        sys.stdout.write(text)
        return
    out = Path(args.out)
    if args.multi or out.is_dir():
        out.mkdir(parents=True, exist_ok=True)
        out = out / f"{name}.{args.format}"
    out.write_text(text)


# ---------------------------------------------------------------------------
# function I/O
# ---------------------------------------------------------------------------


def load_fn(path: str) -> FiniteFn:
    """Read {"kind": ..., "q": ..., "values": {key: value}} with word-string keys."""
    data = json.loads(Path(path).read_text())
    kind, q = data["kind"], int(data["q"])
    parse = {VERTEX: word_from_str, EDGE: edge_from_str, FLAG: flag_from_str}[kind]
    return FiniteFn(kind, q, {parse(k, q): Fraction(v) for k, v in data["values"].items()})


def random_fn(kind: str, q: int, R: int, rng: random.Random, density: float = 0.5) -> FiniteFn:
    support = {VERTEX: list(iter_ball(q, R)), EDGE: edges_within(q, R), FLAG: flags_within(q, R)}[kind]
    vals = {s: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for s in support if rng.random() < density}
    return FiniteFn(kind, q, vals)


def _input_or_random(args: argparse.Namespace, kind: str) -> FiniteFn:
    if args.input:
        return load_fn(args.input)
    return random_fn(kind, args.q, args.radius, random.Random(args.seed))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_tables(args: argparse.Namespace) -> int:
    q, M = args.q, args.radius
    ok = True
    kv = [[n] + [inv.k_v(n, m, q) for m in range(M + 1)] for n in range(-M, M + 1)]
    ke = [[n] + [inv.k_e(n, m, q) for m in range(M + 1)] for n in range(-M, M + 1)]
    if args.verify:
        for n in range(-M, M + 1):
            for m in range(M + 1):
                ok &= inv.k_v(n, m, q) == inv.k_v_bruteforce(n, m, q)
                ok &= inv.k_e(n, m, q) == inv.k_e_bruteforce(n, m, q)
        if not ok:
            print("tables disagree with enumeration; nothing written", file=sys.stderr)
            return 1
    ms = [f"m={m}" for m in range(M + 1)]
    args.multi = True
    emit(kv, ["n"] + ms, args, "k_v")
    emit(ke, ["n"] + ms, args, "k_e")
    emit([[n, sp.psi_closed_v(n, q), sp.psi_closed_e(n, q)] for n in range(M + 1)], ["n", "psi_v", "psi_e"], args, "psi")
    N = max(M, 1)
    d1, d2 = inv.inv_coeffs_v(1, N, q), inv.inv_coeffs_v(2, N, q)
    l1, l2 = inv.inv_coeffs_e(1, N, q), inv.inv_coeffs_e(2, N, q)
    emit([[n, d1(n), d2(n), l1(n), l2(n)] for n in range(-N, N + 1)], ["n", "d_choice1", "d_choice2", "l_choice1", "l_choice2"], args, "coeffs")
    return 0


def cmd_radon(args: argparse.Namespace) -> int:
    f = _input_or_random(args, args.kind)
    F = hs.radon(f, args.depth)
    rows = [[word_to_str(a, f.q), n if not isinstance(n, tuple) else f"{n[0]}:{n[1]}", x] for a, n, x in F.rows()]
    emit(rows, ["arc", "index", "value"], args, "radon")
    return 0


def cmd_invert(args: argparse.Namespace) -> int:
    f = _input_or_random(args, args.kind)
    F = hs.radon(f, args.depth)
    if f.kind == FLAG:
        g = inv.invert_flag_all(F, args.radius, args.choice, args.choice, Fraction(args.lam))
    else:
        g = inv.invert_all(F, args.radius, args.choice)
    keys = sorted(set(g.values) | set(f.values))
    rows = [[f.key_str(s), f(s), g(s)] for s in keys]
    emit(rows, ["element", "original", "recovered"], args, "invert")
    return 0 if all(f(s) == g(s) for s in keys) else 1


def cmd_cavalieri(args: argparse.Namespace) -> int:
    q = args.q
    if args.counterexample:
        F = hs.canonical_map_xi_inv(hs.radon(hs.delta(EDGE, q, E0), args.depth))
    else:
        F = hs.radon(_input_or_random(args, args.kind), args.depth)
    rep = inv.cavalieri_check(F)
    rows = [[n, r] for n, r in sorted(rep.residuals.items())]
    rows.append(["arc_total_constant", rep.arc_total_constant])
    emit(rows, ["n", "residual"], args, "cavalieri")
    return 0 if rep.passed or args.counterexample else 1


def cmd_roundtrip(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    rows = []
    failed = False
    for kind in (VERTEX, EDGE, FLAG):
        R = min(args.radius, 3) if kind == FLAG else args.radius
        f = random_fn(kind, args.q, R, rng)
        F = hs.radon(f, R + 1)
        if kind == FLAG:
            cav = "projected"
            g = inv.invert_flag_all(F, R, args.choice, args.choice, Fraction(args.lam))
        else:
            rep = inv.cavalieri_check(F)
            cav = max((abs(r) for r in rep.residuals.values()), default=Fraction(0))
            failed |= not rep.passed
            g = inv.invert_all(F, R, args.choice)
        worst = max((abs(g(s) - f(s)) for s in set(g.values) | set(f.values)), default=Fraction(0))
        failed |= worst != 0
        rows.append([kind, R, len(f.values), cav, worst])
    emit(rows, ["kind", "radius", "support_size", "max_cavalieri_residual", "max_inversion_error"], args, "roundtrip")
    return 1 if failed else 0


def _t_grid(q: int, N: int) -> list[float]:
    b = math.pi / math.log(q)
    return [b * k / N for k in range(N + 1)]


def cmd_spectral(args: argparse.Namespace) -> int:
    q, N, R = args.q, args.grid, args.radius
    args.multi = True
    ts = _t_grid(q, N)
    dv = sp.plancherel_density(VERTEX, ts, q)
    de = sp.plancherel_density(EDGE, ts, q)
    emit([[t, float(a), float(b)] for t, a, b in zip(ts, dv, de)], ["t", "density_v", "density_e"], args, "density")
    emit(
        [[t, n, sp.spherical_v(0.5 + 1j * t, n, q).real, sp.spherical_e(0.5 + 1j * t, n, q).real] for t in ts[:: max(N // 16, 1)] for n in range(R + 1)],
        ["t", "n", "phi_v", "phi_e"],
        args,
        "spherical",
    )
    emit([[p, z.real, z.imag] for p in (2.0, 1.5, 1.2) for z in sp.spectrum_sample(p, q, 64)], ["p", "re", "im"], args, "spectrum")
    rows = []
    ok = True
    for kind in (VERTEX, EDGE):
        delta = hs.RadialSeq(kind, q, (Fraction(1),))
        err = abs(sp.plancherel_norm(delta, N) - 1)
        ok &= err < 1e-8
        rows.append([kind, "plancherel_delta", err])
        rows.append([kind, "plancherel_delta_uncorrected_constant", abs(sp.plancherel_norm(delta, N, uncorrected=True) - 1)])
    rows.append(["vertex", "gamma_v(1)-1", abs(sp.gamma_v(1, q) - 1)])
    emit(rows, ["kind", "check", "abs_error"], args, "report")
    return 0 if ok else 1


def cmd_symbol(args: argparse.Namespace) -> int:
    q, N = args.q, args.grid
    rows = []
    for t in _t_grid(q, N)[1:-1]:
        w = 0.5 + 1j * t
        rows.append([t, sp.symbol_psi_hat_v(w, q).real, sp.symbol_psi_hat_e(w, q).real, sp.symbol_critical_e(t, q)])
    emit(rows, ["t", "psi_hat_v", "psi_hat_e", "psi_hat_e_critical_form"], args, "symbol")
    return 0


def cmd_flag_demo(args: argparse.Namespace) -> int:
    q = args.q
    xi = FlagMetricParam(Fraction(args.xi_flag))
    flip = F0.flip()
    # the flag on the next edge sharing the vertex of flip(f0)
    nxt = Flag(hs.Edge((0,), 1), 0)
    rows = [
        ["dist_f(f0, flip f0)", dist_f(F0, flip, xi)],
        ["dist_f(flip f0, next)", dist_f(flip, nxt, xi)],
    ]
    h = random_fn(FLAG, q, min(args.radius, 3), random.Random(args.seed))
    p = inv.flag_project(h)
    g = inv.flag_lift(p, Fraction(args.lam), min(args.radius, 3))
    rows.append(["image_residual", p.image_residual()])
    rows.append(["lift_errors", sum(1 for f in flags_within(q, min(args.radius, 3)) if g(f) != h(f))])
    emit(rows, ["quantity", "value"], args, "flag_demo")
    return 0 if rows[-1][1] == 0 else 1


def cmd_support_demo(args: argparse.Namespace) -> int:
    q, R = args.q, args.radius
    rows = []
    ok = True
    for C in inv.convex_sets(q, R, 2):
        good = inv.support_theorem_holds(sorted(C), q, R)
        ok &= good
        rows.append([" ".join(word_to_str(v, q) or "()" for v in sorted(C)), good])
    emit(rows, ["convex_set", "support_theorem_holds"], args, "support")
    return 0 if ok else 1


COMMANDS = {
    "tables": cmd_tables,
    "radon": cmd_radon,
    "invert": cmd_invert,
    "cavalieri": cmd_cavalieri,
    "roundtrip": cmd_roundtrip,
    "spectral": cmd_spectral,
    "symbol": cmd_symbol,
    "flag-demo": cmd_flag_demo,
    "support-demo": cmd_support_demo,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, default=2)
    common.add_argument("--radius", type=int, default=3)
    common.add_argument("--depth", type=int, default=None, help="arc depth, default radius + 1")
    common.add_argument("--grid", type=int, default=512, help="Simpson intervals (even)")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--choice", type=int, choices=(1, 2), default=1)
    common.add_argument("--lambda", dest="lam", default="1/2")
    common.add_argument("--xi-flag", default="1/8")
    common.add_argument("--kind", choices=(VERTEX, EDGE, FLAG), default=VERTEX)
    common.add_argument("--input", default=None, help="JSON function file")
    common.add_argument("--counterexample", action="store_true")
    common.add_argument("--verify", action="store_true")
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    parser = argparse.ArgumentParser(prog="horotree", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    TreeParams(args.q, args.radius)
    if args.depth is None:
        args.depth = args.radius + 1
    if args.depth < args.radius:
        print("--depth must be >= --radius", file=sys.stderr)
        return 2
    if args.grid % 2:
        print("--grid must be even", file=sys.stderr)
        return 2
    args.multi = False
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
