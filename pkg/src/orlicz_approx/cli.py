"""Command-line front end.

    orlicz-approx norm    --phi power:2 --weight const --fn cos:1
    orlicz-approx modulus --phi power:2 --fn cos:1 --k 1 --delta 0.5,0.25
    orlicz-approx verify  --config default --out reports/

Exit codes: 0 success (all checks pass), 1 numeric failure or failed check,
2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

from .errors import ConfigError, OrliczError
from .norms import OrliczContext, luxemburg_norm, orlicz_norm
from .operators import modulus_curve
from .periodic import Grid
from .verify import (all_passed, load_config, make_function, parse_phi, parse_weight,
                     reports_csv, reports_json, reports_text, run_suite, write_reports)


SHIPPED = {"default": "default_suite.json", "selftest": "selftest_falsified.json"}


class UsageError(Exception):
    pass


def _fmt(x):
    return repr(float(x))


def _context(args):
    try:
        grid = Grid(args.grid)
    except ValueError as e:
        raise UsageError(str(e)) from None
    try:
        phi = parse_phi(args.phi)
        w = parse_weight(args.weight, grid)
        f = make_function(args.fn, grid, args.seed).f
    except (ValueError, KeyError, OSError) as e:
        raise UsageError(str(e)) from None
    return OrliczContext(phi, w), f


def _emit(rows, header, fmt, out):
    if fmt == "json":
        out.write(json.dumps([dict(zip(header, r)) for r in rows], sort_keys=True) + "\n")
    elif fmt == "csv":
        out.write(",".join(header) + "\n")
        for r in rows:
            out.write(",".join(v if isinstance(v, str) else _fmt(v) for v in r) + "\n")
    else:
        for r in rows:
            out.write(" ".join(v if isinstance(v, str) else _fmt(v) for v in r) + "\n")


def cmd_norm(args, out=None):
    out = out or sys.stdout
    ctx, f = _context(args)
    rows = [("luxemburg", luxemburg_norm(ctx, f)), ("amemiya", orlicz_norm(ctx, f))]
    _emit(rows, ["norm", "value"], args.format, out)
    return 0


def _floats(text, name):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated numbers, got {text!r}") from None


def cmd_modulus(args, out=None):
    out = out or sys.stdout
    ctx, f = _context(args)
    deltas = _floats(args.delta, "delta")
    k = float(args.k)
    if not deltas or min(deltas) <= 0 or k < 0:
        raise UsageError("need delta > 0 and k >= 0")
    vals = [modulus_curve(ctx, f, k, [d])[0][0] for d in deltas]
    _emit(list(zip(deltas, vals)), ["delta", "omega"], args.format, out)
    return 0


def resolve_config(name):
    if name in SHIPPED:
        return str(resources.files("orlicz_approx") / "data" / SHIPPED[name])
    return name


def cmd_verify(args, out=None):
    out = out or sys.stdout
    cfg = load_config(resolve_config(args.config), args.grid_override)
    if args.n_max is not None:
        cfg.n_max = args.n_max
    if args.seed is not None:
        cfg.seed = args.seed
    reports = run_suite(cfg)
    formats = [s for s in args.format.split(",") if s]
    if args.out:
        write_reports(reports, args.out, formats)
        out.write(reports_text(reports).splitlines()[-1] + "\n")
    else:
        writers = {"json": reports_json, "csv": reports_csv, "text": reports_text}
        for fmt in formats:
            out.write(writers[fmt](reports))
    return 0 if all_passed(reports) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="orlicz-approx", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def probe(sp):
        sp.add_argument("--phi", default="power:2", help="power:p[:scale], power-log:p or csv:path")
        sp.add_argument("--weight", default="const", help="const, power:gamma[@center] or csv:path")
        sp.add_argument("--fn", required=True, help="cos:m, sin:m, abs-sin-pow:g, sawtooth, csv:path, ...")
        sp.add_argument("--grid", type=int, default=4096)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("text", "json", "csv"), default="text")

    sp = sub.add_parser("norm", help="Luxemburg and Amemiya norms of one function")
    probe(sp)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("modulus", help="fractional modulus of smoothness table")
    probe(sp)
    sp.add_argument("--k", default="1")
    sp.add_argument("--delta", default="0.5")
    sp.set_defaults(func=cmd_modulus)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--config", default="default", help="JSON config path, or 'default' / 'selftest'")
    sp.add_argument("--out", default=None, help="directory for reports.json / reports.csv / summary.txt")
    sp.add_argument("--format", default="text", help="comma list of json, csv, text")
    sp.add_argument("--grid", dest="grid_override", type=int, default=None)
    sp.add_argument("--n-max", dest="n_max", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        bad = [s for s in args.format.split(",") if s not in ("json", "csv", "text")]
        if bad:
            parser.error(f"unknown format(s): {', '.join(bad)}")
        if args.out:
            try:
                os.makedirs(args.out, exist_ok=True)
            except OSError as e:
                parser.error(f"--out not writable: {e.strerror}")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OrliczError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
