"""Command-line entry point.

Exit codes: 0 all pass, 1 any fail, 2 usage or config error, 3 I/O or
cache error.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

from .. import conjectures, dirichlet_l, prime_tables, sieve_kit, zeta_engine
from ..cache import set_cache_dir
from ..errors import CacheError, ConfigError, H8Error, UnknownClaimError
from .cache_admin import cache_admin
from .config import RunConfig, load_config
from .report import emit_report
from .suite import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    return cfg


def _writer(out):
    fh = open(out, "w", newline="") if out else sys.stdout
    return fh, csv.writer(fh, lineterminator="\n")


def cmd_zeros(args) -> int:
    if args.source.upper() == "ZETA":
        records = zeta_engine.find_zeta_zeros(args.t_min, args.t_max, check_count=True)
    else:
        chi = dirichlet_l.parse_source(args.source)
        records = dirichlet_l.find_l_zeros(chi, args.t_min, args.t_max)
    if args.out:
        zeta_engine.write_zero_table(records, args.out)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(zeta_engine.ZERO_CSV_FIELDS)
        for r in records:
            w.writerow([r.source, f"{r.gamma_height:.12g}", f"{r.residual_abs:.12g}", f"{r.refinement_width:.12g}"])
    print(f"{len(records)} zeros", file=sys.stderr)
    return EXIT_OK


def _print_reports(reports) -> None:
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.claim_id}", file=sys.stderr)


def cmd_check(args) -> int:
    cfg = _config(args)
    reports = run_suite(cfg, [args.pattern])
    _print_reports(reports)
    if cfg.output_path is not None:
        emit_report(reports, cfg.output_format, cfg.output_path)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_report(args) -> int:
    cfg = _config(args)
    reports = run_suite(cfg, args.select or ["*"])
    text = emit_report(reports, args.format, args.out)
    if not args.out:
        sys.stdout.write(text)
    _print_reports(reports)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_ap_error(args) -> int:
    fh, w = _writer(args.out)
    w.writerow(prime_tables.ERROR_CSV_FIELDS)
    worst = 0.0
    scale = math.sqrt(args.x) * math.log(args.x) ** 2
    for q in range(2, args.q_max + 1):
        for l in range(1, q):
            if math.gcd(l, q) != 1:
                continue
            e = prime_tables.error_term(args.x, q, l)
            worst = max(worst, abs(e.error) / scale)
            w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in e.as_row()])
    if args.out:
        fh.close()
    print(f"max |E|/(sqrt(x) log^2 x) = {worst:.6g}", file=sys.stderr)
    return EXIT_OK if worst < 1.0 else EXIT_FAIL


def cmd_bv(args) -> int:
    max_l = prime_tables.averaged_error_sum(args.x, args.d_max, prime_tables.MAX_L)
    fixed = prime_tables.averaged_error_sum(args.x, args.d_max, prime_tables.FixedL(1))
    print(f"averaged MAX_L = {max_l:.12g}")
    print(f"averaged FIXED_L(1) = {fixed:.12g}")
    if args.b_max:
        print(f"scaled (b <= {args.b_max}) = {prime_tables.scaled_error_sum(args.x, args.d_max, args.b_max):.12g}")
    return EXIT_OK if fixed <= max_l else EXIT_FAIL


def cmd_sandwich(args) -> int:
    ctx = sieve_kit.SieveContext.from_u(args.n, args.mode.upper(), args.u)
    ok, res, s = sieve_kit.sandwich_holds(ctx)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(sieve_kit.SANDWICH_CSV_FIELDS)
    w.writerow([ctx.N, ctx.shift_mode.value] + [f"{v:.12g}" for v in
                                                (ctx.z, ctx.y, ctx.u, res.lower, s, res.upper, res.remainder)])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_goldbach(args) -> int:
    rows = conjectures.goldbach_range(args.n_min, args.n_max)
    fh, w = _writer(args.out)
    w.writerow(conjectures.BOUND_CSV_FIELDS)
    for r in rows:
        w.writerow(r.as_row())
    if args.out:
        fh.close()
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def cmd_twins(args) -> int:
    r = conjectures.bound_comparison(args.n, "TWIN")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(conjectures.BOUND_CSV_FIELDS)
    w.writerow(r.as_row())
    return EXIT_OK if r.passed else EXIT_FAIL


def cmd_cache(args) -> int:
    cfg = _config(args)
    set_cache_dir(cfg.cache_dir)
    status = cache_admin(args.action, args.scope, cfg.cache_dir, cfg.sieve_hi, cfg.zeta_height, cfg.l_height,
                         cfg.seed)
    for f in status.files:
        print(f)
    for msg in status.corrupt:
        print(f"CORRUPT {msg}", file=sys.stderr)
    return EXIT_OK if status.ok else EXIT_IO


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="h8verify", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeros", help="locate zeros on the critical line")
    p.add_argument("--source", default="zeta", help="zeta or L:q:label")
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("check", help="run claims matching a glob pattern")
    p.add_argument("pattern")
    p.add_argument("--config")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("report", help="run the suite and emit a report")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.add_argument("--config")
    p.add_argument("--select", action="append")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("ap-error", help="E(x;q,l) for all q <= Q and coprime l")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--q-max", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ap_error)

    p = sub.add_parser("bv", help="averaged and scaled error sums")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--d-max", type=int, required=True)
    p.add_argument("--b-max", type=int)
    p.set_defaults(func=cmd_bv)

    p = sub.add_parser("sandwich", help="linear-sieve sandwich at one (N, mode, u)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=["goldbach", "twin"], required=True)
    p.add_argument("--u", type=float, required=True)
    p.set_defaults(func=cmd_sandwich)

    p = sub.add_parser("goldbach", help="Goldbach bound comparison for even N in a range")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_goldbach)

    p = sub.add_parser("twins", help="twin-prime bound comparison at N")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_twins)

    p = sub.add_parser("cache", help="warm, verify, or clear the cache")
    p.add_argument("action", choices=["warm", "verify", "clear"])
    p.add_argument("--scope", choices=["sieve", "zeros", "all"], default="all")
    p.add_argument("--config")
    p.set_defaults(func=cmd_cache)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, UnknownClaimError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CacheError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (H8Error, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
