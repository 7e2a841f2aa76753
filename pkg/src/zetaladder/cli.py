"""Command-line front end.

    zetaladder ladder 2200 --U 0.5 --k 2
    zetaladder factorize f1 --L 700 --mu 0.3 --U 0.5 --k 1
    zetaladder identity trig --L 700 --mu 0.3 --U 0.5
    zetaladder sweep sweep.txt --out results/
    zetaladder checkpoint --to 10000

The checkpoint directory defaults to ~/.cache/zetaladder and is overridden
by ``$ZETALADDER_CHECKPOINT_DIR`` or ``--checkpoint``.
"""
from __future__ import annotations

import argparse
import math
import sys
import time

from .config import NumericsConfig, apply_overrides, load_config
from .errors import LadderError
from .factorizer import Factorizer
from .functions import lookup, window_start
from .hl_integral import IntegralCheckpointTable, default_table_path
from .interactions import IDENTITIES, evaluate
from .ladder import OMEGA_ID, Ladder
from .reports import emit_report, load_spec_and_config, run_sweep


def _config(args) -> NumericsConfig:
    cfg = load_config(args.config) if args.config else NumericsConfig()
    if args.set:
        raw = {}
        for item in args.set:
            key, sep, val = item.partition("=")
            if not sep:
                raise SystemExit(f"--set expects key=value, got {item!r}")
            raw[key.strip()] = val.strip()
        unknown = set(raw) - set(cfg.flat())
        if unknown:
            raise SystemExit(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = apply_overrides(cfg, raw)
    return cfg


def _table(args, cfg) -> IntegralCheckpointTable:
    return IntegralCheckpointTable(cfg, default_table_path(cfg, args.checkpoint))


def _finish(table, args):
    if not args.no_save:
        table.save()


def cmd_ladder(args, cfg):
    table = _table(args, cfg)
    lad = Ladder(table)
    p = lad.phi1(args.T)
    gap = (args.T - p) * math.log(args.T) / ((1 - cfg.constants.c) * args.T)
    print(f"T        = {args.T!r}")
    print(f"phi1(T)  = {p!r}")
    print(f"omega(T) = {lad.omega(args.T)!r}   [{OMEGA_ID}]")
    print(f"gap law ratio (T - phi1) ln T / ((1-c) T) = {gap:.6f}")
    if args.k:
        chain = lad.reverse_iterates(args.T, args.U, args.k)
        for r in range(chain.k + 1):
            lo, hi = chain.segment(r)
            print(f"  r={r}  [{lo:.10f}, {hi:.10f}]  width={hi - lo:.6e}  defect={chain.residuals[r]:.2e}")
    _finish(table, args)


def _start(f, args):
    if args.T is not None:
        return args.T
    if args.L is None or args.mu is None:
        raise SystemExit("give --T, or --L and --mu")
    return window_start(f, args.L, args.mu)


def cmd_factorize(args, cfg):
    table = _table(args, cfg)
    fz = Factorizer(Ladder(table))
    f = lookup(args.f, cfg.factor.f5_variant)
    rec = fz.factorization_check(f, _start(f, args), args.U, args.k)
    print(rec.to_json() if args.format == "json" else rec.to_kv(), end="" if args.format != "json" else "\n")
    _finish(table, args)


def cmd_identity(args, cfg):
    table = _table(args, cfg)
    fz = Factorizer(Ladder(table))
    rep = evaluate(fz, args.name, args.L, args.U, args.mu, args.k1, args.k2, args.k3, args.delta)
    if args.format == "json":
        print(rep.to_json())
    elif args.format == "kv":
        print(rep.to_kv(), end="")
    else:
        print(emit_report([rep], args.format), end="")
    _finish(table, args)


def cmd_sweep(args, cfg):
    spec, cfg = load_spec_and_config(args.spec, cfg)
    if args.workers:
        spec.workers = args.workers
    table = _table(args, cfg)
    fz = Factorizer(Ladder(table))
    out = args.out or spec.output
    summary = run_sweep(spec, fz, out)
    print(emit_report(summary.reports, "table"), end="")
    print(f"{len(summary.reports)} reports, {len(summary.rejected)} rejected, "
          f"{len(summary.failures)} failed; cold-start integrated span "
          f"{summary.timing['cold_start_integrated_span']:.1f}, "
          f"{summary.timing['wall_seconds']:.1f}s")
    for row in summary.rejected[:5]:
        print(f"rejected {row['point']}: {row['reason']}", file=sys.stderr)
    if len(summary.rejected) > 5:
        print(f"... {len(summary.rejected) - 5} more rejections", file=sys.stderr)
    for row in summary.failures:
        print(f"failed {row['point']}: {row['error']}", file=sys.stderr)
    if out:
        print(f"wrote {out}")
    _finish(table, args)
    return 1 if summary.failures else 0


def cmd_checkpoint(args, cfg):
    table = _table(args, cfg)
    print(f"checkpoint {table.path}")
    if args.to:
        t0 = time.perf_counter()
        table.extend_to(args.to)
        print(f"extended to {table.last_t:g} in {time.perf_counter() - t0:.1f}s")
        table.save()
    t_last, I_last, err = table.entries()[-1]
    print(f"rows={len(table)}  last t={t_last:g}  I={I_last!r}  accumulated error={err:.2e}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zetaladder", description=__doc__.split("\n")[0])
    ap.add_argument("--config", help="flat key = value config file")
    ap.add_argument("--checkpoint", help="checkpoint directory")
    ap.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override, repeatable")
    ap.add_argument("--no-save", action="store_true", help="do not write the checkpoint table back")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ladder", help="phi1, omega and the reverse-iterated chain at T")
    p.add_argument("T", type=float)
    p.add_argument("--U", type=float, default=0.5)
    p.add_argument("--k", type=int, default=0)
    p.set_defaults(func=cmd_ladder)

    p = sub.add_parser("factorize", help="one factorization record")
    p.add_argument("f", help="function id (f1..f5, one, or a full id)")
    p.add_argument("--T", type=float)
    p.add_argument("--L", type=int)
    p.add_argument("--mu", type=float)
    p.add_argument("--U", type=float, default=0.5)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--format", choices=("kv", "json"), default="kv")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("identity", help="one identity report")
    p.add_argument("name", choices=IDENTITIES)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--U", type=float, default=0.5)
    p.add_argument("--mu", type=float, default=0.3)
    p.add_argument("--k1", type=int, default=1)
    p.add_argument("--k2", type=int, default=1)
    p.add_argument("--k3", type=int, default=1)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--format", choices=("kv", "json", "table", "csv", "jsonl"), default="kv")
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("sweep", help="run a sweep spec file")
    p.add_argument("spec")
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("checkpoint", help="build, extend or inspect the I(T) table")
    p.add_argument("--to", type=float, help="extend the table to this height")
    p.set_defaults(func=cmd_checkpoint)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    if args.command == "identity" and args.name != "power_signal":
        args.L = int(args.L)
    try:
        return args.func(args, cfg) or 0
    except LadderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
