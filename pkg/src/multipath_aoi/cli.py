"""Command line front end.

    multipath-aoi [global flags] analytic|simulate|compare [scenario flags]
    multipath-aoi [global flags] sweep --axis tau --grid 0.6 1 2 4 [scenario flags]
    multipath-aoi [global flags] preset paoi99-vs-tau
    multipath-aoi list-presets

Scenario values come from built-in defaults, then ``--config FILE`` (JSON),
then explicit flags; later sources win. Exit status is 0 on success, 1 on
a validation error and 2 on an I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import experiments as ex
from . import simulator
from .model import Scheme, SystemConfig


def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--seed", type=int, **kw, help="master RNG seed (default 1)")
    p.add_argument("--frames", type=int, **kw, help="frames per simulation (default 1048576)")
    p.add_argument("--out", **kw, help="CSV output path (default: stdout)")
    p.add_argument("--gnuplot", **kw, help="also write gnuplot data blocks to this path")
    p.add_argument("--grid-points", type=int, **kw, help="points per cdf curve or sweep grid")
    p.add_argument("--workers", type=int, **kw, help="worker processes for presets (default 1)")


def _scenario_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with Scenario (or SweepSpec) fields")
    p.add_argument("--name")
    p.add_argument("--scheme", help="alternating, replicated, split, coded or queue_based")
    p.add_argument("--eta", type=float, help="coding rate for the coded scheme")
    p.add_argument("--tau", type=float, help="inter-frame period")
    p.add_argument("--mu", type=float, nargs=2, metavar=("MU1", "MU2"))
    p.add_argument("--eps", type=float, nargs=2, metavar=("EPS1", "EPS2"))
    p.add_argument("--metrics", nargs="+", choices=ex.METRICS)
    p.add_argument("--qualities", nargs="+", choices=("whole", "lq", "hq"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multipath-aoi", description=__doc__.split("\n")[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("analytic", "analytic curves and percentiles only"),
                       ("simulate", "Monte Carlo estimates only"),
                       ("compare", "analytic and simulated side by side, with KS and percentile gaps")):
        sp = sub.add_parser(name, help=text)
        _global_flags(sp, suppress=True)
        _scenario_flags(sp)
        if name == "simulate":
            sp.add_argument("--trace-out", help="also dump the per-frame trace as CSV")

    sp = sub.add_parser("sweep", help="one metric family along tau, eta or epsilon")
    _global_flags(sp, suppress=True)
    _scenario_flags(sp)
    sp.add_argument("--axis", choices=ex.AXES)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--grid", type=float, nargs="+", help="explicit grid values")
    g.add_argument("--grid-range", type=float, nargs=2, metavar=("LO", "HI"),
                   help="evenly spaced grid of --grid-points values")
    sp.add_argument("--log", action="store_true", help="space --grid-range geometrically")
    sp.add_argument("--optimize", choices=sorted(ex.OBJECTIVES))
    sp.add_argument("--analytic-only", action="store_true")

    sp = sub.add_parser("preset", help="reproduce one figure family")
    _global_flags(sp, suppress=True)
    sp.add_argument("name", choices=sorted(ex.PRESETS))

    sp = sub.add_parser("list-presets", help="show preset names")
    _global_flags(sp, suppress=True)
    return parser


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from exc


def _scenario(args, doc=None) -> ex.Scenario:
    if doc is None:
        scn = ex.Scenario("cli", SystemConfig.make(Scheme.replicated(), 1.5))
    else:
        scn = ex.scenario_from_dict(doc)
    cfg = scn.cfg
    if args.scheme is not None or args.eta is not None:
        name = args.scheme or cfg.scheme.kind.value
        eta = args.eta if args.eta is not None else cfg.scheme.eta
        cfg = cfg.replace(scheme=Scheme.parse(name, eta))
    if args.tau is not None:
        cfg = cfg.replace(tau=args.tau)
    if args.mu is not None:
        cfg = cfg.replace(mu=tuple(args.mu))
    if args.eps is not None:
        cfg = cfg.replace(eps=tuple(args.eps))
    qualities = scn.qualities if cfg.scheme == scn.cfg.scheme else None
    if args.qualities is not None:
        qualities = tuple(args.qualities)
    scn = ex.Scenario(
        name=args.name or scn.name,
        cfg=cfg,
        n_frames=args.frames if args.frames is not None else scn.n_frames,
        seed=args.seed if args.seed is not None else scn.seed,
        metrics=tuple(args.metrics) if args.metrics else scn.metrics,
        qualities=qualities,
    )
    return scn


def _command(args) -> list:
    gp = args.grid_points
    if args.command == "list-presets":
        width = max(map(len, ex.PRESETS))
        for name, text in ex.PRESETS.items():
            print(f"{name:<{width}}  {text}")
        return []
    if args.command == "preset":
        return ex.run_preset(args.name, args.frames or ex.DEFAULT_FRAMES,
                             ex.DEFAULT_SEED if args.seed is None else args.seed, gp, args.workers or 1)
    doc = _load_json(args.config) if args.config else None
    if args.command == "sweep":
        base_doc = doc.get("base") if doc else None
        scn = _scenario(args, base_doc)
        if args.analytic_only:
            scn = replace(scn, simulate=False)
        axis = args.axis or (doc or {}).get("axis")
        if args.grid is not None:
            grid = args.grid
        elif args.grid_range is not None:
            lo, hi = args.grid_range
            n = gp or 25
            grid = np.geomspace(lo, hi, n) if args.log else np.linspace(lo, hi, n)
        else:
            grid = (doc or {}).get("grid")
        if axis is None or grid is None:
            raise ValueError("sweep needs --axis and a grid (flags or config file)")
        optimize = args.optimize or (doc or {}).get("optimize")
        return ex.sweep(ex.SweepSpec(scn, axis, tuple(grid), optimize), gp or 100)
    scn = _scenario(args, doc)
    if args.command == "analytic":
        scn = replace(scn, simulate=False)
        if scn.cfg.scheme.kind.value == "queue_based":
            raise ValueError("the queue-based scheduler has no analytic model; use simulate or compare")
    elif args.command == "simulate":
        scn = replace(scn, analytic=False)
        if args.trace_out:
            simulator.run(scn.cfg, scn.n_frames, scn.seed).to_csv(args.trace_out)
    elif scn.cfg.scheme.kind.value == "queue_based":
        print("notice: queue_based is simulation-only; analytic rows are omitted", file=sys.stderr)
    return ex.run_scenario(scn, gp or 100)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows = _command(args)
        if args.command == "list-presets":
            return 0
        if args.out:
            ex.emit_csv(rows, args.out)
        else:
            ex.write_csv(rows, sys.stdout)
        if args.gnuplot:
            ex.emit_gnuplot(rows, args.gnuplot)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
