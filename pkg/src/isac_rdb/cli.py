"""Command-line front end: ``isac-rdb {region-nakagami,region-occupancy,rd,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

import argparse
import json
import math
import sys
import warnings

import numpy as np

from . import rdtheory
from .config import ScenarioError, bundled_scenario, load_scenario
from .mathfn import LN2


def _fmt(x):
    return "" if x is None else repr(float(x))


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _scenario(args, default):
    path = args.scenario or bundled_scenario(default)
    sc = load_scenario(path)
    run = sc.run
    seed = run.seed if args.seed is None else args.seed
    draws = run.n_draws if args.draws is None else args.draws
    sweep = run.n_sweep if args.sweep is None else args.sweep
    if draws < 2 or sweep < 1:
        raise ScenarioError("--draws must be >= 2 and --sweep >= 1")
    return sc, seed, draws, sweep


def cmd_region_nakagami(args):
    from .optimizer import pareto_sweep_nakagami

    sc, seed, draws, sweep = _scenario(args, "table1")
    cfg = sc.system_config()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pts = pareto_sweep_nakagami(cfg, draws, sweep, seed, workers=args.workers)
    scale = 1.0 / LN2 if args.bits else 1.0
    lines = ["sweep_param,D_rdb,D_rdb_stderr,R_mean,R_stderr,D_bcrb,D_bcrb_stderr"]
    for p in pts:
        lines.append(",".join([_fmt(p.sweep_param), _fmt(p.D), _fmt(p.D_stderr), _fmt(p.R_mean * scale),
                               _fmt(p.R_stderr * scale), _fmt(p.D_bcrb), _fmt(p.D_bcrb_stderr)]))
    _write("\n".join(lines) + "\n", args.out)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if cfg.m_s < 1:
        print(f"note: BCRB inapplicable for m_s = {cfg.m_s:g} < 1 (infinite prior Fisher information)",
              file=sys.stderr)
    return 0


def cmd_region_occupancy(args):
    from .optimizer import pareto_sweep_occupancy

    sc, seed, draws, sweep = _scenario(args, "table2")
    occ = sc.occupancy_config(paper_kl_convention=args.paper_kl_convention == "on")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pts = pareto_sweep_occupancy(occ, draws, sweep, seed, workers=args.workers)
    scale = 1.0 / LN2 if args.bits else 1.0
    lines = ["gamma,D_bound,R_mean,R_stderr"]
    for p in pts:
        lines.append(",".join([_fmt(p.sweep_param), _fmt(p.D), _fmt(p.R_mean * scale), _fmt(p.R_stderr * scale)]))
    _write("\n".join(lines) + "\n", args.out)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return 0


def _parse_source(spec):
    kind, _, rest = spec.partition(":")
    try:
        vals = [float(v) for v in rest.split(",")] if rest else []
    except ValueError as exc:
        raise ScenarioError(f"bad source parameters in {spec!r}") from exc
    if kind == "bernoulli" and len(vals) == 1:
        return rdtheory.BernoulliSource(vals[0])
    if kind == "hamming" and len(vals) >= 2:
        return rdtheory.DiscreteSource.hamming(np.array(vals))
    raise ScenarioError("source must be 'bernoulli:<p1>' or 'hamming:<p1>,<p2>,...'")


def cmd_rd(args):
    try:
        src = _parse_source(args.source)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    if args.grid < 1:
        raise ScenarioError("--grid must be >= 1")
    d_max = src.zero_rate_distortion
    grid = [d_max * k / args.grid for k in range(1, args.grid + 1)]
    if isinstance(src, rdtheory.BernoulliSource):
        closed = [rdtheory.bernoulli_rd(src, D) for D in grid]
        disc = src.as_discrete()
    else:
        closed = [rdtheory.slb_discrete(src, D) for D in grid]
        disc = src
    scale = 1.0 / LN2 if args.bits else 1.0
    if args.oracle:
        lines = ["D,R_closed,R_oracle"]
        for D, r in zip(grid, closed):
            ba = rdtheory.blahut_arimoto_at_distortion(disc, D)
            lines.append(",".join([_fmt(D), _fmt(r * scale), _fmt(ba.rate * scale)]))
    else:
        lines = ["D,R"] + [f"{_fmt(D)},{_fmt(r * scale)}" for D, r in zip(grid, closed)]
    _write("\n".join(lines) + "\n", args.out)
    return 0


def cmd_verify(args):
    from .verify import run_suite

    seed = 0 if args.seed is None else args.seed
    draws = 2000 if args.draws is None else args.draws
    try:
        reports = run_suite(seed=seed, only=args.only, workers=args.workers, n_draws=draws)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    _write(json.dumps([r.to_dict() for r in reports], indent=2) + "\n", args.out)
    return 0 if all(r.passed for r in reports) else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="isac-rdb", description="Converse regions for sensing/communication tradeoffs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", help="scenario JSON (default: the bundled table file)")
            p.add_argument("--sweep", type=int, help="number of floor levels")
            p.add_argument("--bits", action="store_true", help="report rates in bits instead of nats")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--draws", type=int, help="channel draws override")
        p.add_argument("--workers", type=int, default=1, help="worker threads (output does not depend on it)")

    p = sub.add_parser("region-nakagami", help="RDB and BCRB converse regions under Nakagami fading")
    common(p)
    p.set_defaults(func=cmd_region_nakagami)

    p = sub.add_parser("region-occupancy", help="detection-error converse region for occupancy sensing")
    common(p)
    p.add_argument("--paper-kl-convention", choices=("on", "off"), default="on",
                   help="halve the Gaussian KL bracket (default on)")
    p.set_defaults(func=cmd_region_occupancy)

    p = sub.add_parser("rd", help="rate-distortion curve of a discrete source")
    p.add_argument("--source", default="bernoulli:0.5", help="bernoulli:<p1> or hamming:<p1>,<p2>,...")
    p.add_argument("--grid", type=int, default=20, help="number of distortion levels in (0, D_max]")
    p.add_argument("--oracle", action="store_true", help="add a Blahut-Arimoto column")
    p.add_argument("--bits", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rd)

    p = sub.add_parser("verify", help="run the property-check suite and print a JSON report")
    common(p, scenario=False)
    p.add_argument("--only", help="run only checks whose name starts with this")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
