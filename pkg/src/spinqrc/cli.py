"""Command-line interface.

Subcommands:
  run       one parameter point with full diagnostics; writes trace CSVs
  sweep     a full grid from a JSON config file; writes results.csv
  report    summary tables per figure preset from a results.csv
  validate  quick invariant suite; exit code reflects the outcome

Config file schema (JSON, versioned):

    {
      "schema_version": 1,
      "sweep": {
        "j_s_grid": [0.02, ...],        # positive coupling scales
        "gammas": [0.0, 0.01],          # dissipation rates
        "freqs": [0.2, 1, 5, "inf"],    # frequency scales; "inf" = random input
        "tasks": ["delay", "narma"],
        ... any other SweepSpec field ...
      }
    }

Exit codes: 0 success, 1 numeric failure in single-run mode, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import core, reservoir, signals
from .entanglement import record_mean
from .errors import ConfigError, NumericError, SchemaError
from .harness import SCHEMA_VERSION, SweepSpec, run_sweep, write_meta
from .report import write_reports
from .validate import run_validation


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="base seed override")
    parser.add_argument("--jumps", choices=core.JUMP_KINDS, default="both",
                        help="dissipation channel set per qubit")
    parser.add_argument("--bipartitions", choices=("all", "single-qubit"), default="all",
                        help="bipartition family for reported negativity means")
    parser.add_argument("--v-nodes", type=int, default=10, dest="v_nodes",
                        help="virtual nodes per qubit per injection")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinqrc",
                                     description="spin-network quantum reservoir simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single parameter point with diagnostics")
    _add_common(p_run)
    p_run.add_argument("--j-s", type=float, default=1.0, dest="j_s")
    p_run.add_argument("--gamma", type=float, default=0.01)
    p_run.add_argument("--f", type=float, default=0.2,
                       help="input frequency scale (inf for the random series)")
    p_run.add_argument("--h", type=float, default=2.0)
    p_run.add_argument("--dt-inject", type=float, default=2.5, dest="dt_inject")
    p_run.add_argument("--steps", type=int, default=500, help="injection steps")
    p_run.add_argument("--washout", type=int, default=100)

    p_sweep = sub.add_parser("sweep", help="grid sweep from a config file")
    _add_common(p_sweep)
    p_sweep.add_argument("--config", type=Path, required=True)
    p_sweep.add_argument("--threads", type=int, default=1,
                         help="parallel worker processes")

    p_report = sub.add_parser("report", help="summary tables from results.csv")
    p_report.add_argument("--in", type=Path, required=True, dest="results")
    p_report.add_argument("--out", type=Path, default=Path("report"))
    p_report.add_argument("--bipartitions", choices=("all", "single-qubit"), default="all")

    sub.add_parser("validate", help="run the quick invariant suite")
    return parser


def _cmd_run(args) -> int:
    seed = 0 if args.seed is None else args.seed
    rng = np.random.default_rng(seed)
    coupling_seed, input_seed = (int(s) for s in rng.integers(0, 2 ** 62, size=2))
    couplings = core.sample_couplings(args.j_s, coupling_seed, 4)
    cfg = reservoir.RunConfig(
        register=core.RegisterSpec(4),
        hamiltonian=core.HamiltonianParams(couplings, h=args.h),
        gamma=args.gamma, dt_inject=args.dt_inject, v_nodes=args.v_nodes,
        washout=args.washout, jumps=args.jumps,
        record_states=True, record_negativity=True)
    if math.isinf(args.f):
        series = signals.gen_random_input(args.steps, input_seed, dt_inject=args.dt_inject)
    else:
        series = signals.gen_input(signals.InputSpec(
            f=args.f, k_steps=args.steps, dt_inject=args.dt_inject, seed=input_seed))

    readout, diags = reservoir.run_reservoir(cfg, series)

    args.out.mkdir(parents=True, exist_ok=True)
    n, v = 4, args.v_nodes
    trace_path = args.out / "trace.csv"
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["k", "t_k", "s_k"] + [f"sz_q{q}_v{j + 1}"
                                        for j in range(v) for q in range(1, n + 1)]
        writer.writerow(header)
        for k, s in enumerate(series.values):
            writer.writerow([k, repr(k * args.dt_inject), repr(float(s))]
                            + [repr(float(x)) for x in readout.rows[k]])

    neg_path = args.out / "negativity.csv"
    with open(neg_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        singles = [f"en_q{q}" for q in range(1, n + 1)]
        writer.writerow(["time", "at_injection", "mean_all", "mean_single"] + singles)
        for rec, t, flag in zip(diags.negativity, diags.negativity_time,
                                diags.negativity_at_injection):
            writer.writerow([repr(float(t)), int(flag),
                             repr(record_mean(rec, "all")),
                             repr(record_mean(rec, "single-qubit"))]
                            + [repr(rec.per_bipartition[(q,)]) for q in range(1, n + 1)])

    meta = {
        "schema_version": SCHEMA_VERSION,
        "parameters": {"j_s": args.j_s, "gamma": args.gamma,
                       "f": "inf" if math.isinf(args.f) else args.f,
                       "h": args.h, "dt_inject": args.dt_inject,
                       "v_nodes": args.v_nodes, "washout": args.washout,
                       "steps": args.steps, "seed": seed, "jumps": args.jumps,
                       "bipartitions": args.bipartitions},
    }
    (args.out / "run.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {trace_path} and {neg_path}")
    return 0


def _cmd_sweep(args) -> int:
    raw = json.loads(args.config.read_text())
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"config schema_version must be {SCHEMA_VERSION}")
    spec_dict = raw.get("sweep", {})
    if args.seed is not None:
        spec_dict["base_seed"] = args.seed
    spec_dict.setdefault("v_nodes", args.v_nodes)
    spec_dict.setdefault("jumps", args.jumps)
    spec = SweepSpec.from_dict(spec_dict)
    rows = run_sweep(spec, args.out, workers=max(1, args.threads))
    failed = sum(1 for r in rows if r["status"] != "ok")
    print(f"wrote {len(rows)} rows to {args.out / 'results.csv'} ({failed} failed)")
    return 0


def _cmd_report(args) -> int:
    spec = None
    meta_path = args.results.parent / "results.meta.json"
    if meta_path.exists():
        meta = json.loads(meta_path.read_text())
        spec = SweepSpec.from_dict(meta["spec"])
    written = write_reports(args.results, args.out, spec=spec,
                            bipartitions=args.bipartitions)
    print(f"wrote {len(written)} tables to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "validate":
            return 0 if run_validation() else 1
    except (ConfigError, SchemaError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
