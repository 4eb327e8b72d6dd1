"""Command-line entry points: `chomet run` and `chomet oracle`."""

import argparse
import sys

import numpy as np

from . import benchmarks, harness, learner
from .radio import generate_timeline


def _parse_seeds(text):
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed list {text!r}; expected e.g. 1,2,3")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chomet")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write per-slot CSV records")
    run.add_argument("--config", help="TOML experiment configuration")
    run.add_argument("--preset", choices=("volatile", "stationary"),
                     help="built-in headline experiment (overridden by --config keys)")
    run.add_argument("--out", help="output CSV path (overrides the config)")
    run.add_argument("--seeds", type=_parse_seeds, help="comma-separated seed list")

    oracle = sub.add_parser("oracle", help="evaluate a hindsight oracle on the configured scenario")
    oracle.add_argument("--config", required=True)
    oracle.add_argument("--kind", choices=("dp", "per-slot"), required=True)
    return parser


def _load(args) -> harness.ExperimentConfig:
    if args.config:
        config = harness.load_config(args.config)
    elif getattr(args, "preset", None):
        config = harness.preset_config(args.preset)
    else:
        raise SystemExit("either --config or --preset is required")
    if args.config and getattr(args, "preset", None):
        print("note: --config provided, preset ignored", file=sys.stderr)
    return config


def cmd_run(args) -> int:
    config = _load(args)
    updates = {}
    if args.seeds:
        updates["seeds"] = args.seeds
    if args.out:
        updates["output_path"] = args.out
    if updates:
        from dataclasses import replace
        config = replace(config, **updates)

    records = harness.run_experiment(config)
    harness.write_csv(records, config.output_path)
    print(f"wrote {len(records)} records to {config.output_path}")

    # Diagnostics: worst-case regret bound and benchmark path length per seed.
    for seed in config.seeds:
        timeline = generate_timeline(
            config.scenario, np.random.SeedSequence([seed, harness.STREAM_TIMELINE])
        )
        hyper = learner.hyperparams_for_timeline(timeline, config.theta_scale)
        oracle = benchmarks.oracle_per_slot(timeline)
        p_t = harness.compute_path_length(oracle.decisions, timeline)
        bound = harness.regret_bound(hyper, p_t)
        print(f"seed {seed}: path_length={p_t:.6g} regret_bound={bound:.6g}")
    for alg in sorted({r.algorithm for r in records}):
        tail = harness.tail_objective(records, alg, config.tail_window)
        preps = harness.mean_tail_preparations(records, alg, config.preparations_window)
        final_regret = np.mean([
            r.avg_regret for r in records
            if r.algorithm == alg and r.slot == config.scenario.slots
        ])
        print(f"{alg}: tail_objective={tail:.6g} tail_preparations={preps:.4g} "
              f"avg_regret={final_regret:.6g}")
    return 0


def cmd_oracle(args) -> int:
    config = harness.load_config(args.config)
    for seed in config.seeds:
        timeline = generate_timeline(
            config.scenario, np.random.SeedSequence([seed, harness.STREAM_TIMELINE])
        )
        if args.kind == "dp":
            result = benchmarks.oracle_dp(timeline)
        else:
            result = benchmarks.oracle_per_slot(timeline)
        print(f"seed {seed}: total={result.total:.9g}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_oracle(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
