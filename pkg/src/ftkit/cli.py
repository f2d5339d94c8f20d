"""Command-line entry point.

    ftkit run --config experiment.json [--out DIR] [--seed N]
    ftkit grad-check --config experiment.json
    ftkit gen-data --config experiment.json --out data.csv

Exit codes: 0 success, 1 gradient-check mismatch, 2 config/schema error
(the message names the offending field path), 3 numeric failure (the
message names the epoch).  The ``FTKIT_SEED`` environment variable
overrides the config seed; an explicit ``--seed`` flag wins over both.
"""

import argparse
import json
import os
import sys

from ftkit.errors import ConfigError, NumericOverflowError
from ftkit.experiments import load_config, run_experiment, run_gen_data, run_grad_check

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _resolve_seed(flag_value):
    if flag_value is not None:
        return flag_value
    env = os.environ.get("FTKIT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError("FTKIT_SEED", f"not an integer: {env!r}") from None
    return None


def _cmd_run(args):
    doc = load_config(args.config)
    seed = _resolve_seed(args.seed)
    metrics = run_experiment(doc, out_dir=args.out, seed_override=seed)
    out_dir = args.out or doc.get("output_dir", "ftkit-run")
    print(f"task {metrics['task']} done; artifacts in {out_dir}")
    for key in ("final_train_loss", "test_mse", "final_train_mse"):
        if metrics.get(key) is not None:
            print(f"  {key}: {metrics[key]:.6g}")
    return EXIT_OK


def _cmd_grad_check(args):
    doc = load_config(args.config)
    seed = _resolve_seed(args.seed)
    report = run_grad_check(doc, seed_override=seed)
    for name, rel in report["matrices"].items():
        print(f"{name}: max relative error {rel:.3e}")
    if "static_backprop_max_diff" in report:
        print(f"static backprop max diff (b=0): {report['static_backprop_max_diff']:.3e}")
    if "diagonal_vs_full_max_diff" in report:
        print(f"diagonal vs full max diff: {report['diagonal_vs_full_max_diff']:.3e}")
    worst = report["max_relative_error"]
    print(f"max relative error: {worst:.3e} (threshold 1e-4)")
    return EXIT_OK if worst < 1e-4 else EXIT_CHECK_FAILED


def _cmd_gen_data(args):
    doc = load_config(args.config)
    info = run_gen_data(doc, args.out)
    print(f"wrote {info['rows']} rows x {len(info['columns'])} columns to {args.out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ftkit", description="Experiment harness for flexible-transmitter networks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute an experiment config")
    run_p.add_argument("--config", required=True, help="path to a JSON config")
    run_p.add_argument("--out", default=None, help="output directory (overrides config)")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.set_defaults(func=_cmd_run)

    check_p = sub.add_parser(
        "grad-check", help="verify the analytic gradient against finite differences"
    )
    check_p.add_argument("--config", required=True)
    check_p.add_argument("--seed", type=int, default=None)
    check_p.set_defaults(func=_cmd_grad_check)

    gen_p = sub.add_parser("gen-data", help="write the simulated mixture signal as CSV")
    gen_p.add_argument("--config", required=True)
    gen_p.add_argument("--out", required=True, help="destination CSV path")
    gen_p.set_defaults(func=_cmd_gen_data)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error at {exc.field_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericOverflowError as exc:
        where = f" (epoch {exc.epoch})" if exc.epoch is not None else ""
        print(f"numeric failure{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
