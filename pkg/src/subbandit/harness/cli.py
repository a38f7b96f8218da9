"""Command line: ``subbandit {run,sweep,oracle,validate}``.

Exit codes: 0 success, 2 configuration error, 3 runtime failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..linucb import ConfigError
from ..oracle import OracleError, brute_force_opt, offline_greedy_ksystem
from ..constraints import ConstraintSystem
from .config import ExperimentConfig, all_keys, dump_config, load_config, set_value, validate
from .results import emit_results, sweep_csv
from .runner import build_instance, mean_final_reward, run_experiment, sweep

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("subbandit")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", help="INI config file (defaults apply when omitted)")
    g = p.add_argument_group("config overrides")
    for section, key in all_keys():
        g.add_argument(f"--{section}.{key}", dest=f"cfg__{section}__{key}", metavar="VALUE", default=None)


def _config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    for name, value in vars(args).items():
        if name.startswith("cfg__") and value is not None:
            _, section, key = name.split("__", 2)
            set_value(cfg, f"{section}.{key}", value)
    return validate(cfg)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subbandit", description="Submodular bandits under knapsack and k-system constraints.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate every (user, repeat, policy) cell")
    _add_config_flags(p)
    p.add_argument("-o", "--out", default="results.csv")
    p.add_argument("-f", "--format", choices=["csv", "json"], default=None, help="inferred from --out when omitted")

    p = sub.add_parser("sweep", help="final cumulative average reward along budget or cardinality")
    _add_config_flags(p)
    p.add_argument("--axis", choices=["budget", "cardinality"], required=True)
    p.add_argument("--values", required=True, help="comma-separated axis values")
    p.add_argument("-o", "--out", default="sweep.csv")

    p = sub.add_parser("oracle", help="brute-force optimum of a small instance")
    _add_config_flags(p)
    p.add_argument("--user", type=int, default=0)

    p = sub.add_parser("validate", help="lint a config and print the resolved values")
    _add_config_flags(p)
    return parser


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    fmt = args.format or ("json" if str(args.out).endswith(".json") else "csv")
    results = run_experiment(cfg)
    emit_results(results, fmt, args.out, cfg)
    for policy, v in mean_final_reward(results).items():
        print(f"{policy:12s} mean final cumulative average reward {v:.6f}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values: at least one value required")
    conv = float if args.axis == "budget" else int
    try:
        values = [conv(v) for v in values]
    except ValueError:
        raise ConfigError(f"--values: cannot parse {args.values!r} for axis {args.axis}") from None
    rows = sweep(cfg, args.axis, values)
    Path(args.out).write_text(sweep_csv(rows), encoding="utf-8")
    print(sweep_csv(rows), end="")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    cfg = _config_from_args(args)
    inst = build_instance(cfg)
    if not 0 <= args.user < len(inst.models):
        raise ConfigError(f"--user must lie in 0..{len(inst.models) - 1}")
    model = inst.models[args.user]
    best, value = brute_force_opt(model, inst.cs)
    print(f"items {inst.cs.n_items} (active {inst.cs.n_active}), l={inst.cs.l}, k={inst.cs.k}")
    print(f"OPT = {best}  f(OPT) = {value:.12g}")
    print(f"alpha = {inst.alpha:.12g}  alpha*f(OPT) = {inst.alpha * value:.12g}")
    if inst.cs.system.matroids or inst.cs.system.predicate is not None:
        greedy = offline_greedy_ksystem(model, ConstraintSystem(inst.cs.n_items, (), inst.cs.system))
        print(f"k-system greedy (no knapsacks) = {greedy}  f = {model.value(greedy):.12g}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = _config_from_args(args)
    print(dump_config(cfg), end="")
    print("config OK")
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "oracle": _cmd_oracle, "validate": _cmd_validate}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, OracleError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
