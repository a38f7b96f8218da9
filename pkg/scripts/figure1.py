"""Synthetic news-style experiment: learning curves plus budget and cardinality sweeps.

Writes plot-ready CSV files into ``--out`` (default ``results/figure1``):
``curves.csv`` with per-round rows, ``budget_sweep.csv`` and ``cardinality_sweep.csv``.

    python scripts/figure1.py -c configs/figure1.ini --budgets 1,2,4,100 --cardinalities 3,5,10
"""

import argparse
from pathlib import Path

from subbandit.harness.config import load_config
from subbandit.harness.results import emit_results, sweep_csv
from subbandit.harness.runner import mean_final_reward, run_experiment, sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-c", "--config", default="configs/figure1.ini")
    ap.add_argument("-o", "--out", default="results/figure1")
    ap.add_argument("--budgets", default="", help="comma-separated budgets to sweep (skipped when empty)")
    ap.add_argument("--cardinalities", default="", help="comma-separated cardinality limits to sweep")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    results = run_experiment(cfg, workers=args.workers)
    emit_results(results, "csv", out / "curves.csv")
    for policy, v in mean_final_reward(results).items():
        print(f"{policy:12s} {v:.4f}")

    if args.budgets:
        rows = sweep(cfg, "budget", [float(v) for v in args.budgets.split(",")], workers=args.workers)
        (out / "budget_sweep.csv").write_text(sweep_csv(rows), encoding="utf-8")
    if args.cardinalities:
        rows = sweep(cfg, "cardinality", [int(v) for v in args.cardinalities.split(",")], workers=args.workers)
        (out / "cardinality_sweep.csv").write_text(sweep_csv(rows), encoding="utf-8")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
