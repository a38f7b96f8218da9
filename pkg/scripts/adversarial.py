"""Adversarial two-group instance: per-round value and α-regret for each policy.

    python scripts/adversarial.py -c configs/adversarial.ini
"""

import argparse

import numpy as np

from subbandit.harness.config import load_config
from subbandit.harness.runner import run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-c", "--config", default="configs/adversarial.ini")
    ap.add_argument("--checkpoints", default="50,100,250,500")
    args = ap.parse_args()

    cfg = load_config(args.config)
    results = run_experiment(cfg)
    checkpoints = [int(v) for v in args.checkpoints.split(",")]
    alpha = results[0].alpha
    print(f"alpha * f(OPT) = {alpha * results[0].opt_value:.4f}")
    print("policy       " + "".join(f"  f@{t:<5d} reg@{t:<5d}" for t in checkpoints))
    for policy in cfg.policy.names:
        runs = [r for r in results if r.policy == policy]
        row = []
        for t in checkpoints:
            if t > cfg.experiment.horizon:
                continue
            f = np.mean([r.rounds[t - 1].f_slate for r in runs])
            reg = np.mean([r.rounds[t - 1].cum_alpha_regret for r in runs])
            row.append(f"  {f:7.4f} {reg:9.2f}")
        print(f"{policy:12s} " + "".join(row))


if __name__ == "__main__":
    main()
