"""AFSM-UCB score evaluations per round as the ground set grows.

Prints the threshold count, evaluations per round, and evaluations divided by N ln N.

    python scripts/scaling.py --sizes 50,100,200,400,800
"""

import argparse
import math

from subbandit.harness.config import ExperimentConfig
from subbandit.harness.runner import build_instance, run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sizes", default="50,100,200,400")
    ap.add_argument("--horizon", type=int, default=5)
    ap.add_argument("--epsilon", type=float, default=0.3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    print("N,thresholds,evals_per_round,evals_per_NlnN")
    for n in (int(v) for v in args.sizes.split(",")):
        cfg = ExperimentConfig().replace(
            environment={"n_items": n, "d": 15},
            estimator={"lam": 5.0},
            policy={"names": ["afsm_ucb"], "epsilon": args.epsilon},
            experiment={"horizon": args.horizon, "users": 1, "repeats": 1, "seed": args.seed},
        )
        inst = build_instance(cfg)
        (res,) = run_experiment(cfg, instance=inst)
        per_round = res.score_evals_total / len(res.rounds)
        n_thr = len(inst.thresholds.thresholds())
        print(f"{n},{n_thr},{per_round:.0f},{per_round / (n * math.log(n)):.3f}")


if __name__ == "__main__":
    main()
