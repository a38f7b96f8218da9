"""Pick estimator settings for the synthetic news-style run on held-out users.

The grid is scored by AFSM-UCB's mean final cumulative average reward on an
instance drawn from a master seed that the reported run never uses.

    python scripts/tune_figure1.py --seed 100 --lam 1,5 --R1 0,0.01,0.1
"""

import argparse
import itertools
import time

from subbandit.harness.config import ExperimentConfig
from subbandit.harness.runner import mean_final_reward, run_experiment


def floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=100, help="held-out master seed")
    ap.add_argument("--lam", type=floats, default=[1.0, 5.0])
    ap.add_argument("--R1", type=floats, default=[0.0, 0.01, 0.1])
    ap.add_argument("--B", type=floats, default=[0.01])
    ap.add_argument("--policies", default="afsm_ucb", help="comma-separated policies to report")
    ap.add_argument("--horizon", type=int, default=100)
    ap.add_argument("--users", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    names = [p.strip() for p in args.policies.split(",")]
    base = ExperimentConfig().replace(
        environment={"n_items": 200, "d": 15},
        constraints={"budgets": [2.0], "cardinality": 5},
        policy={"names": names, "epsilon": 0.3},
        experiment={"horizon": args.horizon, "users": args.users, "repeats": args.repeats, "seed": args.seed},
    )
    best = None
    print("lam,R1,B," + ",".join(names) + ",seconds")
    for lam, r1, b in itertools.product(args.lam, args.R1, args.B):
        t0 = time.perf_counter()
        means = mean_final_reward(run_experiment(base.replace(estimator={"lam": lam, "R1": r1, "B": b})))
        cells = ",".join(f"{means[p]:.4f}" for p in names)
        print(f"{lam},{r1},{b},{cells},{time.perf_counter() - t0:.1f}", flush=True)
        if best is None or means[names[0]] > best[0]:
            best = (means[names[0]], lam, r1, b)
    print(f"best for {names[0]}: lam={best[1]} R1={best[2]} B={best[3]} ({best[0]:.4f})")


if __name__ == "__main__":
    main()
