"""Plot-ready result files."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .config import ExperimentConfig
from .runner import RunResult

CSV_COLUMNS = ["policy", "user", "repeat", "round", "f_slate", "cum_avg_reward", "cum_alpha_regret", "score_evals"]
SWEEP_COLUMNS = ["policy", "axis", "value", "mean_final_cum_avg_reward", "std_final_cum_avg_reward", "n_runs"]


def _num(x: float) -> str:
    return f"{x:.12g}"


def results_csv(results: list[RunResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(results, key=RunResult.key):
        for rl in r.rounds:
            w.writerow([r.policy, r.user, r.repeat, rl.round, _num(rl.f_slate),
                        _num(rl.cum_avg_reward), _num(rl.cum_alpha_regret), rl.score_evals])
    return buf.getvalue()


def results_json(results: list[RunResult], cfg: ExperimentConfig | None = None) -> str:
    def rnd(x: float) -> float:
        return float(_num(x))

    runs = []
    for r in sorted(results, key=RunResult.key):
        runs.append({
            "policy": r.policy, "user": r.user, "repeat": r.repeat,
            "alpha": rnd(r.alpha), "opt_value": rnd(r.opt_value), "opt_exact": r.opt_exact,
            "weight_norm": rnd(r.weight_norm), "max_feature_norm": rnd(r.max_feature_norm),
            "rounds": [
                {"round": rl.round, "slate": rl.slate, "rewards": [rnd(v) for v in rl.rewards],
                 "f_slate": rnd(rl.f_slate), "cum_avg_reward": rnd(rl.cum_avg_reward),
                 "cum_alpha_regret": rnd(rl.cum_alpha_regret), "score_evals": rl.score_evals}
                for rl in r.rounds
            ],
        })
    doc = {"columns": CSV_COLUMNS, "config": cfg.to_dict() if cfg is not None else None, "runs": runs}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def emit_results(results: list[RunResult], fmt: str, path, cfg: ExperimentConfig | None = None) -> Path:
    if fmt == "csv":
        text = results_csv(results)
    elif fmt == "json":
        text = results_json(results, cfg)
    else:
        raise ValueError(f"unknown result format {fmt!r}")
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path


def read_results_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        out.append({
            "policy": row["policy"], "user": int(row["user"]), "repeat": int(row["repeat"]),
            "round": int(row["round"]), "f_slate": float(row["f_slate"]),
            "cum_avg_reward": float(row["cum_avg_reward"]),
            "cum_alpha_regret": float(row["cum_alpha_regret"]), "score_evals": int(row["score_evals"]),
        })
    return out


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([row["policy"], row["axis"], row["value"], _num(row["mean_final_cum_avg_reward"]),
                    _num(row["std_final_cum_avg_reward"]), row["n_runs"]])
    return buf.getvalue()
