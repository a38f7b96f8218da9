"""Simulation loop: select -> feed back -> update, per (user, repeat, policy) cell."""

from __future__ import annotations

import logging
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..constraints import ConstraintSystem, build_constraints
from ..environments import (
    AdversarialSpec,
    FeedbackChannel,
    SyntheticSpec,
    bernoulli_safe_weights,
    generate_adversarial,
    generate_synthetic,
    load_feature_csv,
    two_high_rows,
)
from ..linucb import BetaSchedule, ConfigError, Scorer, UcbState, check_lambda
from ..oracle import MAX_BRUTE_FORCE, RegretLedger, alpha_from_config, brute_force_opt
from ..policies import MODEL_FREE, POLICIES, RoundContext, ThresholdSchedule, afsm_ucb_round, c_greedy_round, lsb_greedy_round
from ..submod_core import LinearSubmodularModel, slate_features
from .config import ExperimentConfig, validate

log = logging.getLogger(__name__)

POLICY_INDEX = {name: i for i, name in enumerate(POLICIES)}


def child_seed(master: int, *path: int) -> np.random.SeedSequence:
    """Fixed splitting rule: every stream is keyed by (master, purpose, indices...)."""
    return np.random.SeedSequence([int(master), *[int(p) for p in path]])


@dataclass
class Instance:
    basis: object
    cs: ConstraintSystem
    models: list  # one reward model per user
    thresholds: ThresholdSchedule
    alpha: float
    opt_values: list[float]
    opt_exact: bool


@dataclass
class RoundLog:
    round: int
    slate: list[int]
    rewards: list[float]
    f_slate: float
    alpha_opt: float
    increment: float
    cum_avg_reward: float
    cum_alpha_regret: float
    score_evals: int


@dataclass
class RunResult:
    policy: str
    user: int
    repeat: int
    alpha: float
    opt_value: float
    opt_exact: bool
    rounds: list[RoundLog] = field(default_factory=list)
    weight_norm: float = 0.0
    max_feature_norm: float = 0.0
    wall_clock: float = 0.0

    @property
    def final_regret(self) -> float:
        return self.rounds[-1].cum_alpha_regret if self.rounds else 0.0

    @property
    def final_cum_avg_reward(self) -> float:
        return self.rounds[-1].cum_avg_reward if self.rounds else 0.0

    @property
    def score_evals_total(self) -> int:
        return sum(r.score_evals for r in self.rounds)

    def cum_avg_series(self) -> np.ndarray:
        return np.array([r.cum_avg_reward for r in self.rounds])

    def key(self) -> tuple:
        return (self.policy, self.user, self.repeat)


def _scaled(profile, w, mode: str, feedback: str):
    if mode == "singleton" or (mode == "auto" and feedback == "bernoulli"):
        return bernoulli_safe_weights(profile, w)
    return w


def _reference_value(model, cs: ConstraintSystem, ts: ThresholdSchedule) -> tuple[float, bool]:
    """Exact optimum when brute force is possible, else the best offline heuristic value."""
    if cs.n_items <= MAX_BRUTE_FORCE:
        return brute_force_opt(model, cs)[1], True
    basis = model.basis
    cands = [
        afsm_ucb_round(Scorer.exact(model.weights), ts, cs, basis).slate,
        lsb_greedy_round(Scorer.exact(model.weights), cs, basis).slate,
    ]
    if cs.l:
        cands.append(c_greedy_round(Scorer.exact(model.weights), cs, basis).slate)
    return max(model.value(s) for s in cands), False


def build_instance(cfg: ExperimentConfig) -> Instance:
    validate(cfg)
    env, con, pol, run = cfg.environment, cfg.constraints, cfg.policy, cfg.experiment
    master = run.seed
    alpha = run.alpha
    if env.kind == "adversarial":
        adv = generate_adversarial(AdversarialSpec(env.adv_m, env.adv_eps_gap, env.adv_alpha))
        cs, basis = adv.cs, adv.model.basis
        models = [adv.model] * run.users
        if alpha is None:
            alpha = env.adv_alpha
        # OPT is the valuable group by construction (brute force agrees; see tests)
        known_opt = adv.model.value(adv.valuable)
    else:
        known_opt = None
        if env.kind == "synthetic":
            seed = int(child_seed(master, 0).generate_state(1)[0])
            inst = generate_synthetic(SyntheticSpec(env.n_items, env.d, run.users, seed=seed))
            profile, costs, weights = inst.profile, inst.costs[None, :], inst.weights
        else:
            profile, costs = load_feature_csv(env.csv_path)
            weights = two_high_rows(np.random.default_rng(child_seed(master, 1)), run.users, profile.n_genres)
        if costs.shape[0] != len(con.budgets):
            raise ConfigError(f"constraints.budgets: {costs.shape[0]} cost column(s) need as many budgets, got {len(con.budgets)}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cs = build_constraints(
                profile.n_items, costs, con.budgets,
                genre_mask=profile.p >= con.genre_threshold,
                genre_cap=con.genre_cap, cardinality=con.cardinality, k=con.k,
            )
        if cs.dropped:
            log.warning("%d item(s) infeasible as singletons were dropped", len(cs.dropped))
        basis = profile
        models = [
            LinearSubmodularModel(profile, _scaled(profile, w, env.weight_scaling, run.feedback))
            for w in weights
        ]
    ts = ThresholdSchedule.for_constraints(cs, pol.nu, pol.nu_prime, pol.epsilon)
    if alpha is None:
        alpha = alpha_from_config(cs.k, cs.l, pol.epsilon)
    if known_opt is not None:
        refs = [(known_opt, True)] * len(models)
    else:
        refs = [_reference_value(m, cs, ts) for m in models]
    return Instance(basis, cs, models, ts, alpha, [v for v, _ in refs], all(e for _, e in refs))


def _max_slate(cs: ConstraintSystem) -> int:
    caps = [int(m.limits.sum()) for m in cs.system.matroids]
    return min([cs.n_active] + caps)


def run_cell(cfg: ExperimentConfig, inst: Instance, policy: str, user: int, repeat: int) -> RunResult:
    est, run = cfg.estimator, cfg.experiment
    pidx = POLICY_INDEX[policy]
    model = inst.models[user]
    basis, cs = inst.basis, inst.cs
    state = UcbState(basis.d, est.lam)
    schedule = BetaSchedule(est.beta_variant, est.B, est.R, est.R1, est.R2, est.delta,
                            dim=est.beta_dim, count=est.beta_count, k=cs.k)
    channel = FeedbackChannel(run.feedback, run.noise_R, child_seed(run.seed, 2, user, repeat, pidx))
    rng = np.random.default_rng(child_seed(run.seed, 3, user, repeat, pidx))
    ledger = RegretLedger(inst.alpha, inst.opt_values[user])
    fn = POLICIES[policy]
    res = RunResult(policy, user, repeat, inst.alpha, inst.opt_values[user], inst.opt_exact,
                    weight_norm=float(np.linalg.norm(model.weights)))
    t0 = time.perf_counter()
    total = 0.0
    for t in range(1, run.horizon + 1):
        scorer = state.scorer(schedule(state))
        dec = fn(RoundContext(scorer, cs, basis, inst.thresholds, rng))
        if not cs.feasible(dec.slate):
            raise RuntimeError(f"{policy} produced an infeasible slate at round {t}: {dec.slate}")
        X = slate_features(basis, dec.slate)
        gains = X @ model.weights
        f = model.value(dec.slate)
        y = channel.emit(gains)
        if policy not in MODEL_FREE and dec.slate:
            state.observe_many(X, y)
        if X.size:
            res.max_feature_norm = max(res.max_feature_norm, float(np.linalg.norm(X, axis=1).max()))
        ledger.record_round(f)
        total += f
        res.rounds.append(RoundLog(
            round=t, slate=dec.slate, rewards=[float(v) for v in y], f_slate=f,
            alpha_opt=inst.alpha * ledger.opt_value, increment=ledger.per_round[-1][1],
            cum_avg_reward=total / t, cum_alpha_regret=ledger.cumulative, score_evals=dec.score_evals,
        ))
    res.wall_clock = time.perf_counter() - t0
    return res


def run_experiment(cfg: ExperimentConfig, workers: int | None = None, instance: Instance | None = None) -> list[RunResult]:
    """Every (user, repeat, policy) cell with a fresh estimator and feedback stream.

    Cells are independent, so they may run on a thread pool; results come back
    sorted by (policy, user, repeat) regardless of scheduling.
    """
    inst = instance if instance is not None else build_instance(cfg)
    run = cfg.experiment
    check_lambda(cfg.estimator.lam, _max_slate(inst.cs))
    cells = [(p, u, r) for p in cfg.policy.names for u in range(run.users) for r in range(run.repeats)]
    n_workers = workers if workers is not None else run.workers
    if n_workers <= 1:
        results = [run_cell(cfg, inst, *c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(lambda c: run_cell(cfg, inst, *c), cells))
    return sorted(results, key=RunResult.key)


def mean_final_reward(results: list[RunResult]) -> dict[str, float]:
    out: dict[str, list[float]] = {}
    for r in results:
        out.setdefault(r.policy, []).append(r.final_cum_avg_reward)
    return {p: float(np.mean(v)) for p, v in out.items()}


def sweep(cfg: ExperimentConfig, axis: str, values, workers: int | None = None) -> list[dict]:
    """Final cumulative average reward per (policy, value) along ``budget`` or ``cardinality``."""
    rows = []
    for v in values:
        if axis == "budget":
            sub = cfg.replace(constraints={"budgets": [float(v)] * max(len(cfg.constraints.budgets), 1)})
        elif axis == "cardinality":
            sub = cfg.replace(constraints={"cardinality": int(v)})
        else:
            raise ConfigError(f"sweep axis must be 'budget' or 'cardinality', got {axis!r}")
        results = run_experiment(sub, workers=workers)
        by_policy: dict[str, list[float]] = {}
        for r in results:
            by_policy.setdefault(r.policy, []).append(r.final_cum_avg_reward)
        for p in sub.policy.names:
            vals = np.array(by_policy[p])
            rows.append({
                "policy": p, "axis": axis, "value": v,
                "mean_final_cum_avg_reward": float(vals.mean()),
                "std_final_cum_avg_reward": float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
                "n_runs": int(vals.size),
            })
    return rows
