"""Online slate-selection rules.

All policies take a :class:`~subbandit.linucb.Scorer` (a frozen estimator
view for the round), the constraint system, and the feature basis.  Argmax
ties go to the lowest item id; AFSM-UCB candidate ties go to the earliest
threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .constraints import ConstraintSystem
from .linucb import ConfigError, Scorer


@dataclass(frozen=True)
class ThresholdSchedule:
    """Geometric threshold grid ``ρ ← (1+ε)ρ`` from ``r ν / (1+ε)`` while ``ρ <= r ν' |N|``."""

    nu: float
    nu_prime: float
    epsilon: float
    k: int
    l: int  # noqa: E741
    n_items: int

    def __post_init__(self) -> None:
        if not self.nu > 0:
            raise ConfigError("nu must be positive")
        if self.nu_prime < self.nu:
            raise ConfigError("nu_prime must be >= nu")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if self.k < 1 or self.l < 0 or self.n_items < 1:
            raise ConfigError("need k >= 1, l >= 0 and a non-empty ground set")

    @classmethod
    def for_constraints(cls, cs: ConstraintSystem, nu: float, nu_prime: float, epsilon: float) -> "ThresholdSchedule":
        return cls(nu, nu_prime, epsilon, cs.k, cs.l, max(cs.n_active, 1))

    @property
    def r(self) -> float:
        return 2.0 / (self.k + 2 * self.l + 1)

    def thresholds(self) -> list[float]:
        out = []
        rho = self.r * self.nu / (1.0 + self.epsilon)
        stop = self.r * self.nu_prime * self.n_items
        while rho <= stop:
            out.append(rho)
            rho *= 1.0 + self.epsilon
        return out

    def max_length(self) -> int:
        return math.floor(math.log(self.nu_prime * self.n_items / self.nu) / math.log1p(self.epsilon)) + 2


@dataclass
class PolicyDecision:
    slate: list[int]
    candidate_pool_size: int = 1
    score_evals: int = 0
    list_ucb: float | None = None
    candidates: list[list[int]] = field(default_factory=list, repr=False)

    @property
    def empty(self) -> bool:
        return not self.slate


def _unit_costs(cs: ConstraintSystem) -> NDArray[np.float64]:
    # with no knapsack the summed cost is 0; fall back to unit costs
    if cs.l == 0:
        return np.ones(cs.n_items)
    return np.asarray(cs.total_cost(), dtype=np.float64)


def _empty_scores(scorer: Scorer, basis) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    return scorer.evaluate(basis.gains(basis.empty_state()))


def _gm_ucb(rho, scorer, cs, basis, costs, mu0, sigma0):
    beta = scorer.beta
    u0 = mu0 + beta * sigma0
    pass_empty = u0 / costs >= rho
    tracker = cs.tracker()
    state = basis.empty_state()
    slate: list[int] = []
    mus: list[float] = []
    sigmas: list[float] = []
    while True:
        idx = np.flatnonzero(tracker.extendable_mask() & pass_empty)
        if idx.size == 0:
            break
        if slate:
            mu, sg = scorer.evaluate(basis.gains(state, idx))
        else:
            mu, sg = mu0[idx], sigma0[idx]
        u = mu + beta * sg
        ok = u / costs[idx] >= rho
        if not ok.any():
            break
        j = int(np.argmax(np.where(ok, u, -np.inf)))
        e = int(idx[j])
        slate.append(e)
        mus.append(float(mu[j]))
        sigmas.append(float(sg[j]))
        tracker.add(e)
        state = basis.add(state, e)
    return slate, mus, sigmas


def gm_ucb(
    rho: float,
    scorer: Scorer,
    cs: ConstraintSystem,
    basis,
    costs: NDArray[np.float64] | None = None,
) -> list[int]:
    """Threshold-filtered greedy: keep items whose modified UCB clears ``rho``
    both given the current prefix and given the empty set; add the one with
    the largest (unmodified) UCB."""
    if not rho > 0:
        raise ValueError("threshold must be positive")
    costs = _unit_costs(cs) if costs is None else costs
    mu0, sigma0 = _empty_scores(scorer, basis)
    return _gm_ucb(rho, scorer, cs, basis, costs, mu0, sigma0)[0]


def afsm_ucb_round(scorer: Scorer, ts: ThresholdSchedule, cs: ConstraintSystem, basis) -> PolicyDecision:
    costs = _unit_costs(cs)
    start = scorer.n_evals
    mu0, sigma0 = _empty_scores(scorer, basis)
    best_slate: list[int] = []
    best_val = -np.inf
    pool = []
    for rho in ts.thresholds():
        slate, mus, sigmas = _gm_ucb(rho, scorer, cs, basis, costs, mu0, sigma0)
        pool.append(slate)
        val = float(sum(mus) + 3.0 * scorer.beta * sum(sigmas))
        if val > best_val:
            best_slate, best_val = slate, val
    return PolicyDecision(
        slate=best_slate,
        candidate_pool_size=len(pool),
        score_evals=scorer.n_evals - start,
        list_ucb=best_val if pool else 0.0,
        candidates=pool,
    )


def _greedy(scorer: Scorer, cs: ConstraintSystem, basis, costs: NDArray[np.float64] | None) -> PolicyDecision:
    start = scorer.n_evals
    tracker = cs.tracker()
    state = basis.empty_state()
    slate: list[int] = []
    while True:
        idx = np.flatnonzero(tracker.extendable_mask())
        if idx.size == 0:
            break
        score = scorer.ucb(basis.gains(state, idx))
        if costs is not None:
            score = score / costs[idx]
        e = int(idx[int(np.argmax(score))])
        slate.append(e)
        tracker.add(e)
        state = basis.add(state, e)
    return PolicyDecision(slate=slate, score_evals=scorer.n_evals - start)


def lsb_greedy_round(scorer: Scorer, cs: ConstraintSystem, basis) -> PolicyDecision:
    """Greedy on the UCB of the marginal gain until nothing fits."""
    return _greedy(scorer, cs, basis, None)


def c_greedy_round(scorer: Scorer, cs: ConstraintSystem, basis) -> PolicyDecision:
    """Greedy on the cost-modified UCB ``ucb(e|S) / c(e)`` until nothing fits."""
    if cs.l == 0:
        raise ConfigError("c_greedy needs at least one knapsack constraint")
    return _greedy(scorer, cs, basis, np.asarray(cs.total_cost(), dtype=np.float64))


def random_round(cs: ConstraintSystem, rng: np.random.Generator) -> PolicyDecision:
    tracker = cs.tracker()
    slate: list[int] = []
    while True:
        idx = np.flatnonzero(tracker.extendable_mask())
        if idx.size == 0:
            break
        e = int(idx[rng.integers(idx.size)])
        slate.append(e)
        tracker.add(e)
    return PolicyDecision(slate=slate, score_evals=0)


@dataclass
class RoundContext:
    scorer: Scorer
    cs: ConstraintSystem
    basis: object
    thresholds: ThresholdSchedule | None
    rng: np.random.Generator


PolicyFn = Callable[[RoundContext], PolicyDecision]

POLICIES: dict[str, PolicyFn] = {
    "afsm_ucb": lambda ctx: afsm_ucb_round(ctx.scorer, ctx.thresholds, ctx.cs, ctx.basis),
    "lsb_greedy": lambda ctx: lsb_greedy_round(ctx.scorer, ctx.cs, ctx.basis),
    "c_greedy": lambda ctx: c_greedy_round(ctx.scorer, ctx.cs, ctx.basis),
    "random": lambda ctx: random_round(ctx.cs, ctx.rng),
}

# policies that never read the estimator
MODEL_FREE = frozenset({"random"})
