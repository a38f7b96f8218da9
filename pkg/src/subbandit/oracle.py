"""Offline references: exhaustive optimum, k-system greedy, α-regret bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .constraints import ConstraintError, ConstraintSystem, KSystem
from .linucb import ConfigError, Scorer

MAX_BRUTE_FORCE = 20


class OracleError(ValueError):
    pass


def brute_force_opt(model, cs: ConstraintSystem) -> tuple[list[int], float]:
    """Exact maximizer of ``model.value`` over feasible sets.

    Depth-first over increasing item ids; a branch is cut as soon as its
    prefix is infeasible (feasibility is downward closed).  Ties keep the
    lexicographically smallest set, which is the first one met in DFS order.
    """
    n = cs.n_items
    if n > MAX_BRUTE_FORCE:
        raise OracleError(f"brute force refuses ground sets larger than {MAX_BRUTE_FORCE} (got {n})")
    basis, w = model.basis, np.asarray(model.weights)
    active = [e for e in range(n) if cs.active[e]]
    best: list[int] = []
    best_val = 0.0

    def dfs(start: int, tracker, state, value: float) -> None:
        nonlocal best, best_val
        mask = tracker.extendable_mask()
        for pos in range(start, len(active)):
            e = active[pos]
            if not mask[e]:
                continue
            gain = float(basis.gains(state, np.array([e]))[0] @ w)
            child = cs.tracker(tracker.items)
            child.add(e)
            v = value + gain
            if v > best_val:
                best, best_val = list(child.items), v
            dfs(pos + 1, child, basis.add(state, e), v)

    dfs(0, cs.tracker(), basis.empty_state(), 0.0)
    return best, model.value(best)


def brute_force_unpruned(model, cs: ConstraintSystem) -> tuple[list[int], float]:
    """Plain enumeration of every subset; reference for the pruned search."""
    n = cs.n_items
    if n > MAX_BRUTE_FORCE:
        raise OracleError(f"brute force refuses ground sets larger than {MAX_BRUTE_FORCE} (got {n})")
    best: list[int] = []
    best_val = 0.0
    for size in range(1, n + 1):
        for s in combinations(range(n), size):
            if cs.feasible(s):
                v = model.value(s)
                if v > best_val or (v == best_val and list(s) < best):
                    best, best_val = list(s), v
    return best, best_val


def offline_greedy_ksystem(model, system: KSystem | ConstraintSystem) -> list[int]:
    """Greedy by true marginal gain over extensions independent in the k-system."""
    if isinstance(system, ConstraintSystem):
        if system.l:
            raise ConstraintError("offline k-system greedy does not accept knapsacks")
        cs = system
    else:
        cs = ConstraintSystem(model.n_items, (), system)
    scorer = Scorer.exact(model.weights)
    basis = model.basis
    tracker = cs.tracker()
    state = basis.empty_state()
    while True:
        idx = np.flatnonzero(tracker.extendable_mask())
        if idx.size == 0:
            break
        e = int(idx[int(np.argmax(scorer.ucb(basis.gains(state, idx))))])
        tracker.add(e)
        state = basis.add(state, e)
    return list(tracker.items)


def alpha_from_config(k: int, l: int, epsilon: float) -> float:  # noqa: E741
    """``1 / ((1 + ε)(k + 2l + 1))``."""
    if k < 1:
        raise ConfigError("k must be a positive integer")
    if l < 0 or epsilon < 0:
        raise ConfigError("need l >= 0 and epsilon >= 0")
    return 1.0 / ((1.0 + epsilon) * (k + 2 * l + 1))


@dataclass
class RegretLedger:
    alpha: float
    opt_value: float
    per_round: list[tuple[float, float]] = field(default_factory=list)
    cumulative: float = 0.0

    def record_round(self, f_of_slate: float) -> float:
        inc = self.alpha * self.opt_value - f_of_slate
        self.per_round.append((f_of_slate, inc))
        self.cumulative += inc
        return self.cumulative

    def recompute(self) -> float:
        total = 0.0
        for _, inc in self.per_round:
            total += inc
        return total


def record_round(ledger: RegretLedger, f_of_slate: float) -> RegretLedger:
    ledger.record_round(f_of_slate)
    return ledger
