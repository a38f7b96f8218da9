"""Feasibility for ``l`` knapsacks intersected with a k-system.

Budgets are normalized to 1 at construction; the original budgets are kept
for reporting.  Items whose singleton is already infeasible are removed from
the active ground set (ids are kept stable, the item is simply never
extendable).
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

from .submod_core import DomainError

log = logging.getLogger(__name__)

# absolute slack on normalized knapsack sums; guards against sums like 10 * 0.1
KNAPSACK_TOL = 1e-12


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class KnapsackConstraint:
    costs: NDArray[np.float64]
    budget: float = 1.0

    def __post_init__(self) -> None:
        c = np.array(self.costs, dtype=np.float64, copy=True).ravel()
        if c.size == 0 or not np.all(np.isfinite(c)) or np.any(c <= 0):
            raise ConstraintError("knapsack costs must be finite and strictly positive")
        if not self.budget > 0:
            raise ConstraintError("knapsack budget must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "costs", c)

    def holds(self, items: Sequence[int]) -> bool:
        return float(np.sum(self.costs[list(items)])) <= self.budget * (1.0 + KNAPSACK_TOL)


@dataclass(frozen=True, eq=False)
class PartitionMatroid:
    """``|S ∩ block_i| <= limits[i]`` for every block."""

    block_of: NDArray[np.intp]
    limits: NDArray[np.int64]

    def __post_init__(self) -> None:
        blocks = np.array(self.block_of, dtype=np.intp, copy=True).ravel()
        limits = np.array(self.limits, dtype=np.int64, copy=True).ravel()
        if np.any(limits < 0):
            raise ConstraintError("partition limits must be nonnegative")
        if blocks.size and (blocks.min() < 0 or blocks.max() >= limits.size):
            raise ConstraintError("block index outside the limits vector")
        blocks.setflags(write=False)
        limits.setflags(write=False)
        object.__setattr__(self, "block_of", blocks)
        object.__setattr__(self, "limits", limits)

    @classmethod
    def genre_cap(cls, has_genre: NDArray[np.bool_], cap: int) -> "PartitionMatroid":
        """At most ``cap`` items carrying a genre; the rest are unconstrained."""
        has_genre = np.asarray(has_genre, dtype=bool)
        blocks = np.where(has_genre, 0, 1)
        return cls(blocks, np.array([cap, has_genre.size]))

    def independent(self, items: Sequence[int]) -> bool:
        counts = np.bincount(self.block_of[list(items)], minlength=self.limits.size)
        return bool(np.all(counts <= self.limits))


class UniformMatroid(PartitionMatroid):
    """Cardinality constraint ``|S| <= limit``."""

    def __init__(self, n_items: int, limit: int) -> None:
        super().__init__(np.zeros(n_items, dtype=np.intp), np.array([limit]))

    @property
    def limit(self) -> int:
        return int(self.limits[0])


@dataclass(frozen=True, eq=False)
class KSystem:
    """Intersection of partition/uniform matroids, or a caller-supplied predicate.

    For matroid lists ``k`` is the number of matroids; for predicates the
    declared ``k`` is trusted as is.
    """

    matroids: tuple[PartitionMatroid, ...] = ()
    predicate: Callable[[Sequence[int]], bool] | None = None
    k: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "matroids", tuple(self.matroids))
        if self.predicate is not None:
            if self.matroids:
                raise ConstraintError("give either matroids or a predicate, not both")
            if self.k is None or self.k < 1:
                raise ConstraintError("a predicate-based k-system needs a declared k >= 1")
        elif self.k is None:
            object.__setattr__(self, "k", max(1, len(self.matroids)))
        if self.k < 1:
            raise ConstraintError("k must be at least 1")

    def independent(self, items: Sequence[int]) -> bool:
        if self.predicate is not None:
            return bool(self.predicate(list(items)))
        return all(m.independent(items) for m in self.matroids)


class ConstraintSystem:
    """``c_j(S) <= 1`` for every knapsack ``j`` and ``S`` independent in the k-system."""

    def __init__(
        self,
        n_items: int,
        knapsacks: Iterable[KnapsackConstraint] = (),
        system: KSystem | None = None,
    ) -> None:
        self.n_items = int(n_items)
        knapsacks = list(knapsacks)
        self.budgets = np.array([kc.budget for kc in knapsacks], dtype=np.float64)
        for kc in knapsacks:
            if kc.costs.size != self.n_items:
                raise ConstraintError(f"knapsack has {kc.costs.size} costs for {self.n_items} items")
        if knapsacks:
            self.costs = np.vstack([kc.costs / kc.budget for kc in knapsacks])
        else:
            self.costs = np.zeros((0, self.n_items))
        self.costs.setflags(write=False)
        self.system = system if system is not None else KSystem(k=1, predicate=lambda s: True)
        for m in self.system.matroids:
            if m.block_of.size != self.n_items:
                raise ConstraintError("matroid block map does not cover the ground set")

        active = np.ones(self.n_items, dtype=bool)
        for e in range(self.n_items):
            if not self._feasible_raw([e]):
                active[e] = False
        self.active = active
        self.active.setflags(write=False)
        self.dropped = [int(e) for e in np.flatnonzero(~active)]
        if self.dropped:
            warnings.warn(
                f"{len(self.dropped)} item(s) violate the constraints as singletons and were dropped: "
                f"{self.dropped[:10]}{'...' if len(self.dropped) > 10 else ''}",
                stacklevel=2,
            )

    @property
    def l(self) -> int:  # noqa: E743
        return self.costs.shape[0]

    @property
    def k(self) -> int:
        return int(self.system.k)

    @property
    def n_active(self) -> int:
        return int(self.active.sum())

    def _feasible_raw(self, s: Sequence[int]) -> bool:
        if self.l and np.any(self.costs[:, list(s)].sum(axis=1) > 1.0 + KNAPSACK_TOL):
            return False
        return self.system.independent(s)

    def _check(self, items: Iterable[int]) -> list[int]:
        s = [int(e) for e in items]
        for e in s:
            if not 0 <= e < self.n_items:
                raise DomainError(f"item id {e} outside 0..{self.n_items - 1}")
        if len(set(s)) != len(s):
            raise DomainError("item set contains duplicates")
        return s

    def feasible(self, items: Iterable[int]) -> bool:
        s = self._check(items)
        if not all(self.active[e] for e in s):
            return False
        return self._feasible_raw(s)

    def total_cost(self, e: int | None = None) -> NDArray[np.float64] | float:
        """Summed normalized cost ``c(e) = sum_j c_j(e)`` (vector over items when ``e`` is None)."""
        tot = self.costs.sum(axis=0)
        return tot if e is None else float(tot[e])

    def tracker(self, items: Iterable[int] = ()) -> "FeasibilityTracker":
        t = FeasibilityTracker(self)
        for e in self._check(items):
            t.add(e)
        return t

    def extendable_set(self, items: Iterable[int]) -> list[int]:
        s = self._check(items)
        if not self.feasible(s):
            raise ConstraintError("extendable_set called on an infeasible set")
        return [int(e) for e in np.flatnonzero(self.tracker(s).extendable_mask())]


class FeasibilityTracker:
    """Running cost sums and block counters for a growing set."""

    def __init__(self, cs: ConstraintSystem) -> None:
        self.cs = cs
        self.items: list[int] = []
        self.in_set = np.zeros(cs.n_items, dtype=bool)
        self.used = np.zeros(cs.l)
        self.counts = [np.zeros(m.limits.size, dtype=np.int64) for m in cs.system.matroids]

    def add(self, e: int) -> None:
        self.items.append(e)
        self.in_set[e] = True
        if self.cs.l:
            self.used += self.cs.costs[:, e]
        for m, cnt in zip(self.cs.system.matroids, self.counts):
            cnt[m.block_of[e]] += 1

    def extendable_mask(self) -> NDArray[np.bool_]:
        cs = self.cs
        mask = cs.active & ~self.in_set
        if cs.l:
            mask &= np.all(self.used[:, None] + cs.costs <= 1.0 + KNAPSACK_TOL, axis=0)
        if cs.system.predicate is not None:
            for e in np.flatnonzero(mask):
                if not cs.system.predicate(self.items + [int(e)]):
                    mask[e] = False
        else:
            for m, cnt in zip(cs.system.matroids, self.counts):
                mask &= cnt[m.block_of] < m.limits[m.block_of]
        return mask


def feasible(cs: ConstraintSystem, items: Iterable[int]) -> bool:
    return cs.feasible(items)


def extendable_set(cs: ConstraintSystem, items: Iterable[int]) -> list[int]:
    return cs.extendable_set(items)


def total_modified_cost(cs: ConstraintSystem, e: int) -> float:
    return cs.total_cost(e)


def build_constraints(
    n_items: int,
    costs: NDArray[np.float64] | None = None,
    budgets: Sequence[float] = (),
    genre_mask: NDArray[np.bool_] | None = None,
    genre_cap: int | None = None,
    cardinality: int | None = None,
    k: int | None = None,
) -> ConstraintSystem:
    """Assemble the common experiment shape: knapsacks + per-genre caps + cardinality.

    ``costs`` has shape ``(l, n_items)`` in original units; ``budgets`` has length ``l``.
    When ``k`` is omitted it is the number of matroids in the intersection.
    """
    knaps = []
    if costs is not None:
        costs = np.atleast_2d(np.asarray(costs, dtype=np.float64))
        if len(budgets) != costs.shape[0]:
            raise ConstraintError(f"{costs.shape[0]} cost rows but {len(budgets)} budgets")
        knaps = [KnapsackConstraint(row, b) for row, b in zip(costs, budgets)]
    matroids: list[PartitionMatroid] = []
    if genre_cap is not None:
        if genre_mask is None:
            raise ConstraintError("genre caps need a genre membership mask")
        for g in range(genre_mask.shape[1]):
            matroids.append(PartitionMatroid.genre_cap(genre_mask[:, g], genre_cap))
    if cardinality is not None:
        matroids.append(UniformMatroid(n_items, cardinality))
    if matroids:
        system = KSystem(tuple(matroids), k=k)
    else:
        system = KSystem(predicate=lambda s: True, k=k or 1)
    return ConstraintSystem(n_items, knaps, system)
