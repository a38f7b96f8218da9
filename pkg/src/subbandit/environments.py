"""Reward environments and the semi-bandit feedback channel."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .constraints import ConstraintSystem, KnapsackConstraint, KSystem, UniformMatroid
from .linucb import ConfigError
from .submod_core import CoverageProfile, ModularValueModel

MIN_COST = 1e-6


class FeedbackError(ValueError):
    pass


class CsvFormatError(ValueError):
    pass


def two_high_rows(
    rng: np.random.Generator,
    n_rows: int,
    d: int,
    high: tuple[float, float] = (0.5, 0.8),
    low: tuple[float, float] = (0.0, 0.01),
    n_high: int = 2,
) -> NDArray[np.float64]:
    """Rows with ``n_high`` random entries from ``U(high)`` and the rest from ``U(low)``."""
    if not 0 < n_high <= d:
        raise ConfigError(f"n_high={n_high} must lie in 1..d={d}")
    out = rng.uniform(low[0], low[1], size=(n_rows, d))
    for i in range(n_rows):
        cols = rng.choice(d, size=n_high, replace=False)
        out[i, cols] = rng.uniform(high[0], high[1], size=n_high)
    return out


@dataclass(frozen=True)
class SyntheticSpec:
    n_items: int = 1000
    d: int = 15
    n_users: int = 100
    high_range: tuple[float, float] = (0.5, 0.8)
    low_range: tuple[float, float] = (0.0, 0.01)
    n_high_genres: int = 2
    cost_range: tuple[float, float] = (0.0, 1.0)
    seed: int = 0


@dataclass(frozen=True, eq=False)
class SyntheticInstance:
    profile: CoverageProfile
    costs: NDArray[np.float64]
    weights: NDArray[np.float64]  # (n_users, d)


def generate_synthetic(spec: SyntheticSpec) -> SyntheticInstance:
    """News-style instance: items and user weights both follow the two-high-genre scheme."""
    if spec.n_items < 1 or spec.d < 1 or spec.n_users < 1:
        raise ConfigError("synthetic sizes must be positive")
    if not spec.cost_range[1] > max(spec.cost_range[0], MIN_COST):
        raise ConfigError("cost range leaves no positive costs")
    ss = np.random.SeedSequence(spec.seed)
    item_seq, cost_seq, user_seq = ss.spawn(3)
    p = two_high_rows(np.random.default_rng(item_seq), spec.n_items, spec.d,
                      spec.high_range, spec.low_range, spec.n_high_genres)
    rng = np.random.default_rng(cost_seq)
    costs = rng.uniform(*spec.cost_range, size=spec.n_items)
    bad = costs < MIN_COST
    while bad.any():
        costs[bad] = rng.uniform(*spec.cost_range, size=int(bad.sum()))
        bad = costs < MIN_COST
    weights = two_high_rows(np.random.default_rng(user_seq), spec.n_users, spec.d,
                            spec.high_range, spec.low_range, spec.n_high_genres)
    return SyntheticInstance(CoverageProfile(p), costs, weights)


def bernoulli_safe_weights(profile: CoverageProfile, w: NDArray[np.float64]) -> NDArray[np.float64]:
    """Shrink ``w`` just enough that every singleton value is at most 1.

    Marginal gains never exceed singleton values for a submodular ``f``, so
    this keeps every Bernoulli success probability inside [0, 1].
    """
    top = float(np.max(profile.p @ w))
    return w / top if top > 1.0 else w.copy()


@dataclass(frozen=True)
class AdversarialSpec:
    m: int = 10
    eps_gap: float = 0.1
    alpha: float = 0.4

    def bound(self) -> float:
        m, e = self.m, self.eps_gap
        return (m - 3) * (1 + e) / m**2 + 3 / m


@dataclass(frozen=True, eq=False)
class AdversarialInstance:
    model: ModularValueModel
    costs: NDArray[np.float64]
    cs: ConstraintSystem

    @property
    def cheap(self) -> list[int]:
        m = self.costs.size // 2
        return list(range(m, 2 * m))

    @property
    def valuable(self) -> list[int]:
        return list(range(self.costs.size // 2))


def generate_adversarial(spec: AdversarialSpec) -> AdversarialInstance:
    """Two groups of ``m`` items: ids ``0..m-1`` (value 1/m, cost 1/m) and
    ``m..2m-1`` (value (1+ϵ)/m², cost 1/m²), under ``|S| <= m`` and a unit knapsack."""
    m, eps = spec.m, spec.eps_gap
    if m < 4:
        raise ConfigError("adversarial instance needs m >= 4")
    if not eps > 0:
        raise ConfigError("eps_gap must be positive")
    if not spec.bound() < spec.alpha:
        raise ConfigError(
            f"(m-3)(1+eps)/m^2 + 3/m = {spec.bound():.6g} must be below alpha={spec.alpha}; "
            f"raise alpha above {spec.bound():.6g} or increase m"
        )
    values = np.concatenate([np.full(m, 1.0 / m), np.full(m, (1.0 + eps) / m**2)])
    costs = np.concatenate([np.full(m, 1.0 / m), np.full(m, 1.0 / m**2)])
    n = 2 * m
    cs = ConstraintSystem(n, [KnapsackConstraint(costs, 1.0)], KSystem((UniformMatroid(n, m),)))
    return AdversarialInstance(ModularValueModel(values), costs, cs)


class FeedbackChannel:
    """Noisy per-position rewards ``y_i = Δf_i + noise``."""

    def __init__(self, mode: str = "bernoulli", R: float = 0.1, seed=None) -> None:
        if mode not in ("bernoulli", "gaussian"):
            raise ConfigError(f"unknown feedback mode {mode!r}")
        if R < 0:
            raise ConfigError("noise scale R must be nonnegative")
        self.mode = mode
        self.R = float(R)
        self.rng = np.random.default_rng(seed)

    def emit(self, gains) -> NDArray[np.float64]:
        g = np.asarray(gains, dtype=np.float64).ravel()
        if self.mode == "bernoulli":
            bad = np.flatnonzero((g < 0.0) | (g > 1.0) | ~np.isfinite(g))
            if bad.size:
                raise FeedbackError(f"Bernoulli feedback needs gains in [0, 1]; position {bad[0]} has {g[bad[0]]!r}")
            return (self.rng.random(g.size) < g).astype(np.float64)
        return g + self.R * self.rng.standard_normal(g.size)


def emit_feedback(channel: FeedbackChannel, gains) -> NDArray[np.float64]:
    return channel.emit(gains)


# --- feature CSV -------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_feature_csv(path, profile: CoverageProfile, costs, item_ids=None) -> None:
    """Write ``item_id,cost_1..cost_l,p_1..p_d`` with shortest round-trip floats."""
    costs = np.atleast_2d(np.asarray(costs, dtype=np.float64))
    if costs.shape[1] != profile.n_items and costs.shape[0] == profile.n_items:
        costs = costs.T
    l, d = costs.shape[0], profile.n_genres  # noqa: E741
    ids = list(range(profile.n_items)) if item_ids is None else list(item_ids)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["item_id"] + [f"cost_{j + 1}" for j in range(l)] + [f"p_{g + 1}" for g in range(d)])
    for e in range(profile.n_items):
        w.writerow([ids[e]] + [_fmt(c) for c in costs[:, e]] + [_fmt(v) for v in profile.p[e]])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def load_feature_csv(path) -> tuple[CoverageProfile, NDArray[np.float64]]:
    """Parse a feature CSV; returns the profile and an ``(l, n)`` cost matrix.

    Row order defines item ids; the ``item_id`` column is carried as a label only.
    """
    text = Path(path).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "item_id":
        raise CsvFormatError(f"{path}:1: header must start with item_id")
    l = 0  # noqa: E741
    while 1 + l < len(header) and header[1 + l] == f"cost_{l + 1}":
        l += 1  # noqa: E741
    d = len(header) - 1 - l
    if d < 1 or header[1 + l:] != [f"p_{g + 1}" for g in range(d)]:
        raise CsvFormatError(f"{path}:1: expected columns cost_1..cost_l then p_1..p_d, got {header}")
    costs, probs = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise CsvFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        vals = []
        for col, cell in zip(header[1:], row[1:]):
            try:
                v = float(cell)
            except ValueError:
                raise CsvFormatError(f"{path}:{lineno}: column {col}: not a number: {cell!r}") from None
            if not math.isfinite(v):
                raise CsvFormatError(f"{path}:{lineno}: column {col}: non-finite value {cell!r}")
            if col.startswith("cost_") and v <= 0:
                raise CsvFormatError(f"{path}:{lineno}: column {col}: cost must be positive, got {cell}")
            if col.startswith("p_") and not 0.0 <= v <= 1.0:
                raise CsvFormatError(f"{path}:{lineno}: column {col}: probability {cell} outside [0, 1]")
            vals.append(v)
        costs.append(vals[:l])
        probs.append(vals[l:])
    if not probs:
        raise CsvFormatError(f"{path}: no data rows")
    cost_arr = np.array(costs, dtype=np.float64).T.reshape(l, len(probs))
    return CoverageProfile(np.array(probs)), cost_arr


def load_feature_labels(path) -> list[str]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return [r[0] for r in rows[1:] if r]
