"""Set functions used as rewards: probabilistic coverage and modular values.

Both model types expose the same small surface so the policies and oracles
can treat them uniformly:

* ``basis`` -- an object producing the per-basis marginal-gain vectors
  ``x(e | S)`` for every candidate item, with an incremental state carried
  along as the set grows.
* ``weights`` -- the (nonnegative) coefficients of the basis functions.
* ``value(items)`` and ``marginal_gain(e, items)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray


class DomainError(ValueError):
    """Raised for out-of-range item or genre indices and violated preconditions."""


def _as_items(items: Iterable[int]) -> list[int]:
    return [int(e) for e in items]


@dataclass(frozen=True)
class GroundSet:
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError("ground set needs at least one item")

    @property
    def items(self) -> range:
        return range(self.n)

    def check(self, items: Iterable[int]) -> list[int]:
        out = _as_items(items)
        for e in out:
            if not 0 <= e < self.n:
                raise DomainError(f"item id {e} outside 0..{self.n - 1}")
        if len(set(out)) != len(out):
            raise DomainError("item set contains duplicates")
        return out


@dataclass(frozen=True, eq=False)
class CoverageProfile:
    """Per-item, per-genre coverage probabilities ``p[e, g]``.

    The probabilistic coverage of genre ``g`` by a set ``S`` is
    ``1 - prod_{e in S} (1 - p[e, g])``.
    """

    p: NDArray[np.float64]

    def __post_init__(self) -> None:
        p = np.array(self.p, dtype=np.float64, copy=True)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise DomainError(f"coverage matrix must be 2-D and non-empty, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or p.min() < 0.0 or p.max() > 1.0:
            raise DomainError("coverage probabilities must lie in [0, 1]")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def n_items(self) -> int:
        return self.p.shape[0]

    @property
    def n_genres(self) -> int:
        return self.p.shape[1]

    # basis protocol -------------------------------------------------------
    @property
    def d(self) -> int:
        return self.n_genres

    def empty_state(self) -> NDArray[np.float64]:
        # per-genre survival product prod(1 - p) over the current set
        return np.ones(self.n_genres)

    def add(self, state: NDArray[np.float64], e: int) -> NDArray[np.float64]:
        return state * (1.0 - self.p[e])

    def gains(self, state: NDArray[np.float64], idx: NDArray[np.intp] | None = None) -> NDArray[np.float64]:
        """Rows ``x(e | S)`` for the items in ``idx`` (all items when omitted)."""
        rows = self.p if idx is None else self.p[idx]
        return rows * state

    def state_of(self, items: Iterable[int]) -> NDArray[np.float64]:
        state = self.empty_state()
        for e in items:
            state = self.add(state, e)
        return state

    # -----------------------------------------------------------------------
    def _check_items(self, items: Iterable[int]) -> list[int]:
        return GroundSet(self.n_items).check(items)

    def coverage_value(self, genre: int, items: Iterable[int]) -> float:
        if not 0 <= genre < self.n_genres:
            raise DomainError(f"genre {genre} outside 0..{self.n_genres - 1}")
        s = self._check_items(items)
        if not s:
            return 0.0
        return float(1.0 - np.prod(1.0 - self.p[s, genre]))

    def feature_vector(self, e: int, items: Iterable[int]) -> NDArray[np.float64]:
        """Marginal gain of ``e`` on every basis function, given the set ``items``."""
        s = self._check_items(items)
        self._check_items([e])
        if e in s:
            raise DomainError(f"item {e} already in the set")
        return self.p[e] * self.state_of(s)


def coverage_value(profile: CoverageProfile, genre: int, items: Iterable[int]) -> float:
    return profile.coverage_value(genre, items)


def feature_vector(profile: CoverageProfile, e: int, items: Iterable[int]) -> NDArray[np.float64]:
    return profile.feature_vector(e, items)


@dataclass(frozen=True, eq=False)
class IndicatorBasis:
    """One indicator basis function per item; ``x(e | S)`` is the unit vector of ``e``."""

    n_items: int
    _eye: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        eye = np.eye(self.n_items)
        eye.setflags(write=False)
        object.__setattr__(self, "_eye", eye)

    @property
    def d(self) -> int:
        return self.n_items

    def empty_state(self) -> None:
        return None

    def add(self, state: None, e: int) -> None:
        return None

    def gains(self, state: None, idx: NDArray[np.intp] | None = None) -> NDArray[np.float64]:
        return self._eye if idx is None else self._eye[idx]

    def state_of(self, items: Iterable[int]) -> None:
        return None


@dataclass(frozen=True, eq=False)
class LinearSubmodularModel:
    """``f(S) = sum_g w_g * f_g(S)`` over probabilistic coverage functions."""

    profile: CoverageProfile
    weights: NDArray[np.float64]
    bound: float | None = None

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=np.float64, copy=True).ravel()
        if w.shape != (self.profile.n_genres,):
            raise DomainError(f"expected {self.profile.n_genres} weights, got {w.shape[0]}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise DomainError("weights must be finite and nonnegative")
        if self.bound is not None and np.linalg.norm(w) > self.bound:
            raise DomainError(f"weight norm {np.linalg.norm(w):.6g} exceeds declared bound {self.bound}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def basis(self) -> CoverageProfile:
        return self.profile

    @property
    def n_items(self) -> int:
        return self.profile.n_items

    def value(self, items: Iterable[int]) -> float:
        s = self.profile._check_items(items)
        if not s:
            return 0.0
        covered = 1.0 - np.prod(1.0 - self.profile.p[s], axis=0)
        return float(self.weights @ covered)

    def marginal_gain(self, e: int, items: Iterable[int]) -> float:
        return float(self.weights @ self.profile.feature_vector(e, items))

    def singleton_values(self) -> NDArray[np.float64]:
        return self.profile.p @ self.weights


@dataclass(frozen=True, eq=False)
class ModularValueModel:
    """``f(S) = sum_{e in S} v(e)``; kept exact, no product-form rounding."""

    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64, copy=True).ravel()
        if v.size < 1 or np.any(v < 0) or not np.all(np.isfinite(v)):
            raise DomainError("modular values must be finite, nonnegative, and non-empty")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_basis", IndicatorBasis(v.size))

    @property
    def basis(self) -> IndicatorBasis:
        return self._basis  # type: ignore[attr-defined]

    @property
    def weights(self) -> NDArray[np.float64]:
        return self.values

    @property
    def n_items(self) -> int:
        return self.values.size

    def value(self, items: Iterable[int]) -> float:
        s = GroundSet(self.n_items).check(items)
        return float(sum(self.values[e] for e in s))

    def marginal_gain(self, e: int, items: Iterable[int]) -> float:
        s = GroundSet(self.n_items).check(items)
        GroundSet(self.n_items).check([e])
        if e in s:
            raise DomainError(f"item {e} already in the set")
        return float(self.values[e])

    def singleton_values(self) -> NDArray[np.float64]:
        return self.values.copy()


def model_value(model: LinearSubmodularModel | ModularValueModel, items: Iterable[int]) -> float:
    return model.value(items)


def marginal_gain(model: LinearSubmodularModel | ModularValueModel, e: int, items: Iterable[int]) -> float:
    return model.marginal_gain(e, items)


def slate_features(basis, slate: Sequence[int]) -> NDArray[np.float64]:
    """Prefix-conditional features ``x(e_i | S_{i-1})`` for each slate position."""
    out = np.zeros((len(slate), basis.d))
    state = basis.empty_state()
    for i, e in enumerate(slate):
        out[i] = basis.gains(state, np.array([e]))[0]
        state = basis.add(state, e)
    return out


def slate_gains(model, slate: Sequence[int]) -> NDArray[np.float64]:
    """True per-position marginal gains ``Δf(e_i | S_{i-1})``."""
    if isinstance(model, ModularValueModel):
        return model.values[list(slate)].astype(np.float64)
    return slate_features(model.basis, slate) @ model.weights
