"""Ridge-regression estimate of the basis weights and the UCB scores built on it."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .submod_core import slate_features

REFACTOR_EVERY = 512


class ConfigError(ValueError):
    pass


class UcbState:
    """Sufficient statistics ``M = λI + Σ x xᵀ`` and ``b = Σ y x``.

    ``M_inv`` is kept by rank-one (Sherman-Morrison) updates and rebuilt from a
    Cholesky factorization every ``REFACTOR_EVERY`` observations.
    ``logdet`` accumulates ``ln det(M / λ)`` via the matrix-determinant lemma.
    """

    def __init__(self, d: int, lam: float = 1.0) -> None:
        if d < 1:
            raise ConfigError("feature dimension must be positive")
        if not lam > 0:
            raise ConfigError("ridge parameter lambda must be positive")
        self.d = d
        self.lam = float(lam)
        self.M = lam * np.eye(d)
        self.M_inv = np.eye(d) / lam
        self.b = np.zeros(d)
        self.obs_count = 0
        self.logdet = 0.0
        self.last_batch = 0
        self._since_refactor = 0

    @property
    def w(self) -> NDArray[np.float64]:
        return self.M_inv @ self.b

    def observe(self, x: NDArray[np.float64], y: float) -> "UcbState":
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.shape != (self.d,):
            raise ValueError(f"feature has length {x.shape[0]}, expected {self.d}")
        Mx = self.M_inv @ x
        q = float(x @ Mx)
        self.M += np.outer(x, x)
        self.b += y * x
        self.M_inv -= np.outer(Mx, Mx) / (1.0 + q)
        self.logdet += math.log1p(q)
        self.obs_count += 1
        self._since_refactor += 1
        if self._since_refactor >= REFACTOR_EVERY:
            self.refactor()
        return self

    def observe_many(self, X: NDArray[np.float64], ys: Sequence[float]) -> "UcbState":
        n = 0
        for x, y in zip(X, ys):
            self.observe(x, y)
            n += 1
        self.last_batch = n
        return self

    def refactor(self) -> None:
        self.M = 0.5 * (self.M + self.M.T)
        L = np.linalg.cholesky(self.M)
        L_inv = np.linalg.solve(L, np.eye(self.d))
        self.M_inv = L_inv.T @ L_inv
        self._since_refactor = 0

    def mean_and_width(self, x: NDArray[np.float64]) -> tuple[float, float]:
        x = np.asarray(x, dtype=np.float64).ravel()
        return float(self.w @ x), math.sqrt(max(float(x @ self.M_inv @ x), 0.0))

    def scorer(self, beta: float) -> "Scorer":
        return Scorer(self.w, self.M_inv.copy(), beta)


@dataclass(frozen=True)
class BetaSchedule:
    """Confidence multiplier ``β_t``.

    ``theoretical``: ``B + R sqrt(ln det(M/λ) + 2 + 2 ln(1/δ))``.
    ``practical``:   ``B + R1 sqrt(R2 * D * ln(max(m, 2)) + 1 + ln(1/δ))``.
    ``fixed``:       ``B`` (used for exact-weight and β = 0 runs).

    In the practical form ``D`` is the feature dimension (``dim="d"``) or the
    system parameter ``k`` (``dim="k"``), and ``m`` counts all observations so
    far (``count="observations"``) or only the previous slate (``count="slate"``).
    """

    variant: str = "practical"
    B: float = 0.01
    R: float = 1.0
    R1: float = 0.1
    R2: float = 1.0
    delta: float = 0.1
    dim: str = "d"
    count: str = "observations"
    k: int = 1

    def __post_init__(self) -> None:
        if self.variant not in ("theoretical", "practical", "fixed"):
            raise ConfigError(f"unknown beta variant {self.variant!r}")
        if self.dim not in ("d", "k"):
            raise ConfigError(f"beta dim must be 'd' or 'k', got {self.dim!r}")
        if self.count not in ("observations", "slate"):
            raise ConfigError(f"beta count must be 'observations' or 'slate', got {self.count!r}")
        if self.k < 1:
            raise ConfigError("beta k must be at least 1")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.B < 0 or self.R < 0 or self.R1 < 0 or self.R2 < 0:
            raise ConfigError("beta parameters must be nonnegative")

    def __call__(self, state: UcbState) -> float:
        return beta(self, state)


def beta(schedule: BetaSchedule, state: UcbState) -> float:
    s = schedule
    log_inv_delta = math.log(1.0 / s.delta)
    if s.variant == "theoretical":
        return s.B + s.R * math.sqrt(state.logdet + 2.0 + 2.0 * log_inv_delta)
    if s.variant == "practical":
        n = max(state.obs_count if s.count == "observations" else state.last_batch, 2)
        dim = state.d if s.dim == "d" else s.k
        return s.B + s.R1 * math.sqrt(s.R2 * dim * math.log(n) + 1.0 + log_inv_delta)
    return s.B


def check_lambda(lam: float, m: int) -> bool:
    """Warn when ``λ < m`` (the regret bound assumes ``λ >= m``)."""
    if lam < m:
        warnings.warn(f"lambda={lam} is below the maximal slate size m={m}", stacklevel=2)
        return False
    return True


class Scorer:
    """Frozen view of the estimator for one round.

    Every row scored through :meth:`evaluate` counts as one score evaluation.
    An optional ``audit`` callback sees ``(X, mu, sigma, beta)`` for each batch.
    """

    def __init__(self, w: NDArray[np.float64], M_inv: NDArray[np.float64] | None, beta: float) -> None:
        self.w = np.asarray(w, dtype=np.float64)
        self.M_inv = M_inv
        self.beta = float(beta)
        self.n_evals = 0
        self.audit: Callable[..., None] | None = None

    @classmethod
    def exact(cls, weights: NDArray[np.float64]) -> "Scorer":
        """Scores equal to the true marginal gains (β = 0, no width)."""
        return cls(weights, None, 0.0)

    def evaluate(self, X: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        X = np.atleast_2d(X)
        self.n_evals += X.shape[0]
        mu = X @ self.w
        if self.M_inv is None:
            sigma = np.zeros(X.shape[0])
        else:
            sigma = np.sqrt(np.maximum(((X @ self.M_inv) * X).sum(axis=1), 0.0))
        if self.audit is not None:
            self.audit(X, mu, sigma, self.beta)
        return mu, sigma

    def ucb(self, X: NDArray[np.float64]) -> NDArray[np.float64]:
        mu, sigma = self.evaluate(X)
        return mu + self.beta * sigma


def mean_and_width(state: UcbState, x: NDArray[np.float64]) -> tuple[float, float]:
    return state.mean_and_width(x)


def ucb(state: UcbState, schedule: BetaSchedule, x: NDArray[np.float64]) -> float:
    mu, sigma = state.mean_and_width(x)
    return mu + beta(schedule, state) * sigma


def modified_ucb(state: UcbState, schedule: BetaSchedule, x: NDArray[np.float64], c: float) -> float:
    if not c > 0:
        raise ValueError(f"modified UCB needs a positive cost, got {c}")
    return ucb(state, schedule, x) / c


def list_ucb(state: UcbState, schedule: BetaSchedule, slate: Sequence[int], basis) -> float:
    """``Σ μ_i + 3β Σ σ_i`` over prefix-conditional positions of ``slate``."""
    if len(slate) == 0:
        return 0.0
    X = slate_features(basis, slate)
    mu, sigma = state.scorer(0.0).evaluate(X)
    return float(mu.sum() + 3.0 * beta(schedule, state) * sigma.sum())
