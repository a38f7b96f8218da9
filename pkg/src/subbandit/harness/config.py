"""Experiment configuration: INI sections ``environment``, ``constraints``,
``estimator``, ``policy`` and ``experiment``, one dataclass each.

Every key can be overridden from the command line as ``--section.key value``.
"""

from __future__ import annotations

import configparser
import copy
import dataclasses
import typing
from dataclasses import dataclass, field
from pathlib import Path

from ..linucb import ConfigError
from ..policies import POLICIES


@dataclass
class EnvironmentConfig:
    kind: str = "synthetic"  # synthetic | adversarial | csv
    n_items: int = 1000
    d: int = 15
    csv_path: str = ""
    adv_m: int = 10
    adv_eps_gap: float = 0.1
    adv_alpha: float = 0.4
    weight_scaling: str = "auto"  # auto | none | singleton


@dataclass
class ConstraintConfig:
    budgets: list[float] = field(default_factory=lambda: [2.0])
    cardinality: typing.Optional[int] = 5
    genre_cap: typing.Optional[int] = None
    genre_threshold: float = 0.1
    k: typing.Optional[int] = None


@dataclass
class EstimatorConfig:
    lam: float = 0.1
    beta_variant: str = "practical"
    B: float = 0.01
    R: float = 0.1
    R1: float = 0.1
    R2: float = 1.0
    delta: float = 0.1
    beta_dim: str = "d"
    beta_count: str = "observations"


@dataclass
class PolicyConfig:
    names: list[str] = field(default_factory=lambda: ["afsm_ucb", "lsb_greedy", "c_greedy", "random"])
    nu: float = 0.01
    nu_prime: float = 1.0
    epsilon: float = 0.3


@dataclass
class RunConfig:
    horizon: int = 100
    users: int = 10
    repeats: int = 3
    feedback: str = "bernoulli"  # bernoulli | gaussian
    noise_R: float = 0.1
    seed: int = 0
    workers: int = 1
    alpha: typing.Optional[float] = None


@dataclass
class ExperimentConfig:
    environment: EnvironmentConfig = field(default_factory=EnvironmentConfig)
    constraints: ConstraintConfig = field(default_factory=ConstraintConfig)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    experiment: RunConfig = field(default_factory=RunConfig)

    def replace(self, **sections) -> "ExperimentConfig":
        out = copy.deepcopy(self)
        for name, updates in sections.items():
            setattr(out, name, dataclasses.replace(getattr(out, name), **updates))
        return out

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


SECTIONS = [f.name for f in dataclasses.fields(ExperimentConfig)]


def _section_type(name: str) -> type:
    return typing.get_type_hints(ExperimentConfig)[name]


def _convert(section: str, key: str, raw: str, tp):
    where = f"{section}.{key}"
    raw = raw.strip()
    origin = typing.get_origin(tp)
    try:
        if origin is typing.Union:
            inner = [a for a in typing.get_args(tp) if a is not type(None)][0]
            if raw.lower() in ("", "none", "null"):
                return None
            return _convert(section, key, raw, inner)
        if origin is list:
            (inner,) = typing.get_args(tp)
            return [inner(x.strip()) for x in raw.split(",") if x.strip()]
        if tp is bool:
            return raw.lower() in ("1", "true", "yes", "on")
        return tp(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: cannot parse {raw!r} as {getattr(tp, '__name__', tp)}") from None


def set_value(cfg: ExperimentConfig, dotted: str, raw: str) -> None:
    if "." not in dotted:
        raise ConfigError(f"{dotted}: expected section.key")
    section, key = dotted.split(".", 1)
    if section not in SECTIONS:
        raise ConfigError(f"{dotted}: unknown section {section!r} (known: {', '.join(SECTIONS)})")
    obj = getattr(cfg, section)
    hints = typing.get_type_hints(type(obj))
    if key not in hints:
        raise ConfigError(f"{dotted}: unknown key {key!r}")
    setattr(obj, key, _convert(section, key, raw, hints[key]))


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep key case (B, R1, ...)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None
    cfg = ExperimentConfig()
    for section in cp.sections():
        for key, raw in cp.items(section):
            set_value(cfg, f"{section}.{key}", raw)
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def dump_config(cfg: ExperimentConfig) -> str:
    lines = []
    for section in SECTIONS:
        lines.append(f"[{section}]")
        for key, value in dataclasses.asdict(getattr(cfg, section)).items():
            if isinstance(value, list):
                value = ", ".join(str(v) for v in value)
            lines.append(f"{key} = {'none' if value is None else value}")
        lines.append("")
    return "\n".join(lines)


def all_keys() -> list[tuple[str, str]]:
    out = []
    for section in SECTIONS:
        for f in dataclasses.fields(_section_type(section)):
            out.append((section, f.name))
    return out


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    """Field-level checks; raises :class:`ConfigError` naming the first bad field."""
    env, con, est, pol, run = cfg.environment, cfg.constraints, cfg.estimator, cfg.policy, cfg.experiment

    def bad(where: str, msg: str):
        raise ConfigError(f"{where}: {msg}")

    if env.kind not in ("synthetic", "adversarial", "csv"):
        bad("environment.kind", f"unknown environment {env.kind!r}")
    if env.kind == "synthetic" and (env.n_items < 1 or env.d < 1):
        bad("environment.n_items", "synthetic sizes must be positive")
    if env.kind == "csv" and not env.csv_path:
        bad("environment.csv_path", "required for kind = csv")
    if env.kind == "adversarial" and env.adv_m < 4:
        bad("environment.adv_m", "must be at least 4")
    if env.weight_scaling not in ("auto", "none", "singleton"):
        bad("environment.weight_scaling", f"unknown mode {env.weight_scaling!r}")
    if any(not b > 0 for b in con.budgets):
        bad("constraints.budgets", "budgets must be positive")
    if con.cardinality is not None and con.cardinality < 0:
        bad("constraints.cardinality", "must be nonnegative")
    if con.genre_cap is not None and con.genre_cap < 0:
        bad("constraints.genre_cap", "must be nonnegative")
    if con.k is not None and con.k < 1:
        bad("constraints.k", "must be at least 1")
    if not est.lam > 0:
        bad("estimator.lam", "must be positive")
    if est.beta_variant not in ("theoretical", "practical", "fixed"):
        bad("estimator.beta_variant", f"unknown variant {est.beta_variant!r}")
    if not 0.0 < est.delta < 1.0:
        bad("estimator.delta", "must lie in (0, 1)")
    if est.beta_dim not in ("d", "k"):
        bad("estimator.beta_dim", f"must be 'd' or 'k', got {est.beta_dim!r}")
    if est.beta_count not in ("observations", "slate"):
        bad("estimator.beta_count", f"must be 'observations' or 'slate', got {est.beta_count!r}")
    for key in ("B", "R", "R1", "R2"):
        if getattr(est, key) < 0:
            bad(f"estimator.{key}", "must be nonnegative")
    if not pol.names:
        bad("policy.names", "at least one policy is required")
    for name in pol.names:
        if name not in POLICIES:
            bad("policy.names", f"unknown policy {name!r} (known: {', '.join(POLICIES)})")
    if len(set(pol.names)) != len(pol.names):
        bad("policy.names", "duplicate policy names")
    if not pol.epsilon > 0:
        bad("policy.epsilon", "must be positive")
    if not pol.nu > 0:
        bad("policy.nu", "must be positive")
    if pol.nu > pol.nu_prime:
        bad("policy.nu_prime", "must be >= policy.nu")
    if run.horizon < 1:
        bad("experiment.horizon", "must be at least 1")
    if run.users < 1 or run.repeats < 1:
        bad("experiment.users", "users and repeats must be at least 1")
    if run.feedback not in ("bernoulli", "gaussian"):
        bad("experiment.feedback", f"unknown mode {run.feedback!r}")
    if run.noise_R < 0:
        bad("experiment.noise_R", "must be nonnegative")
    if run.workers < 1:
        bad("experiment.workers", "must be at least 1")
    if run.alpha is not None and not 0 < run.alpha:
        bad("experiment.alpha", "must be positive")
    if "c_greedy" in pol.names and env.kind == "synthetic" and not con.budgets:
        bad("policy.names", "c_greedy needs at least one knapsack budget")
    return cfg
