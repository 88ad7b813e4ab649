"""Experiment configuration with per-experiment defaults and range validation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from ..errors import ConfigError

EXPERIMENTS = ("identity", "counterexample", "resolvent", "caccioppoli", "weights", "domains")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int = 256
    L: float = 4.0
    refine_n: tuple = ()
    k: float = 0.5
    amplitudes: tuple = ()
    omega: float = 0.0
    w12: tuple = ()
    p: tuple = ()
    r: tuple = ()
    q: tuple = ()
    t: tuple = ()
    tol: float = 1e-10
    probes: int = 32
    power_steps: int = 8
    cutoff_radius: float = 1.5
    seeds: int = 10
    seed: int = 0
    parallel: bool = False
    out: str | None = None

    def __post_init__(self):
        for name in ("refine_n", "amplitudes", "w12", "p", "r", "q", "t"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        validate(self)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key, val in d.items():
            if isinstance(val, tuple):
                d[key] = list(val)
        return d

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULTS = {
    "identity": dict(n=256, L=16.0, refine_n=(128, 256, 512), seeds=10),
    "counterexample": dict(n=512, L=3.0, r=(2.0, 1.5)),
    "resolvent": dict(n=256, L=4.0, k=0.5, w12=(1.75, 2.5, 3.5, 5.0), r=(1.5,), p=(4.0,), seeds=10),
    "caccioppoli": dict(n=256, L=4.0, refine_n=(256, 512), w12=(0.5, 1.0, 2.0), q=(4.0,), r=(1.5,), cutoff_radius=1.5),
    "weights": dict(n=256, L=4.0, w12=(0.5, 1.0, 2.0), p=(3.0, 4.0), amplitudes=(0.5, 1.0, 2.0), t=(-1.0, 0.5, 2.0)),
    "domains": dict(n=256, L=5.0, refine_n=(512,), amplitudes=(0.1, 0.2, 0.3), p=(3.0,), probes=32, power_steps=8),
}


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    if experiment not in DEFAULTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    kw = dict(DEFAULTS[experiment])
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(experiment=experiment, **kw)


def load_config(path, experiment: str | None = None, **overrides) -> ExperimentConfig:
    """Read a JSON object of field overrides on top of the experiment defaults."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"config {path}: unknown keys {sorted(unknown)}")
    exp = experiment or data.get("experiment")
    if exp is None:
        raise ConfigError(f"config {path} names no experiment")
    data = {k: v for k, v in data.items() if k != "experiment"}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return default_config(exp, **data)


def _need(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def validate(cfg: ExperimentConfig) -> None:
    _need(cfg.experiment in EXPERIMENTS, f"unknown experiment {cfg.experiment!r}")
    for n in (cfg.n, *cfg.refine_n):
        _need(int(n) == n and n >= 16 and not (int(n) & (int(n) - 1)), f"grid size {n} is not a power of two >= 16")
    _need(cfg.L > 0, f"window side must be positive, got {cfg.L}")
    _need(0 <= cfg.k < 1, f"k={cfg.k} violates ellipticity ||mu||_inf = k < 1")
    _need(cfg.tol > 0, f"tol must be positive, got {cfg.tol}")
    _need(cfg.probes >= 1 and cfg.power_steps >= 0, "probe counts must be positive")
    _need(all(0 <= a for a in cfg.w12), "W^{1,2} targets must be nonnegative")
    _need(cfg.seed >= 0, "seed must be a nonnegative integer")
    e = cfg.experiment
    if e == "resolvent":
        for r in cfg.r:
            _need(1 < r < 2, f"r={r} outside 1 < r < 2 required by the critical bound ||(I - mu S)^-1||_(W^(1,r)) <~ 1")
        for p in cfg.p:
            _need(p > 2, f"p={p} outside p > 2 required by the supercritical bound <~ 1 + ||mu||^2_(W^(1,p))")
    if e == "caccioppoli":
        for q in cfg.q:
            _need(q > 2, f"q={q} outside 2 < q < inf required by ||eta Df||_q <~ ||(D eta) f||_q")
        for r in cfg.r:
            _need(1 < r < 2, f"r={r} outside 1 < r < 2 required by ||eta D^2 f||_r <~ ...")
        _need(0 < cfg.cutoff_radius <= cfg.L / 2, "cutoff radius must fit in the window")
    if e == "weights":
        for p in cfg.p:
            _need(p > 1, f"p={p} outside 1 < p < inf required by [|Jf^-1|^(1-p/2)]_(A_p) <= C exp(C max(p, 1/(p-1))^2 L^2)")
    if e == "domains":
        for p in cfg.p:
            _need(p > 2, f"p={p} outside p >= r > 2 required by the domain resolvent bound with O = 1 + ||O||_(B_p) + ||Omega||_(B_p)")
        _need(all(0 <= a < 1 for a in cfg.amplitudes), "bump amplitudes must lie in [0, 1)")
    if e == "counterexample":
        for r in cfg.r:
            _need(1 <= r <= 2, f"r={r} outside [1, 2]: the contrast is W^(2,r) membership for r < 2 versus r = 2")
