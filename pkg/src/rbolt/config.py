"""Experiment configuration files (YAML).

Layout::

    env:      {kind: sapientino, width: 3, ...}    # kind plus constructor parameters
    bolt:
      fluents: [bip, cell_c1, cell_c2]            # optional, defaults to the env's
      specs:
        - {formula: "F a", reward: 1.0, logic: ltlf}
      scaling: 1.0
      shaping: none | offline | on_the_fly
      shaping_gamma: 0.999
      end_on_satisfied: true
    train:    {algorithm: sarsa_n, gamma: 0.999, epsilon: 0.2, n: 100, episodes: 20000, ...}
    output:   runs/example                        # or {dir: ..., trace: false}
    seeds:    [0, 1, 2]
    verify:   {gamma: 0.9, horizon: 12, broken_terminal_potential: 10.0}   # optional
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional

import yaml

from .bolt import SHAPING_MODES, RestrainingBolt, new_bolt
from .envs import ConfigError, make_env
from .envs.base import Environment
from .logic import RESERVED_DONE, parse
from .rl import TrainConfig


@dataclass
class SpecEntry:
    formula: str
    reward: float = 1.0
    logic: str = "ltlf"


@dataclass
class BoltConfig:
    specs: List[SpecEntry]
    fluents: Optional[List[str]] = None
    scaling: float = 1.0
    shaping: str = "none"
    shaping_gamma: float = 0.999
    end_on_satisfied: bool = True


@dataclass
class VerifyConfig:
    gamma: float = 0.9
    horizon: int = 12
    max_policies: int = 4096
    product_cap: int = 100_000
    broken_terminal_potential: Optional[float] = None


@dataclass
class ExperimentConfig:
    env: Dict[str, Any]
    bolt: BoltConfig
    train: TrainConfig = field(default_factory=TrainConfig)
    output: str = "runs"
    trace: bool = False
    seeds: List[int] = field(default_factory=lambda: [0])
    verify: Optional[VerifyConfig] = None

    # construction

    def make_env(self, seed: Optional[int] = None) -> Environment:
        params = {k: v for k, v in self.env.items() if k != "kind"}
        if seed is not None:
            params["seed"] = seed
        return make_env(self.env["kind"], **params)

    def fluents(self, env: Optional[Environment] = None) -> List[str]:
        if self.bolt.fluents is not None:
            return list(self.bolt.fluents)
        return list((env or self.make_env()).fluents)

    def make_bolt(self, env: Optional[Environment] = None, shaping: Optional[str] = None) -> RestrainingBolt:
        b = self.bolt
        return new_bolt(
            [(s.formula, s.reward, s.logic) for s in b.specs],
            scaling=b.scaling,
            shaping=shaping or b.shaping,
            gamma=b.shaping_gamma,
            fluents=self.fluents(env),
            end_on_satisfied=b.end_on_satisfied,
        )

    # validation

    def validate(self, check_env: bool = True):
        if "kind" not in self.env:
            raise ConfigError("env block needs a kind")
        if not self.bolt.specs:
            raise ConfigError("bolt block needs at least one spec")
        if self.bolt.shaping not in SHAPING_MODES:
            raise ConfigError(f"unknown shaping mode {self.bolt.shaping!r}")
        if not self.bolt.scaling > 0:
            raise ConfigError("scaling must be positive")
        if not self.seeds:
            raise ConfigError("seeds list is empty")
        try:
            self.train.validate()
        except ValueError as e:
            raise ConfigError(str(e)) from None
        env = self.make_env() if check_env else None
        if env is not None:
            declared = set(env.fluents)
            if self.bolt.fluents is not None:
                extra = set(self.bolt.fluents) - declared
                if extra:
                    raise ConfigError(f"bolt declares fluents the env does not produce: {sorted(extra)}")
        if self.bolt.fluents is not None and RESERVED_DONE in self.bolt.fluents:
            raise ConfigError(f"{RESERVED_DONE!r} is reserved and cannot be declared")
        allowed = set(self.fluents(env)) if (env is not None or self.bolt.fluents is not None) else None
        for i, s in enumerate(self.bolt.specs):
            if s.logic not in ("ltlf", "ldlf"):
                raise ConfigError(f"spec {i}: unknown logic {s.logic!r}")
            parse(s.formula, allowed, s.logic)
        return self

    # (de)serialization

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        data = copy.deepcopy(data)
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        unknown = set(data) - {"env", "bolt", "train", "output", "seeds", "verify"}
        if unknown:
            raise ConfigError(f"unknown config blocks {sorted(unknown)}")
        if "env" not in data or "bolt" not in data:
            raise ConfigError("config needs env and bolt blocks")
        bolt = dict(data["bolt"])
        specs = bolt.pop("specs", None)
        if not isinstance(specs, list):
            raise ConfigError("bolt.specs must be a list")
        try:
            entries = [SpecEntry(**s) if isinstance(s, dict) else SpecEntry(str(s)) for s in specs]
            bolt_cfg = BoltConfig(specs=entries, **bolt)
            train = TrainConfig(**(data.get("train") or {}))
            verify = VerifyConfig(**data["verify"]) if data.get("verify") is not None else None
        except TypeError as e:
            raise ConfigError(str(e)) from None
        out = data.get("output", "runs")
        trace = False
        if isinstance(out, dict):
            trace = bool(out.get("trace", False))
            out = out.get("dir", "runs")
        seeds = data.get("seeds", [0])
        if not isinstance(seeds, list) or not all(isinstance(s, int) for s in seeds):
            raise ConfigError("seeds must be a list of integers")
        return cls(dict(data["env"]), bolt_cfg, train, str(out), trace, list(seeds), verify)

    def to_dict(self) -> Dict[str, Any]:
        def plain(obj):
            return {f.name: copy.deepcopy(getattr(obj, f.name)) for f in fields(obj)}

        bolt = plain(self.bolt)
        bolt["specs"] = [plain(s) for s in self.bolt.specs]
        out: Dict[str, Any] = {
            "env": _listify(self.env),
            "bolt": bolt,
            "train": plain(self.train),
            "output": {"dir": self.output, "trace": self.trace},
            "seeds": list(self.seeds),
        }
        if self.verify is not None:
            out["verify"] = plain(self.verify)
        return out

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _listify(obj):
    if isinstance(obj, dict):
        return {k: _listify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_listify(v) for v in obj]
    return obj


def loads(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML: {e}") from None
    return ExperimentConfig.from_dict(data)


def load(path) -> ExperimentConfig:
    with open(path) as fh:
        return loads(fh.read())
