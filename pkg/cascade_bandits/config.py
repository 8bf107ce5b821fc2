"""Experiment configuration: a flat JSON object whose keys are ExperimentConfig fields."""

import dataclasses
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import settings
from .exceptions import ConfigError
from .ingestion import DELIMITERS
from .items import BINARIZE_KINDS, GREATER_THAN_THRESHOLD
from .policies import ALGORITHMS

logger = logging.getLogger(__name__)


def _positive_int(name, value, optional=False):
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return value


def _integer(name, value):
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ConfigError(f"{name} must be a non-negative integer, got {value!r}")
    return value


def _positive_real(name, value, optional=False):
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ConfigError(f"{name} must be a positive number, got {value!r}")
    return float(value)


def _flag(name, value):
    if not isinstance(value, bool):
        raise ConfigError(f"{name} must be true or false, got {value!r}")
    return value


@dataclass(frozen=True)
class DatasetSpec:
    """A rating-triple file (or a 0/1 matrix CSV when ``matrix`` is set)."""

    path: Path
    format: str = "tab"
    rule: str = GREATER_THAN_THRESHOLD
    threshold: float = 3.0
    matrix: bool = False

    def __post_init__(self):
        object.__setattr__(self, "path", Path(self.path))
        if self.format not in DELIMITERS:
            raise ConfigError(f"dataset.format must be one of {tuple(DELIMITERS)}, got {self.format!r}")
        if self.rule not in BINARIZE_KINDS:
            raise ConfigError(f"dataset.rule must be one of {BINARIZE_KINDS}, got {self.rule!r}")
        if isinstance(self.threshold, bool) or not isinstance(self.threshold, (int, float)):
            raise ConfigError(f"dataset.threshold must be a number, got {self.threshold!r}")
        _flag("dataset.matrix", self.matrix)


@dataclass(frozen=True)
class SyntheticSpec:
    """Perfectly linear Bernoulli problem with L items."""

    L: int
    theta_seed: int = 0

    def __post_init__(self):
        _positive_int("synthetic.L", self.L)
        _integer("synthetic.theta_seed", self.theta_seed)


@dataclass(frozen=True)
class ExperimentConfig:
    algo: str
    n_steps: int
    runs: int = 10
    K: int = 4
    d: int = 20
    sigma: float = settings.DEFAULT_SIGMA
    c: Optional[float] = None
    L_max: Optional[int] = None
    m_max: Optional[int] = None
    dataset: Optional[DatasetSpec] = None
    synthetic: Optional[SyntheticSpec] = None
    master_seed: int = 0
    split_seed: int = 0
    out_dir: Path = Path("output")
    workers: int = settings.DEFAULT_WORKERS
    theta_norm: Optional[float] = None
    oracle_replay: bool = False
    same_seed_runs: bool = False
    checkpoints: int = settings.CHECKPOINT_COUNT

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ConfigError(f"algo must be one of {ALGORITHMS}, got {self.algo!r}")
        for name in ("n_steps", "runs", "K", "d", "workers", "checkpoints"):
            _positive_int(name, getattr(self, name))
        for name in ("L_max", "m_max"):
            _positive_int(name, getattr(self, name), optional=True)
        _positive_real("sigma", self.sigma)
        _positive_real("c", self.c, optional=True)
        _positive_real("theta_norm", self.theta_norm, optional=True)
        _integer("master_seed", self.master_seed)
        _integer("split_seed", self.split_seed)
        _flag("oracle_replay", self.oracle_replay)
        _flag("same_seed_runs", self.same_seed_runs)
        object.__setattr__(self, "out_dir", Path(self.out_dir))

        if (self.dataset is None) == (self.synthetic is None):
            raise ConfigError("exactly one of 'dataset' and 'synthetic' must be given")
        if self.synthetic is not None:
            if self.K > self.synthetic.L:
                raise ConfigError(f"K={self.K} exceeds the number of items L={self.synthetic.L}")
            if self.d > self.synthetic.L:
                raise ConfigError(f"d={self.d} exceeds the number of items L={self.synthetic.L}")
        if self.L_max is not None and self.K > self.L_max:
            raise ConfigError(f"K={self.K} exceeds L_max={self.L_max}")

    def replace(self, **overrides):
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **overrides)

    @classmethod
    def from_dict(cls, data, base_dir=None):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        data = dict(data)
        try:
            if data.get("dataset") is not None:
                dataset = dict(data["dataset"])
                path = Path(dataset["path"])
                if base_dir is not None and not path.is_absolute():
                    path = Path(base_dir) / path
                dataset["path"] = path
                data["dataset"] = DatasetSpec(**dataset)
            if data.get("synthetic") is not None:
                synthetic = dict(data["synthetic"])
                # the feature dimension lives at the top level
                block_d = synthetic.pop("d", None)
                if block_d is not None:
                    if data.get("d", block_d) != block_d:
                        raise ConfigError(f"synthetic.d={block_d} disagrees with d={data['d']}")
                    data["d"] = block_d
                data["synthetic"] = SyntheticSpec(**synthetic)
            return cls(**data)
        except ConfigError:
            raise
        except (TypeError, KeyError, ValueError) as e:
            raise ConfigError(f"invalid config: {e}") from e


def load_config(path):
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path} is not valid JSON: {e}") from e
    cfg = ExperimentConfig.from_dict(data, base_dir=path.parent)
    logger.info(f"Loaded config {path}: algo={cfg.algo}, n={cfg.n_steps}, runs={cfg.runs}, K={cfg.K}, d={cfg.d}")
    return cfg
