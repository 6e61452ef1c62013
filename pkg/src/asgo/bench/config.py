"""Strict JSON experiment configuration."""
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from asgo import problems
from asgo.optim import OptimizerConfig
from asgo.problems import PROBLEM_NAMES

SCHEDULE_TYPES = ("constant", "warmup-cosine")
DEFAULT_GRID_CAP = 64


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending field."""


@dataclass
class Schedule:
    type: str = "constant"
    warmup_steps: int = 0
    final_lr: float = 0.0

    def __post_init__(self):
        if self.type not in SCHEDULE_TYPES:
            raise ConfigError(f"schedule.type: expected one of {SCHEDULE_TYPES}, got {self.type!r}")
        if self.warmup_steps < 0:
            raise ConfigError("schedule.warmup_steps: must be >= 0")
        if self.final_lr < 0:
            raise ConfigError("schedule.final_lr: must be >= 0")


@dataclass
class ExperimentConfig:
    problem: dict
    optimizer: OptimizerConfig
    steps: int
    seeds: list
    batch_size: int = None  # None: exact gradients
    schedule: Schedule = field(default_factory=Schedule)
    record_every: int = 1
    output_path: str = "runs"
    record_wall_time: bool = False
    name: str = "run"
    grid: dict = None
    grid_cap: int = DEFAULT_GRID_CAP

    def __post_init__(self):
        if not isinstance(self.steps, int) or self.steps < 1:
            raise ConfigError("steps: must be an integer >= 1")
        if not self.seeds or not all(isinstance(s, int) and s >= 0 for s in self.seeds):
            raise ConfigError("seeds: must be a non-empty list of non-negative integers")
        if self.batch_size is not None and (not isinstance(self.batch_size, int) or self.batch_size < 1):
            raise ConfigError("batch_size: must be null or an integer >= 1")
        if not isinstance(self.record_every, int) or self.record_every < 1:
            raise ConfigError("record_every: must be an integer >= 1")

    def to_dict(self):
        out = asdict(self)
        out["optimizer"] = self.optimizer.to_dict()
        return out

    def digest(self):
        """Hash of everything that affects the numbers (not where they are written)."""
        data = self.to_dict()
        for key in ("output_path", "record_wall_time", "name"):
            data.pop(key)
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:16]


_TOP_KEYS = {f.name for f in fields(ExperimentConfig)}
_REQUIRED = ("problem", "optimizer", "steps", "seeds")


def _strict(section, data, allowed):
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected an object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"{section}: unknown key(s) {', '.join(unknown)}")


def from_dict(data, name=None):
    _strict("config", data, _TOP_KEYS)
    for key in _REQUIRED:
        if key not in data:
            raise ConfigError(f"config: missing required key {key!r}")
    data = dict(data)

    problem = data["problem"]
    _strict("problem", problem, ("name", "params"))
    if problem.get("name") not in PROBLEM_NAMES:
        raise ConfigError(f"problem.name: expected one of {PROBLEM_NAMES}, got {problem.get('name')!r}")
    data["problem"] = {"name": problem["name"], "params": dict(problem.get("params", {}))}

    opt = data["optimizer"]
    _strict("optimizer", opt, {f.name for f in fields(OptimizerConfig)})
    try:
        data["optimizer"] = OptimizerConfig.from_dict(opt)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"optimizer: {exc}") from exc

    sched = data.get("schedule", {})
    _strict("schedule", sched, {f.name for f in fields(Schedule)})
    data["schedule"] = Schedule(**sched)

    grid = data.get("grid")
    if grid is not None:
        _strict("grid", grid, {f.name for f in fields(OptimizerConfig)} - {"kind"})
        for key, values in grid.items():
            if not isinstance(values, list) or not values:
                raise ConfigError(f"grid.{key}: expected a non-empty list")
    if name is not None and "name" not in data:
        data["name"] = name
    try:
        cfg = ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(f"config: {exc}") from exc
    try:
        problems.build(cfg.problem["name"], cfg.problem["params"], cfg.seeds[0])
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"problem.params: {exc}") from exc
    return cfg


def load(path):
    """Parse a config file; JSON syntax errors are reported with line and column."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return from_dict(data, name=path.stem)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
