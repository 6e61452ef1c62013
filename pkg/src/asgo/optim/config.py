"""Optimizer configuration and per-parameter state."""
from dataclasses import asdict, dataclass, field, fields

import numpy as np

KINDS = (
    "asgo-theoretical",
    "asgo-practical",
    "dasgo",
    "muon",
    "shampoo",
    "full-matrix-adagrad",
    "adamw",
    "sgd",
)
KERNELS = ("exact-eig", "newton-schulz", "polar-express", "denman-beavers")
SIDE_POLICIES = ("auto-min-dim", "force-left", "force-right")
SOURCES = ("gradient", "momentum")
INVERSE_ORDERS = (-0.25, -0.5)

# None-valued fields resolve to these per-kind defaults
_RMS_DEFAULT = {"asgo-practical": True}
_BETA1_DEFAULT = {"sgd": 0.0}


@dataclass
class OptimizerConfig:
    """Hyperparameters for one optimizer. Field names are the config-file keys."""

    kind: str
    lr: float = 1e-2
    beta1: float = None
    beta2: float = 0.99
    eps: float = 0.0
    update_freq: int = 1
    shampoo_inverse_order: float = -0.25
    precondition_source: str = "gradient"
    side_policy: str = "auto-min-dim"
    rms_align: bool = None
    qk_groups: int = None
    kernel: str = "exact-eig"
    kernel_steps: int = 10
    weight_decay: float = 0.0
    adagrad_cap: int = 256

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown optimizer kind {self.kind!r}; expected one of {KINDS}")
        if self.beta1 is None:
            self.beta1 = _BETA1_DEFAULT.get(self.kind, 0.9)
        if not self.lr > 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        for name in ("beta1", "beta2"):
            value = getattr(self, name)
            if not 0.0 <= value < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {value}")
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if int(self.update_freq) != self.update_freq or self.update_freq < 1:
            raise ValueError(f"update_freq must be a positive integer, got {self.update_freq}")
        if self.shampoo_inverse_order not in INVERSE_ORDERS:
            raise ValueError(f"shampoo_inverse_order must be one of {INVERSE_ORDERS}")
        if self.precondition_source not in SOURCES:
            raise ValueError(f"precondition_source must be one of {SOURCES}")
        if self.side_policy not in SIDE_POLICIES:
            raise ValueError(f"side_policy must be one of {SIDE_POLICIES}")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}")
        if self.kernel_steps < 1:
            raise ValueError("kernel_steps must be >= 1")
        if self.qk_groups is not None and self.qk_groups < 1:
            raise ValueError("qk_groups must be a positive integer")
        if self.rms_align is None:
            self.rms_align = _RMS_DEFAULT.get(self.kind, False)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise KeyError(f"unknown optimizer keys: {', '.join(unknown)}")
        if "kind" not in data:
            raise KeyError("optimizer config requires 'kind'")
        return cls(**data)

    def to_dict(self):
        return asdict(self)


@dataclass
class OptimizerState:
    """Mutable per-parameter state. Which fields are used depends on the kind."""

    step: int = 0
    momentum: np.ndarray = None
    accum: np.ndarray = None  # V (ASGO), v (DASGO), H (AdaGrad), L (Shampoo), B (Muon)
    accum_right: np.ndarray = None  # R (Shampoo)
    second_moment: np.ndarray = None  # AdamW
    cached: object = None  # preconditioner(s) reused for update_freq steps
    cache_age: int = 0
    side: str = None
    kernel_residual: float = None
    blocks: list = None  # per-head states under grouped stepping
    extra: dict = field(default_factory=dict)


@dataclass
class ParamGroup:
    """A weight matrix with its gradient.

    ``heads=h`` splits an ``n x (h*d)`` matrix column-wise into ``h`` blocks that
    are stepped independently; ``vector=True`` marks 1-D style parameters that
    matrix optimizers route to AdamW.
    """

    weight: np.ndarray
    grad: np.ndarray
    heads: int = None
    vector: bool = False
    qk: bool = False

    def __post_init__(self):
        if self.weight.shape != self.grad.shape:
            raise ValueError(f"weight {self.weight.shape} and grad {self.grad.shape} differ in shape")
        if self.heads is not None and self.weight.shape[1] % self.heads:
            raise ValueError(f"{self.weight.shape[1]} columns are not divisible into {self.heads} heads")
