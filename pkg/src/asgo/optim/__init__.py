"""Optimizer step rules behind one stepping interface.

Each ``*_step`` function takes ``(state, w, g, cfg, lr)``, mutates ``state`` and
returns ``(new_w, state)``. :func:`step` dispatches on ``cfg.kind`` and handles
head-wise grouping; :class:`Optimizer` keeps one state per named parameter.
"""
import numpy as np

from asgo.optim.asgo import (
    RMS_FACTOR,
    asgo_theoretical_step,
    dasgo_step,
    inverse_sqrt,
    pick_side,
    practical_asgo_step,
    rms_aligned,
)
from asgo.optim.baselines import (
    adamw_step,
    cosine_similarity,
    full_matrix_adagrad_step,
    muon_step,
    sgd_step,
    shampoo_step,
)
from asgo.optim.config import KINDS, OptimizerConfig, OptimizerState, ParamGroup

MATRIX_KINDS = ("asgo-theoretical", "asgo-practical", "dasgo", "muon", "shampoo", "full-matrix-adagrad")


def _theoretical(state, w, g, cfg, lr=None):
    return asgo_theoretical_step(state, w, g, cfg.lr if lr is None else lr, cfg.eps)


_RULES = {
    "asgo-theoretical": _theoretical,
    "asgo-practical": practical_asgo_step,
    "dasgo": dasgo_step,
    "muon": muon_step,
    "shampoo": shampoo_step,
    "full-matrix-adagrad": full_matrix_adagrad_step,
    "adamw": adamw_step,
    "sgd": sgd_step,
}


def step(cfg, state, w, g, lr=None, heads=None):
    """Apply ``cfg.kind``'s rule; with ``heads=h`` step each column block independently."""
    rule = _RULES[cfg.kind]
    if not heads or heads == 1:
        return rule(state, w, g, cfg, lr)
    w = np.asarray(w, dtype=np.float64)
    if w.shape[1] % heads:
        raise ValueError(f"{w.shape[1]} columns are not divisible into {heads} heads")
    width = w.shape[1] // heads
    if state.blocks is None:
        state.blocks = [OptimizerState() for _ in range(heads)]
    out = np.empty_like(w)
    for h, sub in enumerate(state.blocks):
        cols = slice(h * width, (h + 1) * width)
        out[:, cols], _ = rule(sub, w[:, cols], g[:, cols], cfg, lr)
    state.step += 1
    return out, state


class Optimizer:
    """Steps a collection of named parameter groups with one configuration.

    Groups flagged ``vector`` are routed to AdamW (same lr, betas) when the
    configured kind is a matrix optimizer.
    """

    def __init__(self, cfg):
        self.cfg = cfg
        self.states = {}
        self._vector_cfg = None
        if cfg.kind in MATRIX_KINDS:
            self._vector_cfg = OptimizerConfig(
                kind="adamw",
                lr=cfg.lr,
                beta1=cfg.beta1,
                beta2=cfg.beta2,
                eps=cfg.eps if cfg.eps > 0 else 1e-8,
                weight_decay=cfg.weight_decay,
            )

    def config_for(self, group):
        if group.vector and self._vector_cfg is not None:
            return self._vector_cfg
        return self.cfg

    def step(self, groups, lr=None):
        """``groups`` maps name -> :class:`ParamGroup`; returns name -> new weight."""
        new = {}
        for name, group in groups.items():
            cfg = self.config_for(group)
            state = self.states.setdefault(name, OptimizerState())
            heads = group.heads
            if heads is None and group.qk:
                heads = self.cfg.qk_groups
            new[name], _ = step(cfg, state, group.weight, group.grad, lr, heads)
        return new


__all__ = [
    "KINDS",
    "MATRIX_KINDS",
    "RMS_FACTOR",
    "Optimizer",
    "OptimizerConfig",
    "OptimizerState",
    "ParamGroup",
    "adamw_step",
    "asgo_theoretical_step",
    "cosine_similarity",
    "dasgo_step",
    "full_matrix_adagrad_step",
    "inverse_sqrt",
    "muon_step",
    "pick_side",
    "practical_asgo_step",
    "rms_aligned",
    "sgd_step",
    "shampoo_step",
    "step",
]
