"""Seeded optimizer runs and the trajectory statistics that bounds consume."""
from dataclasses import dataclass, field

import numpy as np

from asgo import linalg
from asgo.optim import OptimizerConfig, OptimizerState, step
from asgo.problems import generator


@dataclass
class TrajectoryStats:
    """Per-step metrics for a single-matrix run, indexed ``t = 0..T-1``.

    ``gram`` is ``Σ G_t G_tᵀ`` over the gradients the optimizer consumed.
    """

    losses: np.ndarray
    f_gaps: np.ndarray
    dist_op: np.ndarray
    dist_F: np.ndarray
    grad_trace_norms: np.ndarray
    gram: np.ndarray
    final_loss: float
    lr: float = None
    extra: dict = field(default_factory=dict)

    @property
    def T(self):
        return len(self.losses)

    @property
    def D_op(self):
        return float(self.dist_op.max()) if self.T else 0.0

    @property
    def D_F(self):
        return float(self.dist_F.max()) if self.T else 0.0

    @property
    def avg_gap(self):
        return float(self.f_gaps.mean())

    @property
    def avg_grad_trace_norm(self):
        return float(self.grad_trace_norms.mean())

    def norm_equivalence_holds(self, rtol=1e-12):
        """``D_op ≤ D_F ≤ √min(m,n)·D_op``."""
        k = min(self.gram.shape[0], self.extra.get("cols", self.gram.shape[0]))
        slack = rtol * max(self.D_F, 1e-300)
        return self.D_op <= self.D_F + slack and self.D_F <= np.sqrt(k) * self.D_op + slack


def simulate(problem, cfg, steps, lr=None, batch=None, seed=0, w0=None):
    """Run ``cfg`` on a single-matrix ``problem`` for ``steps`` iterations.

    ``batch=None`` uses exact gradients; otherwise ``stoch_grad`` with that
    batch size and the stream ``generator(seed, "oracle")``.
    """
    if len(problem.shapes) != 1:
        raise ValueError("simulate() handles single-matrix problems")
    if isinstance(cfg, dict):
        cfg = OptimizerConfig.from_dict(cfg)
    lr = cfg.lr if lr is None else lr
    w_star = problem.w_star[0] if problem.w_star is not None else None
    f_star = problem.f_star
    w = np.zeros(problem.shapes[0]) if w0 is None else np.array(w0, dtype=np.float64)
    rng = generator(seed, "oracle")
    state = OptimizerState()
    m, n = w.shape
    losses, gaps, d_op, d_f, tnorms = [], [], [], [], []
    gram = np.zeros((m, m))
    for _ in range(steps):
        loss = problem.loss([w])
        losses.append(loss)
        gaps.append(loss - f_star if f_star is not None else np.nan)
        if w_star is not None:
            delta = w - w_star
            d_op.append(linalg.spectral_norm(delta) if np.any(delta) else 0.0)
            d_f.append(float(np.linalg.norm(delta)))
        true_grad = problem.grad([w])[0]
        tnorms.append(linalg.trace_norm(true_grad) if np.any(true_grad) else 0.0)
        g = true_grad if batch is None else problem.stoch_grad([w], batch, rng)[0]
        gram += g @ g.T
        w, state = step(cfg, state, w, g, lr)
    return TrajectoryStats(
        losses=np.array(losses),
        f_gaps=np.array(gaps),
        dist_op=np.array(d_op),
        dist_F=np.array(d_f),
        grad_trace_norms=np.array(tnorms),
        gram=linalg.symmetrize(gram),
        final_loss=problem.loss([w]),
        lr=lr,
        extra={"cols": n, "final_w": w},
    )


def two_phase_run(problem, steps, eps=0.0, eta0=None, batch=None, seed=0):
    """Theoretical ASGO at ``η = D_op`` without projection.

    A pilot run at ``eta0`` (default ``‖W_0 − W*‖_op``) measures ``D_op``;
    the second run uses that value as ``η`` and its own ``D_op`` is what the
    bound is checked against. Returns ``(pilot, final)`` stats.
    """
    w_star = problem.w_star[0]
    if eta0 is None:
        eta0 = linalg.spectral_norm(w_star) if np.any(w_star) else 1.0
    cfg = OptimizerConfig(kind="asgo-theoretical", lr=eta0, eps=eps)
    pilot = simulate(problem, cfg, steps, eta0, batch, seed)
    eta = pilot.D_op if pilot.D_op > 0 else eta0
    final = simulate(problem, cfg, steps, eta, batch, seed)
    return pilot, final
