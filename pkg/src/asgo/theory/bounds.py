"""Computable convergence bounds with signed slack and named components."""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from asgo import linalg
from asgo.optim import OptimizerConfig
from asgo.theory.trajectory import simulate


@dataclass
class BoundReport:
    """``slack = rhs - lhs``; negative slack is a failed check and is never clipped.

    ``lhs`` is ``None`` for right-hand-side-only evaluations.
    """

    bound_name: str
    rhs: float
    lhs: float = None
    components: dict = field(default_factory=dict)

    @property
    def slack(self):
        return None if self.lhs is None else self.rhs - self.lhs

    @property
    def holds(self):
        return self.slack is None or self.slack >= 0

    def to_dict(self):
        out = asdict(self)
        out["slack"] = self.slack
        return out

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def _trace_sqrt(gram):
    if not np.any(gram):
        return 0.0
    eig = linalg.sym_eig(gram)
    return float(np.sum(np.sqrt(np.maximum(eig.eigenvalues, 0.0))))


def _eps_term(eps, d_f, d_op, T, factor=1.0):
    if eps == 0:
        return 0.0
    if d_op == 0:
        return math.inf if d_f > 0 else 0.0
    return factor * eps * d_f**2 / (d_op * T)


def nonsmooth_bound(stats, eps, T=None, eta=None):
    """Nonsmooth rate at ``η = D_op``: ``‖(ΣGGᵀ)^{1/2}‖_*·D_op/T + ε D_F²/(D_op T)``.

    Pass ``eta`` (the step size actually used) to also get ``proof_form``: the
    inequality before ``η`` is specialized,
    ``[(D_op²/η + 2η)·tr((ΣGGᵀ)^{1/2}) + ε D_F²/η] / (2T)``.
    """
    if stats.f_gaps is None or np.all(np.isnan(stats.f_gaps)):
        raise ValueError("the nonsmooth bound needs W* and f*")
    T = stats.T if T is None else T
    d_op, d_f = stats.D_op, stats.D_F
    tr_sqrt = _trace_sqrt(stats.gram)
    grad_term = tr_sqrt * d_op / T
    eps_term = _eps_term(eps, d_f, d_op, T)
    components = {
        "gradient_term": grad_term,
        "eps_term": eps_term,
        "trace_sqrt_gram": tr_sqrt,
        "D_op": d_op,
        "D_F": d_f,
    }
    if eta:
        components["eta"] = eta
        components["proof_form"] = ((d_op**2 / eta + 2 * eta) * tr_sqrt + eps * d_f**2 / eta) / (2 * T)
    return BoundReport("nonsmooth", grad_term + eps_term, float(np.mean(stats.f_gaps[:T])), components)


def corollary_bound(Q, D_op, D_F, eps, T):
    """``√T ‖Q‖_* D_op / T + ε D_F²/(D_op T)`` for gradients with ``E[GGᵀ] ⪯ Q²``."""
    q_trace = linalg.trace_norm(Q)
    first = math.sqrt(T) * q_trace * D_op / T
    second = _eps_term(eps, D_F, D_op, T)
    return BoundReport("corollary", first + second, None, {"gradient_term": first, "eps_term": second})


def smooth_bound(D_op, D_F, L, V, M, T, eps):
    """``4 D_op² ‖L‖_*/T + 2√2 D_op ‖V‖_*/√(MT) + 2ε D_F²/(D_op T)``."""
    if M < 1 or T < 1:
        raise ValueError("M and T must be >= 1")
    l_trace = linalg.trace_norm(L)
    v_trace = linalg.trace_norm(V) if V is not None and np.any(V) else 0.0
    smooth = 4.0 * D_op**2 * l_trace / T
    noise = 2.0 * math.sqrt(2.0) * D_op * v_trace / math.sqrt(M * T)
    eps_term = _eps_term(eps, D_F, D_op, T, factor=2.0)
    return BoundReport(
        "smooth",
        smooth + noise + eps_term,
        None,
        {"smoothness_term": smooth, "noise_term": noise, "eps_term": eps_term},
    )


def muon_rate_bound(L, f0, f_star, T):
    """Step size and bound for deterministic Muon (``μ = 0``).

    ``η = √(2(f0 − f*)/(‖L‖_* T))``; average gradient trace norm is at most
    ``√(‖L‖_* (f0 − f*)/(2T))`` as stated. ``proof_form`` is the inequality the
    descent argument actually delivers at that ``η``,
    ``(f0 − f*)/(ηT) + η‖L‖_*/2 = √(2‖L‖_* (f0 − f*)/T)``.
    """
    gap = f0 - f_star
    if gap < 0:
        raise ValueError(f"f0 = {f0} lies below f* = {f_star}")
    l_trace = linalg.trace_norm(L)
    eta = math.sqrt(2.0 * gap / (l_trace * T))
    rhs = math.sqrt(l_trace * gap / (2.0 * T))
    proof_form = gap / (eta * T) + eta * l_trace / 2.0 if eta > 0 else 0.0
    return {"eta": eta, "rhs": rhs, "proof_form": proof_form}


def check_smooth(stats_list, problem, batch, eps):
    """Seed-averaged smooth-bound check.

    Each seed contributes ``lhs_i`` and its own ``rhs_i`` (the bound depends on
    that run's ``D_op``); the report carries the mean slack and its standard error.
    """
    slacks, lhs, rhs = [], [], []
    for stats in stats_list:
        rep = smooth_bound(stats.D_op, stats.D_F, problem.smoothness, problem.noise_bound, batch, stats.T, eps)
        lhs.append(stats.avg_gap)
        rhs.append(rep.rhs)
        slacks.append(rep.rhs - stats.avg_gap)
    slacks = np.array(slacks)
    stderr = float(slacks.std(ddof=1) / math.sqrt(len(slacks))) if len(slacks) > 1 else 0.0
    report = BoundReport("smooth", float(np.mean(rhs)), float(np.mean(lhs)))
    report.components = {"stderr": stderr, "seeds": len(slacks), "batch": batch, "T": stats_list[0].T}
    return report


def check_muon_rate(problem, steps, w0=None):
    """Run Muon (``μ = 0``) at the prescribed step and compare average gradient trace norm."""
    w = np.zeros(problem.shapes[0]) if w0 is None else w0
    f0 = problem.loss([w])
    prescribed = muon_rate_bound(problem.smoothness, f0, problem.f_star, steps)
    if prescribed["eta"] == 0:
        return BoundReport("muon-rate", 0.0, 0.0, dict(prescribed))
    cfg = OptimizerConfig(kind="muon", lr=prescribed["eta"], beta1=0.0)
    stats = simulate(problem, cfg, steps, w0=w)
    sq = stats.grad_trace_norms**2
    components = dict(prescribed)
    # min-over-t squared form, informational only
    components["min_sq_trace_norm"] = float(sq.min())
    return BoundReport("muon-rate", prescribed["rhs"], stats.avg_grad_trace_norm, components)
