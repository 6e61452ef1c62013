"""Direction diagnostics: practical ASGO under ε damping versus Muon."""
import numpy as np

from asgo.optim import OptimizerConfig, OptimizerState, cosine_similarity, step
from asgo.problems import generator


def _direction(cfg, state, w, g):
    new, _ = step(cfg, state, w, g, lr=1.0)
    return w - new


def epsilon_sensitivity_probe(problem, steps, eps_list, kernels=("exact-eig",), beta1=0.9, beta2=0.0,
                              source="momentum", lr=1e-2, batch=None, seed=0):
    """Cosine similarity between practical ASGO directions and the Muon direction.

    The reference trajectory is driven by Muon (``μ = beta1``) at ``lr``; at each
    step every (eps, kernel) variant consumes the same gradient with its own
    state and its raw direction is compared with Muon's. With ``beta2 = 0``,
    momentum-sourced statistics, ``eps = 0`` and the exact kernel, ASGO's
    direction is Muon's. Returns rows ``{step, layer, eps, kernel, cosine}``.
    """
    rng = generator(seed, "probe")
    params = problem.init(generator(seed, "init"))
    muon = OptimizerConfig(kind="muon", lr=lr, beta1=beta1)
    muon_states = [OptimizerState() for _ in params]
    variants = []
    for eps in eps_list:
        for kernel in kernels:
            cfg = OptimizerConfig(
                kind="asgo-practical",
                lr=lr,
                beta1=beta1,
                beta2=beta2,
                eps=eps,
                kernel=kernel,
                precondition_source=source,
                rms_align=False,
            )
            variants.append((eps, kernel, cfg, [OptimizerState() for _ in params]))
    # ASGO's momentum is an EMA, Muon's a sum; they share a direction when beta1 matches
    rows = []
    for t in range(steps):
        grads = problem.grad(params) if batch is None else problem.stoch_grad(params, batch, rng)
        new_params = []
        for layer, (w, g) in enumerate(zip(params, grads)):
            ref = _direction(muon, muon_states[layer], w, g)
            for eps, kernel, cfg, states in variants:
                d = _direction(cfg, states[layer], w, g)
                if np.any(ref) and np.any(d):
                    cos = cosine_similarity(d, ref)
                else:
                    cos = float("nan")
                rows.append({"step": t, "layer": layer, "eps": eps, "kernel": kernel, "cosine": cos})
            new_params.append(w - lr * ref)
        params = new_params
    return rows
