"""ASGO step rules: the exact one-sided method, its practical variant, and DASGO."""
import numpy as np

from asgo import linalg, matfun
from asgo.errors import SingularMatrixError

RMS_FACTOR = 0.2


def _zero_like_update(w, state):
    state.step += 1
    return w.copy(), state


def asgo_theoretical_step(state, w, g, lr, eps):
    """One step of the exact left-preconditioned method.

    ``V <- V + G Gᵀ``, ``Λ = V^{1/2} + eps·I``, ``W <- W - lr·Λ^{-1} G``.
    Always uses the Jacobi eigendecomposition; no iterative kernel.
    """
    w = linalg.as_matrix(w, "w")
    g = linalg.as_matrix(g, "g")
    m = w.shape[0]
    if state.accum is None:
        state.accum = np.zeros((m, m))
    state.accum = linalg.symmetrize(state.accum + g @ g.T)
    eig = linalg.sym_eig(state.accum)
    diag = np.sqrt(np.maximum(eig.eigenvalues, 0.0)) + eps
    q = eig.eigenvectors
    state.cached = linalg.symmetrize((q * diag) @ q.T)
    if not np.any(g):
        return _zero_like_update(w, state)
    top = float(diag.max())
    if eps == 0 and diag.min() <= max(1e-14 * top, 1e-14):
        raise SingularMatrixError("Λ_t is numerically singular with eps = 0; use eps > 0")
    direction = q @ ((q.T @ g) / diag[:, None])
    state.step += 1
    return w - lr * direction, state


def pick_side(policy, m, n):
    if policy == "force-left":
        return "left"
    if policy == "force-right":
        return "right"
    return "right" if m >= n else "left"


def inverse_sqrt(v, kernel, steps, damping):
    """``(V + damping·I)^{-1/2}`` by the named kernel; returns (matrix, residual or None).

    The exact kernel takes a pseudo-inverse root when ``V + damping·I`` is
    singular: the momentum lies in the span of past gradients, which is the
    range of ``V``.
    """
    if kernel == "exact-eig":
        n = v.shape[0]
        return linalg.psd_power(v + damping * np.eye(n), -0.5, singular="pinv"), None
    if kernel == "newton-schulz":
        res = matfun.ns_sqrt_inverse(v, matfun.quintic(), steps, damping=damping)
    elif kernel == "polar-express":
        res = matfun.ns_sqrt_inverse(v, matfun.polar_express_schedule(), steps, damping=damping)
    elif kernel == "denman-beavers":
        res = matfun.denman_beavers_inv_sqrt(v, steps, damping=damping)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    return res.inv_sqrt, res.residual


def rms_aligned(update, m, n):
    """Rescale to Frobenius norm ``0.2·√(mn)``; zero stays zero."""
    norm = np.linalg.norm(update)
    if norm == 0.0:
        return update
    return update * (RMS_FACTOR * np.sqrt(m * n) / norm)


def practical_asgo_step(state, w, g, cfg, lr=None):
    """One step of the practical variant with EMA statistics and a pluggable kernel."""
    lr = cfg.lr if lr is None else lr
    w = linalg.as_matrix(w, "w")
    g = linalg.as_matrix(g, "g")
    m, n = w.shape
    if state.side is None:
        state.side = pick_side(cfg.side_policy, m, n)
    right = state.side == "right"

    prev = state.momentum if state.momentum is not None else np.zeros_like(g)
    state.momentum = cfg.beta1 * prev + (1.0 - cfg.beta1) * g
    source = g if cfg.precondition_source == "gradient" else state.momentum
    gram = source.T @ source if right else source @ source.T
    size = n if right else m
    if state.accum is None:
        state.accum = np.zeros((size, size))
    state.accum = linalg.symmetrize(cfg.beta2 * state.accum + (1.0 - cfg.beta2) * gram)

    if state.step % cfg.update_freq == 0 or state.cached is None:
        if not np.any(state.accum) and cfg.eps == 0:
            state.cached = None  # nothing seen yet; momentum is zero as well
        else:
            state.cached, state.kernel_residual = inverse_sqrt(
                state.accum, cfg.kernel, cfg.kernel_steps, cfg.eps
            )
    state.cache_age = state.step % cfg.update_freq

    if state.cached is None:
        return _zero_like_update(w, state)
    raw = state.momentum @ state.cached if right else state.cached @ state.momentum
    if cfg.rms_align:
        if not np.any(raw):
            return _zero_like_update(w, state)
        raw = rms_aligned(raw, m, n)
    state.step += 1
    return w - lr * raw, state


def dasgo_step(state, w, g, cfg, lr=None):
    """Diagonal variant: right preconditioner ``diag(v + eps)^{-1/2}`` from column norms."""
    lr = cfg.lr if lr is None else lr
    w = linalg.as_matrix(w, "w")
    g = linalg.as_matrix(g, "g")
    prev = state.momentum if state.momentum is not None else np.zeros_like(g)
    state.momentum = cfg.beta1 * prev + (1.0 - cfg.beta1) * g
    v_prev = state.accum if state.accum is not None else np.zeros(g.shape[1])
    state.accum = cfg.beta2 * v_prev + (1.0 - cfg.beta2) * np.sum(g * g, axis=0)
    denom = np.sqrt(state.accum + cfg.eps)
    # columns never touched have zero momentum too: 0/0 -> 0
    scale = np.divide(1.0, denom, out=np.zeros_like(denom), where=denom > 0)
    raw = state.momentum * scale[None, :]
    if cfg.rms_align:
        raw = rms_aligned(raw, *w.shape)
    state.step += 1
    return w - lr * raw, state
