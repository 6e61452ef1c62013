"""Reference and baseline step rules: Muon, Shampoo, full-matrix AdaGrad, AdamW, SGD."""
import numpy as np

from asgo import linalg
from asgo.errors import CapExceededError
from asgo.optim.asgo import rms_aligned


def muon_step(state, w, g, cfg, lr=None):
    """``B <- μB + G``; ``W <- W - lr·U Vᵀ`` from the exact compact SVD of ``B``.

    ``μ`` is ``cfg.beta1``.
    """
    lr = cfg.lr if lr is None else lr
    w = linalg.as_matrix(w, "w")
    g = linalg.as_matrix(g, "g")
    prev = state.accum if state.accum is not None else np.zeros_like(g)
    state.accum = cfg.beta1 * prev + g
    state.step += 1
    if not np.any(state.accum):
        return w.copy(), state
    direction = linalg.svd(state.accum).polar()
    if cfg.rms_align:
        direction = rms_aligned(direction, *w.shape)
    return w - lr * direction, state


def _accumulate(prev, stat, beta2):
    if prev is None:
        prev = np.zeros_like(stat)
    if beta2 > 0:
        return linalg.symmetrize(beta2 * prev + (1.0 - beta2) * stat)
    return linalg.symmetrize(prev + stat)


def shampoo_step(state, w, g, cfg, lr=None):
    """Two-sided Kronecker preconditioning ``(L + εI)^{IO} G (R + εI)^{IO}``.

    ``beta2 = 0`` accumulates sums (AdaGrad style); ``beta2 > 0`` uses EMAs.
    ``rms_align`` stands in for update grafting.
    """
    lr = cfg.lr if lr is None else lr
    w = linalg.as_matrix(w, "w")
    g = linalg.as_matrix(g, "g")
    m, n = w.shape
    state.accum = _accumulate(state.accum, g @ g.T, cfg.beta2)
    state.accum_right = _accumulate(state.accum_right, g.T @ g, cfg.beta2)
    if not np.any(state.accum) and cfg.eps == 0:
        state.step += 1
        return w.copy(), state
    if state.step % cfg.update_freq == 0 or state.cached is None:
        order = cfg.shampoo_inverse_order
        left = linalg.psd_power(state.accum + cfg.eps * np.eye(m), order)
        right = linalg.psd_power(state.accum_right + cfg.eps * np.eye(n), order)
        state.cached = (left, right)
    state.cache_age = state.step % cfg.update_freq
    left, right = state.cached
    direction = left @ g @ right
    if cfg.rms_align:
        direction = rms_aligned(direction, m, n)
    state.step += 1
    return w - lr * direction, state


def full_matrix_adagrad_step(state, w, g, cfg, lr=None):
    """AdaGrad on ``vec(W)`` (column-major) with a dense ``mn x mn`` accumulator.

    With ``eps = 0`` the inverse root is a pseudo-inverse on the accumulator's null space.
    """
    lr = cfg.lr if lr is None else lr
    w = linalg.as_matrix(w, "w")
    g = linalg.as_matrix(g, "g")
    d = w.size
    if d > cfg.adagrad_cap:
        raise CapExceededError(
            f"full-matrix AdaGrad needs a {d}x{d} accumulator; m*n={d} exceeds adagrad_cap={cfg.adagrad_cap}"
        )
    vec = g.reshape(-1, order="F")
    if state.accum is None:
        state.accum = np.zeros((d, d))
    state.accum = linalg.symmetrize(state.accum + np.outer(vec, vec))
    state.step += 1
    if not np.any(vec):
        return w.copy(), state
    eig = linalg.sym_eig(state.accum)
    lam = np.maximum(eig.eigenvalues, 0.0)
    denom = np.sqrt(lam) + cfg.eps
    live = lam > 1e-14 * lam.max() if cfg.eps == 0 else denom > 0
    inv = np.divide(1.0, denom, out=np.zeros_like(denom), where=live)
    q = eig.eigenvectors
    step = q @ (inv * (q.T @ vec))
    return w - lr * step.reshape(w.shape, order="F"), state


def adamw_step(state, w, g, cfg, lr=None):
    """Adam with bias correction and decoupled weight decay."""
    lr = cfg.lr if lr is None else lr
    w = np.asarray(w, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if state.momentum is None:
        state.momentum = np.zeros_like(g)
        state.second_moment = np.zeros_like(g)
    state.step += 1
    t = state.step
    state.momentum = cfg.beta1 * state.momentum + (1.0 - cfg.beta1) * g
    state.second_moment = cfg.beta2 * state.second_moment + (1.0 - cfg.beta2) * g * g
    m_hat = state.momentum / (1.0 - cfg.beta1**t)
    v_hat = state.second_moment / (1.0 - cfg.beta2**t)
    denom = np.sqrt(v_hat) + cfg.eps
    direction = np.divide(m_hat, denom, out=np.zeros_like(m_hat), where=denom > 0)
    decayed = w * (1.0 - lr * cfg.weight_decay)
    return decayed - lr * direction, state


def sgd_step(state, w, g, cfg, lr=None):
    """Plain SGD; heavy-ball momentum ``buf <- beta1·buf + g`` when ``beta1 > 0``."""
    lr = cfg.lr if lr is None else lr
    w = np.asarray(w, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if cfg.beta1 > 0:
        prev = state.momentum if state.momentum is not None else np.zeros_like(g)
        state.momentum = cfg.beta1 * prev + g
        g = state.momentum
    state.step += 1
    return w - lr * g, state


def cosine_similarity(a, b):
    """``tr(AᵀB) / (‖A‖_F ‖B‖_F)``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine similarity is undefined for a zero matrix")
    return float(np.clip(np.sum(a * b) / (na * nb), -1.0, 1.0))
