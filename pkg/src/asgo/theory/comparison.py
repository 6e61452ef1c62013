"""Rate-comparison quantities: ASGO against SGD, full-matrix AdaGrad and Shampoo."""
import numpy as np

from asgo import linalg
from asgo.problems import generator, random_orthogonal

KINDS = ("lowrank-grad", "highrank-displacement")


def _trace_power(gram, p):
    lam = np.maximum(linalg.sym_eig(gram).eigenvalues, 0.0)
    return float(np.sum(lam**p))


def comparison_chain(grads):
    """Quantities for a gradient sequence and the inequalities between them.

    ``asgo = tr((ΣGGᵀ)^{1/2})`` must be at most ``diag_sqrt = Σ_j √[ΣGGᵀ]_jj``,
    which is at most ``adagrad = Σ_ij √(Σ_t G_ij²)``, and at most
    ``shampoo = tr((ΣGGᵀ)^{1/4}) · tr((ΣGᵀG)^{1/4})``.
    """
    grads = [linalg.as_matrix(g) for g in grads]
    left = linalg.symmetrize(sum(g @ g.T for g in grads))
    right = linalg.symmetrize(sum(g.T @ g for g in grads))
    squares = sum(g * g for g in grads)
    asgo = _trace_power(left, 0.5)
    diag_sqrt = float(np.sum(np.sqrt(np.diag(left))))
    adagrad = float(np.sum(np.sqrt(squares)))
    shampoo = _trace_power(left, 0.25) * _trace_power(right, 0.25)
    scale = max(adagrad, shampoo, 1e-300)
    tol = 1e-12 * scale
    return {
        "asgo": asgo,
        "diag_sqrt": diag_sqrt,
        "adagrad": adagrad,
        "shampoo": shampoo,
        "asgo_le_diag": asgo <= diag_sqrt + tol,
        "diag_le_adagrad": diag_sqrt <= adagrad + tol,
        "asgo_le_adagrad": asgo <= adagrad + tol,
        "asgo_le_shampoo": asgo <= shampoo + tol,
    }


def _equal_spectrum(rng, m, n, rank, value=1.0):
    """``m x n`` matrix with exactly ``rank`` singular values, all equal to ``value``."""
    u = random_orthogonal(rng, m)[:, :rank]
    v = random_orthogonal(rng, n)[:, :rank]
    return value * (u @ v.T)


def rate_comparison_instance(kind, dims=(8, 8), r=1, seed=0, steps=20):
    """Explicit instance separating ASGO's rate from SGD's.

    ``lowrank-grad``: ``Q`` (m x m) has rank ``r``, the displacement has full
    rank ``min(m, n)``. ``highrank-displacement``: the displacement has rank
    ``r`` and ``Q`` is full rank. In both, nonzero singular values are equal.
    Gradients ``G_t = Q P_t`` with ``P_t`` having orthonormal columns (or rows)
    satisfy ``G_t G_tᵀ ⪯ Q²``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown instance kind {kind!r}; expected one of {KINDS}")
    m, n = dims
    k = min(m, n)
    if not 1 <= r <= k:
        raise ValueError(f"r must lie in [1, {k}]")
    rng = generator(seed, "comparison", kind)
    r_g, r_d = (r, k) if kind == "lowrank-grad" else (m, r)
    u = random_orthogonal(rng, m)[:, :r_g]
    Q = u @ u.T  # PSD with r_g unit eigenvalues
    displacement = _equal_spectrum(rng, m, n, r_d, 1.0)

    grads = []
    for _ in range(steps):
        if m <= n:
            p = random_orthogonal(rng, n)[:m, :]
        else:
            p = random_orthogonal(rng, m)[:, :n]
        grads.append(Q @ p)

    q_trace = linalg.trace_norm(Q)
    q_frob = linalg.frobenius(Q)
    d_op = linalg.spectral_norm(displacement)
    d_f = linalg.frobenius(displacement)
    report = {
        "kind": kind,
        "dims": [m, n],
        "r_G": r_g,
        "r_D": r_d,
        "Q_trace": q_trace,
        "Q_frobenius": q_frob,
        "Q_frobenius_times_D_F": q_frob * d_f,
        "Q_trace_times_D_op": q_trace * d_op,
        "D_op": d_op,
        "D_F": d_f,
        "speedup": (q_frob * d_f) / (q_trace * d_op),
    }
    report.update(comparison_chain(grads))
    return report
