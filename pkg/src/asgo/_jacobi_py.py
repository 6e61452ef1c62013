"""Pure numpy Jacobi eigensolver, used when the compiled core is unavailable.

Rotations are applied in round-robin (tournament) order: each round rotates
``n // 2`` disjoint index pairs at once, so a round is a handful of vectorized
array operations instead of ``n // 2`` interpreted loops.
"""
import numpy as np


def _tournament(n):
    """Disjoint-pair schedule covering every (p, q) once per sweep."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [(players[i], players[size - 1 - i]) for i in range(size // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0]
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _offdiag_norm(a):
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(x, tol, max_sweeps):
    """Same contract as the compiled ``jacobi_eigh``."""
    a = np.array(x, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    rounds = _tournament(n) if n > 1 else []
    off = _offdiag_norm(a)
    sweep = 0
    while off > tol and sweep < max_sweeps:
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            app = a[p, p]
            aqq = a[q, q]
            safe = np.where(active, apq, 1.0)
            theta = (aqq - app) / (2.0 * safe)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(1.0 + theta * theta))
            t[theta == 0.0] = 1.0
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            cols_p = a[:, p].copy()
            cols_q = a[:, q]
            a[:, p] = c * cols_p - s * cols_q
            a[:, q] = s * cols_p + c * cols_q
            rows_p = a[p, :].copy()
            rows_q = a[q, :]
            a[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            a[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            a[p[active], q[active]] = 0.0
            a[q[active], p[active]] = 0.0

            vp = v[:, p].copy()
            vq = v[:, q]
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
        sweep += 1
        off = _offdiag_norm(a)
    return np.diag(a).copy(), v, sweep, off
