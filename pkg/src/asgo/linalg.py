"""Dense float64 matrix core: symmetric eigendecomposition, compact SVD, PSD powers, norms.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype float64. Every
decomposition goes through the Jacobi kernel selected in ``asgo._backend``;
numpy's LAPACK wrappers are used only as test oracles.
"""
from dataclasses import dataclass

import numpy as np

from asgo import _backend
from asgo.errors import ConvergenceError, NonFiniteError, NotPSDError, SingularMatrixError

DEFAULT_EIG_TOL = 1e-13
DEFAULT_RANK_TOL = 1e-12
SYMMETRY_TOL = 1e-8
PSD_TOL = 1e-8
# eigenvalues at or below this fraction of the largest count as zero for negative powers
SINGULAR_TOL = 1e-14


def as_matrix(x, name="x"):
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError(f"{name} must have positive dimensions, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{name} contains NaN or Inf")
    return a


def matmul(a, b):
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def symmetrize(x):
    return 0.5 * (x + x.T)


def _require_square(x, name="x"):
    if x.shape[0] != x.shape[1]:
        raise ValueError(f"{name} must be square, got shape {x.shape}")


def _require_symmetric(x, name="x"):
    scale = np.linalg.norm(x)
    if np.linalg.norm(x - x.T) > SYMMETRY_TOL * max(scale, np.finfo(float).tiny):
        raise ValueError(f"{name} is not symmetric to relative tolerance {SYMMETRY_TOL}")


@dataclass(frozen=True)
class SymEig:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns
    sweeps: int = 0
    offdiag: float = 0.0

    def reconstruct(self):
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def sym_eig(x, tol=DEFAULT_EIG_TOL, max_sweeps=60):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    ``tol`` is relative: sweeps continue until the off-diagonal Frobenius norm
    of ``QᵀXQ`` is at most ``tol * ‖X‖_F``. The input is symmetrized as
    ``(X + Xᵀ)/2`` first. Raises :class:`ConvergenceError` (carrying the
    residual) when ``max_sweeps`` is not enough.
    """
    x = as_matrix(x)
    _require_square(x)
    _require_symmetric(x)
    x = symmetrize(x)
    n = x.shape[0]
    scale = float(np.linalg.norm(x))
    if scale == 0.0:
        return SymEig(np.zeros(n), np.eye(n))
    diag, vecs, sweeps, off = _backend.jacobi_eigh(np.ascontiguousarray(x), tol * scale, max_sweeps)
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(vecs))):
        raise NonFiniteError("non-finite values inside the Jacobi iteration")
    if off > tol * scale:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps", off / scale)
    order = np.argsort(-diag, kind="stable")
    return SymEig(diag[order], np.ascontiguousarray(vecs[:, order]), sweeps, off)


@dataclass(frozen=True)
class Svd:
    u: np.ndarray  # m x r
    s: np.ndarray  # r, positive, descending
    v: np.ndarray  # n x r
    rank: int

    def reconstruct(self):
        return (self.u * self.s) @ self.v.T

    def polar(self):
        """``U Vᵀ``: the orthogonal factor of the compact SVD."""
        return self.u @ self.v.T


def svd(x, rank_tol=DEFAULT_RANK_TOL):
    """Compact SVD through the eigendecomposition of the smaller Gram matrix.

    Singular values are recomputed as column norms of ``X V`` rather than
    square roots of Gram eigenvalues, so exact zeros stay near machine
    precision and rank detection at ``rank_tol * s_max`` works.
    """
    x = as_matrix(x)
    m, n = x.shape
    if m < n:
        t = svd(x.T, rank_tol)
        return Svd(t.v, t.s, t.u, t.rank)
    vecs = sym_eig(x.T @ x).eigenvectors
    b = x @ vecs
    s = np.sqrt(np.sum(b * b, axis=0))
    order = np.argsort(-s, kind="stable")
    s, b, vecs = s[order], b[:, order], vecs[:, order]
    if s.size == 0 or s[0] == 0.0:
        return Svd(np.zeros((m, 0)), np.zeros(0), np.zeros((n, 0)), 0)
    keep = s > rank_tol * s[0]
    r = int(np.count_nonzero(keep))
    s = s[:r]
    return Svd(b[:, :r] / s, s, np.ascontiguousarray(vecs[:, :r]), r)


def singular_values(x):
    return svd(x).s


def psd_power(x, p, floor=0.0, singular="raise"):
    """``Q diag(max(λ, floor)^p) Qᵀ`` for a symmetric PSD matrix.

    ``singular="raise"`` rejects negative powers of a matrix with a zero
    eigenvalue; ``singular="pinv"`` maps those eigenvalues to zero instead
    (pseudo-inverse convention).
    """
    eig = sym_eig(x)
    lam = eig.eigenvalues
    top = float(np.max(np.abs(lam)))
    if lam[-1] < -PSD_TOL * top:
        raise NotPSDError(f"matrix is not PSD: λ_min={lam[-1]:.3e}, λ_max={top:.3e}", lam[-1])
    lam = np.maximum(np.maximum(lam, 0.0), floor)
    if p < 0:
        zero = lam <= SINGULAR_TOL * top if top > 0 else np.ones_like(lam, dtype=bool)
        if floor > 0:
            zero = lam <= 0.0
        if np.any(zero):
            if singular != "pinv":
                raise SingularMatrixError(
                    f"negative power {p} of a singular matrix; use floor > 0 or eps damping"
                )
            powered = np.where(zero, 0.0, np.power(np.where(zero, 1.0, lam), p))
        else:
            powered = np.power(lam, p)
    else:
        powered = np.power(lam, p)
    q = eig.eigenvectors
    return symmetrize((q * powered) @ q.T)


def frobenius(x):
    return float(np.linalg.norm(x))


def spectral_norm(x):
    s = singular_values(x)
    return float(s[0]) if s.size else 0.0


def trace_norm(x):
    return float(np.sum(singular_values(x)))


@dataclass(frozen=True)
class Norms:
    frobenius: float
    spectral: float
    trace_norm: float
    _trace: float = None

    @property
    def trace(self):
        if self._trace is None:
            raise ValueError("trace is only defined for square matrices")
        return self._trace


def norms(x):
    x = as_matrix(x)
    s = singular_values(x)
    tr = float(np.trace(x)) if x.shape[0] == x.shape[1] else None
    return Norms(
        frobenius=float(np.linalg.norm(x)),
        spectral=float(s[0]) if s.size else 0.0,
        trace_norm=float(np.sum(s)),
        _trace=tr,
    )


def min_eigenvalue(x):
    return float(sym_eig(x).eigenvalues[-1])


def loewner_leq(a, b, tol=1e-10):
    """True iff ``b - a`` is PSD up to ``tol`` (λ_min(b - a) >= -tol)."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    _require_square(a, "a")
    return min_eigenvalue(symmetrize(b - a)) >= -tol
