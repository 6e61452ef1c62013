"""Desk-scale objectives with exact gradients and known theory constants.

Every problem works on a list of weight matrices (one entry for the matrix
problems, one per layer for the MLP). Randomness comes from :func:`generator`,
which derives independent named streams from one 64-bit seed.
"""
import hashlib
import os
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from asgo import linalg


def generator(seed, *names):
    """Deterministic generator for the stream ``names`` under ``seed``."""
    key = tuple(zlib.crc32(str(n).encode()) for n in names)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


@dataclass(frozen=True)
class NoiseModel:
    """Additive gradient noise ``N = A Z`` with ``Z`` iid ``N(0, 1/n)``, so ``E[N Nᵀ] = A Aᵀ``."""

    factor: np.ndarray

    @property
    def v_squared(self):
        return self.factor @ self.factor.T

    @property
    def v(self):
        return linalg.psd_power(self.v_squared, 0.5)

    def draw(self, n, rng, batch=1):
        """Average of ``batch`` independent draws; covariance ``V²/batch``."""
        m, k = self.factor.shape
        z = rng.standard_normal((batch, k, n)) / np.sqrt(n)
        return self.factor @ z.mean(axis=0)


@dataclass
class Problem:
    """An objective over a list of matrices.

    ``stoch_grad(params, batch, rng)`` is an unbiased estimate of ``grad``.
    ``smoothness`` (L) and ``noise_bound`` (V) are set when known; ``w_star``
    may be computed lazily through ``solver``.
    """

    name: str
    shapes: list
    loss: object
    grad: object
    stoch_grad: object
    init: object
    smoothness: np.ndarray = None
    noise_bound: np.ndarray = None
    f_star: float = None
    solver: object = None
    meta: dict = field(default_factory=dict)
    _w_star: list = None

    @property
    def dims(self):
        return self.shapes[0] if len(self.shapes) == 1 else tuple(self.shapes)

    @property
    def w_star(self):
        if self._w_star is None and self.solver is not None:
            self._w_star = self.solver()
            if self.f_star is None:
                self.f_star = self.loss(self._w_star)
        return self._w_star

    @w_star.setter
    def w_star(self, value):
        self._w_star = value

    def f_gap(self, params):
        if self.f_star is None and self.w_star is None:
            return None
        return self.loss(params) - self.f_star


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_spd(rng, n, cond=10.0, scale=1.0):
    """SPD matrix with log-spaced spectrum in ``[scale/cond, scale]``."""
    q = random_orthogonal(rng, n)
    lam = scale * np.logspace(0.0, -np.log10(cond), n)
    return linalg.symmetrize((q * lam) @ q.T)


def _check_pd(mat, what):
    mat = linalg.as_matrix(mat, what)
    linalg._require_square(mat)
    lo = linalg.min_eigenvalue(mat)
    if lo <= 0:
        raise linalg.NotPSDError(f"{what} must be positive definite (min eigenvalue {lo:.3e})", lo)
    return linalg.symmetrize(mat)


def _additive(grad, noise):
    def stoch_grad(params, batch, rng):
        g = grad(params)[0]
        if noise is not None:
            g = g + noise.draw(g.shape[1], rng, batch)
        return [g]

    return stoch_grad


def _zeros_init(shape):
    return lambda rng=None: [np.zeros(shape)]


def make_quadratic(L, w_star, noise=None, seed=0):
    """``f(W) = ½ tr((W − W*)ᵀ L (W − W*))`` with optional additive noise."""
    L = _check_pd(L, "L")
    w_star = linalg.as_matrix(w_star, "w_star")
    if w_star.shape[0] != L.shape[0]:
        raise ValueError(f"L is {L.shape} but W* has {w_star.shape[0]} rows")

    def loss(params):
        d = params[0] - w_star
        return 0.5 * float(np.sum(d * (L @ d)))

    def grad(params):
        return [L @ (params[0] - w_star)]

    return Problem(
        name="quadratic",
        shapes=[w_star.shape],
        loss=loss,
        grad=grad,
        stoch_grad=_additive(grad, noise),
        init=_zeros_init(w_star.shape),
        smoothness=L,
        noise_bound=None if noise is None else noise.v,
        f_star=0.0,
        meta={"seed": seed, "noise": noise},
        _w_star=[w_star],
    )


def make_lowrank_regression(A, w_star, noise=None, seed=0):
    """``f(W) = ½‖A (W − W*)‖_F²``; gradients ``AᵀA(W − W*)`` have rank ≤ rank(A)."""
    A = linalg.as_matrix(A, "A")
    w_star = linalg.as_matrix(w_star, "w_star")
    if A.shape[1] != w_star.shape[0]:
        raise ValueError(f"A is {A.shape} but W* has {w_star.shape[0]} rows")
    L = linalg.symmetrize(A.T @ A)

    def loss(params):
        r = A @ (params[0] - w_star)
        return 0.5 * float(np.sum(r * r))

    def grad(params):
        return [L @ (params[0] - w_star)]

    return Problem(
        name="lowrank-regression",
        shapes=[w_star.shape],
        loss=loss,
        grad=grad,
        stoch_grad=_additive(grad, noise),
        init=_zeros_init(w_star.shape),
        smoothness=L,
        noise_bound=None if noise is None else noise.v,
        f_star=0.0,
        meta={"seed": seed, "noise": noise},
        _w_star=[w_star],
    )


def make_linear(C):
    """``f(W) = tr(Cᵀ W)``; ``C = I`` gives ``f = tr(W)``. Unbounded below, no minimizer."""
    C = linalg.as_matrix(C, "C")

    def loss(params):
        return float(np.sum(C * params[0]))

    def grad(params):
        return [C.copy()]

    return Problem(
        name="linear",
        shapes=[C.shape],
        loss=loss,
        grad=grad,
        stoch_grad=lambda params, batch, rng: grad(params),
        init=_zeros_init(C.shape),
    )


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _logsumexp(z):
    top = z.max(axis=1, keepdims=True)
    return (top + np.log(np.exp(z - top).sum(axis=1, keepdims=True)))[:, 0]


# cached minimizers: magic, rows, cols, seed, crc32 of the payload
_CACHE_MAGIC = b"ASGOWST1"
_CACHE_HEADER = struct.Struct("<8sIIQI")


def cache_dir():
    return Path(os.environ.get("ASGO_CACHE_DIR", Path.home() / ".cache" / "asgo"))


def save_matrix(path, mat, seed):
    mat = np.ascontiguousarray(mat, dtype="<f8")
    payload = mat.tobytes()
    header = _CACHE_HEADER.pack(_CACHE_MAGIC, mat.shape[0], mat.shape[1], seed, zlib.crc32(payload))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + f".{os.getpid()}.tmp")
    tmp.write_bytes(header + payload)
    os.replace(tmp, path)


def load_matrix(path, seed=None):
    """Read a cached matrix; ``None`` if missing, corrupt or for a different seed."""
    try:
        blob = Path(path).read_bytes()
    except OSError:
        return None
    if len(blob) < _CACHE_HEADER.size:
        return None
    magic, rows, cols, stored_seed, crc = _CACHE_HEADER.unpack_from(blob)
    payload = blob[_CACHE_HEADER.size:]
    if magic != _CACHE_MAGIC or len(payload) != 8 * rows * cols or zlib.crc32(payload) != crc:
        return None
    if seed is not None and stored_seed != seed:
        return None
    return np.frombuffer(payload, dtype="<f8").reshape(rows, cols).astype(np.float64)


def _accelerated_descent(grad, x0, lipschitz, strong, tol=1e-10, max_iter=200_000):
    """Nesterov's method for a strongly convex objective, run to ``‖∇f‖_F ≤ tol``."""
    kappa = lipschitz / strong
    beta = (np.sqrt(kappa) - 1.0) / (np.sqrt(kappa) + 1.0)
    x = x0.copy()
    y = x0.copy()
    for _ in range(max_iter):
        g = grad(y)
        x_next = y - g / lipschitz
        y = x_next + beta * (x_next - x)
        x = x_next
        if np.linalg.norm(grad(x)) <= tol:
            return x
    raise RuntimeError(f"minimizer search stopped at gradient norm {np.linalg.norm(grad(x)):.3e}")


def make_logistic(n_samples=200, dims=(10, 4), seed=0, reg=1e-2, margin=2.0, cache=True):
    """ℓ2-regularized multinomial logistic regression; ``W`` is features × classes.

    Labels are balanced (``i mod k``) and features are class centers of norm
    ``margin`` plus unit Gaussian noise. ``W*`` is found by accelerated
    gradient descent on first use and cached on disk.
    """
    d, k = dims
    rng = generator(seed, "logistic", "data")
    centers = rng.standard_normal((k, d))
    centers *= margin / np.linalg.norm(centers, axis=1, keepdims=True)
    labels = np.arange(n_samples) % k
    X = centers[labels] + rng.standard_normal((n_samples, d))
    Y = np.eye(k)[labels]
    count = max(n_samples, 1)

    def loss_on(w, xs, ys):
        z = xs @ w
        data = float(np.sum(_logsumexp(z) - np.sum(z * ys, axis=1))) / max(len(xs), 1)
        return data + 0.5 * reg * float(np.sum(w * w))

    def grad_on(w, xs, ys):
        p = _softmax(xs @ w)
        return xs.T @ (p - ys) / max(len(xs), 1) + reg * w

    def loss(params):
        return loss_on(params[0], X, Y)

    def grad(params):
        return [grad_on(params[0], X, Y)]

    def stoch_grad(params, batch, rng_):
        idx = rng_.integers(0, n_samples, size=batch)
        return [grad_on(params[0], X[idx], Y[idx])]

    # softmax Hessian ⪯ ½I, so the Hessian is below I_k ⊗ (½XᵀX/N + reg·I)
    L = linalg.symmetrize(0.5 * X.T @ X / count + reg * np.eye(d))

    def solve():
        tag = hashlib.sha256(repr((n_samples, d, k, reg, margin, seed)).encode()).hexdigest()[:16]
        path = cache_dir() / f"logistic-{tag}.bin"
        if cache:
            hit = load_matrix(path, seed)
            if hit is not None and hit.shape == (d, k):
                return [hit]
        lipschitz = float(np.linalg.eigvalsh(L)[-1])
        w = _accelerated_descent(lambda w_: grad_on(w_, X, Y), np.zeros((d, k)), lipschitz, reg)
        if cache:
            save_matrix(path, w, seed)
        return [w]

    return Problem(
        name="logistic",
        shapes=[(d, k)],
        loss=loss,
        grad=grad,
        stoch_grad=stoch_grad,
        init=_zeros_init((d, k)),
        smoothness=L,
        solver=solve,
        meta={"seed": seed, "X": X, "Y": Y, "reg": reg},
    )


def make_mlp(widths=(8, 16, 4), n_samples=64, seed=0, noise=0.1):
    """One tanh hidden layer without biases, square loss, manual backpropagation.

    Parameters are ``[W1 (hidden × in), W2 (out × hidden)]``; targets come from
    a random teacher network of the same shape plus Gaussian noise.
    """
    d_in, hidden, d_out = widths
    rng = generator(seed, "mlp", "data")
    X = rng.standard_normal((d_in, n_samples))
    t1 = rng.standard_normal((hidden, d_in)) / np.sqrt(d_in)
    t2 = rng.standard_normal((d_out, hidden)) / np.sqrt(hidden)
    Y = t2 @ np.tanh(t1 @ X) + noise * rng.standard_normal((d_out, n_samples))

    def loss_on(params, xs, ys):
        w1, w2 = params
        r = w2 @ np.tanh(w1 @ xs) - ys
        return 0.5 * float(np.sum(r * r)) / max(xs.shape[1], 1)

    def grad_on(params, xs, ys):
        w1, w2 = params
        count = max(xs.shape[1], 1)
        h = np.tanh(w1 @ xs)
        r = (w2 @ h - ys) / count
        g2 = r @ h.T
        back = (w2.T @ r) * (1.0 - h * h)
        g1 = back @ xs.T
        return [g1, g2]

    def init(rng_=None):
        rng_ = rng_ if rng_ is not None else generator(seed, "mlp", "init")
        return [
            rng_.standard_normal((hidden, d_in)) / np.sqrt(d_in),
            rng_.standard_normal((d_out, hidden)) / np.sqrt(hidden),
        ]

    def stoch_grad(params, batch, rng_):
        idx = rng_.integers(0, n_samples, size=batch)
        return grad_on(params, X[:, idx], Y[:, idx])

    return Problem(
        name="mlp",
        shapes=[(hidden, d_in), (d_out, hidden)],
        loss=lambda params: loss_on(params, X, Y),
        grad=lambda params: grad_on(params, X, Y),
        stoch_grad=stoch_grad,
        init=init,
        meta={"seed": seed, "X": X, "Y": Y},
    )


def finite_diff_check(problem, params, h=1e-5):
    """Max entrywise relative error of ``problem.grad`` against central differences.

    The denominator is floored at ``1e-6 · max|grad|`` so near-zero entries
    do not dominate.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    params = [np.array(p, dtype=np.float64) for p in params]
    analytic = problem.grad(params)
    scale = max(max((float(np.abs(g).max()) if g.size else 0.0) for g in analytic), 1e-300)
    worst = 0.0
    for layer, g in enumerate(analytic):
        p = params[layer]
        for idx in np.ndindex(p.shape):
            orig = p[idx]
            p[idx] = orig + h
            up = problem.loss(params)
            p[idx] = orig - h
            down = problem.loss(params)
            p[idx] = orig
            fd = (up - down) / (2.0 * h)
            err = abs(fd - g[idx]) / max(abs(g[idx]), abs(fd), 1e-6 * scale)
            worst = max(worst, err)
    return worst


def _noise_model(rng, m, scale):
    if not scale:
        return None
    return NoiseModel(scale * rng.standard_normal((m, m)) / np.sqrt(m))


def build(name, params=None, seed=0):
    """Construct a problem from a config entry ``{"name": ..., "params": {...}}``."""
    params = dict(params or {})
    if name == "quadratic":
        m = params.pop("m", 8)
        n = params.pop("n", 8)
        cond = params.pop("cond", 10.0)
        scale = params.pop("scale", 1.0)
        noise = params.pop("noise", 0.0)
        _no_extra(name, params)
        L = random_spd(generator(seed, "quadratic", "L"), m, cond, scale)
        w_star = generator(seed, "quadratic", "w_star").standard_normal((m, n))
        return make_quadratic(L, w_star, _noise_model(generator(seed, "quadratic", "noise"), m, noise), seed)
    if name == "lowrank-regression":
        m = params.pop("m", 16)
        n = params.pop("n", 16)
        r = params.pop("r", 2)
        noise = params.pop("noise", 0.0)
        _no_extra(name, params)
        rng = generator(seed, "lowrank", "A")
        A = rng.standard_normal((m, r)) @ rng.standard_normal((r, m)) / m
        w_star = generator(seed, "lowrank", "w_star").standard_normal((m, n))
        return make_lowrank_regression(A, w_star, _noise_model(generator(seed, "lowrank", "noise"), m, noise), seed)
    if name == "logistic":
        n_samples = params.pop("n_samples", 200)
        dims = tuple(params.pop("dims", (10, 4)))
        reg = params.pop("reg", 1e-2)
        _no_extra(name, params)
        return make_logistic(n_samples, dims, seed, reg)
    if name == "mlp":
        widths = tuple(params.pop("widths", (8, 16, 4)))
        n_samples = params.pop("n_samples", 64)
        _no_extra(name, params)
        return make_mlp(widths, n_samples, seed)
    raise KeyError(f"unknown problem {name!r}; expected one of {PROBLEM_NAMES}")


PROBLEM_NAMES = ("quadratic", "lowrank-regression", "logistic", "mlp")


def _no_extra(name, params):
    if params:
        raise KeyError(f"unknown parameters for problem {name!r}: {', '.join(sorted(params))}")
