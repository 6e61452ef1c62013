"""Randomized property checks for the matrix and scalar inequalities behind the rates."""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from asgo import linalg
from asgo.problems import NoiseModel, generator

TOL = 1e-9
EQUALITY_TOL = 1e-12
MAX_DIM = 16


@dataclass
class LemmaResult:
    name: str
    trials: int
    passed: bool
    worst_rel_slack: float
    failure: dict = None


@dataclass
class LemmaManifest:
    seed: int
    results: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def to_dict(self):
        return {"seed": self.seed, "passed": self.passed, "lemmas": [asdict(r) for r in self.results]}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def _psd(rng, n, rank=None):
    rank = n if rank is None else rank
    a = rng.standard_normal((n, rank)) * np.exp(rng.uniform(-2, 2))
    return linalg.symmetrize(a @ a.T)


def _spd(rng, n):
    return linalg.symmetrize(_psd(rng, n) + 1e-3 * np.eye(n))


def _dim(rng):
    return int(rng.integers(1, MAX_DIM + 1))


def _trace_pow(x, p):
    lam = np.maximum(linalg.sym_eig(x).eigenvalues, 0.0)
    return float(np.sum(lam**p))


# Each check draws one instance and returns (lhs, rhs, instance); it should satisfy lhs <= rhs.


def _operator_monotone(rng):
    n = _dim(rng)
    alpha = float(rng.uniform(0.0, 1.0))
    a = _spd(rng, n)
    b = linalg.symmetrize(a + _psd(rng, n, int(rng.integers(1, n + 1))))
    gap = linalg.symmetrize(linalg.psd_power(b, alpha) - linalg.psd_power(a, alpha))
    scale = max(linalg.spectral_norm(linalg.psd_power(b, alpha)), 1e-300)
    # lhs <= rhs  <=>  -λ_min(B^α - A^α) <= 0
    return -linalg.min_eigenvalue(gap), 0.0, {"n": n, "alpha": alpha, "A": a, "B": b}, scale


def _trace_sqrt_subadditive(rng):
    n = _dim(rng)
    x, y = _spd(rng, n), _spd(rng, n)
    lhs = _trace_pow(linalg.symmetrize(x + y), 0.5)
    return lhs, _trace_pow(x, 0.5) + _trace_pow(y, 0.5), {"X": x, "Y": y}, None


def _trace_sqrt_diagonal(rng):
    n = _dim(rng)
    x = _psd(rng, n, int(rng.integers(1, n + 1)))
    return _trace_pow(x, 0.5), float(np.sum(np.sqrt(np.maximum(np.diag(x), 0.0)))), {"X": x}, None


def _trace_norm_bound(rng):
    m = _dim(rng)
    n = _dim(rng)
    lam = _spd(rng, m)
    g = rng.standard_normal((m, n))
    inv = linalg.psd_power(lam, -1.0)
    rhs = math.sqrt(linalg.trace_norm(lam) * float(np.trace(g.T @ inv @ g)))
    return linalg.trace_norm(g), rhs, {"Lambda": lam, "G": g}, None


def _scalar(rng):
    n = _dim(rng)
    x = rng.uniform(0.0, 1.0, n) * (rng.uniform(size=n) > 0.2)
    s = rng.uniform(0.01, 1.0, n)
    total = s.sum()
    return x.sum() / total, math.sqrt(np.sum(x * x / s) / total), {"x": x, "s": s}, None


LEMMAS = {
    "operator-monotone-power": _operator_monotone,
    "trace-sqrt-subadditive": _trace_sqrt_subadditive,
    "trace-sqrt-le-diagonal": _trace_sqrt_diagonal,
    "trace-norm-bound": _trace_norm_bound,
    "scalar-weighted-mean": _scalar,
}


def _jsonable(instance):
    return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in instance.items()}


def _run_lemma(name, check, seed, trials):
    rng = generator(seed, "lemma", name)
    worst = -math.inf
    for trial in range(trials):
        lhs, rhs, instance, scale = check(rng)
        scale = scale if scale is not None else max(abs(lhs), abs(rhs), 1e-300)
        rel = (lhs - rhs) / scale
        worst = max(worst, rel)
        if rel > TOL:
            failure = {"seed": seed, "trial": trial, "lhs": lhs, "rhs": rhs, "instance": _jsonable(instance)}
            return LemmaResult(name, trial + 1, False, rel, failure)
    return LemmaResult(name, trials, True, worst)


def _scalar_equality(seed, trials):
    """Equality case: ``x_j = c·s_j`` for all ``j`` makes both sides equal."""
    rng = generator(seed, "lemma", "scalar-equality")
    worst = 0.0
    for trial in range(trials):
        n = _dim(rng)
        s = rng.uniform(0.01, 1.0, n)
        x = float(rng.uniform(0.0, 2.0)) * s
        total = s.sum()
        lhs = x.sum() / total
        rhs = math.sqrt(np.sum(x * x / s) / total)
        gap = abs(rhs - lhs)
        worst = max(worst, gap)
        if gap > EQUALITY_TOL:
            failure = {"seed": seed, "trial": trial, "lhs": lhs, "rhs": rhs, "instance": _jsonable({"x": x, "s": s})}
            return LemmaResult("scalar-weighted-mean-equality", trial + 1, False, gap, failure)
    return LemmaResult("scalar-weighted-mean-equality", trials, True, worst)


def lemma_suite(seed=0, trials=1000):
    """Run every inequality on ``trials`` random instances of dimension ≤ 16."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    manifest = LemmaManifest(seed)
    for name, check in LEMMAS.items():
        manifest.results.append(_run_lemma(name, check, seed, trials))
    manifest.results.append(_scalar_equality(seed, trials))
    return manifest


def batch_variance_check(seed=0, batches=(1, 4, 16), draws=100_000, dims=(6, 4), chunk=5_000, sigmas=3.0):
    """Empirical ``E[N̄N̄ᵀ]`` for batch size ``M`` against ``V²/M``.

    ``N̄`` is the literal average of ``M`` noise draws. Compared through three
    scalar statistics (trace, and quadratic forms along the top eigenvector of
    ``V²`` and a fixed random direction), each required within ``sigmas``
    standard errors. Returns a dict per batch size.
    """
    m, n = dims
    rng = generator(seed, "batch-variance", "model")
    noise = NoiseModel(rng.standard_normal((m, m)) / np.sqrt(m))
    v2 = noise.v_squared
    top = linalg.sym_eig(v2).eigenvectors[:, 0]
    other = rng.standard_normal(m)
    other /= np.linalg.norm(other)
    dirs = np.stack([top, other])
    out = {}
    for batch in batches:
        draw_rng = generator(seed, "batch-variance", batch)
        # per draw: trace and two quadratic forms of N Nᵀ
        stats = np.empty((draws, 3))
        cov = np.zeros((m, m))
        done = 0
        while done < draws:
            k = min(chunk, draws - done)
            z = draw_rng.standard_normal((k, batch, m, n)) / np.sqrt(n)
            nbar = np.einsum("ij,kbjl->kil", noise.factor, z) / batch
            stats[done:done + k, 0] = np.einsum("kij,kij->k", nbar, nbar)
            proj = np.einsum("di,kil->kdl", dirs, nbar)
            stats[done:done + k, 1:] = np.einsum("kdl,kdl->kd", proj, proj)
            cov += np.einsum("kil,kjl->ij", nbar, nbar)
            done += k
        cov /= draws
        target = v2 / batch
        expected = np.array([np.trace(target), top @ target @ top, other @ target @ other])
        mean = stats.mean(axis=0)
        stderr = stats.std(axis=0, ddof=1) / math.sqrt(draws)
        z_scores = np.abs(mean - expected) / stderr
        sigma_stat = float(stderr.max())
        out[batch] = {
            "expected": expected.tolist(),
            "empirical": mean.tolist(),
            "z_scores": z_scores.tolist(),
            "within_tolerance": bool(np.all(z_scores <= sigmas)),
            "loewner_ok": bool(linalg.loewner_leq(cov, target + 5 * sigma_stat * np.eye(m), 0.0)),
            "relative_frobenius_error": float(np.linalg.norm(cov - target) / np.linalg.norm(target)),
        }
    return out
