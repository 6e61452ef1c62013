"""Iterative matrix-function kernels for inverse square roots.

All kernels return an :class:`NsResult` so callers can compare them against
the eigendecomposition oracle ``linalg.psd_power`` on equal terms.
"""
from dataclasses import dataclass

import numpy as np

from asgo import linalg
from asgo.errors import DivergenceError, SingularMatrixError

FIXED = "fixed-triple"
PER_ITERATION = "per-iteration-list"

QUINTIC = (2.0, -1.5, 0.5)

# Per-iteration (a, b, c) schedule, kept as the exact printed decimals.
POLAR_EXPRESS_DECIMALS = (
    ("8.28721201814563", "-23.595886519098837", "17.300387312530933"),
    ("4.107059111542203", "-2.9478499167379106", "0.5448431082926601"),
    ("3.9486908534822946", "-2.908902115962949", "0.5518191394370137"),
    ("3.3184196573706015", "-2.488488024314874", "0.51004894012372"),
    ("2.300652019954817", "-1.6689039845747493", "0.4188073119525673"),
    ("1.891301407787398", "-1.2679958271945868", "0.37680408948524835"),
    ("1.8750014808534479", "-1.2500016453999487", "0.3750001645474248"),
    ("1.875", "-1.25", "0.375"),
    ("1.875", "-1.25", "0.375"),
    ("1.875", "-1.25", "0.375"),
)


@dataclass(frozen=True)
class NsCoefficients:
    schedule: tuple
    mode: str = FIXED

    def __post_init__(self):
        if not self.schedule:
            raise ValueError("coefficient schedule must be non-empty")
        if self.mode not in (FIXED, PER_ITERATION):
            raise ValueError(f"unknown coefficient mode {self.mode!r}")
        if self.mode == FIXED and len(self.schedule) != 1:
            raise ValueError("fixed-triple mode takes exactly one (a, b, c) triple")
        for triple in self.schedule:
            if len(triple) != 3:
                raise ValueError(f"coefficients must be (a, b, c) triples, got {triple!r}")

    def at(self, k):
        return self.schedule[0] if self.mode == FIXED else self.schedule[k]


def quintic():
    return NsCoefficients((QUINTIC,), FIXED)


def polar_express_schedule():
    triples = tuple(tuple(float(v) for v in row) for row in POLAR_EXPRESS_DECIMALS)
    return NsCoefficients(triples, PER_ITERATION)


def coefficients_by_name(name):
    if name in ("quintic", "newton-schulz"):
        return quintic()
    if name == "polar-express":
        return polar_express_schedule()
    raise ValueError(f"unknown coefficient schedule {name!r}")


@dataclass(frozen=True)
class NsResult:
    inv_sqrt: np.ndarray
    sqrt: np.ndarray
    iterations: int
    residual: float


def inv_sqrt_residual(x, inv_sqrt):
    """``‖Z X Z - I‖_F / √n``."""
    n = x.shape[0]
    return float(np.linalg.norm(inv_sqrt @ x @ inv_sqrt - np.eye(n)) / np.sqrt(n))


def _check_finite(k, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise DivergenceError("Newton-Schulz iterate became non-finite", k)


def ns_sqrt_inverse(x, coeffs=None, steps=10, eps=0.0, damping=0.0):
    """Coupled Newton-Schulz iteration for ``X^{-1/2}`` and ``X^{1/2}``.

    ``eps`` enters only through the normalizer ``α = ‖X‖_F + eps``;
    ``damping`` shifts the input to ``X + damping·I`` before anything else.
    Runs exactly ``steps`` iterations; no convergence test.
    """
    x = linalg.as_matrix(x)
    linalg._require_square(x)
    x = linalg.symmetrize(x)
    coeffs = coeffs or quintic()
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if eps < 0 or damping < 0:
        raise ValueError("eps and damping must be non-negative")
    if coeffs.mode == PER_ITERATION and steps > len(coeffs.schedule):
        raise ValueError(f"steps={steps} exceeds the schedule length {len(coeffs.schedule)}")
    n = x.shape[0]
    eye = np.eye(n)
    if damping:
        x = x + damping * eye
    alpha = float(np.linalg.norm(x)) + eps
    if alpha == 0.0:
        raise SingularMatrixError("zero input to the inverse square root; use eps or damping")

    y = x / alpha
    z = eye.copy()
    # overflow is detected explicitly below, so numpy's warning is redundant
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            a, b, c = coeffs.at(k)
            prod = z @ y
            poly = b * prod + c * (prod @ prod)
            y = a * y + y @ poly
            z = a * z + poly @ z
            _check_finite(k + 1, y, z)

    root = np.sqrt(alpha)
    inv_sqrt = linalg.symmetrize(z / root)
    sqrt = linalg.symmetrize(root * y)
    return NsResult(inv_sqrt, sqrt, steps, inv_sqrt_residual(x, inv_sqrt))


def denman_beavers_inv_sqrt(x, steps=50, tol=1e-12, damping=0.0):
    """Coupled Newton (Denman-Beavers) iteration: ``Y -> X^{1/2}``, ``Z -> X^{-1/2}``.

    Stops after ``steps`` iterations or once ``‖Y_{k+1} - Y_k‖_F <= tol·‖Y_k‖_F``.
    """
    x = linalg.as_matrix(x)
    linalg._require_square(x)
    x = linalg.symmetrize(x)
    n = x.shape[0]
    if damping:
        x = x + damping * np.eye(n)
    y = x.copy()
    z = np.eye(n)
    k = 0
    for k in range(1, steps + 1):
        try:
            y_inv = np.linalg.inv(y)
            z_inv = np.linalg.inv(z)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError(
                f"singular iterate at step {k}; add eps damping upstream"
            ) from exc
        y_next = 0.5 * (y + z_inv)
        z_next = 0.5 * (z + y_inv)
        if not (np.all(np.isfinite(y_next)) and np.all(np.isfinite(z_next))):
            raise SingularMatrixError(f"non-finite iterate at step {k}; matrix is (near) singular")
        change = np.linalg.norm(y_next - y)
        scale = np.linalg.norm(y)
        y, z = y_next, z_next
        if change <= tol * scale:
            break
    inv_sqrt = linalg.symmetrize(z)
    return NsResult(inv_sqrt, linalg.symmetrize(y), k, inv_sqrt_residual(x, inv_sqrt))


def sign_iteration(m, kernel="quintic", steps=50):
    """Matrix sign function of ``m`` (real spectrum) by a polynomial or Newton iteration.

    ``kernel`` is ``"quintic"`` / ``"polar-express"`` (``S <- S p(S²)`` with the
    same (a, b, c) triples as :func:`ns_sqrt_inverse`) or ``"newton"``
    (``S <- (S + S^{-1})/2``). Polynomial kernels expect ``‖m²‖`` scaled into (0, 1].
    """
    s = np.array(m, dtype=np.float64)
    eye = np.eye(s.shape[0])
    if kernel == "newton":
        for k in range(steps):
            try:
                s = 0.5 * (s + np.linalg.inv(s))
            except np.linalg.LinAlgError as exc:
                raise SingularMatrixError(f"singular sign iterate at step {k + 1}") from exc
            _check_finite(k + 1, s)
        return s
    coeffs = coefficients_by_name(kernel)
    if coeffs.mode == PER_ITERATION:
        steps = min(steps, len(coeffs.schedule))
    for k in range(steps):
        a, b, c = coeffs.at(k)
        sq = s @ s
        s = s @ (a * eye + b * sq + c * (sq @ sq))
        _check_finite(k + 1, s)
    return s


def block_msign_check(x, kernel="quintic", steps=50):
    """Recover ``X^{1/2}`` and ``X^{-1/2}`` from ``sign([[0, X], [I, 0]])``.

    Returns relative Frobenius errors of the two extracted blocks against the
    eigendecomposition oracle. Diagnostic only.
    """
    x = linalg.symmetrize(linalg.as_matrix(x))
    n = x.shape[0]
    aug = np.zeros((2 * n, 2 * n))
    aug[:n, n:] = x
    aug[n:, :n] = np.eye(n)
    if kernel != "newton":
        # aug² = diag(X, X); scale so the squared spectrum lies in (0, 1]
        aug = aug / np.sqrt(np.linalg.norm(x))
    sign = sign_iteration(aug, kernel, steps)
    sqrt_block = sign[:n, n:]
    inv_sqrt_block = sign[n:, :n]
    sqrt_ref = linalg.psd_power(x, 0.5)
    inv_ref = linalg.psd_power(x, -0.5)
    return {
        "sqrt_err": float(np.linalg.norm(sqrt_block - sqrt_ref) / np.linalg.norm(sqrt_ref)),
        "inv_sqrt_err": float(np.linalg.norm(inv_sqrt_block - inv_ref) / np.linalg.norm(inv_ref)),
        "sqrt": sqrt_block,
        "inv_sqrt": inv_sqrt_block,
    }
