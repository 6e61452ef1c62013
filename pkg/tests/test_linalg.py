import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from asgo import _backend, linalg
from asgo.errors import ConvergenceError, NonFiniteError, NotPSDError, SingularMatrixError

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def matrices(max_dim=8):
    shapes = st.tuples(st.integers(1, max_dim), st.integers(1, max_dim))
    return shapes.flatmap(lambda s: arrays(np.float64, s, elements=finite))


def symmetric(max_dim=8):
    return st.integers(1, max_dim).flatmap(
        lambda n: arrays(np.float64, (n, n), elements=finite).map(lambda a: a + a.T)
    )


@settings(max_examples=60, deadline=None)
@given(symmetric())
def test_sym_eig_matches_lapack(x):
    eig = linalg.sym_eig(x)
    ref = np.linalg.eigvalsh(x)[::-1]
    scale = max(np.linalg.norm(x), 1.0)
    assert np.allclose(eig.eigenvalues, ref, atol=1e-10 * scale)
    assert np.allclose(eig.eigenvectors.T @ eig.eigenvectors, np.eye(len(x)), atol=1e-10)
    assert np.allclose(eig.reconstruct(), x, atol=1e-10 * scale)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_svd_reconstructs_and_is_compact(x):
    s = linalg.svd(x)
    ref = np.linalg.svd(x, compute_uv=False)
    scale = max(ref[0], 1e-300) if ref.size else 1.0
    assert s.rank == s.s.size
    assert np.all(np.diff(s.s) <= 0)
    assert np.allclose(s.reconstruct(), x, atol=1e-9 * max(scale, 1.0))
    kept = ref[ref > 1e-12 * scale]
    assert np.allclose(s.s[: kept.size], kept, atol=1e-9 * max(scale, 1.0))


def test_svd_detects_exact_rank(rng):
    x = rng.standard_normal((12, 3)) @ rng.standard_normal((3, 9))
    s = linalg.svd(x)
    assert s.rank == 3
    assert np.allclose(s.u.T @ s.u, np.eye(3), atol=1e-12)
    assert np.allclose(s.v.T @ s.v, np.eye(3), atol=1e-12)


def test_svd_of_zero_is_empty():
    s = linalg.svd(np.zeros((3, 4)))
    assert s.rank == 0 and s.u.shape == (3, 0) and s.v.shape == (4, 0)
    assert linalg.trace_norm(np.zeros((3, 4))) == 0.0


def test_polar_factor_is_orthogonal(rng):
    x = rng.standard_normal((7, 4))
    p = linalg.svd(x).polar()
    assert np.allclose(p.T @ p, np.eye(4), atol=1e-12)
    u, _, vt = np.linalg.svd(x, full_matrices=False)
    assert np.allclose(p, u @ vt, atol=1e-11)


def test_psd_power_inverse_sqrt(rng):
    a = rng.standard_normal((6, 6))
    x = a @ a.T + np.eye(6)
    z = linalg.psd_power(x, -0.5)
    assert np.allclose(z @ x @ z, np.eye(6), atol=1e-10)
    assert np.allclose(linalg.psd_power(x, 0.5) @ linalg.psd_power(x, 0.5), x, atol=1e-10)


def test_psd_power_singular_handling(rng):
    a = rng.standard_normal((5, 2))
    x = a @ a.T
    with pytest.raises(SingularMatrixError):
        linalg.psd_power(x, -0.5)
    pinv_root = linalg.psd_power(x, -0.5, singular="pinv")
    assert np.allclose(pinv_root @ x @ pinv_root, np.linalg.pinv(x) @ x, atol=1e-9)
    floored = linalg.psd_power(x, -0.5, floor=1e-3)
    assert np.all(np.isfinite(floored))


def test_psd_power_rejects_indefinite():
    with pytest.raises(NotPSDError) as info:
        linalg.psd_power(np.diag([1.0, -1.0]), 0.5)
    assert info.value.min_eigenvalue == pytest.approx(-1.0)


def test_input_validation():
    with pytest.raises(ValueError):
        linalg.sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        linalg.sym_eig(np.ones((2, 3)))
    with pytest.raises(NonFiniteError):
        linalg.svd(np.array([[np.nan, 1.0]]))
    with pytest.raises(ValueError):
        linalg.as_matrix(np.ones(3))
    with pytest.raises(ValueError):
        linalg.matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_convergence_error_carries_residual(rng):
    x = rng.standard_normal((10, 10))
    with pytest.raises(ConvergenceError) as info:
        linalg.sym_eig(x + x.T, max_sweeps=1)
    assert info.value.residual > 0


def test_norms(rng):
    x = rng.standard_normal((5, 3))
    n = linalg.norms(x)
    s = np.linalg.svd(x, compute_uv=False)
    assert n.spectral == pytest.approx(s[0], rel=1e-12)
    assert n.trace_norm == pytest.approx(s.sum(), rel=1e-12)
    assert n.frobenius == pytest.approx(np.linalg.norm(x), rel=1e-14)
    with pytest.raises(ValueError):
        n.trace
    assert linalg.norms(np.eye(3)).trace == 3.0


def test_loewner(rng):
    a = rng.standard_normal((4, 4))
    p = a @ a.T
    assert linalg.loewner_leq(p, p + np.eye(4))
    assert not linalg.loewner_leq(p + np.eye(4), p)


def test_backend_parity(rng):
    if len(_backend.available()) < 2:
        pytest.skip("compiled backend not built")
    for n in (1, 2, 7, 16, 33):
        a = rng.standard_normal((n, n))
        x = a + a.T
        results = {}
        for name in _backend.available():
            with _backend.use_backend(name):
                results[name] = linalg.sym_eig(x)
        ref = results["python"]
        for eig in results.values():
            assert np.allclose(eig.eigenvalues, ref.eigenvalues, atol=1e-11 * np.linalg.norm(x))
            assert np.allclose(eig.reconstruct(), x, atol=1e-11 * np.linalg.norm(x))


def test_each_backend_decomposes(backend, rng):
    a = rng.standard_normal((9, 9))
    x = a + a.T
    eig = linalg.sym_eig(x)
    assert np.allclose(eig.eigenvalues, np.linalg.eigvalsh(x)[::-1], atol=1e-11)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        _backend.set_backend("fortran")


def test_matmul_examples(rng):
    x = rng.standard_normal((3, 3))
    assert np.array_equal(linalg.matmul(np.eye(3), x), x)
    assert np.array_equal(linalg.matmul(np.diag([2.0, 3.0]), np.diag([5.0, 7.0])), np.diag([10.0, 21.0]))
    a, b = rng.standard_normal((4, 3)), rng.standard_normal((3, 5))
    naive = np.array([[sum(a[i, k] * b[k, j] for k in range(3)) for j in range(5)] for i in range(4)])
    assert np.allclose(linalg.matmul(a, b), naive, atol=1e-12)


def test_sym_eig_examples(rng):
    eig = linalg.sym_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(eig.eigenvalues, [3.0, 2.0, 1.0], atol=1e-15)
    assert np.allclose(np.abs(eig.eigenvectors), np.eye(3)[:, [0, 2, 1]])
    assert np.allclose(linalg.sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]])).eigenvalues, [3.0, 1.0], atol=1e-14)
    a = rng.standard_normal((16, 16))
    x = a + a.T
    assert np.linalg.norm(linalg.sym_eig(x).reconstruct() - x) <= 1e-10 * np.linalg.norm(x)


def test_svd_examples(rng):
    s = linalg.svd(np.array([[0.0, 2.0], [1.0, 0.0]]))
    assert np.allclose(s.s, [2.0, 1.0], atol=1e-14)
    assert np.allclose(s.polar(), [[0.0, 1.0], [1.0, 0.0]], atol=1e-14)
    u, v = rng.standard_normal(5), rng.standard_normal(4)
    assert linalg.svd(np.outer(u, v)).rank == 1
    x = rng.standard_normal((8, 5))
    assert np.linalg.norm(linalg.svd(x).reconstruct() - x) <= 1e-9 * np.linalg.norm(x)


def test_psd_power_examples(rng):
    assert np.allclose(linalg.psd_power(np.diag([4.0, 1.0]), -0.5), np.diag([0.5, 1.0]), atol=1e-15)
    for p in (-0.5, 0.25, 2.0):
        assert np.allclose(linalg.psd_power(np.eye(5), p), np.eye(5), atol=1e-15)
    a = rng.standard_normal((12, 12))
    x = a @ a.T
    root = linalg.psd_power(x, 0.5)
    assert np.linalg.norm(root @ root - x) <= 1e-9 * np.linalg.norm(x)


def test_norm_examples(rng):
    n = linalg.norms(np.diag([3.0, 4.0]))
    assert (n.frobenius, n.spectral, n.trace_norm, n.trace) == pytest.approx((5.0, 4.0, 7.0, 7.0), abs=1e-14)
    u, v = rng.standard_normal(4), rng.standard_normal(3)
    r1 = linalg.norms(np.outer(u / np.linalg.norm(u), v / np.linalg.norm(v)))
    assert (r1.trace_norm, r1.spectral, r1.frobenius) == pytest.approx((1.0, 1.0, 1.0), abs=1e-12)
    x = rng.standard_normal((6, 4))
    n = linalg.norms(x)
    assert n.trace_norm >= n.frobenius >= n.spectral
    assert n.trace_norm <= np.sqrt(4) * n.frobenius + 1e-12


def test_loewner_examples(rng):
    eye = np.eye(3)
    assert linalg.loewner_leq(eye, 2 * eye)
    assert not linalg.loewner_leq(2 * eye, eye)
    a = rng.standard_normal((3, 3))
    a = a @ a.T
    c = rng.standard_normal(3)
    assert linalg.loewner_leq(a, a + np.outer(c, c))
    with pytest.raises(ValueError):
        linalg.loewner_leq(eye, np.eye(2))
