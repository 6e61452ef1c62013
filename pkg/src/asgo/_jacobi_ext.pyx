# cython: language_level=3
"""Row-cyclic Jacobi eigensolver for dense symmetric matrices (compiled core)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef double _offdiag_norm(double[:, ::1] a, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j] * a[i, j]
    return sqrt(s)


def jacobi_eigh(double[:, ::1] x, double tol, int max_sweeps):
    """Diagonalize the symmetric matrix ``x`` in place of a private copy.

    Returns ``(diag, vecs, sweeps, off)`` where ``off`` is the Frobenius norm
    of the remaining off-diagonal part. Eigenvalues are unsorted.
    ``tol`` is absolute: iteration stops once ``off <= tol``.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a_arr = np.array(x, dtype=np.float64, copy=True, order="C")
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    cdef double apq, app, aqq, theta, t, c, s, akp, akq
    cdef double off = _offdiag_norm(a, n)
    cdef int sweep = 0

    with nogil:
        while off > tol and sweep < max_sweeps:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    app = a[p, p]
                    aqq = a[q, q]
                    theta = (aqq - app) / (2.0 * apq)
                    if theta >= 0.0:
                        t = 1.0 / (theta + sqrt(1.0 + theta * theta))
                    else:
                        t = -1.0 / (-theta + sqrt(1.0 + theta * theta))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    for k in range(n):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * akq
                        a[k, q] = s * akp + c * akq
                    for k in range(n):
                        akp = a[p, k]
                        akq = a[q, k]
                        a[p, k] = c * akp - s * akq
                        a[q, k] = s * akp + c * akq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for k in range(n):
                        akp = v[k, p]
                        akq = v[k, q]
                        v[k, p] = c * akp - s * akq
                        v[k, q] = s * akp + c * akq
            sweep += 1
            off = _offdiag_norm(a, n)

    return np.diag(a_arr).copy(), v_arr, sweep, off
