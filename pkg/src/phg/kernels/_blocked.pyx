# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the ``blocked`` backend."""

import numpy as np

from cython.parallel cimport prange
from libc.math cimport sqrt, exp, cos, sin
from libc.complex cimport cabs, conj
from scipy.linalg.cython_blas cimport zgemm

ctypedef double complex zc


cdef void _qr_one(zc* R, zc* Q, zc* V, double* betas, zc* w, Py_ssize_t M, Py_ssize_t K) noexcept nogil:
    # V holds the K reflector vectors, row j = v_j (entries j..M-1 used)
    cdef Py_ssize_t i, j, c
    cdef double normx, ax0, vv, beta
    cdef zc x0, phase, alpha, s, vc
    cdef zc* v
    for j in range(K):
        v = V + j * M
        normx = 0
        for i in range(j, M):
            normx = normx + R[i * K + j].real * R[i * K + j].real + R[i * K + j].imag * R[i * K + j].imag
        normx = sqrt(normx)
        x0 = R[j * K + j]
        ax0 = cabs(x0)
        if ax0 > 0:
            phase = x0 / ax0
        else:
            phase = 1
        alpha = -phase * normx
        for i in range(j, M):
            v[i] = R[i * K + j]
        v[j] = v[j] - alpha
        vv = 2.0 * normx * (normx + ax0)
        if vv > 0:
            beta = 2.0 / vv
        else:
            beta = 0.0
        betas[j] = beta
        for c in range(j + 1, K):
            w[c] = 0
        for i in range(j, M):
            vc = conj(v[i])
            for c in range(j + 1, K):
                w[c] = w[c] + vc * R[i * K + c]
        for i in range(j, M):
            s = beta * v[i]
            for c in range(j + 1, K):
                R[i * K + c] = R[i * K + c] - s * w[c]
        R[j * K + j] = alpha
        for i in range(j + 1, M):
            R[i * K + j] = 0
    for i in range(M * M):
        Q[i] = 0
    for i in range(M):
        Q[i * M + i] = 1
    for j in range(K - 1, -1, -1):
        v = V + j * M
        beta = betas[j]
        for c in range(j, M):
            w[c] = 0
        for i in range(j, M):
            vc = conj(v[i])
            for c in range(j, M):
                w[c] = w[c] + vc * Q[i * M + c]
        for i in range(j, M):
            s = beta * v[i]
            for c in range(j, M):
                Q[i * M + c] = Q[i * M + c] - s * w[c]


def householder_qr(a, double rank_tol):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t B = a.shape[0], M = a.shape[1], K = a.shape[2], b
    R = a.copy()
    Q = np.empty((B, M, M), dtype=np.complex128)
    V = np.empty((B, max(K * M, 1)), dtype=np.complex128)
    W = np.empty((B, max(M, 1)), dtype=np.complex128)
    T = np.empty((B, max(K, 1)), dtype=np.float64)
    cdef zc[:, :, ::1] Rv = R
    cdef zc[:, :, ::1] Qv = Q
    cdef zc[:, ::1] Vv = V
    cdef zc[:, ::1] Wv = W
    cdef double[:, ::1] Tv = T
    if B > 0 and M > 0 and K > 0:
        for b in prange(B, nogil=True, schedule="static"):
            _qr_one(&Rv[b, 0, 0], &Qv[b, 0, 0], &Vv[b, 0], &Tv[b, 0], &Wv[b, 0], M, K)
    elif B > 0 and M > 0:
        Q[:] = np.eye(M)
    r = np.triu(R[:, :K, :])
    diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
    colnorm = np.linalg.norm(a, axis=1)
    fail = diag <= rank_tol * colnorm
    bad = np.where(fail.any(axis=1), np.argmax(fail, axis=1), -1)
    mind = diag.min(axis=1) if K else np.full(B, np.inf)
    return Q, r, mind, bad


def gemm(a, b, Py_ssize_t block=256):
    """Row-blocked complex GEMM on top of BLAS ``zgemm``."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    cdef int p = a.shape[0], k = a.shape[1], q = b.shape[1]
    out = np.zeros((p, q), dtype=np.complex128)
    if p == 0 or q == 0 or k == 0:
        return out
    cdef const zc[:, ::1] av = a
    cdef const zc[:, ::1] bv = b
    cdef zc[:, ::1] cv = out
    cdef zc one = 1, zero = 0
    cdef int start = 0, rows, lda = k, ldb = q, ldc = q
    cdef char *tr = b"N"
    while start < p:
        rows = min(<int>block, p - start)
        # row-major C = A B  <=>  column-major C^T = B^T A^T
        zgemm(tr, tr, &q, &rows, &k, &one, <zc*>&bv[0, 0], &ldb, <zc*>&av[start, 0], &lda,
              &zero, &cv[start, 0], &ldc)
        start += rows
    return out


def monomials(zaug, a_hat):
    """``exp(zaug @ a_hat)`` for real ``a_hat`` without forming the product."""
    zaug = np.ascontiguousarray(zaug, dtype=np.complex128)
    at = np.ascontiguousarray(np.asarray(a_hat, dtype=np.float64).T)
    cdef Py_ssize_t p = zaug.shape[0], k = zaug.shape[1], m = at.shape[0], i, j, t
    out = np.empty((p, m), dtype=np.complex128)
    cdef const zc[:, ::1] zv = zaug
    cdef const double[:, ::1] av = at
    cdef zc[:, ::1] ov = out
    cdef double re, im, e
    for i in prange(p, nogil=True, schedule="static"):
        for j in range(m):
            re = 0
            im = 0
            for t in range(k):
                re = re + zv[i, t].real * av[j, t]
                im = im + zv[i, t].imag * av[j, t]
            e = exp(re)
            ov[i, j] = e * cos(im) + 1j * (e * sin(im))
    return out
