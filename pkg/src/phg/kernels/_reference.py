"""Plain numpy kernels; the oracle every other backend is checked against."""

from __future__ import annotations

import numpy as np


def gemm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.matmul(a, b)


def exp(a: np.ndarray) -> np.ndarray:
    return np.exp(a)


def monomials(zaug: np.ndarray, a_hat: np.ndarray) -> np.ndarray:
    return np.exp(np.matmul(zaug, a_hat.astype(np.complex128)))


def householder_qr(a: np.ndarray, rank_tol: float):
    """Householder QR of a stack of ``(M, K)`` matrices, ``M >= K``.

    Returns ``(q, r, min_abs_diag, bad)`` where ``q`` is ``(B, M, M)``
    unitary, ``r`` is ``(B, K, K)`` upper triangular and ``bad[b]`` is the
    first column whose diagonal fails the rank test (``-1`` if none).

    All arithmetic is per matrix (stacked ``matmul`` and elementwise
    broadcasting), so each result is bitwise independent of which other
    matrices share the call.
    """
    a = np.asarray(a, dtype=np.complex128)
    B, M, K = a.shape
    R = a.copy()
    colnorm = np.sqrt(np.sum(a.real ** 2 + a.imag ** 2, axis=1))  # (B, K)
    vs, betas = [], []
    for j in range(K):
        x = R[:, j:, j]
        normx = np.sqrt(np.sum(x.real ** 2 + x.imag ** 2, axis=1))
        x0 = x[:, 0]
        ax0 = np.abs(x0)
        phase = np.where(ax0 > 0, x0 / np.where(ax0 > 0, ax0, 1.0), 1.0)
        alpha = -phase * normx
        v = x.copy()
        v[:, 0] -= alpha
        vv = 2.0 * normx * (normx + ax0)
        beta = np.where(vv > 0, 2.0 / np.where(vv > 0, vv, 1.0), 0.0)
        if j + 1 < K:
            sub = R[:, j:, j + 1:]
            w = np.matmul(v.conj()[:, None, :], sub)
            sub -= (beta[:, None, None] * v[:, :, None]) * w
        R[:, j, j] = alpha
        R[:, j + 1:, j] = 0.0
        vs.append(v)
        betas.append(beta)
    # Q = H_0 H_1 ... H_{K-1} I, applied right to left so step j only
    # touches the trailing (M-j) x (M-j) block
    Q = np.broadcast_to(np.eye(M, dtype=np.complex128), (B, M, M)).copy()
    for j in range(K - 1, -1, -1):
        v, beta = vs[j], betas[j]
        blk = Q[:, j:, j:]
        w = np.matmul(v.conj()[:, None, :], blk)
        blk -= (beta[:, None, None] * v[:, :, None]) * w
    r = np.triu(R[:, :K, :])
    diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
    bad = _first_bad(diag, colnorm, rank_tol)
    return Q, r, diag.min(axis=1) if K else np.full(B, np.inf), bad


def _first_bad(diag: np.ndarray, colnorm: np.ndarray, rank_tol: float) -> np.ndarray:
    fail = diag <= rank_tol * colnorm
    return np.where(fail.any(axis=1), np.argmax(fail, axis=1), -1)
