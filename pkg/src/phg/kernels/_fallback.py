"""Pure-Python stand-in for the compiled ``blocked`` kernels.

Used when ``_blocked`` was not built.  Same blocking structure, numpy inside
each block.
"""

from __future__ import annotations

import numpy as np

from . import _reference

QR_BLOCK = 64


def householder_qr(a, rank_tol: float):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    B, M, K = a.shape
    if B <= QR_BLOCK:
        return _reference.householder_qr(a, rank_tol)
    parts = [_reference.householder_qr(a[s:s + QR_BLOCK], rank_tol)
             for s in range(0, B, QR_BLOCK)]
    return tuple(np.concatenate(xs) for xs in zip(*parts))


def gemm(a, b, block: int = 256):
    a = np.asarray(a, dtype=np.complex128)
    out = np.empty((a.shape[0], b.shape[1]), dtype=np.complex128)
    for s in range(0, a.shape[0], block):
        np.matmul(a[s:s + block], b, out=out[s:s + block])
    return out


def monomials(zaug, a_hat):
    a_hat = np.asarray(a_hat, dtype=np.float64)
    # real exponent matrix: two real products instead of one complex one
    re = zaug.real @ a_hat
    im = zaug.imag @ a_hat
    return np.exp(re) * (np.cos(im) + 1j * np.sin(im))
