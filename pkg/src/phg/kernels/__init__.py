"""Dense complex kernels behind a swappable backend.

Backends:

``reference``
    numpy, straightforward; the oracle for the others.
``blocked``
    compiled Cython core (``_blocked``) when it was built, otherwise the
    pure-Python ``_fallback`` with the same blocking.  ``HAVE_COMPILED``
    tells which one was picked at import.
``external``
    LAPACK ``geqrf``/``ungqr`` through ``numpy.linalg.qr`` for the QR.

Matrices are C-contiguous ``complex128`` numpy arrays (row-major); a batch
of matrices is a 3-d array with the batch index first.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import RankDeficient, ShapeError, UsageError
from . import _fallback, _reference

try:
    from . import _blocked as _compiled
    HAVE_COMPILED = True
except ImportError:  # extension not built
    _compiled = None
    HAVE_COMPILED = False

BACKEND_ENV = "PHG_BACKEND"


def default_rank_tol(rows: int) -> float:
    return 1e-12 * rows


def _external_qr(a, rank_tol):
    a = np.asarray(a, dtype=np.complex128)
    B, M, K = a.shape
    q, r_full = np.linalg.qr(a, mode="complete")
    r = np.triu(r_full[:, :K, :])
    diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
    bad = _reference._first_bad(diag, np.linalg.norm(a, axis=1), rank_tol)
    return q, r, diag.min(axis=1) if K else np.full(B, np.inf), bad


@dataclass(frozen=True)
class Backend:
    name: str
    gemm: Callable
    exp: Callable
    qr: Callable
    monomials: Callable
    compiled: bool = False


_BACKENDS = {
    "reference": Backend("reference", _reference.gemm, _reference.exp,
                         _reference.householder_qr, _reference.monomials),
    "blocked": (Backend("blocked", _compiled.gemm, np.exp, _compiled.householder_qr,
                        _compiled.monomials, compiled=True)
                if HAVE_COMPILED else
                Backend("blocked", _fallback.gemm, np.exp, _fallback.householder_qr,
                        _fallback.monomials)),
    "external": Backend("external", np.matmul, np.exp, _external_qr, _reference.monomials),
}

FALLBACK_BLOCKED = Backend("blocked-fallback", _fallback.gemm, np.exp,
                           _fallback.householder_qr, _fallback.monomials)

BACKEND_NAMES = tuple(_BACKENDS)


def get_backend(backend: "str | Backend | None" = None) -> Backend:
    """Resolve a backend by name; ``None`` reads ``$PHG_BACKEND`` (default reference)."""
    if isinstance(backend, Backend):
        return backend
    name = backend or os.environ.get(BACKEND_ENV) or "reference"
    if name == FALLBACK_BLOCKED.name:
        return FALLBACK_BLOCKED
    try:
        return _BACKENDS[name]
    except KeyError:
        raise UsageError(f"unknown backend {name!r}; choose from {', '.join(BACKEND_NAMES)}") from None


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-d, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class QrFactor:
    """``input = q @ [[r], [0]]`` with ``q`` unitary and ``r`` upper triangular."""

    q: np.ndarray
    r: np.ndarray
    min_abs_diag: float


def gemm(a, b, backend=None) -> np.ndarray:
    a = as_complex_matrix(a, "a")
    b = as_complex_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"gemm inner dimensions differ: {a.shape} x {b.shape}")
    return get_backend(backend).gemm(a, b)


def elementwise_exp(a, backend=None) -> np.ndarray:
    return get_backend(backend).exp(as_complex_matrix(a))


def qr_arrays(stack: np.ndarray, rank_tol: float | None = None, backend=None):
    """Array-level batched QR: ``(q, r, min_abs_diag, bad_column)``."""
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    if stack.ndim != 3:
        raise ShapeError(f"batch must be 3-d, got shape {stack.shape}")
    B, M, K = stack.shape
    if M < K:
        raise ShapeError(f"QR needs rows >= cols, got {M}x{K}")
    if rank_tol is None:
        rank_tol = default_rank_tol(M)
    return get_backend(backend).qr(stack, rank_tol)


def batched_qr(batch, rank_tol: float | None = None, backend=None) -> list:
    """Householder QR of each matrix in ``batch``.

    Returns one entry per input, in order: a :class:`QrFactor`, or a
    :class:`~phg.errors.RankDeficient` instance for elements whose diagonal
    fails the rank test.  Failures never affect other elements.
    """
    mats = [as_complex_matrix(x) for x in batch]
    if not mats:
        return []
    shapes = {x.shape for x in mats}
    if len(shapes) != 1:
        raise ShapeError(f"batch mixes shapes {sorted(shapes)}")
    q, r, mind, bad = qr_arrays(np.stack(mats), rank_tol, backend)
    return [RankDeficient(int(bad[i]), index=i) if bad[i] >= 0
            else QrFactor(q[i], r[i], float(mind[i])) for i in range(len(mats))]
