"""Euler and Newton directions from one QR factorization per point.

Stacking the homogeneous extended Jacobian on the row ``[y*, 0, 0]`` gives
an ``N x (N+2)`` matrix ``J`` whose null space contains both
``[E, 1, 0]`` and ``[Nv, 0, 1]``.  With ``J^T = Q [R; 0]`` that null space
is spanned by the conjugates of the last two columns of ``Q``; normalizing
the trailing ``2 x 2`` block to the identity reads off ``E`` and ``Nv``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTangent, ShapeError, SingularJacobian
from .kernels import qr_arrays

DEGENERATE_DET = 1e-12
DIRECT_COND_LIMIT = 1e14

OK, FAIL_SINGULAR, FAIL_DEGENERATE = 0, 1, 2


@dataclass(frozen=True)
class BorderedJacobian:
    j: np.ndarray  # (N, N+2)

    @property
    def N(self) -> int:
        return self.j.shape[0]


@dataclass(frozen=True)
class DirectionPair:
    euler: np.ndarray
    newton: np.ndarray
    residual_euler: float
    residual_newton: float
    cond_signal: float


def _check_block(block: np.ndarray, y: np.ndarray):
    n, cols = block.shape[-2:]
    N = y.shape[-1]
    if cols != N + 2 or n != N - 1:
        raise ShapeError(f"extended Jacobian block {block.shape[-2:]} does not match "
                         f"{N} homogeneous coordinates")


def bordered_arrays(blocks: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``(p, N, N+2)`` stack of bordered Jacobians."""
    p, n, _ = blocks.shape
    N = n + 1
    J = np.zeros((p, N, N + 2), dtype=np.complex128)
    J[:, :n] = blocks
    J[:, n, :N] = y.conj()
    return J


def assemble_bordered(jac_block, y) -> BorderedJacobian:
    block = np.asarray(jac_block, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128).ravel()
    if block.ndim != 2:
        raise ShapeError(f"block must be 2-d, got shape {block.shape}")
    _check_block(block, y)
    return BorderedJacobian(bordered_arrays(block[None], y[None])[0])


def direction_arrays(J: np.ndarray, rank_tol: float | None = None, backend=None):
    """Unified directions for a ``(p, N, N+2)`` stack of bordered Jacobians.

    Returns ``(E, Nv, cond, fail)``; rows with ``fail != OK`` hold NaN.
    """
    p, N, _ = J.shape
    q, _, cond, bad = qr_arrays(J.transpose(0, 2, 1), rank_tol, backend)
    V = q[:, :, N:].conj().transpose(0, 2, 1)  # (p, 2, N+2), rows span null(J)
    T = V[:, :, N:]
    det = T[:, 0, 0] * T[:, 1, 1] - T[:, 0, 1] * T[:, 1, 0]
    fail = np.zeros(p, dtype=np.int8)
    fail[np.abs(det) < DEGENERATE_DET] = FAIL_DEGENERATE
    fail[bad >= 0] = FAIL_SINGULAR
    safe = np.where(fail == OK, det, 1.0)
    inv = np.empty_like(T)
    inv[:, 0, 0] = T[:, 1, 1]
    inv[:, 1, 1] = T[:, 0, 0]
    inv[:, 0, 1] = -T[:, 0, 1]
    inv[:, 1, 0] = -T[:, 1, 0]
    inv /= safe[:, None, None]
    W = np.einsum("pab,pbc->pac", inv, V[:, :, :N])
    E, Nv = W[:, 0].copy(), W[:, 1].copy()
    E[fail != OK] = np.nan
    Nv[fail != OK] = np.nan
    return E, Nv, cond, fail


def _residuals(J: np.ndarray, E: np.ndarray, Nv: np.ndarray):
    n = J.shape[0] - 1
    N = n + 1
    Hy, Ht, H = J[:n, :N], J[:n, N], J[:n, N + 1]
    return float(np.linalg.norm(Hy @ E + Ht)), float(np.linalg.norm(Hy @ Nv + H))


def euler_newton_unified(batch, rank_tol: float | None = None, backend=None) -> list:
    """Directions for each bordered Jacobian in ``batch``.

    One entry per input: a :class:`DirectionPair`, or a
    :class:`SingularJacobian` / :class:`DegenerateTangent` instance for that
    point.  Failures are isolated per element.
    """
    mats = [b.j if isinstance(b, BorderedJacobian) else np.asarray(b, dtype=np.complex128)
            for b in batch]
    if not mats:
        return []
    J = np.stack(mats)
    E, Nv, cond, fail = direction_arrays(J, rank_tol, backend)
    out = []
    for i in range(len(mats)):
        if fail[i] == FAIL_SINGULAR:
            out.append(SingularJacobian(i, "rank deficient bordered Jacobian"))
        elif fail[i] == FAIL_DEGENERATE:
            out.append(DegenerateTangent(i))
        else:
            re, rn = _residuals(J[i], E[i], Nv[i])
            out.append(DirectionPair(E[i], Nv[i], re, rn, float(cond[i])))
    return out


def euler_newton_direct(jac_block, y) -> DirectionPair:
    """Oracle: solve the two bordered ``N x N`` systems with partial pivoting."""
    block = np.asarray(jac_block, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128).ravel()
    _check_block(block, y)
    n = block.shape[0]
    N = n + 1
    A = np.vstack([block[:, :N], y.conj()[None, :]])
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > DIRECT_COND_LIMIT:
        raise SingularJacobian(detail=f"bordered matrix condition {cond:.2e}")
    rhs = np.zeros((N, 2), dtype=np.complex128)
    rhs[:n, 0] = -block[:, N]
    rhs[:n, 1] = -block[:, N + 1]
    sol = np.linalg.solve(A, rhs)
    E, Nv = sol[:, 0], sol[:, 1]
    J = bordered_arrays(block[None], y[None])[0]
    re, rn = _residuals(J, E, Nv)
    return DirectionPair(E, Nv, re, rn, float(1.0 / cond))


def affine_block(hom_block) -> np.ndarray:
    """Affine ``n x (n+2)`` extended Jacobian from a homogeneous block taken at ``y = (x, 1)``."""
    hom_block = np.asarray(hom_block)
    n = hom_block.shape[0]
    return np.hstack([hom_block[:, :n], hom_block[:, n + 1:]])


def affine_directions(aff_jac, x=None) -> tuple[np.ndarray, np.ndarray]:
    """Davidenko tangent and Newton step in affine coordinates.

    ``x`` is accepted for symmetry with the homogeneous call; the block
    already encodes the point.
    """
    aff_jac = np.asarray(aff_jac, dtype=np.complex128)
    n = aff_jac.shape[0]
    if aff_jac.shape != (n, n + 2):
        raise ShapeError(f"affine block must be n x (n+2), got {aff_jac.shape}")
    Hx = aff_jac[:, :n]
    cond = np.linalg.cond(Hx)
    if not np.isfinite(cond) or cond > DIRECT_COND_LIMIT:
        raise SingularJacobian(detail=f"affine Jacobian condition {cond:.2e}")
    sol = np.linalg.solve(Hx, -aff_jac[:, n:])
    return sol[:, 0], sol[:, 1]


def dehomogenize_tangent(y, E) -> np.ndarray:
    """Affine tangent ``d(y[:n]/y_h)/dtau`` of a homogeneous tangent ``E``."""
    y = np.asarray(y)
    E = np.asarray(E)
    yh, eh = y[-1], E[-1]
    return (E[:-1] * yh - y[:-1] * eh) / yh ** 2
