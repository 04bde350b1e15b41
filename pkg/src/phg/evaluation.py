"""Batched evaluation of the homotopy and all its partial derivatives.

For points stacked as rows of ``Z_aug = [log(Y) | tau]`` the extended
Jacobians of every point come out of two matrix products::

    vec rows = exp(Z_aug @ A_hat) @ [B_1^T ... B_n^T]

Per point, block ``k`` (one row per equation) is laid out as
``[dh_k/dz_0 .. dh_k/dz_{N-1}, dh_k/dtau, h_k]``.  Scaling the first ``N``
columns by ``exp(-z)`` turns log-coordinate derivatives into derivatives
with respect to the homogeneous coordinates ``y``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import MonomialOverflow, ShapeError, ZeroCoordinate
from .kernels import get_backend
from .system import HomogenizedSystem, HomotopyTables, _ipow

LOG = "log"
HOMOGENEOUS = "homogeneous"

OK, FAIL_ZERO, FAIL_OVERFLOW = 0, 1, 2


@dataclass
class PointBatch:
    """``p`` points in homogeneous coordinates with their path parameters."""

    y: np.ndarray
    tau: np.ndarray
    z: np.ndarray | None = None

    def __post_init__(self):
        self.y = np.ascontiguousarray(np.atleast_2d(self.y), dtype=np.complex128)
        self.tau = np.ascontiguousarray(np.broadcast_to(
            np.asarray(self.tau, dtype=np.float64), (self.y.shape[0],)))
        if np.any(self.tau > 0):
            raise ValueError("tau must be <= 0")

    @property
    def p(self) -> int:
        return self.y.shape[0]

    @property
    def N(self) -> int:
        return self.y.shape[1]

    @property
    def z_valid(self) -> bool:
        return self.z is not None

    @classmethod
    def from_affine(cls, x, tau) -> "PointBatch":
        x = np.atleast_2d(np.asarray(x, dtype=np.complex128))
        return cls(np.hstack([x, np.ones((x.shape[0], 1))]), tau)

    def subset(self, idx) -> "PointBatch":
        return PointBatch(self.y[idx], self.tau[idx], None if self.z is None else self.z[idx])


@dataclass
class ExtendedJacobianBatch:
    coords: str
    data: np.ndarray  # (p, n*(N+2))
    n: int

    @property
    def N(self) -> int:
        return self.data.shape[1] // self.n - 2

    @property
    def p(self) -> int:
        return self.data.shape[0]

    @property
    def blocks(self) -> np.ndarray:
        """``(p, n, N+2)`` view, one extended Jacobian per point."""
        return self.data.reshape(self.p, self.n, self.N + 2)

    def block(self, i: int) -> np.ndarray:
        return self.blocks[i]


def _principal_log(y: np.ndarray) -> np.ndarray:
    z = np.log(y)
    # log(-1 - 0j) comes back as -i*pi; keep the imaginary part in (-pi, pi]
    z.imag[z.imag == -np.pi] = np.pi
    return z


def to_log_coords(batch: PointBatch) -> PointBatch:
    zero = batch.y == 0
    if zero.any():
        i, j = np.argwhere(zero)[0]
        raise ZeroCoordinate(int(i), int(j))
    return PointBatch(batch.y, batch.tau, _principal_log(batch.y))


def _check_tables(N: int, tables: HomotopyTables):
    if N != tables.variable_count:
        raise ShapeError(f"points have {N} coordinates, tables expect {tables.variable_count}")


def _log_jacobian_data(z: np.ndarray, tau: np.ndarray, tables: HomotopyTables, backend):
    zaug = np.hstack([z, tau[:, None].astype(np.complex128)])
    # overflow is detected below and reported per point, so numpy's warnings are noise
    with np.errstate(over="ignore", invalid="ignore"):
        mono = backend.monomials(zaug, tables.A_hat)
        finite = np.isfinite(mono).all(axis=1)
        return backend.gemm(mono, tables.B_cat), finite


def eval_extended_jacobian_log(batch: PointBatch, tables: HomotopyTables,
                               backend=None) -> ExtendedJacobianBatch:
    if not batch.z_valid:
        raise ValueError("batch has no log coordinates; call to_log_coords first")
    _check_tables(batch.N, tables)
    data, finite = _log_jacobian_data(batch.z, batch.tau, tables, get_backend(backend))
    if not finite.all():
        raise MonomialOverflow(int(np.flatnonzero(~finite)[0]))
    return ExtendedJacobianBatch(LOG, data, tables.n)


def _rescale(data: np.ndarray, z: np.ndarray, n: int) -> np.ndarray:
    p, N = z.shape
    out = data.reshape(p, n, N + 2).copy()
    out[:, :, :N] *= np.exp(-z)[:, None, :]
    return out.reshape(p, -1)


def rescale_to_homogeneous(jac: ExtendedJacobianBatch, batch: PointBatch) -> ExtendedJacobianBatch:
    if jac.coords != LOG:
        raise ValueError(f"expected log-coordinate Jacobian, got {jac.coords}")
    if not batch.z_valid:
        batch = to_log_coords(batch)
    if batch.z.shape != (jac.p, jac.N):
        raise ShapeError(f"Jacobian is for {jac.p} points x {jac.N} coordinates, "
                         f"batch has shape {batch.z.shape}")
    return ExtendedJacobianBatch(HOMOGENEOUS, _rescale(jac.data, batch.z, jac.n), jac.n)


def jacobian_arrays(y: np.ndarray, tau: np.ndarray, tables: HomotopyTables, backend=None,
                    batch_size: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Masked homogeneous evaluation used by the tracker.

    Returns ``(blocks, fail)`` with ``blocks`` shaped ``(p, n, N+2)`` and
    ``fail[i]`` one of ``OK``, ``FAIL_ZERO``, ``FAIL_OVERFLOW``.  Failed
    points get NaN blocks and never disturb the others.
    """
    backend = get_backend(backend)
    y = np.asarray(y, dtype=np.complex128)
    p, N = y.shape
    _check_tables(N, tables)
    n = tables.n
    fail = np.zeros(p, dtype=np.int8)
    zero = (y == 0).any(axis=1)
    fail[zero] = FAIL_ZERO
    ysafe = np.where(zero[:, None], 1.0, y)
    z = _principal_log(ysafe)
    data = np.empty((p, n * (N + 2)), dtype=np.complex128)
    b = p if not batch_size else max(1, batch_size)
    for s in range(0, p, b):
        part, finite = _log_jacobian_data(z[s:s + b], tau[s:s + b], tables, backend)
        fail[s:s + b][~finite & (fail[s:s + b] == OK)] = FAIL_OVERFLOW
        data[s:s + b] = _rescale(part, z[s:s + b], n)
    blocks = data.reshape(p, n, N + 2)
    blocks[fail != OK] = np.nan
    return blocks, fail


def default_batch_size(p: int) -> int:
    return max(1, math.ceil(p / 4))


def evaluate_batch(points: PointBatch, tables: HomotopyTables, batch_size: int | None = None,
                   backend=None, workers: int = 1) -> ExtendedJacobianBatch:
    """Homogeneous extended Jacobians of all points, ``ceil(p/b)`` sub-batches at a time.

    Sub-batches are independent; with ``workers > 1`` they run on a thread
    pool and write disjoint slices of the output, so the result equals the
    serial one.  Errors carry the index of the sub-batch they came from.
    """
    backend = get_backend(backend)
    p = points.p
    _check_tables(points.N, tables)
    b = default_batch_size(p) if batch_size is None else batch_size
    if b < 1:
        raise ValueError(f"batch size must be positive, got {b}")
    b = min(b, max(p, 1))
    n, N = tables.n, points.N
    out = np.empty((p, n * (N + 2)), dtype=np.complex128)

    def run(k: int):
        s = k * b
        sub = points.subset(slice(s, s + b))
        try:
            sub = to_log_coords(sub)
            jac = rescale_to_homogeneous(eval_extended_jacobian_log(sub, tables, backend), sub)
        except ZeroCoordinate as exc:
            raise ZeroCoordinate(s + exc.point, exc.coordinate, sub_batch=k) from None
        except MonomialOverflow as exc:
            raise MonomialOverflow(s + exc.point, sub_batch=k) from None
        out[s:s + b] = jac.data

    count = math.ceil(p / b) if p else 0
    if workers > 1 and count > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, range(count)))
    else:
        for k in range(count):
            run(k)
    return ExtendedJacobianBatch(HOMOGENEOUS, out, n)


def eval_scalar_oracle(y, tau: float, hsys: HomogenizedSystem) -> np.ndarray:
    """Extended Jacobian at one point by direct monomial expansion.

    No logarithms, no matrix products: each monomial and each of its
    partial derivatives is built by repeated multiplication.
    """
    y = [complex(v) for v in np.asarray(y).ravel()]
    N = hsys.N
    if len(y) != N:
        raise ShapeError(f"point has {len(y)} coordinates, expected {N}")
    for j, v in enumerate(y):
        if v == 0 and np.any(hsys.hom_support[:, j] < 0):
            raise ZeroCoordinate(0, j)
    C = hsys.base.coefficients
    omega = hsys.base.lifting_values
    out = np.zeros((hsys.n, N + 2), dtype=np.complex128)
    for i, a in enumerate(hsys.hom_support.tolist()):
        et = math.exp(tau * omega[i])
        mono = 1.0 + 0.0j
        for v, e in zip(y, a):
            mono *= _ipow(v, e)
        row = np.empty(N + 2, dtype=np.complex128)
        for j in range(N):
            if a[j] == 0:
                row[j] = 0.0
                continue
            d = float(a[j])
            for jj, (v, e) in enumerate(zip(y, a)):
                d *= _ipow(v, e - 1 if jj == j else e)
            row[j] = d * et
        row[N] = omega[i] * mono * et
        row[N + 1] = mono * et
        out += C[:, i, None] * row[None, :]
    return out
