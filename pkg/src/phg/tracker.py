"""Lockstep Euler-Newton path tracking in homogeneous coordinates.

Every active path advances by its own step ``dtau`` each round: one
Euler prediction from the current point, then Newton corrections at the new
``tau``.  Points are kept on the unit sphere after each step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, asdict
from enum import Enum

import numpy as np

from . import directions as dirs
from . import evaluation as ev
from .errors import StartPointInvalid
from .evaluation import PointBatch, jacobian_arrays
from .kernels import get_backend
from .system import HomotopyTables

log = logging.getLogger(__name__)


class Status(str, Enum):
    CONVERGED = "Converged"
    SINGULAR = "SingularEncountered"
    STEP_UNDERFLOW = "StepUnderflow"
    MAX_STEPS = "MaxSteps"
    OVERFLOWED = "Overflowed"


# per-point failure codes inside one step
F_OK, F_ZERO, F_OVERFLOW, F_SINGULAR, F_DEGENERATE = 0, 1, 2, 3, 4
_FAIL_NAMES = {F_ZERO: "ZeroCoordinate", F_OVERFLOW: "MonomialOverflow",
               F_SINGULAR: "SingularJacobian", F_DEGENERATE: "DegenerateTangent"}


@dataclass
class TrackOptions:
    tau0: float = -20.0
    step_init: float = 0.05
    step_min: float = 1e-8
    step_max: float = 0.5
    newton_tol: float = 1e-10
    newton_max_iters: int = 4
    shrink: float = 0.5
    grow: float = 2.0
    grow_after: int = 3
    max_steps: int = 10000
    fixed_step_mode: bool = False
    fixed_steps: int = 100
    accept_tol: float = 1e-8
    start_tol: float = 1e-6
    skip_start_check: bool = False
    infinity_tol: float = 1e-10
    batch_size: int | None = None
    rank_tol: float | None = None
    backend: str | None = None

    def __post_init__(self):
        if not self.tau0 < 0:
            raise ValueError(f"tau0 must be negative, got {self.tau0}")
        if not self.step_min <= self.step_init <= self.step_max:
            raise ValueError("need step_min <= step_init <= step_max")
        if self.newton_max_iters < 0 or self.fixed_steps < 1:
            raise ValueError("newton_max_iters must be >= 0 and fixed_steps >= 1")

    @classmethod
    def benchmark_protocol(cls, **kw) -> "TrackOptions":
        """100 uniform steps, one Newton iteration each."""
        kw.setdefault("fixed_steps", 100)
        return cls(fixed_step_mode=True, newton_max_iters=1, skip_start_check=True, **kw)


@dataclass
class TrackResult:
    index: int
    status: Status
    y: np.ndarray
    tau: float
    x: np.ndarray | None
    at_infinity: bool
    residual: float
    steps_taken: int
    newton_iters_total: int
    start_y: np.ndarray = field(repr=False, default=None)
    start_tau: float = 0.0
    error: str | None = None

    def to_dict(self) -> dict:
        pairs = lambda v: None if v is None else [[float(c.real), float(c.imag)] for c in v]
        d = asdict(self)
        d.update(status=self.status.value, y=pairs(self.y), x=pairs(self.x),
                 start_y=pairs(self.start_y), residual=float(self.residual))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrackResult":
        arr = lambda v: None if v is None else np.array([complex(a, b) for a, b in v])
        return cls(index=d["index"], status=Status(d["status"]), y=arr(d["y"]), tau=d["tau"],
                   x=arr(d["x"]), at_infinity=d["at_infinity"], residual=d["residual"],
                   steps_taken=d["steps_taken"], newton_iters_total=d["newton_iters_total"],
                   start_y=arr(d["start_y"]), start_tau=d["start_tau"], error=d["error"])


@dataclass
class StepReport:
    """Per-point outcome of one Euler-Newton step."""

    newton_iters: np.ndarray
    newton_norm: np.ndarray   # final ||Nv|| / ||y||
    converged: np.ndarray     # corrector met newton_tol (vacuous with 0 iterations)
    fail_current: np.ndarray  # failure at the starting point (F_* codes)
    fail_trial: np.ndarray    # failure at a predicted/corrected point (F_* codes)


def _unit(y: np.ndarray) -> np.ndarray:
    return y / np.linalg.norm(y, axis=1, keepdims=True)


def _directions(y, tau, tables, opts, backend):
    blocks, efail = jacobian_arrays(y, tau, tables, backend, opts.batch_size)
    J = dirs.bordered_arrays(np.nan_to_num(blocks), y)
    E, Nv, _, dfail = dirs.direction_arrays(J, opts.rank_tol, backend)
    fail = np.zeros(len(y), dtype=np.int8)
    fail[dfail == dirs.FAIL_SINGULAR] = F_SINGULAR
    fail[dfail == dirs.FAIL_DEGENERATE] = F_DEGENERATE
    fail[efail == ev.FAIL_OVERFLOW] = F_OVERFLOW
    fail[efail == ev.FAIL_ZERO] = F_ZERO
    return E, Nv, blocks, fail


def _step(y, tau, dtau, tau_new, tables, opts, backend):
    """One Euler-Newton step for every row; ``tau_new`` is ``tau + dtau`` (clamped)."""
    p = len(y)
    E, _, _, fail_cur = _directions(y, tau, tables, opts, backend)
    ynew = y + dtau[:, None] * E
    iters = np.zeros(p, dtype=np.int64)
    nrm = np.full(p, np.nan)
    conv = np.zeros(p, dtype=bool) if opts.newton_max_iters else np.ones(p, dtype=bool)
    fail_trial = np.zeros(p, dtype=np.int8)
    live = fail_cur == F_OK
    for _ in range(opts.newton_max_iters):
        idx = np.flatnonzero(live & ~conv & (fail_trial == F_OK))
        if idx.size == 0:
            break
        _, Nv, _, f = _directions(ynew[idx], tau_new[idx], tables, opts, backend)
        bad = f != F_OK
        fail_trial[idx[bad]] = f[bad]
        good = idx[~bad]
        ynew[good] += Nv[~bad]
        iters[good] += 1
        nrm[good] = np.linalg.norm(Nv[~bad], axis=1) / np.linalg.norm(ynew[good], axis=1)
        conv[good] = nrm[good] <= opts.newton_tol
    ok = live & (fail_trial == F_OK)
    ynew[ok] = _unit(ynew[ok])
    return ynew, iters, StepReport(iters, nrm, conv, fail_cur, fail_trial)


def euler_newton_step(batch: PointBatch, tables: HomotopyTables, dtau, opts: TrackOptions | None = None):
    """Predict with the Euler direction over ``dtau``, then correct with Newton.

    Returns the updated batch and a :class:`StepReport`.  Points that fail
    keep their old coordinates and are flagged in the report; siblings are
    unaffected.
    """
    opts = opts or TrackOptions()
    dtau = np.broadcast_to(np.asarray(dtau, dtype=np.float64), (batch.p,)).copy()
    if np.any(dtau < 0) or np.any(batch.tau + dtau > 0):
        raise ValueError("need dtau >= 0 and tau + dtau <= 0")
    tau_new = np.where(dtau == -batch.tau, 0.0, batch.tau + dtau)
    ynew, _, rep = _step(batch.y.copy(), batch.tau, dtau, tau_new, tables, opts,
                         get_backend(opts.backend))
    ok = (rep.fail_current == F_OK) & (rep.fail_trial == F_OK)
    y = np.where(ok[:, None], ynew, batch.y)
    tau = np.where(ok, tau_new, batch.tau)
    return PointBatch(y, tau), rep


def start_residuals(batch: PointBatch, tables: HomotopyTables, backend=None) -> np.ndarray:
    blocks, fail = jacobian_arrays(_unit(batch.y), batch.tau, tables, backend)
    res = np.linalg.norm(blocks[:, :, -1], axis=1)
    res[fail != ev.OK] = np.inf
    return res


def _track_arrays(y0: np.ndarray, tau0: np.ndarray, target: float, tables: HomotopyTables,
                  opts: TrackOptions):
    """Track every row from ``tau0`` to ``target`` (either direction)."""
    backend = get_backend(opts.backend)
    p = len(y0)
    y = _unit(np.array(y0, dtype=np.complex128))
    tau = np.array(tau0, dtype=np.float64)
    span = np.abs(target - tau)
    if opts.fixed_step_mode:
        h = span / opts.fixed_steps
    else:
        h = np.minimum(np.full(p, opts.step_init), np.maximum(span, opts.step_min))
    succ = np.zeros(p, dtype=np.int64)
    steps = np.zeros(p, dtype=np.int64)
    attempts = np.zeros(p, dtype=np.int64)
    newton = np.zeros(p, dtype=np.int64)
    status: list[Status | None] = [None] * p
    error: list[str | None] = [None] * p
    active = tau != target
    while active.any():
        idx = np.flatnonzero(active)
        remaining = np.abs(target - tau[idx])
        if opts.fixed_step_mode:
            last = (steps[idx] + 1 >= opts.fixed_steps) | (h[idx] >= remaining)
        else:
            last = h[idx] >= remaining
        mag = np.where(last, remaining, h[idx])
        sign = np.sign(target - tau[idx])
        dtau = sign * mag
        tau_new = np.where(last, target, tau[idx] + dtau)
        ynew, iters, rep = _step(y[idx], tau[idx], dtau, tau_new, tables, opts, backend)
        newton[idx] += iters
        attempts[idx] += 1
        for r, i in enumerate(idx):
            fc, ft = rep.fail_current[r], rep.fail_trial[r]
            if fc != F_OK:
                status[i] = Status.OVERFLOWED if fc == F_OVERFLOW else Status.SINGULAR
                error[i] = _FAIL_NAMES[fc]
                active[i] = False
                continue
            if opts.fixed_step_mode:
                if ft != F_OK:
                    status[i] = Status.OVERFLOWED if ft == F_OVERFLOW else Status.SINGULAR
                    error[i] = _FAIL_NAMES[ft]
                    active[i] = False
                    continue
                accepted = True
            else:
                accepted = ft == F_OK and rep.converged[r]
            if accepted:
                y[i] = ynew[r]
                tau[i] = tau_new[r]
                steps[i] += 1
                if tau[i] == target:
                    active[i] = False
                    continue
                if not opts.fixed_step_mode:
                    succ[i] += 1
                    if succ[i] >= opts.grow_after:
                        h[i] = min(h[i] * opts.grow, opts.step_max)
                        succ[i] = 0
            else:
                succ[i] = 0
                h[i] *= opts.shrink
                if h[i] < opts.step_min:
                    status[i] = Status.STEP_UNDERFLOW
                    active[i] = False
                    continue
            if attempts[i] >= opts.max_steps:
                status[i] = Status.MAX_STEPS
                active[i] = False
    return y, tau, status, error, steps, newton


def _polish(y, tau, tables, opts, backend, rows):
    """Extra Newton iterations at fixed ``tau`` for the given rows."""
    extra = np.zeros(len(y), dtype=np.int64)
    for _ in range(max(opts.newton_max_iters, 1)):
        if rows.size == 0:
            break
        _, Nv, _, f = _directions(y[rows], tau[rows], tables, opts, backend)
        ok = f == F_OK
        y[rows[ok]] = _unit(y[rows[ok]] + Nv[ok])
        extra[rows[ok]] += 1
        rows = rows[ok]
    return extra


def _finish(y0, y, tau, status, error, steps, newton, target, tables, opts):
    backend = get_backend(opts.backend)
    n = tables.n
    blocks, fail = jacobian_arrays(y, tau, tables, backend)
    res = np.linalg.norm(blocks[:, :, -1], axis=1)
    res[fail != ev.OK] = np.inf
    if not opts.fixed_step_mode:
        redo = np.flatnonzero(np.array([s is None for s in status]) & (res > opts.accept_tol))
        if redo.size:
            newton += _polish(y, tau, tables, opts, backend, redo)
            blocks, fail = jacobian_arrays(y, tau, tables, backend)
            res = np.linalg.norm(blocks[:, :, -1], axis=1)
            res[fail != ev.OK] = np.inf
    results = []
    for i in range(len(y)):
        st, err = status[i], error[i]
        if st is None:
            if tau[i] == target and res[i] <= opts.accept_tol:
                st = Status.CONVERGED
            else:
                st = Status.MAX_STEPS if opts.fixed_step_mode else Status.SINGULAR
                err = "ResidualAboveTolerance"
        yi = y[i]
        yh = abs(yi[n])
        at_inf = not (yh >= opts.infinity_tol * np.linalg.norm(yi))
        x = None if at_inf else yi[:n] / yi[n]
        results.append(TrackResult(i, st, yi.copy(), float(tau[i]), x, bool(at_inf),
                                   float(res[i]), int(steps[i]), int(newton[i]),
                                   np.array(y0[i]), 0.0, err))
    return results


def track_batch(start: PointBatch, tables: HomotopyTables,
                opts: TrackOptions | None = None) -> list[TrackResult]:
    """Track every start point from its ``tau`` to 0.

    Raises :class:`StartPointInvalid` when a start point is off the path
    (unless ``opts.skip_start_check``); everything after that is reported
    per path through :class:`TrackResult.status`.
    """
    opts = opts or TrackOptions()
    if start.p == 0:
        return []
    if not opts.skip_start_check:
        res = start_residuals(start, tables, opts.backend)
        worst = int(np.argmax(res))
        if res[worst] > opts.start_tol:
            raise StartPointInvalid(worst, float(res[worst]), opts.start_tol)
    y0 = _unit(start.y)
    y, tau, status, error, steps, newton = _track_arrays(y0, start.tau, 0.0, tables, opts)
    results = _finish(y0, y, tau, status, error, steps, newton, 0.0, tables, opts)
    for r in results:
        r.start_tau = float(start.tau[r.index])
    counts = {s: sum(r.status is s for r in results) for s in Status}
    log.info("tracked %d paths: %s", len(results),
             ", ".join(f"{s.value}={c}" for s, c in counts.items() if c))
    return results


def chordal_distance(u, v) -> float:
    """Distance between the points of projective space represented by ``u`` and ``v``."""
    u = np.asarray(u) / np.linalg.norm(u)
    v = np.asarray(v) / np.linalg.norm(v)
    # sine of the angle between the lines, via the projection residual
    return float(np.linalg.norm(u - np.vdot(v, u) * v))


def retrace_check(result: TrackResult, tables: HomotopyTables,
                  opts: TrackOptions | None = None) -> float:
    """Track a converged path back to its start and measure the mismatch."""
    opts = opts or TrackOptions()
    if result.status is not Status.CONVERGED:
        raise ValueError(f"retrace needs a converged path, got {result.status.value}")
    if not result.start_tau < 0:
        raise ValueError("retrace needs a start tau < 0")
    y, tau, status, _, _, _ = _track_arrays(result.y[None], np.array([result.tau]),
                                            result.start_tau, tables, opts)
    if status[0] is not None or tau[0] != result.start_tau:
        return float("inf")
    return chordal_distance(y[0], result.start_y)
