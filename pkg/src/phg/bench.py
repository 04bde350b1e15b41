"""Wall-clock benchmark of fixed Euler-Newton steps on growing point groups."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from .evaluation import PointBatch, default_batch_size
from .generators import random_torus_points
from .kernels import get_backend
from .system import HomotopyTables
from .tracker import Status, TrackOptions, _directions, _track_arrays, _unit

DEFAULT_POINT_COUNTS = (10, 50, 250, 500, 1000)
CSV_COLUMNS = ("points", "mean_seconds", "std_seconds", "per_point_us", "backend")
BENCH_TAU0 = -1.0
SETTLE_ITERS = 30
SETTLE_TOL = 1e-12


@dataclass
class BenchRow:
    points: int
    mean_seconds: float | None
    std_seconds: float | None
    backend: str
    failures: int = 0
    singular_paths: int = 0

    @property
    def per_point_us(self) -> float | None:
        return None if self.mean_seconds is None else self.mean_seconds / self.points * 1e6

    def csv_row(self) -> list:
        if self.mean_seconds is None:
            return [self.points, "-", "-", "-", self.backend]
        return [self.points, f"{self.mean_seconds:.6f}", f"{self.std_seconds:.6f}",
                f"{self.per_point_us:.3f}", self.backend]


def start_points(tables: HomotopyTables, p: int, seed: int, tau0: float, backend=None) -> np.ndarray:
    """Seeded near-unit-modulus points, Newton-settled onto the path at ``tau0`` (untimed)."""
    y = _unit(random_torus_points(p, tables.variable_count, seed=seed, radius=(0.9, 1.1)))
    tau = np.full(p, tau0)
    opts = TrackOptions(backend=backend)
    live = np.ones(p, dtype=bool)
    for _ in range(SETTLE_ITERS):
        idx = np.flatnonzero(live)
        if not len(idx):
            break
        _, Nv, _, fail = _directions(y[idx], tau[idx], tables, opts, get_backend(backend))
        ok = fail == 0
        y[idx[ok]] = _unit(y[idx[ok]] + Nv[ok])
        live[idx[~ok]] = False
        live[idx[ok]] = np.linalg.norm(Nv[ok], axis=1) > SETTLE_TOL
    return y


def run_protocol(y: np.ndarray, tables: HomotopyTables, tau0: float, steps: int = 100,
                 newton_iters: int = 1, batch_size: int | None = None, backend=None):
    """Time ``steps`` uniform Euler-Newton steps on all rows.

    Returns ``(seconds, failures, singular)``.  ``failures`` counts paths whose
    state overflowed or became non-finite; ``singular`` counts paths stopped
    at a singular Jacobian, which is a property of the path, not of the run.
    """
    opts = TrackOptions(tau0=tau0, fixed_step_mode=True, fixed_steps=steps,
                        newton_max_iters=newton_iters, skip_start_check=True,
                        batch_size=batch_size or default_batch_size(len(y)), backend=backend)
    t0 = time.perf_counter()
    y, _, status, _, _, _ = _track_arrays(y, np.full(len(y), tau0), 0.0, tables, opts)
    dt = time.perf_counter() - t0
    bad = ~np.isfinite(y).all(axis=1) | np.array([s is Status.OVERFLOWED for s in status], dtype=bool)
    singular = sum(s is Status.SINGULAR for s in status)
    return dt, int(bad.sum()), singular


def run_bench(tables: HomotopyTables, point_counts=DEFAULT_POINT_COUNTS, repetitions: int = 3,
              backend=None, seed: int = 0, tau0: float = BENCH_TAU0, steps: int = 100,
              newton_iters: int = 1, batch_size: int | None = None) -> list[BenchRow]:
    be = get_backend(backend)
    rows = []
    for p in point_counts:
        try:
            y = start_points(tables, p, seed, tau0, be)
            times, failures, singular = [], 0, 0
            for _ in range(repetitions):
                dt, f, s = run_protocol(y.copy(), tables, tau0, steps, newton_iters, batch_size, be)
                times.append(dt)
                failures, singular = max(failures, f), max(singular, s)
            rows.append(BenchRow(p, float(np.mean(times)), float(np.std(times)), be.name,
                                 failures, singular))
        except MemoryError:
            rows.append(BenchRow(p, None, None, be.name))
    return rows


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def start_batch(tables: HomotopyTables, p: int, seed: int = 0, tau0: float = BENCH_TAU0) -> PointBatch:
    return PointBatch(start_points(tables, p, seed, tau0), tau0)
