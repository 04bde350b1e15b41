"""``phg`` command-line front end: gen, eval, track and bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .errors import (DuplicateMonomial, EmptySupport, MonomialOverflow, ParseError, PhgError,
                     ShapeError, StartPointInvalid, UsageError, ZeroCoordinate)
from .evaluation import default_batch_size, eval_scalar_oracle, evaluate_batch
from .generators import gen_chandra, gen_cyclic, gen_random, random_torus_points, seed_on_path
from .io import dump_eval, dump_points, dump_track_results, parse_points
from .kernels import BACKEND_NAMES, get_backend
from .system import dump_system, homogenize, parse_system, tables_for
from .tracker import Status, TrackOptions, track_batch

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

DATA_ERRORS = (ParseError, ShapeError, DuplicateMonomial, EmptySupport, ZeroCoordinate,
               StartPointInvalid, FileNotFoundError, IsADirectoryError)

log = logging.getLogger("phg")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="phg", description="Batched polyhedral-homotopy evaluation and path tracking.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", type=Path, help="output file (default: stdout)")
        sp.add_argument("--backend", choices=BACKEND_NAMES, default=None,
                        help="kernel backend (default: $PHG_BACKEND or reference)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("-v", "--verbose", action="store_true")

    g = sub.add_parser("gen", help="write a benchmark or random system")
    g.add_argument("kind", choices=("cyclic", "chandra", "random"))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=None, help="number of monomials (random kind)")
    g.add_argument("--c", type=float, default=0.51, help="chandra parameter")
    g.add_argument("--num-points", type=int, default=0,
                   help="also write this many seeded start points")
    g.add_argument("--points-out", type=Path, default=None)
    g.add_argument("--tau0", type=float, default=None)
    common(g)

    e = sub.add_parser("eval", help="evaluate extended Jacobians at points")
    e.add_argument("--system", type=Path, required=True)
    e.add_argument("--points", type=Path, required=True)
    e.add_argument("--batch-size", type=int, default=None)
    e.add_argument("--check-oracle", action="store_true")
    common(e)

    t = sub.add_parser("track", help="track start points to tau = 0")
    t.add_argument("--system", type=Path, required=True)
    t.add_argument("--points", type=Path, required=True)
    t.add_argument("--batch-size", type=int, default=None)
    t.add_argument("--tau0", type=float, default=None, help="override the points file tau0")
    t.add_argument("--fixed-steps", type=int, default=None)
    t.add_argument("--newton-iters", type=int, default=None)
    t.add_argument("--skip-start-check", action="store_true")
    common(t)

    b = sub.add_parser("bench", help="time the fixed-step protocol on growing point groups")
    b.add_argument("--system", type=Path, required=True)
    b.add_argument("--batch-size", type=int, default=None)
    b.add_argument("--tau0", type=float, default=bench_mod.BENCH_TAU0)
    b.add_argument("--fixed-steps", type=int, default=100)
    b.add_argument("--newton-iters", type=int, default=1)
    b.add_argument("--repetitions", type=int, default=3)
    b.add_argument("--point-counts", type=lambda s: [int(v) for v in s.split(",")],
                   default=list(bench_mod.DEFAULT_POINT_COUNTS))
    common(b)
    return p


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _positive(name: str, v):
    if v is not None and v < 1:
        raise UsageError(f"{name} must be >= 1, got {v}")


def cmd_gen(a) -> int:
    if a.kind == "cyclic":
        system = gen_cyclic(a.n, seed=a.seed)
    elif a.kind == "chandra":
        system = gen_chandra(a.n, c=a.c, seed=a.seed)
    else:
        if a.m is None:
            raise UsageError("gen random needs --m")
        system = gen_random(a.n, a.m, seed=a.seed)
    points = None
    if a.num_points:
        if a.points_out is None:
            raise UsageError("--num-points needs --points-out")
        tau0 = a.tau0 if a.tau0 is not None else (-20.0 if a.kind == "random" else bench_mod.BENCH_TAU0)
        if a.kind == "random" and a.num_points < system.m:
            # Fit the coefficients so the seeded points lie exactly on the path.
            x0 = random_torus_points(a.num_points, system.n, seed=a.seed)
            system = seed_on_path(system, x0, tau0)
            points = dump_points(x0, tau0)
        else:
            y = bench_mod.start_points(tables_for(system), a.num_points, a.seed, tau0, a.backend)
            points = dump_points(y, tau0)
    _emit(dump_system(system), a.out)
    if points is not None:
        a.points_out.write_text(points, encoding="utf-8")
    summary = f"m={system.m} N={system.n + 1}\n"
    (sys.stdout if a.out is not None else sys.stderr).write(summary)
    return EXIT_OK


def _load(a):
    system = parse_system(a.system.read_text(encoding="utf-8"))
    points = parse_points(a.points.read_text(encoding="utf-8"), system.n)
    return system, points


def cmd_eval(a) -> int:
    _positive("--batch-size", a.batch_size)
    system, points = _load(a)
    tables = tables_for(system)
    if points.p == 0:
        _emit(json.dumps({"coords": "homogeneous", "n": system.n, "N": system.n + 1,
                          "blocks": [], "oracle_max_rel_dev": None}), a.out)
        return EXIT_OK
    try:
        jac = evaluate_batch(points, tables, a.batch_size, a.backend)
    except MonomialOverflow as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC
    dev = None
    if a.check_oracle:
        hsys = homogenize(system)
        dev = 0.0
        for i in range(points.p):
            ref = eval_scalar_oracle(points.y[i], points.tau[i], hsys)
            dev = max(dev, float(np.linalg.norm(jac.block(i) - ref) / max(np.linalg.norm(ref), 1e-300)))
        sys.stderr.write(f"oracle max relative deviation: {dev:.3e}\n")
    _emit(dump_eval(jac, dev), a.out)
    return EXIT_OK


def cmd_track(a) -> int:
    _positive("--batch-size", a.batch_size)
    _positive("--fixed-steps", a.fixed_steps)
    _positive("--newton-iters", a.newton_iters)
    system, points = _load(a)
    if a.tau0 is not None:
        points = type(points)(points.y, a.tau0)
    kw = dict(skip_start_check=a.skip_start_check, backend=a.backend,
              batch_size=a.batch_size or default_batch_size(max(points.p, 1)))
    if a.fixed_steps is not None:
        kw.update(fixed_step_mode=True, fixed_steps=a.fixed_steps)
    if a.newton_iters is not None:
        kw["newton_max_iters"] = a.newton_iters
    opts = TrackOptions(**kw)
    t0 = time.perf_counter()
    results = track_batch(points, tables_for(system), opts)
    wall = time.perf_counter() - t0
    _emit(dump_track_results(results), a.out)
    counts = Counter(r.status.value for r in results)
    parts = [f"{len(results)} paths"] + [f"{k}={v}" for k, v in sorted(counts.items())]
    summary = ", ".join(parts) + f"; wall time {wall:.3f} s\n"
    (sys.stdout if a.out is not None else sys.stderr).write(summary)
    failed = sum(r.status in (Status.SINGULAR, Status.OVERFLOWED) for r in results)
    return EXIT_NUMERIC if results and failed == len(results) else EXIT_OK


def cmd_bench(a) -> int:
    _positive("--batch-size", a.batch_size)
    _positive("--repetitions", a.repetitions)
    _positive("--fixed-steps", a.fixed_steps)
    _positive("--newton-iters", a.newton_iters)
    for c in a.point_counts:
        _positive("point count", c)
    system = parse_system(a.system.read_text(encoding="utf-8"))
    rows = bench_mod.run_bench(tables_for(system), a.point_counts, a.repetitions, a.backend,
                               a.seed, a.tau0, a.fixed_steps, a.newton_iters, a.batch_size)
    _emit(bench_mod.rows_to_csv(rows), a.out)
    failures = sum(r.failures for r in rows)
    singular = sum(r.singular_paths for r in rows)
    if failures:
        sys.stderr.write(f"warning: {failures} paths overflowed during the protocol\n")
    if singular:
        sys.stderr.write(f"note: {singular} paths stopped at a singular Jacobian\n")
    done = [r for r in rows if r.mean_seconds is not None]
    if done and all(r.failures == r.points for r in done):
        return EXIT_NUMERIC
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "eval": cmd_eval, "track": cmd_track, "bench": cmd_bench}


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        get_backend(a.backend)
        return COMMANDS[a.command](a)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DATA
    except PhgError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
