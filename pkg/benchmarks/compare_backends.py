"""Compare the compiled blocked kernels with the pure-Python fallback and numpy reference.

Times the three hot kernels (monomial exponentials, the coefficient GEMM and
the batched QR) on cyclic-14 tables, then the full fixed-step protocol.

    python3 benchmarks/compare_backends.py [--points 1000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from phg.bench import run_protocol, start_points
from phg.directions import bordered_arrays
from phg.evaluation import jacobian_arrays
from phg.generators import gen_cyclic
from phg.kernels import FALLBACK_BLOCKED, HAVE_COMPILED, get_backend
from phg.system import tables_for


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--steps", type=int, default=10)
    a = ap.parse_args()

    tables = tables_for(gen_cyclic(14))
    y = start_points(tables, a.points, 0, -1.0)
    p, N = y.shape
    zaug = np.hstack([np.log(y), np.full((p, 1), -1.0 + 0j)])
    blocks, _ = jacobian_arrays(y, np.full(p, -1.0), tables)
    JT = bordered_arrays(blocks, y).transpose(0, 2, 1).copy()

    backends = [get_backend("reference"), FALLBACK_BLOCKED, get_backend("external")]
    if HAVE_COMPILED:
        backends.insert(1, get_backend("blocked"))
    print(f"cyclic-14: p={p}, m={tables.monomial_count}, N={N}, compiled={HAVE_COMPILED}")
    print(f"{'backend':18s} {'exp':>9s} {'gemm':>9s} {'qr':>9s} {'protocol':>10s}")
    for be in backends:
        mono = be.monomials(zaug, tables.A_hat)
        t_exp = best_of(lambda: be.monomials(zaug, tables.A_hat), a.repeat)
        t_gemm = best_of(lambda: be.gemm(mono, tables.B_cat), a.repeat)
        t_qr = best_of(lambda: be.qr(JT, 1e-12 * (N + 2)), a.repeat)
        t_run, _, _ = run_protocol(y.copy(), tables, -1.0, a.steps, 1, None, be)
        print(f"{be.name:18s} {t_exp:9.4f} {t_gemm:9.4f} {t_qr:9.4f} {t_run:10.3f}")
    print(f"(seconds; protocol = {a.steps} fixed Euler-Newton steps)")


if __name__ == "__main__":
    main()
