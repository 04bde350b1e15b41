"""Benchmark and random systems, lifting values, on-path start seeding."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .system import LaurentSystem, monomial_key, unmix


def random_lifting(m: int, seed: int = 0) -> tuple[Fraction, ...]:
    """Seeded rationals ``k / 1000`` with ``k`` uniform in ``[1, 1000]``."""
    rng = np.random.default_rng(seed)
    return tuple(Fraction(int(k), 1000) for k in rng.integers(1, 1001, size=m))


def _relift(system: LaurentSystem, lifting, seed: int) -> LaurentSystem:
    if lifting is None:
        lifting = random_lifting(system.m, seed)
    return system.with_lifting(lifting)


def cyclic_equations(n: int):
    """Per-equation supports and coefficients of cyclic-n (mixed form)."""
    supports, coeffs = [], []
    for k in range(1, n):
        terms = []
        for i in range(n):
            a = [0] * n
            for j in range(k):
                a[(i + j) % n] += 1
            terms.append(tuple(a))
        supports.append(terms)
        coeffs.append([1.0] * n)
    supports.append([(1,) * n, (0,) * n])
    coeffs.append([1.0, -1.0])
    return supports, coeffs


def gen_cyclic(n: int, seed: int = 0, lifting=None) -> LaurentSystem:
    if n < 3:
        raise ValueError(f"cyclic-n needs n >= 3, got {n}")
    return _relift(unmix(*cyclic_equations(n)), lifting, seed)


def chandra_equations(n: int, c: float):
    supports, coeffs = [], []
    for k in range(1, n + 1):
        unit = [0] * n
        unit[k - 1] = 1
        terms, vals = [tuple(unit), (0,) * n], [2.0 * n, -2.0 * n]
        for j in range(1, n):
            a = list(unit)
            a[j - 1] += 1
            terms.append(tuple(a))
            vals.append(-c * k / (k + j))
        supports.append(terms)
        coeffs.append(vals)
    return supports, coeffs


def gen_chandra(n: int, c: float = 0.51, seed: int = 0, lifting=None) -> LaurentSystem:
    if n < 2:
        raise ValueError(f"chandra-n needs n >= 2, got {n}")
    if not 0 < c <= 1:
        raise ValueError(f"chandra parameter c must lie in (0, 1], got {c}")
    return _relift(unmix(*chandra_equations(n, c)), lifting, seed)


def gen_random(n: int, m: int, seed: int = 0, exponent_range: tuple[int, int] = (0, 3),
               lifting=None) -> LaurentSystem:
    """Random dense system on ``m`` distinct monomials.

    Coefficients are uniform in the unit disk (modulus in ``[0.1, 1]`` so no
    entry vanishes); the support is drawn from the exponent box.
    """
    lo, hi = exponent_range
    box = (hi - lo + 1) ** n
    if m > box:
        raise ValueError(f"only {box} exponent vectors available for m={m}")
    rng = np.random.default_rng(seed)
    chosen: set[tuple] = set()
    while len(chosen) < m:
        chosen.add(tuple(int(e) for e in rng.integers(lo, hi + 1, size=n)))
    support = sorted(chosen, key=monomial_key)
    r = np.sqrt(rng.uniform(0.01, 1.0, size=(n, m)))
    theta = rng.uniform(0, 2 * np.pi, size=(n, m))
    C = r * np.exp(1j * theta)
    if lifting is None:
        lifting = random_lifting(m, seed + 1)
    return LaurentSystem(np.array(support, dtype=np.int64), C, lifting)


def random_torus_points(p: int, n: int, seed: int = 0, radius=(0.5, 2.0)) -> np.ndarray:
    """``(p, n)`` complex points with moduli log-uniform in ``radius``."""
    rng = np.random.default_rng(seed)
    mod = np.exp(rng.uniform(np.log(radius[0]), np.log(radius[1]), size=(p, n)))
    return mod * np.exp(1j * rng.uniform(-np.pi, np.pi, size=(p, n)))


def _monomial_row(system: LaurentSystem, x: np.ndarray, tau0: float) -> np.ndarray:
    logs = np.log(x.astype(np.complex128))
    return np.exp(system.support @ logs + tau0 * system.lifting_values)


def seed_on_path(system: LaurentSystem, x0, tau0: float) -> LaurentSystem:
    """Adjust coefficients so every affine point in ``x0`` solves H(x, tau0) = 0.

    With one point, one coefficient per equation is rescaled: the monomial
    that dominates at ``tau0`` (smallest lifting) absorbs the residual.  With
    ``p`` points (``p < m``) each coefficient row is replaced by its
    orthogonal projection onto the null space of the ``p x m`` monomial
    matrix, which keeps the rows close to the original ones.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=np.complex128))
    p = x0.shape[0]
    M = np.array([_monomial_row(system, x, tau0) for x in x0])
    C = np.array(system.coefficients)
    if p == 1:
        mono = M[0]
        for k in range(system.n):
            nz = np.flatnonzero(C[k])
            j = nz[np.argmin(system.lifting_values[nz])]
            rest = C[k] @ mono - C[k, j] * mono[j]
            C[k, j] = -rest / mono[j]
    else:
        if p >= system.m:
            raise ValueError(f"cannot place {p} points on-path with only {system.m} monomials")
        # rows of Vh beyond rank span null(M); project c_k^T onto it
        vh = np.linalg.svd(M)[2]
        null = vh[p:].conj().T  # (m, m-p), orthonormal columns
        C = (C @ null.conj()) @ null.T
    return system.with_coefficients(C)

