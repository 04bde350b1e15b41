from fractions import Fraction

import numpy as np
import pytest

from phg.generators import gen_random, random_torus_points, seed_on_path
from phg.system import LaurentSystem, tables_for


def line_system(lifting=(1, 0)) -> LaurentSystem:
    """h(x, tau) = x - e^tau: the path is x(tau) = e^tau, ending at x = 1."""
    return LaurentSystem(np.array([[0], [1]]), np.array([[-1.0, 1.0]]), lifting)


def example_system() -> LaurentSystem:
    """h = 2 x e^tau + 3 e^(2 tau); homogenized 2 y1 e^tau + 3 y_h e^(2 tau)."""
    return LaurentSystem(np.array([[1], [0]]), np.array([[2.0, 3.0]]), (1, 2))


def random_laurent(n, m, seed, erange=(-3, 3), lift_max=5):
    """Random system with Laurent exponents and lifting in [0, lift_max]."""
    rng = np.random.default_rng(seed)
    m = min(m, (erange[1] - erange[0] + 1) ** n)
    sup = set()
    while len(sup) < m:
        sup.add(tuple(int(v) for v in rng.integers(erange[0], erange[1] + 1, size=n)))
    sup = np.array(sorted(sup, key=lambda a: (sum(a), a)))
    C = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
    lift = tuple(Fraction(int(k), 100) for k in rng.integers(0, 100 * lift_max + 1, size=m))
    return LaurentSystem(sup, C, lift)


def random_points(p, N, seed, zmax=2.0):
    """Homogeneous points with |Re log y_j| <= zmax."""
    rng = np.random.default_rng(seed)
    z = rng.uniform(-zmax, zmax, (p, N)) + 1j * rng.uniform(-np.pi, np.pi, (p, N))
    return np.exp(z)


def on_path_start(n, seed, tau0=-20.0, p=1, m=None):
    """Random system whose coefficients are fitted so ``p`` torus points lie on the path."""
    system = gen_random(n, m or 6 + 2 * n, seed=seed)
    x0 = random_torus_points(p, n, seed=seed)
    return seed_on_path(system, x0, tau0), x0


@pytest.fixture
def line():
    return line_system()


@pytest.fixture
def line_tables():
    return tables_for(line_system())


@pytest.fixture
def example_tables():
    return tables_for(example_system())


def _mono(system, x, tau0):
    return np.exp(system.support @ np.log(x) + tau0 * system.lifting_values)


def poisoned_batch(kind, n=2, p=8, bad=3, seed=0, tau0=-20.0):
    """``p`` on-path starts of one random system with start ``bad`` poisoned.

    ``kind`` is "zero" (a zero coordinate), "degenerate" (a corank-one
    singular root: one directional derivative of every equation vanishes
    there) or "singular" (all first derivatives vanish, so the bordered
    Jacobian loses rank).
    """
    system = gen_random(n, p + 6, seed=seed)
    x0 = random_torus_points(p, n, seed=seed)
    rows = [_mono(system, x, tau0) for x in x0]
    xb, mb = x0[bad], rows[bad]
    dmono = system.support * (mb[:, None] / xb[None, :])  # (m, n) d mono_i / d x_j
    if kind == "degenerate":
        v = np.random.default_rng(seed).normal(size=n)
        rows.append(dmono @ v)
    elif kind == "singular":
        rows.extend(dmono.T)
    M = np.array(rows)
    null = np.linalg.svd(M)[2][len(rows):].conj().T
    C = (system.coefficients @ null.conj()) @ null.T
    system = system.with_coefficients(C)
    y = np.hstack([x0, np.ones((p, 1))])
    if kind == "zero":
        y[bad, 0] = 0
    return system, y


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
