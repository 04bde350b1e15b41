"""Unmixed Laurent systems, homogenization and the precomputed homotopy tables.

A system with ``n`` equations in ``n`` unknowns shares one support of ``m``
exponent vectors.  The homotopy attached to it is

    h_k(x, tau) = sum_i C[k, i] * x**support[i] * exp(tau * lifting[i])

Support vectors are stored as the rows of an ``(m, n)`` integer array.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateMonomial, EmptySupport, ParseError, ShapeError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def monomial_key(exponent: Sequence[int]) -> tuple:
    """Sort key for the graded lexicographic monomial order."""
    return (sum(exponent), tuple(exponent))


@dataclass(frozen=True, eq=False)
class LaurentSystem:
    """Square Laurent system over a common support.

    Attributes:
        support: ``(m, n)`` integer array, row ``i`` is the exponent vector a_i.
        coefficients: ``(n, m)`` complex array; row ``k`` holds c_k.
        lifting: exact nonnegative rationals, one per monomial.
    """

    support: np.ndarray
    coefficients: np.ndarray
    lifting: tuple[Fraction, ...]
    lifting_values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        support = np.asarray(self.support)
        if support.ndim != 2:
            raise ShapeError(f"support must be 2-d, got shape {support.shape}")
        if support.size and not np.all(support == np.round(support)):
            raise ShapeError("support entries must be integers")
        support = support.astype(np.int64)
        m, n = support.shape
        if m < 1 or n < 1:
            raise ShapeError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        if coeffs.shape != (n, m):
            raise ShapeError(f"coefficients have shape {coeffs.shape}, expected {(n, m)}")
        if not np.all(np.isfinite(coeffs)):
            raise ShapeError("coefficients must be finite")
        lifting = tuple(Fraction(w) for w in self.lifting)
        if len(lifting) != m:
            raise ShapeError(f"{len(lifting)} lifting values for {m} monomials")
        if any(w < 0 for w in lifting):
            raise ValueError("lifting values must be nonnegative")
        seen: dict[tuple, int] = {}
        for i, row in enumerate(support):
            key = tuple(int(e) for e in row)
            if key in seen:
                raise DuplicateMonomial(key, seen[key], i)
            seen[key] = i
        zero_rows = np.flatnonzero(~np.any(coeffs != 0, axis=1))
        if zero_rows.size:
            raise ValueError(f"equation {int(zero_rows[0])} is identically zero")
        object.__setattr__(self, "support", _frozen(support))
        object.__setattr__(self, "coefficients", _frozen(coeffs))
        object.__setattr__(self, "lifting", lifting)
        object.__setattr__(self, "lifting_values",
                           _frozen(np.array([float(w) for w in lifting], dtype=np.float64)))

    @property
    def n(self) -> int:
        return self.support.shape[1]

    @property
    def m(self) -> int:
        return self.support.shape[0]

    def __eq__(self, other):
        if not isinstance(other, LaurentSystem):
            return NotImplemented
        return (self.support.shape == other.support.shape
                and np.array_equal(self.support, other.support)
                and np.array_equal(self.coefficients, other.coefficients)
                and self.lifting == other.lifting)

    def with_coefficients(self, coefficients) -> "LaurentSystem":
        return LaurentSystem(self.support, coefficients, self.lifting)

    def with_lifting(self, lifting) -> "LaurentSystem":
        return LaurentSystem(self.support, self.coefficients, lifting)

    def evaluate(self, x, tau: float = 0.0) -> np.ndarray:
        """Affine homotopy values H(x, tau), computed term by term."""
        x = np.asarray(x, dtype=np.complex128)
        out = np.zeros(self.n, dtype=np.complex128)
        for i, a in enumerate(self.support):
            term = complex(np.exp(tau * self.lifting_values[i]))
            for xj, e in zip(x, a):
                term *= _ipow(complex(xj), int(e))
            out += self.coefficients[:, i] * term
        return out


def _ipow(base: complex, e: int) -> complex:
    """Integer power by repeated multiplication; negative powers via reciprocal."""
    if e < 0:
        base = 1.0 / base
        e = -e
    r = 1.0 + 0.0j
    for _ in range(e):
        r *= base
    return r


@dataclass(frozen=True, eq=False)
class HomogenizedSystem:
    """A system lifted to projective space with the balancing exponent last.

    ``hom_support`` is ``(m, N)`` with ``N = n + 1``; its last column is
    ``d - sum(a_i)`` so every row sums to the shared degree ``d``.
    """

    base: LaurentSystem
    degree: int
    hom_support: np.ndarray

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def N(self) -> int:
        return self.base.n + 1

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def degrees(self) -> tuple[int, ...]:
        return (self.degree,) * self.base.n


def homogenize(system: LaurentSystem) -> HomogenizedSystem:
    total = system.support.sum(axis=1)
    d = int(total.max())
    hom = np.concatenate([system.support, (d - total)[:, None]], axis=1)
    return HomogenizedSystem(system, d, _frozen(hom))


@dataclass(frozen=True, eq=False)
class HomotopyTables:
    """Constant matrices for batched evaluation.

    Attributes:
        A_hat: ``(N+1, m)`` real matrix with columns ``(a_hat_i, omega_i)``.
        B: ``(n, N+2, m)`` complex; ``B[k][:, i] = c_ki * (a_hat_i, omega_i, 1)``.
        B_cat: ``(m, n*(N+2))`` horizontal concatenation of the ``B_k^T``.
    """

    A_hat: np.ndarray
    B: np.ndarray
    B_cat: np.ndarray
    hsys: HomogenizedSystem

    @property
    def monomial_count(self) -> int:
        return self.A_hat.shape[1]

    @property
    def variable_count(self) -> int:
        return self.A_hat.shape[0] - 1

    @property
    def n(self) -> int:
        return self.B.shape[0]

    @property
    def degree(self) -> int:
        return self.hsys.degree


def build_tables(hsys: HomogenizedSystem) -> HomotopyTables:
    base = hsys.base
    a_hat = np.vstack([hsys.hom_support.T.astype(np.float64), base.lifting_values[None, :]])
    ext = np.vstack([a_hat, np.ones((1, base.m))])  # (N+2, m)
    B = base.coefficients[:, None, :] * ext[None, :, :]
    B_cat = np.ascontiguousarray(B.transpose(2, 0, 1).reshape(base.m, -1))
    return HomotopyTables(_frozen(a_hat), _frozen(B), _frozen(B_cat), hsys)


def tables_for(system: LaurentSystem) -> HomotopyTables:
    return build_tables(homogenize(system))


def union_support(supports: Sequence[Iterable[Sequence[int]]],
                  coeffs: Sequence[Sequence[complex]]) -> tuple[np.ndarray, np.ndarray]:
    """Merge per-equation supports into one canonically ordered support.

    Returns ``(support, C)`` with one coefficient row per equation; monomials
    missing from an equation get coefficient zero and repeated monomials
    within one equation are summed.  The number of equations need not match
    the number of variables here.
    """
    supports = [[tuple(int(e) for e in a) for a in s] for s in supports]
    if len(coeffs) != len(supports):
        raise ShapeError(f"{len(coeffs)} coefficient lists for {len(supports)} supports")
    lengths = {len(a) for s in supports for a in s}
    if len(lengths) > 1:
        raise ShapeError(f"exponent vectors of different lengths {sorted(lengths)}")
    for k, (s, c) in enumerate(zip(supports, coeffs)):
        if len(s) != len(c):
            raise ShapeError(f"equation {k}: {len(s)} monomials but {len(c)} coefficients")
    union = sorted({a for s in supports for a in s}, key=monomial_key)
    if not union:
        raise EmptySupport("union of supports is empty")
    index = {a: i for i, a in enumerate(union)}
    C = np.zeros((len(supports), len(union)), dtype=np.complex128)
    for k, (s, c) in enumerate(zip(supports, coeffs)):
        for a, v in zip(s, c):
            C[k, index[a]] += complex(v)
    return np.array(union, dtype=np.int64).reshape(len(union), lengths.pop()), C


def unmix(supports: Sequence[Iterable[Sequence[int]]],
          coeffs: Sequence[Sequence[complex]],
          lifting=None) -> LaurentSystem:
    """Square system over the union of the per-equation supports.

    ``lifting`` may be a mapping from exponent tuple to rational or a
    sequence aligned with the merged support; default assigns zero to every
    monomial.
    """
    support, C = union_support(supports, coeffs)
    if support.shape[1] != len(supports):
        raise ShapeError(f"{len(supports)} equations in {support.shape[1]} variables")
    union = [tuple(int(e) for e in a) for a in support]
    if lifting is None:
        lift = [Fraction(0)] * len(union)
    elif isinstance(lifting, dict):
        lift = [Fraction(lifting[a]) for a in union]
    else:
        lift = list(lifting)
    return LaurentSystem(support, C, tuple(lift))


# ---------------------------------------------------------------- file format

def system_to_dict(system: LaurentSystem) -> dict:
    return {
        "n": system.n,
        "support": system.support.tolist(),
        "coefficients": [[[float(c.real), float(c.imag)] for c in row]
                         for row in system.coefficients],
        "lifting": [[w.numerator, w.denominator] for w in system.lifting],
    }


def dump_system(system: LaurentSystem) -> str:
    return json.dumps(system_to_dict(system))


def _number(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {v!r}", path=path)
    return v


def _integer(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"expected an integer, got {v!r}", path=path)
    return v


def _list(v, path: str, length: int | None = None) -> list:
    if not isinstance(v, list):
        raise ParseError(f"expected a list, got {type(v).__name__}", path=path)
    if length is not None and len(v) != length:
        raise ShapeError(f"{path} has length {len(v)}, expected {length}")
    return v


def loads_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None


def system_from_dict(doc) -> LaurentSystem:
    if not isinstance(doc, dict):
        raise ParseError("system document must be a JSON object", path="$")
    for key in ("n", "support", "coefficients", "lifting"):
        if key not in doc:
            raise ParseError(f"missing key {key!r}", path="$")
    n = _integer(doc["n"], "$.n")
    if n < 1:
        raise ShapeError(f"n must be positive, got {n}")
    support = _list(doc["support"], "$.support")
    m = len(support)
    if m < 1:
        raise EmptySupport("support is empty")
    exps = [[_integer(e, f"$.support[{i}][{j}]")
             for j, e in enumerate(_list(row, f"$.support[{i}]", n))]
            for i, row in enumerate(support)]
    rows = _list(doc["coefficients"], "$.coefficients", n)
    C = np.empty((n, m), dtype=np.complex128)
    for k, row in enumerate(rows):
        for i, pair in enumerate(_list(row, f"$.coefficients[{k}]", m)):
            p = f"$.coefficients[{k}][{i}]"
            re, im = _list(pair, p, 2)
            C[k, i] = complex(_number(re, p + "[0]"), _number(im, p + "[1]"))
    lifting = []
    for i, pair in enumerate(_list(doc["lifting"], "$.lifting", m)):
        p = f"$.lifting[{i}]"
        if isinstance(pair, int) and not isinstance(pair, bool):
            lifting.append(Fraction(pair))
            continue
        num, den = _list(pair, p, 2)
        num, den = _integer(num, p + "[0]"), _integer(den, p + "[1]")
        if den == 0:
            raise ParseError("zero denominator", path=p)
        lifting.append(Fraction(num, den))
    return LaurentSystem(np.array(exps, dtype=np.int64), C, tuple(lifting))


def parse_system(text: str) -> LaurentSystem:
    return system_from_dict(loads_json(text))
