from fractions import Fraction

import numpy as np
import pytest

from phg.errors import DuplicateMonomial, EmptySupport, ParseError, ShapeError
from phg.generators import gen_cyclic
from phg.system import (LaurentSystem, build_tables, dump_system, homogenize, parse_system,
                        system_to_dict, tables_for, union_support, unmix)

from conftest import example_system, random_laurent

DOC = '{"n": 1, "support": [[1], [0]], "coefficients": [[[2, 0], [3, 0]]], "lifting": [1, 2]}'


def test_parse_example_document():
    s = parse_system(DOC)
    assert (s.n, s.m) == (1, 2)
    assert s.coefficients.tolist() == [[2, 3]]
    assert s.lifting == (Fraction(1), Fraction(2))


def test_parse_duplicate_monomial():
    with pytest.raises(DuplicateMonomial):
        parse_system(DOC.replace("[[1], [0]]", "[[1], [1]]"))


def test_parse_error_reports_line_and_column():
    with pytest.raises(ParseError) as info:
        parse_system('{"n": 1,\n "support": [[1], [0]], "coefficients": [[[2, 0], [3, oops]]]}')
    assert info.value.line == 2 and info.value.column is not None


def test_parse_bad_number_reports_path():
    with pytest.raises(ParseError) as info:
        parse_system(DOC.replace("[2, 0]", '["two", 0]'))
    assert "coefficients" in info.value.path


def test_parse_shape_mismatch():
    with pytest.raises(ShapeError):
        parse_system(DOC.replace('[[[2, 0], [3, 0]]]', '[[[2, 0]]]'))


def test_cyclic_round_trip():
    s = gen_cyclic(14)
    assert parse_system(dump_system(s)) == s


def test_system_is_immutable():
    s = example_system()
    with pytest.raises(ValueError):
        s.coefficients[0, 0] = 5


def test_negative_lifting_rejected():
    with pytest.raises(ValueError):
        LaurentSystem(np.array([[1], [0]]), np.array([[2, 3]]), (1, -1))


def test_union_disjoint_singletons():
    support, C = union_support([[[1]], [[0]]], [[5], [7]])
    assert support.tolist() == [[0], [1]]
    assert C.tolist() == [[0, 5], [7, 0]]


def test_unmix_rejects_non_square():
    with pytest.raises(ShapeError):
        unmix([[[1]], [[0]]], [[5], [7]])


def test_unmix_sums_repeats_and_maps_lifting():
    s = unmix([[[1, 0], [1, 0], [0, 0]], [[0, 1]]], [[1, 2, 3], [4]],
              lifting={(0, 0): 0, (1, 0): Fraction(1, 2), (0, 1): 2})
    assert s.support.tolist() == [[0, 0], [0, 1], [1, 0]]
    assert s.coefficients.tolist() == [[3, 0, 3], [0, 4, 0]]
    assert s.lifting == (0, 2, Fraction(1, 2))


def test_unmix_identical_supports_dense():
    sup = [[1, 0], [0, 1], [0, 0]]
    s = unmix([sup, sup], [[1, 2, 3], [4, 5, 6]])
    assert np.all(s.coefficients != 0)
    assert sorted(map(tuple, s.support.tolist())) == sorted(map(tuple, sup))


def test_unmix_cyclic4_count():
    n = 4
    supports = []
    for k in range(1, n):
        supports.append([[1 if (j - i) % n < k else 0 for j in range(n)] for i in range(n)])
    supports.append([[1] * n, [0] * n])
    coeffs = [[1] * n for _ in range(n - 1)] + [[1, -1]]
    assert unmix(supports, coeffs).m == 3 * 4 + 2


def test_unmix_empty():
    with pytest.raises(EmptySupport):
        unmix([[], []], [[], []])


def test_homogenize_examples():
    h = homogenize(example_system())
    assert h.degree == 1
    assert sorted(map(tuple, h.hom_support.tolist())) == [(0, 1), (1, 0)]
    h = homogenize(LaurentSystem(np.array([[-1], [2]]), np.array([[1, 1]]), (0, 0)))
    assert h.degree == 2
    assert sorted(map(tuple, h.hom_support.tolist())) == [(-1, 3), (2, 0)]


def test_homogenize_cyclic_last_product():
    h = homogenize(gen_cyclic(5))
    ones = [i for i, a in enumerate(h.base.support.tolist()) if a == [1] * 5]
    assert h.hom_support[ones[0], -1] == 0


def test_build_tables_example():
    t = build_tables(homogenize(example_system()))
    assert t.A_hat.real.tolist() == [[1, 0], [0, 1], [1, 2]]
    assert t.B[0].real.tolist() == [[2, 0], [0, 3], [2, 6], [2, 3]]


def test_build_tables_unit_coefficient():
    s = LaurentSystem(np.array([[0, 0], [1, 0], [0, 1]]),
                      np.array([[1, 0, 0], [0, 1, 1]]), (Fraction(1, 2), 1, 2))
    t = tables_for(s)
    col = t.B[0][:, 0]
    assert np.allclose(col, np.r_[t.A_hat[:, 0], 1.0])
    assert np.all(t.B[0][:, 1:] == 0)


def test_cyclic14_table_shapes():
    t = tables_for(gen_cyclic(14))
    assert t.A_hat.shape == (16, 184)
    assert all(b.shape == (17, 184) for b in t.B)
    assert t.B_cat.shape == (184, 14 * 17)


def test_evaluate_matches_homogenized_value():
    s = random_laurent(3, 12, seed=1)
    t = tables_for(s)
    x = np.array([0.7 + 0.2j, -1.1j, 1.3])
    y = np.r_[x, 1.0]
    from phg.evaluation import eval_scalar_oracle
    ref = eval_scalar_oracle(y, -0.3, homogenize(s))[:, -1]
    assert np.allclose(s.evaluate(x, -0.3), ref, rtol=1e-13)
    assert t.degree == homogenize(s).degree


def test_dict_round_trip_random():
    s = random_laurent(2, 7, seed=3)
    d = system_to_dict(s)
    assert parse_system(dump_system(s)) == s
    assert d["n"] == 2
