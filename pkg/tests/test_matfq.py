import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_vectors
from unising import polynomial as P
from unising.matfq import (
    MatrixModP,
    char_poly,
    fixed_space_dim,
    format_matrix,
    has_eigenvalue_one,
    matrix_order,
    min_poly,
    min_poly_degree,
    multiplicative_jordan_parts,
    parse_matrix,
    rank_mod,
)
from unising.polynomial import PolynomialModP


def sign(perm):
    s, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        s *= -1 if length % 2 == 0 else 1
    return s


def leibniz_char_poly(a, p):
    """det(xI - A) by the permutation expansion with polynomial entries."""
    n = len(a)
    entries = [[P.normalize(((-a[i][j]) % p, 1) if i == j else ((-a[i][j]) % p,), p) for j in range(n)] for i in range(n)]
    acc = ()
    for perm in itertools.permutations(range(n)):
        term = (sign(perm) % p,)
        for i in range(n):
            term = P.mul(term, entries[i][perm[i]], p)
        acc = P.add(acc, term, p)
    return acc


def brute_min_poly_degree(m):
    """Smallest k with I, M, ..., M^k linearly dependent."""
    p, n = m.modulus, m.n
    powers = [np.eye(n, dtype=np.int64).ravel()]
    for k in range(1, n + 1):
        powers.append((m**k).entries.ravel())
        if rank_mod(np.array(powers), p) < k + 1:
            return k
    raise AssertionError


def brute_fixed_vectors(m):
    vs = all_vectors(m.n, m.modulus)
    return int(np.count_nonzero(((vs @ m.entries.T - vs) % m.modulus == 0).all(axis=1)))


def small_matrices(max_n=4, primes=(2, 3, 5)):
    return st.sampled_from(primes).flatmap(
        lambda p: st.integers(1, max_n).flatmap(
            lambda n: st.lists(st.integers(0, p - 1), min_size=n * n, max_size=n * n).map(
                lambda xs: MatrixModP(p, np.array(xs).reshape(n, n))
            )
        )
    )


@settings(max_examples=120, deadline=None)
@given(small_matrices())
def test_char_poly_matches_leibniz(m):
    assert char_poly(m).coefficients == leibniz_char_poly(m.entries.tolist(), m.modulus)


@settings(max_examples=120, deadline=None)
@given(small_matrices())
def test_cayley_hamilton_and_min_poly(m):
    chi, mu = char_poly(m), min_poly(m)
    assert m.poly_eval(chi) == MatrixModP(m.modulus, np.zeros((m.n, m.n)))
    assert m.poly_eval(mu) == MatrixModP(m.modulus, np.zeros((m.n, m.n)))
    assert mu.is_monic and mu.divides(chi)
    assert mu.degree == brute_min_poly_degree(m)


@settings(max_examples=120, deadline=None)
@given(small_matrices(max_n=3))
def test_fixed_space_matches_brute_force(m):
    count = brute_fixed_vectors(m)
    assert m.modulus ** fixed_space_dim(m) == count
    assert has_eigenvalue_one(m) == (count > 1)


def test_char_poly_hessenberg_pivot_case():
    m = MatrixModP.from_rows([[1, 2, 0, 1], [0, 0, 3, 0], [0, 1, 1, 2], [4, 0, 0, 0]], 5)
    assert char_poly(m).coefficients == leibniz_char_poly(m.entries.tolist(), 5)


def test_companion_recovers_polynomial():
    f = PolynomialModP(7, (3, 0, 5, 1))
    c = MatrixModP.companion(f)
    assert char_poly(c) == f and min_poly(c) == f


def test_permutation_matrix_polys():
    m = MatrixModP.permutation([1, 2, 0], 3)
    assert char_poly(m).coefficients == (2, 0, 0, 1)
    assert min_poly_degree(m) == 3
    assert matrix_order(m) == 3
    assert m.apply([1, 0, 0]).tolist() == [0, 1, 0]


def test_scalar_and_diagonal_min_poly():
    assert min_poly(MatrixModP.diagonal([2, 2, 2], 5)).coefficients == (3, 1)
    assert min_poly_degree(MatrixModP.diagonal([1, 2, 2, 3], 5)) == 3


def test_inverse_and_negative_powers():
    m = MatrixModP.from_rows([[1, 1], [0, 1]], 7)
    assert (m @ m.inverse()).is_identity()
    assert (m**-3).entries.tolist() == [[1, 4], [0, 1]]
    with pytest.raises(ZeroDivisionError):
        MatrixModP.from_rows([[1, 1], [1, 1]], 7).inverse()


def test_jordan_parts_example():
    # order 12 over GF(2): s = M^4 has order 3, u = M^9 has order 4
    block = MatrixModP.from_rows([[1, 1, 0], [0, 1, 1], [0, 0, 1]], 2)
    rot = MatrixModP.companion((1, 1, 1), 2)
    m = MatrixModP.block_diag([block, rot])
    assert matrix_order(m) == 12
    s, u = multiplicative_jordan_parts(m, 12)
    assert s == m**4 and u == m**9
    assert matrix_order(s) == 3 and matrix_order(u) == 4
    assert s @ u == m and s @ u == u @ s


def test_jordan_parts_order_six():
    m = MatrixModP.block_diag([MatrixModP.companion((1, 1, 1), 2), MatrixModP.from_rows([[1, 1], [0, 1]], 2)])
    s, u = multiplicative_jordan_parts(m, 6)
    assert s == m**4 and u == m**3


def test_jordan_parts_trivial_cases():
    eye = MatrixModP.identity(3, 5)
    assert multiplicative_jordan_parts(eye, 1) == (eye, eye)
    m = MatrixModP.companion((1, 1, 1), 2)  # order 3, coprime to 2
    assert multiplicative_jordan_parts(m, 3) == (m, MatrixModP.identity(2, 2))


def test_small_polynomial_examples():
    assert char_poly(MatrixModP.identity(2, 3)).coefficients == (1, 1, 1)  # (x - 1)^2 = x^2 + x + 1 mod 3
    assert min_poly(MatrixModP.identity(4, 7)).coefficients == (6, 1)
    assert char_poly(MatrixModP.permutation([1, 2, 0], 5)).coefficients == (4, 0, 0, 1)
    f = MatrixModP.companion((1, 1, 0, 1), 2)
    assert min_poly(MatrixModP.block_diag([f, f])).coefficients == (1, 1, 0, 1)
    assert not has_eigenvalue_one(f) and fixed_space_dim(f) == 0
    assert fixed_space_dim(MatrixModP.diagonal([1, 2], 3)) == 1
    assert has_eigenvalue_one(MatrixModP.permutation([1, 2, 3, 4, 0], 11))


def test_jordan_parts_rejects_wrong_order():
    m = MatrixModP.companion((1, 1, 1), 2)
    with pytest.raises(ValueError):
        multiplicative_jordan_parts(m, 6)
    with pytest.raises(ValueError):
        multiplicative_jordan_parts(m, 2)


def test_matrix_text_roundtrip():
    m = MatrixModP.from_rows([[1, 2], [3, 4]], 5)
    assert parse_matrix(format_matrix(m)) == m
    assert parse_matrix("# c\np=5 n=2\n1 2\n3 4\n") == m
    for bad in ["", "p=5\n1", "p=5 n=2\n1 2\n", "q=5 n=1\n1\n", "p=4 n=1\n1\n"]:
        with pytest.raises(ValueError):
            parse_matrix(bad)


def test_constructor_validation():
    with pytest.raises(ValueError):
        MatrixModP(4, np.eye(2))
    with pytest.raises(ValueError):
        MatrixModP(3, np.zeros((2, 3)))
    with pytest.raises(ValueError):
        MatrixModP.companion((1, 2), 3)


@settings(max_examples=60, deadline=None)
@given(small_matrices(max_n=3), st.integers(0, 20), st.integers(0, 20))
def test_power_laws(m, a, b):
    assert (m**a) @ (m**b) == m ** (a + b)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=6), st.lists(st.integers(0, 6), min_size=1, max_size=6))
def test_polynomial_division(f, g):
    p = 7
    f, g = P.normalize(f, p), P.normalize(g, p)
    if not g:
        return
    q, r = P.divmod_poly(f, g, p)
    assert P.add(P.mul(q, g, p), r, p) == f
    assert P.degree(r) < P.degree(g)
