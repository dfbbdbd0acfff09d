import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import primerange

from unising.ff_core import (
    build_extension_field,
    digits_array,
    element_of_order,
    encode_array,
    field_trace,
    is_irreducible,
    multiplication_matrix,
    multiplicative_order,
)
from unising.matfq import MatrixModP, min_poly_degree
from unising import polynomial as P


def order_by_powering(base, modulus):
    x, k = base % modulus, 1
    while x != 1:
        x, k = x * base % modulus, k + 1
    return k


@pytest.mark.parametrize("base, modulus, expected", [(3, 5, 4), (3, 11, 5), (3, 23, 11), (5, 2, 1)])
def test_multiplicative_order_examples(base, modulus, expected):
    assert multiplicative_order(base, modulus) == expected
    assert order_by_powering(base, modulus) == expected


def test_order_divides_p_minus_one_for_all_small_primes():
    primes = list(primerange(2, 200))
    for r in primes:
        for p in primes:
            if r != p:
                d = multiplicative_order(r, p)
                assert (p - 1) % d == 0
                assert d == order_by_powering(r, p)


@pytest.mark.parametrize("base, modulus", [(5, 5), (10, 5), (3, 9), (2, 1)])
def test_multiplicative_order_errors(base, modulus):
    with pytest.raises(ValueError):
        multiplicative_order(base, modulus)


def irreducible_by_factor_search(f, r):
    """No monic polynomial of degree 1..deg/2 divides f."""
    d = len(f) - 1
    for k in range(1, d // 2 + 1):
        for low in itertools.product(range(r), repeat=k):
            if not P.mod(tuple(f), tuple(low) + (1,), r):
                return False
    return True


@pytest.mark.parametrize("r, d", [(2, 1), (2, 2), (2, 3), (2, 4), (2, 6), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)])
def test_build_extension_field_is_least_irreducible(r, d):
    ctx = build_extension_field(r, d)
    for n in range(r**d):
        low = [(n // r**i) % r for i in range(d)]
        f = tuple(low) + (1,)
        if irreducible_by_factor_search(f, r):
            assert ctx.modulus_poly == f
            break


def test_build_extension_field_examples():
    assert build_extension_field(2, 1).modulus_poly == (0, 1)
    assert build_extension_field(2, 3).modulus_poly == (1, 1, 0, 1)
    assert build_extension_field(3, 2).modulus_poly == (1, 0, 1)


def test_irreducibility_test_matches_factor_search():
    for r, d in [(2, 4), (2, 5), (3, 3), (3, 4)]:
        for low in itertools.product(range(r), repeat=d):
            f = tuple(low) + (1,)
            assert is_irreducible(f, r) == irreducible_by_factor_search(f, r), f


@pytest.mark.parametrize("r, p", [(2, 3), (3, 11), (3, 5), (2, 7), (5, 3), (3, 13), (2, 31)])
def test_element_of_order_has_exact_order(r, p):
    d = multiplicative_order(r, p)
    ctx = build_extension_field(r, d)
    y = element_of_order(ctx, p)
    powers = [ctx.pow(y, k) for k in range(1, p + 1)]
    assert powers[-1] == ctx.one
    assert all(z != ctx.one for z in powers[:-1])
    m = MatrixModP.from_rows(multiplication_matrix(ctx, y), r)
    assert min_poly_degree(m) == d


def test_element_of_order_generates_f4_star():
    ctx = build_extension_field(2, 2)
    y = element_of_order(ctx, 3)
    assert y != ctx.one and ctx.pow(y, 3) == ctx.one


def test_element_of_order_rejects_non_divisor():
    with pytest.raises(ValueError):
        element_of_order(build_extension_field(3, 2), 5)


def test_trace_examples():
    f9 = build_extension_field(3, 2)
    assert field_trace(f9, f9.zero) == 0
    assert field_trace(f9, f9.one) == 2
    f4 = build_extension_field(2, 2)
    g = element_of_order(f4, 3)
    assert field_trace(f4, g) == 1


@pytest.mark.parametrize("r, d", [(2, 3), (3, 2), (3, 4), (5, 3)])
def test_trace_equals_matrix_trace_of_multiplication(r, d):
    ctx = build_extension_field(r, d)
    for a in ctx.elements():
        m = np.array(multiplication_matrix(ctx, a))
        assert field_trace(ctx, a) == int(np.trace(m)) % r


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3**5 - 1), st.integers(0, 3**5 - 1))
def test_trace_is_additive(x, y):
    ctx = build_extension_field(3, 5)
    a, b = ctx.decode(x), ctx.decode(y)
    assert field_trace(ctx, ctx.add(a, b)) == (field_trace(ctx, a) + field_trace(ctx, b)) % 3


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3**5 - 1))
def test_trace_is_frobenius_invariant(x):
    ctx = build_extension_field(3, 5)
    a = ctx.decode(x)
    assert field_trace(ctx, ctx.pow(a, 3)) == field_trace(ctx, a)


def test_digits_roundtrip():
    idx = np.arange(5**4)
    dig = digits_array(idx, 5, 4)
    assert (encode_array(dig, 5) == idx).all()
    assert dig[7].tolist() == [2, 1, 0, 0]
