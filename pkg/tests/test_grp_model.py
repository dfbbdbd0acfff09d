import numpy as np
import pytest

from conftest import all_vectors
from unising.errors import BudgetExceeded
from unising.grp_model import (
    PermAction,
    compose,
    construct_grp,
    coset_permutation_action,
    element_has_eigenvalue_one,
    has_fixed_point_free_r_element,
    kernel_basis,
    least_prime_one_mod,
    monomial_eigenvalue_scan,
    monomial_representation,
    perm_power,
    random_functional,
    root_of_unity,
    vector_permutation,
)
from unising.matfq import MatrixModP

SMALL = [(2, 3), (2, 5), (2, 7), (3, 2), (3, 5), (3, 7), (3, 11), (3, 13), (5, 3), (5, 11), (7, 3)]


def inverse_perm(perm):
    out = [0] * len(perm)
    for i, x in enumerate(perm):
        out[x] = i
    return tuple(out)


def test_construct_small_example():
    spec = construct_grp(2, 3)
    assert spec.d == 2 and spec.order_of_a == 4
    assert spec.h_matrix.entries.tolist() == [[0, 1], [1, 1]]


@pytest.mark.parametrize("r, p", SMALL)
def test_h_has_order_p_and_acts_irreducibly(r, p):
    spec = construct_grp(r, p)
    assert (spec.h_matrix**p).is_identity()
    assert not spec.h_matrix.is_identity()
    # irreducible: no proper nonzero H-invariant subspace, so every nonzero orbit spans A
    vs = all_vectors(spec.d, r)[1:]
    for v in vs[:50]:
        orbit = np.array([hp @ v % r for hp in spec.h_powers()])
        from unising.matfq import rank_mod

        assert rank_mod(orbit, r) == spec.d


@pytest.mark.parametrize("r, p", [(3, 3), (4, 5), (3, 9)])
def test_construct_rejects_bad_parameters(r, p):
    with pytest.raises(ValueError):
        construct_grp(r, p)


def test_functional_validation(rng):
    spec = construct_grp(3, 11)
    with pytest.raises(ValueError):
        spec.functional([0] * 5)
    with pytest.raises(ValueError):
        spec.functional([1, 2])
    lam = random_functional(5, 3, rng)
    assert lam.any() and lam.shape == (5,)


def test_prime_and_root_choices():
    assert [least_prime_one_mod(r) for r in (2, 3, 5, 7, 11, 13)] == [3, 7, 11, 29, 23, 53]
    assert root_of_unity(7, 3) == 2
    z = root_of_unity(53, 13)
    assert pow(z, 13, 53) == 1 and z != 1
    with pytest.raises(ValueError):
        root_of_unity(11, 3)


@pytest.mark.parametrize("r, p", SMALL)
def test_monomial_relations(r, p):
    spec = construct_grp(r, p)
    rep = monomial_representation(spec)
    h = rep.h_image
    assert (h**p).is_identity()
    for k, g in enumerate(rep.a_images):
        assert (g**r).is_identity()
        e = np.zeros(spec.d, dtype=np.int64)
        e[k] = 1
        ha = spec.h_matrix.apply(e)
        assert h @ g @ h.inverse() == rep.image_of_vector(ha)
        for g2 in rep.a_images:
            assert g @ g2 == g2 @ g


def test_monomial_rep_with_other_ell():
    spec = construct_grp(3, 13)
    rep = monomial_representation(spec, ell=13)
    assert rep.ell == 13 and pow(rep.zeta, 3, 13) == 1
    with pytest.raises(ValueError):
        monomial_representation(spec, ell=11)
    with pytest.raises(ValueError):
        monomial_representation(spec, ell=15)


@pytest.mark.parametrize("r, p", SMALL)
def test_eigenvalue_scan_matches_matrix_check(r, p):
    spec = construct_grp(r, p)
    rep = monomial_representation(spec)
    res = monomial_eigenvalue_scan(rep)
    brute = [tuple(v) for v in all_vectors(spec.d, r) if not element_has_eigenvalue_one(rep, 0, v)]
    assert res.all_have_eigenvalue_one == (not brute)
    if brute:
        assert res.witness == brute[0]


def test_eigenvalue_scan_budget():
    spec = construct_grp(3, 23)
    with pytest.raises(BudgetExceeded):
        monomial_eigenvalue_scan(monomial_representation(spec), budget=1000)


def test_non_identity_coset_elements_have_eigenvalue_one():
    # rho(h^j a), j != 0, is a monomial p-cycle with characteristic polynomial
    # x^p - c, where c = zeta^lambda(sum_i H^i a) = 1 since sum_i H^i = 0
    spec = construct_grp(3, 5)
    rep = monomial_representation(spec)
    for j in range(1, 5):
        for v in all_vectors(4, 3)[::7]:
            assert element_has_eigenvalue_one(rep, j, v)


@pytest.mark.parametrize("r, p", SMALL)
def test_coset_action_is_faithful_transitive_and_satisfies_relations(r, p):
    spec = construct_grp(r, p)
    act = coset_permutation_action(spec)
    assert act.degree == r * p and act.is_transitive()
    h = act.generator_images["h"]
    h_inv = inverse_perm(h)
    assert perm_power(h, p) == tuple(range(r * p))
    ident = tuple(range(r * p))
    for v in all_vectors(spec.d, r)[:60]:
        pa = vector_permutation(act, v, r)
        assert (pa == ident) == (not v.any())
        # left action: h a h^-1 acts as h^-1 first, then a, then h
        conj = compose(compose(h_inv, pa), h)
        assert conj == vector_permutation(act, spec.h_matrix.apply(v), r)


@pytest.mark.parametrize("r, p", SMALL)
def test_fixed_point_free_matches_permutation_oracle(r, p):
    spec = construct_grp(r, p)
    act = coset_permutation_action(spec)
    derangements = []
    for v in all_vectors(spec.d, r):
        perm = vector_permutation(act, v, r)
        if all(perm[x] != x for x in range(act.degree)):
            derangements.append(tuple(int(c) for c in v))
    res = has_fixed_point_free_r_element(spec)
    assert res.found == bool(derangements)
    assert res.witness == (derangements[0] if derangements else None)
    assert res.union_size == r**spec.d - len(derangements)


def test_fixed_point_free_known_case():
    res = has_fixed_point_free_r_element(construct_grp(3, 5))
    assert res.found and res.witness == (1, 0, 0, 0)
    assert not has_fixed_point_free_r_element(construct_grp(3, 11)).found


def test_kernel_basis_spans_kernel(rng):
    for _ in range(20):
        lam = random_functional(5, 3, rng)
        basis = kernel_basis(lam, 3)
        assert basis.shape == (4, 5)
        assert not (basis @ lam % 3).any()
        from unising.matfq import rank_mod

        assert rank_mod(basis, 3) == 4


def test_perm_action_text_roundtrip():
    act = coset_permutation_action(construct_grp(2, 3))
    back = PermAction.from_text(act.to_text(), names=list(act.generator_images))
    assert back == act
    with pytest.raises(ValueError):
        PermAction(3, {"x": (0, 0, 1)})
    with pytest.raises(ValueError):
        PermAction.from_text("\n")
