"""The Frobenius group G_{r,p} = A x| <h> and its concrete realizations.

A is the additive group of GF(r^d) written as column vectors in the
polynomial basis, d = ord_p(r), and h acts by the matrix H of
multiplication by an element of order p, so that h a h^-1 = H a.

Three realizations are provided:

* the linear action of H on A (``GrpSpec.h_matrix``);
* the degree-p monomial representation induced from a nontrivial
  character of A, over a prime field GF(ell) with ell = 1 mod r;
* the transitive action on the rp cosets of K = ker(functional) in G.

Group elements are pairs ``(j, a)`` standing for ``h^j a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np
from sympy import isprime, nextprime

from .errors import BudgetExceeded
from .ff_core import (
    ExtensionFieldContext,
    build_extension_field,
    digits_array,
    element_of_order,
    encode_array,
    least_primitive_root,
    multiplication_matrix,
    multiplicative_order,
)
from .matfq import MatrixModP, has_eigenvalue_one, min_poly_degree

DEFAULT_ENUMERATION_BUDGET = 3**16


@dataclass(frozen=True)
class GrpSpec:
    r: int
    p: int
    d: int
    h_matrix: MatrixModP
    field: ExtensionFieldContext
    generator: tuple[int, ...]

    @property
    def order_of_a(self) -> int:
        return self.r**self.d

    def default_functional(self) -> np.ndarray:
        lam = np.zeros(self.d, dtype=np.int64)
        lam[0] = 1
        return lam

    def functional(self, functional: Sequence[int] | None) -> np.ndarray:
        """Validated functional row vector (first coordinate by default)."""
        if functional is None:
            return self.default_functional()
        lam = np.asarray(functional, dtype=np.int64) % self.r
        if lam.shape != (self.d,):
            raise ValueError(f"functional must have length {self.d}")
        if not lam.any():
            raise ValueError("functional must be nonzero")
        return lam

    def h_powers(self) -> list[np.ndarray]:
        """H^0, ..., H^{p-1} as integer arrays."""
        out = [np.eye(self.d, dtype=np.int64)]
        for _ in range(self.p - 1):
            out.append(self.h_matrix.entries @ out[-1] % self.r)
        return out


def construct_grp(r: int, p: int) -> GrpSpec:
    if not isprime(r) or not isprime(p):
        raise ValueError(f"r and p must be prime, got r={r}, p={p}")
    if r == p:
        raise ValueError("r and p must be distinct")
    d = multiplicative_order(r, p)
    ctx = build_extension_field(r, d)
    y = element_of_order(ctx, p)
    h = MatrixModP.from_rows(multiplication_matrix(ctx, y), r)
    spec = GrpSpec(r, p, d, h, ctx, y)
    if not (h**p).is_identity() or h.is_identity():
        raise AssertionError("generator does not have order p")
    if min_poly_degree(h) != d:
        raise AssertionError("H does not act irreducibly")
    return spec


def random_functional(d: int, r: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        lam = rng.integers(0, r, size=d)
        if lam.any():
            return lam.astype(np.int64)


# -- monomial representation ------------------------------------------------


def least_prime_one_mod(r: int) -> int:
    ell = 2
    while ell % r != 1:
        ell = nextprime(ell)
    return ell


def root_of_unity(ell: int, r: int) -> int:
    """zeta = g0^((ell-1)/r) for the least primitive root g0 mod ell."""
    if (ell - 1) % r:
        raise ValueError(f"ell={ell} is not 1 mod r={r}")
    return pow(least_primitive_root(ell), (ell - 1) // r, ell)


@dataclass(frozen=True)
class MonomialRep:
    """Images of h and of the basis vectors e_0..e_{d-1} of A, as p x p matrices mod ell.

    ``h_image`` is the p-cycle permutation matrix e_i -> e_{i-1}; the image of a
    is diag(zeta^lambda(H^i a), i = 0..p-1).  With these choices
    rho(h) rho(a) rho(h)^-1 = rho(H a).
    """

    spec: GrpSpec
    ell: int
    zeta: int
    functional: np.ndarray
    h_image: MatrixModP
    a_images: tuple[MatrixModP, ...]

    def image_of_vector(self, a: Sequence[int]) -> MatrixModP:
        out = MatrixModP.identity(self.spec.p, self.ell)
        for gen, c in zip(self.a_images, a):
            if c % self.spec.r:
                out = out @ gen ** int(c % self.spec.r)
        return out

    def image(self, j: int, a: Sequence[int]) -> MatrixModP:
        """Image of h^j a."""
        return self.h_image ** (j % self.spec.p) @ self.image_of_vector(a)

    def diagonal_table(self) -> np.ndarray:
        """pow_table[k, c, i] = (i-th diagonal entry of rho(e_k)) ** c mod ell."""
        r, p, d = self.spec.r, self.spec.p, self.spec.d
        diag = np.array([np.diagonal(g.entries) for g in self.a_images], dtype=np.int64)
        table = np.ones((d, r, p), dtype=np.int64)
        for c in range(1, r):
            table[:, c, :] = table[:, c - 1, :] * diag % self.ell
        return table


def monomial_representation(
    spec: GrpSpec, ell: int | None = None, functional: Sequence[int] | None = None
) -> MonomialRep:
    if ell is None:
        ell = least_prime_one_mod(spec.r)
    if not isprime(ell):
        raise ValueError(f"ell must be prime, got {ell}")
    if ell % spec.r != 1:
        raise ValueError(f"ell={ell} is not 1 mod r={spec.r}; no primitive r-th root of unity")
    zeta = root_of_unity(ell, spec.r)
    lam = spec.functional(functional)
    p = spec.p
    powers = spec.h_powers()
    # exps[i, k] = lambda(H^i e_k)
    exps = np.array([lam @ hp % spec.r for hp in powers], dtype=np.int64)
    a_images = tuple(
        MatrixModP.diagonal([pow(zeta, int(exps[i, k]), ell) for i in range(p)], ell) for k in range(spec.d)
    )
    h_image = MatrixModP.permutation([(i - 1) % p for i in range(p)], ell)
    return MonomialRep(spec, ell, zeta, lam, h_image, a_images)


@dataclass(frozen=True)
class EigenScanResult:
    all_have_eigenvalue_one: bool
    witness: tuple[int, ...] | None
    elements_scanned: int
    ell: int
    zeta: int


def monomial_eigenvalue_scan(
    rep: MonomialRep, budget: int = DEFAULT_ENUMERATION_BUDGET, chunk: int = 1 << 15
) -> EigenScanResult:
    """Exhaustive eigenvalue-1 check of rho(a) over every a in A.

    rho(a) is diagonal, so it has eigenvalue 1 iff some diagonal entry is 1.
    Entries are formed as products of generator images over GF(ell).
    """
    spec = rep.spec
    r, d, total = spec.r, spec.d, spec.order_of_a
    if total > budget:
        raise BudgetExceeded(f"|A| = {total} exceeds enumeration budget {budget}")
    table = rep.diagonal_table()
    scanned = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = digits_array(idx, r, d)
        entries = np.ones((idx.size, spec.p), dtype=np.int64)
        for k in range(d):
            entries = entries * table[k, digits[:, k], :] % rep.ell
        has_one = (entries == 1).any(axis=1)
        bad = np.flatnonzero(~has_one)
        if bad.size:
            scanned += int(bad[0]) + 1
            witness = tuple(int(x) for x in digits[bad[0]])
            return EigenScanResult(False, witness, scanned, rep.ell, rep.zeta)
        scanned += idx.size
    return EigenScanResult(True, None, scanned, rep.ell, rep.zeta)


# -- permutation action on rp points -------------------------------------------


@dataclass(frozen=True)
class PermAction:
    """Permutations of ``range(degree)`` given by their image sequences."""

    degree: int
    generator_images: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, img in self.generator_images.items():
            if len(img) != self.degree or sorted(img) != list(range(self.degree)):
                raise ValueError(f"generator {name!r} is not a permutation of {self.degree} points")

    def orbits(self) -> list[list[int]]:
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            seen[start] = True
            orbit, stack = [start], [start]
            while stack:
                x = stack.pop()
                for img in self.generator_images.values():
                    y = img[x]
                    if not seen[y]:
                        seen[y] = True
                        orbit.append(y)
                        stack.append(y)
            out.append(sorted(orbit))
        return out

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    def to_text(self) -> str:
        return "".join(" ".join(map(str, img)) + "\n" for img in self.generator_images.values())

    @classmethod
    def from_text(cls, text: str, names: Sequence[str] | None = None) -> "PermAction":
        rows = [tuple(int(x) for x in ln.split()) for ln in text.splitlines() if ln.strip()]
        if not rows:
            raise ValueError("no generators")
        names = list(names) if names is not None else [f"g{i}" for i in range(len(rows))]
        return cls(len(rows[0]), dict(zip(names, rows)))


def compose(first: Sequence[int], then: Sequence[int]) -> tuple[int, ...]:
    """The permutation x -> then[first[x]]."""
    return tuple(then[x] for x in first)


def perm_power(perm: Sequence[int], e: int) -> tuple[int, ...]:
    out = tuple(range(len(perm)))
    for _ in range(e):
        out = compose(out, perm)
    return out


def coset_permutation_action(spec: GrpSpec, functional: Sequence[int] | None = None) -> PermAction:
    """Action of G on the rp left cosets of K = ker(functional) <= A.

    The coset h^i a K is labelled by (t, i) with t = lambda(a), and gets point
    index t * p + i.  Then h: (t, i) -> (t, i + 1) and
    b in A: (t, i) -> (t + lambda(H^-i b), i).
    """
    r, p, d = spec.r, spec.p, spec.d
    lam = spec.functional(functional)
    powers = spec.h_powers()
    # H^-i = H^(p-i)
    shifts = np.array([lam @ powers[(p - i) % p] % r for i in range(p)], dtype=np.int64)  # (p, d)
    images: dict[str, tuple[int, ...]] = {}
    images["h"] = tuple(t * p + (i + 1) % p for t in range(r) for i in range(p))
    for k in range(d):
        images[f"a{k}"] = tuple(((t + int(shifts[i, k])) % r) * p + i for t in range(r) for i in range(p))
    return PermAction(r * p, images)


def vector_permutation(action: PermAction, a: Sequence[int], r: int) -> tuple[int, ...]:
    """Permutation induced by a in A, composed from the generators a0..a{d-1}."""
    out = tuple(range(action.degree))
    for k, c in enumerate(a):
        out = compose(out, perm_power(action.generator_images[f"a{k}"], int(c) % r))
    return out


# -- fixed-point-free r-elements (subgroup form) ------------------------------


@dataclass(frozen=True)
class FixedPointFreeResult:
    found: bool
    witness: tuple[int, ...] | None
    union_size: int


def kernel_basis(lam: np.ndarray, r: int) -> np.ndarray:
    """Rows spanning {a : lam . a = 0} over GF(r)."""
    d = lam.size
    k0 = int(np.flatnonzero(lam)[0])
    inv = pow(int(lam[k0]), -1, r)
    rows = []
    for k in range(d):
        if k == k0:
            continue
        v = np.zeros(d, dtype=np.int64)
        v[k] = 1
        v[k0] = -lam[k] * inv % r
        rows.append(v)
    return np.array(rows, dtype=np.int64).reshape(d - 1, d)


def iter_conjugates(spec: GrpSpec, functional: Sequence[int] | None = None) -> Iterator[np.ndarray]:
    """Encoded elements of h^j K h^-j = H^j K for j = 0..p-1."""
    r, d = spec.r, spec.d
    lam = spec.functional(functional)
    basis = kernel_basis(lam, r)
    coeffs = digits_array(np.arange(r ** (d - 1)), r, d - 1)
    kernel = coeffs @ basis % r  # (r^(d-1), d)
    for hp in spec.h_powers():
        yield encode_array(kernel @ hp.T % r, r)


def has_fixed_point_free_r_element(
    spec: GrpSpec,
    functional: Sequence[int] | None = None,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> FixedPointFreeResult:
    """Is A strictly larger than the union of the conjugates of K?

    Every r-element of G lies in A, and a in A is a derangement of the coset
    action iff it avoids every conjugate of K.  The least such a (in
    canonical order) is returned as witness.
    """
    total = spec.order_of_a
    if total > budget:
        raise BudgetExceeded(f"|A| = {total} exceeds enumeration budget {budget}")
    covered = np.zeros(total, dtype=bool)
    for enc in iter_conjugates(spec, functional):
        covered[enc] = True
    union_size = int(covered.sum())
    missing = np.flatnonzero(~covered)
    if missing.size == 0:
        return FixedPointFreeResult(False, None, union_size)
    witness = tuple(int(x) for x in digits_array(int(missing[0]), spec.r, spec.d))
    return FixedPointFreeResult(True, witness, union_size)


def monomial_unisingular(spec: GrpSpec, ell: int | None = None, functional: Sequence[int] | None = None,
                         budget: int = DEFAULT_ENUMERATION_BUDGET) -> EigenScanResult:
    return monomial_eigenvalue_scan(monomial_representation(spec, ell, functional), budget=budget)


def element_has_eigenvalue_one(rep: MonomialRep, j: int, a: Sequence[int]) -> bool:
    return has_eigenvalue_one(rep.image(j, a))
