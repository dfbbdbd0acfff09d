"""Number-theoretic and finite-field primitives.

Field elements of GF(r^d) are tuples ``(c_0, ..., c_{d-1})`` in the
polynomial basis ``1, x, ..., x^{d-1}``.  Whenever elements are scanned in
a deterministic order, that order is the integer ``sum(c_i * r**i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from sympy import factorint, isprime

from . import polynomial as P

Element = tuple[int, ...]


def require_prime(n: int, what: str = "modulus") -> None:
    if not isprime(n):
        raise ValueError(f"{what} must be prime, got {n}")


def prime_divisors(n: int) -> list[int]:
    return sorted(factorint(n))


def multiplicative_order(base: int, modulus: int) -> int:
    """Least d >= 1 with base**d == 1 (mod modulus), for prime modulus.

    >>> multiplicative_order(3, 11)
    5
    """
    require_prime(modulus)
    if base % modulus == 0:
        raise ValueError(f"{base} is not coprime to {modulus}")
    order = modulus - 1
    for t in prime_divisors(order):
        while order % t == 0 and pow(base, order // t, modulus) == 1:
            order //= t
    return order


def least_primitive_root(ell: int) -> int:
    require_prime(ell, "ell")
    if ell == 2:
        return 1
    ts = prime_divisors(ell - 1)
    for g in range(2, ell):
        if all(pow(g, (ell - 1) // t, ell) != 1 for t in ts):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


def is_irreducible(f: Sequence[int], r: int) -> bool:
    """Irreducibility of f over GF(r) for f of degree d >= 1.

    f is irreducible iff x^(r^d) == x mod f and gcd(x^(r^(d/t)) - x, f) = 1
    for every prime t dividing d.
    """
    f = P.monic(P.normalize(f, r), r)
    d = P.degree(f)
    if d < 1:
        return False
    if d == 1:
        return True
    x = (0, 1)

    def frobenius_power(k: int) -> P.Coeffs:
        # x^(r^k) mod f, one r-th power at a time
        y = P.mod(x, f, r)
        for _ in range(k):
            y = P.powmod(y, r, f, r)
        return y

    if P.sub(frobenius_power(d), x, r) != ():
        return False
    for t in prime_divisors(d):
        g = P.gcd(P.sub(frobenius_power(d // t), x, r), f, r)
        if g != (1,):
            return False
    return True


@dataclass(frozen=True)
class ExtensionFieldContext:
    """GF(r^d) realised as GF(r)[x] / (modulus_poly)."""

    characteristic: int
    degree: int
    modulus_poly: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if len(self.modulus_poly) != self.degree + 1 or self.modulus_poly[-1] != 1:
            raise ValueError("modulus_poly must be monic of the stated degree")

    @property
    def order(self) -> int:
        return self.characteristic ** self.degree

    # -- element helpers ---------------------------------------------------
    def element(self, coeffs: Sequence[int]) -> Element:
        r, d = self.characteristic, self.degree
        c = [int(a) % r for a in coeffs]
        if len(c) > d:
            c = list(P.mod(tuple(c), self.modulus_poly, r))
        return tuple(c + [0] * (d - len(c)))

    def encode(self, a: Element) -> int:
        r = self.characteristic
        return sum(c * r**i for i, c in enumerate(a))

    def decode(self, n: int) -> Element:
        r = self.characteristic
        out = []
        for _ in range(self.degree):
            n, c = divmod(n, r)
            out.append(c)
        return tuple(out)

    def elements(self) -> Iterator[Element]:
        for n in range(self.order):
            yield self.decode(n)

    @property
    def one(self) -> Element:
        return self.element((1,))

    @property
    def zero(self) -> Element:
        return self.element(())

    def add(self, a: Element, b: Element) -> Element:
        r = self.characteristic
        return tuple((x + y) % r for x, y in zip(a, b))

    def mul(self, a: Element, b: Element) -> Element:
        r = self.characteristic
        return self.element(P.mod(P.mul(P.normalize(a, r), P.normalize(b, r), r), self.modulus_poly, r))

    def pow(self, a: Element, e: int) -> Element:
        r = self.characteristic
        return self.element(P.powmod(P.normalize(a, r), e, self.modulus_poly, r))


def build_extension_field(r: int, d: int) -> ExtensionFieldContext:
    """GF(r^d) with the least monic irreducible modulus of degree d.

    Candidates are ordered by the integer encoding of their lower d
    coefficients, so for r=2, d=3 the result is x^3 + x + 1.
    """
    require_prime(r, "characteristic")
    if d < 1:
        raise ValueError("degree must be >= 1")
    for n in range(r**d):
        low = []
        m = n
        for _ in range(d):
            m, c = divmod(m, r)
            low.append(c)
        f = tuple(low) + (1,)
        if is_irreducible(f, r):
            return ExtensionFieldContext(r, d, f)
    raise AssertionError("unreachable: irreducible polynomials exist in every degree")


def element_of_order(ctx: ExtensionFieldContext, p: int) -> Element:
    """First y = x^((r^d - 1)/p) != 1 over x in canonical order; y has order p."""
    require_prime(p, "p")
    q1 = ctx.order - 1
    if q1 % p:
        raise ValueError(f"{p} does not divide {ctx.characteristic}^{ctx.degree} - 1 = {q1}")
    one = ctx.one
    for n in range(1, ctx.order):
        y = ctx.pow(ctx.decode(n), q1 // p)
        if y != one:
            return y
    raise AssertionError("unreachable: the multiplicative group is cyclic")


def field_trace(ctx: ExtensionFieldContext, elem: Sequence[int]) -> int:
    """Sum of the d Frobenius conjugates of elem, as a residue mod r."""
    r = ctx.characteristic
    y = ctx.element(elem)
    acc = ctx.zero
    for _ in range(ctx.degree):
        acc = ctx.add(acc, y)
        y = ctx.pow(y, r)
    if any(acc[1:]):
        raise AssertionError("trace left the prime field")
    return acc[0]


def multiplication_matrix(ctx: ExtensionFieldContext, y: Sequence[int]) -> list[list[int]]:
    """Matrix of v -> y*v on column vectors in the polynomial basis."""
    d = ctx.degree
    y = ctx.element(y)
    cols = [ctx.mul(y, ctx.element([0] * j + [1])) for j in range(d)]
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def digits_array(indices, r: int, d: int) -> np.ndarray:
    """Base-r digits of integer indices; column i holds the coefficient of r**i."""
    idx = np.asarray(indices, dtype=np.int64)
    out = np.empty(idx.shape + (d,), dtype=np.int64)
    rest = idx.copy()
    for i in range(d):
        rest, out[..., i] = np.divmod(rest, r)
    return out


def encode_array(vectors, r: int) -> np.ndarray:
    """Inverse of :func:`digits_array` along the last axis."""
    v = np.asarray(vectors, dtype=np.int64)
    weights = r ** np.arange(v.shape[-1], dtype=np.int64)
    return v @ weights
