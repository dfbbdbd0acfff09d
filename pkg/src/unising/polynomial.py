"""Polynomials over a prime field GF(p).

A polynomial a_0 + a_1 x + ... + a_n x^n is stored as the tuple
``(a_0, a_1, ..., a_n)`` of residues in ``range(p)`` with ``a_n != 0``;
the zero polynomial is the empty tuple.  The module-level functions work
on such tuples directly; :class:`PolynomialModP` is a thin immutable
wrapper used at API boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

Coeffs = tuple[int, ...]


def normalize(coeffs: Iterable[int], p: int) -> Coeffs:
    """Reduce coefficients mod p and strip trailing zeros."""
    c = [int(a) % p for a in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def degree(f: Coeffs) -> int:
    return len(f) - 1


def add(f: Coeffs, g: Coeffs, p: int) -> Coeffs:
    n = max(len(f), len(g))
    return normalize(
        ((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)), p
    )


def sub(f: Coeffs, g: Coeffs, p: int) -> Coeffs:
    n = max(len(f), len(g))
    return normalize(
        ((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0) for i in range(n)), p
    )


def scale(f: Coeffs, c: int, p: int) -> Coeffs:
    return normalize((a * c for a in f), p)


def mul(f: Coeffs, g: Coeffs, p: int) -> Coeffs:
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return normalize(out, p)


def divmod_poly(f: Coeffs, g: Coeffs, p: int) -> tuple[Coeffs, Coeffs]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(f)
    dg = len(g) - 1
    inv_lead = pow(g[-1], -1, p)
    if len(rem) <= dg:
        return (), tuple(rem)
    quot = [0] * (len(rem) - dg)
    for k in range(len(rem) - 1, dg - 1, -1):
        c = rem[k] * inv_lead % p
        if c:
            quot[k - dg] = c
            for j in range(dg + 1):
                rem[k - dg + j] = (rem[k - dg + j] - c * g[j]) % p
    return normalize(quot, p), normalize(rem[:dg], p)


def mod(f: Coeffs, g: Coeffs, p: int) -> Coeffs:
    return divmod_poly(f, g, p)[1]


def monic(f: Coeffs, p: int) -> Coeffs:
    if not f:
        return f
    return scale(f, pow(f[-1], -1, p), p)


def gcd(f: Coeffs, g: Coeffs, p: int) -> Coeffs:
    """Monic gcd (the zero polynomial if both inputs are zero)."""
    while g:
        f, g = g, mod(f, g, p)
    return monic(f, p)


def lcm(f: Coeffs, g: Coeffs, p: int) -> Coeffs:
    if not f or not g:
        return ()
    q, r = divmod_poly(mul(f, g, p), gcd(f, g, p), p)
    assert not r
    return monic(q, p)


def powmod(f: Coeffs, e: int, m: Coeffs, p: int) -> Coeffs:
    """f**e mod m by square-and-multiply."""
    result: Coeffs = mod((1,), m, p)
    base = mod(f, m, p)
    while e:
        if e & 1:
            result = mod(mul(result, base, p), m, p)
        e >>= 1
        if e:
            base = mod(mul(base, base, p), m, p)
    return result


def evaluate(f: Coeffs, x: int, p: int) -> int:
    acc = 0
    for a in reversed(f):
        acc = (acc * x + a) % p
    return acc


def to_string(f: Coeffs, var: str = "x") -> str:
    if not f:
        return "0"
    terms = []
    for i in range(len(f) - 1, -1, -1):
        a = f[i]
        if not a:
            continue
        if i == 0:
            terms.append(str(a))
        else:
            mono = var if i == 1 else f"{var}^{i}"
            terms.append(mono if a == 1 else f"{a}*{mono}")
    return " + ".join(terms)


@dataclass(frozen=True)
class PolynomialModP:
    """Polynomial over GF(modulus), coefficients low degree first."""

    modulus: int
    coefficients: Coeffs

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", normalize(self.coefficients, self.modulus))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int], modulus: int) -> "PolynomialModP":
        return cls(modulus, tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_monic(self) -> bool:
        return bool(self.coefficients) and self.coefficients[-1] == 1

    def __call__(self, x: int) -> int:
        return evaluate(self.coefficients, x, self.modulus)

    def __mul__(self, other: "PolynomialModP") -> "PolynomialModP":
        return PolynomialModP(self.modulus, mul(self.coefficients, other.coefficients, self.modulus))

    def __mod__(self, other: "PolynomialModP") -> "PolynomialModP":
        return PolynomialModP(self.modulus, mod(self.coefficients, other.coefficients, self.modulus))

    def divides(self, other: "PolynomialModP") -> bool:
        return not mod(other.coefficients, self.coefficients, self.modulus)

    def __str__(self) -> str:
        return to_string(self.coefficients)
