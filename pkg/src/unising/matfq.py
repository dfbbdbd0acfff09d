"""Exact dense linear algebra over prime fields.

Matrices act on column vectors.  All arithmetic is done on int64 numpy
arrays reduced mod the field prime after every product, which is exact
as long as ``n * p**2`` fits in 63 bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime

from . import polynomial as P
from .ff_core import prime_divisors
from .polynomial import PolynomialModP

__all__ = [
    "MatrixModP",
    "PolynomialModP",
    "char_poly",
    "min_poly",
    "min_poly_degree",
    "has_eigenvalue_one",
    "fixed_space_dim",
    "multiplicative_jordan_parts",
    "matrix_order",
    "rank_mod",
    "parse_matrix",
    "format_matrix",
]


def rank_mod(a: np.ndarray, p: int) -> int:
    """Rank of a (not necessarily square) integer matrix over GF(p)."""
    a = np.array(a, dtype=np.int64) % p
    m, n = a.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        below = a[r + 1 :, c]
        if below.any():
            a[r + 1 :] = (a[r + 1 :] - np.outer(below, a[r])) % p
        r += 1
    return r


@dataclass(frozen=True, eq=False)
class MatrixModP:
    """Square matrix over GF(modulus); entries are reduced on construction."""

    modulus: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        if not isprime(self.modulus):
            raise ValueError(f"modulus must be prime, got {self.modulus}")
        a = np.array(self.entries, dtype=np.int64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        a %= self.modulus
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], modulus: int) -> "MatrixModP":
        return cls(modulus, np.array(rows, dtype=np.int64))

    @classmethod
    def identity(cls, n: int, modulus: int) -> "MatrixModP":
        return cls(modulus, np.eye(n, dtype=np.int64))

    @classmethod
    def diagonal(cls, diag: Sequence[int], modulus: int) -> "MatrixModP":
        return cls(modulus, np.diag(np.asarray(diag, dtype=np.int64)))

    @classmethod
    def companion(cls, poly: Sequence[int] | PolynomialModP, modulus: int | None = None) -> "MatrixModP":
        """Companion matrix of a monic polynomial (coefficients low degree first)."""
        if isinstance(poly, PolynomialModP):
            modulus, coeffs = poly.modulus, poly.coefficients
        else:
            if modulus is None:
                raise ValueError("modulus required")
            coeffs = P.normalize(poly, modulus)
        n = len(coeffs) - 1
        if n < 1 or coeffs[-1] != 1:
            raise ValueError("companion matrix needs a monic polynomial of degree >= 1")
        a = np.zeros((n, n), dtype=np.int64)
        a[np.arange(1, n), np.arange(n - 1)] = 1
        a[:, n - 1] = [-c for c in coeffs[:-1]]
        return cls(modulus, a)

    @classmethod
    def permutation(cls, images: Sequence[int], modulus: int) -> "MatrixModP":
        """Matrix sending basis vector e_i to e_{images[i]}."""
        n = len(images)
        a = np.zeros((n, n), dtype=np.int64)
        a[list(images), np.arange(n)] = 1
        return cls(modulus, a)

    @classmethod
    def block_diag(cls, blocks: Iterable["MatrixModP"]) -> "MatrixModP":
        blocks = list(blocks)
        modulus = blocks[0].modulus
        n = sum(b.n for b in blocks)
        a = np.zeros((n, n), dtype=np.int64)
        k = 0
        for b in blocks:
            if b.modulus != modulus:
                raise ValueError("blocks over different fields")
            a[k : k + b.n, k : k + b.n] = b.entries
            k += b.n
        return cls(modulus, a)

    # -- basic algebra -----------------------------------------------------
    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixModP):
            return NotImplemented
        return self.modulus == other.modulus and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash((self.modulus, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"MatrixModP(modulus={self.modulus}, entries={self.entries.tolist()})"

    def __matmul__(self, other: "MatrixModP") -> "MatrixModP":
        if self.modulus != other.modulus:
            raise ValueError("matrices over different fields")
        return MatrixModP(self.modulus, self.entries @ other.entries % self.modulus)

    def apply(self, v: Sequence[int]) -> np.ndarray:
        return self.entries @ np.asarray(v, dtype=np.int64) % self.modulus

    def is_identity(self) -> bool:
        return np.array_equal(self.entries, np.eye(self.n, dtype=np.int64))

    def is_diagonal(self) -> bool:
        return not np.count_nonzero(self.entries - np.diag(np.diagonal(self.entries)))

    def inverse(self) -> "MatrixModP":
        p, n = self.modulus, self.n
        aug = np.concatenate([self.entries, np.eye(n, dtype=np.int64)], axis=1)
        for c in range(n):
            nz = np.flatnonzero(aug[c:, c])
            if nz.size == 0:
                raise ZeroDivisionError("matrix is singular")
            piv = c + nz[0]
            if piv != c:
                aug[[c, piv]] = aug[[piv, c]]
            aug[c] = aug[c] * pow(int(aug[c, c]), -1, p) % p
            col = aug[:, c].copy()
            col[c] = 0
            aug = (aug - np.outer(col, aug[c])) % p
        return MatrixModP(p, aug[:, n:])

    def __pow__(self, e: int) -> "MatrixModP":
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        p = self.modulus
        result = np.eye(self.n, dtype=np.int64)
        b = base.entries
        while e:
            if e & 1:
                result = result @ b % p
            e >>= 1
            if e:
                b = b @ b % p
        return MatrixModP(p, result)

    def rank(self) -> int:
        return rank_mod(self.entries, self.modulus)

    def minus_identity(self) -> np.ndarray:
        return (self.entries - np.eye(self.n, dtype=np.int64)) % self.modulus

    def poly_eval(self, f: Sequence[int] | PolynomialModP) -> "MatrixModP":
        """f(M) by Horner's rule."""
        coeffs = f.coefficients if isinstance(f, PolynomialModP) else tuple(f)
        p, n = self.modulus, self.n
        acc = np.zeros((n, n), dtype=np.int64)
        eye = np.eye(n, dtype=np.int64)
        for c in reversed(coeffs):
            acc = (acc @ self.entries + c * eye) % p
        return MatrixModP(p, acc)


# -- characteristic and minimal polynomials --------------------------------


def char_poly(m: MatrixModP) -> PolynomialModP:
    """det(xI - M), via reduction to upper Hessenberg form."""
    p, n = m.modulus, m.n
    h = m.entries.copy()
    for k in range(1, n - 1):
        nz = np.flatnonzero(h[k:, k - 1])
        if nz.size == 0:
            continue
        i = k + nz[0]
        if i != k:
            h[[i, k]] = h[[k, i]]
            h[:, [i, k]] = h[:, [k, i]]
        t_inv = pow(int(h[k, k - 1]), -1, p)
        for i in range(k + 1, n):
            u = int(h[i, k - 1]) * t_inv % p
            if u:
                h[i] = (h[i] - u * h[k]) % p
                h[:, k] = (h[:, k] + u * h[:, i]) % p
    # polys[m] is the char poly of the leading m x m block
    polys: list[P.Coeffs] = [(1,)]
    for j in range(n):
        cur = P.mul((-int(h[j, j]) % p, 1), polys[j], p)
        t = 1
        for i in range(j - 1, -1, -1):
            t = t * int(h[i + 1, i]) % p
            if not t:
                break
            cur = P.sub(cur, P.scale(polys[i], t * int(h[i, j]), p), p)
        polys.append(cur)
    return PolynomialModP(p, polys[n])


def _krylov_min_poly(a: np.ndarray, v: np.ndarray, p: int) -> P.Coeffs:
    """Monic minimal polynomial of the sequence v, Av, A^2 v, ... over GF(p)."""
    n = a.shape[0]
    basis: list[tuple[int, np.ndarray, np.ndarray]] = []
    w = v % p
    for k in range(n + 1):
        coeffs = np.zeros(n + 1, dtype=np.int64)
        coeffs[k] = 1
        cur = w.copy()
        for col, vec, poly in basis:
            c = cur[col]
            if c:
                cur = (cur - c * vec) % p
                coeffs = (coeffs - c * poly) % p
        nz = np.flatnonzero(cur)
        if nz.size == 0:
            return P.monic(P.normalize(coeffs.tolist(), p), p)
        col = int(nz[0])
        inv = pow(int(cur[col]), -1, p)
        basis.append((col, cur * inv % p, coeffs * inv % p))
        w = a @ w % p
    raise AssertionError("Krylov sequence failed to terminate within n + 1 steps")


def min_poly(m: MatrixModP) -> PolynomialModP:
    """Least-degree monic annihilating polynomial.

    LCM of the local minimal polynomials of the Krylov sequences started at
    each standard basis vector, stopping early once the degree reaches n.
    """
    p, n = m.modulus, m.n
    acc: P.Coeffs = (1,)
    for i in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[i] = 1
        acc = P.lcm(acc, _krylov_min_poly(m.entries, e, p), p)
        if P.degree(acc) == n:
            break
    return PolynomialModP(p, acc)


def min_poly_degree(m: MatrixModP) -> int:
    return min_poly(m).degree


# -- eigenvalue 1 ----------------------------------------------------------


def fixed_space_dim(m: MatrixModP) -> int:
    """dim C_V(M) = n - rank(M - I)."""
    if m.is_diagonal():
        return int(np.count_nonzero(np.diagonal(m.entries) == 1))
    return m.n - rank_mod(m.minus_identity(), m.modulus)


def has_eigenvalue_one(m: MatrixModP) -> bool:
    if m.is_diagonal():
        return bool(np.any(np.diagonal(m.entries) == 1))
    return rank_mod(m.minus_identity(), m.modulus) < m.n


def _check_order(m: MatrixModP, order: int) -> None:
    if order < 1:
        raise ValueError("order must be positive")
    if not (m**order).is_identity():
        raise ValueError(f"M^{order} != I")
    for t in prime_divisors(order) if order > 1 else []:
        if (m ** (order // t)).is_identity():
            raise ValueError(f"{order} is not the exact order of M (M^{order // t} = I)")


def multiplicative_jordan_parts(m: MatrixModP, order: int) -> tuple[MatrixModP, MatrixModP]:
    """Split M of the given exact order into commuting s (ell'-part) and u (ell-part).

    With order = ell^k * m' and gcd(ell, m') = 1, s = M^a and u = M^b where
    a = 1 mod m', a = 0 mod ell^k and b = 0 mod m', b = 1 mod ell^k.
    """
    _check_order(m, order)
    ell = m.modulus
    ell_k = 1
    while order % (ell_k * ell) == 0:
        ell_k *= ell
    rest = order // ell_k
    a = ell_k * pow(ell_k, -1, rest) % order if rest > 1 else 0
    b = rest * pow(rest, -1, ell_k) % order if ell_k > 1 else 0
    return m**a, m**b


def matrix_order(m: MatrixModP, bound: int = 10**6) -> int:
    """Multiplicative order of an invertible matrix, by repeated multiplication."""
    p = m.modulus
    eye = np.eye(m.n, dtype=np.int64)
    cur = m.entries.copy()
    for k in range(1, bound + 1):
        if np.array_equal(cur, eye):
            return k
        cur = cur @ m.entries % p
    raise ValueError(f"order exceeds bound {bound} (or matrix is singular)")


# -- text format -----------------------------------------------------------


def parse_matrix(text: str) -> MatrixModP:
    """Parse ``p=<modulus> n=<size>`` followed by n rows of n integers."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    header: dict[str, int] = {}
    for tok in lines[0].split():
        key, _, val = tok.partition("=")
        if key not in ("p", "n") or not val:
            raise ValueError(f"bad header token {tok!r}; expected 'p=<modulus> n=<size>'")
        header[key] = int(val)
    if set(header) != {"p", "n"}:
        raise ValueError("header must give both p and n")
    n = header["n"]
    rows = [[int(x) for x in ln.split()] for ln in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected {n} rows of {n} integers")
    return MatrixModP.from_rows(rows, header["p"])


def format_matrix(m: MatrixModP) -> str:
    lines = [f"p={m.modulus} n={m.n}"]
    lines += [" ".join(str(int(x)) for x in row) for row in m.entries]
    return "\n".join(lines) + "\n"

