"""Weights of simple Lie types in the fundamental-weight basis.

Cartan matrices use Bourbaki numbering with a_ij = <alpha_i, alpha_j^vee>,
so row j of the matrix is the simple root alpha_j written in fundamental
weights.  For B_2 that gives alpha_1 = 2w1 - 2w2 (long) and
alpha_2 = -w1 + 2w2 (short).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .errors import BudgetExceeded

FAMILIES = "ABCDEFG"
DEFAULT_ORBIT_BUDGET = 10**6

SUPERSET_CAVEAT = (
    "positive verdict computed on a saturated (superset) weight set; it holds for the "
    "irreducible module only if the listed weights are genuinely weights of that module"
)


@dataclass(frozen=True)
class LieTypeSpec:
    family: str
    rank: int

    def __post_init__(self) -> None:
        f, n = self.family.upper(), self.rank
        object.__setattr__(self, "family", f)
        ok = {
            "A": n >= 1,
            "B": n >= 2,
            "C": n >= 2,
            "D": n >= 3,
            "E": n in (6, 7, 8),
            "F": n == 4,
            "G": n == 2,
        }.get(f)
        if not ok:
            raise ValueError(f"invalid Lie type {self.family}{self.rank}")

    @classmethod
    def parse(cls, text: str) -> "LieTypeSpec":
        text = text.strip()
        return cls(text[0], int(text[1:]))

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


@dataclass(frozen=True)
class WeightVec:
    type: LieTypeSpec
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) != self.type.rank:
            raise ValueError(f"{self.type} weights need {self.type.rank} coefficients, got {len(self.coeffs)}")

    @property
    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coeffs)


def cartan_matrix(t: LieTypeSpec) -> list[list[int]]:
    n = t.rank
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i: int, j: int, aij: int = -1, aji: int = -1) -> None:
        a[i][j], a[j][i] = aij, aji

    f = t.family
    if f in "ABC":
        for i in range(n - 1):
            link(i, i + 1)
        if f == "B":
            link(n - 2, n - 1, -2, -1)
        elif f == "C":
            link(n - 2, n - 1, -1, -2)
    elif f == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif f == "E":
        # Bourbaki: 1-3-4-5-6(-7-8), with 2 attached to 4
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif f == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif f == "G":
        link(0, 1, -1, -3)
    return a


def simple_roots(t: LieTypeSpec) -> list[tuple[int, ...]]:
    return [tuple(row) for row in cartan_matrix(t)]


def _solve_rational(a: list[list[int]], b: Sequence[int]) -> list[Fraction]:
    """Solve a x = b exactly (a square, nonsingular)."""
    n = len(a)
    m = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(a)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [vi - f * vc for vi, vc in zip(m[i], m[c])]
    return [m[i][n] for i in range(n)]


def _transpose(a: list[list[int]]) -> list[list[int]]:
    return [list(col) for col in zip(*a)]


def root_coordinates(w: WeightVec) -> list[Fraction]:
    """x with w = sum_j x_j alpha_j, i.e. the solution of C^T x = coeffs."""
    return _solve_rational(_transpose(cartan_matrix(w.type)), w.coeffs)


def in_root_lattice(w: WeightVec) -> bool:
    return all(x.denominator == 1 for x in root_coordinates(w))


def _subtract_roots(w: Sequence[int], x: Sequence[int], roots: list[tuple[int, ...]]) -> tuple[int, ...]:
    out = list(w)
    for xj, alpha in zip(x, roots):
        if xj:
            for i, a in enumerate(alpha):
                out[i] -= xj * a
    return tuple(out)


def dominant_weights_below(lam: WeightVec, budget: int = DEFAULT_ORBIT_BUDGET) -> set[WeightVec]:
    """Dominant mu with lam - mu a non-negative integer combination of simple roots.

    The inverse Cartan matrix has non-negative entries, so the root
    coordinates of lam - mu are bounded by those of lam; the box below that
    bound is enumerated directly.
    """
    if not lam.is_dominant:
        raise ValueError(f"{lam.coeffs} is not dominant")
    roots = simple_roots(lam.type)
    bound = [int(x) for x in (x.__floor__() for x in root_coordinates(lam))]
    size = 1
    for b in bound:
        size *= b + 1
    if size > budget:
        raise BudgetExceeded(f"{size} candidate root combinations exceed budget {budget}")
    out = set()
    for x in product(*(range(b + 1) for b in bound)):
        mu = _subtract_roots(lam.coeffs, x, roots)
        if all(c >= 0 for c in mu):
            out.add(WeightVec(lam.type, mu))
    return out


def weyl_orbit(w: WeightVec, budget: int = DEFAULT_ORBIT_BUDGET) -> set[WeightVec]:
    """Closure of w under the simple reflections s_i(v) = v - v_i alpha_i."""
    roots = simple_roots(w.type)
    seen = {w.coeffs}
    queue = deque([w.coeffs])
    while queue:
        v = queue.popleft()
        for i, alpha in enumerate(roots):
            if v[i] == 0:
                continue
            u = tuple(vk - v[i] * ak for vk, ak in zip(v, alpha))
            if u not in seen:
                seen.add(u)
                if len(seen) > budget:
                    raise BudgetExceeded(f"Weyl orbit of {w.coeffs} exceeds budget {budget}")
                queue.append(u)
    return {WeightVec(w.type, c) for c in seen}


def saturated_weight_set(lam: WeightVec, budget: int = DEFAULT_ORBIT_BUDGET) -> set[WeightVec]:
    """All Weyl conjugates of the dominant weights below lam."""
    out: set[WeightVec] = set()
    for mu in dominant_weights_below(lam, budget):
        out |= weyl_orbit(mu, budget - len(out))
        if len(out) > budget:
            raise BudgetExceeded(f"saturated set of {lam.coeffs} exceeds budget {budget}")
    return out


def gl2_unisingular_criterion(n: int, bits: Sequence[int]) -> bool:
    """Unisingularity of the nontrivial irreducible GL_n(2)-module with restricted weight bits.

    Holds iff sum a_i * i >= n and sum a_i * (n - i) >= n.
    """
    bits = [int(b) for b in bits]
    if n < 2:
        raise ValueError("n must be >= 2")
    if len(bits) != n - 1:
        raise ValueError(f"expected {n - 1} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0 or 1")
    if not any(bits):
        raise ValueError("the trivial module (all bits zero) is outside the criterion")
    left = sum(a * i for i, a in enumerate(bits, start=1))
    right = sum(a * (n - i) for i, a in enumerate(bits, start=1))
    return left >= n and right >= n


@dataclass(frozen=True)
class S21Result:
    holds: bool
    witnesses: dict
    superset_based: bool

    @property
    def caveat(self) -> str | None:
        return SUPERSET_CAVEAT if self.holds and self.superset_based else None


def _fundamental(rank: int, i: int, scale: int = 1) -> tuple[int, ...]:
    return tuple(scale if k == i else 0 for k in range(rank))


def _add(*ws: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sum(c) for c in zip(*ws))


def s21_condition(t: LieTypeSpec, q: int, weights: Iterable[WeightVec], superset_based: bool = True) -> S21Result:
    """Search for the weight patterns that force every semisimple element to have eigenvalue 1.

    Type A_n: m1(q-1)w_i + w_1 + w_n and m2(q-1)w_i both present, some i.
    Types C_n (n > 1) and D_n (n > 3): m1(q+1)w_1, m2(q-1)w_1 and
    m3(q-1)w_1 + w_2 all present.  Each m ranges over 1..M with
    M = max|coefficient| // (q - 1) + 1.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    if not (t.family == "A" or t.family == "C" and t.rank > 1 or t.family == "D" and t.rank > 3):
        raise ValueError(f"type {t} is not supported (A_n, C_n n>1, D_n n>3)")
    present = set()
    for w in weights:
        if w.type != t:
            raise ValueError(f"weight {w.coeffs} has type {w.type}, expected {t}")
        present.add(w.coeffs)
    n = t.rank
    biggest = max((abs(c) for w in present for c in w), default=0)
    bound = biggest // (q - 1) + 1
    ms = range(1, bound + 1)

    if t.family == "A":
        ends = _add(_fundamental(n, 0), _fundamental(n, n - 1))
        for i in range(n):
            m1 = next((m for m in ms if _add(_fundamental(n, i, m * (q - 1)), ends) in present), None)
            m2 = next((m for m in ms if _fundamental(n, i, m * (q - 1)) in present), None)
            if m1 is not None and m2 is not None:
                return S21Result(True, {"i": i + 1, "m1": m1, "m2": m2}, superset_based)
        return S21Result(False, {}, superset_based)

    m1 = next((m for m in ms if _fundamental(n, 0, m * (q + 1)) in present), None)
    m2 = next((m for m in ms if _fundamental(n, 0, m * (q - 1)) in present), None)
    m3 = next((m for m in ms if _add(_fundamental(n, 0, m * (q - 1)), _fundamental(n, 1)) in present), None)
    if None in (m1, m2, m3):
        return S21Result(False, {}, superset_based)
    return S21Result(True, {"m1": m1, "m2": m2, "m3": m3}, superset_based)


def parse_weight_file(text: str) -> tuple[LieTypeSpec, list[WeightVec]]:
    """``type=<family><rank>`` then one weight per line."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].startswith("type="):
        raise ValueError("weight file must start with 'type=<family><rank>'")
    t = LieTypeSpec.parse(lines[0][len("type=") :])
    return t, [WeightVec(t, tuple(int(x) for x in ln.split())) for ln in lines[1:]]


def format_weight_file(t: LieTypeSpec, weights: Iterable[WeightVec]) -> str:
    rows = sorted(w.coeffs for w in weights)
    return f"type={t}\n" + "".join(" ".join(map(str, c)) + "\n" for c in rows)
