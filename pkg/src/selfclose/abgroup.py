"""Finitely generated abelian groups in invariant-factor form.

A group is stored as ``Z^r + Z/d_1 + ... + Z/d_k`` with ``d_1 | d_2 | ... | d_k``
and every ``d_i >= 2``.  That form is unique, so equality of groups is plain
structural equality of :class:`FgAbGroup` values.

Besides the canonical form, several places (homomorphism matrices, the
enumeration oracle) work with a *presentation*: a tuple of cyclic orders where
``0`` stands for an infinite cyclic summand.  ``FgAbGroup.gens`` gives the
presentation of the canonical generators (free generators first).

>>> G = from_cyclic_orders(0, [6, 4])
>>> G
FgAbGroup(free_rank=0, invariant_factors=(2, 12))
>>> str(direct_sum([parse_group("Z/2"), parse_group("Z/3")]))
'Z/6'
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from sympy import factorint

INFINITE = math.inf

Matrix = list[list[int]]
Presentation = tuple[int, ...]


class GroupSyntaxError(ValueError):
    """Malformed group literal; ``position`` is the 0-based offending column."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


@dataclass(frozen=True)
class FgAbGroup:
    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        factors = tuple(self.invariant_factors)
        object.__setattr__(self, "invariant_factors", factors)
        for d in factors:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise ValueError(f"invariant factors {factors} are not a divisibility chain")

    @property
    def gens(self) -> Presentation:
        return (0,) * self.free_rank + self.invariant_factors

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    @property
    def is_cyclic(self) -> bool:
        return self.free_rank + len(self.invariant_factors) <= 1

    @property
    def torsion(self) -> FgAbGroup:
        return FgAbGroup(0, self.invariant_factors)

    def __str__(self) -> str:
        return format_group(self)

    @classmethod
    def parse(cls, text: str) -> FgAbGroup:
        return parse_group(text)


TRIVIAL = FgAbGroup()
Z = FgAbGroup(1)


def cyclic(n: int) -> FgAbGroup:
    """``Z/n`` for ``n >= 2``, ``Z`` for ``n == 0``, trivial for ``n == 1``."""
    if n == 0:
        return Z
    if n == 1:
        return TRIVIAL
    return from_cyclic_orders(0, [n])


@dataclass(frozen=True)
class PrimaryComponent:
    prime: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(self.exponents)
        object.__setattr__(self, "exponents", exps)
        if not exps:
            raise ValueError("primary component needs at least one exponent")
        if any(e < 1 for e in exps) or list(exps) != sorted(exps):
            raise ValueError(f"exponents must be positive and ascending: {exps}")
        if len(factorint(self.prime)) != 1 or factorint(self.prime).get(self.prime) != 1:
            raise ValueError(f"{self.prime} is not prime")

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(self.prime**e for e in self.exponents)

    @property
    def group(self) -> FgAbGroup:
        return from_cyclic_orders(0, self.orders)


def _prime_powers(orders: Iterable[int]) -> dict[int, list[int]]:
    by_prime: dict[int, list[int]] = defaultdict(list)
    for n in orders:
        for p, e in factorint(n).items():
            by_prime[p].append(e)
    return by_prime


def from_cyclic_orders(free_rank: int, orders: Sequence[int]) -> FgAbGroup:
    """Canonical form of ``Z^free_rank + Z/orders[0] + Z/orders[1] + ...``."""
    if free_rank < 0:
        raise ValueError("free rank must be non-negative")
    for n in orders:
        if n <= 1:
            raise ValueError(f"cyclic order {n} must be >= 2")
    by_prime = _prime_powers(orders)
    length = max((len(v) for v in by_prime.values()), default=0)
    factors = [1] * length
    for p, exps in by_prime.items():
        exps = sorted(exps, reverse=True)
        # largest exponent goes into the last (largest) invariant factor
        for i, e in enumerate(exps):
            factors[length - 1 - i] *= p**e
    return FgAbGroup(free_rank, tuple(factors))


def group_of(presentation: Iterable[int]) -> FgAbGroup:
    """Canonical group of a presentation (0 = infinite cyclic, 1 = trivial summand)."""
    pres = list(presentation)
    if any(o < 0 for o in pres):
        raise ValueError(f"negative cyclic order in {pres}")
    return from_cyclic_orders(pres.count(0), [o for o in pres if o > 1])


def as_presentation(G: FgAbGroup | Iterable[int]) -> Presentation:
    if isinstance(G, FgAbGroup):
        return G.gens
    pres = tuple(int(o) for o in G)
    if any(o < 0 or o == 1 for o in pres):
        raise ValueError(f"presentation orders must be 0 or >= 2: {pres}")
    return pres


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U*A*V == D`` in Smith normal form.

    ``U`` and ``V`` are unimodular.  The diagonal of ``D`` is non-negative and
    each entry divides the next (zeros trail).  ``A`` may be empty.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(x) for x in row] for row in A]
    if any(len(row) != n for row in D):
        raise ValueError("ragged matrix")
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        for M in (D, U):
            rd, rs = M[dst], M[src]
            for c in range(len(rd)):
                rd[c] += q * rs[c]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for M in (D, V):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            pivot = None
            best = 0
            for i in range(t, m):
                for j in range(t, n):
                    v = abs(D[i][j])
                    if v and (pivot is None or v < best):
                        pivot, best = (i, j), v
            if pivot is None:
                return U, D, V
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                q = D[i][t] // p
                if q:
                    add_row(i, t, -q)
                if D[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = D[t][j] // p
                if q:
                    add_col(j, t, -q)
                if D[t][j]:
                    clean = False
            if not clean:
                continue
            offender = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if offender is None:
                break
            add_row(t, offender, 1)
        if D[t][t] < 0:
            for M in (D, U):
                M[t] = [-x for x in M[t]]
    return U, D, V


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def snf_diagonal(A: Sequence[Sequence[int]]) -> list[int]:
    _, D, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def cokernel(A: Sequence[Sequence[int]], rows: int | None = None) -> FgAbGroup:
    """The group ``Z^rows / (column span of A)``."""
    rows = len(A) if rows is None else rows
    if rows == 0:
        return TRIVIAL
    if not A or not A[0]:
        return FgAbGroup(rows)
    diag = snf_diagonal(A)
    free = rows - sum(1 for d in diag if d)
    return from_cyclic_orders(free, [d for d in diag if d > 1])


def primary_decomposition(G: FgAbGroup) -> list[PrimaryComponent]:
    """p-primary components of the torsion of ``G``, ordered by prime."""
    by_prime = _prime_powers(G.invariant_factors)
    return [PrimaryComponent(p, tuple(sorted(by_prime[p]))) for p in sorted(by_prime)]


def elementary_divisors(G: FgAbGroup) -> list[tuple[int, int]]:
    """``(p, r)`` pairs, one per indecomposable summand ``Z/p^r``."""
    return [(c.prime, e) for c in primary_decomposition(G) for e in c.exponents]


def direct_sum(groups: Iterable[FgAbGroup]) -> FgAbGroup:
    free = 0
    orders: list[int] = []
    for G in groups:
        free += G.free_rank
        orders.extend(G.invariant_factors)
    return from_cyclic_orders(free, orders)


def order(G: FgAbGroup) -> int | float:
    """``|G|``, or ``INFINITE`` when ``G`` has positive free rank."""
    if G.free_rank:
        return INFINITE
    return math.prod(G.invariant_factors)


def composition_length(G: FgAbGroup | Iterable[int]) -> int:
    """Number of prime factors of ``|torsion|`` counted with multiplicity."""
    pres = G.invariant_factors if isinstance(G, FgAbGroup) else [o for o in G if o > 1]
    return sum(sum(factorint(d).values()) for d in pres)


def hom_group(G: FgAbGroup, H: FgAbGroup) -> FgAbGroup:
    """Canonical form of ``Hom(G, H)``, assembled summand by summand."""
    free = G.free_rank * H.free_rank
    orders = list(H.invariant_factors) * G.free_rank
    for a in G.invariant_factors:
        orders.extend(math.gcd(a, b) for b in H.invariant_factors)
    return from_cyclic_orders(free, [o for o in orders if o > 1])


def ulm_kaplansky(C: PrimaryComponent, s: int) -> int:
    if s < 0:
        raise ValueError("s must be non-negative")
    return sum(1 for r in C.exponents if r > s) - sum(1 for r in C.exponents if r > s + 1)


def has_common_direct_factor(G: FgAbGroup, H: FgAbGroup) -> bool:
    """True iff ``G`` and ``H`` share an indecomposable summand (``Z`` or ``Z/p^r``)."""
    if G.free_rank and H.free_rank:
        return True
    return bool(set(elementary_divisors(G)) & set(elementary_divisors(H)))


# -- literal syntax ---------------------------------------------------------

_TERM = re.compile(r"\s*(?:(Z)\s*(?:/\s*(\d+))?|(0))\s*")


def parse_group(text: str) -> FgAbGroup:
    """Parse ``Z``, ``Z/n``, ``0`` and ``+``-separated sums of those."""
    pos = 0
    free = 0
    orders: list[int] = []
    saw_zero = False
    terms = 0
    while True:
        m = _TERM.match(text, pos)
        if not m or m.end() == m.start() or not (m.group(1) or m.group(3)):
            raise GroupSyntaxError("expected 'Z', 'Z/n' or '0'", text, _skip_ws(text, pos))
        terms += 1
        if m.group(3):
            saw_zero = True
        elif m.group(2) is None:
            free += 1
        else:
            n = int(m.group(2))
            if n <= 1:
                raise GroupSyntaxError(f"cyclic order {n} must be >= 2", text, m.start(2))
            orders.append(n)
        pos = m.end()
        if pos == len(text):
            break
        if text[pos] != "+":
            raise GroupSyntaxError("expected '+'", text, pos)
        pos += 1
    if saw_zero and terms > 1:
        raise GroupSyntaxError("'0' cannot be combined with other summands", text, 0)
    return from_cyclic_orders(free, orders)


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def format_group(G: FgAbGroup) -> str:
    if G.is_trivial:
        return "0"
    parts = ["Z"] * G.free_rank + [f"Z/{d}" for d in G.invariant_factors]
    return "+".join(parts)
