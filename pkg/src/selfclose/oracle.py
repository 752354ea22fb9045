"""Brute-force ground truth on small finite abelian groups.

Every endomorphism is represented by its *image table*: the array of indices of
``f(x)`` for every element ``x`` of the group.  Composition is fancy indexing,
addition goes through the group's addition table, and bijectivity is a
permutation check.  None of this goes through the matrix algebra in
:mod:`selfclose.homs`, so the two can be played against each other.

Rings too large to hold in memory are streamed in chunks of image tables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from sympy import factorint

from .abgroup import (
    FgAbGroup,
    PrimaryComponent,
    as_presentation,
    from_cyclic_orders,
    has_common_direct_factor,
)
from .homs import block_map, lu_factorize, make_hom, block_compose

DEFAULT_MAX_ORDER = 64
DEFAULT_MAX_END = 1 << 17
CHUNK = 2048


class BoundExceeded(ValueError):
    pass


def _partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def abelian_groups_of_order(n: int) -> list[FgAbGroup]:
    """All abelian groups of order ``n`` up to isomorphism."""
    per_prime = [
        [[p**e for e in part] for part in _partitions(k)] for p, k in sorted(factorint(n).items())
    ]
    return [
        from_cyclic_orders(0, [o for chunk in combo for o in chunk])
        for combo in itertools.product(*per_prime)
    ]


def p_groups(p: int, max_order: int) -> list[PrimaryComponent]:
    out = []
    k = 1
    while p**k <= max_order:
        out.extend(PrimaryComponent(p, tuple(sorted(part))) for part in _partitions(k))
        k += 1
    return out


class FiniteGroup:
    """Explicit element list and addition table of ``Z/o_1 + ... + Z/o_n``."""

    def __init__(self, orders: Sequence[int]):
        self.orders = tuple(int(o) for o in orders)
        if any(o < 1 for o in self.orders):
            raise ValueError("finite presentation required")
        self.n = len(self.orders)
        self.size = math.prod(self.orders)
        # index = sum coord_i * weight_i, last coordinate fastest
        w = [1] * self.n
        for i in range(self.n - 2, -1, -1):
            w[i] = w[i + 1] * self.orders[i + 1]
        self.weights = np.array(w, dtype=np.int64)
        self.ords = np.array(self.orders, dtype=np.int64)
        if self.n:
            grids = np.indices(self.orders).reshape(self.n, -1).T
        else:
            grids = np.zeros((1, 0), dtype=np.int64)
        self.elements = grids.astype(np.int64)
        self.add_table = self.index((self.elements[:, None, :] + self.elements[None, :, :]) % self.ords)
        self.neg = self.index((-self.elements) % self.ords)

    def index(self, coords: np.ndarray) -> np.ndarray:
        return (coords * self.weights).sum(axis=-1)

    def multiple(self, k: int) -> np.ndarray:
        return self.index((k * self.elements) % self.ords)

    def element_orders(self) -> np.ndarray:
        out = np.ones(self.size, dtype=np.int64)
        for i, o in enumerate(self.orders):
            c = self.elements[:, i]
            out = np.lcm(out, o // np.gcd(c, o))
        return out


@dataclass
class EndRing:
    """``End(G)`` of a finite group, enumerated lazily by parameter index."""

    group: FgAbGroup
    orders: tuple[int, ...]
    G: FiniteGroup = field(repr=False)
    steps: np.ndarray = field(repr=False)
    radices: np.ndarray = field(repr=False)
    size: int = 0
    _all: np.ndarray | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return self.G.size

    def params(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        flat = self.radices.reshape(-1)
        out = np.empty((idx.size, flat.size), dtype=np.int64)
        rem = idx.copy()
        for pos in range(flat.size - 1, -1, -1):
            out[:, pos] = rem % flat[pos]
            rem //= flat[pos]
        return out

    def matrices(self, idx: Iterable[int]) -> np.ndarray:
        n = self.G.n
        p = self.params(np.fromiter(idx, dtype=np.int64))
        return (p * self.steps.reshape(-1)).reshape(len(p), n, n)

    def matrix(self, i: int) -> list[list[int]]:
        return self.matrices([i])[0].tolist()

    def tables(self, idx: Iterable[int] | np.ndarray) -> np.ndarray:
        if self._all is not None:
            return self._all[np.asarray(list(idx) if not isinstance(idx, np.ndarray) else idx)]
        M = self.matrices(idx)
        if self.G.n == 0:
            return np.zeros((M.shape[0], 1), dtype=np.int64)
        imgs = np.einsum("bij,xj->bxi", M, self.G.elements) % self.G.ords
        return self.G.index(imgs)

    def table_of(self, matrix: Sequence[Sequence[int]]) -> np.ndarray:
        M = np.array(matrix, dtype=np.int64).reshape(self.G.n, self.G.n)
        if self.G.n == 0:
            return np.zeros(1, dtype=np.int64)
        return self.G.index((self.G.elements @ M.T) % self.G.ords)

    def all_tables(self) -> np.ndarray:
        if self._all is None:
            if self.size > DEFAULT_MAX_END * 4:
                raise BoundExceeded(f"|End| = {self.size} too large to materialize")
            self._all = self.tables(np.arange(self.size))
        return self._all

    def chunks(self, order: np.ndarray | None = None, size: int = CHUNK) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        idx = np.arange(self.size, dtype=np.int64) if order is None else order
        for start in range(0, len(idx), size):
            part = idx[start : start + size]
            yield part, self.tables(part)

    @property
    def identity(self) -> np.ndarray:
        return np.arange(self.G.size, dtype=np.int64)

    @property
    def zero(self) -> np.ndarray:
        return np.zeros(self.G.size, dtype=np.int64)

    def hom(self, i: int):
        return make_hom(self.orders, self.orders, self.matrix(i))


def enumerate_end(
    G: FgAbGroup | Sequence[int],
    max_order: int = DEFAULT_MAX_ORDER,
    max_end: int | None = DEFAULT_MAX_END,
) -> EndRing:
    orders = as_presentation(G)
    if any(o == 0 for o in orders):
        raise BoundExceeded("infinite group")
    group = G if isinstance(G, FgAbGroup) else from_cyclic_orders(0, list(orders))
    fg = FiniteGroup(orders)
    if fg.size > max_order:
        raise BoundExceeded(f"|G| = {fg.size} exceeds bound {max_order}")
    n = len(orders)
    steps = np.ones((n, n), dtype=np.int64)
    radices = np.ones((n, n), dtype=np.int64)
    for i, b in enumerate(orders):
        for j, a in enumerate(orders):
            g = math.gcd(a, b)
            radices[i, j] = g
            steps[i, j] = b // g
    size = int(np.prod(radices)) if n else 1
    ring = EndRing(group, orders, fg, steps, radices, size)
    if max_end is not None and size <= max_end:
        ring.all_tables()
    return ring


# -- elementwise predicates on image tables ---------------------------------


def is_bijective(table: np.ndarray) -> bool:
    return bool(np.array_equal(np.sort(table), np.arange(table.shape[-1])))


def bijective_rows(tables: np.ndarray) -> np.ndarray:
    return (np.sort(tables, axis=1) == np.arange(tables.shape[1])).all(axis=1)


def compose_tables(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Image table of ``f ∘ g``; ``f`` may be a batch."""
    return f[..., g] if f.ndim == 1 else f[:, g]


def add_tables(G: FiniteGroup, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    return G.add_table[f, g]


def is_nilpotent_table(table: np.ndarray) -> bool:
    seen = set()
    cur = table
    while True:
        if not cur.any():
            return True
        key = cur.tobytes()
        if key in seen:
            return False
        seen.add(key)
        cur = table[cur]


def is_homomorphism_table(G: FiniteGroup, table: np.ndarray) -> bool:
    return bool((table[G.add_table] == G.add_table[table[:, None], table[None, :]]).all())


def one_plus(G: FiniteGroup, tables: np.ndarray) -> np.ndarray:
    return G.add_table[np.arange(G.size), tables]


def one_plus_is_unit(G: FiniteGroup, tables: np.ndarray) -> np.ndarray:
    """Row-wise: is ``1 + y`` bijective?  Its kernel is ``{g : y(g) = -g}``."""
    return ~(tables[..., 1:] == G.neg[1:]).any(axis=-1)


class RadicalOracle:
    """Jacobson radical membership by the defining condition on ``1 + r x s``.

    ``x`` is in the radical iff ``1 + r t`` is a unit for every ``r`` and every
    ``t`` in ``x R``.  The inner quantifier over ``r`` is memoized per ``t``.
    """

    def __init__(self, ring: EndRing, seed: int = 0):
        self.ring = ring
        self.G = ring.G
        # an affine permutation of the indices: cheap even for huge rings, and
        # scanning in a scrambled order finds non-members early
        rng = np.random.default_rng(seed)
        n = ring.size
        step = int(rng.integers(1, n)) if n > 1 else 1
        while math.gcd(step, n) != 1:
            step += 1
        self.start = int(rng.integers(0, n))
        self.step = step
        self._left: dict[bytes, tuple[bool, int | None]] = {}

    def _scan(self):
        n = self.ring.size
        for lo in range(0, n, CHUNK):
            idx = (self.start + self.step * np.arange(lo, min(lo + CHUNK, n), dtype=np.int64)) % n
            yield idx, self.ring.tables(idx)

    def left_quasi_regular(self, t: np.ndarray) -> tuple[bool, int | None]:
        """Whether ``1 + r t`` is a unit for all ``r``; else a witness ``r``."""
        key = t.tobytes()
        hit = self._left.get(key)
        if hit is not None:
            return hit
        result: tuple[bool, int | None] = (True, None)
        if t.any():
            for idx, R in self._scan():
                ok = one_plus_is_unit(self.G, R[:, t])
                if not ok.all():
                    result = (False, int(idx[np.argmin(ok)]))
                    break
        self._left[key] = result
        return result

    def member(self, x: np.ndarray) -> tuple[bool, tuple[int, int | None] | None]:
        """``(True, None)`` or ``(False, (r, s))`` with ``1 + r x s`` a non-unit.

        ``s = None`` stands for the identity.
        """
        if not x.any():
            return True, None
        ok, r = self.left_quasi_regular(x)
        if not ok:
            return False, (r, None)
        seen: set[bytes] = {x.tobytes()}
        for idx, S in self.ring.chunks():
            XS = x[S]
            uniq, first = np.unique(XS, axis=0, return_index=True)
            for row, pos in zip(uniq, first):
                key = row.tobytes()
                if key in seen:
                    continue
                seen.add(key)
                ok, r = self.left_quasi_regular(row)
                if not ok:
                    return False, (r, int(idx[pos]))
        return True, None


def jacobson_radical(ring: EndRing) -> list[int]:
    """Indices of all elements of ``J(End(G))``."""
    tabs = ring.all_tables()
    rad = RadicalOracle(ring)
    left = [i for i in range(ring.size) if rad.left_quasi_regular(tabs[i])[0]]
    left_keys = {tabs[i].tobytes() for i in left}
    members = []
    for i in left:
        xs = tabs[i][tabs]
        if all(row.tobytes() in left_keys for row in np.unique(xs, axis=0)):
            members.append(i)
    return members


def unit_mask(ring: EndRing) -> np.ndarray:
    return bijective_rows(ring.all_tables())


def nilpotent_mask(ring: EndRing) -> np.ndarray:
    return np.array([is_nilpotent_table(t) for t in ring.all_tables()], dtype=bool)


def find_noncommuting_pair(ring: EndRing, seed: int = 0, budget: int | None = None) -> tuple[int, int] | None:
    """A pair ``(f, g)`` with ``f g != g f``; exhaustive when ``budget`` is None."""
    if budget is None:
        tabs = ring.all_tables()
        for i in range(ring.size):
            fg = tabs[i][tabs]
            gf = tabs[:, tabs[i]]
            bad = (fg != gf).any(axis=1)
            if bad.any():
                return i, int(np.argmax(bad))
        return None
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, ring.size, size=(budget, 2))
    A = ring.tables(idx[:, 0])
    B = ring.tables(idx[:, 1])
    AB = np.take_along_axis(A, B, axis=1)
    BA = np.take_along_axis(B, A, axis=1)
    bad = (AB != BA).any(axis=1)
    if bad.any():
        k = int(np.argmax(bad))
        return int(idx[k, 0]), int(idx[k, 1])
    return None


def ulm_kaplansky_by_definition(C: PrimaryComponent, s: int) -> int:
    """``dim (p^s H)[p] / (p^{s+1} H)[p]`` from explicit element sets."""
    p = C.prime
    G = FiniteGroup(C.orders)
    socle = set(np.flatnonzero(G.multiple(p) == 0).tolist())
    top = set(G.multiple(p**s).tolist()) & socle
    below = set(G.multiple(p ** (s + 1)).tolist()) & socle
    ratio = len(top) // len(below)
    dim = 0
    while ratio > 1:
        ratio //= p
        dim += 1
    return dim


def order_census(orders: Sequence[int]) -> dict[int, int]:
    vals, counts = np.unique(FiniteGroup(orders).element_orders(), return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))


def isomorphic(a: Sequence[int], b: Sequence[int]) -> bool:
    """Finite abelian groups are isomorphic iff their element-order censuses match."""
    return order_census(a) == order_census(b)


def count_homs(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of homomorphisms: each generator of order ``o`` goes to ``H[o]``."""
    H = FiniteGroup(b)
    return math.prod(int((H.multiple(o) == 0).sum()) for o in a)


# -- labs -------------------------------------------------------------------


@dataclass
class Report:
    lab: str
    subject: str
    passed: bool
    counts: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "lab": self.lab,
            "subject": self.subject,
            "passed": self.passed,
            "counts": self.counts,
            "counterexamples": self.counterexamples,
        }


def _label(orders: Sequence[int]) -> str:
    return "+".join(f"Z/{o}" for o in orders) or "0"


def check_quasi_regular_and_nc(G: FgAbGroup | Sequence[int], max_order: int = DEFAULT_MAX_ORDER) -> Report:
    ring = enumerate_end(G, max_order=max_order)
    tabs = ring.all_tables()
    units = unit_mask(ring)
    nil = np.flatnonzero(nilpotent_mask(ring))
    unit_keys = {tabs[i].tobytes() for i in np.flatnonzero(units)}
    ident = ring.identity
    bad = []
    for t in nil:
        minus = ring.G.add_table[ident, ring.G.neg[tabs[t]]]
        plus = one_plus(ring.G, tabs[t])
        if minus.tobytes() not in unit_keys or plus.tobytes() not in unit_keys:
            bad.append({"kind": "quasi-regular", "t": ring.matrix(int(t))})
    pairs = 0
    for u in np.flatnonzero(units):
        U = tabs[u]
        T = tabs[nil]
        comm = (U[T] == T[:, U]).all(axis=1)
        for t in nil[comm]:
            pairs += 1
            s = ring.G.add_table[U, tabs[t]]
            if s.tobytes() not in unit_keys:
                bad.append({"kind": "unit+nilpotent", "u": ring.matrix(int(u)), "t": ring.matrix(int(t))})
    return Report(
        "qr",
        _label(ring.orders),
        not bad,
        {"ring": ring.size, "units": int(units.sum()), "nilpotents": int(len(nil)), "commuting_pairs": pairs},
        bad,
    )


def check_nj_equivalence(C: PrimaryComponent, max_order: int = DEFAULT_MAX_ORDER) -> Report:
    ring = enumerate_end(C.orders, max_order=max_order)
    tabs = ring.all_tables()
    J = set(jacobson_radical(ring))
    j_keys = {tabs[i].tobytes() for i in J}
    nil = nilpotent_mask(ring)
    outside = [i for i in np.flatnonzero(nil) if int(i) not in J]

    def some_power_in_J(i: int) -> bool:
        cur = tabs[i]
        seen = set()
        while cur.tobytes() not in seen:
            if cur.tobytes() in j_keys:
                return True
            seen.add(cur.tobytes())
            cur = tabs[i][cur]
        return False

    # R/J is reduced iff no element outside J has a power inside J
    quotient_reduced = not any(some_power_in_J(i) for i in range(ring.size) if i not in J)
    top = max(C.exponents)
    criterion = all(ulm_kaplansky_by_definition(C, s) <= 1 for s in range(top + 1))
    n_in_j = not outside
    passed = criterion == quotient_reduced and (n_in_j or not criterion)
    ce = [] if not outside else [{"nilpotent_outside_J": ring.matrix(int(outside[0]))}]
    return Report(
        "nj",
        f"p={C.prime} exponents={list(C.exponents)}",
        passed,
        {
            "ring": ring.size,
            "radical": len(J),
            "criterion": criterion,
            "quotient_reduced": quotient_reduced,
            "nilpotents_in_radical": n_in_j,
        },
        ce,
    )


def _diagonal_blocks_bijective(ring: EndRing, tabs: np.ndarray, split: int) -> np.ndarray:
    """Per-table flag: both diagonal blocks of the 2-factor split are bijective."""
    orders = ring.orders
    ok = np.ones(len(tabs), dtype=bool)
    for lo, hi in ((0, split), (split, len(orders))):
        sub = FiniteGroup(orders[lo:hi])
        # element of the factor embedded in the full group, then projected back
        embed = np.zeros((sub.size, len(orders)), dtype=np.int64)
        embed[:, lo:hi] = sub.elements
        idx = ring.G.index(embed)
        coords = ring.G.elements[tabs[:, idx]][..., lo:hi]
        proj = sub.index(coords)
        ok &= bijective_rows(proj)
    return ok


def check_bcm(G: FgAbGroup | Sequence[int], H: FgAbGroup | Sequence[int], max_order: int = DEFAULT_MAX_ORDER) -> Report:
    a = as_presentation(G)
    b = as_presentation(H)
    ring = enumerate_end(a + b, max_order=max_order)
    common = has_common_direct_factor(
        G if isinstance(G, FgAbGroup) else from_cyclic_orders(0, list(a)),
        H if isinstance(H, FgAbGroup) else from_cyclic_orders(0, list(b)),
    )
    autos = 0
    irreducible = []
    for idx, tabs in ring.chunks():
        units = bijective_rows(tabs)
        if not units.any():
            continue
        autos += int(units.sum())
        diag_ok = _diagonal_blocks_bijective(ring, tabs[units], len(a))
        for i in idx[units][~diag_ok]:
            irreducible.append(ring.matrix(int(i)))
    if common:
        passed = bool(irreducible)
    else:
        passed = not irreducible
    return Report(
        "bcm",
        f"({_label(a)}, {_label(b)})",
        passed,
        {"automorphisms": autos, "irreducible": len(irreducible), "common_factor": common},
        irreducible[:3],
    )


def check_lu(groups: Sequence[FgAbGroup | Sequence[int]], max_order: int = DEFAULT_MAX_ORDER) -> Report:
    pres = [as_presentation(g) for g in groups]
    flat = tuple(o for p in pres for o in p)
    ring = enumerate_end(flat, max_order=max_order)
    offs = [0]
    for p in pres:
        offs.append(offs[-1] + len(p))
    factor_rings = [enumerate_end(p, max_order=max_order) for p in pres]
    reducible = factored = refused = nonreducible = 0
    bad = []
    for i in range(ring.size):
        mat = ring.matrix(i)
        blocks = [
            [[row[offs[c] : offs[c + 1]] for row in mat[offs[r] : offs[r + 1]]] for c in range(len(pres))]
            for r in range(len(pres))
        ]
        M = block_map(pres, blocks)
        table = ring.tables([i])[0]
        diag_auto = all(
            is_bijective(factor_rings[k].table_of(blocks[k][k]))
            for k in range(len(pres))
        )
        result = lu_factorize(M)
        if diag_auto and is_bijective(table):
            reducible += 1
            if result is None or block_compose(*result) != M:
                bad.append({"matrix": mat, "issue": "reducible automorphism did not factor"})
            else:
                factored += 1
        elif not diag_auto:
            nonreducible += 1
            if result is not None:
                bad.append({"matrix": mat, "issue": "factored despite non-invertible diagonal"})
            else:
                refused += 1
    return Report(
        "lu",
        " x ".join(_label(p) for p in pres),
        not bad,
        {"reducible": reducible, "factored": factored, "non_reducible": nonreducible, "refused": refused},
        bad[:3],
    )
