"""Homomorphisms between finitely generated abelian groups as integer matrices.

A homomorphism is stored against *presentations* (tuples of cyclic orders,
``0`` meaning ``Z``) rather than canonical groups, so that direct sums of
factor groups can be flattened without a change of basis.  Column ``j`` of the
matrix is the image of source generator ``j``; composition is matrix product.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from sympy import factorint

from .abgroup import (
    FgAbGroup,
    Presentation,
    as_presentation,
    group_of,
    smith_normal_form,
    snf_diagonal,
)


class HomError(ValueError):
    pass


class Unsupported(Exception):
    """Raised when a predicate is not decidable by the implemented method."""


class Tri(enum.Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    UNKNOWN = "UNKNOWN"

    @classmethod
    def of(cls, flag: bool) -> Tri:
        return cls.TRUE if flag else cls.FALSE


IntMatrix = tuple[tuple[int, ...], ...]


def _reduce_entry(x: int, b: int) -> int:
    return x % b if b else x


@dataclass(frozen=True)
class Homomorphism:
    src: Presentation
    dst: Presentation
    matrix: IntMatrix

    @property
    def source(self) -> FgAbGroup:
        return group_of(self.src)

    @property
    def target(self) -> FgAbGroup:
        return group_of(self.dst)

    @property
    def is_endo(self) -> bool:
        return self.src == self.dst

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        """Image of an element given in source coordinates."""
        if len(x) != len(self.src):
            raise HomError("element has the wrong number of coordinates")
        return tuple(
            _reduce_entry(sum(row[j] * x[j] for j in range(len(x))), b)
            for row, b in zip(self.matrix, self.dst)
        )

    def __matmul__(self, other: Homomorphism) -> Homomorphism:
        return compose(self, other)

    def __add__(self, other: Homomorphism) -> Homomorphism:
        return add(self, other)

    def __neg__(self) -> Homomorphism:
        return negate(self)

    def __sub__(self, other: Homomorphism) -> Homomorphism:
        return add(self, negate(other))

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.matrix for x in row)

    def to_dict(self) -> dict:
        return {
            "source": list(self.src),
            "target": list(self.dst),
            "matrix": [list(r) for r in self.matrix],
        }

    @classmethod
    def from_dict(cls, d: dict) -> Homomorphism:
        return make_hom(tuple(d["source"]), tuple(d["target"]), d["matrix"])


def make_hom(
    G: FgAbGroup | Iterable[int],
    H: FgAbGroup | Iterable[int],
    matrix: Sequence[Sequence[int]],
) -> Homomorphism:
    """Validate ``matrix`` as a map ``G -> H`` and reduce it modulo ``H``."""
    src = as_presentation(G)
    dst = as_presentation(H)
    rows = [list(map(int, r)) for r in matrix]
    if len(rows) != len(dst) or any(len(r) != len(src) for r in rows):
        raise HomError(
            f"matrix shape {len(rows)}x{len(rows[0]) if rows else 0} "
            f"does not match {len(dst)}x{len(src)}"
        )
    for i, b in enumerate(dst):
        for j, a in enumerate(src):
            x = rows[i][j]
            if a == 0:
                continue
            if b == 0:
                if x != 0:
                    raise HomError(f"entry ({i},{j})={x} sends torsion into a free summand")
            elif (x * a) % b:
                raise HomError(f"entry ({i},{j})={x} is ill-defined: {b} does not divide {x}*{a}")
    return Homomorphism(
        src, dst, tuple(tuple(_reduce_entry(x, b) for x in row) for row, b in zip(rows, dst))
    )


def identity(G: FgAbGroup | Iterable[int]) -> Homomorphism:
    pres = as_presentation(G)
    n = len(pres)
    return make_hom(pres, pres, [[int(i == j) for j in range(n)] for i in range(n)])


def zero(G: FgAbGroup | Iterable[int], H: FgAbGroup | Iterable[int] | None = None) -> Homomorphism:
    src = as_presentation(G)
    dst = src if H is None else as_presentation(H)
    return Homomorphism(src, dst, tuple((0,) * len(src) for _ in dst))


def scalar(G: FgAbGroup | Iterable[int], c: int) -> Homomorphism:
    pres = as_presentation(G)
    n = len(pres)
    return make_hom(pres, pres, [[c * int(i == j) for j in range(n)] for i in range(n)])


def compose(f: Homomorphism, g: Homomorphism) -> Homomorphism:
    """``f ∘ g`` (apply ``g`` first)."""
    if f.src != g.dst:
        raise HomError(f"cannot compose: source {f.src} != target {g.dst}")
    inner = len(g.dst)
    m = tuple(
        tuple(
            _reduce_entry(sum(f.matrix[i][k] * g.matrix[k][j] for k in range(inner)), b)
            for j in range(len(g.src))
        )
        for i, b in enumerate(f.dst)
    )
    return Homomorphism(g.src, f.dst, m)


def add(f: Homomorphism, g: Homomorphism) -> Homomorphism:
    if (f.src, f.dst) != (g.src, g.dst):
        raise HomError("cannot add homomorphisms with different source/target")
    m = tuple(
        tuple(_reduce_entry(x + y, b) for x, y in zip(rf, rg))
        for rf, rg, b in zip(f.matrix, g.matrix, f.dst)
    )
    return Homomorphism(f.src, f.dst, m)


def negate(f: Homomorphism) -> Homomorphism:
    m = tuple(tuple(_reduce_entry(-x, b) for x in row) for row, b in zip(f.matrix, f.dst))
    return Homomorphism(f.src, f.dst, m)


def power(f: Homomorphism, k: int) -> Homomorphism:
    _require_endo(f)
    if k < 0:
        raise HomError("negative power")
    result = identity(f.src)
    base = f
    while k:
        if k & 1:
            result = compose(result, base)
        base = compose(base, base)
        k >>= 1
    return result


def elementary_generators(G: FgAbGroup | Iterable[int], H: FgAbGroup | Iterable[int] | None = None) -> list[Homomorphism]:
    """Additive generators of ``Hom(G, H)``: one single-entry map per admissible slot."""
    src = as_presentation(G)
    dst = src if H is None else as_presentation(H)
    gens = []
    for i, b in enumerate(dst):
        for j, a in enumerate(src):
            c = _min_entry(a, b)
            if c is None:
                continue
            rows = [[0] * len(src) for _ in dst]
            rows[i][j] = c
            gens.append(make_hom(src, dst, rows))
    return gens


def _min_entry(a: int, b: int) -> int | None:
    """Smallest positive admissible matrix entry from order ``a`` into order ``b``."""
    if a == 0:
        return 1
    if b == 0:
        return None
    c = b // math.gcd(a, b)
    return None if c == b else c


def _require_endo(f: Homomorphism) -> None:
    if not f.is_endo:
        raise HomError("expected an endomorphism")


def _split(pres: Presentation) -> tuple[list[int], list[int]]:
    free = [i for i, o in enumerate(pres) if o == 0]
    tors = [i for i, o in enumerate(pres) if o != 0]
    return free, tors


def _submatrix(f: Homomorphism, rows: list[int], cols: list[int]) -> list[list[int]]:
    return [[f.matrix[i][j] for j in cols] for i in rows]


def _surjective_onto_torsion(block: list[list[int]], orders: list[int]) -> bool:
    n = len(orders)
    if n == 0:
        return True
    aug = [list(block[i]) + [orders[i] if c == i else 0 for c in range(n)] for i in range(n)]
    diag = snf_diagonal(aug)
    return len(diag) == n and all(d == 1 for d in diag)


def is_automorphism(f: Homomorphism) -> bool:
    """Bijectivity via the free block (unimodular) and the torsion block (onto)."""
    _require_endo(f)
    free, tors = _split(f.src)
    if free:
        A = _submatrix(f, free, free)
        diag = snf_diagonal(A)
        if any(d != 1 for d in diag):
            return False
    T = _submatrix(f, tors, tors)
    return _surjective_onto_torsion(T, [f.src[i] for i in tors])


def invert(f: Homomorphism) -> Homomorphism:
    _require_endo(f)
    if not is_automorphism(f):
        raise HomError("homomorphism is not invertible")
    n = len(f.src)
    if n == 0:
        return f
    # Solve [F | D] y = e_j over Z; the first n coordinates of y give column j of f^-1.
    aug = [list(f.matrix[i]) + [f.src[i] if c == i else 0 for c in range(n)] for i in range(n)]
    U, S, V = smith_normal_form(aug)
    width = 2 * n
    cols = []
    for j in range(n):
        rhs = [U[r][j] for r in range(n)]
        z = [0] * width
        for r in range(n):
            d = S[r][r]
            if d == 0 or rhs[r] % d:
                raise HomError("inverse does not exist over the integers")
            z[r] = rhs[r] // d
        y = [sum(V[r][c] * z[c] for c in range(width)) for r in range(width)]
        cols.append(y[:n])
    g = make_hom(f.src, f.src, [[cols[j][i] for j in range(n)] for i in range(n)])
    if compose(f, g) != identity(f.src) or compose(g, f) != identity(f.src):
        raise HomError("inverse failed verification")
    return g


def _int_matrix_nilpotent(A: list[list[int]]) -> bool:
    n = len(A)
    P = [row[:] for row in A]
    for _ in range(n - 1):
        P = [[sum(P[i][k] * A[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return all(x == 0 for row in P for x in row)


def torsion_length(pres: Presentation) -> int:
    return sum(sum(factorint(o).values()) for o in pres if o > 1)


def is_nilpotent(f: Homomorphism) -> bool:
    """``f^m = 0`` for some ``m``.

    On a finite group it suffices to look at ``f^L`` with ``L`` the composition
    length.  With free summands ``f`` is block lower triangular (free part ``A``,
    torsion part ``T``); it is nilpotent iff both ``A`` and ``T`` are.
    """
    _require_endo(f)
    free, tors = _split(f.src)
    if free and not _int_matrix_nilpotent(_submatrix(f, free, free)):
        return False
    L = torsion_length(f.src)
    g = power(f, L)
    if not free:
        return g.is_zero()
    # free and torsion diagonal blocks of f^(len(free) + L) vanish, so its square is 0
    tors_only = _submatrix(g, tors, tors)
    if any(x for row in tors_only for x in row):
        return False
    return power(f, 2 * (len(free) + L)).is_zero()


def commutes(f: Homomorphism, g: Homomorphism) -> bool:
    return compose(f, g) == compose(g, f)


def is_central(f: Homomorphism) -> bool:
    """Commutes with every endomorphism; checking additive generators of End suffices."""
    _require_endo(f)
    return all(commutes(f, e) for e in elementary_generators(f.src))


def primary_basis(pres: Presentation) -> tuple[Presentation, Homomorphism, Homomorphism]:
    """A presentation by prime powers with isomorphisms ``phi`` onto ``pres`` and ``psi`` back.

    Each finite cyclic summand ``Z/n`` splits by CRT into ``Z/p^e`` summands,
    with generator ``(n / p^e) * g``; free summands pass through unchanged.
    """
    orders: list[int] = []
    columns: list[tuple[int, int]] = []
    for idx, n in enumerate(pres):
        if n == 0:
            orders.append(0)
            columns.append((idx, 1))
            continue
        for p, e in sorted(factorint(n).items()):
            q = p**e
            orders.append(q)
            columns.append((idx, n // q))
    forward = [[0] * len(orders) for _ in pres]
    back = [[0] * len(pres) for _ in orders]
    for j, (idx, c) in enumerate(columns):
        forward[idx][j] = c
        back[j][idx] = 1 if orders[j] in (0, 1) else pow(c, -1, orders[j])
    orders_t = tuple(orders)
    phi = make_hom(orders_t, pres, forward)
    psi = make_hom(pres, orders_t, back)
    return orders_t, phi, psi


def conjugate(f: Homomorphism, phi: Homomorphism, psi: Homomorphism) -> Homomorphism:
    """``psi ∘ f ∘ phi`` for mutually inverse ``phi`` and ``psi``."""
    return compose(psi, compose(f, phi))


def is_radical(f: Homomorphism) -> Tri:
    """Membership of ``f`` in the Jacobson radical of ``End(G)``.

    In a prime-power basis, ``f`` lies in the radical iff every diagonal block
    between summands of one order ``p^r`` vanishes mod ``p`` and the free block
    is zero (``End`` is triangular there and the radical of a matrix ring over
    ``Z`` is zero).
    """
    _require_endo(f)
    orders, phi, psi = primary_basis(f.src)
    h = conjugate(f, phi, psi)
    free, _ = _split(orders)
    if any(h.matrix[i][j] for i in free for j in free):
        return Tri.FALSE
    classes: dict[int, list[int]] = {}
    for i, o in enumerate(orders):
        if o:
            classes.setdefault(o, []).append(i)
    for q, idx in classes.items():
        p = min(factorint(q))
        if any(h.matrix[i][j] % p for i in idx for j in idx):
            return Tri.FALSE
    return Tri.TRUE


# -- block maps ------------------------------------------------------------


@dataclass(frozen=True)
class BlockMap:
    factors: tuple[Presentation, ...]
    blocks: tuple[tuple[Homomorphism, ...], ...]

    def __post_init__(self):
        m = len(self.factors)
        if len(self.blocks) != m or any(len(r) != m for r in self.blocks):
            raise HomError("block map must be square over its factors")
        for i in range(m):
            for j in range(m):
                b = self.blocks[i][j]
                if b.src != self.factors[j] or b.dst != self.factors[i]:
                    raise HomError(f"block ({i},{j}) has the wrong source/target")

    @property
    def size(self) -> int:
        return len(self.factors)

    @property
    def factor_groups(self) -> list[FgAbGroup]:
        return [group_of(p) for p in self.factors]

    def __getitem__(self, ij: tuple[int, int]) -> Homomorphism:
        return self.blocks[ij[0]][ij[1]]


def block_map(
    factors: Sequence[FgAbGroup | Iterable[int]],
    blocks: Sequence[Sequence[Homomorphism | Sequence[Sequence[int]]]],
) -> BlockMap:
    pres = tuple(as_presentation(G) for G in factors)
    built = tuple(
        tuple(
            b if isinstance(b, Homomorphism) else make_hom(pres[j], pres[i], b)
            for j, b in enumerate(row)
        )
        for i, row in enumerate(blocks)
    )
    return BlockMap(pres, built)


def _offsets(factors: Sequence[Presentation]) -> list[int]:
    out = [0]
    for p in factors:
        out.append(out[-1] + len(p))
    return out


def flatten(M: BlockMap) -> Homomorphism:
    pres = tuple(o for p in M.factors for o in p)
    off = _offsets(M.factors)
    rows = [[0] * len(pres) for _ in pres]
    for i in range(M.size):
        for j in range(M.size):
            blk = M.blocks[i][j].matrix
            for r, row in enumerate(blk):
                for c, x in enumerate(row):
                    rows[off[i] + r][off[j] + c] = x
    return make_hom(pres, pres, rows)


def unflatten(f: Homomorphism, factors: Sequence[FgAbGroup | Iterable[int]]) -> BlockMap:
    pres = tuple(as_presentation(G) for G in factors)
    if tuple(o for p in pres for o in p) != f.src or not f.is_endo:
        raise HomError("factors do not match the homomorphism's presentation")
    off = _offsets(pres)
    blocks = tuple(
        tuple(
            make_hom(
                pres[j],
                pres[i],
                [list(f.matrix[r][off[j] : off[j + 1]]) for r in range(off[i], off[i + 1])],
            )
            for j in range(len(pres))
        )
        for i in range(len(pres))
    )
    return BlockMap(pres, blocks)


def block_identity(factors: Sequence[FgAbGroup | Iterable[int]]) -> BlockMap:
    pres = tuple(as_presentation(G) for G in factors)
    return BlockMap(
        pres,
        tuple(
            tuple(identity(pres[i]) if i == j else zero(pres[j], pres[i]) for j in range(len(pres)))
            for i in range(len(pres))
        ),
    )


def block_compose(M: BlockMap, N: BlockMap) -> BlockMap:
    if M.factors != N.factors:
        raise HomError("block maps over different factors")
    m = M.size
    blocks = []
    for i in range(m):
        row = []
        for j in range(m):
            acc = zero(M.factors[j], M.factors[i])
            for k in range(m):
                acc = add(acc, compose(M.blocks[i][k], N.blocks[k][j]))
            row.append(acc)
        blocks.append(tuple(row))
    return BlockMap(M.factors, tuple(blocks))


def block_add(M: BlockMap, N: BlockMap) -> BlockMap:
    if M.factors != N.factors:
        raise HomError("block maps over different factors")
    return BlockMap(
        M.factors,
        tuple(tuple(add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(M.blocks, N.blocks)),
    )


def schur_complement(M: BlockMap) -> Homomorphism:
    """``D - C ∘ A^-1 ∘ B`` for ``M = [[A, B], [C, D]]``."""
    if M.size != 2:
        raise HomError("schur complement needs a 2x2 block map")
    A, B = M.blocks[0]
    C, D = M.blocks[1]
    if not is_automorphism(A):
        raise HomError("block (0,0) is not invertible")
    return add(D, negate(compose(C, compose(invert(A), B))))


def is_block_invertible(M: BlockMap) -> bool:
    return is_automorphism(flatten(M))


def lu_factorize(M: BlockMap) -> tuple[BlockMap, BlockMap] | None:
    """Block ``M = L ∘ U`` with ``L`` lower triangular, ``U`` upper unitriangular.

    Returns ``None`` when some diagonal block of ``M`` is not an automorphism,
    or when elimination meets a non-invertible pivot.
    """
    m = M.size
    if any(not is_automorphism(M.blocks[i][i]) for i in range(m)):
        return None
    fac = M.factors
    L = [[zero(fac[j], fac[i]) for j in range(m)] for i in range(m)]
    U = [[identity(fac[i]) if i == j else zero(fac[j], fac[i]) for j in range(m)] for i in range(m)]
    for j in range(m):
        for i in range(j, m):
            acc = M.blocks[i][j]
            for k in range(j):
                acc = add(acc, negate(compose(L[i][k], U[k][j])))
            L[i][j] = acc
        if not is_automorphism(L[j][j]):
            return None
        pivot_inv = invert(L[j][j])
        for c in range(j + 1, m):
            acc = M.blocks[j][c]
            for k in range(j):
                acc = add(acc, negate(compose(L[j][k], U[k][c])))
            U[j][c] = compose(pivot_inv, acc)
    Lm = BlockMap(fac, tuple(tuple(r) for r in L))
    Um = BlockMap(fac, tuple(tuple(r) for r in U))
    if block_compose(Lm, Um) != M:
        raise HomError("LU recomposition mismatch")
    return Lm, Um


def hom_slot_choices(a: int, b: int) -> list[int] | None:
    """Admissible matrix entries from order ``a`` into order ``b``; None if infinite."""
    if b == 0:
        return None if a == 0 else [0]
    if a == 0:
        return list(range(b))
    c = b // math.gcd(a, b)
    return [k * c for k in range(math.gcd(a, b))]


def enumerate_homs(G: FgAbGroup | Iterable[int], H: FgAbGroup | Iterable[int]) -> list[Homomorphism]:
    """All of ``Hom(G, H)``; raises :class:`Unsupported` when it is infinite."""
    src = as_presentation(G)
    dst = as_presentation(H)
    slots = []
    for b in dst:
        for a in src:
            ch = hom_slot_choices(a, b)
            if ch is None:
                raise Unsupported("Hom group is infinite")
            slots.append(ch)
    out = []
    for combo in itertools.product(*slots):
        rows = [list(combo[i * len(src) : (i + 1) * len(src)]) for i in range(len(dst))]
        out.append(Homomorphism(src, dst, tuple(tuple(r) for r in rows)))
    return out


def hom_count(G: FgAbGroup | Iterable[int], H: FgAbGroup | Iterable[int]) -> int | None:
    src = as_presentation(G)
    dst = as_presentation(H)
    total = 1
    for b in dst:
        for a in src:
            ch = hom_slot_choices(a, b)
            if ch is None:
                return None
            total *= len(ch)
    return total
