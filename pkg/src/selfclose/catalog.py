"""Catalogued spaces: homotopy and homology access, NE values, and map facts.

Two kinds of derived facts feed the engine:

* *triviality*: every map ``X -> Y`` induces zero on ``π_k``;
* *distance*: every self-map of ``Y`` factoring through ``X`` induces a
  nilpotent endomorphism of ``π_k(Y)`` for all ``k <= n``.

Each fact carries a reason string and the data it was derived from, so a
certificate can replay it with :func:`check_triviality` and
:func:`check_distance`.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence, Union

from sympy import isprime

from .abgroup import (
    TRIVIAL,
    Z,
    FgAbGroup,
    GroupSyntaxError,
    cyclic,
    direct_sum,
    format_group,
    hom_group,
    parse_group,
)
from .homs import Unsupported, compose, enumerate_homs, hom_count, is_nilpotent

TABLE_ENV = "SELFCLOSE_SPHERE_TABLE"


# -- space descriptors ------------------------------------------------------


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Sphere:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"S^{self.n}: sphere dimension must be >= 1")

    @property
    def label(self) -> str:
        return f"S^{self.n}"


@dataclass(frozen=True)
class Moore:
    group: FgAbGroup
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"M(G,{self.n}): Moore degree must be >= 2")
        if self.group.is_trivial:
            raise DomainError("M(0,n) is contractible; the group must be nontrivial")

    @property
    def label(self) -> str:
        return f"M({format_group(self.group)},{self.n})"


@dataclass(frozen=True)
class EM:
    group: FgAbGroup
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"K(G,{self.n}): degree must be >= 1")
        if self.group.is_trivial:
            raise DomainError("K(0,n) is contractible; the group must be nontrivial")

    @property
    def label(self) -> str:
        return f"K({format_group(self.group)},{self.n})"


class Field(enum.Enum):
    R = 1
    C = 2
    H = 4


@dataclass(frozen=True)
class Projective:
    field_: Field
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"{self.field_.name}P^{self.n}: dimension must be >= 2")

    @property
    def d(self) -> int:
        return self.field_.value

    @property
    def label(self) -> str:
        return f"{self.field_.name}P^{self.n}"


def RealProj(n: int) -> Projective:
    return Projective(Field.R, n)


def CplxProj(n: int) -> Projective:
    return Projective(Field.C, n)


def QuatProj(n: int) -> Projective:
    return Projective(Field.H, n)


@dataclass(frozen=True)
class Lens:
    """``L^{2n+1}(p) = S^{2n+1} / (Z/p)``."""

    n: int
    p: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"lens parameter n={self.n} must be >= 1")
        if not isprime(self.p):
            raise DomainError(f"lens order {self.p} is not prime")

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def label(self) -> str:
        return f"L({self.dim},{self.p})"


@dataclass(frozen=True)
class Atomic:
    """A p-local atomic space; ``exponent=None`` means ``π_dim = Z_(p)``."""

    name: str
    dim: int
    prime: int
    exponent: int | None = None
    no_retract: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("Hurewicz dimension must be >= 1")
        if not isprime(self.prime):
            raise DomainError(f"{self.prime} is not prime")
        if self.exponent is not None and self.exponent < 1:
            raise DomainError("module exponent must be >= 1")
        object.__setattr__(self, "no_retract", frozenset(self.no_retract))

    @property
    def bottom_group(self) -> FgAbGroup | None:
        return None if self.exponent is None else cyclic(self.prime**self.exponent)

    @property
    def label(self) -> str:
        return f"atomic:{self.name}"


Space = Union[Sphere, Moore, EM, Projective, Lens, Atomic]


def space_to_dict(X: Space) -> dict:
    if isinstance(X, Sphere):
        return {"type": "sphere", "n": X.n}
    if isinstance(X, Moore):
        return {"type": "moore", "group": format_group(X.group), "n": X.n}
    if isinstance(X, EM):
        return {"type": "em", "group": format_group(X.group), "n": X.n}
    if isinstance(X, Projective):
        return {"type": "projective", "field": X.field_.name, "n": X.n}
    if isinstance(X, Lens):
        return {"type": "lens", "n": X.n, "p": X.p}
    if isinstance(X, Atomic):
        return {
            "type": "atomic",
            "name": X.name,
            "dim": X.dim,
            "prime": X.prime,
            "exponent": X.exponent,
            "no_retract": sorted(X.no_retract),
        }
    raise TypeError(f"not a space: {X!r}")


def space_from_dict(d: dict) -> Space:
    kind = d["type"]
    if kind == "sphere":
        return Sphere(int(d["n"]))
    if kind == "moore":
        return Moore(parse_group(d["group"]), int(d["n"]))
    if kind == "em":
        return EM(parse_group(d["group"]), int(d["n"]))
    if kind == "projective":
        return Projective(Field[d["field"]], int(d["n"]))
    if kind == "lens":
        return Lens(int(d["n"]), int(d["p"]))
    if kind == "atomic":
        return Atomic(d["name"], int(d["dim"]), int(d["prime"]), d.get("exponent"), frozenset(d.get("no_retract", ())))
    raise ValueError(f"unknown space type {kind!r}")


# -- sphere table -----------------------------------------------------------


class TableError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class SphereTable:
    entries: dict
    version: str = ""
    source: str = ""

    def lookup(self, n: int, k: int) -> FgAbGroup | None:
        if k < n:
            return TRIVIAL
        if k == n:
            return Z
        return self.entries.get((n, k))

    def __hash__(self):
        return hash((self.version, self.source, len(self.entries)))


def parse_table(text: str, source: str = "<string>") -> SphereTable:
    entries: dict[tuple[int, int], FgAbGroup] = {}
    version = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.startswith("version"):
                version = body[len("version") :].strip()
            continue
        parts = raw.split(None, 2)
        col = raw.index(parts[0]) + 1
        if len(parts) < 3:
            raise TableError("expected 'n k group'", lineno, col)
        try:
            n, k = int(parts[0]), int(parts[1])
        except ValueError:
            raise TableError("n and k must be integers", lineno, col) from None
        if n < 1 or k < 1:
            raise TableError("n and k must be positive", lineno, col)
        group_col = raw.index(parts[2], raw.index(parts[1]) + len(parts[1]))
        try:
            G = parse_group(parts[2].strip())
        except GroupSyntaxError as e:
            raise TableError(str(e), lineno, group_col + e.position + 1) from None
        if k < n and not G.is_trivial:
            raise TableError(f"pi_{k}(S^{n}) must be 0", lineno, group_col + 1)
        if k == n and G != Z:
            raise TableError(f"pi_{n}(S^{n}) must be Z", lineno, group_col + 1)
        if (n, k) in entries:
            raise TableError(f"duplicate entry for (n, k) = ({n}, {k})", lineno, col)
        entries[(n, k)] = G
    return SphereTable(entries, version, source)


def load_table(path: str | Path) -> SphereTable:
    p = Path(path)
    return parse_table(p.read_text(), str(p))


def bundled_table() -> SphereTable:
    text = resources.files("selfclose").joinpath("data/sphere_homotopy.txt").read_text()
    return parse_table(text, "bundled")


_table: SphereTable | None = None


def get_table() -> SphereTable:
    global _table
    if _table is None:
        override = os.environ.get(TABLE_ENV)
        _table = load_table(override) if override else bundled_table()
    return _table


def set_table(table: SphereTable | None) -> None:
    """Install a table (``None`` restores the default lookup)."""
    global _table
    _table = table
    _clear_caches()


# -- homotopy and homology --------------------------------------------------


def _sphere_pi(n: int, k: int) -> FgAbGroup | None:
    return get_table().lookup(n, k)


def homotopy_group(X: Space, k: int) -> FgAbGroup | None:
    """``π_k(X)`` or None when not available."""
    if k <= 0:
        raise ValueError("homotopy degree must be >= 1")
    return _homotopy_cached(X, k)


@lru_cache(maxsize=None)
def _homotopy_cached(X: Space, k: int) -> FgAbGroup | None:
    if isinstance(X, Sphere):
        return _sphere_pi(X.n, k)
    if isinstance(X, EM):
        return X.group if k == X.n else TRIVIAL
    if isinstance(X, Moore):
        if X.group == Z:
            return _sphere_pi(X.n, k)
        if k < X.n:
            return TRIVIAL
        return X.group if k == X.n else None
    if isinstance(X, Projective):
        d, n = X.d, X.n
        if X.field_ is Field.R:
            return cyclic(2) if k == 1 else _sphere_pi(n, k)
        if X.field_ is Field.C:
            if k == 1:
                return TRIVIAL
            if k == 2:
                return Z
            return _sphere_pi(2 * n + 1, k)
        # quaternionic: S^3 -> S^{4n+3} -> HP^n
        if k < d:
            return TRIVIAL
        if k == d:
            return Z
        if k <= 4 * n + 2:
            return _sphere_pi(3, k - 1)
        return None
    if isinstance(X, Lens):
        return cyclic(X.p) if k == 1 else _sphere_pi(X.dim, k)
    if isinstance(X, Atomic):
        if k < X.dim:
            return TRIVIAL
        return X.bottom_group if k == X.dim else None
    raise TypeError(f"not a space: {X!r}")


def homology_group(X: Space, k: int) -> FgAbGroup | None:
    """Reduced integral ``H_k(X)`` where it is standard, else None."""
    if k <= 0:
        raise ValueError("homology degree must be >= 1")
    if isinstance(X, Sphere):
        return Z if k == X.n else TRIVIAL
    if isinstance(X, Moore):
        return X.group if k == X.n else TRIVIAL
    if isinstance(X, EM):
        if k < X.n:
            return TRIVIAL
        return X.group if k == X.n else None
    if isinstance(X, Projective):
        d, n = X.d, X.n
        if X.field_ is Field.R:
            if k > n or k % 2 == 0:
                return TRIVIAL
            return Z if k == n else cyclic(2)
        return Z if k % d == 0 and k <= d * n else TRIVIAL
    if isinstance(X, Lens):
        if k > X.dim or k % 2 == 0:
            return TRIVIAL
        return Z if k == X.dim else cyclic(X.p)
    if isinstance(X, Atomic):
        return TRIVIAL if k < X.dim else None
    raise TypeError(f"not a space: {X!r}")


def self_closeness(X: Space) -> int:
    if isinstance(X, (Sphere, Moore, EM)):
        return X.n
    if isinstance(X, Projective):
        return X.n if X.field_ is Field.R else X.d
    if isinstance(X, Lens):
        return X.dim
    if isinstance(X, Atomic):
        return X.dim
    raise TypeError(f"not a space: {X!r}")


def _serre_finite(n: int, k: int) -> bool:
    """π_k(S^n) is finite for k > n except when n is even and k = 2n - 1."""
    return k > n and not (n % 2 == 0 and k == 2 * n - 1)


def known_finite(X: Space, k: int) -> bool:
    G = homotopy_group(X, k)
    if G is not None:
        return G.is_finite
    if isinstance(X, Sphere):
        return _serre_finite(X.n, k)
    if isinstance(X, Projective) and X.field_ is Field.R and k >= 2:
        return _serre_finite(X.n, k)
    if isinstance(X, Projective) and X.field_ is Field.C and k >= 3:
        return _serre_finite(2 * X.n + 1, k)
    if isinstance(X, Lens) and k >= 2:
        return _serre_finite(X.dim, k)
    return False


def hurewicz_injective(X: Space, k: int) -> bool:
    """The Hurewicz map ``π_k(X) -> H_k(X)`` is known to be injective."""
    if all(_is_trivial(homotopy_group(X, j)) for j in range(1, k)):
        # (k-1)-connected (or k = 1 with abelian π_1): Hurewicz is an isomorphism
        return True
    # π_n(RP^n) -> H_n(RP^n) for odd n is multiplication by 2 on Z
    return isinstance(X, Projective) and X.field_ is Field.R and k == X.n and X.n % 2 == 1


def _is_trivial(G: FgAbGroup | None) -> bool:
    return G is not None and G.is_trivial


# -- triviality of induced maps ---------------------------------------------


class Status(enum.Enum):
    TRIVIAL_FACT = "TRIVIAL_FACT"
    DISTANT = "DISTANT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Fact:
    """Outcome of a fact query; ``reason`` and ``detail`` allow replay."""

    status: Status
    reason: str = ""
    detail: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def holds(self) -> bool:
        return self.status is not Status.UNKNOWN

    def to_dict(self) -> dict:
        return {"status": self.status.value, "reason": self.reason, "detail": self.detail}


UNKNOWN = Fact(Status.UNKNOWN)

TRIVIALITY_REASONS = (
    "hom-vanishes",
    "finite-to-free",
    "sphere-null",
    "hurewicz-null",
    "proj-cohomology",
    "lens-cohomology",
)


def _fmt(G: FgAbGroup | None) -> str | None:
    return None if G is None else format_group(G)


def _triviality_by(X: Space, Y: Space, k: int, reason: str) -> dict | None:
    """Detail dict if ``reason`` proves maps ``X -> Y`` are zero on π_k, else None."""
    if reason == "hom-vanishes":
        a, b = homotopy_group(X, k), homotopy_group(Y, k)
        if _is_trivial(a) or _is_trivial(b):
            return {"source_group": _fmt(a), "target_group": _fmt(b)}
        if a is not None and b is not None and hom_group(a, b).is_trivial:
            return {"source_group": _fmt(a), "target_group": _fmt(b), "hom": "0"}
        return None
    if reason == "finite-to-free":
        b = homotopy_group(Y, k)
        if b is not None and not b.invariant_factors and known_finite(X, k):
            return {"target_group": _fmt(b), "source_finite": True}
        return None
    if reason == "sphere-null":
        if isinstance(X, Sphere) and _is_trivial(homotopy_group(Y, X.n)):
            return {"sphere": X.n, "pi_of_target": "0"}
        return None
    if reason == "hurewicz-null":
        h = homology_group(X, k)
        if _is_trivial(h) and hurewicz_injective(Y, k):
            return {"source_homology": "0"}
        return None
    if reason == "proj-cohomology":
        if (
            isinstance(X, Projective)
            and isinstance(Y, Projective)
            and X.field_ is Y.field_
            and 2 <= Y.n < X.n
            and k == X.d
        ):
            return {"field": X.field_.name, "m": Y.n, "n": X.n}
        return None
    if reason == "lens-cohomology":
        if isinstance(X, Lens) and isinstance(Y, Lens) and X.p == Y.p and 2 <= Y.n < X.n and k == 1:
            return {"p": X.p, "m": Y.n, "n": X.n}
        return None
    raise ValueError(f"unknown triviality reason {reason!r}")


def maps_trivial(X: Space, Y: Space, k: int) -> Fact:
    """Whether every map ``X -> Y`` between single spaces is zero on ``π_k``."""
    return _maps_trivial_cached(X, Y, k)


@lru_cache(maxsize=None)
def _maps_trivial_cached(X: Space, Y: Space, k: int) -> Fact:
    for reason in TRIVIALITY_REASONS:
        detail = _triviality_by(X, Y, k, reason)
        if detail is not None:
            return Fact(Status.TRIVIAL_FACT, reason, detail)
    return UNKNOWN


def _as_factors(X: Space | Sequence[Space]) -> tuple[Space, ...]:
    if isinstance(X, (list, tuple)):
        return tuple(X)
    return (X,)


def all_maps_trivial_on_pik(X: Space | Sequence[Space], Y: Space | Sequence[Space], k: int) -> Fact:
    """Every map ``X -> Y`` induces zero on ``π_k``; products are handled factorwise."""
    xs, ys = _as_factors(X), _as_factors(Y)
    if len(xs) == 1 and len(ys) == 1:
        return maps_trivial(xs[0], ys[0], k)
    pairs = []
    for i, a in enumerate(xs):
        for j, b in enumerate(ys):
            f = maps_trivial(a, b, k)
            if not f.holds:
                return UNKNOWN
            pairs.append({"from": i, "to": j, "reason": f.reason, "detail": f.detail})
    return Fact(Status.TRIVIAL_FACT, "pairwise", {"pairs": pairs})


def check_triviality(X: Space | Sequence[Space], Y: Space | Sequence[Space], k: int, fact: dict) -> bool:
    """Replay a triviality fact produced by :func:`all_maps_trivial_on_pik`."""
    xs, ys = _as_factors(X), _as_factors(Y)
    try:
        reason = fact["reason"]
        detail = fact.get("detail", {})
        if reason == "pairwise":
            claimed = {(p["from"], p["to"]): p for p in detail["pairs"]}
            if set(claimed) != {(i, j) for i in range(len(xs)) for j in range(len(ys))}:
                return False
            return all(
                _triviality_by(xs[i], ys[j], k, p["reason"]) == p["detail"] for (i, j), p in claimed.items()
            )
        if len(xs) != 1 or len(ys) != 1:
            return False
        return _triviality_by(xs[0], ys[0], k, reason) == detail
    except (KeyError, TypeError, ValueError):
        return False


# -- distance -----------------------------------------------------------------

MAX_HOM_PAIRS = 4096


def _sum_pi(xs: Sequence[Space], k: int) -> FgAbGroup | None:
    groups = [homotopy_group(x, k) for x in xs]
    if any(g is None for g in groups):
        return None
    return direct_sum(groups)


def _composites_nilpotent(A: FgAbGroup, B: FgAbGroup, max_pairs: int) -> int | None:
    """Number of pairs checked if every ``A -> B -> A`` composite is nilpotent, else None."""
    if not (A.is_finite or B.is_finite):
        return None
    n1, n2 = hom_count(A, B), hom_count(B, A)
    if n1 is None or n2 is None or n1 * n2 > max_pairs:
        return None
    try:
        fwd = enumerate_homs(A, B)
        back = enumerate_homs(B, A)
    except Unsupported:
        return None
    for f in fwd:
        for g in back:
            endo = compose(g, f) if A.is_finite else compose(f, g)
            if not is_nilpotent(endo):
                return None
    return n1 * n2


def _degree_distance(xs: tuple[Space, ...], ys: tuple[Space, ...], k: int, max_pairs: int) -> dict | None:
    t = all_maps_trivial_on_pik(xs, ys, k)
    if t.holds:
        return {"k": k, "reason": "maps-trivial", "direction": "X->Y", "fact": t.to_dict()}
    t = all_maps_trivial_on_pik(ys, xs, k)
    if t.holds:
        return {"k": k, "reason": "maps-trivial", "direction": "Y->X", "fact": t.to_dict()}
    A, B = _sum_pi(xs, k), _sum_pi(ys, k)
    if A is not None and B is not None:
        pairs = _composites_nilpotent(A, B, max_pairs)
        if pairs is not None:
            return {
                "k": k,
                "reason": "composite-nilpotent",
                "groups": [format_group(A), format_group(B)],
                "pairs": pairs,
            }
    return None


@dataclass(frozen=True)
class DistanceResult:
    status: Status
    degrees: tuple = ()
    failed_at: int | None = None

    @property
    def holds(self) -> bool:
        return self.status is Status.DISTANT

    def to_dict(self) -> dict:
        return {"status": self.status.value, "degrees": list(self.degrees)}


def are_n_distant(
    X: Space | Sequence[Space], Y: Space | Sequence[Space], n: int, max_pairs: int = MAX_HOM_PAIRS
) -> DistanceResult:
    """Homotopic ``n``-distance of ``X`` and ``Y`` (either may be a product)."""
    xs, ys = _as_factors(X), _as_factors(Y)
    degrees = []
    for k in range(1, n + 1):
        entry = _degree_distance(xs, ys, k, max_pairs)
        if entry is None:
            return DistanceResult(Status.UNKNOWN, tuple(degrees), k)
        degrees.append(entry)
    return DistanceResult(Status.DISTANT, tuple(degrees))


def check_distance(
    X: Space | Sequence[Space], Y: Space | Sequence[Space], n: int, degrees: Sequence[dict], max_pairs: int = MAX_HOM_PAIRS
) -> bool:
    xs, ys = _as_factors(X), _as_factors(Y)
    try:
        if sorted(d["k"] for d in degrees) != list(range(1, n + 1)):
            return False
        for d in degrees:
            k = d["k"]
            if d["reason"] == "maps-trivial":
                src, dst = (xs, ys) if d["direction"] == "X->Y" else (ys, xs)
                if d["direction"] not in ("X->Y", "Y->X") or not check_triviality(src, dst, k, d["fact"]):
                    return False
            elif d["reason"] == "composite-nilpotent":
                A, B = _sum_pi(xs, k), _sum_pi(ys, k)
                if A is None or B is None or [format_group(A), format_group(B)] != d["groups"]:
                    return False
                if _composites_nilpotent(A, B, max_pairs) != d["pairs"]:
                    return False
            else:
                return False
        return True
    except (KeyError, TypeError, ValueError):
        return False


def _clear_caches() -> None:
    _homotopy_cached.cache_clear()
    _maps_trivial_cached.cache_clear()
