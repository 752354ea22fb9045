"""Self-closeness of products with replayable certificates.

``compute_ne`` takes ``N = max NE(X_i)`` (always a lower bound) and tries to
show that ``A_N`` of the product is reducible.  When a rule fires the value is
exact and the returned certificate records every fact used; otherwise the
result is reported as a lower bound.

Certificate nodes:

``THM-PRODUCT``
    NE of every factor, ``N`` as their maximum, and one reducibility node at
    level ``N``.
``R0-SINGLE``
    one factor: nothing to reduce.
``R-EM-MERGE``
    Eilenberg-MacLane factors of equal degree merged into one.
``R1``
    in each degree ``k <= n`` the factors admit an order in which every map
    from an earlier to a later factor is zero on ``π_k``.
``R2``
    all ``π_k`` finite and pairwise without a common indecomposable summand.
``R-ATOMIC``
    atomic factors of distinct Hurewicz dimensions, none a retract of another.
``R-MOORE`` / ``R-EM-TRUNC`` / ``R3``
    a pivot ``X`` split off from a remainder ``Y`` that is ``n``-distant from it.
``R-PROJ`` / ``R-LENS``
    pairs of projective or lens spaces of different dimensions.
"""

from __future__ import annotations

import copy
import enum
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .abgroup import format_group, has_common_direct_factor, parse_group, direct_sum
from .catalog import (
    EM,
    Atomic,
    Field,
    Lens,
    Moore,
    Projective,
    Space,
    Sphere,
    all_maps_trivial_on_pik,
    are_n_distant,
    check_distance,
    check_triviality,
    get_table,
    homotopy_group,
    self_closeness,
    space_from_dict,
    space_to_dict,
)
from .ringprops import is_end_commutative, is_J_reduced_end

ANCHORS = {
    "THM-PRODUCT": "reducible A_N with N the largest factor NE gives NE of the product",
    "LOWER-BOUND": "NE of a product is at least the NE of each factor",
    "R0-SINGLE": "a single factor is trivially reducible",
    "R-EM-MERGE": "K(G,k) x K(H,k) is K(G+H,k)",
    "R1": "block-triangular homotopy matrices have invertible diagonal blocks",
    "R2": "finite abelian groups without common summands have reducible Aut",
    "R-ATOMIC": "atomic factors of distinct Hurewicz dimension, no retracts",
    "R-MOORE": "Moore pivot of top degree with a distant remainder",
    "R-EM-TRUNC": "Eilenberg-MacLane pivot with a distant truncated remainder",
    "R3": "distant remainder with radical or central composites",
    "R-PROJ": "projective spaces over one field of different dimensions",
    "R-LENS": "lens spaces of different dimensions",
}

REDUCIBILITY_RULES = (
    "R0-SINGLE",
    "R-EM-MERGE",
    "R1",
    "R2",
    "R-ATOMIC",
    "R-MOORE",
    "R-EM-TRUNC",
    "R3",
    "R-PROJ",
    "R-LENS",
)


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class ProductProblem:
    factors: tuple[Space, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise EngineError("a product needs at least one factor")

    @property
    def label(self) -> str:
        return " x ".join(f.label for f in self.factors)


@dataclass
class Premise:
    fact: dict
    anchor: str = ""
    sub: Certificate | None = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"fact": copy.deepcopy(self.fact), "anchor": self.anchor}
        if self.sub is not None:
            d["sub"] = self.sub.to_dict()
        return d


@dataclass
class Certificate:
    rule_id: str
    level: int
    factors: tuple[Space, ...]
    premises: list[Premise] = field(default_factory=list)
    conclusion: dict = field(default_factory=dict)

    @property
    def anchor(self) -> str:
        return ANCHORS.get(self.rule_id, "")

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "level": self.level,
            "anchor": self.anchor,
            "factors": [space_to_dict(f) for f in self.factors],
            "premises": [p.to_dict() for p in self.premises],
            "conclusion": copy.deepcopy(self.conclusion),
        }

    @classmethod
    def from_dict(cls, d: dict) -> Certificate:
        return cls(
            rule_id=d["rule_id"],
            level=int(d["level"]),
            factors=tuple(space_from_dict(f) for f in d["factors"]),
            premises=[
                Premise(p["fact"], p.get("anchor", ""), cls.from_dict(p["sub"]) if p.get("sub") else None)
                for p in d.get("premises", [])
            ],
            conclusion=d.get("conclusion", {}),
        )


class Status(enum.Enum):
    EXACT = "EXACT"
    LOWER_BOUND = "LOWER_BOUND"


@dataclass
class EngineResult:
    status: Status
    value: int
    certificate: Certificate | None = None
    problem: ProductProblem | None = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"status": self.status.value, "value": self.value}
        if self.problem is not None:
            d["product"] = self.problem.label
        d["certificate"] = None if self.certificate is None else self.certificate.to_dict()
        return d


# -- search -------------------------------------------------------------------


def lower_bound(P: ProductProblem) -> int:
    return max(self_closeness(X) for X in P.factors)


def _reducible_node(rule: str, n: int, factors: Sequence[Space], premises: list[Premise], **extra) -> Certificate:
    conclusion = {"reducible": True, "level": n}
    conclusion.update(extra)
    return Certificate(rule, n, tuple(factors), premises, conclusion)


def _triangular_order(factors: Sequence[Space], k: int) -> dict | None:
    remaining = list(range(len(factors)))
    order: list[int] = []
    pairs: list[dict] = []
    while remaining:
        for i in remaining:
            facts = []
            for j in remaining:
                if j == i:
                    continue
                f = all_maps_trivial_on_pik(factors[i], factors[j], k)
                if not f.holds:
                    break
                facts.append({"from": i, "to": j, "fact": f.to_dict()})
            else:
                order.append(i)
                pairs.extend(facts)
                remaining.remove(i)
                break
        else:
            return None
    return {"kind": "triangular", "k": k, "order": order, "pairs": pairs}


def _rule_r1(factors: Sequence[Space], n: int, **_) -> Certificate | None:
    premises = []
    for k in range(1, n + 1):
        fact = _triangular_order(factors, k)
        if fact is None:
            return None
        premises.append(Premise(fact, "maps from earlier to later factors vanish on pi_k"))
    return _reducible_node("R1", n, factors, premises)


def _rule_r2(factors: Sequence[Space], n: int, **_) -> Certificate | None:
    premises = []
    for k in range(1, n + 1):
        groups = [homotopy_group(X, k) for X in factors]
        if any(g is None or not g.is_finite for g in groups):
            return None
        for a, b in itertools.combinations(groups, 2):
            if has_common_direct_factor(a, b):
                return None
        premises.append(
            Premise({"kind": "bcm", "k": k, "groups": [format_group(g) for g in groups]}, "finite, no common summands")
        )
    return _reducible_node("R2", n, factors, premises)


def _merge_em(factors: Sequence[EM]) -> tuple[list[EM], list[list[int]]]:
    by_degree: dict[int, list[int]] = {}
    for i, X in enumerate(factors):
        by_degree.setdefault(X.n, []).append(i)
    merged = []
    groups = []
    for deg in sorted(by_degree):
        idx = by_degree[deg]
        merged.append(EM(direct_sum(factors[i].group for i in idx), deg))
        groups.append(idx)
    return merged, groups


def _rule_em_merge(factors: Sequence[Space], n: int, **opts) -> Certificate | None:
    if len(factors) < 2 or not all(isinstance(X, EM) for X in factors):
        return None
    merged, groups = _merge_em(factors)  # type: ignore[arg-type]
    if len(merged) == len(factors):
        return None
    sub = check_reducible(ProductProblem(tuple(merged)), n, **opts)
    if sub is None:
        return None
    fact = {"kind": "em_merge", "classes": groups, "merged": [space_to_dict(X) for X in merged]}
    return _reducible_node("R-EM-MERGE", n, factors, [Premise(fact, ANCHORS["R-EM-MERGE"], sub)])


def _declared_no_retract(a: Atomic, b: Atomic) -> bool:
    return b.name in a.no_retract or a.name in b.no_retract


def _rule_atomic(factors: Sequence[Space], n: int, **_) -> Certificate | None:
    if len(factors) < 2 or not all(isinstance(X, Atomic) for X in factors):
        return None
    dims = [X.dim for X in factors]  # type: ignore[union-attr]
    if len(set(dims)) != len(dims) or n != max(dims):
        return None
    pairs = []
    for i, j in itertools.combinations(range(len(factors)), 2):
        if not _declared_no_retract(factors[i], factors[j]):  # type: ignore[arg-type]
            return None
        pairs.append([i, j])
    fact = {"kind": "atomic_family", "dims": dims, "no_retract_pairs": pairs}
    return _reducible_node("R-ATOMIC", n, factors, [Premise(fact, "declared by the user")])


def _split(factors: Sequence[Space], pivot: Sequence[int]) -> tuple[tuple[Space, ...], tuple[Space, ...]]:
    X = tuple(factors[i] for i in pivot)
    Y = tuple(f for i, f in enumerate(factors) if i not in pivot)
    return X, Y


def _remainder_premise(Y: tuple[Space, ...], n: int, opts: dict) -> Premise | None:
    res = compute_ne(ProductProblem(Y), **opts)
    if res.status is not Status.EXACT or res.value > n:
        return None
    return Premise({"kind": "remainder_exact", "value": res.value}, "NE of the remainder is at most the level", res.certificate)


def _distance_premise(X: Sequence[Space], Y: Sequence[Space], n: int) -> Premise | None:
    d = are_n_distant(tuple(X), tuple(Y), n)
    if not d.holds:
        return None
    return Premise({"kind": "distant", "n": n, "degrees": list(d.degrees)}, "self-maps of Y through X are nilpotent on pi_k")


def _moore_degree(X: Space) -> int | None:
    if isinstance(X, Moore):
        return X.n
    if isinstance(X, Sphere) and X.n >= 2:
        return X.n
    return None


def _rule_moore(factors: Sequence[Space], n: int, **opts) -> Certificate | None:
    if len(factors) < 2 or n < 2:
        return None
    for i, X in enumerate(factors):
        if _moore_degree(X) != n:
            continue
        piv, rest = _split(factors, [i])
        dist = _distance_premise(piv, rest, n)
        if dist is None:
            continue
        rem = _remainder_premise(rest, n, opts)
        if rem is None:
            continue
        fact = {"kind": "pivot", "pivot": [i], "remainder": [j for j in range(len(factors)) if j != i]}
        return _reducible_node("R-MOORE", n, factors, [Premise(fact, "Moore space of top degree"), dist, rem])
    return None


def _rule_em_trunc(factors: Sequence[Space], n: int, **opts) -> Certificate | None:
    if len(factors) < 2 or n < 2:
        return None
    for i, X in enumerate(factors):
        if not (isinstance(X, EM) and X.n == n):
            continue
        piv, rest = _split(factors, [i])
        if not all(isinstance(Y, EM) and Y.n <= n for Y in rest):
            continue
        dist = _distance_premise(piv, rest, n)
        if dist is None:
            continue
        fact = {"kind": "pivot", "pivot": [i], "remainder": [j for j in range(len(factors)) if j != i]}
        trunc = {"kind": "truncated", "degrees": [Y.n for Y in rest]}  # type: ignore[union-attr]
        return _reducible_node(
            "R-EM-TRUNC", n, factors, [Premise(fact, "EM pivot of top degree"), Premise(trunc, "pi_j(Y) = 0 for j > n"), dist]
        )
    return None


def _end_ring_fact(G, k: int) -> dict | None:
    v = is_J_reduced_end(G)
    if v.yes:
        return {"kind": "end_ring", "k": k, "group": format_group(G), "property": "j-reduced", "rule": v.rule}
    v = is_end_commutative(G)
    if v.yes:
        return {
            "kind": "end_ring",
            "k": k,
            "group": format_group(G),
            "property": "commutative",
            "rule": v.rule,
            "variant": "R3c-strong",
        }
    return None


def _low_degree_fact(X: Sequence[Space], Y: Sequence[Space], k: int) -> dict | None:
    for direction, (a, b) in (("Y->X", (Y, X)), ("X->Y", (X, Y))):
        f = all_maps_trivial_on_pik(tuple(a), tuple(b), k)
        if f.holds:
            return {"kind": "maps_trivial", "k": k, "direction": direction, "fact": f.to_dict()}
    return None


def _pivot_candidates(m: int, search: bool) -> list[tuple[int, ...]]:
    singles = [(i,) for i in range(m)]
    if not search:
        return singles
    subsets = [c for r in range(2, m) for c in itertools.combinations(range(m), r)]
    return singles + subsets


def _rule_r3(factors: Sequence[Space], n: int, pivot_search: bool = False, **opts) -> Certificate | None:
    m = len(factors)
    if m < 2:
        return None
    opts = dict(opts, pivot_search=pivot_search)
    for pivot in _pivot_candidates(m, pivot_search):
        X, Y = _split(factors, pivot)
        premises = [Premise({"kind": "pivot", "pivot": list(pivot), "remainder": [j for j in range(m) if j not in pivot]}, "pivot choice")]
        if len(X) == 1:
            ne_x = self_closeness(X[0])
            premises.append(Premise({"kind": "ne", "factor": pivot[0], "value": ne_x}, "catalogued NE"))
        else:
            res = compute_ne(ProductProblem(X), **opts)
            if res.status is not Status.EXACT:
                continue
            ne_x = res.value
            premises.append(Premise({"kind": "pivot_exact", "value": ne_x}, "NE of the pivot", res.certificate))
        if n < ne_x:
            continue
        dist = _distance_premise(X, Y, n)
        if dist is None:
            continue
        premises.append(dist)
        ring_ok = True
        for k in range(1, n + 1):
            G = _sum_group(Y, k)
            fact = None if G is None else _end_ring_fact(G, k)
            if fact is None:
                ring_ok = False
                break
            premises.append(Premise(fact, "nilpotent composites are radical or central"))
        if not ring_ok:
            continue
        low_ok = True
        for k in range(1, ne_x + 1):
            fact = _low_degree_fact(X, Y, k)
            if fact is None:
                low_ok = False
                break
            premises.append(Premise(fact, "f_XX invertible below NE(X) by triangularity"))
        if not low_ok:
            continue
        rem = _remainder_premise(Y, n, opts)
        if rem is None:
            continue
        premises.append(rem)
        return _reducible_node("R3", n, factors, premises)
    return None


def _sum_group(Y: Sequence[Space], k: int):
    groups = [homotopy_group(y, k) for y in Y]
    if any(g is None for g in groups):
        return None
    return direct_sum(groups)


def _projective_pair(factors: Sequence[Space]) -> tuple[Projective, Projective] | None:
    if len(factors) != 2 or not all(isinstance(X, Projective) for X in factors):
        return None
    a, b = sorted(factors, key=lambda X: X.n)  # type: ignore[union-attr]
    if a.field_ is not b.field_ or not (2 <= a.n < b.n):
        return None
    return a, b


def _rule_proj(factors: Sequence[Space], n: int, **_) -> Certificate | None:
    pair = _projective_pair(factors)
    if pair is None or n != self_closeness(pair[1]):
        return None
    a, b = pair
    fact = {"kind": "axiom", "name": "projective-pair", "field": a.field_.name, "m": a.n, "n": b.n}
    return _reducible_node("R-PROJ", n, factors, [Premise(fact, ANCHORS["R-PROJ"])])


def _lens_pair(factors: Sequence[Space]) -> tuple[Lens, Lens] | None:
    if len(factors) != 2 or not all(isinstance(X, Lens) for X in factors):
        return None
    a, b = sorted(factors, key=lambda X: X.n)  # type: ignore[union-attr]
    if not (2 <= a.n < b.n):
        return None
    return a, b


def _rule_lens(factors: Sequence[Space], n: int, **_) -> Certificate | None:
    pair = _lens_pair(factors)
    if pair is None or n != pair[1].dim:
        return None
    a, b = pair
    fact = {"kind": "axiom", "name": "lens-pair", "m": a.n, "n": b.n, "p": a.p, "q": b.p}
    return _reducible_node("R-LENS", n, factors, [Premise(fact, ANCHORS["R-LENS"])])


def _rule_single(factors: Sequence[Space], n: int, **_) -> Certificate | None:
    if len(factors) != 1:
        return None
    return _reducible_node("R0-SINGLE", n, factors, [])


RULES: dict[str, Callable[..., Certificate | None]] = {
    "R0-SINGLE": _rule_single,
    "R-EM-MERGE": _rule_em_merge,
    "R1": _rule_r1,
    "R2": _rule_r2,
    "R-ATOMIC": _rule_atomic,
    "R-MOORE": _rule_moore,
    "R-EM-TRUNC": _rule_em_trunc,
    "R3": _rule_r3,
    "R-PROJ": _rule_proj,
    "R-LENS": _rule_lens,
}


def check_reducible(
    P: ProductProblem, n: int, rules: Sequence[str] | None = None, pivot_search: bool = False
) -> Certificate | None:
    """A reducibility certificate for ``A_n`` of the product, or None (unknown)."""
    if n < 1:
        raise EngineError("level must be >= 1")
    for name in rules or REDUCIBILITY_RULES:
        cert = RULES[name](P.factors, n, pivot_search=pivot_search)
        if cert is not None:
            return cert
    return None


_cache: dict = {}


def compute_ne(P: ProductProblem, pivot_search: bool = False) -> EngineResult:
    key = (P.factors, pivot_search, id(get_table()))
    hit = _cache.get(key)
    if hit is not None:
        return hit
    N = lower_bound(P)
    sub = check_reducible(P, N, pivot_search=pivot_search)
    if sub is None:
        result = EngineResult(Status.LOWER_BOUND, N, None, P)
    else:
        premises = [
            Premise({"kind": "ne", "factor": i, "value": self_closeness(X)}, "catalogued NE")
            for i, X in enumerate(P.factors)
        ]
        premises.append(Premise({"kind": "level_bound", "value": N}, ANCHORS["LOWER-BOUND"]))
        premises.append(Premise({"kind": "reducible", "level": N}, "reducibility at the top level", sub))
        cert = Certificate("THM-PRODUCT", N, P.factors, premises, {"ne": N, "status": "EXACT"})
        result = EngineResult(Status.EXACT, N, cert, P)
    _cache[key] = result
    return result


def clear_cache() -> None:
    _cache.clear()


# -- verification ---------------------------------------------------------------


class _Fail(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass
class VerifyReport:
    ok: bool
    path: str = ""
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _need(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise _Fail(path, message)


def _facts(c: Certificate, kind: str) -> list[Premise]:
    return [p for p in c.premises if p.fact.get("kind") == kind]


def _one(c: Certificate, kind: str, path: str) -> Premise:
    ps = _facts(c, kind)
    _need(len(ps) == 1, path, f"expected exactly one '{kind}' premise, found {len(ps)}")
    return ps[0]


def _premise_path(c: Certificate, p: Premise, path: str) -> str:
    return f"{path}/premises[{c.premises.index(p)}]:{p.fact.get('kind')}"


def _verify_product(c: Certificate, path: str) -> int:
    _need(c.rule_id == "THM-PRODUCT", path, f"expected THM-PRODUCT, got {c.rule_id}")
    m = len(c.factors)
    _need(m >= 1, path, "no factors")
    nes = _facts(c, "ne")
    _need(sorted(p.fact.get("factor") for p in nes) == list(range(m)), path, "NE premise missing for some factor")
    for p in nes:
        i = p.fact["factor"]
        _need(p.fact.get("value") == self_closeness(c.factors[i]), _premise_path(c, p, path), "NE value does not match catalog")
    N = max(self_closeness(X) for X in c.factors)
    lb = _one(c, "level_bound", path)
    _need(lb.fact.get("value") == N, _premise_path(c, lb, path), "level is not the maximum factor NE")
    _need(c.level == N, path, "certificate level differs from the maximum factor NE")
    red = _one(c, "reducible", path)
    rp = _premise_path(c, red, path)
    _need(red.fact.get("level") == N and red.sub is not None, rp, "missing reducibility sub-certificate")
    _need(tuple(red.sub.factors) == tuple(c.factors), rp, "sub-certificate is about different factors")
    _need(red.sub.level == N, rp, "sub-certificate level mismatch")
    _verify_reducible(red.sub, rp + "/" + red.sub.rule_id)
    _need(c.conclusion.get("ne") == N, path, "conclusion does not state NE = N")
    return N


def _verify_sub_product(p: Premise, c: Certificate, path: str, factors: tuple[Space, ...], bound: int) -> int:
    pp = _premise_path(c, p, path)
    _need(p.sub is not None, pp, "missing sub-certificate")
    _need(tuple(p.sub.factors) == factors, pp, "sub-certificate is about different factors")
    value = _verify_product(p.sub, pp + "/THM-PRODUCT")
    _need(p.fact.get("value") == value, pp, "stated value differs from sub-certificate")
    _need(value <= bound, pp, "value exceeds the level")
    return value


def _verify_pivot(c: Certificate, path: str) -> tuple[list[int], tuple[Space, ...], tuple[Space, ...]]:
    p = _one(c, "pivot", path)
    pivot = p.fact.get("pivot")
    rem = p.fact.get("remainder")
    m = len(c.factors)
    _need(
        isinstance(pivot, list) and isinstance(rem, list) and sorted(pivot + rem) == list(range(m)) and pivot and rem,
        _premise_path(c, p, path),
        "pivot/remainder is not a partition of the factors",
    )
    X, Y = _split(c.factors, pivot)
    return pivot, X, Y


def _verify_distance(c: Certificate, X, Y, n: int, path: str) -> None:
    p = _one(c, "distant", path)
    _need(p.fact.get("n") == n, _premise_path(c, p, path), "distance level mismatch")
    _need(check_distance(X, Y, n, p.fact.get("degrees", [])), _premise_path(c, p, path), "distance facts do not replay")


def _verify_reducible(c: Certificate, path: str) -> None:
    n = c.level
    F = c.factors
    m = len(F)
    rule = c.rule_id
    _need(rule in REDUCIBILITY_RULES, path, f"unknown rule {rule!r}")
    _need(n >= 1, path, "level must be positive")
    if rule == "R0-SINGLE":
        _need(m == 1, path, "single-factor rule on several factors")
    elif rule == "R1":
        tri = _facts(c, "triangular")
        _need(sorted(p.fact.get("k") for p in tri) == list(range(1, n + 1)), path, "triangular facts must cover k = 1..n")
        for p in tri:
            pp = _premise_path(c, p, path)
            k = p.fact["k"]
            order = p.fact.get("order", [])
            _need(sorted(order) == list(range(m)), pp, "order is not a permutation of the factors")
            claimed = {(q["from"], q["to"]): q["fact"] for q in p.fact.get("pairs", [])}
            for a, b in itertools.combinations(order, 2):
                _need((a, b) in claimed, pp, f"missing triviality fact {a}->{b} at k={k}")
                _need(check_triviality(F[a], F[b], k, claimed[(a, b)]), pp, f"triviality {a}->{b} at k={k} does not replay")
    elif rule == "R2":
        bcm = _facts(c, "bcm")
        _need(sorted(p.fact.get("k") for p in bcm) == list(range(1, n + 1)), path, "bcm facts must cover k = 1..n")
        for p in bcm:
            pp = _premise_path(c, p, path)
            k = p.fact["k"]
            groups = [homotopy_group(X, k) for X in F]
            _need(all(g is not None and g.is_finite for g in groups), pp, f"pi_{k} not known finite")
            _need([format_group(g) for g in groups] == p.fact.get("groups"), pp, f"stated pi_{k} groups are wrong")
            for a, b in itertools.combinations(groups, 2):
                _need(not has_common_direct_factor(a, b), pp, f"common summand at k={k}")
    elif rule == "R-EM-MERGE":
        _need(all(isinstance(X, EM) for X in F), path, "non-EM factor")
        p = _one(c, "em_merge", path)
        pp = _premise_path(c, p, path)
        merged, groups = _merge_em(F)  # type: ignore[arg-type]
        _need(len(merged) < m, pp, "nothing to merge")
        _need(p.fact.get("classes") == groups, pp, "merge classes are wrong")
        _need([space_to_dict(X) for X in merged] == p.fact.get("merged"), pp, "merged factors are wrong")
        _need(p.sub is not None and tuple(p.sub.factors) == tuple(merged), pp, "sub-certificate must be about the merged product")
        _need(p.sub.level == n, pp, "sub-certificate level mismatch")
        _verify_reducible(p.sub, pp + "/" + p.sub.rule_id)
    elif rule == "R-ATOMIC":
        _need(m >= 2 and all(isinstance(X, Atomic) for X in F), path, "needs at least two atomic factors")
        dims = [X.dim for X in F]  # type: ignore[union-attr]
        _need(len(set(dims)) == m, path, "Hurewicz dimensions are not distinct")
        _need(n == max(dims), path, "level must be the top Hurewicz dimension")
        for i, j in itertools.combinations(range(m), 2):
            _need(_declared_no_retract(F[i], F[j]), path, f"no-retract not declared for {F[i].label}, {F[j].label}")  # type: ignore[arg-type]
    elif rule == "R-MOORE":
        pivot, X, Y = _verify_pivot(c, path)
        _need(len(X) == 1 and _moore_degree(X[0]) == n and n >= 2, path, "pivot must be a Moore space of degree n >= 2")
        _verify_distance(c, X, Y, n, path)
        _verify_sub_product(_one(c, "remainder_exact", path), c, path, Y, n)
    elif rule == "R-EM-TRUNC":
        pivot, X, Y = _verify_pivot(c, path)
        _need(len(X) == 1 and isinstance(X[0], EM) and X[0].n == n and n >= 2, path, "pivot must be K(G,n) with n >= 2")
        _need(all(isinstance(y, EM) and y.n <= n for y in Y), path, "remainder must have pi_j = 0 above n")
        _one(c, "truncated", path)
        _verify_distance(c, X, Y, n, path)
    elif rule == "R3":
        pivot, X, Y = _verify_pivot(c, path)
        if len(X) == 1:
            p = _one(c, "ne", path)
            _need(p.fact.get("value") == self_closeness(X[0]) and p.fact.get("factor") == pivot[0], _premise_path(c, p, path), "pivot NE is wrong")
            ne_x = p.fact["value"]
        else:
            ne_x = _verify_sub_product(_one(c, "pivot_exact", path), c, path, X, n)
        _need(n >= ne_x, path, "level below NE of the pivot")
        _verify_distance(c, X, Y, n, path)
        rings = _facts(c, "end_ring")
        _need(sorted(p.fact.get("k") for p in rings) == list(range(1, n + 1)), path, "end-ring facts must cover k = 1..n")
        for p in rings:
            pp = _premise_path(c, p, path)
            G = _sum_group(Y, p.fact["k"])
            _need(G is not None and format_group(G) == p.fact.get("group"), pp, "stated group is wrong")
            prop = p.fact.get("property")
            verdict = is_J_reduced_end(G) if prop == "j-reduced" else is_end_commutative(G) if prop == "commutative" else None
            _need(verdict is not None and verdict.yes, pp, f"End({p.fact.get('group')}) is not {prop}")
        low = _facts(c, "maps_trivial")
        _need(sorted(p.fact.get("k") for p in low) == list(range(1, ne_x + 1)), path, "low-degree triangularity must cover k <= NE(X)")
        for p in low:
            pp = _premise_path(c, p, path)
            src, dst = (Y, X) if p.fact.get("direction") == "Y->X" else (X, Y)
            _need(p.fact.get("direction") in ("Y->X", "X->Y"), pp, "bad direction")
            _need(check_triviality(src, dst, p.fact["k"], p.fact.get("fact", {})), pp, "triviality does not replay")
        _verify_sub_product(_one(c, "remainder_exact", path), c, path, Y, n)
    elif rule == "R-PROJ":
        pair = _projective_pair(F)
        _need(pair is not None, path, "needs FP^m x FP^n over one field with 2 <= m < n")
        _need(n == self_closeness(pair[1]), path, "level must be NE of the larger projective space")
        _one(c, "axiom", path)
    elif rule == "R-LENS":
        pair = _lens_pair(F)
        _need(pair is not None, path, "needs two lens spaces with 2 <= m < n")
        _need(n == pair[1].dim, path, "level must be the larger lens dimension")
        _one(c, "axiom", path)
    _need(c.conclusion.get("reducible") is True and c.conclusion.get("level") == n, path, "conclusion does not match")


def verify_report(c: Certificate | dict | None) -> VerifyReport:
    """Replay a certificate; on failure report the first offending node."""
    if c is None or c == {}:
        return VerifyReport(False, "", "empty certificate")
    try:
        cert = c if isinstance(c, Certificate) else Certificate.from_dict(c)
    except (KeyError, TypeError, ValueError) as e:
        return VerifyReport(False, "", f"malformed certificate: {e}")
    try:
        if cert.rule_id == "THM-PRODUCT":
            _verify_product(cert, "THM-PRODUCT")
        else:
            _verify_reducible(cert, cert.rule_id)
    except _Fail as f:
        return VerifyReport(False, f.path, f.message)
    except (KeyError, TypeError, ValueError, IndexError) as e:
        return VerifyReport(False, cert.rule_id, f"malformed premise: {e!r}")
    return VerifyReport(True)


def verify_certificate(c: Certificate | dict | None) -> bool:
    return verify_report(c).ok


def verify_result(doc: dict) -> VerifyReport:
    """Check an ``ne --json`` document (or a bare certificate)."""
    if "rule_id" in doc:
        return verify_report(doc)
    status = doc.get("status")
    cert = doc.get("certificate")
    if status == Status.EXACT.value:
        rep = verify_report(cert)
        if rep.ok and cert.get("conclusion", {}).get("ne") != doc.get("value"):
            return VerifyReport(False, "THM-PRODUCT", "reported value differs from the certificate")
        return rep
    if status == Status.LOWER_BOUND.value:
        return VerifyReport(False, "", "lower-bound results carry no certificate to verify")
    return VerifyReport(False, "", f"unknown status {status!r}")
