"""Ring-theoretic verdicts about ``End(G)`` used by the reducibility rules.

Verdicts are three-valued.  A YES or NO always names the rule that produced it
and, for NO, carries explicit endomorphisms that anyone can recheck with
:mod:`selfclose.homs`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .abgroup import FgAbGroup, PrimaryComponent, primary_decomposition, ulm_kaplansky
from .homs import (
    Homomorphism,
    add,
    commutes,
    compose,
    elementary_generators,
    identity,
    is_automorphism,
    is_nilpotent,
    make_hom,
    negate,
    primary_basis,
)


class Verdict(enum.Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class RingVerdict:
    status: Verdict
    rule: str
    anchor: str = ""
    witness: dict = field(default_factory=dict, compare=False)

    @property
    def yes(self) -> bool:
        return self.status is Verdict.YES

    def to_dict(self) -> dict:
        d = {"status": self.status.value, "rule": self.rule, "anchor": self.anchor}
        if self.witness:
            d["witness"] = self.witness
        return d


def is_end_commutative(G: FgAbGroup) -> RingVerdict:
    if G.is_cyclic:
        return RingVerdict(Verdict.YES, "cyclic", "End of a cyclic group is a quotient of Z")
    gens = elementary_generators(G.gens)
    for i, a in enumerate(gens):
        for b in gens[i + 1 :]:
            if not commutes(a, b):
                return RingVerdict(
                    Verdict.NO,
                    "noncommuting-pair",
                    "explicit pair of endomorphisms",
                    {"f": a.to_dict(), "g": b.to_dict()},
                )
    return RingVerdict(Verdict.UNKNOWN, "no-rule")


def nj_criterion(C: PrimaryComponent) -> bool:
    """Exponents strictly increasing, i.e. every Ulm-Kaplansky invariant is at most 1."""
    return all(a < b for a, b in zip(C.exponents, C.exponents[1:]))


def nilpotent_outside_radical(G: FgAbGroup) -> dict | None:
    """A nilpotent ``x`` with ``1 + r x`` not a unit, if a repeated summand exists.

    Two summands of the same order ``p^r`` (or two copies of ``Z``) give the
    pair ``x: e_j -> e_i`` and ``r = -(e_i -> e_j)``; then ``1 + r x`` kills
    ``e_j``'s direction mod ``p``.
    """
    if G.free_rank >= 2:
        pres = G.gens
        i, j = 0, 1
    else:
        pres, _, _ = primary_basis(G.gens)
        seen: dict[int, int] = {}
        pair = None
        for idx, o in enumerate(pres):
            if o and o in seen:
                pair = (seen[o], idx)
                break
            seen.setdefault(o, idx)
        if pair is None:
            return None
        i, j = pair
    n = len(pres)

    def unit_vector_map(src: int, dst: int) -> Homomorphism:
        rows = [[0] * n for _ in range(n)]
        rows[dst][src] = 1
        return make_hom(pres, pres, rows)

    x = unit_vector_map(j, i)
    r = negate(unit_vector_map(i, j))
    s = identity(pres)
    test = add(identity(pres), compose(r, compose(x, s)))
    assert is_nilpotent(x) and not is_automorphism(test)
    return {"presentation": list(pres), "x": x.to_dict(), "r": r.to_dict(), "s": s.to_dict()}


def is_J_reduced_end(G: FgAbGroup) -> RingVerdict:
    if G.is_cyclic:
        return RingVerdict(Verdict.YES, "cyclic", "commutative ring: nilpotents lie in the radical")
    if G.is_finite and all(nj_criterion(c) for c in primary_decomposition(G)):
        return RingVerdict(Verdict.YES, "ulm-kaplansky", "all Ulm-Kaplansky invariants are at most 1")
    if G.is_finite or not G.invariant_factors:
        w = nilpotent_outside_radical(G)
        if w is not None:
            return RingVerdict(Verdict.NO, "nilpotent-outside-radical", "1 + r x s is not a unit", w)
    return RingVerdict(Verdict.UNKNOWN, "no-rule")


def max_ulm_kaplansky(C: PrimaryComponent) -> int:
    return max(ulm_kaplansky(C, s) for s in range(max(C.exponents) + 1))


def check_nilpotent_witness(w: dict) -> bool:
    """Re-check a NO witness from :func:`is_J_reduced_end`."""
    pres = tuple(w["presentation"])
    x = Homomorphism.from_dict(w["x"])
    r = Homomorphism.from_dict(w["r"])
    s = Homomorphism.from_dict(w["s"])
    if not (x.src == r.src == s.src == pres and x.is_endo and r.is_endo and s.is_endo):
        return False
    return is_nilpotent(x) and not is_automorphism(add(identity(pres), compose(r, compose(x, s))))
