"""Command-line front end: ``selfclose ne|verify|lab``.

Exit codes: 0 success, 1 usage or parse error, 2 inconclusive under
``--require-exact``, 3 verification or lab failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from typing import Sequence

from sympy import factorint

from .abgroup import FgAbGroup, GroupSyntaxError, parse_group, primary_decomposition
from .catalog import (
    EM,
    Atomic,
    CplxProj,
    DomainError,
    Lens,
    Moore,
    QuatProj,
    RealProj,
    Space,
    Sphere,
    TableError,
    load_table,
    set_table,
)
from .engine import Certificate, EngineResult, ProductProblem, Status, compute_ne, verify_result

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONCLUSIVE = 2
EXIT_FAILED = 3


class ExpressionError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.text = text
        self.position = position

    def caret(self) -> str:
        return f"{self.text}\n{' ' * self.position}^ {self.message}"


@dataclass
class AtomicDecl:
    name: str
    dim: int
    prime: int
    exponent: int | None


@dataclass
class Expression:
    text: str
    problem: ProductProblem
    declarations: dict[str, AtomicDecl] = field(default_factory=dict)
    no_retract: set[frozenset[str]] = field(default_factory=set)

    def canonical(self) -> str:
        out = " x ".join(X.label for X in self.problem.factors)
        decls = []
        for d in sorted(self.declarations.values(), key=lambda d: d.name):
            module = f"Z_({d.prime})" if d.exponent is None else f"Z/{d.prime ** d.exponent}"
            decls.append(f"{d.name} = atomic({d.dim}, {module})")
        for pair in sorted(tuple(sorted(p)) for p in self.no_retract):
            decls.append(f"no_retract({pair[0]}, {pair[1]})")
        return "; ".join([out] + decls)


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"\d+")


class _Parser:
    def __init__(self, text: str, offset: int = 0, full: str | None = None):
        self.text = text
        self.pos = 0
        self.offset = offset
        self.full = text if full is None else full

    def error(self, message: str, pos: int | None = None) -> ExpressionError:
        return ExpressionError(message, self.full, self.offset + (self.pos if pos is None else pos))

    def ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.ws()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.ws()
        return self.text.startswith(s, self.pos)

    def accept(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str) -> None:
        if not self.accept(s):
            raise self.error(f"expected '{s}'")

    def integer(self) -> int:
        self.ws()
        m = _INT.match(self.text, self.pos)
        if not m:
            raise self.error("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def name(self) -> str:
        self.ws()
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise self.error("expected a name")
        self.pos = m.end()
        return m.group()

    def group_until(self, stop: str) -> FgAbGroup:
        self.ws()
        start = self.pos
        end = self.text.find(stop, start)
        if end < 0:
            raise self.error(f"expected '{stop}' after group")
        literal = self.text[start:end]
        try:
            G = parse_group(re.sub(r"\s+", "", literal))
        except GroupSyntaxError:
            raise self.error(f"bad group literal {literal.strip()!r}", start) from None
        self.pos = end
        return G


def _factor(p: _Parser) -> Space | tuple[str, int]:
    p.ws()
    start = p.pos
    try:
        for prefix, build in (("RP^", RealProj), ("CP^", CplxProj), ("HP^", QuatProj), ("S^", Sphere)):
            if p.accept(prefix):
                return build(p.integer())
        for prefix, build in (("M(", Moore), ("K(", EM)):
            if p.accept(prefix):
                G = p.group_until(",")
                p.expect(",")
                n = p.integer()
                p.expect(")")
                return build(G, n)
        if p.accept("L("):
            d = p.integer()
            p.expect(",")
            q = p.integer()
            p.expect(")")
            if d % 2 == 0 or d < 3:
                raise DomainError(f"lens dimension {d} must be odd and >= 3 (L(2n+1,p))")
            return Lens((d - 1) // 2, q)
        if p.accept("atomic:"):
            return (p.name(), start)
    except DomainError as e:
        raise p.error(str(e), start) from None
    raise p.error("expected a space (S^n, M(G,n), K(G,n), RP^n, CP^n, HP^n, L(d,p), atomic:name)")


def _declaration(p: _Parser, decls: dict[str, AtomicDecl], pairs: set[frozenset[str]]) -> None:
    p.ws()
    start = p.pos
    if p.accept("no_retract("):
        a = p.name()
        p.expect(",")
        b = p.name()
        p.expect(")")
        if a == b:
            raise p.error("no_retract needs two different names", start)
        pairs.add(frozenset((a, b)))
        return
    name = p.name()
    p.expect("=")
    p.expect("atomic(")
    dim = p.integer()
    p.expect(",")
    p.ws()
    mod_start = p.pos
    if p.accept("Z_("):
        prime = p.integer()
        p.expect(")")
        exponent = None
    else:
        G = p.group_until(")")
        fac = factorint(G.invariant_factors[0]) if G.is_cyclic and G.is_finite and not G.is_trivial else {}
        if len(fac) != 1:
            raise p.error("atomic module must be Z/p^r or Z_(p)", mod_start)
        ((prime, exponent),) = fac.items()
    p.expect(")")
    if name in decls:
        raise p.error(f"duplicate declaration of {name!r}", start)
    if dim < 1:
        raise p.error("Hurewicz dimension must be >= 1", start)
    decls[name] = AtomicDecl(name, dim, prime, exponent)


def parse_expression(text: str, declarations: Sequence[str] = ()) -> Expression:
    """Parse ``"S^2 x M(Z/2,3) x atomic:A; A = atomic(3, Z/4)"``."""
    head, _, tail = text.partition(";")
    decls: dict[str, AtomicDecl] = {}
    pairs: set[frozenset[str]] = set()
    blocks = []
    if tail:
        offset = len(head) + 1
        for chunk in tail.split(";"):
            blocks.append((chunk, offset, text))
            offset += len(chunk) + 1
    for extra in declarations:
        for chunk in extra.split(";"):
            blocks.append((chunk, 0, chunk))
    for chunk, offset, full in blocks:
        dp = _Parser(chunk, offset, full)
        if dp.at_end():
            continue
        _declaration(dp, decls, pairs)
        if not dp.at_end():
            raise dp.error("unexpected text after declaration")

    p = _Parser(head, 0, text)
    raw: list[Space | tuple[str, int]] = [_factor(p)]
    while not p.at_end():
        p.expect("x")
        raw.append(_factor(p))
    factors: list[Space] = []
    for item in raw:
        if isinstance(item, tuple):
            name, pos = item
            d = decls.get(name)
            if d is None:
                raise ExpressionError(f"undeclared atomic space {name!r}", text, pos)
            partners = frozenset(
                other for pair in pairs if name in pair for other in pair if other != name
            )
            try:
                factors.append(Atomic(name, d.dim, d.prime, d.exponent, partners))
            except DomainError as e:
                raise ExpressionError(str(e), text, pos) from None
        else:
            factors.append(item)
    return Expression(text, ProductProblem(tuple(factors)), decls, pairs)


# -- rendering ------------------------------------------------------------------


def _render_tree(c: Certificate, indent: int = 0) -> list[str]:
    pad = "  " * indent
    labels = " x ".join(X.label for X in c.factors)
    lines = [f"{pad}{c.rule_id} [n={c.level}] {labels}"]
    for p in c.premises:
        kind = p.fact.get("kind")
        summary = {k: v for k, v in p.fact.items() if k not in ("kind", "pairs", "degrees", "fact")}
        lines.append(f"{pad}  - {kind} {json.dumps(summary, sort_keys=True)}")
        if p.sub is not None:
            lines.extend(_render_tree(p.sub, indent + 2))
    return lines


def render_result(r: EngineResult) -> str:
    lines = [f"{r.status.value} {r.value}", f"product: {r.problem.label if r.problem else ''}"]
    if r.certificate is not None:
        lines.append("certificate:")
        lines.extend(_render_tree(r.certificate, 1))
    else:
        lines.append("no reducibility rule applied; value is the largest factor NE")
    return "\n".join(lines)


# -- commands -------------------------------------------------------------------


def _cmd_ne(args: argparse.Namespace) -> int:
    try:
        expr = parse_expression(args.expression, args.declare or ())
    except ExpressionError as e:
        print(f"parse error: {e.message}\n{e.caret()}", file=sys.stderr)
        return EXIT_USAGE
    result = compute_ne(expr.problem, pivot_search=args.pivot_search)
    if args.json:
        doc = result.to_dict()
        doc["expression"] = expr.canonical()
        print(json.dumps(doc, indent=2))
    else:
        print(render_result(result))
    if args.require_exact and result.status is not Status.EXACT:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        with open(args.file) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        print(f"cannot read certificate: {e}", file=sys.stderr)
        return EXIT_USAGE
    if not isinstance(doc, dict):
        print("certificate must be a JSON object", file=sys.stderr)
        return EXIT_USAGE
    rep = verify_result(doc)
    if args.json:
        print(json.dumps({"ok": rep.ok, "path": rep.path, "message": rep.message}))
    elif rep.ok:
        print("OK: certificate verified")
    else:
        print(f"FAILED at {rep.path or '<root>'}: {rep.message}")
    return EXIT_OK if rep.ok else EXIT_FAILED


def _groups(literals: Sequence[str]) -> list[FgAbGroup]:
    out = []
    for lit in literals:
        G = parse_group(lit.replace(" ", ""))
        if not G.is_finite:
            raise ValueError(f"{lit}: lab groups must be finite")
        out.append(G)
    return out


def _cmd_lab(args: argparse.Namespace) -> int:
    from . import oracle

    try:
        groups = _groups(args.groups)
        if args.lab == "bcm":
            if len(groups) != 2:
                raise ValueError("bcm needs exactly two groups")
            reports = [oracle.check_bcm(groups[0], groups[1], max_order=args.max_order)]
        elif args.lab == "lu":
            if len(groups) < 2:
                raise ValueError("lu needs at least two groups")
            reports = [oracle.check_lu(groups, max_order=args.max_order)]
        elif args.lab == "qr":
            reports = [oracle.check_quasi_regular_and_nc(G, max_order=args.max_order) for G in groups]
        else:
            reports = []
            for G in groups:
                comps = primary_decomposition(G)
                if len(comps) != 1 or G.free_rank:
                    raise ValueError(f"{G}: nj needs a nontrivial finite p-group")
                reports.append(oracle.check_nj_equivalence(comps[0], max_order=args.max_order))
    except (ValueError, GroupSyntaxError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    for rep in reports:
        if args.json:
            print(json.dumps(rep.to_dict()))
        else:
            status = "PASS" if rep.passed else "FAIL"
            print(f"{status} {rep.lab} {rep.subject} {json.dumps(rep.counts, sort_keys=True)}")
            for ce in rep.counterexamples:
                print(f"  example: {json.dumps(ce)}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="selfclose", description="Self-closeness numbers of product spaces.")
    ap.add_argument("--table", help="sphere homotopy table to use instead of the bundled one")
    sub = ap.add_subparsers(dest="command", required=True)

    ne = sub.add_parser("ne", help="compute NE of a product")
    ne.add_argument("expression", help='e.g. "S^2 x S^5 x S^7"')
    ne.add_argument("--json", action="store_true")
    ne.add_argument("--pivot-search", action="store_true", help="also try groups of factors as pivots")
    ne.add_argument("--require-exact", action="store_true", help="exit 2 unless the value is exact")
    ne.add_argument("--declare", action="append", help="atomic declaration, e.g. 'A = atomic(3, Z/4)'")

    ver = sub.add_parser("verify", help="replay a certificate produced by 'ne --json'")
    ver.add_argument("file")
    ver.add_argument("--json", action="store_true")

    lab = sub.add_parser("lab", help="run an exhaustive check on small groups")
    lab.add_argument("lab", choices=["bcm", "lu", "nj", "qr"])
    lab.add_argument("groups", nargs="+", help="group literals, e.g. Z/2+Z/4")
    lab.add_argument("--max-order", type=int, default=64)
    lab.add_argument("--json", action="store_true")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if args.table:
        try:
            set_table(load_table(args.table))
        except (OSError, TableError) as e:
            print(f"table error: {e}", file=sys.stderr)
            return EXIT_USAGE
    try:
        handler = {"ne": _cmd_ne, "verify": _cmd_verify, "lab": _cmd_lab}[args.command]
        return handler(args)
    finally:
        if args.table:
            set_table(None)


if __name__ == "__main__":
    sys.exit(main())
