"""Text format for CI statements, multi-sided relations and binomials.

Grammar (ASCII, whitespace between tokens is free)::

    statement := set "_||_" set "|" set
    set       := "e" | digit+              # "e" is the empty set
    relation  := side ("=" side)+
    side      := "[" statement ("+" statement)* "]"
    binomial  := product "-" product
    product   := "[" statement ("*" statement)* "]"

Each digit of a set is one variable index (1..9).  In relation files a
``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Union

from imsetlab.ci_model import CIStatement, DomainError

RelationSide = tuple[CIStatement, ...]


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.text = text


@dataclass(frozen=True)
class CIRelation:
    """Sides are formal sums of statements; ``target`` is the named structural statement."""

    sides: tuple[RelationSide, ...]
    target: CIStatement | None = None

    def __post_init__(self) -> None:
        if len(self.all_sides()) < 2:
            raise DomainError("a relation needs at least two sides")
        if any(len(side) == 0 for side in self.sides):
            raise DomainError("empty relation side")
        if self.target is not None and self.target.elementary():
            raise DomainError(f"target {self.target} is elementary")

    def all_sides(self) -> tuple[RelationSide, ...]:
        if self.target is None:
            return self.sides
        return self.sides + ((self.target,),)

    @property
    def n(self) -> int:
        return max(s.max_index for side in self.all_sides() for s in side)


@dataclass(frozen=True)
class BinomialExpr:
    """``prod(plus) - prod(minus)`` over the ring of elementary statements."""

    plus: tuple[CIStatement, ...]
    minus: tuple[CIStatement, ...]

    def __post_init__(self) -> None:
        plus, minus = tuple(sorted(self.plus)), tuple(sorted(self.minus))
        if plus == minus:
            raise DomainError("binomial is zero")
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)

    @property
    def degree(self) -> int:
        return max(len(self.plus), len(self.minus))


_TOKEN = re.compile(r"\s*(?:(_\|\|_)|([\[\]+*=|\-])|(e)|([0-9]+))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    end = len(text)
    while pos < end:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            while pos < end and text[pos].isspace():
                pos += 1
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        if m.group(1):
            kind, val = "indep", m.group(1)
        elif m.group(2):
            kind, val = m.group(2), m.group(2)
        elif m.group(3):
            kind, val = "set", ""
        else:
            kind, val = "set", m.group(4)
        tokens.append((kind, val, m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            want = "end of input" if kind == "eof" else repr(kind)
            got = "end of input" if tok[0] == "eof" else repr(tok[1] or "e")
            raise ParseError(f"expected {want}, found {got}", tok[2], self.text)
        self.i += 1
        return tok

    def index_set(self) -> tuple[int, ...]:
        _, digits, off = self.take("set")
        if "0" in digits:
            raise ParseError("variable indices run from 1 to 9", off, self.text)
        if len(set(digits)) != len(digits):
            raise ParseError(f"repeated index in {digits!r}", off, self.text)
        return tuple(int(d) for d in digits)

    def statement(self) -> CIStatement:
        off = self.tokens[self.i][2]
        I = self.index_set()
        self.take("indep")
        J = self.index_set()
        self.take("|")
        K = self.index_set()
        try:
            return CIStatement(I, J, K)
        except DomainError as exc:
            raise ParseError(str(exc), off, self.text) from None

    def bracket(self, sep: str) -> tuple[CIStatement, ...]:
        self.take("[")
        terms = [self.statement()]
        while self.peek() == sep:
            self.take(sep)
            terms.append(self.statement())
        self.take("]")
        return tuple(terms)


def parse_statement(text: str) -> CIStatement:
    p = _Parser(text)
    s = p.statement()
    p.take("eof")
    return s


def parse_relation(text: str) -> CIRelation:
    """Parse ``[..] = [..] (= [..])*``.

    A final side holding a single non-elementary statement becomes the
    relation's target.
    """
    p = _Parser(text)
    sides = [p.bracket("+")]
    while p.peek() == "=":
        p.take("=")
        sides.append(p.bracket("+"))
    p.take("eof")
    if len(sides) < 2:
        raise ParseError("a relation needs at least two sides", len(text), text)
    target = None
    if len(sides) > 2 and len(sides[-1]) == 1 and not sides[-1][0].elementary():
        target = sides.pop()[0]
    try:
        return CIRelation(tuple(sides), target)
    except DomainError as exc:
        raise ParseError(str(exc), 0, text) from None


def parse_binomial(text: str) -> BinomialExpr:
    p = _Parser(text)
    plus = p.bracket("*")
    p.take("-")
    minus = p.bracket("*")
    p.take("eof")
    try:
        return BinomialExpr(plus, minus)
    except DomainError as exc:
        raise ParseError(str(exc), 0, text) from None


class RelationFile(NamedTuple):
    relations: list[tuple[int, CIRelation]]
    errors: list[tuple[int, str]]


def parse_relation_text(text: str) -> RelationFile:
    relations, errors = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        try:
            relations.append((lineno, parse_relation(line)))
        except (ParseError, DomainError) as exc:
            errors.append((lineno, str(exc)))
    return RelationFile(relations, errors)


def parse_relation_file(path: str | Path) -> RelationFile:
    """Parse every non-comment line; malformed lines land in ``errors``."""
    return parse_relation_text(Path(path).read_text(encoding="utf-8"))


def _fmt_set(s: tuple[int, ...]) -> str:
    return "".join(map(str, s)) if s else "e"


def render(x: Union[CIStatement, CIRelation, BinomialExpr, "Imset"]) -> str:  # noqa: F821
    from imsetlab.imset_core import Imset

    if isinstance(x, CIStatement):
        return f"{_fmt_set(x.I)} _||_ {_fmt_set(x.J)} | {_fmt_set(x.K)}"
    if isinstance(x, CIRelation):
        return " = ".join("[" + " + ".join(map(render, side)) + "]" for side in x.all_sides())
    if isinstance(x, BinomialExpr):
        return ("[" + " * ".join(map(render, x.plus)) + "] - ["
                + " * ".join(map(render, x.minus)) + "]")
    if isinstance(x, Imset):
        return json.dumps(imset_to_json(x), sort_keys=True)
    raise TypeError(f"cannot render {type(x).__name__}")


def subset_key(mask: int) -> str:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(str(i))
        mask >>= 1
        i += 1
    return "".join(out)


def imset_to_json(u) -> dict[str, int]:
    return {subset_key(m): c for m, c in enumerate(u.coeffs) if c}


def imset_from_json(obj: dict[str, int], n: int):
    from imsetlab.imset_core import Imset

    coeffs = [0] * (1 << n)
    for key, c in obj.items():
        if key and (not key.isdigit() or "0" in key or len(set(key)) != len(key)):
            raise DomainError(f"bad subset key {key!r}")
        m = 0
        for d in key:
            if int(d) > n:
                raise DomainError(f"subset key {key!r} exceeds n={n}")
            m |= 1 << (int(d) - 1)
        coeffs[m] = int(c)
    return Imset(n, tuple(coeffs))


def statement_to_json(s: CIStatement) -> dict[str, list[int]]:
    return {"I": list(s.I), "J": list(s.J), "K": list(s.K)}


def statement_from_json(obj: dict) -> CIStatement:
    return CIStatement(tuple(obj["I"]), tuple(obj["J"]), tuple(obj.get("K", ())))
