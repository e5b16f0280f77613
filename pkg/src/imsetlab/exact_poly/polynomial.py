"""Sparse polynomials over Q with exact ``gmpy2.mpq`` coefficients."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

from gmpy2 import mpq

from imsetlab.exact_poly.ring import Ring, RingError


def _coef(c) -> mpq:
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


class Polynomial:
    """Terms are ``(monomial, coefficient)`` pairs, strictly decreasing in the ring order."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        self.ring = ring
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, mpq] = {}
        for m, c in items:
            acc[m] = acc.get(m, mpq(0)) + _coef(c)
        key = ring.key
        self.terms = tuple(sorted(((m, c) for m, c in acc.items() if c), key=lambda t: key(t[0]), reverse=True))

    @classmethod
    def _from_sorted(cls, ring: Ring, terms: tuple) -> Polynomial:
        p = object.__new__(cls)
        p.ring = ring
        p.terms = terms
        return p

    @classmethod
    def from_exponents(cls, ring: Ring, items: Iterable[tuple[Iterable[int], object]]) -> Polynomial:
        return cls(ring, [(ring.pack(tuple(e)), c) for e, c in items])

    @classmethod
    def variable(cls, ring: Ring, v: int | str) -> Polynomial:
        return cls(ring, [(ring.var(v), 1)])

    @classmethod
    def constant(cls, ring: Ring, c) -> Polynomial:
        return cls(ring, [(ring.one, c)])

    # -- basic queries -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def lm(self) -> int:
        return self.terms[0][0]

    @property
    def lc(self) -> mpq:
        return self.terms[0][1]

    def total_degree(self) -> int:
        return max((self.ring.degree(m) for m, _ in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        degs = {self.ring.degree(m) for m, _ in self.terms}
        return len(degs) <= 1

    def exponents(self) -> list[tuple[tuple[int, ...], mpq]]:
        return [(self.ring.unpack(m), c) for m, c in self.terms]

    def variables_used(self) -> set[int]:
        used: set[int] = set()
        for m, _ in self.terms:
            used.update(v for v, e in enumerate(self.ring.unpack(m)) if e)
        return used

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: Polynomial) -> None:
        if other.ring != self.ring:
            raise RingError("polynomials live in different rings")

    def __add__(self, other: Polynomial) -> Polynomial:
        self._check(other)
        return Polynomial(self.ring, list(self.terms) + list(other.terms))

    def __neg__(self) -> Polynomial:
        return Polynomial._from_sorted(self.ring, tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            c = _coef(other)
            if not c:
                return Polynomial(self.ring)
            return Polynomial._from_sorted(self.ring, tuple((m, c * a) for m, a in self.terms))
        self._check(other)
        mul = self.ring.mul
        acc: dict[int, mpq] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = mul(m1, m2)
                acc[m] = acc.get(m, 0) + c1 * c2
        return Polynomial(self.ring, acc)

    __rmul__ = __mul__

    def mul_term(self, mono: int, coef) -> Polynomial:
        mul = self.ring.mul
        c = _coef(coef)
        return Polynomial._from_sorted(self.ring, tuple((mul(m, mono), c * a) for m, a in self.terms))

    def __pow__(self, k: int) -> Polynomial:
        out = Polynomial.constant(self.ring, 1)
        for _ in range(k):
            out = out * self
        return out

    def monic(self) -> Polynomial:
        if not self.terms:
            return self
        inv = 1 / self.lc
        return Polynomial._from_sorted(self.ring, tuple((m, c * inv) for m, c in self.terms))

    def to_ring(self, ring: Ring) -> Polynomial:
        """Re-express in a ring containing all variables this polynomial uses."""
        if ring == self.ring:
            return self
        pos = []
        for v, nm in enumerate(self.ring.names):
            pos.append(ring.index.get(nm))
        out = []
        for m, c in self.terms:
            exps = [0] * ring.nvars
            for v, e in enumerate(self.ring.unpack(m)):
                if e:
                    if pos[v] is None:
                        raise RingError(f"variable {self.ring.names[v]} missing from target ring")
                    exps[pos[v]] = e
            out.append((ring.pack(exps), c))
        return Polynomial(ring, out)

    def substitute_variables(self, perm: Mapping[int, int]) -> Polynomial:
        """Rename variable ``v`` to ``perm[v]`` (a bijection on variable indices)."""
        out = []
        for m, c in self.terms:
            old = self.ring.unpack(m)
            exps = [0] * self.ring.nvars
            for v, e in enumerate(old):
                if e:
                    exps[perm.get(v, v)] += e
            out.append((self.ring.pack(exps), c))
        return Polynomial(self.ring, out)

    def evaluate(self, values: Mapping[int, object]):
        total = mpq(0)
        for m, c in self.terms:
            t = c
            for v, e in enumerate(self.ring.unpack(m)):
                if e:
                    t *= _coef(values[v]) ** e
            total += t
        return total

    # -- comparison / display ---------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Polynomial) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for k, (m, c) in enumerate(self.terms):
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            mono = self.ring.mono_str(m)
            if mono == "1":
                body = _fmt_q(a)
            elif a == 1:
                body = mono
            else:
                body = f"{_fmt_q(a)}*{mono}"
            if k == 0:
                out.append(("-" if sign == "-" else "") + body)
            else:
                out.append(f" {sign} {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _fmt_q(c: mpq) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


_TERM = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_polynomial(text: str, ring: Ring) -> Polynomial:
    """Parse sparse text such as ``"p111*p221 - 2/3*p121^2 + 1"``."""
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial text")
    terms = []
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at offset {pos}: {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coef = mpq(sign)
        exps = [0] * ring.nvars
        for factor in m.group(2).split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            base, _, power = factor.partition("^")
            base = base.strip()
            if re.fullmatch(r"\d+(/\d+)?", base):
                coef *= mpq(base)
                continue
            if base not in ring.index:
                raise ValueError(f"unknown variable {base!r}")
            exps[ring.index[base]] += int(power) if power else 1
        terms.append((ring.pack(exps), coef))
        pos = m.end()
    return Polynomial(ring, terms)
