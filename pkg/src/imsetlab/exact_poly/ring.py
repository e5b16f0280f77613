"""Polynomial rings with packed-integer monomials.

A monomial is a single Python int holding one exponent per F-bit field.
Fields are laid out so that the monomial order is plain integer order of
``mono ^ flip``:

* ``lex``: variable 0 in the most significant field, no degree fields.
* ``grevlex``: a total-degree field on top, then the last variable down to
  the first; ``flip`` inverts the variable fields so a smaller exponent in
  the last variable compares larger.
* ``elim``: blocks of grevlex, each with its own degree field, the first
  block most significant (its variables are the ones eliminated).

Each field keeps its top bit clear as a guard so divisibility is one
subtraction.  Exponents and block degrees must stay below ``2**(F-1)``.
"""

from __future__ import annotations

from typing import Sequence

FIELD = 12
_FMASK = (1 << FIELD) - 1
_GUARD_BIT = 1 << (FIELD - 1)

ORDERS = ("lex", "grevlex", "elim")


class RingError(ValueError):
    pass


class Ring:
    """Polynomial ring over Q with named variables and a monomial order."""

    def __init__(self, names: Sequence[str], order: str = "grevlex",
                 blocks: Sequence[int] | None = None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise RingError("variable names must be unique")
        if order not in ORDERS:
            raise RingError(f"unknown monomial order {order!r}")
        if order == "elim":
            if not blocks or sum(blocks) != len(names) or any(b <= 0 for b in blocks):
                raise RingError("elim order needs positive block sizes summing to the variable count")
            blocks = tuple(blocks)
        elif order == "grevlex":
            blocks = (len(names),)
        else:
            blocks = None
        self.names = names
        self.order = order
        self.blocks = blocks
        self.nvars = len(names)
        self.index = {nm: k for k, nm in enumerate(names)}
        self._layout()

    def _layout(self) -> None:
        # field slot (counted from the least significant end) of each variable
        nv = self.nvars
        shifts = [0] * nv
        deg_slots: list[tuple[int, tuple[int, ...]]] = []
        if self.order == "lex":
            for v in range(nv):
                shifts[v] = (nv - 1 - v) * FIELD
            total = nv
        else:
            slot = 0
            start = nv
            layout = []
            for size in reversed(self.blocks):
                start -= size
                vars_ = tuple(range(start, start + size))
                for v in vars_:
                    shifts[v] = (slot + (v - start)) * FIELD
                slot += size
                layout.append((slot * FIELD, vars_))
                slot += 1
            deg_slots = layout
            total = slot
        self.shifts = tuple(shifts)
        self.deg_fields = tuple(deg_slots)
        self.nfields = total
        self.guard = sum(_GUARD_BIT << (k * FIELD) for k in range(total))
        self.flip = 0 if self.order == "lex" else sum(_FMASK << s for s in self.shifts)
        self.one = 0

    # -- packing ---------------------------------------------------------
    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise RingError(f"expected {self.nvars} exponents, got {len(exps)}")
        m = 0
        for e, s in zip(exps, self.shifts):
            if e < 0 or e >= _GUARD_BIT:
                raise RingError(f"exponent {e} out of range")
            m |= e << s
        for s, vars_ in self.deg_fields:
            d = sum(exps[v] for v in vars_)
            if d >= _GUARD_BIT:
                raise RingError(f"degree {d} out of range")
            m |= d << s
        return m

    def unpack(self, m: int) -> tuple[int, ...]:
        return tuple((m >> s) & _FMASK for s in self.shifts)

    def var(self, v: int | str, power: int = 1) -> int:
        if isinstance(v, str):
            v = self.index[v]
        exps = [0] * self.nvars
        exps[v] = power
        return self.pack(exps)

    # -- monomial arithmetic ---------------------------------------------
    def key(self, m: int) -> int:
        return m ^ self.flip

    def mul(self, a: int, b: int) -> int:
        c = a + b
        if c & self.guard:
            raise OverflowError("monomial exponent overflow")
        return c

    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return ((b | g) - a) & g == g

    def lcm(self, a: int, b: int) -> int:
        return self.pack([max(x, y) for x, y in zip(self.unpack(a), self.unpack(b))])

    def coprime(self, a: int, b: int) -> bool:
        return all(x == 0 or y == 0 for x, y in zip(self.unpack(a), self.unpack(b)))

    def degree(self, m: int) -> int:
        return sum(self.unpack(m))

    def mono_str(self, m: int) -> str:
        parts = []
        for nm, e in zip(self.names, self.unpack(m)):
            if e == 1:
                parts.append(nm)
            elif e > 1:
                parts.append(f"{nm}^{e}")
        return "*".join(parts) or "1"

    # -- derived rings -----------------------------------------------------
    def with_order(self, order: str, blocks: Sequence[int] | None = None) -> Ring:
        return Ring(self.names, order, blocks)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Ring) and self.names == other.names
                and self.order == other.order and self.blocks == other.blocks)

    def __hash__(self) -> int:
        return hash((self.names, self.order, self.blocks))

    def __repr__(self) -> str:
        extra = f", blocks={self.blocks}" if self.order == "elim" else ""
        return f"Ring({len(self.names)} vars, {self.order}{extra})"
