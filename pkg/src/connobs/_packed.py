"""Packed-integer monomials and order keys for the engine hot loops.

A monomial becomes one integer with a 16-bit field per variable
(low variable in the low bits); each field keeps its top bit free so a
borrow-free subtraction test decides divisibility.  A term's position
in the module order is a single integer key that compares like the
order and shifts additively under multiplication by a monomial, so
scaling a vector is two integer additions per term.
"""

from __future__ import annotations

from typing import Optional, Tuple

from .algebra import MonomialOrder

FIELD_BITS = 16
FIELD_MASK = (1 << FIELD_BITS) - 1
FIELD_LIMIT = 1 << (FIELD_BITS - 1)  # top bit stays free for the borrow test
COMP_BITS = 28
COMP_LIMIT = 1 << COMP_BITS
COMP_MASK = COMP_LIMIT - 1
DEG_BITS = 28


class PackOverflow(ArithmeticError):
    pass


class Packer:
    """Exponent-vector packing for a fixed variable count."""

    __slots__ = ("nvars", "guards", "shifts")

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.shifts = tuple(FIELD_BITS * i for i in range(nvars))
        self.guards = 0
        for sh in self.shifts:
            self.guards |= 1 << (sh + FIELD_BITS - 1)

    def pack(self, expos) -> int:
        out = 0
        for sh, e in zip(self.shifts, expos):
            if e >= FIELD_LIMIT:
                raise PackOverflow(f"exponent {e} exceeds packed field")
            out |= e << sh
        return out

    def unpack(self, mono: int) -> Tuple[int, ...]:
        return tuple((mono >> sh) & FIELD_MASK for sh in self.shifts)

    def div(self, a: int, b: int) -> Optional[int]:
        """a / b or None; borrow-free subtraction over all fields."""
        t = (a | self.guards) - b
        if t & self.guards == self.guards:
            return a - b
        return None

    def divides(self, b: int, a: int) -> bool:
        return ((a | self.guards) - b) & self.guards == self.guards

    def lcm(self, a: int, b: int) -> int:
        out = 0
        for sh in self.shifts:
            fa = (a >> sh) & FIELD_MASK
            fb = (b >> sh) & FIELD_MASK
            out |= (fa if fa > fb else fb) << sh
        return out

    def deg(self, mono: int) -> int:
        total = 0
        for sh in self.shifts:
            total += (mono >> sh) & FIELD_MASK
        return total


class VecOrder:
    """Module order on packed terms: key(comp, mono) is one integer.

    Layout, high to low: elimination block bit, (weighted) degree or
    lex fields, reversed complemented exponent fields, complemented
    component.  ``delta(u)`` is the additive key shift of multiplication
    by the monomial u; the component bits are untouched by it.
    """

    __slots__ = ("packer", "order", "split", "nvars", "_weights", "_is_lex")

    def __init__(self, packer: Packer, order: MonomialOrder,
                 split: Optional[int] = None):
        self.packer = packer
        self.order = order
        self.split = split
        self.nvars = packer.nvars
        self._is_lex = order.kind == MonomialOrder.LEX
        if order.kind == MonomialOrder.WDEGREVLEX:
            self._weights = order.weights
        else:
            self._weights = (1,) * self.nvars

    def _mono_key(self, mono: int) -> int:
        shifts = self.packer.shifts
        if self._is_lex:
            out = 0
            for sh in shifts:  # low variable = most significant
                out = (out << FIELD_BITS) | ((mono >> sh) & FIELD_MASK)
            return out
        deg = 0
        for w, sh in zip(self._weights, shifts):
            deg += w * ((mono >> sh) & FIELD_MASK)
        out = deg
        for sh in reversed(shifts):  # high variable first, complemented
            out = (out << FIELD_BITS) | (FIELD_MASK - ((mono >> sh) & FIELD_MASK))
        return out

    def key(self, comp: int, mono: int) -> int:
        body = self._mono_key(mono) << COMP_BITS | (COMP_MASK - comp)
        if self.split is not None and comp < self.split:
            body |= 1 << (COMP_BITS + self.nvars * FIELD_BITS + DEG_BITS + 2)
        return body

    def delta(self, mono: int) -> int:
        """key(c, m * mono) - key(c, m), independent of c and m."""
        shifts = self.packer.shifts
        if self._is_lex:
            out = 0
            for sh in shifts:
                out = (out << FIELD_BITS) | ((mono >> sh) & FIELD_MASK)
            return out << COMP_BITS
        deg = 0
        for w, sh in zip(self._weights, shifts):
            deg += w * ((mono >> sh) & FIELD_MASK)
        # complement fields shrink by the added exponent:
        # (M - (a+u)) = (M - a) - u
        out = deg
        for sh in reversed(shifts):
            out = (out << FIELD_BITS) - ((mono >> sh) & FIELD_MASK)
        return out << COMP_BITS

    def mono_sort_key(self, mono: int) -> int:
        return self._mono_key(mono)
