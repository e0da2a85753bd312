"""Sparse multivariate polynomials over the rationals.

Coefficients are exact rationals (gmpy2.mpq), monomials are exponent
tuples, and every polynomial keeps its term list sorted strictly
descending in the monomial order of its ring.  Only global orderings
are supported: lex, degrevlex and weighted degrevlex.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence, Union

from gmpy2 import mpq

Mono = tuple
Rational = mpq
QQ = mpq

# Exponents are kept in machine range; anything desk-scale stays far below.
EXPONENT_LIMIT = 1 << 16


class ExponentOverflow(ArithmeticError):
    """An exponent left the supported machine range."""


def mono_one(nvars: int) -> Mono:
    return (0,) * nvars


def mono_mul(a: Mono, b: Mono) -> Mono:
    c = tuple(x + y for x, y in zip(a, b))
    for e in c:
        if e >= EXPONENT_LIMIT:
            raise ExponentOverflow(f"exponent {e} exceeds limit {EXPONENT_LIMIT}")
    return c


def mono_div(a: Mono, b: Mono) -> Optional[Mono]:
    """a / b, or None when b does not divide a."""
    c = []
    for x, y in zip(a, b):
        if x < y:
            return None
        c.append(x - y)
    return tuple(c)


def mono_lcm(a: Mono, b: Mono) -> Mono:
    return tuple(x if x > y else y for x, y in zip(a, b))


def mono_deg(a: Mono) -> int:
    return sum(a)


def mono_is_one(a: Mono) -> bool:
    return not any(a)


class MonomialOrder:
    """A global monomial order: total, multiplicative, with 1 minimal.

    ``key`` maps a monomial to a tuple that compares the same way the
    monomials do, so sorting by key ascending puts 1 first.
    """

    LEX = "lex"
    DEGREVLEX = "degrevlex"
    WDEGREVLEX = "weighted-degrevlex"

    __slots__ = ("kind", "weights")

    def __init__(self, kind: str, weights: Optional[Sequence[int]] = None):
        if kind not in (self.LEX, self.DEGREVLEX, self.WDEGREVLEX):
            raise ValueError(f"unknown monomial order kind {kind!r}")
        if kind == self.WDEGREVLEX:
            if not weights or any(w <= 0 for w in weights):
                raise ValueError("weighted order needs positive integer weights")
            self.weights = tuple(int(w) for w in weights)
        else:
            if weights is not None:
                raise ValueError(f"order {kind!r} takes no weights")
            self.weights = None
        self.kind = kind

    @classmethod
    def lex(cls) -> "MonomialOrder":
        return cls(cls.LEX)

    @classmethod
    def degrevlex(cls) -> "MonomialOrder":
        return cls(cls.DEGREVLEX)

    @classmethod
    def weighted_degrevlex(cls, weights: Sequence[int]) -> "MonomialOrder":
        return cls(cls.WDEGREVLEX, weights)

    # short order names used by the input format
    @classmethod
    def from_name(cls, name: str, weights: Optional[Sequence[int]] = None) -> "MonomialOrder":
        if name == "lp":
            return cls.lex()
        if name == "dp":
            return cls.degrevlex()
        if name == "wp":
            return cls.weighted_degrevlex(weights or ())
        raise ValueError(f"unsupported order name {name!r}")

    def name(self) -> str:
        return {self.LEX: "lp", self.DEGREVLEX: "dp", self.WDEGREVLEX: "wp"}[self.kind]

    def key(self, mono: Mono):
        if self.kind == self.LEX:
            return mono
        if self.kind == self.DEGREVLEX:
            return (sum(mono),) + tuple(-e for e in reversed(mono))
        return (sum(w * e for w, e in zip(self.weights, mono)),) + tuple(
            -e for e in reversed(mono)
        )

    def greater(self, a: Mono, b: Mono) -> bool:
        return self.key(a) > self.key(b)

    def __eq__(self, other):
        return (
            isinstance(other, MonomialOrder)
            and self.kind == other.kind
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.kind, self.weights))

    def __repr__(self):
        if self.weights is not None:
            return f"MonomialOrder({self.kind!r}, weights={self.weights})"
        return f"MonomialOrder({self.kind!r})"


class PolyRing:
    """The ambient polynomial ring: variable names plus a monomial order."""

    __slots__ = ("varnames", "order", "nvars", "_var_index")

    def __init__(self, varnames: Sequence[str], order: Optional[MonomialOrder] = None):
        names = tuple(varnames)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        if not names:
            raise ValueError("need at least one variable")
        self.varnames = names
        self.order = order or MonomialOrder.degrevlex()
        if self.order.weights is not None and len(self.order.weights) != len(names):
            raise ValueError("weight vector length must match variable count")
        self.nvars = len(names)
        self._var_index = {n: i for i, n in enumerate(names)}

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.varnames == other.varnames
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.varnames, self.order))

    def __repr__(self):
        return f"PolyRing({','.join(self.varnames)}; {self.order.name()})"

    def var_index(self, name: str) -> int:
        try:
            return self._var_index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def zero(self) -> "Polynomial":
        return Polynomial(self, ())

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = mpq(c)
        if c == 0:
            return self.zero()
        return Polynomial(self, ((mono_one(self.nvars), c),))

    def var(self, i: Union[int, str]) -> "Polynomial":
        if isinstance(i, str):
            i = self.var_index(i)
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        expo = [0] * self.nvars
        expo[i] = 1
        return Polynomial(self, ((tuple(expo), mpq(1)),))

    def monomial(self, expos: Sequence[int], coeff=1) -> "Polynomial":
        if len(expos) != self.nvars:
            raise ValueError("exponent vector length mismatch")
        c = mpq(coeff)
        if c == 0:
            return self.zero()
        return Polynomial(self, ((tuple(int(e) for e in expos), c),))

    def from_dict(self, d: dict) -> "Polynomial":
        return Polynomial(self, _sorted_terms(d, self.order))

    def from_string(self, text: str) -> "Polynomial":
        from .polyparse import parse_polynomial

        return parse_polynomial(text, self)


def _sorted_terms(d: dict, order: MonomialOrder):
    items = [(m, c) for m, c in d.items() if c != 0]
    items.sort(key=lambda t: order.key(t[0]), reverse=True)
    return tuple(items)


class Polynomial:
    """Immutable sparse polynomial in canonical (order-sorted) form."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms):
        self.ring = ring
        self.terms = tuple(terms)

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def leading_monomial(self) -> Mono:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0][0]

    def leading_coefficient(self) -> Rational:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0][1]

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(mono_deg(m) for m, _ in self.terms)

    def constant_term(self) -> Rational:
        for m, c in self.terms:
            if mono_is_one(m):
                return c
        return mpq(0)

    def is_constant(self) -> bool:
        return all(mono_is_one(m) for m, _ in self.terms)

    def is_unit(self) -> bool:
        return len(self.terms) == 1 and mono_is_one(self.terms[0][0])

    def as_dict(self) -> dict:
        return dict(self.terms)

    # -- arithmetic --------------------------------------------------------

    def _check_ring(self, other: "Polynomial"):
        if self.ring.nvars != other.ring.nvars or self.ring.varnames != other.ring.varnames:
            raise ValueError(
                f"ring mismatch: {self.ring.varnames} vs {other.ring.varnames}"
            )

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.constant(other)
        self._check_ring(other)
        return Polynomial(self.ring, _merge_terms(self.terms, other.terms, self.ring.order, 1))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.constant(other)
        self._check_ring(other)
        return Polynomial(self.ring, _merge_terms(self.terms, other.terms, self.ring.order, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Polynomial(self.ring, tuple((m, -c) for m, c in self.terms))

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = mpq(other)
            if c == 0:
                return self.ring.zero()
            return Polynomial(self.ring, tuple((m, k * c) for m, k in self.terms))
        self._check_ring(other)
        if not self.terms or not other.terms:
            return self.ring.zero()
        acc: dict = {}
        short, long_ = (self.terms, other.terms)
        if len(short) > len(long_):
            short, long_ = long_, short
        for m1, c1 in short:
            for m2, c2 in long_:
                m = mono_mul(m1, m2)
                v = acc.get(m)
                if v is None:
                    acc[m] = c1 * c2
                else:
                    v = v + c1 * c2
                    if v:
                        acc[m] = v
                    else:
                        del acc[m]
        return Polynomial(self.ring, _sorted_terms(acc, self.ring.order))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def mul_term(self, mono: Mono, coeff) -> "Polynomial":
        """Multiply by a single term; preserves sortedness."""
        c = mpq(coeff)
        if c == 0 or not self.terms:
            return self.ring.zero()
        return Polynomial(self.ring, tuple((mono_mul(m, mono), k * c) for m, k in self.terms))

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, type(mpq(0)))):
                return self == self.ring.constant(other)
            return NotImplemented
        return self.ring.varnames == other.ring.varnames and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.varnames, self.terms))

    def __bool__(self):
        return bool(self.terms)

    # -- calculus ----------------------------------------------------------

    def partial_derivative(self, i: int) -> "Polynomial":
        if not 0 <= i < self.ring.nvars:
            raise IndexError(f"variable index {i} out of range")
        acc = {}
        for m, c in self.terms:
            e = m[i]
            if e:
                dm = m[:i] + (e - 1,) + m[i + 1 :]
                acc[dm] = acc.get(dm, mpq(0)) + c * e
        return self.ring.from_dict(acc)

    # -- conversion --------------------------------------------------------

    def lift_to(self, ring: PolyRing, index_map: Optional[Sequence[int]] = None) -> "Polynomial":
        """Reinterpret in a ring with more variables.

        ``index_map[i]`` is the index in ``ring`` of this ring's i-th
        variable; by default variables are matched by name.
        """
        if index_map is None:
            index_map = [ring.var_index(n) for n in self.ring.varnames]
        acc = {}
        for m, c in self.terms:
            expo = [0] * ring.nvars
            for i, e in enumerate(m):
                expo[index_map[i]] = e
            acc[tuple(expo)] = c
        return ring.from_dict(acc)

    # -- text --------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            factors = []
            for name, e in zip(self.ring.varnames, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if not factors:
                body = str(abs(c))
            else:
                mono_text = "*".join(factors)
                a = abs(c)
                body = mono_text if a == 1 else f"{a}*{mono_text}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = first_body if first_sign == "+" else "-" + first_body
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self):
        return f"Poly({self})"


def _merge_terms(t1, t2, order: MonomialOrder, sign: int):
    """Merge two descending term lists; ``sign`` applies to ``t2``."""
    key = order.key
    out = []
    i = j = 0
    n1, n2 = len(t1), len(t2)
    while i < n1 and j < n2:
        m1, c1 = t1[i]
        m2, c2 = t2[j]
        if m1 == m2:
            c = c1 + c2 if sign > 0 else c1 - c2
            if c:
                out.append((m1, c))
            i += 1
            j += 1
        elif key(m1) > key(m2):
            out.append((m1, c1))
            i += 1
        else:
            out.append((m2, c2 if sign > 0 else -c2))
            j += 1
    out.extend(t1[i:])
    if sign > 0:
        out.extend(t2[j:])
    else:
        out.extend((m, -c) for m, c in t2[j:])
    return tuple(out)


# -- free-standing operation aliases ----------------------------------------


def poly_add(f: Polynomial, g: Polynomial) -> Polynomial:
    return f + g


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    return f * g


def partial_derivative(f: Polynomial, i: int) -> Polynomial:
    return f.partial_derivative(i)


def apply_derivation(coeffs: Iterable[Polynomial], f: Polynomial) -> Polynomial:
    """Apply the vector field with the given coefficient vector to f.

    Returns sum(coeffs[i] * df/dx_i); no reduction modulo any ideal is
    performed here.
    """
    coeffs = list(coeffs)
    if len(coeffs) != f.ring.nvars:
        raise ValueError("coefficient vector length must match variable count")
    out = f.ring.zero()
    for i, a in enumerate(coeffs):
        if a.is_zero:
            continue
        df = f.partial_derivative(i)
        if not df.is_zero:
            out = out + a * df
    return out
