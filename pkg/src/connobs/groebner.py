"""Groebner bases for submodules of free modules over quotient rings.

Computations over A = S/I are run over S after adjoining F*e_t for
every ideal generator F and every free-module component t; reported
bases and witnesses have that layer projected away again.  One engine
covers normal forms, division witnesses, syzygies, kernels and
preimages: witnesses and syzygies come from an extended basis in which
each tracked generator carries a marker component, computed under a
block order that eliminates the ambient components.

Internally every monomial is one packed integer and every term carries
a precomputed integer order key (see ``_packed``), so the reduction
loops run on machine-word comparisons and additions.  Vectors are
lists of (key, component, monomial, coeff) kept strictly descending.
"""

from __future__ import annotations

import heapq
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from gmpy2 import gcd, lcm, mpq, mpz

from ._packed import Packer, VecOrder
from .algebra import ExponentOverflow, MonomialOrder, Polynomial, PolyRing


class NotInSubmodule(Exception):
    """Division left a nonzero remainder; carries the certificate."""

    def __init__(self, certificate):
        self.certificate = certificate
        super().__init__("element is not in the submodule")


# ---------------------------------------------------------------------------
# internal vector arithmetic


def _vec_from_pairs(pairs, vo: VecOrder):
    """Build a vector from (component, exponent-tuple, coeff) triples."""
    pack = vo.packer.pack
    key = vo.key
    acc = {}
    for comp, mono, coeff in pairs:
        m = pack(mono)
        k = key(comp, m)
        entry = acc.get(k)
        if entry is None:
            acc[k] = [comp, m, coeff]
        else:
            entry[2] += coeff
    terms = [(k, c, m, q) for k, (c, m, q) in acc.items() if q != 0]
    terms.sort(reverse=True)
    return terms


def _vscale(v, mono: int, coeff, vo: VecOrder):
    """Multiply by one (packed) term; the term order is preserved."""
    if not mono:
        return [(k, c, m, q * coeff) for (k, c, m, q) in v]
    dk = vo.delta(mono)
    guards = vo.packer.guards
    out = []
    for (k, c, m, q) in v:
        mm = m + mono
        if mm & guards:
            raise ExponentOverflow("packed exponent overflow in scaling")
        out.append((k + dk, c, mm, q * coeff))
    return out


def _vsub(u, v):
    out = []
    i = j = 0
    nu, nv = len(u), len(v)
    while i < nu and j < nv:
        ku = u[i][0]
        kv = v[j][0]
        if ku == kv:
            c = u[i][3] - v[j][3]
            if c:
                out.append((ku, u[i][1], u[i][2], c))
            i += 1
            j += 1
        elif ku > kv:
            out.append(u[i])
            i += 1
        else:
            t = v[j]
            out.append((t[0], t[1], t[2], -t[3]))
            j += 1
    out.extend(u[i:])
    for t in v[j:]:
        out.append((t[0], t[1], t[2], -t[3]))
    return out


def _vnormalize(v):
    """Scale to primitive integer coefficients, positive leading one."""
    if not v:
        return v
    den_l = mpz(1)
    for t in v:
        den_l = lcm(den_l, t[3].denominator)
    num_g = mpz(0)
    for t in v:
        num_g = gcd(num_g, t[3].numerator * (den_l // t[3].denominator))
    scale = mpq(den_l, num_g)
    if v[0][3] < 0:
        scale = -scale
    if scale == 1:
        return v
    return [(k, c, m, q * scale) for (k, c, m, q) in v]


class _Reducers:
    """Leading-term lookup table: component -> [[lm, lc, tail], ...]."""

    __slots__ = ("by_comp", "packer")

    def __init__(self, packer: Packer):
        self.by_comp = {}
        self.packer = packer

    def add(self, vec):
        _, comp, mono, coeff = vec[0]
        entry = [mono, coeff, vec[1:]]
        self.by_comp.setdefault(comp, []).append(entry)
        return entry

    def remove(self, comp: int, entry) -> None:
        lst = self.by_comp[comp]
        for i, e in enumerate(lst):
            if e is entry:
                del lst[i]
                return
        raise KeyError("reducer entry not present")

    def find(self, comp: int, mono: int):
        rl = self.by_comp.get(comp)
        if rl:
            guards = self.packer.guards
            base = mono | guards
            for entry in rl:
                if (base - entry[0]) & guards == guards:
                    return mono - entry[0], entry[1], entry[2]
        return None


def _reduce_full(v, reducers: _Reducers, vo: VecOrder):
    """Normal form: no remaining term is divisible by a leading term."""
    work = list(v)
    i = 0
    find = reducers.find
    while i < len(work):
        _, comp, mono, coeff = work[i]
        hit = find(comp, mono)
        if hit is None:
            i += 1
            continue
        q, lc, tail = hit
        rest = work[i + 1 :]
        if tail:
            rest = _vsub(rest, _vscale(tail, q, coeff / lc, vo))
        work[i:] = rest
    return work


# ---------------------------------------------------------------------------
# Buchberger

_gb_recorder: Optional[list] = None


@contextmanager
def record_groebner_bases():
    """Collect every basis computed inside the block, for audits."""
    global _gb_recorder
    outer = _gb_recorder
    store = [] if outer is None else outer
    _gb_recorder = store
    try:
        yield store
    finally:
        _gb_recorder = outer


@dataclass
class _Elem:
    vec: list
    comp: int
    lm: int
    lc: object
    single: bool  # supported in one component (enables product criterion)
    layer: bool  # adjoined ideal-layer element


def _is_single_component(vec) -> bool:
    c0 = vec[0][1]
    return all(t[1] == c0 for t in vec)


def _spair(a: _Elem, b: _Elem, vo: VecOrder):
    packer = vo.packer
    big = packer.lcm(a.lm, b.lm)
    ua = big - a.lm
    ub = big - b.lm
    return _vsub(_vscale(a.vec, ua, mpq(1) / a.lc, vo),
                 _vscale(b.vec, ub, mpq(1) / b.lc, vo))


def groebner_basis(gens: Iterable[list], vo: VecOrder,
                   layer_flags: Optional[Sequence[bool]] = None) -> list:
    """Reduced Groebner basis of the given vectors over S.

    Normal selection strategy (minimal lcm degree first), Gebauer-Moeller
    pruning, with the product criterion restricted to single-component
    elements where it is actually valid for modules.  The result is
    minimal, fully inter-reduced, coefficient-normalized and sorted by
    leading term descending.
    """
    packer = vo.packer
    G: List[_Elem] = []
    reducers = _Reducers(packer)
    pairs = set()
    heap = []
    idx_by_comp = {}
    pairs_by_comp = {}
    mono_lcm = packer.lcm
    mono_deg = packer.deg
    divides = packer.divides

    def push_pair(i, j):
        big = mono_lcm(G[i].lm, G[j].lm)
        heapq.heappush(heap, (mono_deg(big), vo.key(G[i].comp, big), i, j))
        pairs.add((i, j))
        pairs_by_comp.setdefault(G[i].comp, set()).add((i, j))

    def drop_pair(i, j):
        pairs.discard((i, j))
        pairs_by_comp.get(G[i].comp, set()).discard((i, j))

    def update(t):
        cf, mf = G[t].comp, G[t].lm
        # chain criterion on existing pairs
        for (i, j) in list(pairs_by_comp.get(cf, ())):
            lij = mono_lcm(G[i].lm, G[j].lm)
            if (
                divides(mf, lij)
                and mono_lcm(G[i].lm, mf) != lij
                and mono_lcm(G[j].lm, mf) != lij
            ):
                drop_pair(i, j)
        cand = [
            i
            for i in idx_by_comp.get(cf, ())
            if i != t and not (G[i].layer and G[t].layer)
        ]
        classes = {}
        for i in cand:
            classes.setdefault(mono_lcm(G[i].lm, mf), []).append(i)
        kept = []
        for big in sorted(classes, key=vo.mono_sort_key):
            if any(divides(small, big) for small in kept):
                continue
            kept.append(big)
            cls = classes[big]
            if G[t].single and any(
                G[i].single and big == G[i].lm + mf for i in cls
            ):
                continue  # coprime leading monomials, ideal-style pair
            push_pair(min(cls), t)

    def insert(vec, layer=False):
        vec = _vnormalize(vec)
        elem = _Elem(vec, vec[0][1], vec[0][2], vec[0][3],
                     _is_single_component(vec), layer)
        G.append(elem)
        t = len(G) - 1
        idx_by_comp.setdefault(elem.comp, []).append(t)
        reducers.add(vec)
        update(t)

    gens = list(gens)
    if layer_flags is None:
        layer_flags = [False] * len(gens)
    # Layer elements go in first and unreduced: the layer-layer pair
    # skip below is only sound while they stay the pristine ideal basis
    # copied into each component.
    ordered = [(g, f) for g, f in zip(gens, layer_flags) if f]
    ordered += [(g, f) for g, f in zip(gens, layer_flags) if not f]
    for g, flag in ordered:
        r = g if flag else _reduce_full(g, reducers, vo)
        if r:
            insert(r, layer=flag)

    while heap:
        _, _, i, j = heapq.heappop(heap)
        if (i, j) not in pairs:
            continue
        drop_pair(i, j)
        s = _spair(G[i], G[j], vo)
        r = _reduce_full(s, reducers, vo)
        if r:
            insert(r)

    basis = _reduce_basis([e.vec for e in G], vo)
    if _gb_recorder is not None:
        _gb_recorder.append((tuple(tuple(v) for v in basis), vo))
    return basis


def _reduce_basis(vectors: List[list], vo: VecOrder) -> List[list]:
    """Minimalize and inter-reduce; sort by leading term descending."""
    divides = vo.packer.divides
    order_idx = sorted(range(len(vectors)), key=lambda i: vectors[i][0][0])
    kept: List[list] = []
    leads_by_comp = {}
    for i in order_idx:
        v = vectors[i]
        _, comp, mono, _ = v[0]
        dominated = False
        for lm in leads_by_comp.get(comp, ()):
            if divides(lm, mono):
                dominated = True
                break
        if dominated:
            continue
        leads_by_comp.setdefault(comp, []).append(mono)
        kept.append(v)
    table = _Reducers(vo.packer)
    entries = [table.add(v) for v in kept]
    out = []
    for v, entry in zip(kept, entries):
        comp = v[0][1]
        table.remove(comp, entry)
        r = _reduce_full(v, table, vo)
        if r:
            r = _vnormalize(r)
            out.append(r)
            table.add(r)
    out.sort(key=lambda v: v[0][0], reverse=True)
    return out


def spairs_reduce_to_zero(basis: Sequence[list], vo: VecOrder) -> bool:
    """Buchberger criterion, checked directly without pair pruning."""
    reducers = _Reducers(vo.packer)
    for v in basis:
        reducers.add(list(v))
    elems = [
        _Elem(list(v), v[0][1], v[0][2], v[0][3], _is_single_component(v), False)
        for v in basis
    ]
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            if elems[i].comp != elems[j].comp:
                continue
            s = _spair(elems[i], elems[j], vo)
            if _reduce_full(s, reducers, vo):
                return False
    return True


# ---------------------------------------------------------------------------
# quotient ring


class QuotientRing:
    """A = S/I with a fixed reduced Groebner basis for I."""

    def __init__(self, base: PolyRing, ideal_gens: Sequence[Polynomial] = ()):
        self.base = base
        self.order = base.order
        self.varnames = base.varnames
        self.nvars = base.nvars
        self.ideal_gens = tuple(ideal_gens)
        for f in self.ideal_gens:
            if f.ring.varnames != base.varnames:
                raise ValueError("ideal generator not over the ambient ring")
        self.packer = Packer(base.nvars)
        self._vo1 = VecOrder(self.packer, base.order)
        gb_vecs = groebner_basis(
            [self._poly_to_vec(f) for f in self.ideal_gens if not f.is_zero],
            self._vo1,
        )
        self.ideal_gb = tuple(self._vec_to_poly(v) for v in gb_vecs)
        self._gb_vecs = gb_vecs
        self._reducers = _Reducers(self.packer)
        for v in gb_vecs:
            self._reducers.add(v)
        for f in self.ideal_gens:
            if not self.reduce_poly(f).is_zero:
                raise AssertionError("ideal generator does not reduce to zero")

    # -- polynomial helpers --------------------------------------------------

    def _poly_to_vec(self, f: Polynomial, comp: int = 0, vo: Optional[VecOrder] = None):
        vo = vo or self._vo1
        return _vec_from_pairs(((comp, m, c) for m, c in f.terms), vo)

    def _vec_to_poly(self, vec) -> Polynomial:
        unpack = self.packer.unpack
        return Polynomial(self.base, tuple((unpack(m), c) for _, _, m, c in vec))

    def poly(self, text) -> Polynomial:
        if isinstance(text, Polynomial):
            return text
        if isinstance(text, str):
            return self.base.from_string(text)
        return self.base.constant(text)

    def reduce_poly(self, f: Polynomial) -> Polynomial:
        if f.is_zero or not self.ideal_gb:
            return f
        vec = self._poly_to_vec(f)
        red = _reduce_full(vec, self._reducers, self._vo1)
        return self._vec_to_poly(red)

    def is_zero(self, f: Polynomial) -> bool:
        return self.reduce_poly(f).is_zero

    def zero(self) -> Polynomial:
        return self.base.zero()

    def one(self) -> Polynomial:
        return self.base.one()

    def var(self, i) -> Polynomial:
        return self.base.var(i)

    def __eq__(self, other):
        return (
            isinstance(other, QuotientRing)
            and self.base == other.base
            and self.ideal_gb == other.ideal_gb
        )

    def __hash__(self):
        return hash((self.base, self.ideal_gb))

    def __repr__(self):
        gens = ",".join(str(f) for f in self.ideal_gens) or "0"
        return f"QuotientRing({','.join(self.varnames)}; {self.order.name()}; ({gens}))"

    def layer_vectors(self, rank: int, vo: VecOrder) -> list:
        """The adjoined quotient layer F*e_t over all components."""
        out = []
        for t in range(rank):
            for f in self.ideal_gb:
                out.append(_vec_from_pairs(((t, m, c) for m, c in f.terms), vo))
        return out


def quotient_ring(varnames, ideal=(), order: str = "dp", weights=None) -> QuotientRing:
    """Convenience factory; ideal entries may be text."""
    if isinstance(varnames, str):
        varnames = [v.strip() for v in varnames.split(",")]
    ring = PolyRing(varnames, MonomialOrder.from_name(order, weights))
    base = QuotientRing(ring, ())
    gens = [base.poly(f) for f in ideal]
    return QuotientRing(ring, gens)


# ---------------------------------------------------------------------------
# free module elements and matrices


class FreeModuleElem:
    """Element of A^rank, stored as a tuple of component polynomials."""

    __slots__ = ("ring", "components")

    def __init__(self, ring: QuotientRing, components: Sequence[Polynomial]):
        self.ring = ring
        self.components = tuple(components)

    @property
    def rank(self) -> int:
        return len(self.components)

    @property
    def is_zero(self) -> bool:
        return all(p.is_zero for p in self.components)

    def __add__(self, other: "FreeModuleElem"):
        self._check(other)
        return FreeModuleElem(
            self.ring, tuple(a + b for a, b in zip(self.components, other.components))
        )

    def __sub__(self, other: "FreeModuleElem"):
        self._check(other)
        return FreeModuleElem(
            self.ring, tuple(a - b for a, b in zip(self.components, other.components))
        )

    def __neg__(self):
        return FreeModuleElem(self.ring, tuple(-a for a in self.components))

    def scale(self, f: Polynomial) -> "FreeModuleElem":
        return FreeModuleElem(self.ring, tuple(f * a for a in self.components))

    def reduce(self) -> "FreeModuleElem":
        return FreeModuleElem(
            self.ring, tuple(self.ring.reduce_poly(a) for a in self.components)
        )

    def _check(self, other):
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __eq__(self, other):
        return (
            isinstance(other, FreeModuleElem)
            and self.ring == other.ring
            and self.components == other.components
        )

    def __hash__(self):
        return hash(self.components)

    def to_vec(self, vo: VecOrder):
        pairs = []
        for comp, poly in enumerate(self.components):
            for m, c in poly.terms:
                pairs.append((comp, m, c))
        return _vec_from_pairs(pairs, vo)

    @classmethod
    def from_vec(cls, ring: QuotientRing, rank: int, vec) -> "FreeModuleElem":
        unpack = ring.packer.unpack
        comps = [dict() for _ in range(rank)]
        for _, comp, mono, coeff in vec:
            comps[comp][unpack(mono)] = coeff
        return cls(ring, tuple(ring.base.from_dict(d) for d in comps))

    @classmethod
    def zero(cls, ring: QuotientRing, rank: int) -> "FreeModuleElem":
        z = ring.zero()
        return cls(ring, (z,) * rank)

    @classmethod
    def unit(cls, ring: QuotientRing, rank: int, comp: int) -> "FreeModuleElem":
        comps = [ring.zero()] * rank
        comps[comp] = ring.one()
        return cls(ring, tuple(comps))

    def __str__(self):
        vec = self.to_vec(self.ring._vo1)
        if not vec:
            return "0"
        unpack = self.ring.packer.unpack
        parts = []
        for _, comp, mono, coeff in vec:
            piece = Polynomial(self.ring.base, ((unpack(mono), abs(coeff)),))
            body = f"e{comp + 1}" if str(piece) == "1" else f"{piece}*e{comp + 1}"
            parts.append(("-" if coeff < 0 else "+", body))
        out = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Vec({self})"


class PolyMatrix:
    """Matrix over A, row-major; columns are the relations."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: QuotientRing, rows: int, cols: int,
                 entries: Sequence[Polynomial]):
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match shape")
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.entries = tuple(entries)

    @classmethod
    def from_rows(cls, ring: QuotientRing, rows: Sequence[Sequence]) -> "PolyMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        entries = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged matrix rows")
            entries.extend(ring.poly(e) for e in row)
        return cls(ring, nrows, ncols, entries)

    @classmethod
    def zero(cls, ring: QuotientRing, rows: int, cols: int) -> "PolyMatrix":
        z = ring.zero()
        return cls(ring, rows, cols, (z,) * (rows * cols))

    @classmethod
    def identity(cls, ring: QuotientRing, n: int) -> "PolyMatrix":
        z, one = ring.zero(), ring.one()
        entries = [one if i == j else z for i in range(n) for j in range(n)]
        return cls(ring, n, n, entries)

    @classmethod
    def from_columns(cls, ring: QuotientRing, rank: int,
                     columns: Sequence[FreeModuleElem]) -> "PolyMatrix":
        cols = list(columns)
        entries = []
        for i in range(rank):
            for v in cols:
                entries.append(v.components[i])
        return cls(ring, rank, len(cols), entries)

    def entry(self, i: int, j: int) -> Polynomial:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[Polynomial, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> FreeModuleElem:
        return FreeModuleElem(
            self.ring, tuple(self.entries[i * self.cols + j] for i in range(self.rows))
        )

    def columns(self) -> List[FreeModuleElem]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "PolyMatrix":
        entries = [self.entry(i, j) for j in range(self.cols) for i in range(self.rows)]
        return PolyMatrix(self.ring, self.cols, self.rows, entries)

    def map_entries(self, fn) -> "PolyMatrix":
        return PolyMatrix(self.ring, self.rows, self.cols,
                          tuple(fn(e) for e in self.entries))

    def reduce(self) -> "PolyMatrix":
        return self.map_entries(self.ring.reduce_poly)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return PolyMatrix(self.ring, self.rows, self.cols,
                          tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + other.scale(-1)

    def scale(self, f) -> "PolyMatrix":
        f = self.ring.poly(f) if not isinstance(f, (int, mpq)) else f
        return self.map_entries(lambda e: e * f)

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        z = self.ring.zero()
        out = []
        for i in range(self.rows):
            row = self.row(i)
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    a = row[k]
                    if a.is_zero:
                        continue
                    b = other.entry(k, j)
                    if b.is_zero:
                        continue
                    acc = acc + a * b
                out.append(acc)
        return PolyMatrix(self.ring, self.rows, other.cols, out)

    def apply(self, v: FreeModuleElem) -> FreeModuleElem:
        if v.rank != self.cols:
            raise ValueError("rank mismatch in matrix application")
        z = self.ring.zero()
        comps = []
        for i in range(self.rows):
            acc = z
            row = self.row(i)
            for k in range(self.cols):
                a = row[k]
                if not a.is_zero and not v.components[k].is_zero:
                    acc = acc + a * v.components[k]
            comps.append(acc)
        return FreeModuleElem(self.ring, comps)

    def is_zero_mod_ideal(self) -> bool:
        return all(self.ring.is_zero(e) for e in self.entries)

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.ring == other.ring
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.entries == other.entries
        )

    def __str__(self):
        rows = []
        for i in range(self.rows):
            rows.append("[" + ",".join(str(e) for e in self.row(i)) + "]")
        return "[" + ",".join(rows) + "]"

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols}; {self})"


# ---------------------------------------------------------------------------
# submodules


class Submodule:
    """A-submodule of A^rank given by generators; bases are cached."""

    def __init__(self, ring: QuotientRing, ambient_rank: int,
                 generators: Sequence[FreeModuleElem]):
        self.ring = ring
        self.ambient_rank = ambient_rank
        gens = []
        for g in generators:
            if g.rank != ambient_rank:
                raise ValueError("generator rank does not match ambient rank")
            gens.append(g)
        self.generators = tuple(gens)
        self._vo = VecOrder(ring.packer, ring.order)
        self._full_gb = None
        self._full_reducers = None
        self._ext = None
        self._ext_reducers = None

    @classmethod
    def from_columns(cls, matrix: PolyMatrix) -> "Submodule":
        return cls(matrix.ring, matrix.rows, matrix.columns())

    # -- plain basis ---------------------------------------------------------

    def _compute_full_gb(self):
        if self._full_gb is None:
            vecs = [g.to_vec(self._vo) for g in self.generators]
            vecs = [v for v in vecs if v]
            layer = self.ring.layer_vectors(self.ambient_rank, self._vo)
            flags = [False] * len(vecs) + [True] * len(layer)
            self._full_gb = groebner_basis(vecs + layer, self._vo, flags)
        return self._full_gb

    def groebner_vectors(self) -> list:
        return self._compute_full_gb()

    def groebner_basis(self) -> List[FreeModuleElem]:
        """Reduced basis with the ideal layer projected away."""
        out = []
        for vec in self._compute_full_gb():
            elem = FreeModuleElem.from_vec(self.ring, self.ambient_rank, vec)
            if not elem.reduce().is_zero:
                out.append(elem)
        return out

    def normal_form(self, v: FreeModuleElem) -> FreeModuleElem:
        if v.rank != self.ambient_rank:
            raise ValueError(f"rank mismatch: {v.rank} vs {self.ambient_rank}")
        gb = self._compute_full_gb()
        if self._full_reducers is None:
            self._full_reducers = _Reducers(self.ring.packer)
            for w in gb:
                self._full_reducers.add(w)
        red = _reduce_full(v.to_vec(self._vo), self._full_reducers, self._vo)
        return FreeModuleElem.from_vec(self.ring, self.ambient_rank, red)

    def contains(self, v: FreeModuleElem) -> bool:
        return self.normal_form(v).is_zero

    # -- extended basis (witnesses, syzygies) --------------------------------

    def _compute_ext(self):
        """Basis of {g_i + marker_i} u layer under the elimination order."""
        if self._ext is None:
            r = self.ambient_rank
            k = len(self.generators)
            vo = VecOrder(self.ring.packer, self.ring.order, split=r)
            one_mono = (0,) * self.ring.nvars
            vecs = []
            for i, g in enumerate(self.generators):
                pairs = []
                for comp, poly in enumerate(g.components):
                    for m, c in poly.terms:
                        pairs.append((comp, m, c))
                pairs.append((r + i, one_mono, mpq(1)))
                vecs.append(_vec_from_pairs(pairs, vo))
            layer = self.ring.layer_vectors(r + k, vo)
            flags = [False] * len(vecs) + [True] * len(layer)
            gb = groebner_basis(vecs + layer, vo, flags)
            self._ext = (gb, vo)
        return self._ext

    def lift_with_witness(self, v: FreeModuleElem) -> List[Polynomial]:
        """Coefficients q with v = sum q_t * gens[t] modulo the ideal layer."""
        if v.rank != self.ambient_rank:
            raise ValueError(f"rank mismatch: {v.rank} vs {self.ambient_rank}")
        gb, vo = self._compute_ext()
        if self._ext_reducers is None:
            self._ext_reducers = _Reducers(self.ring.packer)
            for w in gb:
                self._ext_reducers.add(w)
        pairs = []
        for comp, poly in enumerate(v.components):
            for m, c in poly.terms:
                pairs.append((comp, m, c))
        red = _reduce_full(_vec_from_pairs(pairs, vo), self._ext_reducers, vo)
        r = self.ambient_rank
        ambient = [t for t in red if t[1] < r]
        if ambient:
            cert = FreeModuleElem.from_vec(self.ring, r, ambient)
            raise NotInSubmodule(cert)
        unpack = self.ring.packer.unpack
        coeffs = [dict() for _ in range(len(self.generators))]
        for _, comp, mono, coeff in red:
            coeffs[comp - r][unpack(mono)] = -coeff
        return [self.ring.base.from_dict(d) for d in coeffs]

    def syzygies(self) -> "Submodule":
        """Relations among the generators, over A."""
        gb, _vo = self._compute_ext()
        r = self.ambient_rank
        k = len(self.generators)
        unpack = self.ring.packer.unpack
        out = []
        seen = set()
        for vec in gb:
            if any(t[1] < r for t in vec):
                continue
            comps = [dict() for _ in range(k)]
            for _, comp, mono, coeff in vec:
                comps[comp - r][unpack(mono)] = coeff
            elem = FreeModuleElem(
                self.ring,
                tuple(self.ring.reduce_poly(self.ring.base.from_dict(d)) for d in comps),
            )
            if elem.is_zero or elem.components in seen:
                continue
            seen.add(elem.components)
            out.append(elem)
        return Submodule(self.ring, k, out)

    # -- comparisons ----------------------------------------------------------

    def equals(self, other: "Submodule") -> bool:
        if self.ambient_rank != other.ambient_rank:
            raise ValueError("ambient rank mismatch")
        if self.ring != other.ring:
            raise ValueError("ring mismatch")
        return all(other.normal_form(g).is_zero for g in self.generators) and all(
            self.normal_form(g).is_zero for g in other.generators
        )

    def check_gb_consistency(self) -> bool:
        """The reported basis and the generators span the same submodule."""
        basis = self.groebner_basis()
        span = Submodule(self.ring, self.ambient_rank, basis)
        return self.equals(span)

    def __repr__(self):
        return f"Submodule(rank {self.ambient_rank}, {len(self.generators)} gens)"


# ---------------------------------------------------------------------------
# module-level operations


def buchberger(gens: Submodule) -> Submodule:
    """Reduced Groebner basis of a submodule, as a new submodule."""
    return Submodule(gens.ring, gens.ambient_rank, gens.groebner_basis())


def normal_form(v: FreeModuleElem, gb: Submodule) -> FreeModuleElem:
    return gb.normal_form(v)


def lift_with_witness(v: FreeModuleElem, gens: Submodule) -> List[Polynomial]:
    return gens.lift_with_witness(v)


def syzygy_module(gens: Submodule) -> Submodule:
    return gens.syzygies()


def module_kernel(f: PolyMatrix) -> Submodule:
    """Generators of ker(f: A^cols -> A^rows)."""
    cols = Submodule(f.ring, f.rows, f.columns())
    return cols.syzygies()


def preimage(f: PolyMatrix, target: Submodule) -> Submodule:
    """Generators of f^{-1}(target) inside A^cols."""
    if f.rows != target.ambient_rank:
        raise ValueError("target rank does not match the map")
    ring = f.ring
    r = f.rows
    p = f.cols
    vo = VecOrder(ring.packer, ring.order, split=r)
    one_mono = (0,) * ring.nvars
    vecs = []
    for i in range(p):
        col = f.column(i)
        pairs = [(c, m, q) for c, poly in enumerate(col.components) for m, q in poly.terms]
        pairs.append((r + i, one_mono, mpq(1)))
        vecs.append(_vec_from_pairs(pairs, vo))
    for g in target.generators:
        pairs = [(c, m, q) for c, poly in enumerate(g.components) for m, q in poly.terms]
        v = _vec_from_pairs(pairs, vo)
        if v:
            vecs.append(v)
    layer = ring.layer_vectors(r + p, vo)
    flags = [False] * len(vecs) + [True] * len(layer)
    gb = groebner_basis(vecs + layer, vo, flags)
    unpack = ring.packer.unpack
    out = []
    seen = set()
    for vec in gb:
        if any(t[1] < r for t in vec):
            continue
        comps = [dict() for _ in range(p)]
        for _, comp, mono, coeff in vec:
            comps[comp - r][unpack(mono)] = coeff
        elem = FreeModuleElem(
            ring, tuple(ring.reduce_poly(ring.base.from_dict(d)) for d in comps)
        )
        if elem.is_zero or elem.components in seen:
            continue
        seen.add(elem.components)
        out.append(elem)
    return Submodule(ring, p, out)


def submodule_equal(u: Submodule, v: Submodule) -> bool:
    return u.equals(v)


def minimize_generators(sub: Submodule) -> Submodule:
    """Greedily drop generators contained in the span of the others.

    Basis-sized generating sets coming out of syzygy and preimage
    computations are heavily redundant; the membership problems built on
    top of them grow quadratically in the generator count, so a smaller
    generating set pays for the normal forms spent here.  Generators are
    kept smallest-leading-term-first, so the result is deterministic.
    """
    gens = [g for g in (h.reduce() for h in sub.generators) if not g.is_zero]
    if len(gens) <= 1:
        return Submodule(sub.ring, sub.ambient_rank, gens)
    vo = VecOrder(sub.ring.packer, sub.ring.order)
    decorated = []
    for g in gens:
        vec = g.to_vec(vo)
        decorated.append((vec[0][0], len(vec), g))
    decorated.sort(key=lambda t: (t[0], t[1]))
    seen = set()
    ordered = []
    for _, _, g in decorated:
        if g.components in seen:
            continue
        seen.add(g.components)
        ordered.append(g)
    kept: List[FreeModuleElem] = []
    current: Optional[Submodule] = None
    for g in ordered:
        if current is not None and current.contains(g):
            continue
        kept.append(g)
        current = Submodule(sub.ring, sub.ambient_rank, kept)
    return current if current is not None else Submodule(
        sub.ring, sub.ambient_rank, [])


def submodule_intersection(u: Submodule, v: Submodule) -> Submodule:
    """Generators of the intersection, from relations between the two
    generating sets: whenever sum a_t u_t + sum b_s v_s = 0 over A, the
    element sum a_t u_t lies in both submodules."""
    if u.ambient_rank != v.ambient_rank:
        raise ValueError("ambient rank mismatch")
    ring = u.ring
    combined = Submodule(ring, u.ambient_rank,
                         list(u.generators) + list(v.generators))
    syz = combined.syzygies()
    k = len(u.generators)
    out = []
    seen = set()
    for rel in syz.generators:
        acc = FreeModuleElem.zero(ring, u.ambient_rank)
        for t in range(k):
            c = rel.components[t]
            if not c.is_zero:
                acc = acc + u.generators[t].scale(c)
        acc = acc.reduce()
        if acc.is_zero or acc.components in seen:
            continue
        seen.add(acc.components)
        out.append(acc)
    return Submodule(ring, u.ambient_rank, out)


@dataclass
class FreeResolution:
    """Chain of presentation matrices with vanishing composites."""

    module: object
    maps: List[PolyMatrix]

    @property
    def length(self) -> int:
        return len(self.maps)

    def verify_composites(self) -> bool:
        for d0, d1 in zip(self.maps, self.maps[1:]):
            if d0.cols == 0 or d1.cols == 0:
                continue
            if not (d0 * d1).is_zero_mod_ideal():
                return False
        return True


def free_resolution(module, length: int = 2) -> FreeResolution:
    """Iterated syzygies starting from the module's presentation."""
    if length < 1:
        raise ValueError("resolution length must be at least 1")
    d0: PolyMatrix = module.presentation
    maps = [d0]
    current = d0
    for _ in range(length - 1):
        cols = Submodule(current.ring, current.rows, current.columns())
        syz = cols.syzygies()
        nxt = PolyMatrix.from_columns(current.ring, current.cols, syz.generators)
        maps.append(nxt)
        current = nxt
        if nxt.cols == 0:
            break
    res = FreeResolution(module, maps)
    if not res.verify_composites():
        raise AssertionError("consecutive resolution maps do not compose to zero")
    return res
