"""Singularity and module catalog: ADE hypersurface rings, matrix
factorizations of their potentials, doubling to higher dimensions, and
the built-in verification table.

Every matrix factorization is checked phi*psi = psi*phi = f*Id
entry-exactly at construction; no matrix enters the catalog unverified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fnmatch import fnmatchcase
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import Polynomial
from .groebner import PolyMatrix, QuotientRing, quotient_ring
from .modules import PresentedModule, free_module, ideal_module, present


class FixtureError(ValueError):
    pass


@dataclass
class MatrixFactorization:
    """(phi, psi) square over the ambient polynomial ring with
    phi*psi = psi*phi = potential * Id."""

    name: str
    ring: QuotientRing  # ambient ring (no ideal)
    potential: Polynomial
    phi: PolyMatrix
    psi: PolyMatrix

    def __post_init__(self):
        if self.ring.ideal_gens:
            raise FixtureError("matrix factorizations live over the free ring")
        if self.phi.rows != self.phi.cols or self.psi.rows != self.psi.cols:
            raise FixtureError("matrix factorization blocks must be square")
        if self.phi.rows != self.psi.rows:
            raise FixtureError("phi and psi must have equal size")
        if not self.verify():
            raise FixtureError(f"{self.name}: phi*psi != f*Id")

    @property
    def size(self) -> int:
        return self.phi.rows

    def verify(self) -> bool:
        f = self.potential
        z = self.ring.zero()
        for prod in (self.phi * self.psi, self.psi * self.phi):
            for i in range(self.size):
                for j in range(self.size):
                    want = f if i == j else z
                    if not (prod.entry(i, j) - want).is_zero:
                        return False
        return True

    def has_unit_entries(self) -> bool:
        return any(
            e.constant_term() != 0
            for e in self.phi.entries + self.psi.entries
            if not e.is_zero
        )

    def partner(self, name: Optional[str] = None) -> "MatrixFactorization":
        """The factorization with the roles of phi and psi swapped."""
        return MatrixFactorization(
            name or f"{self.name}_partner", self.ring, self.potential,
            self.psi, self.phi,
        )


def _free_ring(varnames: Sequence[str], order: str = "dp") -> QuotientRing:
    return quotient_ring(list(varnames), [], order=order)


def make_mf(name: str, varnames: Sequence[str], potential: str,
            phi_rows, psi_rows, order: str = "dp") -> MatrixFactorization:
    ring = _free_ring(varnames, order)
    return MatrixFactorization(
        name,
        ring,
        ring.poly(potential),
        PolyMatrix.from_rows(ring, phi_rows),
        PolyMatrix.from_rows(ring, psi_rows),
    )


# ---------------------------------------------------------------------------
# ADE rings


_ADE_VARNAMES = {1: ("x", "y"), 2: ("x", "y", "z"), 3: ("x", "y", "z", "w")}


def ade_varnames(dim: int) -> Tuple[str, ...]:
    if dim < 1:
        raise FixtureError("dimension must be at least 1")
    if dim in _ADE_VARNAMES:
        return _ADE_VARNAMES[dim]
    return ("x", "y") + tuple(f"z{i}" for i in range(1, dim))


def ade_potential_text(typ: str, n: int, dim: int) -> str:
    """Defining equation of the (type, n) singularity in dimension dim."""
    if typ == "A":
        if n < 1:
            raise FixtureError("A_n needs n >= 1")
        head = f"x^2+y^{n + 1}"
    elif typ == "D":
        if n < 4:
            raise FixtureError("D_n needs n >= 4")
        head = f"x^2*y+y^{n - 1}"
    elif typ == "E":
        if n not in (6, 7, 8):
            raise FixtureError("E_n needs n in {6, 7, 8}")
        head = {6: "x^3+y^4", 7: "x^3+x*y^3", 8: "x^3+y^5"}[n]
    else:
        raise FixtureError(f"unknown singularity type {typ!r}")
    squares = "".join(f"+{v}^2" for v in ade_varnames(dim)[2:])
    return head + squares


def ade_ring(typ: str, n: int, dim: int, order: str = "dp") -> QuotientRing:
    """Affine coordinate ring of the (type, n) hypersurface singularity."""
    return quotient_ring(
        list(ade_varnames(dim)), [ade_potential_text(typ, n, dim)], order=order
    )


# ---------------------------------------------------------------------------
# curve matrix factorizations


def an_curve_mf(n: int, j: int) -> MatrixFactorization:
    """[[x, y^j], [y^(n+1-j), -x]] over x^2 + y^(n+1); self-paired."""
    if n < 1:
        raise FixtureError("A_n needs n >= 1")
    if j < 1 or j > n:
        raise FixtureError(
            f"index j={j} out of range: j=0 or j=n+1 gives a unit block (free module)"
        )
    rows = [["x", f"y^{j}"], [f"y^{n + 1 - j}", "-x"]]
    return make_mf(f"A{n}_j{j}", ("x", "y"), f"x^2+y^{n + 1}", rows, rows)


def curve_mf_catalog(typ: str, n: int) -> List[MatrixFactorization]:
    """Verified matrix factorizations of the dimension-1 potential."""
    if typ == "A":
        if n < 1:
            raise FixtureError("A_n needs n >= 1")
        count = (n + 2) // 2  # j and n+1-j give the same module
        return [an_curve_mf(n, j) for j in range(1, count + 1)]
    if typ == "D":
        if n < 4:
            raise FixtureError("D_n needs n >= 4")
        f = f"x^2*y+y^{n - 1}"
        q = f"x^2+y^{n - 2}"
        out = [
            make_mf(f"D{n}_y", ("x", "y"), f, [["y"]], [[q]]),
            make_mf(f"D{n}_q", ("x", "y"), f, [[q]], [["y"]]),
            make_mf(
                f"D{n}_a", ("x", "y"), f,
                [["x", f"y^{n - 3}"], ["y^2", "-x*y"]],
                [["x*y", f"y^{n - 3}"], ["y^2", "-x"]],
            ) if n > 4 else make_mf(
                f"D{n}_a", ("x", "y"), f,
                [["x", "y^2"], ["y", "-x*y"]],
                [["x*y", "y^2"], ["y", "-x"]],
            ),
        ]
        out.append(out[2].partner(f"D{n}_b"))
        return out
    if typ == "E":
        if n == 6:
            f = "x^3+y^4"
            a = make_mf("E6_a", ("x", "y"), f,
                        [["x", "y"], ["y^3", "-x^2"]],
                        [["x^2", "y"], ["y^3", "-x"]])
            c = make_mf("E6_c", ("x", "y"), f,
                        [["x", "y^2"], ["y^2", "-x^2"]],
                        [["x^2", "y^2"], ["y^2", "-x"]])
            return [a, a.partner("E6_b"), c, c.partner("E6_d")]
        if n == 7:
            f = "x^3+x*y^3"
            a = make_mf("E7_x", ("x", "y"), f, [["x"]], [["x^2+y^3"]])
            b = make_mf("E7_q", ("x", "y"), f, [["x^2+y^3"]], [["x"]])
            c = make_mf("E7_a", ("x", "y"), f,
                        [["x", "x*y^2"], ["y", "-x^2"]],
                        [["x^2", "x*y^2"], ["y", "-x"]])
            return [a, b, c, c.partner("E7_b")]
        if n == 8:
            f = "x^3+y^5"
            a = make_mf("E8_a", ("x", "y"), f,
                        [["x", "y"], ["y^4", "-x^2"]],
                        [["x^2", "y"], ["y^4", "-x"]])
            c = make_mf("E8_c", ("x", "y"), f,
                        [["x", "y^2"], ["y^3", "-x^2"]],
                        [["x^2", "y^2"], ["y^3", "-x"]])
            return [a, a.partner("E8_b"), c, c.partner("E8_d")]
        raise FixtureError("E_n needs n in {6, 7, 8}")
    raise FixtureError(f"unknown singularity type {typ!r}")


def knoerrer_double(mf: MatrixFactorization, newvar: str) -> MatrixFactorization:
    """Double to the potential f + v^2 using the block construction
    [[phi, v*Id], [v*Id, -psi]]; the invariant is re-verified exactly."""
    if newvar in mf.ring.varnames:
        raise FixtureError(f"variable {newvar!r} already occurs in the ring")
    if mf.has_unit_entries():
        raise FixtureError("doubling needs non-unit blocks; this factorization "
                           "has a unit entry (free summand)")
    names = tuple(mf.ring.varnames) + (newvar,)
    ring = _free_ring(names, mf.ring.order.name())
    v = ring.poly(newvar)
    z = ring.zero()
    size = mf.size

    def lift(mat: PolyMatrix) -> List[List[Polynomial]]:
        return [
            [mat.entry(i, j).lift_to(ring.base) for j in range(size)]
            for i in range(size)
        ]

    p_rows, q_rows = lift(mf.phi), lift(mf.psi)

    def block(top, bottom):
        rows = []
        for i in range(size):
            rows.append(top[i] + [v if k == i else z for k in range(size)])
        for i in range(size):
            rows.append([v if k == i else z for k in range(size)]
                        + [-e for e in bottom[i]])
        return rows

    potential = mf.potential.lift_to(ring.base) + v * v
    return MatrixFactorization(
        f"{mf.name}_{newvar}",
        ring,
        potential,
        PolyMatrix.from_rows(ring, block(p_rows, q_rows)),
        PolyMatrix.from_rows(ring, block(q_rows, p_rows)),
    )


def mf_to_module(mf: MatrixFactorization, order: str = "dp") -> PresentedModule:
    """coker(phi) over the hypersurface ring of the potential."""
    if mf.has_unit_entries():
        raise FixtureError("degenerate factorization: unit entries present a "
                           "free summand; not admitted as a catalog module")
    ring = quotient_ring(list(mf.ring.varnames), [str(mf.potential)], order=order)
    rows = [
        [mf.phi.entry(i, j).lift_to(ring.base) for j in range(mf.size)]
        for i in range(mf.size)
    ]
    return present(ring, PolyMatrix.from_rows(ring, rows))


# ---------------------------------------------------------------------------
# cubic cone modules


def _det3(m: PolyMatrix) -> Polynomial:
    a, b, c = m.entry(0, 0), m.entry(0, 1), m.entry(0, 2)
    d, e, f = m.entry(1, 0), m.entry(1, 1), m.entry(1, 2)
    g, h, i = m.entry(2, 0), m.entry(2, 1), m.entry(2, 2)
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _adj3(m: PolyMatrix) -> PolyMatrix:
    a, b, c = m.entry(0, 0), m.entry(0, 1), m.entry(0, 2)
    d, e, f = m.entry(1, 0), m.entry(1, 1), m.entry(1, 2)
    g, h, i = m.entry(2, 0), m.entry(2, 1), m.entry(2, 2)
    rows = [
        [e * i - f * h, c * h - b * i, b * f - c * e],
        [f * g - d * i, a * i - c * g, c * d - a * f],
        [d * h - e * g, b * g - a * h, a * e - b * d],
    ]
    return PolyMatrix.from_rows(m.ring, rows)


def cubic_cone_mf() -> MatrixFactorization:
    """A 3x3 factorization of x^3 + y^3 + z^3 with linear first block.

    The first block is a rational linear matrix with determinant
    -(x^3+y^3+z^3); its negated adjugate is the quadratic partner.
    """
    ring = _free_ring(("x", "y", "z"))
    phi = PolyMatrix.from_rows(ring, [
        ["-y-z", "-y", "x-2*y"],
        ["x", "x+z", "x+y"],
        ["x", "-y+z", "z"],
    ])
    f = ring.poly("x^3+y^3+z^3")
    if not (_det3(phi) + f).is_zero:
        raise FixtureError("cubic cone block lost its determinant")
    psi = _adj3(phi).scale(-1)
    return MatrixFactorization("cubic_cone_3x3", ring, f, phi, psi)


# ---------------------------------------------------------------------------
# the catalog


@dataclass
class CatalogEntry:
    id: str
    ring: QuotientRing
    modules: List[Tuple[str, PresentedModule]]
    # expected (aclass, kskernel, lclass); None entries are not asserted
    expected: Dict[str, Tuple[Optional[int], Optional[int], Optional[int]]]
    description: str = ""
    ideal_texts: List[str] = field(default_factory=list)
    module_sources: Dict[str, str] = field(default_factory=dict)

    def to_input_text(self) -> str:
        """Serialize to the CLI input format."""
        lines = [
            f"ring: vars {','.join(self.ring.varnames)};",
            f"order {self.ring.order.name()};",
        ]
        if self.ideal_texts:
            lines.append(f"ideal {', '.join(self.ideal_texts)};")
        for name, _ in self.modules:
            lines.append(f"module {name} = {self.module_sources[name]};")
        return "\n".join(lines)


def _entry_from_mfs(entry_id: str, mfs: Sequence[MatrixFactorization],
                    expected_lclass: Optional[int], order: str,
                    description: str,
                    include_free: bool = False) -> CatalogEntry:
    first = mf_to_module(mfs[0], order=order)
    ring = first.ring
    modules = [(mfs[0].name, first)]
    for mf in mfs[1:]:
        modules.append((mf.name, mf_to_module(mf, order=order)))
    expected: Dict[str, Tuple] = {
        mf.name: (None, None, expected_lclass) for mf in mfs
    }
    sources = {
        name: str(mod.presentation) for name, mod in modules
    }
    if include_free:
        modules.append(("free", free_module(ring, 1)))
        expected["free"] = (0, 0, 0)
        sources["free"] = "free(1)"
    ideal_texts = [str(f) for f in ring.ideal_gens]
    return CatalogEntry(entry_id, ring, modules, expected,
                        description, ideal_texts, sources)


_FAMILY_TYPES = [("A", 1), ("A", 2), ("A", 3), ("A", 4), ("A", 5),
                 ("D", 4), ("E", 6)]
_THREEFOLD_TYPES = [("A", 1), ("A", 2), ("A", 3), ("A", 4), ("A", 5), ("D", 4)]


def builtin_catalog(order: str = "dp") -> List[CatalogEntry]:
    """The built-in verification table plus the ADE module families."""
    entries: List[CatalogEntry] = []

    curve = quotient_ring(
        ["x", "y", "z"], ["x*z-y^2", "x^2*y-z^2", "x^3-y*z"], order=order
    )
    p = ideal_module(curve, ["x", "y"])
    entries.append(CatalogEntry(
        "monomial-curve-345", curve, [("p", p)], {"p": (1, 0, 1)},
        "non-Gorenstein monomial curve with semigroup (3,4,5)",
        ["x*z-y^2", "x^2*y-z^2", "x^3-y*z"],
        {"p": "ideal(x, y)"},
    ))

    cone_mf = cubic_cone_mf()
    m3 = mf_to_module(cone_mf, order=order)
    m4 = mf_to_module(cone_mf.partner("cubic_cone_3x3_partner"), order=order)
    entries.append(CatalogEntry(
        "cubic-cone", m3.ring, [("M3", m3), ("M4", m4)],
        {"M3": (1, 0, 0), "M4": (1, 0, 0)},
        "cone over the plane cubic x^3 + y^3 + z^3 = 0",
        ["x^3+y^3+z^3"],
        {"M3": str(m3.presentation), "M4": str(m4.presentation)},
    ))

    e6 = quotient_ring(["x", "y", "z", "w"], ["x^3+y^4+z^2+w^2"], order=order)
    m_ideal = ideal_module(e6, ["x", "y", "z", "w"])
    entries.append(CatalogEntry(
        "threefold-E6", e6, [("m", m_ideal)], {"m": (1, 0, 0)},
        "maximal ideal over the threefold E6 hypersurface",
        ["x^3+y^4+z^2+w^2"],
        {"m": "ideal(x, y, z, w)"},
    ))

    for typ, n in _FAMILY_TYPES:
        mfs = curve_mf_catalog(typ, n)
        entries.append(_entry_from_mfs(
            f"curve-{typ}{n}", mfs, 0, order,
            f"{typ}{n} curve: every MCM module admits a connection",
        ))
        doubled = [knoerrer_double(mf, "z") for mf in mfs]
        entries.append(_entry_from_mfs(
            f"surface-{typ}{n}", doubled, 0, order,
            f"{typ}{n} surface: every MCM module admits a connection",
        ))

    for typ, n in _THREEFOLD_TYPES:
        mfs = curve_mf_catalog(typ, n)
        tripled = [knoerrer_double(knoerrer_double(mf, "z"), "w") for mf in mfs]
        entries.append(_entry_from_mfs(
            f"threefold-{typ}{n}", tripled, 1, order,
            f"{typ}{n} threefold: only free MCM modules admit connections",
            include_free=True,
        ))

    return entries


def catalog_entry(entry_id: str, order: str = "dp") -> CatalogEntry:
    for entry in builtin_catalog(order=order):
        if entry.id == entry_id:
            return entry
    raise KeyError(entry_id)


def filter_catalog(pattern: Optional[str], order: str = "dp") -> List[CatalogEntry]:
    entries = builtin_catalog(order=order)
    if not pattern:
        return entries
    out = [e for e in entries if fnmatchcase(e.id, pattern)]
    if not out:
        known = ", ".join(e.id for e in entries)
        raise KeyError(f"no catalog entry matches {pattern!r}; available: {known}")
    return out
