"""Finitely presented modules over a quotient ring.

A module is the cokernel of its presentation matrix d0: A^n -> A^m;
columns are relations.  Hom modules are computed from the presentation
as matrices H with H*d0 landing in the relation span of the target,
modulo the matrices whose columns already lie in that span.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

from .algebra import Polynomial
from .groebner import (
    FreeModuleElem,
    PolyMatrix,
    QuotientRing,
    Submodule,
    minimize_generators,
    preimage,
)


class PresentedModule:
    """coker(presentation) with rank0 generators."""

    def __init__(self, ring: QuotientRing, rank0: int, presentation: PolyMatrix):
        if rank0 <= 0:
            raise ValueError("rank0 must be positive; encode the zero module "
                             "as rank 1 with presentation (1)")
        if presentation.rows != rank0:
            raise ValueError("presentation row count must equal rank0")
        self.ring = ring
        self.rank0 = rank0
        self.presentation = presentation.reduce()
        self._image = None

    @property
    def rank1(self) -> int:
        return self.presentation.cols

    def relation_span(self) -> Submodule:
        """Column span of the presentation inside A^rank0 (cached)."""
        if self._image is None:
            self._image = Submodule(self.ring, self.rank0,
                                    self.presentation.columns())
        return self._image

    def is_zero_element(self, v: FreeModuleElem) -> bool:
        return self.relation_span().normal_form(v).is_zero

    def elements_equal(self, u: FreeModuleElem, v: FreeModuleElem) -> bool:
        return self.is_zero_element(u - v)

    def is_free_presentation(self) -> bool:
        return self.presentation.cols == 0

    def __repr__(self):
        return f"PresentedModule(rank0={self.rank0}, rank1={self.rank1})"


def present(ring: QuotientRing, matrix: PolyMatrix) -> PresentedModule:
    return PresentedModule(ring, matrix.rows, matrix)


def free_module(ring: QuotientRing, rank: int) -> PresentedModule:
    return PresentedModule(ring, rank, PolyMatrix.zero(ring, rank, 0))


def zero_module(ring: QuotientRing) -> PresentedModule:
    return PresentedModule(ring, 1, PolyMatrix.from_rows(ring, [[ring.one()]]))


def ideal_module(ring: QuotientRing, gens: Sequence) -> PresentedModule:
    """The ideal generated by ``gens`` as a module: generators plus their
    syzygy presentation."""
    polys = [ring.poly(g) for g in gens]
    sub = Submodule(ring, 1, [FreeModuleElem(ring, [p]) for p in polys])
    syz = minimize_generators(sub.syzygies())
    pres = PolyMatrix.from_columns(ring, len(polys), syz.generators)
    mod = PresentedModule(ring, len(polys), pres)
    mod.generator_images = tuple(polys)  # the chosen ideal generators
    return mod


def direct_sum(m: PresentedModule, n: PresentedModule) -> PresentedModule:
    if m.ring != n.ring:
        raise ValueError("direct sum needs modules over the same ring")
    ring = m.ring
    rows = m.rank0 + n.rank0
    cols = m.rank1 + n.rank1
    z = ring.zero()
    entries = []
    for i in range(rows):
        for j in range(cols):
            if i < m.rank0 and j < m.rank1:
                entries.append(m.presentation.entry(i, j))
            elif i >= m.rank0 and j >= m.rank1:
                entries.append(n.presentation.entry(i - m.rank0, j - m.rank1))
            else:
                entries.append(z)
    return PresentedModule(ring, rows, PolyMatrix(ring, rows, cols, entries))


class ModuleHom:
    """A-linear map between presented modules, given on generators.

    Construction verifies well-definedness: the matrix must carry every
    relation of the source into the relation span of the target.
    """

    def __init__(self, source: PresentedModule, target: PresentedModule,
                 matrix: PolyMatrix, check: bool = True):
        if matrix.rows != target.rank0 or matrix.cols != source.rank0:
            raise ValueError("hom matrix shape must be target.rank0 x source.rank0")
        self.source = source
        self.target = target
        self.matrix = matrix.reduce()
        if check and not self._well_defined():
            raise ValueError("matrix does not define a module homomorphism")

    def _well_defined(self) -> bool:
        span = self.target.relation_span()
        for j in range(self.source.rank1):
            image = self.matrix.apply(self.source.presentation.column(j))
            if not span.normal_form(image).is_zero:
                return False
        return True

    def is_zero(self) -> bool:
        span = self.target.relation_span()
        for j in range(self.matrix.cols):
            if not span.normal_form(self.matrix.column(j)).is_zero:
                return False
        return True

    def equal_to(self, other: "ModuleHom") -> bool:
        diff = ModuleHom(self.source, self.target,
                         self.matrix - other.matrix, check=False)
        return diff.is_zero()

    def compose(self, other: "ModuleHom") -> "ModuleHom":
        """self after other."""
        if other.target is not self.source and other.target.rank0 != self.source.rank0:
            raise ValueError("composition shape mismatch")
        return ModuleHom(other.source, self.target, self.matrix * other.matrix)

    def __repr__(self):
        return f"ModuleHom({self.matrix.rows}x{self.matrix.cols})"


@dataclass
class HomModule:
    """Hom_A(M, N) as a presented module with effective conversions."""

    source: PresentedModule
    target: PresentedModule
    module: PresentedModule
    hom_generators: List[PolyMatrix]
    _lift_sub: Submodule = field(repr=False, default=None)

    def to_hom(self, coeffs: Sequence[Polynomial]) -> ModuleHom:
        """Element of the presented Hom module -> actual homomorphism."""
        if len(coeffs) != len(self.hom_generators):
            raise ValueError("coefficient count mismatch")
        r, m = self.target.rank0, self.source.rank0
        acc = PolyMatrix.zero(self.source.ring, r, m)
        for c, h in zip(coeffs, self.hom_generators):
            if not (isinstance(c, Polynomial) and c.is_zero):
                acc = acc + h.scale(c)
        return ModuleHom(self.source, self.target, acc)

    def from_hom(self, hom) -> List[Polynomial]:
        """Homomorphism (or bare matrix) -> coefficients over the generators."""
        matrix = hom.matrix if isinstance(hom, ModuleHom) else hom
        vec = _flatten_matrix(matrix)
        witness = self._lift_sub.lift_with_witness(vec)
        return witness[: len(self.hom_generators)]


def _flatten_matrix(matrix: PolyMatrix) -> FreeModuleElem:
    """Column-major flattening of an r x m matrix into A^(r*m)."""
    comps = []
    for t in range(matrix.cols):
        for i in range(matrix.rows):
            comps.append(matrix.entry(i, t))
    return FreeModuleElem(matrix.ring, comps)


def _unflatten_matrix(ring: QuotientRing, rows: int, cols: int,
                      v: FreeModuleElem) -> PolyMatrix:
    entries = [None] * (rows * cols)
    for t in range(cols):
        for i in range(rows):
            entries[i * cols + t] = v.components[t * rows + i]
    return PolyMatrix(ring, rows, cols, entries)


def hom_module(m: PresentedModule, n: PresentedModule) -> HomModule:
    """Hom_A(M, N) = ker(Hom(L0, N) -> Hom(L1, N)) with its presentation."""
    if m.ring != n.ring:
        raise ValueError("hom needs modules over the same ring")
    ring = m.ring
    mm, nn = m.rank0, m.rank1  # source: A^nn -> A^mm
    r, s = n.rank0, n.rank1  # target: A^s -> A^r
    d0 = m.presentation
    b = n.presentation

    # alpha: A^(r*mm) -> A^(r*nn), H |-> H*d0, both sides column-major.
    z = ring.zero()
    alpha_entries = [z] * (r * nn * r * mm)
    width = r * mm
    for t in range(mm):
        for i in range(r):
            col = t * r + i
            for j in range(nn):
                alpha_entries[(j * r + i) * width + col] = d0.entry(t, j)
    alpha = PolyMatrix(ring, r * nn, r * mm, alpha_entries)

    # relation span of N, copied into every block of Hom(L1, N)
    block_targets = []
    for j in range(nn):
        for c in range(s):
            comps = [z] * (r * nn)
            for i in range(r):
                comps[j * r + i] = b.entry(i, c)
            block_targets.append(FreeModuleElem(ring, comps))
    target = Submodule(ring, r * nn, block_targets)

    hom_flat = minimize_generators(preimage(alpha, target)).generators
    hom_gens = [_unflatten_matrix(ring, r, mm, v).reduce() for v in hom_flat]

    # matrices whose columns lie in the relation span of N act as zero
    trivial = []
    for t in range(mm):
        for c in range(s):
            comps = [z] * (r * mm)
            for i in range(r):
                comps[t * r + i] = b.entry(i, c)
            trivial.append(FreeModuleElem(ring, comps))

    if not hom_gens:
        hom_presented = zero_module(ring)
        lift_sub = Submodule(ring, r * mm, list(trivial))
        return HomModule(m, n, hom_presented, [], lift_sub)

    gen_matrix = PolyMatrix.from_columns(
        ring, r * mm, [_flatten_matrix(h) for h in hom_gens]
    )
    relations = minimize_generators(
        preimage(gen_matrix, Submodule(ring, r * mm, trivial)))
    pres = PolyMatrix.from_columns(ring, len(hom_gens), relations.generators)
    hom_presented = PresentedModule(ring, len(hom_gens), pres)

    lift_sub = Submodule(
        ring, r * mm, [_flatten_matrix(h) for h in hom_gens] + trivial
    )
    return HomModule(m, n, hom_presented, hom_gens, lift_sub)


def kaehler_differentials(ring: QuotientRing) -> PresentedModule:
    """Module of differentials: one generator dx_i per variable, one
    relation column per ideal generator with entries dF/dx_i."""
    nv = ring.nvars
    cols = len(ring.ideal_gens)
    entries = []
    for i in range(nv):
        for f in ring.ideal_gens:
            entries.append(ring.reduce_poly(f.partial_derivative(i)))
    return PresentedModule(ring, nv, PolyMatrix(ring, nv, cols, entries))
