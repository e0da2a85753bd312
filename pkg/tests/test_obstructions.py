"""Obstruction pipeline: derivation modules, the three classes,
connections, brackets and curvature on desk-size fixtures."""

import pytest
from gmpy2 import mpq

from connobs.groebner import (
    FreeModuleElem,
    PolyMatrix,
    Submodule,
    quotient_ring,
    submodule_equal,
)
from connobs.modules import free_module, ideal_module, present
from connobs.obstructions import (
    Connection,
    Derivation,
    InternalInconsistency,
    atiyah_class,
    curvature,
    der,
    full_report,
    jacobian_matrix,
    ks_class,
    ks_kernel,
    lclass,
    lie_bracket,
    verify_connection,
)
from oracles import brute_force_membership


@pytest.fixture(scope="module")
def qx():
    return quotient_ring("x", order="dp")


@pytest.fixture(scope="module")
def qxy():
    return quotient_ring("x,y", order="dp")


@pytest.fixture(scope="module")
def a1():
    return quotient_ring("x,y", ideal=["x^2+y^2"], order="dp")


@pytest.fixture(scope="module")
def curve345():
    return quotient_ring("x,y,z", ideal=["x*z-y^2", "x^2*y-z^2", "x^3-y*z"],
                         order="dp")


@pytest.fixture(scope="module")
def residue_field(qx):
    return present(qx, PolyMatrix.from_rows(qx, [["x"]]))


@pytest.fixture(scope="module")
def a1_module(a1):
    return present(a1, PolyMatrix.from_rows(a1, [["x", "y"], ["y", "-x"]]))


@pytest.fixture(scope="module")
def curve_p(curve345):
    return ideal_module(curve345, ["x", "y"])


class TestDer:
    def test_smooth_plane(self, qxy):
        dm = der(qxy)
        sub = dm.as_submodule()
        full = Submodule(qxy, 2, [FreeModuleElem.unit(qxy, 2, 0),
                                  FreeModuleElem.unit(qxy, 2, 1)])
        assert submodule_equal(sub, full)

    def test_circle(self, a1):
        dm = der(a1)
        expected = Submodule(a1, 2, [
            FreeModuleElem(a1, [a1.poly("y"), a1.poly("-x")]),
            FreeModuleElem(a1, [a1.poly("x"), a1.poly("y")]),
        ])
        assert submodule_equal(dm.as_submodule(), expected)

    def test_curve_contains_euler(self, curve345):
        dm = der(curve345)
        euler = Derivation(curve345, ["3x", "4y", "5z"])
        assert dm.contains(euler)

    def test_derivation_invariant_enforced(self, a1):
        with pytest.raises(ValueError):
            Derivation(a1, ["1", "0"])  # d/dx does not preserve the circle


class TestAtiyahClass:
    def test_free_module_vanishes(self, a1):
        assert atiyah_class(free_module(a1, 2)).vanishes

    def test_residue_field_obstructed(self, residue_field, qx):
        res = atiyah_class(residue_field)
        assert not res.vanishes
        assert res.certificate is not None
        # brute force the one-dimensional membership problem: the
        # universal derivative (1) of the presentation (x) is not in
        # x*Hom + Hom*x in low degree
        target = [qx.one()]
        gens = [[qx.poly("x")]]
        assert not brute_force_membership(qx, 1, target, gens, 3)

    def test_monomial_curve_p_obstructed(self, curve_p):
        assert not atiyah_class(curve_p).vanishes  # table row: AClass = 1

    def test_alternate_differentials_presentation(self, curve_p, curve345):
        from connobs.modules import kaehler_differentials, present

        omega = kaehler_differentials(curve345)
        z = curve345.zero()
        rows = []
        for i in range(omega.rank0):
            pairing = curve345.poly(-1) if i == 0 else z
            rows.append(list(omega.presentation.row(i)) + [pairing])
        rows.append([z] * omega.rank1 + [curve345.one()])
        padded = present(curve345, PolyMatrix.from_rows(curve345, rows))
        assert atiyah_class(curve_p, padded).vanishes == \
            atiyah_class(curve_p).vanishes


class TestKSClass:
    def test_free_module(self, a1):
        d = Derivation(a1, ["y", "-x"])
        assert ks_class(free_module(a1, 2), d).vanishes

    def test_ddx_on_residue_field(self, residue_field, qx):
        res = ks_class(residue_field, Derivation(qx, ["1"]))
        assert not res.vanishes
        # cocycle is the 1x1 matrix (1): not in x*Hom + Hom*x
        assert not brute_force_membership(qx, 1, [qx.one()], [[qx.poly("x")]], 3)

    def test_euler_on_residue_field(self, residue_field, qx):
        res = ks_class(residue_field, Derivation(qx, ["x"]))
        assert res.vanishes
        p, q = res.witness.p_matrix, res.witness.q_matrix
        # (D(a_ij)) = (x) = d0*Q - P*d0 with d0 = (x)
        d0 = residue_field.presentation
        cocycle = PolyMatrix.from_rows(qx, [["x"]])
        assert ((d0 * q - p * d0) - cocycle).is_zero_mod_ideal()

    def test_witness_identity_and_descent(self, a1_module, a1):
        v, _ = ks_kernel(a1_module)
        d0 = a1_module.presentation
        span = a1_module.relation_span()
        for dgen in v.generators:
            res = ks_class(a1_module, dgen)
            assert res.vanishes
            p, q = res.witness.p_matrix, res.witness.q_matrix
            cocycle = PolyMatrix(
                a1, 2, 2,
                [dgen.apply(d0.entry(i, j)) for i in range(2) for j in range(2)],
            )
            assert ((d0 * q - p * d0) - cocycle).is_zero_mod_ideal()
            for j in range(d0.cols):
                col = d0.column(j)
                moved = FreeModuleElem(
                    a1, [dgen.apply(c) for c in col.components]
                ) + p.apply(col)
                assert span.normal_form(moved).is_zero


class TestKSKernel:
    def test_free_module(self, a1):
        v, proper = ks_kernel(free_module(a1, 1))
        assert not proper
        assert submodule_equal(v.as_submodule(), der(a1).as_submodule())

    def test_residue_field(self, residue_field, qx):
        v, proper = ks_kernel(residue_field)
        assert proper
        expected = Submodule(qx, 1, [FreeModuleElem(qx, [qx.poly("x")])])
        assert submodule_equal(v.as_submodule(), expected)

    def test_monomial_curve_p_not_proper(self, curve_p):
        _, proper = ks_kernel(curve_p)
        assert not proper  # table row: KSKernel = 0

    def test_generators_have_vanishing_class(self, curve_p):
        v, _ = ks_kernel(curve_p)
        for dgen in v.generators:
            assert ks_class(curve_p, dgen).vanishes

    def test_nonmembers_obstructed(self, residue_field, qx):
        # V(M) = (x) d/dx is proper; combinations outside must not vanish
        v, proper = ks_kernel(residue_field)
        assert proper
        vsub = v.as_submodule()
        dm = der(qx)
        samples = 0
        for a in (1, 2, -1, 3, 5):
            cand = dm.generators[0].scale(qx.poly(a))
            if vsub.contains(cand.as_elem()):
                continue
            samples += 1
            assert not ks_class(residue_field, cand).vanishes
        assert samples >= 5


class TestLClass:
    def test_free_module(self, a1):
        res, conn = lclass(free_module(a1, 2))
        assert res.vanishes
        assert conn is not None
        assert verify_connection(conn)

    def test_monomial_curve_p_obstructed(self, curve_p):
        res, conn = lclass(curve_p)
        assert not res.vanishes  # table row: LClass = 1
        assert conn is None
        assert res.certificate is not None

    def test_a1_module_admits_connection(self, a1_module):
        res, conn = lclass(a1_module)
        assert res.vanishes
        ok, failures = verify_connection(conn, detailed=True)
        assert ok, failures

    def test_torsion_module_on_line(self, residue_field):
        res, conn = lclass(residue_field)
        assert res.vanishes
        assert verify_connection(conn)


class TestVerifyConnection:
    def test_corruption_detected(self, a1_module, a1):
        res, conn = lclass(a1_module)
        assert res.vanishes
        bad_ops = [op + PolyMatrix.identity(a1, 2) for op in conn.operators]
        corrupted = Connection(a1_module, conn.vfield_gens, bad_ops)
        ok, failures = verify_connection(corrupted, detailed=True)
        assert not ok
        assert failures

    def test_corrupted_cubic_cone_operator(self):
        from connobs.fixtures import cubic_cone_mf, mf_to_module

        m3 = mf_to_module(cubic_cone_mf())
        res, conn = lclass(m3)
        assert res.vanishes
        assert verify_connection(conn)
        bad_ops = list(conn.operators)
        bad_ops[0] = bad_ops[0] + PolyMatrix.identity(m3.ring, m3.rank0)
        corrupted = Connection(m3, conn.vfield_gens, bad_ops)
        ok, failures = verify_connection(corrupted, detailed=True)
        assert not ok and failures


class TestLieBracket:
    def test_commuting_partials(self, qxy):
        dx = Derivation(qxy, ["1", "0"])
        dy = Derivation(qxy, ["0", "1"])
        assert lie_bracket(dx, dy).is_zero

    def test_classical(self, qxy):
        xdx = Derivation(qxy, ["x", "0"])
        dx = Derivation(qxy, ["1", "0"])
        b = lie_bracket(xdx, dx)
        assert [str(c) for c in b.coeffs] == ["-1", "0"]

    def test_euler_weights(self, curve345):
        # weighted-homogeneous D of weight w satisfies [E, D] = w D
        euler = Derivation(curve345, ["3x", "4y", "5z"])
        d = Derivation(curve345, ["3*y*z", "4*z^2", "5*x^2*z"])  # weight 6
        b = lie_bracket(euler, d)
        expected = d.scale(curve345.poly(6))
        assert all((u - v).is_zero for u, v in zip(b.coeffs, expected.coeffs))

    def test_algebroid_closure(self, a1_module):
        v, _ = ks_kernel(a1_module)
        vsub = v.as_submodule()
        for d1 in v.generators:
            for d2 in v.generators:
                assert vsub.contains(lie_bracket(d1, d2).as_elem())


class TestCurvature:
    def test_flat_on_free(self, a1):
        res, conn = lclass(free_module(a1, 1))
        hom = curvature(conn, 0, 1)
        assert hom.is_zero()

    def test_antisymmetry_diagonal(self, a1_module):
        _, conn = lclass(a1_module)
        hom = curvature(conn, 0, 0)
        assert hom.is_zero()

    def test_verified_endomorphism(self, a1_module):
        _, conn = lclass(a1_module)
        if len(conn.vfield_gens.generators) >= 2:
            hom = curvature(conn, 0, 1)  # well-definedness checked inside
            assert hom.matrix.rows == a1_module.rank0

    def test_cubic_cone_curvature_computed(self):
        # computed and well-definedness-verified; integrability is not
        # asserted either way
        from connobs.fixtures import cubic_cone_mf, mf_to_module

        m3 = mf_to_module(cubic_cone_mf())
        _, conn = lclass(m3)
        assert len(conn.vfield_gens.generators) >= 2
        hom = curvature(conn, 0, 1)
        assert hom.matrix.rows == m3.rank0


class TestFullReport:
    def test_free(self, a1):
        rep = full_report(free_module(a1, 1), "free")
        assert rep.triple() == (0, 0, 0)
        assert rep.connection_verified

    def test_monomial_curve_p(self, curve_p):
        rep = full_report(curve_p, "p")
        assert rep.triple() == (1, 0, 1)
        assert set(rep.timings_ms) >= {"aclass", "kskernel", "lclass"}

    def test_stage_subset(self, curve_p):
        rep = full_report(curve_p, "p", stages=("aclass",))
        assert rep.triple() == (1, None, None)

    def test_padding_leaves_verdicts(self, qx, residue_field):
        # duplicate the generator and add the matching relation column
        padded = present(qx, PolyMatrix.from_rows(
            qx, [["x", "0", "1"], ["0", "x", "-1"]]))
        a = full_report(residue_field, "m")
        b = full_report(padded, "m-padded")
        assert a.triple() == b.triple()

    def test_scale_invariance(self, a1, a1_module):
        scaled = present(a1, PolyMatrix.from_rows(
            a1, [["3*x", "y"], ["3*y", "-x"]]))
        assert full_report(scaled, "s").triple() == \
            full_report(a1_module, "m").triple()
