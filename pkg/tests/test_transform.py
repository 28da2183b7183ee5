import dataclasses
import random

import pytest

from geolin.criteria import Linear2, Quadratic2, check_cubic2, tresse_scalar
from geolin.geometry import Geodesic2Coefficients, Metric
from geolin.kernel import exp, integer, ln, parse, rational, sqrt, var
from geolin.report import PASS
from geolin.projection import ScalarCubic, SystemCubic2, SystemGauge, lift_system
from geolin.transform import (
    DegenerateJacobianError,
    GeneralScalar,
    GeneralSystem2,
    SingularSystemError,
    Transformation,
    TransformError,
    TransversalityError,
    coefficients_from_transformation,
    jacobian_invertibility,
    normal_form,
    pullback_metric,
    verify_linearizing_transformation,
)

from helpers import random_polynomial

X, Y, Z = var("x"), var("y"), var("z")

# u = e^x, v = e^y, w = e^z straightens y'' - y' + y'^2 = z'' - z' + z'^2 = 0
EXP_MAP = Transformation.make(exp(X), exp(Y), exp(Z))
SIMPLE_PAIR = SystemCubic2.make(B2_22=1, B3_33=1, C2_2=-1, C3_3=-1)

# u = ln(xy), v = e^y, w = e^(y+z) straightens the worked variable pair
LOG_MAP = Transformation.make(ln(X * Y), exp(Y), exp(Y + Z))
WORKED_PAIR = SystemCubic2.make(
    A22="x/y + x/y^2", B2_22=1, C2_2="1/x",
    B3_23=1, B3_33=1, C3_3="1/x",
)

# u = x e^(yz), v = x y^2 z^2, w = y generates the irreducible-looking pair
TANGLED_MAP = Transformation.make(X * exp(Y * Z), X * Y ** 2 * Z ** 2, Y)

SCALAR_FLAT = ScalarCubic.make(E1=-1, E3=1)
SCALAR_FLAT_MAP = Transformation.make(
    sqrt(rational(1, 2)) * exp(Y - X),
    sqrt(rational(1, 2)) * exp(-X - Y),
)
SCALAR_DAMPED = ScalarCubic.make(E0="y^3", E1="3*y")
SCALAR_DAMPED_MAP = Transformation.make(
    parse("x - 1/y"), parse("x^2/2 - x/y"))

FORCED_PAIR = SystemCubic2.make(D2="z", D3="z")

TANGLED_FAMILIES = {
    "J2_2": "x*y*z^2*exp(y*z)*(2 - y*z)",
    "J2_3": "x*y^2*z*exp(y*z)*(2 - y*z)",
    "J3_2": "exp(y*z)",
    "J3_3": "0",
    "G2_23": "0",
    "G3_23": "-x*y*exp(y*z)",
    "Del2_222": "2*x^2*z^3*exp(y*z)*(1 - y*z)",
    "Del2_223": "2*x^2*y*z^2*exp(y*z)*(1 - y*z)",
    "Del2_233": "2*x^2*y^2*z*exp(y*z)*(1 - y*z)",
    "Del2_333": "2*x^2*y^3*exp(y*z)*(1 - y*z)",
    "Del3_222": "-x*z^2*exp(y*z)",
    "Del3_223": "-(2/3)*x*(1 + y*z)*exp(y*z)",
    "Del3_233": "-(1/3)*x*y^2*exp(y*z)",
    "Del3_333": "0",
    "Lam2_22": "x*z^2*exp(y*z)*(2 - y^2*z^2)",
    "Lam2_23": "x*y*z*exp(y*z)*(4 - y*z - y^2*z^2)",
    "Lam2_33": "x*y^2*exp(y*z)*(2 - y^2*z^2)",
    "Lam3_22": "-2*z*exp(y*z)",
    "Lam3_23": "-y*exp(y*z)",
    "Lam3_33": "0",
    "Om2_2": "2*y*z^2*exp(y*z)*(2 - y*z)",
    "Om2_3": "2*y^2*z*exp(y*z)*(2 - y*z)",
    "Om3_2": "0",
    "Om3_3": "0",
    "E2": "0",
    "E3": "0",
}


def total_derivative(expr, yp, zp, ypp, zpp):
    return (expr.diff("x") + yp * expr.diff("y") + zp * expr.diff("z")
            + ypp * expr.diff("yp") + zpp * expr.diff("zp"))


def random_perturbed_identity(rng, dim=3) -> Transformation:
    names = ("x", "y", "z")[:dim]
    comps = []
    for base in names[:dim]:
        comps.append(var(base) + random_polynomial(rng, names=names, terms=2))
    return Transformation.make(*comps)


class TestTransformation:
    def test_identity(self):
        t = Transformation.identity(3)
        assert t.dim == 3
        assert t.jacobian_determinant() == integer(1)

    def test_component_count_bounds(self):
        with pytest.raises(TransformError):
            Transformation.make(X)
        with pytest.raises(TransformError):
            Transformation.make(X, Y, Z, X)

    def test_jacobian_layout(self):
        t = Transformation.make("x*y", "y^2")
        jac = t.jacobian()
        assert jac[0][0] == Y
        assert jac[0][1] == X
        assert jac[1][0] == integer(0)
        assert jac[1][1] == parse("2*y")

    def test_log_map_determinant_is_invertible(self):
        assert LOG_MAP.jacobian_determinant() == parse("exp(2*y + z)/x")
        assert bool(jacobian_invertibility(LOG_MAP)) is False
        assert jacobian_invertibility(LOG_MAP).verdict.value == "nonzero"

    def test_collapsed_map_determinant_is_zero(self):
        collapsed = Transformation.make(Y, Y, Y)
        assert bool(jacobian_invertibility(collapsed)) is True
        with pytest.raises(DegenerateJacobianError):
            coefficients_from_transformation(collapsed)


class TestGeneralFamilies:
    def test_slot_counts(self):
        assert len(dataclasses.fields(GeneralSystem2)) == 26
        assert len(dataclasses.fields(GeneralScalar)) == 5

    def test_unknown_slot_rejected(self):
        with pytest.raises(TypeError):
            GeneralSystem2.make(J2_4=1)

    def test_index_accessors(self):
        g = GeneralSystem2.make(G2_23="x", Del3_223="y", Lam2_23="z")
        assert g.G(2, 2, 3) == X
        assert g.G(2, 3, 2) == -X
        assert g.G(2, 2, 2).is_zero_literal()
        assert g.Delta(3, 3, 2, 2) == Y
        assert g.Lam(2, 3, 2) == Z

    def test_exponential_map_families(self):
        g = coefficients_from_transformation(EXP_MAP)
        assert g.J2_2 == parse("exp(x + y)")
        assert g.J3_3 == parse("exp(x + z)")
        assert g.Lam2_22 == parse("exp(x + y)")
        assert g.Lam3_33 == parse("exp(x + z)")
        assert g.Om2_2 == parse("-exp(x + y)")
        assert g.Om3_3 == parse("-exp(x + z)")
        zero_names = [f.name for f in dataclasses.fields(GeneralSystem2)
                      if f.name not in ("J2_2", "J3_3", "Lam2_22", "Lam3_33",
                                        "Om2_2", "Om3_3")]
        for name in zero_names:
            assert getattr(g, name).is_zero_literal(), name

    def test_tangled_map_families(self):
        g = coefficients_from_transformation(TANGLED_MAP)
        for name, text in TANGLED_FAMILIES.items():
            assert getattr(g, name) == parse(text), name

    def test_equation_residual_shape(self):
        g = coefficients_from_transformation(EXP_MAP)
        yp, zp = var("yp"), var("zp")
        ypp, zpp = var("ypp"), var("zpp")
        want = parse("exp(x + y)") * (ypp + yp ** 2 - yp)
        assert g.residual(2, yp, zp, ypp, zpp) == want

    def test_expansion_identity_for_tangled_map(self):
        # substituting the map into u'' = w'' = 0 and clearing u' must
        # reproduce exactly the stored coefficient contraction
        self._check_expansion(TANGLED_MAP)

    def test_expansion_identity_for_random_maps(self):
        rng = random.Random(21)
        for _ in range(5):
            self._check_expansion(random_perturbed_identity(rng))

    @staticmethod
    def _check_expansion(t):
        g = coefficients_from_transformation(t)
        yp, zp = var("yp"), var("zp")
        ypp, zpp = var("ypp"), var("zpp")
        first = [c.diff("x") + yp * c.diff("y") + zp * c.diff("z")
                 for c in t.components]
        second = [total_derivative(f, yp, zp, ypp, zpp) for f in first]
        for i in (2, 3):
            direct = second[i - 1] * first[0] - first[i - 1] * second[0]
            assert (direct - g.residual(i, yp, zp, ypp, zpp)).is_zero_literal()

    def test_leading_determinant_factors(self):
        g = coefficients_from_transformation(TANGLED_MAP)
        yp, zp = var("yp"), var("zp")
        det_j = g.J2_2 * g.J3_3 - g.J2_3 * g.J3_2
        want = det_j * (1 + X * Z * yp + X * Y * zp)
        assert g.leading_determinant(yp, zp) == want

    def test_solved_derivatives_at_sample_slopes(self):
        g = coefficients_from_transformation(TANGLED_MAP)
        ypp, zpp = g.solve_second_derivatives(var("yp"), var("zp"))
        at = {"x": 1, "y": 1, "z": 3, "yp": 1, "zp": 1}
        assert ypp.substitute(at) == rational(-64, 3)
        assert zpp.substitute(at) == rational(-206, 3)
        at = {"x": 1, "y": 1, "z": 3, "yp": 1, "zp": 0}
        assert ypp.substitute(at) == integer(-12)
        assert zpp.substitute(at) == integer(-27)

    def test_singular_leading_matrix(self):
        g = GeneralSystem2.make(Om2_2=1, Om3_3=1)
        with pytest.raises(SingularSystemError):
            g.solve_second_derivatives(var("yp"), var("zp"))


class TestGeneralScalar:
    def test_damped_map_regenerates_its_own_equation(self):
        g = coefficients_from_transformation(SCALAR_DAMPED_MAP)
        assert g.J == parse("1/y^3")
        assert g.Delta.is_zero_literal()
        assert g.Lam.is_zero_literal()
        assert g.Om == parse("3/y^2")
        assert g.E == integer(1)
        assert g.as_scalar_cubic() == SCALAR_DAMPED

    def test_scalar_map_output_always_passes_point_test(self):
        rng = random.Random(22)
        for _ in range(5):
            t = random_perturbed_identity(rng, dim=2)
            cubic = coefficients_from_transformation(t).as_scalar_cubic()
            assert tresse_scalar(cubic).overall == PASS

    def test_zero_leading_slot_rejected(self):
        with pytest.raises(SingularSystemError):
            GeneralScalar.make(E=1).as_scalar_cubic()


class TestNormalForm:
    def test_exponential_map_reduces_to_simple_pair(self):
        g = coefficients_from_transformation(EXP_MAP)
        cubic, report = normal_form(g)
        assert cubic == SIMPLE_PAIR
        assert report.overall == PASS
        assert report.fact("det J") == "exp(2*x + y + z)"
        assert len(report.records) == 30

    def test_tangled_map_fails_consistency(self):
        g = coefficients_from_transformation(TANGLED_MAP)
        cubic, report = normal_form(g)
        assert report.overall == "FAIL"
        assert report.record("Eqr55.Lam3_23").residual == parse("-y*exp(y*z)")
        assert report.record("Eqr55.Lam3_32").residual == parse("y*exp(y*z)")
        for i in (2, 3):
            assert report.record(f"Eqr55.E{i}").residual.is_zero_literal()
            for k in (2, 3):
                assert report.record(f"Eqr55.Om{i}_{k}").residual.is_zero_literal()

    def test_tangled_reduction_is_still_exact(self):
        # the printed-shape consistency fails, yet the solved second
        # derivatives agree with the reduced cubic pair everywhere
        g = coefficients_from_transformation(TANGLED_MAP)
        cubic, _ = normal_form(g)
        assert cubic.A22 == parse("2*x*z*(1 - y*z)/(y*(2 - y*z))")
        assert cubic.A23 == parse("2*x*(1 - y*z)/(2 - y*z)")
        assert cubic.A33 == parse("2*x*y*(1 - y*z)/(z*(2 - y*z))")
        assert cubic.B3_22 == parse("z*(2 - y^2*z^2)/(y^2*(2 - y*z))")
        assert cubic.B3_23 == parse("(4 - y*z - y^2*z^2)/(y*(2 - y*z))")
        assert cubic.B3_33 == parse("(2 - y^2*z^2)/(z*(2 - y*z))")
        assert cubic.C3_2 == parse("2*z/(x*y)")
        assert cubic.C3_3 == parse("2/x")
        for name in ("B2_22", "B2_23", "B2_33", "C2_2", "C2_3", "D2", "D3"):
            assert getattr(cubic, name).is_zero_literal(), name
        yp, zp = var("yp"), var("zp")
        got_ypp, got_zpp = g.solve_second_derivatives(yp, zp)
        shared = cubic.A22 * yp ** 2 + 2 * cubic.A23 * yp * zp + cubic.A33 * zp ** 2
        want_ypp = -(shared * yp + cubic.B2_22 * yp ** 2
                     + 2 * cubic.B2_23 * yp * zp + cubic.B2_33 * zp ** 2
                     + cubic.C2_2 * yp + cubic.C2_3 * zp + cubic.D2)
        want_zpp = -(shared * zp + cubic.B3_22 * yp ** 2
                     + 2 * cubic.B3_23 * yp * zp + cubic.B3_33 * zp ** 2
                     + cubic.C3_2 * yp + cubic.C3_3 * zp + cubic.D3)
        assert (got_ypp - want_ypp).is_zero_literal()
        assert (got_zpp - want_zpp).is_zero_literal()

    def test_singular_leading_block_rejected(self):
        g = GeneralSystem2.make(J2_2="y", J2_3="y", J3_2="y", J3_3="y")
        with pytest.raises(DegenerateJacobianError):
            normal_form(g)


class TestVerifyTransformation:
    def test_simple_pair_with_exponential_map(self):
        assert bool(verify_linearizing_transformation(SIMPLE_PAIR, EXP_MAP))

    def test_worked_pair_with_log_map(self):
        assert bool(verify_linearizing_transformation(WORKED_PAIR, LOG_MAP))

    def test_tangled_general_pair_with_its_own_map(self):
        g = coefficients_from_transformation(TANGLED_MAP)
        assert bool(verify_linearizing_transformation(g, TANGLED_MAP))

    def test_scalar_flat_equation(self):
        assert bool(verify_linearizing_transformation(SCALAR_FLAT, SCALAR_FLAT_MAP))

    def test_scalar_damped_equation(self):
        assert bool(verify_linearizing_transformation(SCALAR_DAMPED, SCALAR_DAMPED_MAP))

    def test_forced_pair_identity_is_not_linearizing(self):
        res = verify_linearizing_transformation(
            FORCED_PAIR, Transformation.identity(3))
        assert res.verdict.value == "nonzero"
        assert res.witness is not None

    def test_connection_input_is_projected_first(self):
        lifted = lift_system(SIMPLE_PAIR, SystemGauge.make(G3_33=1))
        assert bool(verify_linearizing_transformation(lifted, EXP_MAP))

    def test_plane_coefficient_input_is_projected_first(self):
        coef = Geodesic2Coefficients.make(a=1, c=1, e=1)
        assert bool(verify_linearizing_transformation(coef, SCALAR_FLAT_MAP))

    def test_restricted_shapes_are_widened(self):
        # e^y straightens y'' + y'^2 = 0
        quad = Quadratic2.make(B2_22=1, B3_33=1)
        t = Transformation.make(X, exp(Y), exp(Z))
        assert bool(verify_linearizing_transformation(quad, t))
        lin = Linear2.make(D2="z", D3="z")
        res = verify_linearizing_transformation(lin, Transformation.identity(3))
        assert res.verdict.value == "nonzero"

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(TransformError):
            verify_linearizing_transformation(SCALAR_FLAT, EXP_MAP)
        with pytest.raises(TransformError):
            verify_linearizing_transformation(
                SIMPLE_PAIR, Transformation.identity(2))

    def test_reserved_slope_names_rejected(self):
        bad = ScalarCubic.make(E0="yp")
        with pytest.raises(TransformError):
            verify_linearizing_transformation(bad, Transformation.identity(2))

    def test_constant_first_component_rejected(self):
        with pytest.raises(TransversalityError):
            verify_linearizing_transformation(
                ScalarCubic.make(), Transformation.make(1, Y))
        with pytest.raises(TransversalityError):
            verify_linearizing_transformation(
                SIMPLE_PAIR, Transformation.make(2, Y, Z))

    def test_random_maps_verify_against_their_own_output(self):
        rng = random.Random(23)
        count = 0
        for _ in range(3):
            t = random_perturbed_identity(rng)
            g = coefficients_from_transformation(t)
            assert bool(verify_linearizing_transformation(g, t))
            cubic, report = normal_form(g)
            if report.overall == PASS:
                count += 1
                assert check_cubic2(cubic).overall == PASS
        assert count >= 0  # the reduced check only applies when consistent


class TestPullbackMetric:
    def test_damped_map_pullback_matches_worked_solution(self):
        got = pullback_metric(SCALAR_DAMPED_MAP, Metric.identity(2))
        want = Metric.plane(
            parse("1 + x^2 - 2*x/y + 1/y^2"),
            parse("(1 + x^2)/y^2 - x/y^3"),
            parse("(1 + x^2)/y^4"),
        )
        assert got == want

    def test_flat_map_pullback(self):
        got = pullback_metric(SCALAR_FLAT_MAP, Metric.identity(2))
        p = parse("1/2*exp(2*y - 2*x) + 1/2*exp(-2*x - 2*y)")
        q = parse("-1/2*exp(2*y - 2*x) + 1/2*exp(-2*x - 2*y)")
        assert got == Metric.plane(p, q, p)

    def test_identity_pullback(self):
        assert pullback_metric(
            Transformation.identity(3), Metric.identity(3)) == Metric.identity(3)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(TransformError):
            pullback_metric(SCALAR_DAMPED_MAP, Metric.identity(3))
