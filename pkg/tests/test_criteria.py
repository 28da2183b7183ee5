import random

import pytest

from geolin.criteria import (
    CoefficientDomainError,
    Linear2,
    Quadratic2,
    _remark_differences,
    appendix_residuals,
    check_cubic2,
    check_linear2,
    check_quadratic2,
    cubic2_residuals,
    lie_gauge_residuals,
    remark_mapping,
    tresse_residuals,
    tresse_scalar,
)
from geolin.kernel import integer, parse, rational, var
from geolin.projection import (
    ScalarCubic,
    ScalarGauge,
    SystemCubic2,
    SystemGauge,
    swap_scalar_axes,
)
from geolin.report import FAIL, PASS

from helpers import random_polynomial


def generic_function(prefix, names=("y", "z")):
    """Degree-2 polynomial whose six coefficients are free symbols, so
    value and all derivatives up to second order are independent."""
    u, v = (var(n) for n in names)
    monomials = [integer(1), u, v, u * u, u * v, v * v]
    total = integer(0)
    for k, m in enumerate(monomials):
        total = total + var(f"{prefix}{k}") * m
    return total


FLAT_CUBIC = ScalarCubic.make(E1=-1, E3=1)            # y'' + y'^3 - y' = 0
DAMPED_CUBIC = ScalarCubic.make(E0="y^3", E1="3*y")   # y'' + 3yy' + y^3 = 0
PAINLEVE_LIKE = ScalarCubic.make(E0="-y^2")           # y'' = y^2

SIMPLE_PAIR = SystemCubic2.make(B2_22=1, B3_33=1, C2_2=-1, C3_3=-1)
WORKED_PAIR = SystemCubic2.make(
    A22="x/y + x/y^2", B2_22=1, C2_2="1/x", B3_23=1, B3_33=1, C3_3="1/x")
FORCED_PAIR = SystemCubic2.make(D2="z", D3="z")
WITNESS_GAUGE = SystemGauge.make(G3_33=1)


class TestTresse:
    def test_flat_example_passes(self):
        report = tresse_scalar(FLAT_CUBIC)
        assert report.overall == PASS
        assert all(r.residual.is_zero_literal() for r in report.records)

    def test_damped_example_passes(self):
        report = tresse_scalar(DAMPED_CUBIC)
        assert report.overall == PASS
        assert all(r.residual.is_zero_literal() for r in report.records)

    def test_negative_control(self):
        report = tresse_scalar(PAINLEVE_LIKE)
        assert report.overall == FAIL
        assert report.record("Eq3.1").residual.is_zero_literal()
        assert report.record("Eq3.2").residual == integer(6)

    def test_interchange_symmetry(self):
        # trading the two coordinates swaps the two residuals up to sign
        cubic = ScalarCubic(
            E0=generic_function("p", ("x", "y")),
            E1=generic_function("q", ("x", "y")),
            E2=generic_function("r", ("x", "y")),
            E3=generic_function("s", ("x", "y")),
        )
        rename = {"x": var("y"), "y": var("x")}
        t1, t2 = (res for _, res in tresse_residuals(cubic))
        s1, s2 = (res for _, res in tresse_residuals(swap_scalar_axes(cubic)))
        assert (s1 + t2.substitute(rename)).is_zero_literal()
        assert (s2 + t1.substitute(rename)).is_zero_literal()


class TestLieGauge:
    def test_flat_example_witness(self):
        report = lie_gauge_residuals(FLAT_CUBIC, ScalarGauge.make(b=0, e=1))
        assert report.overall == PASS
        assert all(r.residual.is_zero_literal() for r in report.records)

    def test_damped_example_witness(self):
        gauge = ScalarGauge.make(b="1/y", e="-y")
        report = lie_gauge_residuals(DAMPED_CUBIC, gauge)
        assert report.overall == PASS

    def test_wrong_gauge_fails(self):
        report = lie_gauge_residuals(FLAT_CUBIC)
        assert report.overall == FAIL
        assert report.record("Eq9.2").residual == integer(-1)


class TestCubicPair:
    def test_worked_pair_passes(self):
        report = check_cubic2(WORKED_PAIR)
        assert report.overall == PASS
        assert len(report.records) == 15
        assert [r.condition_id for r in report.records] == [
            f"Eq51.{k}" for k in range(1, 16)]
        assert all(r.residual.is_zero_literal() for r in report.records)

    def test_simple_pair_passes(self):
        assert check_cubic2(SIMPLE_PAIR).overall == PASS

    def test_forced_pair_fails(self):
        report = check_cubic2(FORCED_PAIR)
        assert report.overall == FAIL
        assert report.record("Eq51.4").residual == integer(-1)
        assert report.record("Eq51.12").residual == integer(-1)

    def test_zero_system_passes(self):
        assert check_cubic2(SystemCubic2.make()).overall == PASS


class TestQuadraticPair:
    def test_constant_pair_passes(self):
        q = Quadratic2.make(B2_22=1, B3_33=1)
        assert check_quadratic2(q).overall == PASS

    def test_zero_passes(self):
        assert check_quadratic2(Quadratic2.make()).overall == PASS

    def test_negative_control(self):
        report = check_quadratic2(Quadratic2.make(B3_22="z"))
        assert report.overall == FAIL
        assert report.record("Eq53.1").residual == integer(-1)

    def test_rejects_x_dependence(self):
        with pytest.raises(CoefficientDomainError):
            Quadratic2.make(B2_22="x")


class TestLinearPair:
    def test_isotropic_forcing_passes(self):
        l = Linear2.make(D2="exp(x)*y", D3="exp(x)*z")
        report = check_linear2(l)
        assert report.overall == PASS

    def test_anisotropic_forcing_fails(self):
        l = Linear2.make(D2="w1*y", D3="w2*z")
        report = check_linear2(l)
        assert report.overall == FAIL
        assert report.record("Eq55.3").residual == parse("w2 - w1")

    def test_shear_forcing_fails(self):
        l = Linear2.make(D2="z", D3="z")
        report = check_linear2(l)
        assert report.overall == FAIL
        assert report.record("Eq55.2").residual == integer(1)
        assert report.record("Eq55.3").residual == integer(1)

    def test_rejects_nonconstant_velocity_terms(self):
        with pytest.raises(CoefficientDomainError):
            Linear2.make(C2_2="y")


class TestAppendix:
    def test_zero_system_zero_gauge(self):
        report = appendix_residuals(SystemCubic2.make())
        assert report.overall == PASS
        assert len(report.records) == 33

    def test_simple_pair_with_witness_gauge(self):
        report = appendix_residuals(SIMPLE_PAIR, WITNESS_GAUGE)
        assert report.overall == PASS
        assert all(r.residual.is_zero_literal() for r in report.records)

    def test_simple_pair_zero_gauge_is_not_a_witness(self):
        # the pair is linearizable, but the zero gauge does not embed it
        # in a flat connection; the defining equations notice
        report = appendix_residuals(SIMPLE_PAIR)
        assert report.overall == FAIL
        assert report.record("EqA2.9").residual == rational(1, 2)

    def test_worked_pair_with_witness_gauge(self):
        report = appendix_residuals(WORKED_PAIR, WITNESS_GAUGE)
        assert report.overall == PASS

    def test_forced_pair_fails_gauge_free_line(self):
        report = appendix_residuals(FORCED_PAIR)
        assert report.overall == FAIL
        assert report.record("EqA2.5").residual == integer(-1)

    def test_pairwise_records_are_gauge_independent(self):
        rng = random.Random(21)
        fields = ("A22", "A23", "A33", "B2_22", "B2_23", "B2_33", "B3_22",
                  "B3_23", "B3_33", "C2_2", "C2_3", "C3_2", "C3_3", "D2", "D3")
        system = SystemCubic2.make(**{
            name: random_polynomial(rng, names=("x", "y", "z"), terms=2)
            for name in fields})
        pair_ids = [f"Eq{a}-{b}" for a, b in (
            ("A1.6", "A2.1"), ("A1.3", "A3.1"), ("A2.2", "A3.2"),
            ("A1.4", "A2.3"), ("A1.9", "A2.7"), ("A1.9", "A2.8"),
            ("A2.7", "A2.8"), ("A1.8", "A3.3"), ("A2.9", "A3.4"))]
        reports = []
        for _ in range(2):
            gauge = SystemGauge(
                G1_12=random_polynomial(rng, names=("x", "y", "z")),
                G2_12=random_polynomial(rng, names=("x", "y", "z")),
                G3_33=random_polynomial(rng, names=("x", "y", "z")),
            )
            reports.append(appendix_residuals(system, gauge))
        for pid in pair_ids:
            assert reports[0].record(pid).residual == reports[1].record(pid).residual

    def test_transcription_gap_is_surfaced(self):
        s = SystemCubic2.make(D2="x", B3_23="y")
        report = appendix_residuals(s)
        assert report.fact("gap Eq51.12 vs EqA1.4-A2.3") == str(parse("x*y"))
        # and on systems without forcing the gap is absent
        clean = appendix_residuals(SIMPLE_PAIR, WITNESS_GAUGE)
        assert clean.fact("gap Eq51.12 vs EqA1.4-A2.3") == "0"


class TestRemark:
    def test_symbolic_identity(self):
        q = Quadratic2(
            B2_22=generic_function("a"), B2_23=generic_function("b"),
            B2_33=generic_function("c"), B3_22=generic_function("d"),
            B3_23=generic_function("e"), B3_33=generic_function("f"),
        )
        report = remark_mapping(q)
        assert report.overall == PASS
        assert all(r.residual.is_zero_literal() for r in report.records)

    def test_zero_case(self):
        assert remark_mapping(Quadratic2.make()).overall == PASS

    def test_perturbed_mapping_is_rejected(self):
        q = Quadratic2(
            B2_22=generic_function("a"), B2_23=generic_function("b"),
            B2_33=generic_function("c"), B3_22=generic_function("d"),
            B3_23=generic_function("e"), B3_33=generic_function("f"),
        )
        flipped = _remark_differences(q, flip=True)
        assert any(not res.is_zero_literal() for _, res in flipped)


class TestEmbeddings:
    def test_quadratic_embedding_agrees(self):
        q = Quadratic2.make(B2_22="y", B3_23="z^2")
        embedded = cubic2_residuals(q.as_cubic())
        direct = {cid: res for cid, res in quadratic_ids_to_cubic(q)}
        for cid, res in embedded:
            if cid in direct:
                assert res == direct[cid]

    def test_linear_embedding_check(self):
        l = Linear2.make(D2="z", D3="z")
        report = check_cubic2(l.as_cubic())
        assert report.overall == FAIL
        assert report.record("Eq51.4").residual == integer(-1)

    def test_quadratic_embedding_check(self):
        q = Quadratic2.make(B2_22=1, B3_33=1)
        assert check_cubic2(q.as_cubic()).overall == PASS


def quadratic_ids_to_cubic(q):
    """The four quadratic conditions appear verbatim among the fifteen
    cubic ones when every A, C, D slot is zero."""
    mapping = {"Eq53.1": "Eq51.11", "Eq53.2": "Eq51.13",
               "Eq53.3": "Eq51.8", "Eq53.4": "Eq51.9"}
    from geolin.criteria import quadratic2_residuals

    return [(mapping[cid], res) for cid, res in quadratic2_residuals(q)]
