"""Point transformations and the systems they generate.

A point transformation sends source coordinates to new coordinates in
which candidate equations should become the free particle system.  This
module extracts the coefficient families such a map induces, reduces
the general linearizable form to its cubic normal form, verifies
candidate maps by exact substitution of the chain rule, and transports
metrics back along a map.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from itertools import product
from typing import Dict, Tuple, Union

from .geometry import Christoffel, Geodesic2Coefficients, Metric
from .kernel import (
    DEFAULT_CONFIG,
    Expr,
    ZeroTestConfig,
    ZeroTestResult,
    as_expr,
    integer,
    is_zero,
    rational,
    var,
)
from .projection import ScalarCubic, SystemCubic2, project
from .report import ConditionReport, combine_zero_results, evaluate_conditions

_COORDS = {2: ("x", "y"), 3: ("x", "y", "z")}
_JET = {2: "yp", 3: "zp"}


class TransformError(ValueError):
    pass


class DegenerateJacobianError(TransformError):
    """The map's Jacobian determinant is canonically zero."""


class TransversalityError(TransformError):
    """The new independent variable is constant along solution curves."""


class SingularSystemError(TransformError):
    """The system cannot be solved for its second derivatives."""


@dataclass(frozen=True)
class Transformation:
    """An invertible change of all coordinates; the first component is
    the new independent variable."""

    components: Tuple[Expr, ...]

    def __post_init__(self):
        if len(self.components) not in (2, 3):
            raise TransformError("expected 2 or 3 components")

    @staticmethod
    def make(*components) -> "Transformation":
        return Transformation(tuple(as_expr(c) for c in components))

    @staticmethod
    def identity(dim: int) -> "Transformation":
        return Transformation(tuple(var(n) for n in _COORDS[dim]))

    @property
    def dim(self) -> int:
        return len(self.components)

    def jacobian(self) -> Tuple[Tuple[Expr, ...], ...]:
        coords = _COORDS[self.dim]
        return tuple(
            tuple(comp.diff(name) for name in coords)
            for comp in self.components
        )

    def jacobian_determinant(self) -> Expr:
        j = self.jacobian()
        if self.dim == 2:
            return j[0][0] * j[1][1] - j[0][1] * j[1][0]
        return (
            j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
            - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
            + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0])
        )


def jacobian_invertibility(
    t: Transformation, config: ZeroTestConfig = DEFAULT_CONFIG
) -> ZeroTestResult:
    return is_zero(t.jacobian_determinant(), config)


@dataclass(frozen=True)
class GeneralScalar:
    """Scalar general linearizable form J y'' + Delta y'^3 + Lam y'^2
    + Om y' + E = 0; five coefficient slots."""

    J: Expr
    Delta: Expr
    Lam: Expr
    Om: Expr
    E: Expr

    @staticmethod
    def make(J=0, Delta=0, Lam=0, Om=0, E=0) -> "GeneralScalar":
        return GeneralScalar(*(as_expr(v) for v in (J, Delta, Lam, Om, E)))

    def as_scalar_cubic(self) -> ScalarCubic:
        if self.J.is_zero_literal():
            raise SingularSystemError("leading coefficient is zero")
        return ScalarCubic(
            E0=self.E / self.J,
            E1=self.Om / self.J,
            E2=self.Lam / self.J,
            E3=self.Delta / self.J,
        )


@dataclass(frozen=True)
class GeneralSystem2:
    """General linearizable pair; 26 independent coefficient slots.

        J2_2 y'' + J2_3 z'' + G2_23 (y'z'' - z'y'') + cubic + lower = 0
        J3_2 y'' + J3_3 z'' + G3_23 (y'z'' - z'y'') + cubic + lower = 0

    The Del slots are the fully symmetrized cubic coefficients, the Lam
    slots the symmetrized quadratic ones; symmetrization never changes
    the equations since the first derivatives enter symmetrically.
    """

    J2_2: Expr
    J2_3: Expr
    J3_2: Expr
    J3_3: Expr
    G2_23: Expr
    G3_23: Expr
    Del2_222: Expr
    Del2_223: Expr
    Del2_233: Expr
    Del2_333: Expr
    Del3_222: Expr
    Del3_223: Expr
    Del3_233: Expr
    Del3_333: Expr
    Lam2_22: Expr
    Lam2_23: Expr
    Lam2_33: Expr
    Lam3_22: Expr
    Lam3_23: Expr
    Lam3_33: Expr
    Om2_2: Expr
    Om2_3: Expr
    Om3_2: Expr
    Om3_3: Expr
    E2: Expr
    E3: Expr

    @staticmethod
    def make(**kwargs) -> "GeneralSystem2":
        names = [f.name for f in dataclasses.fields(GeneralSystem2)]
        unknown = set(kwargs) - set(names)
        if unknown:
            raise TypeError(f"unknown coefficients {sorted(unknown)}")
        return GeneralSystem2(**{n: as_expr(kwargs.get(n, 0)) for n in names})

    def J(self, i: int, j: int) -> Expr:
        return getattr(self, f"J{i}_{j}")

    def G(self, i: int, k: int, j: int) -> Expr:
        if k == j:
            return integer(0)
        field = getattr(self, f"G{i}_23")
        return field if (k, j) == (2, 3) else -field

    def Delta(self, i: int, k: int, l: int, m: int) -> Expr:
        key = "".join(str(v) for v in sorted((k, l, m)))
        return getattr(self, f"Del{i}_{key}")

    def Lam(self, i: int, k: int, l: int) -> Expr:
        key = "".join(str(v) for v in sorted((k, l)))
        return getattr(self, f"Lam{i}_{key}")

    def Om(self, i: int, k: int) -> Expr:
        return getattr(self, f"Om{i}_{k}")

    def E(self, i: int) -> Expr:
        return getattr(self, f"E{i}")

    def residual(self, i: int, yp: Expr, zp: Expr, ypp: Expr, zpp: Expr) -> Expr:
        """Left side of equation i on explicit jet values."""
        first = {2: yp, 3: zp}
        second = {2: ypp, 3: zpp}
        total = self.E(i)
        for j in (2, 3):
            total = total + self.J(i, j) * second[j] + self.Om(i, j) * first[j]
        total = total + self.G(i, 2, 3) * (yp * zpp - zp * ypp)
        for k, l in product((2, 3), repeat=2):
            total = total + self.Lam(i, k, l) * first[k] * first[l]
        for k, l, m in product((2, 3), repeat=3):
            total = total + self.Delta(i, k, l, m) * first[k] * first[l] * first[m]
        return total

    def leading_determinant(self, yp: Expr, zp: Expr) -> Expr:
        """Determinant of the matrix multiplying the second derivatives."""
        m = self._leading_matrix(yp, zp)
        return m[2][2] * m[3][3] - m[2][3] * m[3][2]

    def _leading_matrix(self, yp: Expr, zp: Expr) -> Dict[int, Dict[int, Expr]]:
        return {
            i: {
                2: self.J(i, 2) - self.G(i, 2, 3) * zp,
                3: self.J(i, 3) + self.G(i, 2, 3) * yp,
            }
            for i in (2, 3)
        }

    def solve_second_derivatives(self, yp: Expr, zp: Expr) -> Tuple[Expr, Expr]:
        """Explicit (y'', z'') as functions of position and slope."""
        m = self._leading_matrix(yp, zp)
        det = m[2][2] * m[3][3] - m[2][3] * m[3][2]
        if det.is_zero_literal():
            raise SingularSystemError(
                "leading matrix determinant is canonically zero")
        first = {2: yp, 3: zp}
        lower = {}
        for i in (2, 3):
            total = self.E(i)
            for j in (2, 3):
                total = total + self.Om(i, j) * first[j]
            for k, l in product((2, 3), repeat=2):
                total = total + self.Lam(i, k, l) * first[k] * first[l]
            for k, l, m_ in product((2, 3), repeat=3):
                total = total + self.Delta(i, k, l, m_) * first[k] * first[l] * first[m_]
            lower[i] = total
        ypp = (-lower[2] * m[3][3] + lower[3] * m[2][3]) / det
        zpp = (-lower[3] * m[2][2] + lower[2] * m[3][2]) / det
        return ypp, zpp


def _check_invertible(t: Transformation, config: ZeroTestConfig) -> None:
    det = t.jacobian_determinant()
    if det.is_zero_literal():
        raise DegenerateJacobianError("Jacobian determinant is canonically zero")
    # a sampled UNDECIDED is tolerated; a canonical zero never is
    is_zero(det, config)


def coefficients_from_transformation(
    t: Transformation, config: ZeroTestConfig = DEFAULT_CONFIG
) -> Union[GeneralScalar, GeneralSystem2]:
    """Coefficient families induced by substituting the map into the
    free particle system; the result is linearizable by construction."""
    _check_invertible(t, config)
    coords = _COORDS[t.dim]
    comp = {i + 1: c for i, c in enumerate(t.components)}

    def d(i, a):
        return comp[i].diff(coords[a - 1])

    def d2(i, a, b):
        return comp[i].diff(coords[a - 1]).diff(coords[b - 1])

    if t.dim == 2:
        return GeneralScalar(
            J=d(1, 1) * d(2, 2) - d(1, 2) * d(2, 1),
            Delta=d(1, 2) * d2(2, 2, 2) - d2(1, 2, 2) * d(2, 2),
            Lam=2 * d(1, 2) * d2(2, 1, 2) - 2 * d2(1, 1, 2) * d(2, 2)
            + d(1, 1) * d2(2, 2, 2) - d(2, 1) * d2(1, 2, 2),
            Om=2 * d(1, 1) * d2(2, 1, 2) - 2 * d2(1, 1, 2) * d(2, 1)
            + d(1, 2) * d2(2, 1, 1) - d2(1, 1, 1) * d(2, 2),
            E=d(1, 1) * d2(2, 1, 1) - d2(1, 1, 1) * d(2, 1),
        )

    def delta_raw(i, j, k, l):
        return d(1, l) * d2(i, j, k) - d2(1, j, k) * d(i, l)

    def delta_sym(i, j, k, l):
        return rational(1, 3) * (
            delta_raw(i, j, k, l) + delta_raw(i, j, l, k) + delta_raw(i, k, l, j))

    def lam_raw(i, j, l):
        return (2 * d(1, l) * d2(i, 1, j) - 2 * d2(1, 1, j) * d(i, l)
                + d(1, 1) * d2(i, j, l) - d(i, 1) * d2(1, j, l))

    def lam_sym(i, j, l):
        return rational(1, 2) * (lam_raw(i, j, l) + lam_raw(i, l, j))

    def omega(i, j):
        return (2 * d(1, 1) * d2(i, 1, j) - 2 * d2(1, 1, j) * d(i, 1)
                + d(1, j) * d2(i, 1, 1) - d2(1, 1, 1) * d(i, j))

    values = {}
    for i in (2, 3):
        for j in (2, 3):
            values[f"J{i}_{j}"] = d(1, 1) * d(i, j) - d(1, j) * d(i, 1)
            values[f"Om{i}_{j}"] = omega(i, j)
        values[f"G{i}_23"] = d(1, 2) * d(i, 3) - d(1, 3) * d(i, 2)
        values[f"E{i}"] = d(1, 1) * d2(i, 1, 1) - d2(1, 1, 1) * d(i, 1)
        for key in ("222", "223", "233", "333"):
            j, k, l = (int(c) for c in key)
            values[f"Del{i}_{key}"] = delta_sym(i, j, k, l)
        for key in ("22", "23", "33"):
            j, l = (int(c) for c in key)
            values[f"Lam{i}_{key}"] = lam_sym(i, j, l)
    return GeneralSystem2.make(**values)


def normal_form(
    g: GeneralSystem2, config: ZeroTestConfig = DEFAULT_CONFIG
) -> Tuple[SystemCubic2, ConditionReport]:
    """Divide out the leading matrix and score the reduction.

    The returned coefficients always reproduce the solved second
    derivatives; the report certifies whether the original coefficient
    families are exactly the ones that shared cubic normal form
    generates, record by record.  A FAIL means the pair is not
    expressible with a single shared cubic coefficient matrix.
    """
    det = g.J(2, 2) * g.J(3, 3) - g.J(2, 3) * g.J(3, 2)
    if det.is_zero_literal():
        raise DegenerateJacobianError("leading Jacobian block is singular")
    inv = {
        2: {2: g.J(3, 3) / det, 3: -g.J(2, 3) / det},
        3: {2: -g.J(3, 2) / det, 3: g.J(2, 2) / det},
    }

    def apply_inv(rhs):
        return {j: inv[j][2] * rhs[2] + inv[j][3] * rhs[3] for j in (2, 3)}

    d_slot = apply_inv({i: g.E(i) for i in (2, 3)})
    c_slot = {}
    for k in (2, 3):
        rhs = {i: g.Om(i, k) - sum_g_d(g, i, k, d_slot) for i in (2, 3)}
        col = apply_inv(rhs)
        for j in (2, 3):
            c_slot[(j, k)] = col[j]
    b_slot = {}
    for k, l in ((2, 2), (2, 3), (3, 3)):
        rhs = {
            i: g.Lam(i, k, l) - rational(1, 2) * (
                sum_g_c(g, i, l, c_slot, k) + sum_g_c(g, i, k, c_slot, l))
            for i in (2, 3)
        }
        col = apply_inv(rhs)
        for j in (2, 3):
            b_slot[(j, k, l)] = col[j]
            b_slot[(j, l, k)] = col[j]

    def p_component(i, k, l, m):
        sym_gb = rational(1, 3) * (
            sum_g_b(g, i, m, b_slot, k, l)
            + sum_g_b(g, i, k, b_slot, l, m)
            + sum_g_b(g, i, l, b_slot, m, k))
        return 3 * g.Delta(i, k, l, m) - 3 * sym_gb

    q222 = apply_inv({i: p_component(i, 2, 2, 2) for i in (2, 3)})
    q223 = apply_inv({i: p_component(i, 2, 2, 3) for i in (2, 3)})
    q333 = apply_inv({i: p_component(i, 3, 3, 3) for i in (2, 3)})
    a_slot = {
        (2, 2): q222[2] / 3,
        (2, 3): q223[2] / 2,
        (3, 3): q333[3] / 3,
    }
    a_slot[(3, 2)] = a_slot[(2, 3)]

    cubic = SystemCubic2.make(
        A22=a_slot[(2, 2)], A23=a_slot[(2, 3)], A33=a_slot[(3, 3)],
        B2_22=b_slot[(2, 2, 2)], B2_23=b_slot[(2, 2, 3)], B2_33=b_slot[(2, 3, 3)],
        B3_22=b_slot[(3, 2, 2)], B3_23=b_slot[(3, 2, 3)], B3_33=b_slot[(3, 3, 3)],
        C2_2=c_slot[(2, 2)], C2_3=c_slot[(2, 3)],
        C3_2=c_slot[(3, 2)], C3_3=c_slot[(3, 3)],
        D2=d_slot[2], D3=d_slot[3],
    )

    labelled = []
    for i, k, l, m in product((2, 3), (2, 3), (2, 3), (2, 3)):
        res = (g.Delta(i, k, l, m) - g.J(i, k) * a_slot[(l, m)]
               - sum_g_b(g, i, m, b_slot, k, l))
        labelled.append((f"Eqr57.Del{i}_{k}{l}{m}", res))
    for i, k, l in product((2, 3), (2, 3), (2, 3)):
        res = (g.Lam(i, k, l)
               - (g.J(i, 2) * b_slot[(2, k, l)] + g.J(i, 3) * b_slot[(3, k, l)])
               - sum_g_c(g, i, l, c_slot, k))
        labelled.append((f"Eqr55.Lam{i}_{k}{l}", res))
    for i, k in product((2, 3), (2, 3)):
        res = (g.Om(i, k)
               - (g.J(i, 2) * c_slot[(2, k)] + g.J(i, 3) * c_slot[(3, k)])
               - sum_g_d(g, i, k, d_slot))
        labelled.append((f"Eqr55.Om{i}_{k}", res))
    for i in (2, 3):
        res = g.E(i) - (g.J(i, 2) * d_slot[2] + g.J(i, 3) * d_slot[3])
        labelled.append((f"Eqr55.E{i}", res))

    report = evaluate_conditions(
        "general-2 reduction", labelled, config,
        facts=(("det J", str(det)),))
    return cubic, report


def sum_g_d(g: GeneralSystem2, i: int, k: int, d_slot) -> Expr:
    return g.G(i, k, 2) * d_slot[2] + g.G(i, k, 3) * d_slot[3]


def sum_g_c(g: GeneralSystem2, i: int, l: int, c_slot, k: int) -> Expr:
    return g.G(i, l, 2) * c_slot[(2, k)] + g.G(i, l, 3) * c_slot[(3, k)]


def sum_g_b(g: GeneralSystem2, i: int, m: int, b_slot, k: int, l: int) -> Expr:
    return g.G(i, m, 2) * b_slot[(2, k, l)] + g.G(i, m, 3) * b_slot[(3, k, l)]


def _guard_jet_names(t: Transformation, exprs) -> None:
    reserved = {"yp", "zp"}
    for e in list(t.components) + list(exprs):
        clash = reserved & set(e.variables())
        if clash:
            raise TransformError(
                f"names {sorted(clash)} are reserved for derivative symbols")


def _scalar_second_derivative(cubic: ScalarCubic, yp: Expr) -> Expr:
    return -(cubic.E3 * yp ** 3 + cubic.E2 * yp ** 2 + cubic.E1 * yp + cubic.E0)


def _cubic2_second_derivatives(s: SystemCubic2, yp: Expr, zp: Expr):
    shared = s.A22 * yp ** 2 + 2 * s.A23 * yp * zp + s.A33 * zp ** 2
    ypp = -(shared * yp
            + s.B2_22 * yp ** 2 + 2 * s.B2_23 * yp * zp + s.B2_33 * zp ** 2
            + s.C2_2 * yp + s.C2_3 * zp + s.D2)
    zpp = -(shared * zp
            + s.B3_22 * yp ** 2 + 2 * s.B3_23 * yp * zp + s.B3_33 * zp ** 2
            + s.C3_2 * yp + s.C3_3 * zp + s.D3)
    return ypp, zpp


def linearization_residuals(system, t: Transformation):
    """Labelled residuals of the straightening test, one per dependent
    variable: the second derivative of each transformed coordinate with
    respect to the new independent variable, with the system's second
    derivatives substituted in.  All identically zero exactly when the
    map sends solutions to straight lines.
    """
    from .criteria import Linear2, Quadratic2

    if isinstance(system, Geodesic2Coefficients):
        system = project(system.as_christoffel())
    elif isinstance(system, Christoffel):
        system = project(system)
    if isinstance(system, (Quadratic2, Linear2)):
        system = system.as_cubic()

    if isinstance(system, ScalarCubic):
        if t.dim != 2:
            raise TransformError("scalar equation needs a 2-component map")
        _guard_jet_names(t, [system.E0, system.E1, system.E2, system.E3])
        yp = var("yp")
        d1 = [c.diff("x") + yp * c.diff("y") for c in t.components]
        if d1[0].is_zero_literal():
            raise TransversalityError(
                "new independent variable is constant along solutions")
        s = d1[1] / d1[0]
        ypp = _scalar_second_derivative(system, yp)
        residual = (s.diff("x") + yp * s.diff("y") + ypp * s.diff("yp")) / d1[0]
        return [("Eqr4.2", residual)]

    if isinstance(system, SystemCubic2):
        if t.dim != 3:
            raise TransformError("a pair of equations needs a 3-component map")
        coeffs = [getattr(system, f.name) for f in dataclasses.fields(system)]
        _guard_jet_names(t, coeffs)
        yp, zp = var("yp"), var("zp")
        ypp, zpp = _cubic2_second_derivatives(system, yp, zp)
    elif isinstance(system, GeneralSystem2):
        if t.dim != 3:
            raise TransformError("a pair of equations needs a 3-component map")
        coeffs = [getattr(system, f.name) for f in dataclasses.fields(system)]
        _guard_jet_names(t, coeffs)
        yp, zp = var("yp"), var("zp")
        ypp, zpp = system.solve_second_derivatives(yp, zp)
    else:
        raise TransformError(f"unsupported system type {type(system).__name__}")

    d1 = [c.diff("x") + yp * c.diff("y") + zp * c.diff("z")
          for c in t.components]
    if d1[0].is_zero_literal():
        raise TransversalityError(
            "new independent variable is constant along solutions")
    labelled = []
    for i in (1, 2):
        s = d1[i] / d1[0]
        residual = (
            s.diff("x") + yp * s.diff("y") + zp * s.diff("z")
            + ypp * s.diff("yp") + zpp * s.diff("zp")
        ) / d1[0]
        labelled.append((f"Eqr4.{i + 1}", residual))
    return labelled


def verify_linearizing_transformation(
    system, t: Transformation, config: ZeroTestConfig = DEFAULT_CONFIG
) -> ZeroTestResult:
    """Check by substitution that the map straightens every solution.

    Builds the transformed first derivatives with fresh slope symbols,
    differentiates once more along solutions (eliminating second
    derivatives through the system), and zero-tests the result.  ZERO
    certifies the map sends solutions to straight lines.
    """
    labelled = linearization_residuals(system, t)
    results = [is_zero(residual, config) for _, residual in labelled]
    return combine_zero_results(results, [label for label, _ in labelled])


def pullback_metric(t: Transformation, target: Metric) -> Metric:
    """Transport a metric on the image coordinates back along the map."""
    if target.dim != t.dim:
        raise TransformError("map and metric dimensions differ")
    coords = _COORDS[t.dim]
    compose = {name: comp for name, comp in zip(coords, t.components)}
    jac = t.jacobian()
    n = t.dim
    entries = {}
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            total = integer(0)
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    gij = target.g(i, j).substitute(compose)
                    total = total + jac[i - 1][a - 1] * jac[j - 1][b - 1] * gij
            entries[(a, b)] = total
    return Metric.from_components(n, entries)
