"""Symmetric connections, curvature, and flat-metric machinery in 2D/3D.

Coordinates are fixed: (x, y) in two dimensions, (x, y, z) in three.
Connection components are stored with the symmetric lower index pair
ordered, so a 2D connection has exactly 6 independent entries and a 3D
one has 18.  Second-order geodesic data in 2D also travels as the six
named coefficient functions a..f of

    x'' = a x'^2 + 2b x'y' + c y'^2,    y'' = d x'^2 + 2e x'y' + f y'^2,

related to the connection by a plain sign flip per component.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

from .kernel import (
    DEFAULT_CONFIG,
    Expr,
    Verdict,
    ZeroTestConfig,
    ZeroTestResult,
    as_expr,
    integer,
    is_zero,
    rational,
)
from .report import ConditionReport, evaluate_conditions

COORDS2 = ("x", "y")
COORDS3 = ("x", "y", "z")

# ordered symmetric index pairs (1-based), the storage layout everywhere
SYM_PAIRS = {
    2: ((1, 1), (1, 2), (2, 2)),
    3: ((1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)),
}

_ZERO = integer(0)
_HALF = rational(1, 2)


class GeometryError(Exception):
    pass


class DegenerateMetricError(GeometryError):
    """The metric determinant is canonically zero."""


class UndecidedMetricError(GeometryError):
    """The determinant could not be certified nonzero."""


def coordinates(dim: int) -> Tuple[str, ...]:
    if dim == 2:
        return COORDS2
    if dim == 3:
        return COORDS3
    raise GeometryError(f"unsupported dimension {dim}")


@dataclass(frozen=True)
class Metric:
    """Symmetric metric tensor with exact entries.

    Entries follow SYM_PAIRS[dim]; g(i, j) resolves either index order.
    The 2D aliases p, q, r name g11, g12, g22.
    """

    dim: int
    entries: Tuple[Expr, ...]

    def __post_init__(self):
        pairs = SYM_PAIRS.get(self.dim)
        if pairs is None:
            raise GeometryError(f"unsupported dimension {self.dim}")
        if len(self.entries) != len(pairs):
            raise GeometryError(
                f"{self.dim}D metric needs {len(pairs)} entries, got {len(self.entries)}"
            )

    @staticmethod
    def from_components(dim: int, mapping: Mapping[Tuple[int, int], Expr]) -> "Metric":
        pairs = SYM_PAIRS.get(dim)
        if pairs is None:
            raise GeometryError(f"unsupported dimension {dim}")
        table: Dict[Tuple[int, int], Expr] = {}
        for (i, j), value in mapping.items():
            key = (i, j) if i <= j else (j, i)
            if key not in pairs:
                raise GeometryError(f"bad metric index {(i, j)} for dimension {dim}")
            if key in table and table[key] != as_expr(value):
                raise GeometryError(f"conflicting values for metric entry {key}")
            table[key] = as_expr(value)
        return Metric(dim, tuple(table.get(p, _ZERO) for p in pairs))

    @staticmethod
    def plane(p, q, r) -> "Metric":
        return Metric(2, (as_expr(p), as_expr(q), as_expr(r)))

    @staticmethod
    def identity(dim: int) -> "Metric":
        one = integer(1)
        return Metric.from_components(dim, {(i, i): one for i in range(1, dim + 1)})

    def g(self, i: int, j: int) -> Expr:
        key = (i, j) if i <= j else (j, i)
        return self.entries[SYM_PAIRS[self.dim].index(key)]

    @property
    def p(self) -> Expr:
        return self.g(1, 1)

    @property
    def q(self) -> Expr:
        return self.g(1, 2)

    @property
    def r(self) -> Expr:
        return self.g(2, 2)

    def determinant(self) -> Expr:
        if self.dim == 2:
            return self.g(1, 1) * self.g(2, 2) - self.g(1, 2) * self.g(1, 2)
        row = lambda i, j: self.g(i, j)
        return (
            row(1, 1) * (row(2, 2) * row(3, 3) - row(2, 3) * row(3, 2))
            - row(1, 2) * (row(2, 1) * row(3, 3) - row(2, 3) * row(3, 1))
            + row(1, 3) * (row(2, 1) * row(3, 2) - row(2, 2) * row(3, 1))
        )

    def degeneracy(self, config: ZeroTestConfig = DEFAULT_CONFIG) -> ZeroTestResult:
        """Zero test of the determinant; ZERO means degenerate."""
        return is_zero(self.determinant(), config)

    def inverse_times_det(self) -> Tuple[Tuple[Expr, ...], ...]:
        """Adjugate matrix, i.e. det(g) times the inverse metric."""
        g = self.g
        if self.dim == 2:
            return (
                (g(2, 2), -g(1, 2)),
                (-g(1, 2), g(1, 1)),
            )
        def cof(i, j):
            rows = [r for r in (1, 2, 3) if r != i]
            cols = [c for c in (1, 2, 3) if c != j]
            minor = g(rows[0], cols[0]) * g(rows[1], cols[1]) - g(rows[0], cols[1]) * g(rows[1], cols[0])
            return minor if (i + j) % 2 == 0 else -minor
        # adjugate = transposed cofactors; symmetric here
        return tuple(tuple(cof(j, i) for j in (1, 2, 3)) for i in (1, 2, 3))


@dataclass(frozen=True)
class Christoffel:
    """Connection components G{i}_{jk}, symmetric in the lower pair.

    Storage is one entry per upper index and ordered lower pair: 6
    components in 2D, 18 in 3D, asserted at construction.
    """

    dim: int
    entries: Tuple[Expr, ...]

    def __post_init__(self):
        pairs = SYM_PAIRS.get(self.dim)
        if pairs is None:
            raise GeometryError(f"unsupported dimension {self.dim}")
        expected = self.dim * len(pairs)
        if len(self.entries) != expected:
            raise GeometryError(
                f"{self.dim}D connection needs {expected} components, got {len(self.entries)}"
            )

    @staticmethod
    def from_components(dim: int, mapping: Mapping[Tuple[int, int, int], Expr]) -> "Christoffel":
        pairs = SYM_PAIRS.get(dim)
        if pairs is None:
            raise GeometryError(f"unsupported dimension {dim}")
        table: Dict[Tuple[int, int, int], Expr] = {}
        for (i, j, k), value in mapping.items():
            jk = (j, k) if j <= k else (k, j)
            if not (1 <= i <= dim and jk in pairs):
                raise GeometryError(f"bad connection index {(i, j, k)} for dimension {dim}")
            key = (i,) + jk
            if key in table and table[key] != as_expr(value):
                raise GeometryError(f"conflicting values for connection entry {key}")
            table[key] = as_expr(value)
        entries = tuple(
            table.get((i,) + jk, _ZERO)
            for i in range(1, dim + 1)
            for jk in pairs
        )
        return Christoffel(dim, entries)

    @staticmethod
    def zero(dim: int) -> "Christoffel":
        return Christoffel.from_components(dim, {})

    def gamma(self, i: int, j: int, k: int) -> Expr:
        pairs = SYM_PAIRS[self.dim]
        jk = (j, k) if j <= k else (k, j)
        return self.entries[(i - 1) * len(pairs) + pairs.index(jk)]

    def component_count(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Riemann:
    """Curvature components R{i}_{jkl}, skew in the last index pair."""

    dim: int
    entries: Tuple[Expr, ...]  # ordered by (i, j, (k, l) with k < l)

    def __post_init__(self):
        expected = self.dim * self.dim * (self.dim * (self.dim - 1) // 2)
        if len(self.entries) != expected:
            raise GeometryError(
                f"{self.dim}D curvature needs {expected} stored components, got {len(self.entries)}"
            )

    def component(self, i: int, j: int, k: int, l: int) -> Expr:
        if k == l:
            return _ZERO
        sign = 1
        if k > l:
            k, l, sign = l, k, -1
        skews = [(a, b) for a in range(1, self.dim + 1) for b in range(a + 1, self.dim + 1)]
        idx = ((i - 1) * self.dim + (j - 1)) * len(skews) + skews.index((k, l))
        value = self.entries[idx]
        return value if sign == 1 else -value

    def labelled(self) -> Tuple[Tuple[str, Expr], ...]:
        """Stored components with R{i}_{jkl} labels, in storage order."""
        skews = [(a, b) for a in range(1, self.dim + 1) for b in range(a + 1, self.dim + 1)]
        out = []
        pos = 0
        for i in range(1, self.dim + 1):
            for j in range(1, self.dim + 1):
                for k, l in skews:
                    out.append((f"R{i}_{j}{k}{l}", self.entries[pos]))
                    pos += 1
        return tuple(out)


@dataclass(frozen=True)
class Geodesic2Coefficients:
    """The six named functions a..f of a 2D quadratic geodesic system."""

    a: Expr
    b: Expr
    c: Expr
    d: Expr
    e: Expr
    f: Expr

    @staticmethod
    def make(a=0, b=0, c=0, d=0, e=0, f=0) -> "Geodesic2Coefficients":
        return Geodesic2Coefficients(*(as_expr(v) for v in (a, b, c, d, e, f)))

    def as_christoffel(self) -> Christoffel:
        # the components are the negatives of the named coefficients
        return Christoffel.from_components(2, {
            (1, 1, 1): -self.a,
            (1, 1, 2): -self.b,
            (1, 2, 2): -self.c,
            (2, 1, 1): -self.d,
            (2, 1, 2): -self.e,
            (2, 2, 2): -self.f,
        })

    @staticmethod
    def from_christoffel(gamma: Christoffel) -> "Geodesic2Coefficients":
        if gamma.dim != 2:
            raise GeometryError("named coefficients a..f exist only in 2D")
        return Geodesic2Coefficients(
            a=-gamma.gamma(1, 1, 1),
            b=-gamma.gamma(1, 1, 2),
            c=-gamma.gamma(1, 2, 2),
            d=-gamma.gamma(2, 1, 1),
            e=-gamma.gamma(2, 1, 2),
            f=-gamma.gamma(2, 2, 2),
        )


def christoffel_from_metric(
    g: Metric, config: ZeroTestConfig = DEFAULT_CONFIG
) -> Christoffel:
    """Levi-Civita connection of an exact metric.

    Requires a certified nonzero determinant: a canonically zero
    determinant raises DegenerateMetricError, an undecided one raises
    UndecidedMetricError rather than risking division by a hidden zero.
    """
    det = g.determinant()
    verdict = is_zero(det, config)
    if verdict.verdict is Verdict.ZERO:
        raise DegenerateMetricError("metric determinant is canonically zero")
    if verdict.verdict is Verdict.UNDECIDED:
        raise UndecidedMetricError(
            f"cannot certify det(g) nonzero: {verdict.detail}"
        )
    names = coordinates(g.dim)
    adj = g.inverse_times_det()
    half_over_det = _HALF / det
    components: Dict[Tuple[int, int, int], Expr] = {}
    for i in range(1, g.dim + 1):
        for j, k in SYM_PAIRS[g.dim]:
            acc = _ZERO
            for m in range(1, g.dim + 1):
                acc = acc + adj[i - 1][m - 1] * (
                    g.g(j, m).diff(names[k - 1])
                    + g.g(k, m).diff(names[j - 1])
                    - g.g(j, k).diff(names[m - 1])
                )
            components[(i, j, k)] = half_over_det * acc
    return Christoffel.from_components(g.dim, components)


def riemann(gamma: Christoffel) -> Riemann:
    """Curvature of a symmetric connection.

    R{i}_{jkl} = d_k G{i}_{jl} - d_l G{i}_{jk}
               + sum_m (G{i}_{mk} G{m}_{jl} - G{i}_{ml} G{m}_{jk)}.
    """
    names = coordinates(gamma.dim)
    entries = []
    for i in range(1, gamma.dim + 1):
        for j in range(1, gamma.dim + 1):
            for k in range(1, gamma.dim + 1):
                for l in range(k + 1, gamma.dim + 1):
                    term = gamma.gamma(i, j, l).diff(names[k - 1]) - gamma.gamma(i, j, k).diff(names[l - 1])
                    for m in range(1, gamma.dim + 1):
                        term = term + gamma.gamma(i, m, k) * gamma.gamma(m, j, l)
                        term = term - gamma.gamma(i, m, l) * gamma.gamma(m, j, k)
                    entries.append(term)
    return Riemann(gamma.dim, tuple(entries))


def first_bianchi_residuals(curv: Riemann) -> Tuple[Expr, ...]:
    """Cyclic sums R{i}_{jkl} + R{i}_{klj} + R{i}_{ljk}, all index tuples."""
    n = curv.dim
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    out.append(
                        curv.component(i, j, k, l)
                        + curv.component(i, k, l, j)
                        + curv.component(i, l, j, k)
                    )
    return tuple(out)


def is_flat(
    gamma: Christoffel, config: ZeroTestConfig = DEFAULT_CONFIG
) -> ZeroTestResult:
    """ZERO iff every curvature component is canonically zero.

    The first component the zero test can witness nonzero decides the
    FAIL direction; components are scanned in storage order so the
    witness is deterministic.
    """
    curv = riemann(gamma)
    first_undecided: Optional[ZeroTestResult] = None
    for label, component in curv.labelled():
        if component.is_zero_literal():
            continue
        res = is_zero(component, config)
        if res.verdict is Verdict.NONZERO:
            return ZeroTestResult(
                Verdict.NONZERO,
                witness=res.witness,
                witness_value=res.witness_value,
                detail=f"curvature component {label} is nonzero",
            )
        if first_undecided is None:
            first_undecided = ZeroTestResult(
                Verdict.UNDECIDED,
                detail=f"curvature component {label}: {res.detail}",
            )
    if first_undecided is not None:
        return first_undecided
    return ZeroTestResult(Verdict.ZERO, detail="all curvature components canonically zero")


def geodesic2_flat_conditions(
    coef: Geodesic2Coefficients, config: ZeroTestConfig = DEFAULT_CONFIG
) -> ConditionReport:
    """The four flatness conditions on the coefficients a..f."""
    a, b, c, d, e, f = coef.a, coef.b, coef.c, coef.d, coef.e, coef.f
    labelled = [
        ("Eq9.1", a.diff("y") - b.diff("x") + b * e - c * d),
        ("Eq9.2", b.diff("y") - c.diff("x") + (a * c - b * b) + (b * f - c * e)),
        ("Eq9.3", d.diff("y") - e.diff("x") - (a * e - b * d) - (d * f - e * e)),
        ("Eq9.4", (b + f).diff("x") - (a + e).diff("y")),
    ]
    return evaluate_conditions("geodesic-2 flatness", labelled, config)


def metric_pde_residuals(
    coef: Geodesic2Coefficients,
    g: Metric,
    config: ZeroTestConfig = DEFAULT_CONFIG,
) -> ConditionReport:
    """Residuals of the six first-order metric equations in 2D.

    A candidate (p, q, r) solves the system when all six residuals
    vanish.  The determinant and its degeneracy verdict ride along as
    facts; degeneracy does not by itself fail the report.
    """
    if g.dim != 2:
        raise GeometryError("the metric equations are a 2D check")
    a, b, c, d, e, f = coef.a, coef.b, coef.c, coef.d, coef.e, coef.f
    p, q, r = g.p, g.q, g.r
    two = integer(2)
    labelled = [
        ("Eq11.1", p.diff("x") + two * (a * p + d * q)),
        ("Eq11.2", q.diff("x") + b * p + (a + e) * q + d * r),
        ("Eq11.3", r.diff("x") + two * (b * q + e * r)),
        ("Eq11.4", p.diff("y") + two * (b * p + e * q)),
        ("Eq11.5", q.diff("y") + c * p + (b + f) * q + e * r),
        ("Eq11.6", r.diff("y") + two * (c * q + f * r)),
    ]
    det = g.determinant()
    degeneracy = is_zero(det, config)
    facts = (
        ("determinant", str(det)),
        ("degenerate", {"zero": "yes", "nonzero": "no", "undecided": "undecided"}[degeneracy.verdict.value]),
    )
    return evaluate_conditions("metric equations", labelled, config, facts=facts)
