"""Arbitrary precision numeric evaluation of exact expressions.

Evaluation works at a caller chosen binary precision and reports, next to
the value itself, the largest intermediate magnitude met along the way.
That peak is what a relative smallness test must compare against: a tiny
result produced from huge intermediates is evidence of cancellation, not
of a tiny function.
"""

from __future__ import annotations

from typing import Mapping, Tuple

import mpmath

from .core import Expr, KERNEL, KernelError, P_ONE


class EvalDomainError(KernelError):
    """Evaluation hit a pole or left the real domain of a kernel."""


def _to_mpf(value):
    if isinstance(value, (int, float)):
        return mpmath.mpf(value)
    num = getattr(value, "numerator", None)
    den = getattr(value, "denominator", None)
    if num is not None and den is not None:
        return mpmath.mpf(int(num)) / mpmath.mpf(int(den))
    return mpmath.mpf(value)


class _Evaluator:
    def __init__(self, point):
        self.point = point
        self.peak = mpmath.mpf(0)

    def note(self, v):
        a = abs(v)
        if a > self.peak:
            self.peak = a
        return v

    def gen(self, g, e):
        if g.kind != KERNEL:
            try:
                base = self.point[g.name]
            except KeyError:
                raise EvalDomainError(f"no value supplied for variable {g.name!r}")
        else:
            arg = self.expr(g.arg)
            if g.name == "exp":
                base = mpmath.exp(arg)
            elif g.name == "ln":
                if arg <= 0:
                    raise EvalDomainError("ln evaluated at a nonpositive point")
                base = mpmath.log(arg)
            elif g.name == "sqrt":
                if arg < 0:
                    raise EvalDomainError("sqrt evaluated at a negative point")
                base = mpmath.sqrt(arg)
            elif g.name == "sin":
                base = mpmath.sin(arg)
            elif g.name == "cos":
                base = mpmath.cos(arg)
            else:
                raise KernelError(f"unknown kernel {g.name!r}")
        self.note(base)
        if e == 1:
            return base
        return self.note(base ** e)

    def poly(self, p):
        total = mpmath.mpf(0)
        for m, c in p:
            term = _to_mpf(c)
            for g, e in m:
                term = self.note(term * self.gen(g, e))
            total = self.note(total + term)
        return total

    def expr(self, e: Expr):
        num = self.poly(e.num)
        if e.den == P_ONE:
            return num
        den = self.poly(e.den)
        if den == 0:
            raise EvalDomainError("denominator vanished at the sample point")
        return self.note(num / den)


def eval_expr(expr: Expr, point: Mapping[str, object], precision_bits: int = 256) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """Evaluate expr at a point, returning (value, peak magnitude).

    Point values may be ints, exact rationals, or floats; they are
    converted at the working precision.  Raises EvalDomainError at poles,
    for ln or sqrt outside their real domain, and for missing variables.
    """
    with mpmath.workprec(precision_bits):
        mp_point = {name: _to_mpf(v) for name, v in point.items()}
        ev = _Evaluator(mp_point)
        value = ev.expr(expr)
        if ev.peak < abs(value):
            ev.peak = abs(value)
        return value, ev.peak
