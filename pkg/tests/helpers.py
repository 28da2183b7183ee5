"""Shared test utilities.

The finite difference oracle here is the independent check for symbolic
derivatives: it never calls Expr.diff, only the numeric evaluator, so a
bug in the symbolic chain rule cannot hide inside it.
"""

from __future__ import annotations

import random
from fractions import Fraction

import mpmath

from geolin.kernel import (
    Expr,
    cos,
    eval_expr,
    exp,
    integer,
    ln,
    sin,
    sqrt,
    var,
)

FD_H = Fraction(1, 10**8)


def fd_derivative(expr: Expr, name: str, point: dict, precision_bits: int = 192):
    """Central difference approximation of d(expr)/d(name) at a point.

    Exact rational stepping plus 192 bit evaluation keeps the rounding
    error far below the h^2 truncation error, so a relative tolerance of
    1e-6 against this oracle is comfortable for smooth expressions.
    """
    up = dict(point)
    dn = dict(point)
    up[name] = point[name] + FD_H
    dn[name] = point[name] - FD_H
    with mpmath.workprec(precision_bits):
        vu, _ = eval_expr(expr, up, precision_bits)
        vd, _ = eval_expr(expr, dn, precision_bits)
        h = mpmath.mpf(FD_H.numerator) / mpmath.mpf(FD_H.denominator)
        return (vu - vd) / (2 * h)


def relative_close(a, b, tol=1e-6) -> bool:
    scale = max(abs(a), abs(b), mpmath.mpf(1))
    return abs(a - b) <= tol * scale


def sample_point(rng: random.Random, names) -> dict:
    return {n: Fraction(rng.randint(1, 2**12), 2**12) + Fraction(1, 2) for n in names}


def random_expr(rng: random.Random, depth: int = 3, names=("x", "y")) -> Expr:
    """Random expression, closed over the real domain on positive boxes.

    ln and sqrt arguments are wrapped as 1 + g^2 and denominators are kept
    away from zero, so evaluation anywhere on [1/2, 3/2]^n cannot leave the
    real domain.
    """
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.6:
            return var(rng.choice(names))
        return integer(rng.randint(-3, 3))
    pick = rng.randrange(8)
    a = random_expr(rng, depth - 1, names)
    if pick == 0:
        return a + random_expr(rng, depth - 1, names)
    if pick == 1:
        return a - random_expr(rng, depth - 1, names)
    if pick == 2:
        return a * random_expr(rng, depth - 1, names)
    if pick == 3:
        b = random_expr(rng, depth - 1, names)
        return a / (b * b + 1)
    if pick == 4:
        return a ** rng.randint(2, 3)
    if pick == 5:
        return exp(a) if _small(a) else sin(a)
    if pick == 6:
        return rng.choice((sin, cos))(a)
    return rng.choice((ln, sqrt))(a * a + 1)


def _small(e: Expr) -> bool:
    # keep exp arguments shallow so nested exponentials stay evaluable
    return len(str(e)) < 40


def random_polynomial(rng: random.Random, names=("x", "y"), degree: int = 2, terms: int = 4) -> Expr:
    """Small random polynomial with integer coefficients in [-4, 4]."""
    acc = integer(0)
    for _ in range(terms):
        term = integer(rng.randint(-4, 4))
        for _ in range(rng.randint(0, degree)):
            term = term * var(rng.choice(names))
        acc = acc + term
    return acc
