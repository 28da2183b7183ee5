"""Exact expression kernel: canonical arithmetic, parsing, evaluation, zero test."""

from .core import (
    Expr,
    KernelDomainError,
    KernelError,
    ONE,
    ZERO,
    as_expr,
    cos,
    exp,
    integer,
    kernel_apply,
    ln,
    pythagorean_enabled,
    pythagorean_rewrite,
    rational,
    sin,
    sqrt,
    var,
    variables,
)
from .parse import ParseError, parse
from .numeric import EvalDomainError, eval_expr
from .zerotest import DEFAULT_CONFIG, Verdict, ZeroTestConfig, ZeroTestResult, is_zero

__all__ = [
    "Expr",
    "KernelDomainError",
    "KernelError",
    "ONE",
    "ZERO",
    "as_expr",
    "cos",
    "exp",
    "integer",
    "kernel_apply",
    "ln",
    "parse",
    "ParseError",
    "pythagorean_enabled",
    "pythagorean_rewrite",
    "rational",
    "sin",
    "sqrt",
    "var",
    "variables",
    "EvalDomainError",
    "eval_expr",
    "DEFAULT_CONFIG",
    "Verdict",
    "ZeroTestConfig",
    "ZeroTestResult",
    "is_zero",
]
