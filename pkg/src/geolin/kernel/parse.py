"""Recursive descent parser for the exact expression grammar.

Grammar, in decreasing binding strength:

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | power
    power  := atom ('^' exponent)?
    atom   := number | name | name '(' expr ')' | '(' expr ')'

Exponents are integer literals, optionally signed, optionally
parenthesized, and chain right associatively, so x^2^3 means x^(2^3).
The caret binds tighter than unary minus: -x^2 is -(x^2).  Numbers may
carry a decimal fraction part and are converted exactly.  Every error
carries the byte offset where parsing failed.
"""

from __future__ import annotations

from fractions import Fraction

from .core import Expr, KernelError, KERNEL_NAMES, as_expr, kernel_apply, var


class ParseError(KernelError):
    """Syntax error with the byte offset of the offending character."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_NAME_CONT = _NAME_START | set("0123456789")
_DIGITS = set("0123456789")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.n = len(text)

    def error(self, message: str, offset=None):
        raise ParseError(message, self.pos if offset is None else offset)

    def skip_ws(self):
        while self.pos < self.n and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < self.n else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse_expr(self) -> Expr:
        self.skip_ws()
        value = self.parse_term()
        while True:
            self.skip_ws()
            op = self.peek()
            if op == "+":
                self.pos += 1
                value = value + self.parse_term()
            elif op == "-":
                self.pos += 1
                value = value - self.parse_term()
            else:
                return value

    def parse_term(self) -> Expr:
        value = self.parse_factor()
        while True:
            self.skip_ws()
            op = self.peek()
            if op == "*":
                self.pos += 1
                value = value * self.parse_factor()
            elif op == "/":
                at = self.pos
                self.pos += 1
                rhs = self.parse_factor()
                if rhs.is_zero_literal():
                    self.error("division by zero", at)
                value = value / rhs
            else:
                return value

    def parse_factor(self) -> Expr:
        self.skip_ws()
        ch = self.peek()
        if ch == "+":
            self.pos += 1
            return self.parse_factor()
        if ch == "-":
            self.pos += 1
            return -self.parse_factor()
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        self.skip_ws()
        if self.peek() == "^":
            at = self.pos
            self.pos += 1
            e = self.parse_exponent()
            if e < 0 and base.is_zero_literal():
                self.error("zero raised to a negative power", at)
            return base ** e
        return base

    def parse_exponent(self) -> int:
        self.skip_ws()
        sign = 1
        while self.peek() in "+-":
            if self.peek() == "-":
                sign = -sign
            self.pos += 1
            self.skip_ws()
        if self.peek() == "(":
            self.pos += 1
            value = self.parse_exponent()
            self.skip_ws()
            self.expect(")")
        else:
            start = self.pos
            while self.peek() in _DIGITS:
                self.pos += 1
            if self.pos == start:
                self.error("expected an integer exponent")
            if self.peek() == ".":
                self.error("exponents must be integers")
            value = int(self.text[start:self.pos])
        self.skip_ws()
        if self.peek() == "^":
            at = self.pos
            self.pos += 1
            rhs = self.parse_exponent()
            if rhs < 0:
                self.error("negative exponent inside an exponent tower", at)
            value = value ** rhs
        return sign * value

    def parse_atom(self) -> Expr:
        self.skip_ws()
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            value = self.parse_expr()
            self.skip_ws()
            self.expect(")")
            return value
        if ch in _DIGITS or ch == ".":
            return self.parse_number()
        if ch in _NAME_START:
            return self.parse_name()
        if ch == "":
            self.error("unexpected end of input")
        self.error(f"unexpected character {ch!r}")

    def parse_number(self) -> Expr:
        start = self.pos
        while self.peek() in _DIGITS:
            self.pos += 1
        int_part = self.text[start:self.pos]
        frac_part = ""
        if self.peek() == ".":
            self.pos += 1
            fstart = self.pos
            while self.peek() in _DIGITS:
                self.pos += 1
            frac_part = self.text[fstart:self.pos]
            if not int_part and not frac_part:
                self.error("malformed number", start)
        if not int_part and not frac_part:
            self.error("malformed number", start)
        whole = int(int_part) if int_part else 0
        if frac_part:
            q = Fraction(whole) + Fraction(int(frac_part), 10 ** len(frac_part))
            return as_expr(q)
        return as_expr(whole)

    def parse_name(self) -> Expr:
        start = self.pos
        while self.peek() in _NAME_CONT:
            self.pos += 1
        name = self.text[start:self.pos]
        self.skip_ws()
        if self.peek() == "(":
            if name not in KERNEL_NAMES:
                self.error(f"unknown function {name!r}", start)
            self.pos += 1
            arg = self.parse_expr()
            self.skip_ws()
            self.expect(")")
            return kernel_apply(name, arg)
        return var(name)


def parse(text: str) -> Expr:
    """Parse a string into a canonical expression.

    Raises ParseError with a byte offset on malformed input.
    """
    if not isinstance(text, str):
        raise TypeError("parse() expects a string")
    p = _Parser(text)
    value = p.parse_expr()
    p.skip_ws()
    if p.pos != p.n:
        p.error("unexpected trailing input")
    return value
