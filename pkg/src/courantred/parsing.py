"""Textual expressions such as ``3/2 * x1^2 * e1*e3 * p2 - x2``.

Grammar (whitespace insensitive)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ['^' INT]
    atom   := NUMBER ['/' NUMBER] | NAME | '(' expr ')'
"""

from __future__ import annotations

import re
from fractions import Fraction

from .graded_algebra import Chart, GradedPoly

__all__ = ["ExpressionError", "parse_expr", "parse_rational"]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(.))")


class ExpressionError(ValueError):
    def __init__(self, message: str, column: int | None = None):
        self.column = column
        super().__init__(message if column is None else f"{message} (column {column})")


def _tokens(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the last alternative matches anything
            raise ExpressionError("unreadable input", pos + 1)
        col = m.start(m.lastindex) + 1
        if m.group(1) is not None:
            out.append(("num", m.group(1), col))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), col))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExpressionError(f"unexpected character {ch!r}", col)
            out.append(("op", ch, col))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


def parse_rational(text: str) -> Fraction:
    """Parse ``a``, ``-a`` or ``a/b``; zero denominators are rejected."""
    s = text.strip()
    m = re.fullmatch(r"([+-]?\d+)(?:\s*/\s*(\d+))?", s)
    if not m:
        raise ExpressionError(f"malformed rational {text!r}")
    if m.group(2) is not None and int(m.group(2)) == 0:
        raise ExpressionError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), int(m.group(2) or 1))


class _Parser:
    def __init__(self, text: str, chart: Chart):
        self.toks = _tokens(text)
        self.i = 0
        self.chart = chart

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise ExpressionError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def expr(self) -> GradedPoly:
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        out = self.term() * sign
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            out = out + t if op == "+" else out - t
        return out

    def term(self) -> GradedPoly:
        out = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            out = out * self.factor()
        return out

    def factor(self) -> GradedPoly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise ExpressionError("exponent must be a non-negative integer", tok[2])
            base = base ** int(tok[1])
        return base

    def atom(self) -> GradedPoly:
        kind, val, col = self.take()
        if kind == "num":
            num = int(val)
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                tok = self.take()
                if tok[0] != "num":
                    raise ExpressionError("malformed rational", tok[2])
                if int(tok[1]) == 0:
                    raise ExpressionError("zero denominator", tok[2])
                return GradedPoly.const(self.chart, Fraction(num, int(tok[1])))
            return GradedPoly.const(self.chart, num)
        if kind == "name":
            if not self.chart.has(val):
                raise ExpressionError(f"unknown generator {val!r}", col)
            return GradedPoly.generator(self.chart, val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ExpressionError(f"unexpected {val or 'end of input'!r}", col)


def parse_expr(text: str, chart: Chart) -> GradedPoly:
    p = _Parser(text, chart)
    out = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ExpressionError(f"unexpected {tok[1]!r}", tok[2])
    return out
