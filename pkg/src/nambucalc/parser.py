"""Expression grammar for scalars, graded elements, and operators.

One token stream serves two entry points: `parse` builds scalar functions and
graded elements, `parse_operator` builds operator trees.  Precedence, highest
first: unary minus, `^`, `*` `/`, `+` `-`.  Between graded elements `^` is
the wedge; between scalars it is an integer power.  `d<name>` is a coordinate
1-form, `@<name>` a coordinate vector field, and a bare variable name is the
scalar function (variable names win over the `d` prefix if they collide).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .rational import Chart, RationalFunction
from .graded import (
    GradedElement,
    basis_vector,
    coordinate_differential,
)
from .operators import (
    Commutator,
    Compose,
    ExtDiff,
    GradedOperator,
    Insert,
    LieDer,
    MulForm,
    Scale,
    Sum,
)


class ParseError(ValueError):
    """Syntax or resolution failure, with the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()@\[\],]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", pos)
        if match.lastgroup == "number":
            tokens.append(("number", match.group("number"), match.start("number")))
        elif match.lastgroup == "ident":
            tokens.append(("ident", match.group("ident"), match.start("ident")))
        else:
            tokens.append(("op", match.group("op"), match.start("op")))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _constant_fraction(value) -> Fraction | None:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, RationalFunction):
        if value.num.total_degree() > 0 or value.den.total_degree() > 0:
            return None
        return value.evaluate({name: 0 for name in value.chart.variables})
    return None


def _constant_int(value: RationalFunction) -> int | None:
    """The value as a plain integer, if it is one."""
    c = _constant_fraction(value)
    if c is None or c.denominator != 1:
        return None
    return int(c)


class _Parser:
    def __init__(self, text: str, chart: Chart):
        self.text = text
        self.chart = chart
        self.tokens = _tokenize(text)
        self.idx = 0

    # -- token plumbing ------------------------------------------------------

    def peek(self):
        return self.tokens[self.idx]

    def advance(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, symbol: str):
        kind, value, pos = self.peek()
        if kind != "op" or value != symbol:
            raise ParseError(f"expected {symbol!r}", pos)
        return self.advance()

    def at_op(self, *symbols: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "op" and value in symbols

    # -- element / scalar grammar ----------------------------------------------

    def element_expr(self):
        left = self.element_term()
        while self.at_op("+", "-"):
            _, symbol, pos = self.advance()
            right = self.element_term()
            try:
                left = left + right if symbol == "+" else left - right
            except (TypeError, ValueError) as exc:
                raise ParseError(str(exc), pos) from None
        return left

    def element_term(self):
        left = self.element_power()
        while self.at_op("*", "/"):
            _, symbol, pos = self.advance()
            right = self.element_power()
            both_elements = isinstance(left, GradedElement) and isinstance(
                right, GradedElement
            )
            if symbol == "*":
                if both_elements:
                    raise ParseError("use '^' to wedge graded elements", pos)
                left = left * right
            else:
                if isinstance(right, GradedElement):
                    raise ParseError("cannot divide by a graded element", pos)
                if right.is_zero:
                    raise ParseError("division by zero", pos)
                left = left * (RationalFunction.one(self.chart) / right) if isinstance(
                    left, GradedElement
                ) else left / right
        return left

    def element_power(self):
        left = self.element_unary()
        while self.at_op("^"):
            _, _, pos = self.advance()
            right = self.element_unary()
            if isinstance(left, GradedElement) and isinstance(right, GradedElement):
                try:
                    left = left.wedge(right)
                except (TypeError, ValueError) as exc:
                    raise ParseError(str(exc), pos) from None
            elif isinstance(left, GradedElement) or isinstance(right, GradedElement):
                raise ParseError("'^' needs two scalars or two graded elements", pos)
            else:
                exponent = _constant_int(right)
                if exponent is None:
                    raise ParseError("exponent must be an integer", pos)
                if exponent < 0 and left.is_zero:
                    raise ParseError("division by zero", pos)
                left = left**exponent
        return left

    def element_unary(self):
        if self.at_op("-"):
            self.advance()
            return -self.element_unary()
        return self.element_atom()

    def element_atom(self):
        kind, value, pos = self.peek()
        if kind == "number":
            self.advance()
            return RationalFunction.zero(self.chart) + int(value)
        if kind == "ident":
            self.advance()
            return self._resolve(value, pos)
        if kind == "op" and value == "@":
            self.advance()
            kind2, name, pos2 = self.advance()
            if kind2 != "ident":
                raise ParseError("expected a coordinate name after '@'", pos2)
            if name not in self.chart.coordinates:
                raise ParseError(f"unknown coordinate {name!r}", pos2)
            return basis_vector(self.chart, name)
        if kind == "op" and value == "(":
            self.advance()
            inner = self.element_expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {value!r}" if value else "unexpected end of input", pos)

    def _resolve(self, name: str, pos: int):
        if name in self.chart.variables:
            return RationalFunction.variable(self.chart, name)
        if name.startswith("d") and name[1:] in self.chart.coordinates:
            return coordinate_differential(self.chart, name[1:])
        raise ParseError(f"unknown identifier {name!r}", pos)

    # -- operator grammar ------------------------------------------------------

    def operator_expr(self):
        left = self.operator_term()
        while self.at_op("+", "-"):
            _, symbol, pos = self.advance()
            right = self.operator_term()
            left = self._op_add(left, right, symbol, pos)
        return left

    def operator_term(self):
        left = self.operator_unary()
        while self.at_op("*", "/"):
            _, symbol, pos = self.advance()
            right = self.operator_unary()
            left = self._op_mul(left, right, symbol, pos)
        return left

    def operator_unary(self):
        if self.at_op("-"):
            _, _, pos = self.advance()
            inner = self.operator_unary()
            if isinstance(inner, GradedOperator):
                return Scale(Fraction(-1), inner)
            return -inner
        return self.operator_atom()

    def operator_atom(self):
        kind, value, pos = self.peek()
        if kind == "number":
            self.advance()
            return Fraction(int(value))
        if kind == "ident":
            if value == "d":
                self.advance()
                return ExtDiff(self.chart)
            if value in ("i", "L", "mu"):
                self.advance()
                self.expect("(")
                arg = self.element_expr()
                self.expect(")")
                try:
                    if value == "i":
                        return Insert(arg)
                    if value == "L":
                        return LieDer(arg)
                    return MulForm(
                        arg
                        if isinstance(arg, GradedElement)
                        else GradedElement.scalar(self.chart, arg)
                    )
                except (TypeError, ValueError) as exc:
                    raise ParseError(str(exc), pos) from None
            if value in self.chart.variables:
                self.advance()
                return RationalFunction.variable(self.chart, value)
            raise ParseError(f"unknown operator {value!r}", pos)
        if kind == "op" and value == "[":
            self.advance()
            first = self.operator_expr()
            self.expect(",")
            second = self.operator_expr()
            self.expect("]")
            if not isinstance(first, GradedOperator) or not isinstance(
                second, GradedOperator
            ):
                raise ParseError("commutator brackets take two operators", pos)
            return Commutator(first, second)
        if kind == "op" and value == "(":
            self.advance()
            inner = self.operator_expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {value!r}" if value else "unexpected end of input", pos)

    def _op_add(self, left, right, symbol: str, pos: int):
        lop = isinstance(left, GradedOperator)
        rop = isinstance(right, GradedOperator)
        if lop and rop:
            if symbol == "-":
                right = Scale(Fraction(-1), right)
            try:
                return Sum((left, right))
            except ValueError as exc:
                raise ParseError(str(exc), pos) from None
        if not lop and not rop:
            return left + right if symbol == "+" else left - right
        raise ParseError("cannot add a scalar to an operator", pos)

    def _op_mul(self, left, right, symbol: str, pos: int):
        lop = isinstance(left, GradedOperator)
        rop = isinstance(right, GradedOperator)
        if symbol == "/":
            if rop:
                raise ParseError("cannot divide by an operator", pos)
            c = _constant_fraction(right)
            if c is None or c == 0:
                raise ParseError("operator division needs a nonzero rational", pos)
            if lop:
                return Scale(Fraction(1) / c, left)
            return left / c
        if lop and rop:
            return Compose(left, right)
        if not lop and not rop:
            return left * right
        op = left if lop else right
        scalar = right if lop else left
        c = _constant_fraction(scalar)
        if c is not None:
            return Scale(c, op)
        raise ParseError(
            "operator scaling needs a rational constant; use mu(f)*op for functions",
            pos,
        )


def parse(text: str, chart: Chart):
    """Parse a scalar or graded-element expression."""
    parser = _Parser(text, chart)
    result = parser.element_expr()
    kind, value, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing input {value!r}", pos)
    return result


def parse_scalar(text: str, chart: Chart) -> RationalFunction:
    """Parse an expression that must denote a scalar function."""
    result = parse(text, chart)
    if isinstance(result, GradedElement):
        degrees = result.degrees()
        if degrees not in ((), (0,)):
            raise ParseError("expected a scalar expression", 0)
        return result.as_scalar()
    return result


def parse_operator(text: str, chart: Chart) -> GradedOperator:
    """Parse an operator expression over d, i(...), L(...), mu(...)."""
    parser = _Parser(text, chart)
    result = parser.operator_expr()
    kind, value, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing input {value!r}", pos)
    if not isinstance(result, GradedOperator):
        c = _constant_fraction(result)
        if c is not None:
            raise ParseError("expression is a constant, not an operator", pos)
        raise ParseError("expression is not an operator", pos)
    return result
