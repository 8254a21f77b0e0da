"""Recursive-descent parser for the expression grammar.

Grammar (no recovery; first error wins, with 1-based line/column):

    expr     := product (('+' | '-') product)*
    product  := wedges ('@' wedges)?          -- form @ multivector tensor
    wedges   := scaled ('^' scaled)*          -- wedge, left associative
    scaled   := unary (('*' | '/') unary)*    -- '*' binds tighter than '^'
    unary    := '-' unary | power
    power    := atom ('**' INT)?
    atom     := INT | NAME | NAME '(' args ')' | 'd' '(' NAME ')'
              | 'dX' '[' ints? ']' | '@/' NAME | '(' expr ')'

``dX[mu,...]`` is the contraction of the listed base vectors (1-based
positions) into d^n x; ``dX[]`` is the volume form.  ``D(H, c, ...)``
names a formal partial of a declared function.  Atoms evaluate to
scalars, forms or multivectors; operators dispatch on those types.
"""

from __future__ import annotations

import re

import sympy

from .chart import _PARTIAL_SEP
from .errors import ParseError
from .forms import Form, MultiVector, MvForm, volume_contraction, wedge
from .scalars import as_scalar

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<atvec>@/)
  | (?P<pow>\*\*)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^@()\[\],])
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text, chart):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.chart = chart

    # -- token plumbing ----------------------------------------------------

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    # -- grammar -----------------------------------------------------------

    def parse(self):
        value = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            self.error(f"trailing input {tok.text!r}")
        return value

    def expr(self):
        value = self.product()
        while self.peek().text in ("+", "-"):
            op = self.next()
            rhs = self.product()
            value = self._add(value, rhs if op.text == "+" else self._neg(rhs), op)
        return value

    def product(self):
        value = self.wedges()
        if self.peek().text == "@":
            op = self.next()
            rhs = self.wedges()
            value = self._tensor(value, rhs, op)
        return value

    def wedges(self):
        value = self.scaled()
        while self.peek().text == "^":
            op = self.next()
            rhs = self.scaled()
            value = self._wedge(value, rhs, op)
        return value

    def scaled(self):
        value = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.next()
            rhs = self.unary()
            if op.text == "*":
                value = self._mul(value, rhs, op)
            else:
                if isinstance(rhs, (Form, MultiVector, MvForm)):
                    self.error("division by a non-scalar", op)
                value = self._mul(value, as_scalar(sympy.Integer(1) / rhs), op)
        return value

    def unary(self):
        if self.peek().text == "-":
            tok = self.next()
            return self._neg(self.unary())
        return self.power()

    def power(self):
        value = self.atom()
        if self.peek().kind == "pow":
            op = self.next()
            exp = self.next()
            if exp.kind != "int":
                self.error("exponent must be an integer", exp)
            if isinstance(value, (Form, MultiVector, MvForm)):
                self.error("power of a non-scalar", op)
            return as_scalar(value ** sympy.Integer(exp.text))
        return value

    def atom(self):
        tok = self.next()
        if tok.kind == "int":
            return sympy.Integer(tok.text)
        if tok.kind == "atvec":
            name = self.next()
            if name.kind != "name":
                self.error("expected a coordinate after @/", name)
            self._coord(name)
            return MultiVector.coord_vector(self.chart, name.text)
        if tok.text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if tok.kind == "name":
            return self._name_atom(tok)
        self.error(f"unexpected token {tok.text!r}", tok)

    def _name_atom(self, tok):
        name = tok.text
        nxt = self.peek()
        if name == "d" and nxt.text == "(":
            self.next()
            coord = self.next()
            if coord.kind != "name":
                self.error("expected a coordinate in d(...)", coord)
            self._coord(coord)
            self.expect(")")
            return Form.d_coord(self.chart, coord.text)
        if name == "dX" and nxt.text == "[":
            self.next()
            lowered = []
            if self.peek().text != "]":
                while True:
                    num = self.next()
                    if num.kind != "int":
                        self.error("expected a base index in dX[...]", num)
                    mu = int(num.text)
                    if not 1 <= mu <= self.chart.n:
                        self.error(f"base index {mu} out of range 1..{self.chart.n}", num)
                    lowered.append(mu - 1)
                    if self.peek().text == ",":
                        self.next()
                        continue
                    break
            self.expect("]")
            if len(set(lowered)) != len(lowered):
                self.error("repeated index in dX[...]", tok)
            return volume_contraction(self.chart, lowered)
        if name == "D" and nxt.text == "(":
            self.next()
            fname = self.next()
            if fname.kind != "name" or fname.text not in self.chart.functions:
                self.error("D(...) needs a declared function", fname)
            coords = []
            while self.peek().text == ",":
                self.next()
                c = self.next()
                if c.kind != "name":
                    self.error("expected a coordinate in D(...)", c)
                self._coord(c)
                coords.append(c.text)
            self.expect(")")
            if not coords:
                self.error("D(...) needs at least one coordinate", tok)
            sym = sympy.Symbol(fname.text)
            for c in coords:
                nxt_sym = self.chart.partial_symbol(str(sym), c)
                if nxt_sym is None:
                    self.error(f"{sym} does not depend on {c}", tok)
                sym = nxt_sym
            return sym
        if nxt.text == "(" and name in self.chart.functions:
            self.next()
            args = []
            if self.peek().text != ")":
                while True:
                    c = self.next()
                    if c.kind != "name":
                        self.error("expected a coordinate argument", c)
                    self._coord(c)
                    args.append(c.text)
                    if self.peek().text == ",":
                        self.next()
                        continue
                    break
            self.expect(")")
            if tuple(args) != self.chart.functions[name]:
                self.error(
                    f"arguments {args} do not match declaration of {name}", tok
                )
            return sympy.Symbol(name)
        if name in self.chart.functions:
            return sympy.Symbol(name)
        if _PARTIAL_SEP in name:
            base = name.split(_PARTIAL_SEP)[0]
            if base in self.chart.functions and name in self.chart.functions:
                return sympy.Symbol(name)
            self.error(f"unknown partial symbol {name!r}", tok)
        try:
            self.chart.index(name)
        except Exception:
            self.error(f"unknown coordinate {name!r}", tok)
        return self.chart.sym(name)

    def _coord(self, tok):
        try:
            self.chart.index(tok.text)
        except Exception:
            self.error(f"unknown coordinate {tok.text!r}", tok)

    # -- typed operations ----------------------------------------------------

    @staticmethod
    def _graded(value):
        return isinstance(value, (Form, MultiVector, MvForm))

    def _coerce_pair(self, a, b):
        """Lift scalars to 0-forms when combined with forms."""
        if isinstance(a, Form) and not self._graded(b):
            return a, Form.scalar_form(a.chart, b)
        if isinstance(b, Form) and not self._graded(a):
            return Form.scalar_form(b.chart, a), b
        return a, b

    def _add(self, a, b, tok):
        a, b = self._coerce_pair(a, b)
        if self._graded(a) != self._graded(b):
            self.error("cannot add a scalar and a graded object", tok)
        if not self._graded(a):
            return as_scalar(a + b)
        try:
            return a + b
        except Exception as exc:
            self.error(str(exc), tok)

    def _neg(self, a):
        if self._graded(a):
            return -a
        return as_scalar(-a)

    def _mul(self, a, b, tok):
        if self._graded(a) and self._graded(b):
            self.error("'*' multiplies by scalars; use '^' to wedge", tok)
        if not self._graded(a) and not self._graded(b):
            return as_scalar(a * b)
        if self._graded(a):
            return a * b
        return b * a

    def _wedge(self, a, b, tok):
        try:
            return wedge(a, b)
        except Exception as exc:
            self.error(str(exc), tok)

    def _tensor(self, a, b, tok):
        if not self._graded(a):
            a = Form.scalar_form(self.chart, a)
        if not self._graded(b):
            b = MultiVector(self.chart, 0, {(): as_scalar(b)})
        if not isinstance(a, Form) or not isinstance(b, MultiVector):
            self.error("'@' expects form @ multivector", tok)
        return MvForm.tensor(a, b)


def parse_expression(text, chart):
    """Parse a scalar, form, multivector or multivector-valued form."""
    return _Parser(text, chart).parse()


def parse_form(text, chart, degree=None):
    value = parse_expression(text, chart)
    if not isinstance(value, (Form, MultiVector, MvForm)):
        if degree is not None and as_scalar(value) == 0:
            return Form.zero(chart, degree)
        value = Form.scalar_form(chart, value)
    if not isinstance(value, Form):
        raise ParseError(f"expected a form, got {type(value).__name__}")
    if degree is not None and value.degree != degree:
        raise ParseError(f"expected a degree {degree} form, got {value.degree}")
    return value


def parse_multivector(text, chart, degree=None):
    value = parse_expression(text, chart)
    if not isinstance(value, MultiVector):
        if not isinstance(value, (Form, MvForm)) and as_scalar(value) == 0:
            return MultiVector.zero(chart, degree if degree is not None else 1)
        raise ParseError(f"expected a multivector, got {type(value).__name__}")
    return value
