"""The exact scalar coefficient field.

Scalars are sympy expressions built from rational constants, coordinate
symbols and formal function symbols (plus their formal partials).  The
normal form is ``sympy.cancel``: a ratio of expanded coprime polynomials,
which is canonical, so equality of scalars is structural equality of
normal forms.

Total differentiation treats every symbol as independent and adds the
chain-rule contribution of registered function symbols: d(H)/d(y1) is the
fresh indeterminate ``H__y1``.
"""

from __future__ import annotations

from functools import lru_cache

import sympy
from sympy import Rational

ZERO = sympy.Integer(0)
ONE = sympy.Integer(1)


@lru_cache(maxsize=None)
def _cancel(expr):
    return sympy.cancel(expr)


def as_scalar(value):
    """Coerce ints, Fractions, strings and sympy objects to a normal form."""
    if isinstance(value, sympy.Expr):
        return _cancel(value)
    expr = sympy.sympify(value, rational=True)
    return _cancel(expr)


def normalized(expr):
    return _cancel(expr)


def is_zero(expr):
    return _cancel(expr) == 0


def sadd(a, b):
    return _cancel(sympy.Add(a, b))


def smul(a, b):
    if a is ONE:
        return b
    if b is ONE:
        return a
    return _cancel(sympy.Mul(a, b))


def sdiv(a, b):
    return _cancel(a / b)


def sneg(a):
    return _cancel(-a)


def diff(expr, coord_name, chart):
    """Total derivative of a scalar along a chart coordinate.

    Formal function symbols contribute their formal partials; all other
    symbols are treated as independent indeterminates.
    """
    c = chart.sym(coord_name)
    out = sympy.diff(expr, c)
    for sym in expr.free_symbols:
        name = str(sym)
        if name in chart.functions:
            partial = chart.partial_symbol(name, coord_name)
            if partial is not None:
                out += sympy.diff(expr, sym) * partial
    return _cancel(out)


def is_polynomial(expr, chart):
    """True when the scalar is a polynomial in the chart coordinates with
    rational constants and no formal function symbols."""
    expr = _cancel(expr)
    if not expr.free_symbols <= set(chart.syms):
        return False
    return expr.is_polynomial(*chart.syms) and sympy.denom(expr).is_Rational


def poly_monomials(expr, chart):
    """Yield (coefficient, exponent tuple) over the chart coordinates."""
    poly = sympy.Poly(expr, *chart.syms)
    for exps, coeff in poly.terms():
        yield coeff, exps
