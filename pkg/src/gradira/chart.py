"""Fibered coordinate charts.

A chart is an ordered list of coordinate names, base coordinates first,
together with a registry of formal function symbols.  Formal functions are
opaque scalars with a declared argument list; differentiating one produces
a formal partial symbol (``H`` -> ``H__y1``), which is again a registered
function with the same arguments.  Mixed partials are canonicalised by
sorting the differentiation coordinates, so the symbol names are unique.
"""

from __future__ import annotations

import sympy

BASE = "base"
FIBER = "fiber"

_PARTIAL_SEP = "__"

from .errors import ChartError


class Chart:
    """A single fibered coordinate chart over an n-dimensional base."""

    def __init__(self, base, fiber):
        base = tuple(base)
        fiber = tuple(fiber)
        names = base + fiber
        if len(set(names)) != len(names):
            raise ChartError(f"duplicate coordinate names in {names}")
        if not base:
            raise ChartError("need at least one base coordinate")
        for name in names:
            if _PARTIAL_SEP in name:
                raise ChartError(f"coordinate name {name!r} may not contain {_PARTIAL_SEP!r}")
            if not name.isidentifier():
                raise ChartError(f"coordinate name {name!r} is not an identifier")
        self.coords = names
        self.n = len(base)
        self.m = len(names)
        self.syms = tuple(sympy.Symbol(c) for c in names)
        self._index = {c: i for i, c in enumerate(names)}
        # function symbol name -> tuple of argument coordinate names
        self.functions: dict[str, tuple[str, ...]] = {}

    # -- coordinates -------------------------------------------------------

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise ChartError(f"unknown coordinate {name!r}") from None

    def sym(self, name):
        return self.syms[self.index(name)]

    def is_base(self, i):
        return i < self.n

    def base_indices(self):
        return range(self.n)

    def fiber_indices(self):
        return range(self.n, self.m)

    @property
    def base_coords(self):
        return self.coords[: self.n]

    @property
    def fiber_coords(self):
        return self.coords[self.n :]

    # -- formal functions --------------------------------------------------

    def declare_function(self, name, args=None):
        """Register a formal function symbol and return its sympy symbol.

        ``args`` defaults to all chart coordinates.  Re-declaration with the
        same argument list is a no-op.
        """
        if args is None:
            args = self.coords
        args = tuple(args)
        for a in args:
            self.index(a)
        if name in self._index:
            raise ChartError(f"{name!r} is already a coordinate")
        if not name.isidentifier():
            raise ChartError(f"function name {name!r} is not an identifier")
        prev = self.functions.get(name)
        if prev is not None and prev != args:
            raise ChartError(f"function {name!r} re-declared with different arguments")
        self.functions[name] = args
        return sympy.Symbol(name)

    def is_function_symbol(self, sym):
        return str(sym) in self.functions

    def partial_symbol(self, fname, coord):
        """The formal partial of a registered function along ``coord``.

        Returns None when the function does not depend on ``coord``.  The
        derivative symbol is registered lazily with the same arguments.
        """
        args = self.functions[fname]
        if coord not in args:
            return None
        base, diffs = self._split_partial_name(fname)
        diffs = tuple(sorted(diffs + (coord,)))
        name = _PARTIAL_SEP.join((base,) + diffs)
        if name not in self.functions:
            self.functions[name] = args
        return sympy.Symbol(name)

    def _split_partial_name(self, fname):
        parts = fname.split(_PARTIAL_SEP)
        base = parts[0]
        diffs = tuple(parts[1:])
        return base, diffs

    def __repr__(self):
        return f"Chart(base={list(self.base_coords)}, fiber={list(self.fiber_coords)})"

    def __eq__(self, other):
        return (
            isinstance(other, Chart)
            and self.coords == other.coords
            and self.n == other.n
        )

    def __hash__(self):
        return hash((self.coords, self.n))
