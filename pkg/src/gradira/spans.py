"""Function-coefficient modules of forms and multivectors.

A Span is a finite generator list; membership means decomposability with
scalar-field coefficients, decided by one exact linear solve.  Rank is not
assumed constant: duplicate or zero generators are tolerated.
"""

from __future__ import annotations

from itertools import combinations

from . import scalars
from .errors import DegreeError
from .forms import Form, MultiVector, MvForm
from .linsolve import nullspace, solve_linear
from .multiindex import contract_index

__all__ = ["Span", "annihilator", "decompose_over"]


def decompose_over(generators, target):
    """Coefficients f_i with target = sum f_i * generators[i], or None.

    Works uniformly for Forms, MultiVectors and MvForms through their
    sparse ``data`` maps.
    """
    rows = []
    keys = set(target.data)
    for g in generators:
        keys |= set(g.data)
    for key in sorted(keys):
        coeffs = {}
        for i, g in enumerate(generators):
            c = g.data.get(key)
            if c is not None:
                coeffs[i] = c
        rows.append((coeffs, target.data.get(key, scalars.ZERO)))
    sol = solve_linear(rows, list(range(len(generators))))
    return sol


class Span:
    """A finitely generated module of homogeneous graded objects."""

    def __init__(self, chart, degree, generators, kind="form"):
        self.chart = chart
        self.degree = degree
        self.kind = kind
        self.generators = [g for g in generators]
        for g in self.generators:
            if g.chart != chart:
                raise DegreeError("span generator on wrong chart")
            if getattr(g, "degree", None) != degree:
                raise DegreeError(
                    f"span generator degree {getattr(g, 'degree', None)} != {degree}"
                )

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def zero_element(self):
        cls = Form if self.kind == "form" else MultiVector
        return cls.zero(self.chart, self.degree)

    def decompose(self, target):
        """Membership with witness: particular coefficient vector or None."""
        if target.is_zero():
            return LinearTrivial()
        sol = decompose_over(self.generators, target)
        return sol

    def contains(self, target):
        return self.decompose(target) is not None

    def kernel(self):
        """Module relations among the generators."""
        rows = []
        keys = set()
        for g in self.generators:
            keys |= set(g.data)
        for key in sorted(keys):
            coeffs = {}
            for i, g in enumerate(self.generators):
                c = g.data.get(key)
                if c is not None:
                    coeffs[i] = c
            rows.append(coeffs)
        return nullspace(rows, list(range(len(self.generators))))

    def reduced(self):
        """An independent generating sublist (greedy, order-preserving).

        Returns (span, kept_indices).  A generator is dropped iff it
        decomposes over the ones kept before it.
        """
        kept = []
        kept_idx = []
        seen_keys = set()
        seen_exact = set()
        for i, g in enumerate(self.generators):
            if g.is_zero():
                continue
            fingerprint = (frozenset(g.data.items()),)
            if fingerprint in seen_exact:
                continue
            if not set(g.data) <= seen_keys:
                kept.append(g)
                kept_idx.append(i)
                seen_keys |= set(g.data)
                seen_exact.add(fingerprint)
                continue
            if kept and decompose_over(kept, g) is not None:
                continue
            kept.append(g)
            kept_idx.append(i)
            seen_keys |= set(g.data)
            seen_exact.add(fingerprint)
        return Span(self.chart, self.degree, kept, self.kind), kept_idx

    def __repr__(self):
        return f"Span(degree={self.degree}, kind={self.kind}, n={len(self.generators)})"


class LinearTrivial:
    """Decomposition of the zero element: all coefficients zero."""

    particular: dict = {}
    kernel: list = []

    def is_unique(self):
        return True


def annihilator(span, p):
    """Generators of the order-p annihilator of a span of forms:
    all p-multivectors U with iota_U g = 0 for every generator g."""
    if span.kind != "form":
        raise DegreeError("annihilator expects a span of forms")
    if p > span.degree:
        raise DegreeError("annihilator order exceeds span degree")
    chart = span.chart
    unknowns = list(combinations(range(chart.m), p))
    rows = []
    for g in span.generators:
        eqs = {}
        for fidx, c in g.data.items():
            for vidx in combinations(fidx, p):
                sign, rest = contract_index(fidx, vidx)
                coeff = c if sign > 0 else scalars.sneg(c)
                eqs.setdefault(rest, {})
                acc = scalars.sadd(eqs[rest].get(vidx, scalars.ZERO), coeff)
                if acc == 0:
                    eqs[rest].pop(vidx, None)
                else:
                    eqs[rest][vidx] = acc
        for coeffs in eqs.values():
            if coeffs:
                rows.append(coeffs)
    basis = nullspace(rows, unknowns)
    gens = [
        MultiVector(chart, p, dict(vec), _normalized=False) for vec in basis
    ]
    return Span(chart, p, gens, kind="multivector")
