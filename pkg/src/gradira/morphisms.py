"""Structure-preserving maps: quotient by a fiber-coordinate drop and
restriction to an affine submanifold in adapted coordinates.

Both constructions work at level n (a graded Dirac structure is determined
by its top level) and rebuild the lower tower on the new chart.
"""

from __future__ import annotations

import sympy

from . import scalars
from .chart import Chart
from .errors import ChartError, MapSpecError
from .forms import Form, MultiVector, wedge
from .linsolve import nullspace, solve_linear
from .render import render
from .report import Report
from .spans import Span
from .structure import Structure, bracket, is_hamiltonian_form

__all__ = ["SubmersionDrop", "AffineEmbedding", "pushforward", "pullback",
           "check_dirac_map"]


class SubmersionDrop:
    """The projection forgetting some fiber coordinates of a chart."""

    def __init__(self, source_chart, dropped):
        self.source_chart = source_chart
        self.dropped = tuple(dropped)
        for name in self.dropped:
            if source_chart.index(name) < source_chart.n:
                raise ChartError(f"cannot drop base coordinate {name!r}")
        kept_fiber = [c for c in source_chart.fiber_coords if c not in self.dropped]
        if len(kept_fiber) != len(source_chart.fiber_coords) - len(self.dropped):
            raise ChartError("dropped coordinates must be distinct fiber coordinates")
        self.target_chart = Chart(base=source_chart.base_coords, fiber=kept_fiber)
        for fname, args in source_chart.functions.items():
            if not set(args) & set(self.dropped):
                self.target_chart.functions[fname] = args
        self._to_source = tuple(
            source_chart.index(c) for c in self.target_chart.coords
        )
        self._from_source = {j: i for i, j in enumerate(self._to_source)}
        self._dropped_idx = tuple(source_chart.index(c) for c in self.dropped)
        self._dropped_syms = {source_chart.sym(c) for c in self.dropped}

    def pull_form(self, form):
        """Injection of a target-chart form into the source chart."""
        data = {
            tuple(self._to_source[i] for i in idx): c for idx, c in form.data.items()
        }
        return Form(self.source_chart, form.degree, data)

    def push_vector(self, vec):
        """d(pi) applied to a source vector field; kept components must not
        involve the dropped coordinates."""
        data = {}
        for (i,), c in vec.data.items():
            if i in self._dropped_idx:
                continue
            if c.free_symbols & self._dropped_syms:
                raise MapSpecError(
                    f"pushed sharp value depends on dropped coordinates: {render(vec)}",
                    witness=vec,
                )
            data[(self._from_source[i],)] = c
        return MultiVector(self.target_chart, 1, data)

    def restrict_form(self, form):
        """Re-express a source form with no dropped content on the target chart."""
        data = {}
        for idx, c in form.data.items():
            if any(i in self._dropped_idx for i in idx):
                raise MapSpecError(
                    f"form {render(form)} has components along dropped coordinates",
                    witness=form,
                )
            if c.free_symbols & self._dropped_syms:
                raise MapSpecError(
                    f"coefficients of {render(form)} depend on dropped coordinates",
                    witness=form,
                )
            data[tuple(self._from_source[i] for i in idx)] = c
        return Form(self.target_chart, form.degree, data)


class AffineEmbedding:
    """An affine submanifold in adapted coordinates.

    ``substitutions`` expresses every ambient coordinate as an affine
    expression in the adapted coordinates (identity entries may be
    omitted for shared names).
    """

    def __init__(self, ambient_chart, adapted_chart, substitutions):
        self.source_chart = adapted_chart  # N, the domain of the embedding
        self.target_chart = ambient_chart  # M
        subs = {}
        for name in ambient_chart.coords:
            if name in substitutions:
                expr = sympy.sympify(substitutions[name], rational=True)
            else:
                expr = adapted_chart.sym(name)  # raises on unknown names
            allowed = set(adapted_chart.syms)
            if not expr.free_symbols <= allowed:
                raise ChartError(f"substitution for {name} uses unknown symbols")
            if expr.free_symbols and sympy.Poly(expr, *adapted_chart.syms).total_degree() > 1:
                raise ChartError(f"substitution for {name} is not affine")
            subs[name] = expr
        self.substitutions = subs
        for fname, args in ambient_chart.functions.items():
            mapped = []
            ok = True
            for a in args:
                expr = subs[a]
                if expr.is_Symbol and str(expr) in adapted_chart._index:
                    mapped.append(str(expr))
                else:
                    ok = False
                    break
            if ok and fname not in adapted_chart.functions:
                adapted_chart.functions[fname] = tuple(mapped)
        # d(ambient coord) = sum_j (d expr / d adapted_j) d(adapted_j), constant
        self._jacobian = {}
        for name, expr in subs.items():
            row = {}
            for j, s in enumerate(adapted_chart.syms):
                d = sympy.diff(expr, s)
                if d != 0:
                    row[j] = scalars.normalized(d)
            self._jacobian[ambient_chart.index(name)] = row

    def restrict_scalar(self, expr):
        mapping = {
            self.target_chart.sym(name): val
            for name, val in self.substitutions.items()
            if self.target_chart.sym(name) != val
        }
        return scalars.normalized(sympy.sympify(expr).subs(mapping))

    def pull_form(self, form):
        """i^* of an ambient form: substitute coefficients and expand each
        ambient differential through the constant Jacobian."""
        out = Form.zero(self.source_chart, form.degree)
        for idx, c in form.data.items():
            term = Form.scalar_form(self.source_chart, self.restrict_scalar(c))
            for i in idx:
                row = self._jacobian[i]
                one_form = Form(self.source_chart, 1,
                                {(j,): v for j, v in row.items()})
                term = wedge(term, one_form)
                if term.is_zero():
                    break
            out = out + term
        return out

    def constraint_functions(self):
        """Affine functions on the ambient chart vanishing on the image."""
        m = self.target_chart.m
        # unknowns: lambda_i per ambient coordinate plus a constant
        unknowns = list(range(m + 1))
        rows = {}
        for i, name in enumerate(self.target_chart.coords):
            expr = self.substitutions[name]
            poly = sympy.Poly(expr, *self.source_chart.syms)
            for exps, coeff in poly.terms():
                key = exps
                rows.setdefault(key, {})[i] = coeff
        rows.setdefault(tuple([0] * self.source_chart.m), {})[m] = scalars.ONE
        basis = nullspace(list(rows.values()), unknowns)
        out = []
        for vec in basis:
            expr = sympy.Integer(0)
            for i, c in vec.items():
                expr += c * (self.target_chart.syms[i] if i < m else 1)
            out.append(scalars.normalized(expr))
        return out

    def tangent_pushforwards(self):
        """The images of the adapted coordinate vectors, as ambient vectors."""
        out = []
        for j in range(self.source_chart.m):
            data = {}
            for i, row in self._jacobian.items():
                if j in row:
                    data[(i,)] = row[j]
            out.append(MultiVector(self.target_chart, 1, data))
        return out


def pushforward(structure, spec):
    """Quotient structure under a fiber-coordinate drop; the symbolic
    fiber-independence checks carry a witness on failure."""
    if spec.source_chart != structure.chart:
        raise ChartError("drop spec chart mismatch")
    gens = structure.generators(structure.n)
    values = structure.sharp_values(structure.n)
    dropped_idx = set(spec._dropped_idx)
    # combinations with no component along a dropped differential
    rows = []
    keys = set()
    for g in gens:
        keys |= set(g.data)
    for key in sorted(keys):
        if not set(key) & dropped_idx:
            continue
        coeffs = {}
        for i, g in enumerate(gens):
            c = g.data.get(key)
            if c is not None:
                coeffs[i] = c
        rows.append(coeffs)
    basis = nullspace(rows, list(range(len(gens))))
    new_gens = []
    new_vals = []
    for vec in basis:
        form = Form.zero(structure.chart, structure.n)
        value = MultiVector.zero(structure.chart, 1)
        for i, c in vec.items():
            form = form + c * gens[i]
            value = value + c * values[i]
        new_gens.append(spec.restrict_form(form))
        new_vals.append(spec.push_vector(value))
    return Structure(spec.target_chart, new_gens, new_vals)


def pullback(structure, spec):
    """Restriction to an affine submanifold: generators with sharp value
    tangent to the image, pulled back, with sharp re-expressed in the
    adapted chart (modulo the ambient K_1 when it is nonzero)."""
    if spec.target_chart != structure.chart:
        raise ChartError("embedding chart mismatch")
    n = structure.n
    gens = structure.generators(n)
    values = structure.sharp_values(n)
    constraints = spec.constraint_functions()
    k1 = structure.annihilator_span(1) if _k1_nonzero(structure) else None
    k1_gens = list(k1) if k1 is not None else []
    unknowns = [("f", i) for i in range(len(gens))] + [
        ("k", l) for l in range(len(k1_gens))
    ]
    rows = []
    for phi in constraints:
        grad = {
            i: scalars.normalized(sympy.diff(phi, s))
            for i, s in enumerate(structure.chart.syms)
        }
        coeffs = {}
        for i, v in enumerate(values):
            acc = scalars.ZERO
            for (ci,), c in v.data.items():
                g = grad.get(ci, scalars.ZERO)
                if g != 0:
                    acc = scalars.sadd(acc, spec.restrict_scalar(scalars.smul(c, g)))
            if acc != 0:
                coeffs[("f", i)] = acc
        for l, kv in enumerate(k1_gens):
            acc = scalars.ZERO
            for (ci,), c in kv.data.items():
                g = grad.get(ci, scalars.ZERO)
                if g != 0:
                    acc = scalars.sadd(acc, spec.restrict_scalar(scalars.smul(c, g)))
            if acc != 0:
                coeffs[("k", l)] = acc
        if coeffs:
            rows.append(coeffs)
    basis = nullspace(rows, unknowns)
    pushed = spec.tangent_pushforwards()
    new_gens = []
    new_vals = []
    for vec in basis:
        if all(key[0] != "f" for key in vec):
            continue
        form = Form.zero(structure.chart, n)
        value = MultiVector.zero(structure.chart, 1)
        for key, c in vec.items():
            kind, i = key
            if kind == "f":
                form = form + c * gens[i]
                value = value + c * values[i]
            else:
                value = value + c * k1_gens[i]
        pulled = spec.pull_form(form)
        if pulled.is_zero():
            continue
        new_gens.append(pulled)
        new_vals.append(_express_tangent(spec, structure, value))
    span, kept = Span(spec.source_chart, n, new_gens).reduced()
    new_gens = [new_gens[i] for i in kept]
    new_vals = [new_vals[i] for i in kept]
    return Structure(spec.source_chart, new_gens, new_vals)


def _k1_nonzero(structure):
    """K_1 = 0 iff the S^1 level spans all coordinate differentials."""
    span = structure.span(1)
    for i in range(structure.chart.m):
        probe = Form(structure.chart, 1, {(i,): scalars.ONE}, _normalized=True)
        if not span.contains(probe):
            return True
    return False


def _express_tangent(spec, structure, value):
    """Solve push(W) = value (restricted to the image) for an adapted-chart
    vector W; the solution is unique since the embedding is injective."""
    pushed = spec.tangent_pushforwards()
    rows = []
    m = spec.target_chart.m
    for i in range(m):
        coeffs = {}
        for j, pv in enumerate(pushed):
            c = pv.data.get((i,))
            if c is not None:
                coeffs[j] = c
        rhs = spec.restrict_scalar(value.data.get((i,), scalars.ZERO))
        if coeffs or rhs != 0:
            rows.append((coeffs, rhs))
    sol = solve_linear(rows, list(range(spec.source_chart.m)))
    if sol is None:
        raise MapSpecError(
            f"sharp value {render(value)} is not tangent to the embedding",
            witness=value,
        )
    data = {(j,): c for j, c in sol.particular.items()}
    return MultiVector(spec.source_chart, 1, data)


def check_dirac_map(spec, source, target, samples):
    """Verify {f^* alpha, f^* beta} = f^* {alpha, beta} on sampled pairs of
    Hamiltonian forms living on the target structure."""
    report = Report()
    for k, (alpha, beta) in enumerate(samples):
        pa = spec.pull_form(alpha)
        pb = spec.pull_form(beta)
        if not (is_hamiltonian_form(pa, source) and is_hamiltonian_form(pb, source)):
            report.add(f"dirac-map pair {k}", False, "pullback is not Hamiltonian")
            continue
        lhs = bracket(pa, pb, source)
        rhs = spec.pull_form(bracket(alpha, beta, target))
        ok = lhs == rhs
        report.add(
            f"dirac-map pair {k}",
            ok,
            "" if ok else f"residual {render(lhs - rhs)}",
        )
    return report
