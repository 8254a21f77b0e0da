"""Hamiltonians, De Donder-Weyl equations, connections and the algebra of
special Hamiltonian forms."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import scalars
from .calculus import exterior_derivative
from .chart import Chart
from .errors import DegreeError, MembershipError, NotHamiltonianError
from .extensions import (
    bracket_ext1,
    bracket_extj,
    decompose_s1_power,
    sharp1_tilde,
    solve_sharp_j,
)
from .forms import (
    Form,
    MultiVector,
    MvForm,
    contract,
    contract_form,
    contract_form_slot,
    identity_tensor,
    wedge,
)
from .render import render, render_form
from .report import Report
from .structure import is_hamiltonian_form

__all__ = [
    "Hamiltonian",
    "is_hamiltonian",
    "Section",
    "Connection",
    "hdw_residuals",
    "gamma_H",
    "check_evolution",
    "is_special_hamiltonian",
    "check_subalgebra_condition",
]


def _vertical_vectors(chart):
    return [
        MultiVector(chart, 1, {(i,): scalars.ONE}, _normalized=True)
        for i in chart.fiber_indices()
    ]


def is_hamiltonian(form, structure, tower=None):
    """Decide whether an n-form is a Hamiltonian; returns (bool, diagnostics).

    Conditions: d H decomposes over wedge powers of S^1 and lies in
    S^{n+1}[n]; 1_n - sharp_1~(d H) is semi-basic modulo K_n; and
    sharp_1~(d H) annihilates every semi-basic n-form.
    """
    n = structure.n
    chart = structure.chart
    diagnostics = []
    if form.degree != n:
        return False, [f"degree {form.degree} != n"]
    dh = exterior_derivative(form)
    if decompose_s1_power(structure, dh) is None:
        return False, ["dH is not in the wedge power (S^1)^(n+1)"]
    if tower is not None:
        if not tower.is_admitted(dh):
            return False, ["dH is not in S^{n+1}[n]"]
    elif not dh.is_zero() and solve_sharp_j(structure, dh, n) is None:
        return False, ["dH is not in S^{n+1}[n]"]
    s1t = sharp1_tilde(dh, structure)
    defect = identity_tensor(chart, n) - s1t
    for v in _vertical_vectors(chart):
        slot = contract_form_slot(v, defect)
        if not structure.coset_is_zero(slot, n):
            diagnostics.append(
                f"1_n - sharp_1~(dH) is not semi-basic: fails along "
                f"{render(v)}"
            )
            return False, diagnostics
    vol = Form(chart, n, {tuple(range(n)): scalars.ONE}, _normalized=True)
    if contract(s1t, vol):
        return False, ["sharp_1~(dH) does not annihilate semi-basic n-forms"]
    return True, ["ok"]


@dataclass
class Hamiltonian:
    """A validated Hamiltonian n-form with its cached derivative data."""

    form: Form
    structure: object
    dform: Form = field(init=False)
    sharp1t: MvForm = field(init=False)
    tower: object = None

    def __post_init__(self):
        ok, diagnostics = is_hamiltonian(self.form, self.structure, self.tower)
        if not ok:
            raise NotHamiltonianError("; ".join(diagnostics))
        self.dform = exterior_derivative(self.form)
        self.sharp1t = sharp1_tilde(self.dform, self.structure)

    def bracket_with(self, alpha):
        """{alpha, H} through the first extension."""
        return bracket_ext1(alpha, self.form, self.structure)


class Section:
    """A local section of the fibration: every fiber coordinate becomes a
    formal function of the base coordinates."""

    def __init__(self, chart):
        self.chart = chart
        self.base_chart = Chart(base=chart.base_coords, fiber=[])
        for u in chart.fiber_coords:
            self.base_chart.declare_function(u, args=self.base_chart.coords)
        for fname, args in chart.functions.items():
            # formal functions survive with their fiber arguments composed
            self.base_chart.functions.setdefault(fname, tuple(args))

    def partial(self, fiber_name, mu):
        """The formal derivative symbol d(fiber)/d(x^mu), 1-based mu."""
        return self.base_chart.partial_symbol(
            fiber_name, self.base_chart.coords[mu - 1]
        )

    def pullback(self, form):
        """psi^* of a form: du -> sum du/dx^mu dx^mu, coefficients kept as
        formal functions of the base point."""
        n = self.chart.n
        out = Form.zero(self.base_chart, form.degree)
        for idx, c in form.data.items():
            term = Form.scalar_form(self.base_chart, c)
            for i in idx:
                if i < n:
                    one = Form.d_coord(self.base_chart, self.chart.coords[i])
                else:
                    name = self.chart.coords[i]
                    data = {}
                    for mu in range(1, n + 1):
                        data[(mu - 1,)] = self.partial(name, mu)
                    one = Form(self.base_chart, 1, data)
                term = wedge(term, one)
                if term.is_zero():
                    break
            out = out + term
        return out


def hdw_residuals(ham, section, generators):
    """Hamilton-De Donder-Weyl residuals psi^*(d alpha) - (d alpha + {alpha, H}) o psi.

    ``generators`` is a list of (label, Form) pairs of Hamiltonian
    (n-1)-forms; the section solves the field equations iff every residual
    is the zero n-form on the base.
    """
    out = []
    for label, alpha in generators:
        if not is_hamiltonian_form(alpha, ham.structure):
            raise NotHamiltonianError(f"{label} is not Hamiltonian")
        evolution = exterior_derivative(alpha) + ham.bracket_with(alpha)
        if not evolution.is_semibasic():
            raise MembershipError(
                f"evolution of {label} is not semi-basic: {render(evolution)}"
            )
        lhs = section.pullback(exterior_derivative(alpha))
        rhs = section.pullback(evolution)
        out.append((label, lhs - rhs, lhs, rhs))
    return out


def render_residual_equation(entry):
    """Text rendering `lhs == rhs` of one residual in base coordinates."""
    label, residual, lhs, rhs = entry
    return f"{label}: {render_form(lhs)} == {render_form(rhs)}"


@dataclass
class Connection:
    """A horizontal lift x^mu -> d/dx^mu + Gamma^u_mu d/du (modulo K_1)."""

    chart: Chart
    gammas: dict  # fiber coordinate name -> {mu (1-based) -> scalar}

    def lift(self, mu):
        data = {(mu - 1,): scalars.ONE}
        for u, row in self.gammas.items():
            c = row.get(mu)
            if c is not None and c != 0:
                data[(self.chart.index(u),)] = c
        return MultiVector(self.chart, 1, data)

    def horizontal_one_form(self, i):
        """h^* of the i-th coordinate differential."""
        chart = self.chart
        if i < chart.n:
            return Form(chart, 1, {(i,): scalars.ONE}, _normalized=True)
        name = chart.coords[i]
        row = self.gammas.get(name, {})
        return Form(chart, 1, {(mu - 1,): c for mu, c in row.items()})

    def pullback(self, form):
        """Pullback through the connection: substitute every differential
        by its horizontal part."""
        out = Form.zero(self.chart, form.degree)
        for idx, c in form.data.items():
            term = Form.scalar_form(self.chart, c)
            for i in idx:
                term = wedge(term, self.horizontal_one_form(i))
                if term.is_zero():
                    break
            out = out + term
        return out


def gamma_H(ham, table):
    """The connection induced by a vertical-valued extension at level n:
    dualize theta -> theta - iota_{sharp_n~(dH)} theta on S^1."""
    structure = ham.structure
    chart = structure.chart
    n = structure.n
    if table.j != n:
        raise DegreeError("gamma_H needs an extension table at level n")
    t = table.apply(ham.dform)
    if not t.vec_slot_vertical():
        raise MembershipError("sharp_n~(dH) is not vertical valued")
    defect = identity_tensor(chart, 1) - t
    for v in _vertical_vectors(chart):
        slot = contract_form_slot(v, defect)
        if not structure.coset_is_zero(slot, 1):
            raise MembershipError(
                "1_1 - sharp_n~(dH) is not semi-basic; the table does not "
                "induce a connection"
            )
    gammas = {}
    for u in chart.fiber_coords:
        du = Form.d_coord(chart, u)
        b = du - contract(t, du)
        if not b.is_semibasic():
            raise MembershipError(
                f"horizontal part of d({u}) is not semi-basic: {render(b)}"
            )
        row = {}
        for mu in range(1, n + 1):
            c = b.data.get((mu - 1,))
            if c is not None:
                row[mu] = c
        gammas[u] = row
    return Connection(chart, gammas)


def check_evolution(ham, table, connection, forms):
    """Verify h^*(d alpha) = d alpha + {alpha, H}_{sharp_n~} for the given
    Hamiltonian forms of degree <= n-1."""
    report = Report()
    for label, alpha in forms:
        dalpha = exterior_derivative(alpha)
        lhs = connection.pullback(dalpha)
        rhs = dalpha + bracket_extj(alpha, ham.form, table)
        ok = lhs == rhs
        report.add(
            f"evolution {label}",
            ok,
            "" if ok else f"h*(d alpha) = {render(lhs)} vs {render(rhs)}",
        )
    return report


def basic_constant_forms(chart, degree):
    """All constant-coefficient basic forms dx^I of the given degree."""
    out = []
    for idx in combinations(range(chart.n), degree):
        out.append(Form(chart, degree, {idx: scalars.ONE}, _normalized=True))
    return out


def is_special_hamiltonian(alpha, structure):
    """Special Hamiltonian: alpha ^ epsilon stays Hamiltonian for every
    closed basic (n-1-a)-form epsilon; constant-coefficient basic forms
    suffice because span membership is a module condition."""
    n = structure.n
    if not is_hamiltonian_form(alpha, structure):
        raise NotHamiltonianError(f"{render(alpha)} is not Hamiltonian")
    a = alpha.degree
    dalpha = exterior_derivative(alpha)
    for eps in basic_constant_forms(structure.chart, n - 1 - a):
        if not structure.contains(n, wedge(dalpha, eps)):
            return False
    return True


def check_subalgebra_condition(alpha, u_alpha, structure):
    """The sufficient subalgebra condition: sharp_{a+1}(d alpha) = U mod K,
    and for every constant basic b-form epsilon there is a nonzero constant
    C with sharp_{a+b+1}(d alpha ^ epsilon) = C iota_epsilon U mod K."""
    report = Report()
    n = structure.n
    a = alpha.degree
    if not is_hamiltonian_form(alpha, structure):
        raise NotHamiltonianError(f"{render(alpha)} is not Hamiltonian")
    dalpha = exterior_derivative(alpha)
    rep = structure.derive_sharp(a + 1, dalpha)
    ok = rep.equiv(u_alpha)
    report.add(
        "sharp(d alpha) = U",
        ok,
        "" if ok else f"{rep!r} vs {render(u_alpha)}",
    )
    for b in range(1, n - 1 - a + 1):
        for eps in basic_constant_forms(structure.chart, b):
            label = f"epsilon={render(eps)}"
            target = wedge(dalpha, eps)
            iota_u = contract_form(eps, u_alpha)
            if target.is_zero():
                ok = structure.coset_is_zero(iota_u, n - a - b) if iota_u else True
                report.add(label, ok, "" if ok else "zero wedge, nonzero iota")
                continue
            if not structure.contains(a + b + 1, target):
                report.add(label, False, "d alpha ^ epsilon left the tower")
                continue
            rep2 = structure.derive_sharp(a + b + 1, target)
            c_val = _solve_constant(structure, rep2.rep, iota_u, n - a - b)
            ok = c_val is not None and c_val != 0
            report.add(
                label,
                ok,
                f"C = {c_val}" if ok else "no nonzero constant matches",
            )
    return report


def _solve_constant(structure, rep, iota_u, p):
    """The scalar C with rep = C * iota_u modulo K_p, or None."""
    from .linsolve import solve_linear

    rows = []
    for gen in structure.levels[p]:
        lhs = contract(rep, gen.form)
        rhs = contract(iota_u, gen.form)
        keys = set(lhs.data) | set(rhs.data)
        for key in sorted(keys):
            rows.append(
                ({0: rhs.data.get(key, scalars.ZERO)}, lhs.data.get(key, scalars.ZERO))
            )
    sol = solve_linear(rows, [0])
    if sol is None:
        return None
    return sol.particular.get(0, scalars.ZERO)
