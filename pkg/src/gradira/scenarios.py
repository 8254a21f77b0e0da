"""Built-in scenarios: the extended and reduced canonical structures of
multisymplectic field theory and the Yang-Mills constraint chart.

The reduced structure is built the way the theory constructs it: the
extended chart carries the Liouville potential, its differential induces
sharp_n through the musical isomorphism, and the quotient by the
semi-basic direction is a pushforward.  Yang-Mills starts from the
reduced structure over the connection coordinates and restricts to the
antisymmetric-momentum locus by an affine pullback.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy

from .chart import Chart
from .errors import ChartError
from .forms import Form, MultiVector, contract, volume_contraction, wedge
from .calculus import exterior_derivative
from .morphisms import AffineEmbedding, SubmersionDrop, pullback, pushforward
from .structure import Structure

__all__ = ["Scenario", "extended_canonical", "reduced_canonical", "yang_mills",
           "scenario"]


@dataclass
class Scenario:
    name: str
    structure: Structure
    params: dict
    hamiltonian_form: Form | None = None
    hamiltonian_generators: list = field(default_factory=list)
    extended: Structure | None = None
    ambient: Structure | None = None
    embedding: AffineEmbedding | None = None
    drop: SubmersionDrop | None = None
    structure_constants: dict | None = None

    @property
    def chart(self):
        return self.structure.chart


def _canonical_charts(n, fields, momentum_name):
    base = [f"x{mu}" for mu in range(1, n + 1)]
    momenta = [momentum_name(u, mu) for u in fields for mu in range(1, n + 1)]
    extended = Chart(base=base, fiber=list(fields) + ["p"] + momenta)
    return extended


def extended_canonical(n, k=1, fields=None, momentum_name=None):
    """The multisymplectic chart of (n-1)-horizontal n-forms with the
    structure induced by the canonical multisymplectic form."""
    if fields is None:
        fields = [f"y{i}" for i in range(1, k + 1)]
    if momentum_name is None:
        momentum_name = lambda u, mu: f"p{mu}_{u[1:]}"
    chart = _canonical_charts(n, fields, momentum_name)
    theta = Form.scalar_form(chart, chart.sym("p"))
    theta = wedge(theta, volume_contraction(chart, []))
    for u in fields:
        for mu in range(1, n + 1):
            pm = Form.scalar_form(chart, chart.sym(momentum_name(u, mu)))
            theta = theta + wedge(
                wedge(pm, Form.d_coord(chart, u)), volume_contraction(chart, [mu - 1])
            )
    omega = -exterior_derivative(theta)
    gens = []
    values = []
    for name in chart.coords:
        v = MultiVector.coord_vector(chart, name)
        flat = contract(v, omega)
        if flat.is_zero():
            raise ChartError("canonical multisymplectic form is degenerate?")
        gens.append(flat)
        values.append(v)
    structure = Structure(chart, gens, values)
    return Scenario(
        name="extended-canonical",
        structure=structure,
        params={"n": n, "fields": list(fields)},
    )


def reduced_canonical(n, k=1, fields=None, momentum_name=None, declare_h=True):
    """The quotient of the extended canonical structure by the semi-basic
    direction, with the canonical Hamiltonian H d^n x - p dy ^ d^{n-1}x."""
    if fields is None:
        fields = [f"y{i}" for i in range(1, k + 1)]
    if momentum_name is None:
        momentum_name = lambda u, mu: f"p{mu}_{u[1:]}"
    ext = extended_canonical(n, fields=fields, momentum_name=momentum_name)
    drop = SubmersionDrop(ext.chart, ["p"])
    structure = pushforward(ext.structure, drop)
    chart = structure.chart
    ham = None
    gens = []
    if declare_h:
        chart.declare_function("H")
        ham = Form.scalar_form(chart, sympy.Symbol("H"))
        ham = wedge(ham, volume_contraction(chart, []))
        for u in fields:
            for mu in range(1, n + 1):
                pm = Form.scalar_form(chart, chart.sym(momentum_name(u, mu)))
                ham = ham - wedge(
                    wedge(pm, Form.d_coord(chart, u)),
                    volume_contraction(chart, [mu - 1]),
                )
    for u in fields:
        for mu in range(1, n + 1):
            gens.append(
                (
                    f"{u} dX[{mu}]",
                    Form.scalar_form(chart, chart.sym(u))
                    * volume_contraction(chart, [mu - 1]),
                )
            )
    for u in fields:
        beta = Form.zero(chart, n - 1)
        for mu in range(1, n + 1):
            beta = beta + Form.scalar_form(
                chart, chart.sym(momentum_name(u, mu))
            ) * volume_contraction(chart, [mu - 1])
        gens.append((f"p^mu_{u} dX[mu]", beta))
    for mu in range(1, n + 1):
        gens.append((f"dX[{mu}]", volume_contraction(chart, [mu - 1])))
    return Scenario(
        name="reduced-canonical",
        structure=structure,
        params={"n": n, "fields": list(fields)},
        hamiltonian_form=ham,
        hamiltonian_generators=gens,
        extended=ext.structure,
        drop=drop,
    )


def _structure_constants(algebra, dim):
    if algebra == "abelian":
        return {}, dim
    if algebra == "su2":
        eps = {}
        for i, j, k in [(1, 2, 3), (2, 3, 1), (3, 1, 2)]:
            eps[(i, j, k)] = sympy.Integer(1)
            eps[(i, k, j)] = sympy.Integer(-1)
        return eps, 3
    raise ChartError(f"unsupported algebra {algebra!r}")


def _check_lie_algebra(f, dim):
    def c(i, j, k):
        return f.get((i, j, k), sympy.Integer(0))

    for i in range(1, dim + 1):
        for j in range(1, dim + 1):
            for k in range(1, dim + 1):
                if c(k, i, j) + c(k, j, i) != 0:
                    raise ChartError("structure constants are not antisymmetric")
    for i in range(1, dim + 1):
        for j in range(1, dim + 1):
            for k in range(1, dim + 1):
                for m in range(1, dim + 1):
                    acc = sympy.Integer(0)
                    for l in range(1, dim + 1):
                        acc += c(m, i, l) * c(l, j, k)
                        acc += c(m, j, l) * c(l, k, i)
                        acc += c(m, k, l) * c(l, i, j)
                    if sympy.simplify(acc) != 0:
                        raise ChartError("structure constants violate Jacobi")


def yang_mills(n=3, algebra="su2", dim=1, signature=None):
    """The Yang-Mills constraint chart: reduced canonical structure over
    the connection coordinates A^i_mu restricted to the antisymmetric
    momentum locus, with the Yang-Mills Hamiltonian."""
    f, dim = _structure_constants(algebra, dim if algebra == "abelian" else 3)
    _check_lie_algebra(f, dim)
    if signature is None:
        signature = tuple(1 for _ in range(n))
    if len(signature) != n or any(s not in (1, -1) for s in signature):
        raise ChartError("signature must be +-1 diagonal of length n")

    fields = [f"A{i}_{mu}" for i in range(1, dim + 1) for mu in range(1, n + 1)]

    def momentum_name(u, mu):
        i, fmu = u[1:].split("_")
        return f"p{fmu}{mu}_{i}"

    red = reduced_canonical(n, fields=fields, momentum_name=momentum_name,
                            declare_h=False)
    ambient = red.structure
    base = [f"x{mu}" for mu in range(1, n + 1)]
    pts = [
        f"pt{mu}{nu}_{i}"
        for i in range(1, dim + 1)
        for mu in range(1, n + 1)
        for nu in range(mu + 1, n + 1)
    ]
    adapted = Chart(base=base, fiber=fields + pts)
    subs = {}
    for i in range(1, dim + 1):
        for mu in range(1, n + 1):
            for nu in range(1, n + 1):
                name = f"p{mu}{nu}_{i}"
                if mu == nu:
                    subs[name] = sympy.Integer(0)
                elif mu < nu:
                    subs[name] = adapted.sym(f"pt{mu}{nu}_{i}")
                else:
                    subs[name] = -adapted.sym(f"pt{nu}{mu}_{i}")
    emb = AffineEmbedding(ambient.chart, adapted, subs)
    structure = pullback(ambient, emb)
    chart = structure.chart

    def pt(mu, nu, i):
        """ptilde^{mu nu}_i with the antisymmetry convention baked in."""
        if mu == nu:
            return sympy.Integer(0)
        if mu < nu:
            return chart.sym(f"pt{mu}{nu}_{i}")
        return -chart.sym(f"pt{nu}{mu}_{i}")

    def fc(i, j, k):
        return f.get((i, j, k), sympy.Integer(0))

    # H = (-1/4 pt^{mu nu}_i pt^i_{mu nu} + 1/2 f^i_{jk} pt^{mu nu}_i A^j_mu A^k_nu) d^n x
    #     - pt^{mu nu}_i dA^i_mu ^ d^{n-1}x_nu          (flat metric, sqrt|g| = 1)
    # The f-term index order is the curvature-convention pin: it makes the
    # bracket-generated equations of motion read
    #   dA^i_mu/dx^nu - dA^i_nu/dx^mu = -pt^i_{mu nu} + f^i_{jk} A^j_mu A^k_nu.
    h_scal = sympy.Integer(0)
    for i in range(1, dim + 1):
        for mu in range(1, n + 1):
            for nu in range(1, n + 1):
                lowered = signature[mu - 1] * signature[nu - 1] * pt(mu, nu, i)
                h_scal += -sympy.Rational(1, 4) * pt(mu, nu, i) * lowered
                for j in range(1, dim + 1):
                    for k in range(1, dim + 1):
                        h_scal += (
                            sympy.Rational(1, 2)
                            * fc(i, j, k)
                            * pt(mu, nu, i)
                            * chart.sym(f"A{j}_{mu}")
                            * chart.sym(f"A{k}_{nu}")
                        )
    ham = Form.scalar_form(chart, h_scal) * volume_contraction(chart, [])
    for i in range(1, dim + 1):
        for mu in range(1, n + 1):
            for nu in range(1, n + 1):
                c = pt(mu, nu, i)
                if c == 0:
                    continue
                ham = ham - Form.scalar_form(chart, c) * wedge(
                    Form.d_coord(chart, f"A{i}_{mu}"),
                    volume_contraction(chart, [nu - 1]),
                )

    gens = []
    for i in range(1, dim + 1):
        for mu in range(1, n + 1):
            for nu in range(mu + 1, n + 1):
                alpha = Form.scalar_form(chart, chart.sym(f"A{i}_{mu}")) * \
                    volume_contraction(chart, [nu - 1]) - \
                    Form.scalar_form(chart, chart.sym(f"A{i}_{nu}")) * \
                    volume_contraction(chart, [mu - 1])
                gens.append((f"A{i}_[{mu}|{nu}]", alpha))
    for i in range(1, dim + 1):
        for mu in range(1, n + 1):
            beta = Form.zero(chart, n - 1)
            for nu in range(1, n + 1):
                c = pt(mu, nu, i)
                if c == 0:
                    continue
                beta = beta + Form.scalar_form(chart, c) * volume_contraction(
                    chart, [nu - 1]
                )
            gens.append((f"pt{mu}._{i}", beta))
    return Scenario(
        name="yang-mills",
        structure=structure,
        params={"n": n, "algebra": algebra, "dim": dim, "signature": tuple(signature)},
        hamiltonian_form=ham,
        hamiltonian_generators=gens,
        ambient=ambient,
        embedding=emb,
        structure_constants=f,
    )


def canonical_extension_table(scn, style="symmetric"):
    """An admissible vertical-valued extension table at level n for the
    reduced canonical scenario.

    style='symmetric': the symmetric-trace values
        dy^j ^ d^n x        -> 1/n dx^mu (x) d/dp^mu_j
        dp^a_j ^ d^n x      -> -dx^a (x) d/dy^j          (pairing-fixed sign)
        dy^j ^ dp^mu_k ^ d^{n-1}x_mu -> dy^j (x) d/dy^k + dp^mu_k (x) d/dp^mu_j
    style='solved': the lexicographically-pivoted minimal-support solve.
    Both are verified against the defining pairing at construction.
    """
    from .extensions import ExtensionTable, build_span_tower, solve_sharp_j
    from .forms import MvForm

    structure = scn.structure
    chart = structure.chart
    n = structure.n
    fields = scn.params["fields"]
    if style == "solved":
        return build_span_tower(structure, n + 1, n, vertical=True).table()
    momentum = scn.params.get("momentum_name") or (lambda u, mu: f"p{mu}_{u[1:]}")
    vol = volume_contraction(chart, [])
    entries = []
    for u in fields:
        theta = wedge(Form.d_coord(chart, u), vol)
        value = MvForm.zero(chart, 1, 1)
        for mu in range(1, n + 1):
            value = value + sympy.Rational(1, n) * MvForm.tensor(
                Form.d_coord(chart, f"x{mu}"),
                MultiVector.coord_vector(chart, momentum(u, mu)),
            )
        entries.append((theta, value))
    for u in fields:
        for mu in range(1, n + 1):
            theta = wedge(Form.d_coord(chart, momentum(u, mu)), vol)
            value = -MvForm.tensor(
                Form.d_coord(chart, f"x{mu}"), MultiVector.coord_vector(chart, u)
            )
            entries.append((theta, value))
    for u in fields:
        for w in fields:
            theta = Form.zero(chart, n + 1)
            value = MvForm.tensor(
                Form.d_coord(chart, u), MultiVector.coord_vector(chart, w)
            )
            for mu in range(1, n + 1):
                theta = theta + wedge(
                    Form.d_coord(chart, u),
                    wedge(Form.d_coord(chart, momentum(w, mu)),
                          volume_contraction(chart, [mu - 1])),
                )
                value = value + MvForm.tensor(
                    Form.d_coord(chart, momentum(w, mu)),
                    MultiVector.coord_vector(chart, momentum(u, mu)),
                )
            entries.append((theta, value))
    _, freedom = solve_sharp_j(
        structure,
        Form.zero(chart, n + 1),
        n,
        rhs_mvform=MvForm.zero(chart, n, n),
        vertical=True,
    )
    return ExtensionTable(structure, n, entries, freedom=freedom)


def scenario(name, **params):
    """Factory used by the CLI: extended-canonical, reduced-canonical,
    yang-mills."""
    if name == "extended-canonical":
        return extended_canonical(params.get("n", 2), params.get("fields", 1))
    if name == "reduced-canonical":
        return reduced_canonical(params.get("n", 2), params.get("fields", 1))
    if name == "yang-mills":
        return yang_mills(
            params.get("n", 3),
            params.get("algebra", "su2"),
            dim=params.get("fields", 1),
            signature=params.get("signature"),
        )
    raise ChartError(f"unknown scenario {name!r}")
