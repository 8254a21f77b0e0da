"""Graded Dirac structures on a chart.

A Structure is determined by the top span S^n together with the sharp_n
values of its generators; the lower tower S^a = iota_{TM} S^{a+1} and the
derived maps sharp_a(iota_U alpha) = sharp_n(alpha) ^ U are computed at
build time.  All sharp values are cosets modulo the annihilators K_p, and
coset equality is decided by contracting against the S^p generators.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import scalars
from .calculus import exterior_derivative, lie_derivative, schouten
from .errors import DegreeError, MembershipError, NonWellDefinedError, NotHamiltonianError
from .forms import Form, MultiVector, contract, wedge
from .render import render
from .report import Report
from .spans import Span, annihilator, decompose_over

__all__ = ["Structure", "CosetRep", "TowerGen", "deg_h", "is_hamiltonian_form",
           "bracket", "verify_axioms", "verify_fibered"]


def deg_h(form_or_degree, n):
    """Homogeneity degree (n - 1) - deg."""
    a = form_or_degree if isinstance(form_or_degree, int) else form_or_degree.degree
    return (n - 1) - a


@dataclass
class TowerGen:
    """A tower generator with a chosen representative of its sharp value."""

    form: Form
    sharp: MultiVector


class CosetRep:
    """A multivector (or multivector valued form) modulo K_p.

    Equality against another representative with the same modulus is the
    contraction test against the S^p generators.
    """

    def __init__(self, rep, modulus_degree, structure):
        self.rep = rep
        self.modulus_degree = modulus_degree
        self.structure = structure

    def equiv(self, other):
        if isinstance(other, CosetRep):
            if other.modulus_degree != self.modulus_degree:
                return False
            other = other.rep
        diff_rep = self.rep - other
        return self.structure.coset_is_zero(diff_rep, self.modulus_degree)

    def is_null(self):
        return self.structure.coset_is_zero(self.rep, self.modulus_degree)

    def __eq__(self, other):
        return self.equiv(other)

    def __repr__(self):
        return f"{render(self.rep)}  (mod K_{self.modulus_degree})"


def _scalar_ratio(candidate, reference):
    """lam with candidate = lam * reference for a nonzero scalar lam, else None."""
    if set(candidate.data) != set(reference.data):
        return None
    ratio = None
    for key, c in reference.data.items():
        r = scalars.sdiv(candidate.data[key], c)
        if ratio is None:
            ratio = r
        elif ratio != r:
            return None
    return ratio


def _averaged_gen(candidates, chosen):
    """Average the sharp values of all candidates proportional to the
    chosen one.  Any single provenance is a valid representative modulo K;
    the mean is the canonical, basis-symmetric choice (it produces e.g. the
    1/n coefficients of the canonical sharp_1 table)."""
    values = []
    for cand in candidates:
        lam = _scalar_ratio(cand.form, chosen.form)
        if lam is not None:
            values.append(scalars.sdiv(scalars.ONE, lam) * cand.sharp)
    total = values[0]
    for v in values[1:]:
        total = total + v
    import sympy

    return TowerGen(chosen.form, sympy.Rational(1, len(values)) * total)


class Structure:
    """A regular graded Dirac structure of order n on a fibered chart."""

    def __init__(self, chart, generators, sharps, validate=True):
        if len(generators) != len(sharps):
            raise DegreeError("generator and sharp lists differ in length")
        self.chart = chart
        self.n = chart.n
        for g in generators:
            if g.degree != self.n:
                raise DegreeError("S^n generators must have degree n")
        for v in sharps:
            if v.degree != 1:
                raise DegreeError("sharp_n values must be vector fields")
        self.levels = {self.n: [TowerGen(g, v) for g, v in zip(generators, sharps)]}
        self._build_tower()
        self._canonicalize_null_values()
        self._kernel_checked = set()
        if validate:
            self._check_function_linearity()

    # -- tower -------------------------------------------------------------

    def _build_tower(self):
        chart = self.chart
        for a in range(self.n - 1, 0, -1):
            candidates = []
            for gen in self.levels[a + 1]:
                for i in range(chart.m):
                    v = MultiVector(chart, 1, {(i,): scalars.ONE}, _normalized=True)
                    form = contract(v, gen.form)
                    if form.is_zero():
                        continue
                    candidates.append(TowerGen(form, wedge(gen.sharp, v)))
            span = Span(chart, a, [c.form for c in candidates])
            _, kept = span.reduced()
            self.levels[a] = [
                _averaged_gen(candidates, candidates[i]) for i in kept
            ]

    def _canonicalize_null_values(self):
        """Replace K-null derived sharp representatives by the zero
        multivector (the canonical representative of the zero coset)."""
        for a in range(1, self.n):
            p = self.n + 1 - a
            for gen in self.levels[a]:
                if gen.sharp and self.coset_is_zero(gen.sharp, p):
                    gen.sharp = MultiVector.zero(self.chart, p)

    def span(self, a):
        if a < 1 or a > self.n:
            raise DegreeError(f"no tower level {a} (1..{self.n})")
        return Span(self.chart, a, [g.form for g in self.levels[a]])

    def generators(self, a):
        return [g.form for g in self.levels[a]]

    def sharp_values(self, a):
        return [g.sharp for g in self.levels[a]]

    # -- cosets ------------------------------------------------------------

    def coset_is_zero(self, rep, p):
        """Does the representative lie in (Lambda (x)) K_p?  Tested by
        contraction against the S^p generators."""
        if rep.is_zero():
            return True
        if isinstance(rep, MultiVector):
            degree = rep.degree
        else:
            degree = rep.vec_degree
        if degree != p:
            raise DegreeError(f"representative degree {degree} != modulus {p}")
        for g in self.levels[p]:
            if contract(rep, g.form):
                return False
        return True

    def annihilator_span(self, p):
        """Explicit K_p generators (kernel extraction; exponential in p)."""
        return annihilator(self.span(p), p)

    # -- sharps ------------------------------------------------------------

    def _check_decomposition_kernel(self, a, kernel):
        """All decompositions must induce the same sharp value mod K."""
        for vec in kernel:
            rel = MultiVector.zero(self.chart, self.n + 1 - a)
            for i, c in vec.items():
                rel = rel + c * self.levels[a][i].sharp
            if not self.coset_is_zero(rel, self.n + 1 - a):
                raise NonWellDefinedError(
                    f"sharp_{a} depends on the decomposition; offending relation "
                    + render(rel)
                )

    def _check_function_linearity(self):
        """sharp_n must be well defined on the span modulo K_1."""
        span = self.span(self.n)
        self._check_decomposition_kernel(self.n, span.kernel())
        self._kernel_checked.add(self.n)

    def derive_sharp(self, a, theta):
        """sharp_a(theta) as a CosetRep of degree n+1-a.

        Decomposes theta over the level-a tower generators (each of which
        is a contraction iota_U alpha of a top generator, so this realizes
        sharp_a(iota_U alpha) = sharp_n(alpha) ^ U), checks that the value
        does not depend on the decomposition, and returns the coset.
        """
        if theta.degree != a:
            raise DegreeError(f"theta has degree {theta.degree}, expected {a}")
        p = self.n + 1 - a
        if theta.is_zero():
            return CosetRep(MultiVector.zero(self.chart, p), p, self)
        sol = decompose_over(self.generators(a), theta)
        if sol is None:
            raise MembershipError(f"{render(theta)} is not in S^{a}")
        if a not in self._kernel_checked:
            self._check_decomposition_kernel(a, self.span(a).kernel())
            self._kernel_checked.add(a)
        rep = MultiVector.zero(self.chart, p)
        for i, c in sol.particular.items():
            rep = rep + c * self.levels[a][i].sharp
        return CosetRep(rep, p, self)

    def contains(self, a, theta):
        if theta.degree != a:
            return False
        if theta.is_zero():
            return True
        if a > self.n:
            return False
        return self.span(a).contains(theta)

    def __repr__(self):
        return f"Structure(n={self.n}, chart={self.chart!r})"


# ---------------------------------------------------------------------------
# Hamiltonian forms and the graded Poisson bracket
# ---------------------------------------------------------------------------


def is_hamiltonian_form(alpha, structure):
    """True iff d(alpha) takes values in S^{deg+1} and 0 <= deg <= n-1."""
    n = structure.n
    if not 0 <= alpha.degree <= n - 1:
        raise DegreeError(
            f"Hamiltonian forms have degree 0..{n - 1}, got {alpha.degree}"
        )
    return structure.contains(alpha.degree + 1, exterior_derivative(alpha))


def bracket(alpha, beta, structure):
    """The graded Poisson bracket
    {alpha, beta} = (-1)^{deg_H beta} iota_{sharp_{b+1}(d beta)} d alpha."""
    n = structure.n
    if not is_hamiltonian_form(alpha, structure):
        raise NotHamiltonianError(f"{render(alpha)} is not Hamiltonian")
    if not is_hamiltonian_form(beta, structure):
        raise NotHamiltonianError(f"{render(beta)} is not Hamiltonian")
    a, b = alpha.degree, beta.degree
    out_degree = a + b - (n - 1)
    if out_degree < 0:
        return Form.zero(structure.chart, 0)
    dbeta = exterior_derivative(beta)
    rep = structure.derive_sharp(b + 1, dbeta)
    value = contract(rep.rep, exterior_derivative(alpha))
    if deg_h(beta, n) % 2:
        value = -value
    return value


# ---------------------------------------------------------------------------
# axiom verification
# ---------------------------------------------------------------------------


def verify_axioms(structure):
    """Skew-symmetry and integrability of the sharp family on all
    generator pairs; failures carry the witness pair.

    Generator coverage suffices: both defects are function-linear in each
    argument, so vanishing on a module generating set is vanishing on the
    whole span."""
    report = Report()
    n = structure.n
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            if a + b < n + 1:
                continue
            for i, gen_a in enumerate(structure.levels[a]):
                for j, gen_b in enumerate(structure.levels[b]):
                    if b == a and j < i:
                        continue
                    _check_pair(structure, report, a, b, i, j, gen_a, gen_b)
    return report


def _check_pair(structure, report, a, b, i, j, gen_a, gen_b):
    n = structure.n
    alpha, u = gen_a.form, gen_a.sharp
    beta, v = gen_b.form, gen_b.sharp
    p, q = n + 1 - a, n + 1 - b
    lhs = contract(u, beta)
    rhs = contract(v, alpha)
    skew_ok = lhs == (-rhs if (p * q) % 2 else rhs)
    report.add(
        f"skew a={a}.{i} b={b}.{j}",
        skew_ok,
        "" if skew_ok else f"iota_sharp({render(alpha)}) {render(beta)} = {render(lhs)} vs {render(rhs)}",
    )
    # integrability
    sq = -1 if q % 2 else 1
    spq = -1 if (p * q) % 2 else 1
    spm1q = -1 if ((p - 1) * q) % 2 else 1
    theta = (
        spm1q * lie_derivative(u, beta)
        + sq * lie_derivative(v, alpha)
        - sympy_rational_half(sq) * exterior_derivative(
            contract(v, alpha) + spq * contract(u, beta)
        )
    )
    c = a + b - n
    in_span = structure.contains(c, theta)
    if not in_span:
        report.add(
            f"integrable a={a}.{i} b={b}.{j}",
            False,
            f"defect form {render(theta)} is not in S^{c}",
        )
        return
    lieb = schouten(u, v)
    if theta.is_zero():
        ok = structure.coset_is_zero(lieb, p + q - 1)
    else:
        rep = structure.derive_sharp(c, theta)
        ok = rep.equiv(lieb)
    report.add(
        f"integrable a={a}.{i} b={b}.{j}",
        ok,
        "" if ok else f"sharp of {render(theta)} differs from [U, V] = {render(lieb)}",
    )


def sympy_rational_half(sign):
    import sympy

    return sympy.Rational(sign, 2)


def check_flatness_witnesses(structure, generation=None, symmetries=None):
    """Check user-supplied witnesses for the flatness hypotheses.

    ``generation`` maps a level a to witness groups for
    S^a = < sum_j d(f_j) ^ d(gamma_j) >: each group is a list of
    (scalar, Hamiltonian form) pairs whose summed product forms must span
    the level.  ``symmetries`` maps a level a to (gammas, xs): Hamiltonian
    forms with S^a = <d gamma_j>, vector fields with L_X gamma_j = 0, and
    (for a >= 2) S^{a-1} = <d iota_X gamma_j>.

    Witnesses are only verified, never searched for.
    """
    from .calculus import lie_derivative

    report = Report()
    n = structure.n
    for a, groups in (generation or {}).items():
        forms = []
        for g, group in enumerate(groups):
            total = Form.zero(structure.chart, a)
            for f, gamma in group:
                ok = is_hamiltonian_form(gamma, structure)
                report.add(
                    f"flat-i gamma a={a}.{g} {render(gamma)}", ok,
                    "" if ok else "witness form is not Hamiltonian",
                )
                df = exterior_derivative(Form.scalar_form(structure.chart, f))
                total = total + wedge(df, exterior_derivative(gamma))
            forms.append(total)
            ok = structure.contains(a, total)
            report.add(
                f"flat-i member a={a}.{g}", ok,
                "" if ok else f"{render(total)} is not in S^{a}",
            )
        span = Span(structure.chart, a, [f for f in forms if not f.is_zero()])
        for i, gen in enumerate(structure.generators(a)):
            ok = span.contains(gen)
            report.add(
                f"flat-i span a={a}.{i}", ok,
                "" if ok else f"witnesses do not generate {render(gen)}",
            )
    for a, (gammas, xs) in (symmetries or {}).items():
        exacts = []
        for j, gamma in enumerate(gammas):
            ok = is_hamiltonian_form(gamma, structure)
            report.add(f"flat-ii gamma a={a}.{j}", ok)
            exacts.append(exterior_derivative(gamma))
            for i, x in enumerate(xs):
                ok = lie_derivative(x, gamma).is_zero()
                report.add(
                    f"flat-ii symmetry a={a}.{j} X={i}", ok,
                    "" if ok else f"L_X gamma = {render(lie_derivative(x, gamma))}",
                )
        span = Span(structure.chart, a, [e for e in exacts if not e.is_zero()])
        for i, gen in enumerate(structure.generators(a)):
            ok = span.contains(gen)
            report.add(f"flat-ii span a={a}.{i}", ok)
        for e in exacts:
            ok = structure.contains(a, e)
            report.add(f"flat-ii member a={a} {render(e)}", ok)
        if a >= 2 and xs:
            lowered = [
                exterior_derivative(contract(x, gamma))
                for gamma in gammas
                for x in xs
            ]
            span = Span(structure.chart, a - 1,
                        [e for e in lowered if not e.is_zero()])
            for i, gen in enumerate(structure.generators(a - 1)):
                ok = span.contains(gen)
                report.add(f"flat-ii lowered a={a}.{i}", ok)
    return report


def verify_fibered(structure):
    """Fibered conditions: S^a consists of (a-1)-horizontal forms, and
    every semi-basic coordinate a-form lies in S^a."""
    from itertools import combinations

    report = Report()
    n = structure.n
    chart = structure.chart
    for a in range(1, n + 1):
        for i, gen in enumerate(structure.levels[a]):
            ok = gen.form.is_horizontal(a - 1)
            report.add(
                f"horizontal a={a}.{i}",
                ok,
                "" if ok else f"{render(gen.form)} is not {a - 1}-horizontal",
            )
        span = structure.span(a)
        for idx in combinations(range(n), a):
            basic = Form(chart, a, {idx: scalars.ONE}, _normalized=True)
            ok = span.contains(basic)
            report.add(
                f"semibasic a={a} idx={list(i + 1 for i in idx)}",
                ok,
                "" if ok else f"{render(basic)} is not in S^{a}",
            )
    return report
