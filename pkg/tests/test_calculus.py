import random
from itertools import combinations

import pytest
import sympy

from gradira import (
    Chart,
    Form,
    MultiVector,
    contract,
    exterior_derivative,
    lie_derivative,
    poincare_primitive,
    schouten,
    volume_contraction,
    wedge,
)
from gradira.errors import NonPolynomialError, NotClosedError

from naive import naive_contract, naive_schouten


def d(form):
    return exterior_derivative(form)


def test_d_of_liouville_terms(ext2):
    # d(p d^n x) = dp ^ d^n x, and d of the full potential term by term
    ch = ext2.chart
    vol = volume_contraction(ch, [])
    f = Form.scalar_form(ch, ch.sym("p")) * vol
    assert d(f) == wedge(Form.d_coord(ch, "p"), vol)
    theta = Form.scalar_form(ch, ch.sym("p")) * vol
    for mu in (1, 2):
        theta = theta + Form.scalar_form(ch, ch.sym(f"p{mu}_1")) * wedge(
            Form.d_coord(ch, "y1"), volume_contraction(ch, [mu - 1])
        )
    dtheta = d(theta)
    expected = wedge(Form.d_coord(ch, "p"), vol)
    for mu in (1, 2):
        expected = expected + wedge(
            Form.d_coord(ch, f"p{mu}_1"),
            wedge(Form.d_coord(ch, "y1"), volume_contraction(ch, [mu - 1])),
        )
    assert dtheta == expected


def test_d_squared_zero_random(chart5):
    rng = random.Random(5)
    for _ in range(10):
        data = {
            idx: rng.randint(-3, 3) * chart5.syms[rng.randrange(5)] ** rng.randint(0, 2)
            for idx in rng.sample(list(combinations(range(5), 2)), 3)
        }
        alpha = Form(chart5, 2, data)
        assert d(d(alpha)).is_zero()


def test_d_top_degree_returns_zero(chart5):
    top = Form(chart5, 5, {tuple(range(5)): chart5.sym("y1")})
    assert d(top).is_zero()
    assert d(top).degree == 5


def test_d_formal_function(chart5):
    chart5.functions.setdefault("F", tuple(chart5.coords))
    f = Form.scalar_form(chart5, sympy.Symbol("F"))
    df = d(f)
    assert df.data[(0,)] == sympy.Symbol("F__x1")
    assert df.data[(2,)] == sympy.Symbol("F__y1")


def test_lie_derivative_of_function(chart5):
    x, y = chart5.sym("x1"), chart5.sym("y1")
    f = Form.scalar_form(chart5, x * y**2)
    xv = MultiVector.coord_vector(chart5, "x1") + y * MultiVector.coord_vector(
        chart5, "p1_1"
    )
    assert lie_derivative(xv, f) == contract(xv, d(f))


def test_lie_derivative_dp_on_liouville(ext2):
    # L_{d/dp} Theta = d^n x on the extended chart
    ch = ext2.chart
    vol = volume_contraction(ch, [])
    theta = Form.scalar_form(ch, ch.sym("p")) * vol
    for mu in (1, 2):
        theta = theta + Form.scalar_form(ch, ch.sym(f"p{mu}_1")) * wedge(
            Form.d_coord(ch, "y1"), volume_contraction(ch, [mu - 1])
        )
    pv = MultiVector.coord_vector(ch, "p")
    assert lie_derivative(pv, theta) == vol


def test_lie_derivative_degree2_matches_definition(chart5):
    rng = random.Random(2)
    u = wedge(
        MultiVector.coord_vector(chart5, "x1"),
        chart5.sym("y1") * MultiVector.coord_vector(chart5, "p1_1"),
    )
    data = {
        idx: sympy.Integer(rng.randint(-2, 2)) * chart5.sym("x2")
        for idx in combinations(range(5), 3)
    }
    alpha = Form(chart5, 3, data)
    # oracle: the defining formula evaluated with the naive contraction
    inner = naive_contract(alpha.data, 3, None) if False else None
    first = exterior_derivative(contract(u, alpha))
    second = contract(u, exterior_derivative(alpha))
    assert lie_derivative(u, alpha) == first - second  # p = 2 even


def test_schouten_vector_fields_jacobian(chart5):
    x, y = chart5.sym("x1"), chart5.sym("y1")
    xv = x * y * MultiVector.coord_vector(chart5, "x2")
    yv = y * MultiVector.coord_vector(chart5, "x1")
    lhs = schouten(xv, yv)
    # [f X, g Y] with X, Y coordinate fields
    expected = naive_schouten(xv.data, 1, yv.data, 1, chart5.syms)
    assert lhs.data == expected


def test_schouten_golden_leibniz(chart5):
    # [d/dy, y d/dx ^ d/dp] = d/dx ^ d/dp
    xv = MultiVector.coord_vector(chart5, "y1")
    q = chart5.sym("y1") * wedge(
        MultiVector.coord_vector(chart5, "x1"),
        MultiVector.coord_vector(chart5, "p1_1"),
    )
    out = schouten(xv, q)
    assert out == wedge(
        MultiVector.coord_vector(chart5, "x1"),
        MultiVector.coord_vector(chart5, "p1_1"),
    )


def test_schouten_matches_recursive_oracle(chart5):
    rng = random.Random(9)
    for p, q in ((1, 2), (2, 1), (2, 2), (1, 3)):
        udata = {
            idx: rng.randint(-2, 2) * chart5.syms[rng.randrange(5)]
            for idx in rng.sample(list(combinations(range(5), p)), 2)
        }
        vdata = {
            idx: rng.randint(-2, 2) * chart5.syms[rng.randrange(5)]
            for idx in rng.sample(list(combinations(range(5), q)), 2)
        }
        u = MultiVector(chart5, p, udata)
        v = MultiVector(chart5, q, vdata)
        expected = naive_schouten(u.data, p, v.data, q, chart5.syms)
        assert schouten(u, v).data == expected


def test_schouten_graded_skew(chart5):
    rng = random.Random(13)
    for p, q in ((1, 2), (2, 2), (2, 3)):
        u = MultiVector(
            chart5, p,
            {idx: rng.randint(-2, 2) * chart5.syms[rng.randrange(5)]
             for idx in rng.sample(list(combinations(range(5), p)), 2)},
        )
        v = MultiVector(
            chart5, q,
            {idx: rng.randint(-2, 2) * chart5.syms[rng.randrange(5)]
             for idx in rng.sample(list(combinations(range(5), q)), 2)},
        )
        sign = (-1) ** ((p - 1) * (q - 1))
        assert schouten(u, v) == (-sign) * schouten(v, u)


def test_poincare_primitive_basic(chart5):
    alpha = wedge(Form.d_coord(chart5, "x1"), Form.d_coord(chart5, "x2"))
    beta = poincare_primitive(alpha)
    assert exterior_derivative(beta) == alpha
    assert poincare_primitive(Form.zero(chart5, 2)).is_zero()


def test_poincare_primitive_random_closed(chart5):
    chart = Chart(base=["x1", "x2", "x3", "x4"], fiber=[])
    rng = random.Random(21)
    for _ in range(6):
        data = {
            idx: rng.randint(-3, 3) * chart.syms[rng.randrange(4)] ** rng.randint(0, 2)
            for idx in rng.sample(list(combinations(range(4), 1)), 3)
        }
        gamma = Form(chart, 1, data)
        alpha = exterior_derivative(gamma)  # closed 2-form
        beta = poincare_primitive(alpha)
        assert exterior_derivative(beta) == alpha


def test_poincare_primitive_rejects_open(chart5):
    x_form = Form.scalar_form(chart5, chart5.sym("y1"))
    alpha = wedge(exterior_derivative(x_form), Form.d_coord(chart5, "x1"))
    alpha = alpha + wedge(Form.d_coord(chart5, "x1"), Form.d_coord(chart5, "x2"))
    bad = Form(chart5, 2, {(0, 1): chart5.sym("y1")})
    with pytest.raises(NotClosedError):
        poincare_primitive(bad)


def test_poincare_primitive_rejects_non_polynomial(chart5):
    chart5.functions.setdefault("G", tuple(chart5.coords))
    bad = Form(chart5, 1, {(0,): sympy.Symbol("G")})
    with pytest.raises((NonPolynomialError, NotClosedError)):
        poincare_primitive(bad)
