import pytest
import sympy

from gradira import Chart, Form, MultiVector, MvForm, parse_expression, parse_form, wedge
from gradira.errors import ParseError
from gradira.parser import parse_multivector
from gradira.render import render, render_form


@pytest.fixture
def chart():
    ch = Chart(base=["x1", "x2"], fiber=["y1", "p1_1", "p2_1"])
    ch.declare_function("H", ["x1", "y1", "p1_1"])
    return ch


class TestGrammar:
    def test_dy_wedge_volume_contraction(self, chart):
        # d(y1) ^ dX[1] is dy ^ iota_{d/dx1} d^2x = dy ^ dx^2
        value = parse_expression("d(y1) ^ dX[1]", chart)
        assert value == wedge(Form.d_coord(chart, "y1"), Form.d_coord(chart, "x2"))

    def test_function_application_times_volume(self, chart):
        value = parse_expression("H(x1,y1,p1_1) * dX[]", chart)
        assert isinstance(value, Form)
        assert value.degree == 2
        assert value.data[(0, 1)] == sympy.Symbol("H")

    def test_wedge_square_accepted_and_zero(self, chart):
        value = parse_expression("d(y1) ^ d(y1)", chart)
        assert value.is_zero()

    def test_precedence_star_tighter_than_wedge(self, chart):
        value = parse_expression("p1_1 * d(y1) ^ dX[2]", chart)
        expected = wedge(
            chart.sym("p1_1") * Form.d_coord(chart, "y1"),
            -Form.d_coord(chart, "x1"),
        )
        assert value == expected

    def test_sum_and_minus(self, chart):
        value = parse_expression("d(y1) ^ dX[1] - 2 * d(p1_1) ^ dX[2]", chart)
        assert value.degree == 2
        assert len(value.data) == 2

    def test_multivector_atoms(self, chart):
        value = parse_expression("@/x1 ^ @/p1_1", chart)
        assert value == wedge(
            MultiVector.coord_vector(chart, "x1"),
            MultiVector.coord_vector(chart, "p1_1"),
        )

    def test_tensor_operator(self, chart):
        value = parse_expression("d(x1) @ @/y1", chart)
        assert isinstance(value, MvForm)
        assert value.form_degree == 1 and value.vec_degree == 1

    def test_partial_symbols(self, chart):
        value = parse_expression("D(H,y1)", chart)
        assert value == sympy.Symbol("H__y1")
        value = parse_expression("D(H,y1,x1)", chart)
        assert value == sympy.Symbol("H__x1__y1")

    def test_scalar_arithmetic(self, chart):
        value = parse_expression("3/2 * x1**2 - 1/2", chart)
        assert value == sympy.Rational(3, 2) * chart.sym("x1") ** 2 - sympy.Rational(1, 2)


class TestErrors:
    def test_unknown_coordinate(self, chart):
        with pytest.raises(ParseError) as err:
            parse_expression("d(z9)", chart)
        assert "z9" in str(err.value)

    def test_location_reported(self, chart):
        with pytest.raises(ParseError) as err:
            parse_expression("d(y1) ^\n  d(??)", chart)
        assert err.value.line == 2

    def test_degree_mismatch_in_wedge(self, chart):
        with pytest.raises(ParseError):
            parse_expression("dX[] ^ d(y1) ^ d(p1_1) ^ d(p2_1) ^ d(x1)", chart)

    def test_product_of_forms_rejected(self, chart):
        with pytest.raises(ParseError):
            parse_expression("d(y1) * d(x1)", chart)

    def test_out_of_range_volume_index(self, chart):
        with pytest.raises(ParseError):
            parse_expression("dX[3]", chart)

    def test_function_argument_mismatch(self, chart):
        with pytest.raises(ParseError):
            parse_expression("H(x1,x2,y1)", chart)

    def test_trailing_input(self, chart):
        with pytest.raises(ParseError):
            parse_expression("d(y1) d(x1)", chart)


class TestRoundTrip:
    CORPUS = [
        "d(y1) ^ dX[1]",
        "3/2 * d(y1) ^ dX[2]",
        "H * dX[] - p1_1 * d(y1) ^ dX[1] - p2_1 * d(y1) ^ dX[2]",
        "D(H,p1_1) * dX[] - d(y1) ^ dX[1]",
        "@/x1 ^ @/p2_1 - 2 * @/y1 ^ @/p1_1",
        "d(p1_1) ^ d(y1) ^ dX[1]",
        "(x1 + y1**2) * d(p2_1)",
        "dX[2]",
        "d(x1) @ @/y1 + dX[1] @ @/p1_1",
    ]

    @pytest.mark.parametrize("text", CORPUS)
    def test_parse_render_fixed_point(self, chart, text):
        value = parse_expression(text, chart)
        canonical = render(value)
        again = parse_expression(canonical, chart)
        assert again == value
        assert render(again) == canonical

    def test_zero_renders_and_parses(self, chart):
        z = parse_form("0", chart, degree=2)
        assert z.is_zero()
        assert render_form(z) == "0"


class TestTypedHelpers:
    def test_parse_form_degree_check(self, chart):
        with pytest.raises(ParseError):
            parse_form("d(y1)", chart, degree=2)

    def test_parse_multivector(self, chart):
        v = parse_multivector("@/y1", chart)
        assert v == MultiVector.coord_vector(chart, "y1")
        with pytest.raises(ParseError):
            parse_multivector("d(y1)", chart)
