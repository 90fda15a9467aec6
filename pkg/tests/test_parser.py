"""Tests for the scalar/element/operator expression grammar."""

from fractions import Fraction

import pytest

from nambucalc.rational import Chart, RationalFunction
from nambucalc.graded import FORM, GradedElement, basis_vector, coordinate_differential
from nambucalc.operators import Commutator, Compose, ExtDiff, Insert, LieDer, Scale, Sum
from nambucalc.parser import ParseError, parse, parse_operator, parse_scalar
from nambucalc.nambu import calogero_structure, kepler_structure

CH3 = Chart(("x", "y", "z"))


def rf(name):
    return RationalFunction.variable(CH3, name)


class TestScalars:
    def test_arithmetic(self):
        assert parse("2 + 3*4", CH3) == 14
        assert parse("(2 + 3)*4", CH3) == 20
        assert parse("7/2", CH3) == Fraction(7, 2)

    def test_variables(self):
        assert parse("x*y - z", CH3) == rf("x") * rf("y") - rf("z")

    def test_powers(self):
        assert parse("x^3", CH3) == rf("x") ** 3
        assert parse("x^-1", CH3) == 1 / rf("x")
        assert parse("2^3^2", CH3) == 64  # left-associative

    def test_unary_minus_binds_tightest(self):
        assert parse("-2^2", CH3) == 4
        assert parse("0 - 2^2", CH3) == -4

    def test_parameters(self):
        chart = Chart(("x",), ("m",))
        assert parse("m*x", chart) == RationalFunction.variable(
            chart, "m"
        ) * RationalFunction.variable(chart, "x")

    def test_parse_scalar_rejects_forms(self):
        with pytest.raises(ParseError, match="scalar"):
            parse_scalar("dx", CH3)
        assert parse_scalar("x + 1", CH3) == rf("x") + 1


class TestElements:
    def test_coordinate_differential(self):
        assert (parse("dx", CH3) - coordinate_differential(CH3, "x")).is_zero

    def test_vector_literal(self):
        assert (parse("@y", CH3) - basis_vector(CH3, "y")).is_zero

    def test_wedge(self):
        got = parse("dx^dy + 2*dy^dz", CH3)
        expect = (
            coordinate_differential(CH3, "x").wedge(coordinate_differential(CH3, "y"))
            + coordinate_differential(CH3, "y").wedge(coordinate_differential(CH3, "z"))
            * 2
        )
        assert (got - expect).is_zero

    def test_wedge_nilpotent(self):
        assert parse("dx ^ dx", CH3).is_zero

    def test_scalar_coefficients(self):
        got = parse("x^2 * dx^dy / 3", CH3)
        expect = coordinate_differential(CH3, "x").wedge(
            coordinate_differential(CH3, "y")
        ) * (rf("x") ** 2 / 3)
        assert (got - expect).is_zero

    def test_kepler_multivector_literal(self):
        s, _ = kepler_structure()
        text = "2*m*k^2/(J1+J2+J3)^3 * @J1^@J2^@J3^@phi1^@phi2^@phi3"
        assert (parse(text, s.chart) - s.multivector).is_zero

    def test_calogero_hamiltonian_literal(self):
        s, named = calogero_structure()
        assert parse("p_z^2 + p_r*p_z + p_r^2/2 + 1/r^2", s.chart) == named["H"]

    def test_variance_mixing_rejected(self):
        with pytest.raises(ParseError, match="mix forms and multivectors"):
            parse("dx ^ @y", CH3)

    def test_element_star_element_rejected(self):
        with pytest.raises(ParseError, match="\\^"):
            parse("dx * dy", CH3)

    def test_scalar_element_power_rejected(self):
        with pytest.raises(ParseError, match="two scalars or two graded"):
            parse("dx^2", CH3)

    def test_roundtrip_printed_forms(self):
        x = rf("x")
        cases = [
            GradedElement.basis(CH3, FORM, (0, 1)) * (x + 1),
            basis_vector(CH3, "x").wedge(basis_vector(CH3, "z")) * (1 / (x + 1)),
            GradedElement.scalar(CH3, 3, FORM) + GradedElement.basis(CH3, FORM, (0,)) * 2,
            GradedElement.zero(CH3, FORM),
        ]
        for element in cases:
            assert (parse(str(element), CH3) - element).is_zero

    def test_roundtrip_scalar_strings(self):
        values = [rf("x") / 3, rf("x") ** 2 - rf("y"), RationalFunction.zero(CH3)]
        for v in values:
            assert parse(str(v), CH3) == v


class TestErrors:
    def test_position_reported(self):
        with pytest.raises(ParseError) as err:
            parse("x + q", CH3)
        assert err.value.position == 4

    def test_unknown_identifier(self):
        with pytest.raises(ParseError, match="unknown identifier 'foo'"):
            parse("foo", CH3)

    def test_bad_character(self):
        with pytest.raises(ParseError, match="unexpected character"):
            parse("x $ y", CH3)

    def test_trailing_input(self):
        with pytest.raises(ParseError, match="trailing"):
            parse("x y", CH3)

    def test_unbalanced_parens(self):
        with pytest.raises(ParseError, match="expected '\\)'"):
            parse("(x + y", CH3)

    def test_division_by_zero(self):
        with pytest.raises(ParseError, match="division by zero"):
            parse("1/0", CH3)

    def test_bad_vector_name(self):
        with pytest.raises(ParseError, match="unknown coordinate"):
            parse("@m", Chart(("x",), ("m",)))


class TestOperators:
    def test_nodes(self):
        assert isinstance(parse_operator("d", CH3), ExtDiff)
        assert isinstance(parse_operator("i(@x^@y)", CH3), Insert)
        assert isinstance(parse_operator("L(@x^@y)", CH3), LieDer)
        assert isinstance(parse_operator("[d, i(@x^@y)]", CH3), Commutator)

    def test_degrees(self):
        assert parse_operator("[d, i(@x^@y)]", CH3).degree == -1
        assert parse_operator("mu(dx)*d", CH3).degree == 2

    def test_scaling_and_sums(self):
        op = parse_operator("1/2 * L(@x^@y) - i(@z)", CH3)
        assert isinstance(op, Sum)
        assert op.degree == -1

    def test_apply_matches_manual(self):
        op = parse_operator("[d, i(@x^@y)]", CH3)
        from nambucalc.graded import MULTIVECTOR

        manual = Commutator(
            ExtDiff(CH3), Insert(GradedElement.basis(CH3, MULTIVECTOR, (0, 1)))
        )
        probe = parse("x*dx^dy", CH3)
        assert (op(probe) - manual(probe)).is_zero

    def test_compose(self):
        op = parse_operator("i(@x) * d", CH3)
        assert isinstance(op, Compose)
        assert op.degree == 0

    def test_mu_accepts_scalars(self):
        op = parse_operator("mu(x)", CH3)
        assert op.degree == 0

    def test_operator_roundtrip(self):
        op = parse_operator("1/2 * L(@x^@y) + i(@z) / 2", CH3)
        again = parse_operator(str(op), CH3)
        probe = parse("x*y*dx", CH3)
        assert (op(probe) - again(probe)).is_zero

    def test_operator_errors(self):
        with pytest.raises(ParseError, match="two operators"):
            parse_operator("[d, x]", CH3)
        with pytest.raises(ParseError, match="unknown operator"):
            parse_operator("[d, foo]", CH3)
        with pytest.raises(ParseError, match="constant, not an operator"):
            parse_operator("5", CH3)
        with pytest.raises(ParseError, match="rational constant"):
            parse_operator("x * d", CH3)
        with pytest.raises(ParseError, match="insertion takes a multivector"):
            parse_operator("i(dx)", CH3)
        with pytest.raises(ParseError, match="divide by an operator"):
            parse_operator("1/d", CH3)

    def test_scale_requires_constant(self):
        op = parse_operator("3*d", CH3)
        assert isinstance(op, Scale)
