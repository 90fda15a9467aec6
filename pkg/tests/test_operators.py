"""Operator-tree semantics: degrees, commutators, induced brackets, order probes."""

import random
from fractions import Fraction

import pytest

from nambucalc.rational import Chart, Polynomial, RationalFunction
from nambucalc.graded import (
    FORM,
    MULTIVECTOR,
    GradedElement,
    basis_vector,
    coordinate_differential,
    differential,
    insert_covector,
    pair,
)
from nambucalc.operators import (
    Commutator,
    Compose,
    ExtDiff,
    FormValuedMultivector,
    Insert,
    InsertTensor,
    LieDer,
    MulForm,
    Scale,
    Sum,
    TestStrategy,
    ZeroOperator,
    decompose_tensorial,
    extract_top_multivector,
    fi_residual,
    filippov_bracket,
    function_bracket,
    graded_commutator,
    is_tensorial,
    koszul_binary_expansion_check,
    order_at_most,
    phi,
    random_multivector,
    random_unit_killing_operator,
    symb_top_vanishes,
    unit_form,
)

CH2 = Chart(("x", "y"))
CH3 = Chart(("x", "y", "z"))
CH4 = Chart(("x", "y", "z", "w"))


def fn(chart, name):
    return RationalFunction.variable(chart, name)


def mv(chart, *names):
    out = GradedElement.scalar(chart, 1, MULTIVECTOR)
    for name in names:
        out = out.wedge(basis_vector(chart, name))
    return out


def form(chart, *names):
    out = unit_form(chart)
    for name in names:
        out = out.wedge(coordinate_differential(chart, name))
    return out


def rand_fn(chart, rng, max_deg=2):
    arity = len(chart.variables)
    total = Polynomial.zero(chart)
    for _ in range(rng.randint(1, 3)):
        exps = [0] * arity
        for _ in range(rng.randint(0, max_deg)):
            exps[rng.randrange(chart.dim)] += 1
        total = total + Polynomial.monomial(chart, tuple(exps), rng.randint(-4, 4))
    return RationalFunction(total)


def rand_element(chart, rng, degree, variance):
    import itertools

    terms = {}
    for idx in itertools.combinations(range(chart.dim), degree):
        if rng.random() < 0.7:
            terms[idx] = rand_fn(chart, rng)
    return GradedElement(chart, variance, {degree: terms})


def rand_form(chart, rng, degree):
    return rand_element(chart, rng, degree, FORM)


def probe_forms(chart, rng, extra=2):
    import itertools

    forms = [unit_form(chart)]
    for k in range(1, chart.dim + 1):
        for idx in itertools.combinations(range(chart.dim), k):
            forms.append(GradedElement.basis(chart, FORM, idx))
    for _ in range(extra):
        forms.append(rand_form(chart, rng, rng.randint(0, chart.dim)))
    return forms


def ops_equal(left, right, chart, rng, extra=2):
    return all(
        left.apply(w) == right.apply(w) for w in probe_forms(chart, rng, extra)
    )


class TestNodes:
    def test_degrees(self):
        d = ExtDiff(CH2)
        p = mv(CH2, "x", "y")
        assert d.degree == 1
        assert Insert(p).degree == -2
        assert MulForm(form(CH2, "x")).degree == 1
        assert MulForm(fn(CH2, "x")).degree == 0
        assert LieDer(p).degree == -1
        assert Commutator(d, Insert(p)).degree == -1
        assert Compose(Insert(p), d).degree == -1
        assert Scale(Fraction(1, 2), d).degree == 1
        assert Sum([d, d]).degree == 1
        assert ZeroOperator(CH2, -3).degree == -3

    def test_insert_tensor_degree(self):
        delta = FormValuedMultivector(
            CH2, 2, {((0, 1), 0): RationalFunction.one(CH2)}
        )
        assert InsertTensor(delta).degree == -1

    def test_validation_errors(self):
        d = ExtDiff(CH2)
        with pytest.raises(ValueError, match="share a degree"):
            Sum([d, Insert(mv(CH2, "x"))])
        with pytest.raises(ValueError, match="empty"):
            Sum([])
        with pytest.raises(ValueError, match="explicit degree"):
            Insert(GradedElement.zero(CH2, MULTIVECTOR))
        with pytest.raises(ValueError, match="takes a multivector"):
            Insert(form(CH2, "x"))
        with pytest.raises(ValueError, match="expected a form"):
            MulForm(mv(CH2, "x"))
        with pytest.raises(TypeError, match="exact rational"):
            Scale(0.5, d)
        with pytest.raises(ValueError, match="chart mismatch"):
            Commutator(d, ExtDiff(CH3))
        with pytest.raises(ValueError, match="expected a form"):
            d.apply(mv(CH2, "x"))
        with pytest.raises(ValueError, match="bad index tuple"):
            FormValuedMultivector(CH2, 2, {((1, 0), 0): RationalFunction.one(CH2)})

    def test_str_smoke(self):
        d = ExtDiff(CH2)
        assert str(d) == "d"
        assert str(Commutator(d, Insert(mv(CH2, "x", "y")))).startswith("[d, i(")
        assert "degree" in repr(d)


class TestApply:
    def test_ext_diff(self):
        x = fn(CH2, "x")
        got = ExtDiff(CH2).apply(x * x)
        assert got == form(CH2, "x") * (2 * x)

    def test_insert_then_mul_on_unit(self):
        # [i_@x, mu_dx](1) = 1
        com = graded_commutator(Insert(mv(CH2, "x")), MulForm(form(CH2, "x")))
        assert com.apply(1) == unit_form(CH2)

    def test_lieder_commuted_with_function(self):
        # [L_P, mu_x](dy) = 1 for P = @x^@y
        com = Commutator(LieDer(mv(CH2, "x", "y")), MulForm(fn(CH2, "x")))
        assert com.apply(form(CH2, "y")) == unit_form(CH2)

    def test_lieder_is_insert_commutator(self):
        rng = random.Random(3)
        p = rand_element(CH3, rng, 2, MULTIVECTOR)
        sugar = LieDer(p, multivector_degree=2)
        spelled = Commutator(Insert(p, 2), ExtDiff(CH3))
        assert ops_equal(sugar, spelled, CH3, rng)

    def test_compose_sum_scale(self):
        rng = random.Random(4)
        d = ExtDiff(CH3)
        ins = Insert(mv(CH3, "x", "y"))
        w = rand_form(CH3, rng, 2)
        assert Compose(ins, d).apply(w) == ins.apply(d.apply(w))
        assert Sum([d, d]).apply(w) == d.apply(w) * 2
        assert Scale(Fraction(-3, 2), d).apply(w) == d.apply(w) * Fraction(-3, 2)
        assert ZeroOperator(CH3, 1).apply(w).is_zero

    def test_scalar_coercion(self):
        assert ExtDiff(CH2).apply(7).is_zero
        assert MulForm(fn(CH2, "y")).apply(Polynomial.variable(CH2, "x")) == \
            GradedElement.scalar(CH2, fn(CH2, "x") * fn(CH2, "y"), FORM)

    def test_insert_tensor_pinned(self):
        # Delta = @x^@y (x) dx: sends dx^dy to dx, kills lower degrees
        delta = FormValuedMultivector(
            CH2, 2, {((0, 1), 0): RationalFunction.one(CH2)}
        )
        op = InsertTensor(delta)
        assert op.apply(form(CH2, "x", "y")) == form(CH2, "x")
        assert op.apply(form(CH2, "x")).is_zero
        assert op.apply(1).is_zero


class TestGradedStructure:
    def triples(self, rng):
        d = ExtDiff(CH3)
        return [
            (d, Insert(mv(CH3, "x", "y")), MulForm(rand_form(CH3, rng, 1))),
            (
                Insert(rand_element(CH3, rng, 1, MULTIVECTOR), 1),
                LieDer(rand_element(CH3, rng, 2, MULTIVECTOR), 2),
                d,
            ),
        ]

    def test_commutator_antisymmetry(self):
        rng = random.Random(5)
        for f, g, _ in self.triples(rng):
            sign = -1 if (f.degree * g.degree) % 2 else 1
            lhs = Commutator(f, g)
            rhs = Scale(-sign, Commutator(g, f))
            assert ops_equal(lhs, rhs, CH3, rng)

    def test_graded_jacobi(self):
        rng = random.Random(6)
        for f, g, h in self.triples(rng):
            sign = -1 if (f.degree * g.degree) % 2 else 1
            lhs = Commutator(f, Commutator(g, h))
            rhs = Sum(
                [
                    Commutator(Commutator(f, g), h),
                    Scale(sign, Commutator(g, Commutator(f, h))),
                ]
            )
            assert ops_equal(lhs, rhs, CH3, rng)


class TestPhi:
    def setup_method(self):
        self.p = mv(CH2, "x", "y")
        self.lie = LieDer(self.p)
        self.canonical = Commutator(ExtDiff(CH2), Insert(self.p))
        self.x = fn(CH2, "x")
        self.y = fn(CH2, "y")

    def test_pinned_values(self):
        dx, dy = form(CH2, "x"), form(CH2, "y")
        assert phi(self.lie, (self.x, self.y)).is_zero
        assert phi(self.lie, (self.x, dy)).as_scalar() == 1
        assert phi(self.lie, (dx, self.y)).as_scalar() == -1
        assert phi(self.canonical, (dx, self.y)).as_scalar() == 1
        assert phi(self.canonical, (dx, dy)).is_zero

    def test_linearity(self):
        rng = random.Random(7)
        a = rand_form(CH3, rng, 1)
        b = rand_form(CH3, rng, 1)
        c = rand_form(CH3, rng, 0)
        op = LieDer(rand_element(CH3, rng, 2, MULTIVECTOR), 2)
        combo = phi(op, (a + b * 3, c))
        assert combo == phi(op, (a, c)) + phi(op, (b, c)) * 3

    def test_function_bracket_matches_pairing(self):
        assert function_bracket(self.canonical, (self.x, self.y)) == 1
        rng = random.Random(8)
        p = rand_element(CH3, rng, 3, MULTIVECTOR)
        canonical = Commutator(ExtDiff(CH3), Insert(p, 3))
        f, g, h = (rand_fn(CH3, rng) for _ in range(3))
        expected = pair(p, differential(f).wedge(differential(g)).wedge(differential(h)))
        assert function_bracket(canonical, (f, g, h)) == expected

    def test_function_bracket_errors(self):
        with pytest.raises(ValueError, match="does not match"):
            function_bracket(self.canonical, (self.x, self.y, self.y))
        with pytest.raises(TypeError, match="scalar functions"):
            function_bracket(self.canonical, (form(CH2, "x"), self.y))


class TestFilippovBracket:
    def test_validation(self):
        canonical = Commutator(ExtDiff(CH2), Insert(mv(CH2, "x", "y")))
        with pytest.raises(ValueError, match="does not match"):
            filippov_bracket(canonical, (form(CH2, "x"),))
        with pytest.raises(ValueError, match="must be 1-forms"):
            filippov_bracket(canonical, (fn(CH2, "x"), fn(CH2, "y")))

    def test_skew_in_leading_slots(self):
        rng = random.Random(9)
        op = random_unit_killing_operator(CH3, 3, rng)
        a = rand_form(CH3, rng, 1)
        b = rand_form(CH3, rng, 1)
        c = rand_form(CH3, rng, 2)
        assert filippov_bracket(op, (a, b, c)) == -filippov_bracket(op, (b, a, c))

    def test_leibniz_in_last_slot(self):
        # needs an operator of order at most n; Lie-type plus insertion parts
        # qualify, while a bare composition like d * i_A does not
        rng = random.Random(10)
        for n in (2, 3):
            op = Sum(
                [
                    Scale(
                        Fraction(rng.randint(1, 3), 2),
                        LieDer(rand_element(CH3, rng, n, MULTIVECTOR), n),
                    ),
                    Scale(
                        rng.randint(1, 3),
                        Insert(rand_element(CH3, rng, n - 1, MULTIVECTOR), n - 1),
                    ),
                ]
            )
            alphas = [rand_form(CH3, rng, 1) for _ in range(n - 1)]
            f = rand_fn(CH3, rng)
            b = rand_form(CH3, rng, 1)
            lhs = filippov_bracket(op, (*alphas, b * f))
            rhs = filippov_bracket(op, (*alphas, b)) * f + b.wedge(
                filippov_bracket(op, (*alphas, f))
            )
            assert lhs == rhs


class TestRemarkIdentities:
    """The two commutator identities, each in the orientation that makes it exact."""

    def cases(self):
        rng = random.Random(11)
        yield CH2, mv(CH2, "x", "y") * rand_fn(CH2, rng), rand_fn(CH2, rng), rng
        yield CH3, mv(CH3, "x", "y", "z") * rand_fn(CH3, rng), rand_fn(CH3, rng), rng
        yield CH3, rand_element(CH3, rng, 2, MULTIVECTOR), rand_fn(CH3, rng), rng

    def test_mul_commutator_is_insertion(self):
        # [[i_P, d], mu_f] = i_{i_df P}
        for chart, p, f, rng in self.cases():
            n = p.degree() if not p.is_zero else 2
            lhs = Commutator(LieDer(p, n), MulForm(GradedElement.scalar(chart, f, FORM)))
            rhs = Insert(insert_covector(differential(f), p), n - 1)
            assert ops_equal(lhs, rhs, chart, rng)

    def test_exact_form_commutator_descends(self):
        # [[d, i_P], mu_df] = [d, i_{i_df P}]
        for chart, p, f, rng in self.cases():
            n = p.degree() if not p.is_zero else 2
            d = ExtDiff(chart)
            lhs = Commutator(Commutator(d, Insert(p, n)), MulForm(differential(f)))
            rhs = Commutator(d, Insert(insert_covector(differential(f), p), n - 1))
            assert ops_equal(lhs, rhs, chart, rng)

    def test_exact_form_commutator_other_orientation_flips(self):
        # in the [i_P, d] orientation the same identity picks up a minus sign
        for chart, p, f, rng in self.cases():
            n = p.degree() if not p.is_zero else 2
            lhs = Commutator(LieDer(p, n), MulForm(differential(f)))
            rhs = Scale(-1, LieDer(insert_covector(differential(f), p), n - 1))
            assert ops_equal(lhs, rhs, chart, rng)

    def test_double_function_commutator_vanishes(self):
        rng = random.Random(12)
        p = rand_element(CH3, rng, 3, MULTIVECTOR)
        f, g = rand_fn(CH3, rng), rand_fn(CH3, rng)
        nested = Commutator(
            Commutator(LieDer(p, 3), MulForm(GradedElement.scalar(CH3, f, FORM))),
            MulForm(GradedElement.scalar(CH3, g, FORM)),
        )
        assert ops_equal(nested, ZeroOperator(CH3, -2), CH3, rng)


class TestFiResidual:
    def test_binary_cases(self):
        rng = random.Random(13)
        for _ in range(6):
            op = random_unit_killing_operator(CH3, 2, rng)
            a = rand_form(CH3, rng, rng.randint(0, 2))
            b1 = rand_form(CH3, rng, rng.randint(0, 2))
            b2 = rand_form(CH3, rng, rng.randint(0, 2))
            assert fi_residual(op, (a,), (b1, b2)).is_zero

    def test_ternary_cases(self):
        rng = random.Random(14)
        for _ in range(3):
            op = random_unit_killing_operator(CH3, 3, rng)
            first = [rand_form(CH3, rng, rng.randint(0, 1)) for _ in range(2)]
            second = [rand_form(CH3, rng, rng.randint(0, 1)) for _ in range(3)]
            assert fi_residual(op, first, second).is_zero

    def test_arity_validation(self):
        op = LieDer(mv(CH2, "x", "y"))
        with pytest.raises(ValueError, match="n-1 leading"):
            fi_residual(op, (fn(CH2, "x"),), (fn(CH2, "y"),))


class TestKoszul:
    def test_binary_expansion(self):
        rng = random.Random(15)
        for da, db in ((0, 0), (0, 1), (1, 1), (1, 2), (2, 1)):
            op = random_unit_killing_operator(CH3, 2, rng)
            a = rand_form(CH3, rng, da)
            b = rand_form(CH3, rng, db)
            assert koszul_binary_expansion_check(op, a, b).is_zero

    def test_degree_validation(self):
        with pytest.raises(ValueError, match="degree must be -1"):
            koszul_binary_expansion_check(ExtDiff(CH2), fn(CH2, "x"), fn(CH2, "y"))

    def test_square_correction(self):
        # jacobiator of the binary bracket = -phi of the squared operator
        rng = random.Random(16)
        op = random_unit_killing_operator(CH3, 2, rng)
        a1, a2, a3 = (rand_form(CH3, rng, 1) for _ in range(3))
        jac = (
            phi(op, (a1, phi(op, (a2, a3))))
            - phi(op, (phi(op, (a1, a2)), a3))
            - phi(op, (a2, phi(op, (a1, a3))))
        )
        assert (jac + phi(Compose(op, op), (a1, a2, a3))).is_zero


class TestOrderProbes:
    def test_multiplication_is_order_zero(self):
        rng = random.Random(17)
        verdict = order_at_most(MulForm(rand_form(CH2, rng, 1)), 0)
        assert verdict.passed and verdict.witness is None

    def test_ext_diff_is_order_one(self):
        assert order_at_most(ExtDiff(CH2), 1).passed
        verdict = order_at_most(ExtDiff(CH2), 0)
        assert verdict.status == "failed"
        args, w = verdict.witness
        rebuilt = Commutator(ExtDiff(CH2), MulForm(args[0]))
        assert not rebuilt.apply(w).is_zero

    def test_insertion_order_is_multivector_degree(self):
        ins = Insert(mv(CH2, "x", "y"))
        assert order_at_most(ins, 2).passed
        assert not order_at_most(ins, 1).passed

    def test_lie_type_order(self):
        lie = LieDer(mv(CH2, "x", "y"))
        assert order_at_most(lie, 2).passed
        assert not order_at_most(lie, 1).passed

    def test_tensoriality(self):
        assert is_tensorial(Insert(mv(CH2, "x", "y"))).passed
        delta = FormValuedMultivector(
            CH2, 2, {((0, 1), 0): RationalFunction.one(CH2)}
        )
        assert is_tensorial(InsertTensor(delta)).passed
        verdict = is_tensorial(LieDer(mv(CH2, "x", "y")))
        assert verdict.status == "failed"
        args, w = verdict.witness
        rebuilt = Commutator(LieDer(mv(CH2, "x", "y")), MulForm(args[0]))
        assert not rebuilt.apply(w).is_zero


class TestSymbolExtraction:
    def test_symbol_vanishes_for_lie_type(self):
        rng = random.Random(18)
        n = 2
        p = rand_element(CH3, rng, n, MULTIVECTOR)
        assert symb_top_vanishes(LieDer(p, n), n).passed

    def test_symbol_fails_with_tensor_part(self):
        delta = FormValuedMultivector(
            CH2, 2, {((0, 1), 0): RationalFunction.one(CH2)}
        )
        op = Sum([LieDer(mv(CH2, "x", "y")), InsertTensor(delta)])
        assert not symb_top_vanishes(op, 2).passed

    def test_extract_recovers_multivector(self):
        rng = random.Random(19)
        for chart, n in ((CH3, 2), (CH4, 3)):
            p = rand_element(chart, rng, n, MULTIVECTOR)
            lower = rand_element(chart, rng, n - 1, MULTIVECTOR)
            op = Sum([LieDer(p, n), Insert(lower, n - 1)])
            assert extract_top_multivector(op, n) == p

    def test_extract_rejects_tensor_symbol(self):
        delta = FormValuedMultivector(
            CH2, 2, {((0, 1), 0): RationalFunction.one(CH2)}
        )
        with pytest.raises(ValueError, match="top symbol not a multivector"):
            extract_top_multivector(InsertTensor(delta), 2)

    def test_degree_validation(self):
        with pytest.raises(ValueError, match="does not match"):
            extract_top_multivector(ExtDiff(CH2), 2)


class TestDecompose:
    def delta(self, chart, entries):
        return FormValuedMultivector(chart, 2, entries)

    def test_round_trip(self):
        rng = random.Random(20)
        a = rand_element(CH3, rng, 1, MULTIVECTOR)
        entries = {
            ((0, 1), 2): rand_fn(CH3, rng),
            ((0, 2), 0): rand_fn(CH3, rng),
        }
        delta = self.delta(CH3, entries)
        op = Sum([Insert(a, 1), InsertTensor(delta)])
        got_a, got_delta = decompose_tensorial(op, 2)
        assert got_a == a
        assert got_delta == delta

    def test_pure_insertion(self):
        a = mv(CH2, "x") * fn(CH2, "y")
        got_a, got_delta = decompose_tensorial(Insert(a, 1), 2)
        assert got_a == a
        assert got_delta.is_zero

    def test_zero_operator(self):
        got_a, got_delta = decompose_tensorial(ZeroOperator(CH2, -1), 2)
        assert got_a.is_zero
        assert got_delta.is_zero

    def test_rejects_differential_operator(self):
        with pytest.raises(ValueError, match="not tensorial"):
            decompose_tensorial(LieDer(mv(CH2, "x", "y")), 2)


class TestSkewDefect:
    def test_second_order_defect_formula(self):
        # D = i_@x d i_@y has a non-skew binary function bracket; the defect is
        # the double function commutator of [D, d] evaluated on 1
        d = ExtDiff(CH2)
        op = Compose(Insert(mv(CH2, "x")), Compose(d, Insert(mv(CH2, "y"))))
        assert op.degree == -1
        f = fn(CH2, "x")
        g = fn(CH2, "x") * fn(CH2, "y")
        defect = function_bracket(op, (f, g)) + function_bracket(op, (g, f))
        chain = Commutator(
            Commutator(
                Commutator(op, d), MulForm(GradedElement.scalar(CH2, f, FORM))
            ),
            MulForm(GradedElement.scalar(CH2, g, FORM)),
        )
        assert chain.apply(1).as_scalar() == defect
        assert not defect.is_zero

    def test_nambu_bracket_has_no_defect(self):
        rng = random.Random(22)
        p = mv(CH2, "x", "y") * rand_fn(CH2, rng)
        canonical = Commutator(ExtDiff(CH2), Insert(p, 2))
        f, g = rand_fn(CH2, rng), rand_fn(CH2, rng)
        assert (
            function_bracket(canonical, (f, g))
            + function_bracket(canonical, (g, f))
        ).is_zero


class TestRandomFamilies:
    def test_random_multivector_shape(self):
        rng = random.Random(23)
        p = random_multivector(CH3, 2, rng)
        assert p.is_zero or p.degree() == 2

    def test_random_operator_kills_units(self):
        rng = random.Random(24)
        for n in (2, 3):
            for _ in range(5):
                op = random_unit_killing_operator(CH3, n, rng)
                assert op.degree == -(n - 1)
                assert op.apply(1).is_zero
