"""Tests for numeric field compilation, RK4 integration, and drift reports."""

import random
from fractions import Fraction

import numpy as np
import pytest

from nambucalc.rational import Chart, RationalFunction
from nambucalc.graded import GradedElement, MULTIVECTOR, vector_field
from nambucalc.dynamics import (
    NumericField,
    RunConfig,
    Trajectory,
    calogero_run,
    compile_numeric,
    conservation_report,
    example_run,
    kepler_run,
    newton_equivalence_check,
    rk4_integrate,
)


def fn(chart, name):
    return RationalFunction.variable(chart, name)


class TestCompile:
    def test_calogero_field_values(self):
        field = calogero_run().compiled_field()
        got = field((0.0, 1.0, 0.3, 0.2))
        assert got == pytest.approx([0.0, -0.2, 2.0, -4.0], rel=1e-15, abs=1e-15)

    def test_kepler_field_values(self):
        field = kepler_run().compiled_field()
        got = field((1.0, 1.0, 1.0, 0.4, 0.5, 0.6))
        expect = [0.0, 0.0, 0.0, 2 / 27, 2 / 27, 2 / 27]
        assert got == pytest.approx(expect, rel=1e-15, abs=1e-15)

    def test_zero_field(self):
        chart = Chart(("x", "y"))
        field = compile_numeric(GradedElement.zero(chart, MULTIVECTOR))
        assert field((3.0, -2.0)) == [0.0, 0.0]

    def test_matches_exact_evaluation(self):
        cfg = kepler_run()
        from nambucalc.nambu import hamiltonian_vf

        symbolic = hamiltonian_vf(cfg.structure, cfg.flow)
        field = compile_numeric(symbolic, cfg.params)
        rng = random.Random(0)
        for _ in range(20):
            point = {
                name: Fraction(rng.randint(1, 9), rng.randint(1, 4))
                for name in cfg.structure.chart.coordinates
            }
            exact = field.eval_exact(point)
            floats = field([float(point[c]) for c in cfg.structure.chart.coordinates])
            for e, f in zip(exact, floats):
                assert f == pytest.approx(float(e), rel=1e-12, abs=1e-12)

    def test_unbound_parameter(self):
        cfg = kepler_run()
        from nambucalc.nambu import hamiltonian_vf

        symbolic = hamiltonian_vf(cfg.structure, cfg.flow)
        with pytest.raises(ValueError, match="unbound parameter"):
            compile_numeric(symbolic, {"m": 1})

    def test_unknown_parameter(self):
        chart = Chart(("x",))
        v = vector_field(chart, {"x": fn(chart, "x")})
        with pytest.raises(ValueError, match="unknown parameter"):
            compile_numeric(v, {"q": 2})

    def test_rejects_non_vector_field(self):
        chart = Chart(("x", "y"))
        biv = GradedElement.basis(chart, MULTIVECTOR, (0, 1))
        with pytest.raises(ValueError, match="vector field"):
            compile_numeric(biv)

    def test_exact_values_are_fractions(self):
        chart = Chart(("x",))
        v = vector_field(chart, {"x": fn(chart, "x") / 3})
        field = compile_numeric(v)
        assert field.eval_exact({"x": Fraction(1, 2)}) == [Fraction(1, 6)]


class TestRK4:
    def test_zero_field_constant(self):
        chart = Chart(("x", "y"))
        field = compile_numeric(GradedElement.zero(chart, MULTIVECTOR))
        traj = rk4_integrate(field, (1.5, -0.5), t_end=0.1, dt=0.01)
        assert traj.states.shape == (11, 2)
        assert np.all(traj.states == traj.states[0])
        assert not traj.truncated

    def test_exponential_flow(self):
        chart = Chart(("x",))
        field = compile_numeric(vector_field(chart, {"x": fn(chart, "x")}))
        traj = rk4_integrate(field, (1.0,), t_end=1.0, dt=1e-3)
        assert traj.states[-1, 0] == pytest.approx(np.e, rel=1e-11)

    def test_step_validation(self):
        chart = Chart(("x",))
        field = compile_numeric(vector_field(chart, {"x": fn(chart, "x")}))
        with pytest.raises(ValueError, match="positive"):
            rk4_integrate(field, (1.0,), t_end=1.0, dt=0.0)
        with pytest.raises(ValueError, match="dimension"):
            rk4_integrate(field, (1.0, 2.0), t_end=1.0, dt=0.1)

    def test_guard_rejects_bad_start(self):
        cfg = calogero_run()
        with pytest.raises(ValueError, match="singular"):
            cfg.integrate(initial=(0.0, 1e-9, 0.3, 0.2))

    def test_guard_truncates(self):
        chart = Chart(("x",))
        minus_one = RationalFunction.zero(chart) - 1
        field = compile_numeric(vector_field(chart, {"x": minus_one}))
        traj = rk4_integrate(
            field, (0.05,), t_end=1.0, dt=1e-3,
            guard=lambda s: abs(s[0]) < 1e-6,
        )
        assert traj.truncated
        assert len(traj.times) < 1001
        assert len(traj.times) == len(traj.states)

    def test_uniform_step(self):
        cfg = calogero_run()
        traj = cfg.integrate(dt=0.01, t_end=0.1)
        assert np.allclose(np.diff(traj.times), 0.01)
        assert traj.method == "rk4"
        assert traj.step == 0.01


class TestConservation:
    def test_constant_trajectory_zero_drift(self):
        chart = Chart(("x", "y"))
        field = compile_numeric(GradedElement.zero(chart, MULTIVECTOR))
        traj = rk4_integrate(field, (2.0, 3.0), t_end=0.1, dt=0.01)
        rep = conservation_report(traj, {"f": fn(chart, "x") * fn(chart, "y")})
        assert rep["max_drift"] == 0.0
        assert rep["integrals"]["f"]["initial"] == pytest.approx(6.0)

    def test_calogero_drifts(self):
        cfg = calogero_run()
        traj = cfg.integrate()
        rep = conservation_report(traj, cfg.integrals, cfg.params)
        assert rep["integrals"]["H"]["max_drift"] <= 1e-6
        assert rep["integrals"]["K"]["max_drift"] <= 1e-6

    def test_fourth_order_convergence(self):
        cfg = calogero_run()
        drifts = []
        for dt in (1e-2, 5e-3):
            traj = cfg.integrate(dt=dt)
            rep = conservation_report(traj, {"H": cfg.integrals["H"]}, cfg.params)
            drifts.append(rep["max_drift"])
        assert drifts[1] <= drifts[0] / 8.0

    def test_kepler_drifts(self):
        cfg = kepler_run()
        traj = cfg.integrate()
        rep = conservation_report(traj, cfg.integrals, cfg.params)
        for name in ("h1", "h2", "h3", "h4", "h5"):
            assert rep["integrals"][name]["max_drift"] <= 1e-9
        # actions are constant to machine precision
        assert np.abs(traj.states[:, :3] - traj.states[0, :3]).max() <= 1e-12

    def test_kepler_angles_advance_linearly(self):
        cfg = kepler_run()
        traj = cfg.integrate()
        j_total = sum(cfg.initial[:3])
        rate = 2.0 / j_total**3
        for idx in (3, 4, 5):
            expected = cfg.initial[idx] + rate * traj.times
            assert np.abs(traj.states[:, idx] - expected).max() <= 1e-9


class TestNewton:
    def test_calogero_force_law(self):
        traj = calogero_run().integrate()
        rep = newton_equivalence_check(traj)
        assert rep["max_rel_error"] <= 1e-4
        assert rep["interior_points"] == len(traj.times) - 2

    def test_needs_three_points(self):
        traj = Trajectory(
            times=np.array([0.0, 0.1]),
            states=np.zeros((2, 4)) + 1.0,
            step=0.1,
        )
        with pytest.raises(ValueError, match="too short"):
            newton_equivalence_check(traj)


class TestRunConfigs:
    def test_example_lookup(self):
        assert example_run("kepler").name == "kepler"
        assert example_run("calogero").name == "calogero"
        with pytest.raises(ValueError, match="unknown system"):
            example_run("toda")

    def test_calogero_defaults(self):
        cfg = calogero_run()
        assert cfg.initial == (0.0, 1.0, 0.3, 0.2)
        assert cfg.dt == 1e-3
        assert cfg.t_end == 1.0
        assert cfg.guard((0.0, 0.0, 0.0, 0.0))
        assert not cfg.guard((0.0, 1.0, 0.0, 0.0))

    def test_kepler_defaults(self):
        cfg = kepler_run()
        assert cfg.initial == (1.0, 1.1, 0.9, 0.5, 0.2, 0.9)
        assert cfg.params == {"m": Fraction(1), "k": Fraction(1)}

    def test_trajectory_length_invariant(self):
        with pytest.raises(ValueError, match="lengths"):
            Trajectory(times=np.array([0.0]), states=np.zeros((2, 1)))
