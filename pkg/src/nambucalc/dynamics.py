"""Numeric side of the engine: compiled vector fields, RK4 runs, drift reports.

Symbolic Hamiltonian fields become float-valued evaluators once parameters are
bound to exact rationals; trajectories are fixed-step RK4 so every run is
reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .rational import Chart, Polynomial, RationalFunction
from .graded import MULTIVECTOR, GradedElement
from .nambu import NambuStructure, calogero_structure, hamiltonian_vf, kepler_structure

SINGULAR_EPS = 1e-6


def _as_exact(value) -> Fraction:
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot bind parameter to {type(value).__name__}")


def _float_poly(poly: Polynomial, dim: int):
    """Float evaluator for a polynomial in the coordinates only."""
    terms = [(float(coeff), exps[:dim]) for exps, coeff in poly.terms.items()]

    def evaluate(xs) -> float:
        total = 0.0
        for c, exps in terms:
            t = c
            for x, e in zip(xs, exps):
                if e:
                    t *= x**e
            total += t
        return total

    return evaluate


def _float_rf(rf: RationalFunction, dim: int):
    num = _float_poly(rf.num, dim)
    den = _float_poly(rf.den, dim)

    def evaluate(xs) -> float:
        return num(xs) / den(xs)

    return evaluate


class NumericField:
    """Float-valued image of a symbolic vector field with parameters bound."""

    __slots__ = ("chart", "components", "params", "_evaluators")

    def __init__(
        self,
        chart: Chart,
        components: Mapping[str, RationalFunction],
        params: Mapping[str, Fraction],
    ):
        missing = [c for c in chart.coordinates if c not in components]
        if missing:
            raise ValueError(f"missing component for {missing[0]!r}")
        self.chart = chart
        self.components = dict(components)
        self.params = dict(params)
        dim = chart.dim
        self._evaluators = [
            _float_rf(self.components[c], dim) for c in chart.coordinates
        ]

    def __call__(self, state: Sequence[float]) -> list[float]:
        return [ev(state) for ev in self._evaluators]

    def eval_exact(self, point: Mapping[str, int | Fraction]) -> list[Fraction]:
        """Exact value at a rational point; parameters are already bound."""
        full = dict(point)
        for name in self.chart.parameters:
            full.setdefault(name, 0)
        return [self.components[c].evaluate(full) for c in self.chart.coordinates]


def compile_numeric(field: GradedElement, params: Mapping | None = None) -> NumericField:
    """Bind parameters exactly and compile a vector field to float closures.

    The field must be a vector field (degree-1 multivector, or zero); every
    chart parameter needs a binding.
    """
    chart = field.chart
    if not field.is_zero:
        if field.variance != MULTIVECTOR or field.degrees() != (1,):
            raise ValueError("compile_numeric takes a vector field")
    bindings = {name: _as_exact(v) for name, v in (params or {}).items()}
    for name in bindings:
        if name not in chart.parameters:
            raise ValueError(f"unknown parameter: {name!r}")
    unbound = [p for p in chart.parameters if p not in bindings]
    if unbound:
        raise ValueError(f"unbound parameter: {unbound[0]!r}")
    comps = {name: RationalFunction.zero(chart) for name in chart.coordinates}
    for (i,), coeff in field.terms.get(1, {}).items():
        comps[chart.coordinates[i]] = coeff.substitute(bindings)
    return NumericField(chart, comps, bindings)


@dataclass
class Trajectory:
    """Fixed-step time series of chart coordinates."""

    times: np.ndarray
    states: np.ndarray
    method: str = "rk4"
    step: float = 0.0
    truncated: bool = False

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states lengths differ")


def rk4_integrate(
    field: NumericField,
    x0: Sequence[float],
    t_end: float,
    dt: float,
    guard: Callable[[Sequence[float]], bool] | None = None,
) -> Trajectory:
    """Classical 4th-order fixed-step integration.

    `guard` flags states too close to a singular locus; a True at the start
    is an error, a True mid-run stops early and marks the trajectory
    truncated.
    """
    if dt <= 0:
        raise ValueError("step must be positive")
    x = [float(v) for v in x0]
    if len(x) != field.chart.dim:
        raise ValueError("initial state dimension mismatch")
    if guard is not None and guard(x):
        raise ValueError("initial state is inside the singular region")
    steps = max(1, round(t_end / dt))
    times = [0.0]
    states = [list(x)]
    truncated = False
    for k in range(steps):
        k1 = field(x)
        k2 = field([xi + 0.5 * dt * v for xi, v in zip(x, k1)])
        k3 = field([xi + 0.5 * dt * v for xi, v in zip(x, k2)])
        k4 = field([xi + dt * v for xi, v in zip(x, k3)])
        x = [
            xi + dt * (a + 2 * b + 2 * c + d) / 6.0
            for xi, a, b, c, d in zip(x, k1, k2, k3, k4)
        ]
        if guard is not None and guard(x):
            truncated = True
            break
        times.append((k + 1) * dt)
        states.append(list(x))
    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        method="rk4",
        step=dt,
        truncated=truncated,
    )


def _scalar_evaluator(fn: RationalFunction, params: Mapping[str, Fraction], dim: int):
    return _float_rf(fn.substitute(params) if params else fn, dim)


def conservation_report(
    trajectory: Trajectory,
    integrals: Mapping[str, RationalFunction],
    params: Mapping | None = None,
) -> dict:
    """Max drift of each integral along the trajectory.

    Drift is relative when the initial value is away from zero (|I0| >
    1e-12), absolute otherwise.
    """
    bindings = {name: _as_exact(v) for name, v in (params or {}).items()}
    out = {}
    worst = 0.0
    for name, fn in integrals.items():
        ev = _scalar_evaluator(fn, bindings, fn.chart.dim)
        values = [ev(state) for state in trajectory.states]
        i0 = values[0]
        scale = abs(i0) if abs(i0) > 1e-12 else 1.0
        drift = max(abs(v - i0) for v in values) / scale
        out[name] = {"initial": i0, "max_drift": drift}
        worst = max(worst, drift)
    return {"integrals": out, "max_drift": worst}


def newton_equivalence_check(trajectory: Trajectory, r_index: int = 1) -> dict:
    """Second difference of the separation against the 4/r^3 force law.

    Interior central differences of r(t) are compared with 4/r^3 pointwise;
    reports the max relative error.
    """
    r = trajectory.states[:, r_index]
    dt = trajectory.step
    if len(r) < 3:
        raise ValueError("trajectory too short for a second difference")
    worst = 0.0
    for i in range(1, len(r) - 1):
        accel = (r[i + 1] - 2.0 * r[i] + r[i - 1]) / (dt * dt)
        force = 4.0 / r[i] ** 3
        worst = max(worst, abs(accel - force) / abs(force))
    return {"max_rel_error": worst, "interior_points": len(r) - 2}


# -- ready-to-run example configurations ---------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Everything a numeric run needs: structure, flow, bindings, start point."""

    name: str
    structure: NambuStructure
    integrals: dict[str, RationalFunction]
    flow: tuple[RationalFunction, ...]
    params: dict[str, Fraction] = dataclass_field(default_factory=dict)
    initial: tuple[float, ...] = ()
    dt: float = 1e-3
    t_end: float = 1.0
    guard: Callable[[Sequence[float]], bool] | None = None

    def compiled_field(self) -> NumericField:
        symbolic = hamiltonian_vf(self.structure, self.flow)
        return compile_numeric(symbolic, self.params)

    def integrate(self, dt: float | None = None, t_end: float | None = None,
                  initial: Sequence[float] | None = None) -> Trajectory:
        return rk4_integrate(
            self.compiled_field(),
            self.initial if initial is None else initial,
            self.t_end if t_end is None else t_end,
            self.dt if dt is None else dt,
            guard=self.guard,
        )


def calogero_run() -> RunConfig:
    structure, named = calogero_structure()
    return RunConfig(
        name="calogero",
        structure=structure,
        integrals=named,
        flow=(named["H"], named["K"]),
        initial=(0.0, 1.0, 0.3, 0.2),
        guard=lambda state: abs(state[1]) < SINGULAR_EPS,
    )


def kepler_run() -> RunConfig:
    structure, named = kepler_structure()
    return RunConfig(
        name="kepler",
        structure=structure,
        integrals=named,
        flow=tuple(named[f"h{i}"] for i in range(1, 6)),
        params={"m": Fraction(1), "k": Fraction(1)},
        initial=(1.0, 1.1, 0.9, 0.5, 0.2, 0.9),
        guard=lambda state: abs(state[0] + state[1] + state[2]) < SINGULAR_EPS,
    )


def example_run(name: str) -> RunConfig:
    runs = {"calogero": calogero_run, "kepler": kepler_run}
    if name not in runs:
        raise ValueError(f"unknown system: {name!r} (choose from {sorted(runs)})")
    return runs[name]()
