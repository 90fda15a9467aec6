"""Batch verification suite: the package's headline results as checkable criteria.

Each criterion returns a pass/fail verdict with details; `run_all` executes
the registry in order.  Every randomized check is seeded, so reports are
reproducible.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .rational import Chart, Polynomial, RationalFunction
from .graded import (
    FORM,
    MULTIVECTOR,
    GradedElement,
    differential,
    insert_covector,
    pair,
    vector_field,
)
from .operators import (
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
    decompose_tensorial,
    extract_top_multivector,
    fi_residual,
    function_bracket,
    graded_commutator,
    random_multivector,
    random_unit_killing_operator,
    symb_top_vanishes,
    unit_form,
)
from .nambu import (
    NambuStructure,
    calogero_structure,
    canonical_operator,
    check_fi_via_lie,
    fi_residual_functions,
    hamiltonian_vf,
    kepler_structure,
    nambu_bracket,
    section_bracket,
    theorem_bracket_residual,
    algebroid_axioms_check,
    verify_fundamental_identity,
)
from .dynamics import (
    calogero_run,
    conservation_report,
    kepler_run,
    newton_equivalence_check,
)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    elapsed_ms: float
    budget_ms: float | None
    details: dict

    def as_dict(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "verdict": "passed" if self.passed else "failed",
            "elapsed_ms": round(self.elapsed_ms, 1),
            "budget_ms": self.budget_ms,
            "details": self.details,
        }


def _rand_poly(chart: Chart, rng: random.Random, max_deg: int = 2) -> RationalFunction:
    out = RationalFunction.zero(chart)
    for _ in range(rng.randint(1, 2)):
        t = RationalFunction.zero(chart) + rng.randint(-3, 3)
        for _ in range(rng.randint(0, max_deg)):
            t = t * RationalFunction.variable(chart, rng.choice(chart.coordinates))
        out = out + t
    if out.is_zero:
        out = RationalFunction.variable(chart, chart.coordinates[0])
    return out


def _rand_form(chart: Chart, rng: random.Random, degree: int) -> GradedElement:
    out = GradedElement.zero(chart, FORM)
    for idx in itertools.combinations(range(chart.dim), degree):
        if rng.random() < 0.6:
            out = out + GradedElement.basis(chart, FORM, idx) * _rand_poly(chart, rng)
    if out.is_zero:
        out = GradedElement.basis(chart, FORM, range(degree))
    return out


def _both_systems():
    return [calogero_structure(), kepler_structure()]


# -- criteria -----------------------------------------------------------------------


def criterion_1(seed: int = 0) -> tuple[bool, dict]:
    """Kepler Hamiltonian field equals its closed form exactly."""
    structure, named = kepler_structure()
    chart = structure.chart
    js = [RationalFunction.variable(chart, f"J{i}") for i in (1, 2, 3)]
    m = RationalFunction.variable(chart, "m")
    k = RationalFunction.variable(chart, "k")
    scale = m * k * k * 2 / (js[0] + js[1] + js[2]) ** 3
    expected = vector_field(chart, {"phi1": scale, "phi2": scale, "phi3": scale})
    got = hamiltonian_vf(structure, [named[f"h{i}"] for i in range(1, 6)])
    return (got - expected).is_zero, {"field": str(got)}


def criterion_2(seed: int = 0) -> tuple[bool, dict]:
    """Calogero Hamiltonian field equals its closed form exactly."""
    structure, named = calogero_structure()
    chart = structure.chart
    r = RationalFunction.variable(chart, "r")
    pr = RationalFunction.variable(chart, "p_r")
    cube = r * r * r
    expected = vector_field(chart, {"r": -pr, "p_z": 2 / cube, "p_r": -4 / cube})
    got = hamiltonian_vf(structure, (named["H"], named["K"]))
    return (got - expected).is_zero, {"field": str(got)}


def criterion_3(seed: int = 0) -> tuple[bool, dict]:
    """Generating-operator bracket equals the multivector pairing bracket."""
    rng = random.Random(seed)
    checked = 0
    for structure, named in _both_systems():
        chart = structure.chart
        coords = [RationalFunction.variable(chart, c) for c in chart.coordinates]
        fns = list(named.values())
        cases = [coords[: structure.n], [*fns, coords[0]][: structure.n]]
        cases += [
            [_rand_poly(chart, rng) for _ in range(structure.n)] for _ in range(200)
        ]
        for fs in cases:
            if not theorem_bracket_residual(structure, fs).is_zero:
                return False, {"witness": [str(f) for f in fs]}
            checked += 1
    return True, {"tuples_checked": checked}


def criterion_4(seed: int = 0) -> tuple[bool, dict]:
    """Both commutator identities for multiplication operators hold exactly.

    With L the insert-then-differentiate Lie operator, [L_P, mu_f] is the
    insertion of i_{df}P; with the opposite orientation [d, i_P],
    [[d,i_P], mu_{df}] equals [d, i_{i_{df}P}].  Checked on every basis form
    and 50 random functions per system.
    """
    rng = random.Random(seed)
    checked = 0
    for structure, _ in _both_systems():
        chart = structure.chart
        p = structure.multivector
        n = structure.n
        basis = [
            GradedElement.basis(chart, FORM, idx)
            for k in range(0, chart.dim + 1)
            for idx in itertools.combinations(range(chart.dim), k)
        ]
        fns = [RationalFunction.variable(chart, c) for c in chart.coordinates]
        fns += [_rand_poly(chart, rng) for _ in range(50)]
        d = ExtDiff(chart)
        canon = Commutator(d, Insert(p, multivector_degree=n))
        for f in fns:
            ip = insert_covector(differential(f), p)
            first_lhs = graded_commutator(
                LieDer(p, multivector_degree=n),
                MulForm(GradedElement.scalar(chart, f, FORM)),
            )
            first_rhs = Insert(ip, multivector_degree=n - 1)
            second_lhs = graded_commutator(canon, MulForm(differential(f)))
            second_rhs = Commutator(d, Insert(ip, multivector_degree=n - 1))
            for omega in basis:
                if not (first_lhs(omega) - first_rhs(omega)).is_zero:
                    return False, {"identity": 1, "f": str(f), "form": str(omega)}
                if not (second_lhs(omega) - second_rhs(omega)).is_zero:
                    return False, {"identity": 2, "f": str(f), "form": str(omega)}
                checked += 2
    return True, {"applications_checked": checked}


def criterion_5(seed: int = 0) -> tuple[bool, dict]:
    """The graded-commutator substitution identity has zero residual.

    100 seeded random unit-killing operators of order at most n, arities
    n in {2, 3}, charts of dimension up to 4, random form arguments.
    """
    rng = random.Random(seed)
    charts = {
        2: Chart(("x", "y")),
        3: Chart(("x", "y", "z")),
        4: Chart(("x", "y", "z", "w")),
    }
    checked = 0
    while checked < 100:
        n = rng.choice((2, 3))
        dim = rng.choice([d for d in (2, 3, 4) if d >= n])
        chart = charts[dim]
        op = random_unit_killing_operator(chart, n, rng)
        first = [_rand_form(chart, rng, rng.randint(0, 2)) for _ in range(n - 1)]
        second = [_rand_form(chart, rng, rng.randint(0, 1)) for _ in range(n)]
        res = fi_residual(op, first, second)
        if not res.is_zero:
            return False, {
                "n": n,
                "dim": dim,
                "operator": str(op),
                "residual": str(res),
            }
        checked += 1
    return True, {"operators_checked": checked}


def criterion_6(seed: int = 0) -> tuple[bool, dict]:
    """Fundamental identity holds by both routes, and the routes agree."""
    rng = random.Random(seed)
    checked = 0
    for structure, _ in _both_systems():
        chart = structure.chart
        n = structure.n
        coords = [RationalFunction.variable(chart, c) for c in chart.coordinates]
        deg2 = []
        for i, j in itertools.combinations_with_replacement(range(chart.dim), 2):
            deg2.append(coords[i] * coords[j])
        pool = coords + deg2
        tuples = [
            (fs, gs)
            for fs in itertools.combinations(coords, n - 1)
            for gs in itertools.combinations(coords, n)
        ]
        samples = 24 if chart.dim <= 4 else 8
        for _ in range(samples):
            fs = tuple(rng.choice(pool) for _ in range(n - 1))
            gs = tuple(rng.choice(pool) for _ in range(n))
            tuples.append((fs, gs))
        for fs, gs in tuples:
            direct = fi_residual_functions(structure, fs, gs)
            lie = check_fi_via_lie(structure, fs)
            omega = differential(gs[0])
            for g in gs[1:]:
                omega = omega.wedge(differential(g))
            via_lie = pair(lie, omega)
            if not direct.is_zero or not via_lie.is_zero or direct != via_lie:
                return False, {
                    "fs": [str(f) for f in fs],
                    "gs": [str(g) for g in gs],
                    "direct": str(direct),
                    "via_lie": str(via_lie),
                }
            checked += 1
    return True, {"tuples_checked": checked}


def criterion_7(seed: int = 0) -> tuple[bool, dict]:
    """Bracket of exact sections is the differential of the function bracket."""
    rng = random.Random(seed)
    checked = 0
    for structure, _ in _both_systems():
        chart = structure.chart
        for _ in range(100):
            fs = [_rand_poly(chart, rng) for _ in range(structure.n)]
            lhs = section_bracket(structure, [differential(f) for f in fs])
            rhs = differential(nambu_bracket(structure, fs))
            if not (lhs - rhs).is_zero:
                return False, {"witness": [str(f) for f in fs]}
            checked += 1
    return True, {"tuples_checked": checked}


def criterion_8(seed: int = 0) -> tuple[bool, dict]:
    """Skew-symmetry holds iff the top symbol is a multivector.

    The generating operator of a structure gives a fully skew bracket
    (every transposition of a random tuple flips the sign); an operator
    whose top symbol
    has a covector-valued part gives a detected non-skew pair whose symmetric
    defect matches the commutator proof term [[..[[D,d],mu_..],..]](1).
    """
    rng = random.Random(seed)
    details: dict = {}
    # fully skew side: generating operators of both example systems; every
    # transposition must flip the sign, which pins full antisymmetry
    for structure, _ in _both_systems():
        chart = structure.chart
        op = canonical_operator(structure)
        n = structure.n
        tuples = [[_rand_poly(chart, rng) for _ in range(n)] for _ in range(3)]
        swap_count = 0
        for fs in tuples:
            reference = function_bracket(op, fs)
            for i, j in itertools.combinations(range(n), 2):
                swapped = list(fs)
                swapped[i], swapped[j] = swapped[j], swapped[i]
                if function_bracket(op, swapped) != -reference:
                    return False, {
                        "system": chart.coordinates,
                        "tuple": [str(f) for f in fs],
                        "swap": (i, j),
                    }
                swap_count += 1
        details[f"skew_swaps_n{n}"] = swap_count

    # non-skew side: insertion-tensor part plus a composition of order 3
    chart = Chart(("x", "y"))
    one = RationalFunction.one(chart)
    delta = FormValuedMultivector(chart, 2, {((0, 1), 0): one})
    d = ExtDiff(chart)
    ins_x = Insert(GradedElement.basis(chart, MULTIVECTOR, (0,)))
    ins_y = Insert(GradedElement.basis(chart, MULTIVECTOR, (1,)))
    bad = Sum((InsertTensor(delta), Compose(ins_x, Compose(d, ins_y))))
    symb = symb_top_vanishes(bad, 2)
    if symb.passed:
        return False, {"error": "top symbol unexpectedly vanished"}
    x = RationalFunction.variable(chart, "x")
    y = RationalFunction.variable(chart, "y")
    f, g = x, x * y
    defect = function_bracket(bad, (f, g)) + function_bracket(bad, (g, f))
    if defect.is_zero:
        return False, {"error": "expected a non-skew pair"}
    chain = Commutator(bad, d)
    for fn in (f, g):
        chain = Commutator(chain, MulForm(GradedElement.scalar(chart, fn, FORM)))
    proof_term = chain(unit_form(chart)).as_scalar()
    if defect != proof_term:
        return False, {"defect": str(defect), "proof_term": str(proof_term)}
    details["defect"] = str(defect)
    details["symbol_witness"] = symb.status
    return True, details


def criterion_9(seed: int = 0) -> tuple[bool, dict]:
    """Top-symbol extraction and tensorial decomposition round-trip.

    50 random (N, A, Delta): the Lie-plus-insertion operator returns N
    exactly; adding a covector-valued insertion makes extraction error; the
    insertion sum decomposes back into (A, Delta) exactly.
    """
    rng = random.Random(seed)
    charts = {
        2: Chart(("x", "y")),
        3: Chart(("x", "y", "z")),
        4: Chart(("x", "y", "z", "w")),
    }
    strategy = TestStrategy(
        seed=seed, random_trials=1, monomial_degree=1, max_basis_forms=6,
        family_cap=200,
    )
    checked = 0
    while checked < 50:
        dim = rng.choice((2, 2, 3, 3, 4))
        n = rng.choice([k for k in (2, 3) if k <= dim])
        chart = charts[dim]
        n_vec = random_multivector(chart, n, rng)
        a_vec = random_multivector(chart, n - 1, rng)
        delta = _random_insertion_tensor(chart, n, rng)
        clean = Sum(
            (LieDer(n_vec, multivector_degree=n), Insert(a_vec, multivector_degree=n - 1))
        )
        got = extract_top_multivector(clean, n, strategy)
        if not (got - n_vec).is_zero:
            return False, {"stage": "extract", "n": n, "dim": dim}
        tainted = Sum(
            (
                LieDer(n_vec, multivector_degree=n),
                Insert(a_vec, multivector_degree=n - 1),
                InsertTensor(delta),
            )
        )
        try:
            extract_top_multivector(tainted, n, strategy)
            return False, {"stage": "extract-should-error", "n": n, "dim": dim}
        except ValueError:
            pass
        tensorial = Sum((Insert(a_vec, multivector_degree=n - 1), InsertTensor(delta)))
        a_got, d_got = decompose_tensorial(tensorial, n, strategy)
        if not (a_got - a_vec).is_zero or d_got != delta:
            return False, {"stage": "decompose", "n": n, "dim": dim}
        checked += 1
    return True, {"triples_checked": checked}


def _random_insertion_tensor(chart: Chart, n: int, rng: random.Random):
    entries = {}
    for idx in itertools.combinations(range(chart.dim), n):
        for j in range(chart.dim):
            if rng.random() < 0.4:
                c = RationalFunction.zero(chart) + rng.randint(-2, 2)
                if not c.is_zero:
                    entries[(idx, j)] = c
    if not entries:
        entries[(tuple(range(n)), 0)] = RationalFunction.one(chart)
    return FormValuedMultivector(chart, n, entries)


def criterion_10(seed: int = 0) -> tuple[bool, dict]:
    """Algebroid axioms pass on both systems including non-exact sections."""
    details = {}
    calogero, _ = calogero_structure()
    chart = calogero.chart
    r = RationalFunction.variable(chart, "r")
    pz = RationalFunction.variable(chart, "p_z")
    dr = differential(r)
    dpr = differential(RationalFunction.variable(chart, "p_r"))
    dpz = differential(pz)
    sections = [dr, dr * pz, dpr, dpz * r]
    report = algebroid_axioms_check(calogero, sections=sections, seed=seed, pairs=3)
    details["calogero"] = report.status
    if not report.passed:
        return False, details
    kepler, _ = kepler_structure()
    report = algebroid_axioms_check(kepler, seed=seed, pairs=2)
    details["kepler"] = report.status
    details["kepler_sections"] = report.sections
    if not report.passed:
        return False, details
    return True, details


def criterion_11(seed: int = 0) -> tuple[bool, dict]:
    """Calogero numerics: conservation, force law, 4th-order convergence."""
    cfg = calogero_run()
    traj = cfg.integrate()
    report = conservation_report(traj, cfg.integrals, cfg.params)
    details = {
        "H_drift": float(report["integrals"]["H"]["max_drift"]),
        "K_drift": float(report["integrals"]["K"]["max_drift"]),
    }
    ok = details["H_drift"] <= 1e-6 and details["K_drift"] <= 1e-6
    newton = newton_equivalence_check(traj)
    details["newton_max_rel_error"] = float(newton["max_rel_error"])
    ok = ok and newton["max_rel_error"] <= 1e-4
    coarse = conservation_report(
        cfg.integrate(dt=2e-3), {"H": cfg.integrals["H"]}, cfg.params
    )["max_drift"]
    fine = conservation_report(
        cfg.integrate(dt=1e-3), {"H": cfg.integrals["H"]}, cfg.params
    )["max_drift"]
    details["drift_ratio_on_halving"] = float(coarse / fine) if fine else float("inf")
    ok = ok and fine <= coarse / 8.0
    return ok, details


def criterion_12(seed: int = 0) -> tuple[bool, dict]:
    """Kepler numerics: actions frozen, angle differences conserved."""
    import numpy as np

    cfg = kepler_run()
    traj = cfg.integrate()
    j_wander = float(np.abs(traj.states[:, :3] - traj.states[0, :3]).max())
    report = conservation_report(traj, cfg.integrals, cfg.params)
    details = {
        "J_max_wander": j_wander,
        "h4_drift": float(report["integrals"]["h4"]["max_drift"]),
        "h5_drift": float(report["integrals"]["h5"]["max_drift"]),
    }
    ok = (
        j_wander <= 1e-12
        and details["h4_drift"] <= 1e-9
        and details["h5_drift"] <= 1e-9
    )
    return ok, details


CRITERIA: list[tuple[int, str, Callable, float | None]] = [
    (1, "kepler-hamiltonian-field", criterion_1, 1_000.0),
    (2, "calogero-hamiltonian-field", criterion_2, 1_000.0),
    (3, "operator-bracket-equals-pairing", criterion_3, 60_000.0),
    (4, "multiplication-commutator-identities", criterion_4, None),
    (5, "commutator-substitution-residual", criterion_5, 120_000.0),
    (6, "fundamental-identity-two-routes", criterion_6, None),
    (7, "exact-section-bracket", criterion_7, None),
    (8, "skew-symmetry-criterion", criterion_8, None),
    (9, "symbol-extraction-roundtrip", criterion_9, None),
    (10, "algebroid-axioms", criterion_10, None),
    (11, "calogero-numeric", criterion_11, 5_000.0),
    (12, "kepler-numeric", criterion_12, 5_000.0),
]


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    for num, name, fn, budget in CRITERIA:
        if num == number:
            start = time.perf_counter()
            try:
                passed, details = fn(seed)
            except Exception as exc:  # noqa: BLE001 - reported, not swallowed
                passed, details = False, {"error": f"{type(exc).__name__}: {exc}"}
            elapsed = (time.perf_counter() - start) * 1000.0
            if budget is not None and elapsed > budget:
                passed = False
                details["over_budget_ms"] = elapsed - budget
            return CriterionResult(num, name, passed, elapsed, budget, details)
    raise ValueError(f"no criterion {number}")


def run_all(seed: int = 0, numbers: list[int] | None = None) -> list[CriterionResult]:
    wanted = numbers or [num for num, *_ in CRITERIA]
    return [run_criterion(num, seed) for num in wanted]
