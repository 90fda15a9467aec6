"""n-ary Poisson-type structures from top multivectors.

A structure is a chart plus a homogeneous n-vector P.  The induced n-ary
function bracket is {f_1,...,f_n} = P(df_1, ..., df_n); Hamiltonian vector
fields come from inserting n-1 differentials; the bracket on 1-form sections
and the anchor map come from the generating operator.

The generating operator is [d, i_P].  The other orientation [i_P, d] induces
the function bracket only up to the sign (-1)^(n-1), so the commutator order
matters for even n; this module consistently uses [d, i_P], under which the
bracket of exact sections is d{f_1,...,f_n} and the anchor of exact sections
is the Hamiltonian vector field, in every arity.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .rational import Chart, Polynomial, RationalFunction
from .graded import (
    MULTIVECTOR,
    GradedElement,
    _as_scalar_fn,
    differential,
    insert_covector,
    lie_derivative,
    pair,
    vf_apply,
    vf_commutator,
)
from .operators import (
    Commutator,
    ExtDiff,
    GradedOperator,
    Insert,
    filippov_bracket,
    function_bracket,
)


class NambuStructure:
    """A chart with a homogeneous n-vector; bracket arity n."""

    __slots__ = ("chart", "n", "multivector", "fi_status", "fi_witness", "fi_strategy")

    def __init__(self, chart: Chart, n: int, multivector: GradedElement):
        if n < 2 or n > chart.dim:
            raise ValueError("bracket arity must be between 2 and the chart dimension")
        if multivector.chart != chart:
            raise ValueError("chart mismatch")
        if not multivector.is_zero:
            if multivector.variance != MULTIVECTOR:
                raise ValueError("structure needs a multivector")
            if multivector.degrees() != (n,):
                raise ValueError(f"multivector must be homogeneous of degree {n}")
        self.chart = chart
        self.n = n
        self.multivector = multivector
        self.fi_status = "unverified"
        self.fi_witness = None
        self.fi_strategy = None

    def __repr__(self) -> str:
        return f"NambuStructure(n={self.n}, P={self.multivector})"


def _scalar(chart: Chart, value) -> RationalFunction:
    fn = _as_scalar_fn(chart, value)
    if fn is None:
        raise TypeError(f"expected a scalar function, got {type(value).__name__}")
    return fn


def nambu_bracket(structure: NambuStructure, fns) -> RationalFunction:
    """{f_1,...,f_n} = P(df_1, ..., df_n)."""
    values = [_scalar(structure.chart, f) for f in fns]
    if len(values) != structure.n:
        raise ValueError(f"bracket takes exactly {structure.n} functions")
    omega = differential(values[0])
    for f in values[1:]:
        omega = omega.wedge(differential(f))
    return pair(structure.multivector, omega)


def hamiltonian_vf(structure: NambuStructure, fns) -> GradedElement:
    """Vector field of an (n-1)-tuple: insert df_1, then df_2, ... into P."""
    values = [_scalar(structure.chart, f) for f in fns]
    if len(values) != structure.n - 1:
        raise ValueError(f"expected {structure.n - 1} functions")
    current = structure.multivector
    for f in values:
        current = insert_covector(differential(f), current)
    return current


def canonical_operator(structure: NambuStructure) -> GradedOperator:
    """The bracket-generating operator [d, i_P]."""
    return Commutator(
        ExtDiff(structure.chart),
        Insert(structure.multivector, multivector_degree=structure.n),
    )


def theorem_bracket_residual(structure: NambuStructure, fns) -> RationalFunction:
    """Generating-operator bracket minus the pairing bracket; identically 0."""
    values = [_scalar(structure.chart, f) for f in fns]
    return function_bracket(canonical_operator(structure), values) - nambu_bracket(
        structure, values
    )


def fi_residual_functions(structure: NambuStructure, first, second) -> RationalFunction:
    """Fundamental-identity defect on functions.

    {f_1,...,f_{n-1},{g_1,...,g_n}} - sum_j {g_1,...,{f...,g_j},...,g_n};
    identically zero exactly when the bracket makes the functions an n-Lie
    algebra.
    """
    fs = [_scalar(structure.chart, f) for f in first]
    gs = [_scalar(structure.chart, g) for g in second]
    n = structure.n
    if len(fs) != n - 1 or len(gs) != n:
        raise ValueError(f"expected {n - 1} outer and {n} inner functions")
    total = nambu_bracket(structure, [*fs, nambu_bracket(structure, gs)])
    for j in range(n):
        inner = nambu_bracket(structure, [*fs, gs[j]])
        total = total - nambu_bracket(structure, [*gs[:j], inner, *gs[j + 1 :]])
    return total


def check_fi_via_lie(structure: NambuStructure, fns) -> GradedElement:
    """Lie derivative of P along the Hamiltonian field of the tuple.

    Vanishes for every tuple iff the fundamental identity holds; pairing the
    result with dg_1 ^ ... ^ dg_n reproduces fi_residual_functions exactly.
    """
    return lie_derivative(hamiltonian_vf(structure, fns), structure.multivector)


def _degree_two_monomials(chart: Chart) -> list[RationalFunction]:
    out = []
    arity = len(chart.variables)
    for i, j in itertools.combinations_with_replacement(range(chart.dim), 2):
        exps = [0] * arity
        exps[i] += 1
        exps[j] += 1
        out.append(RationalFunction(Polynomial.monomial(chart, tuple(exps))))
    return out


def _random_poly(chart: Chart, rng: random.Random, max_deg: int = 3) -> RationalFunction:
    arity = len(chart.variables)
    total = Polynomial.zero(chart)
    for _ in range(rng.randint(1, 3)):
        exps = [0] * arity
        for _ in range(rng.randint(0, max_deg)):
            exps[rng.randrange(chart.dim)] += 1
        total = total + Polynomial.monomial(chart, tuple(exps), rng.randint(-3, 3))
    if total.is_zero:
        total = Polynomial.variable(chart, chart.coordinates[0])
    return RationalFunction(total)


def verify_fundamental_identity(
    structure: NambuStructure, seed: int = 0, samples: int = 40
) -> bool:
    """Probe the fundamental identity and record the outcome on the structure.

    Deterministic passes first (all distinct-coordinate tuples, then tuples
    over coordinates plus degree-2 monomials while that stays small), then
    seeded random polynomial tuples.  A failure stores a reproducible witness
    tuple; a pass records the strategy that ran.
    """
    chart = structure.chart
    n = structure.n
    coords = [RationalFunction.variable(chart, c) for c in chart.coordinates]

    def residual_check(fs, gs):
        res = fi_residual_functions(structure, fs, gs)
        if not res.is_zero:
            structure.fi_status = "failed"
            structure.fi_witness = (tuple(fs), tuple(gs), res)
            return False
        return True

    for fs in itertools.combinations(coords, n - 1):
        for gs in itertools.combinations(coords, n):
            if not residual_check(fs, gs):
                return False

    pool = coords + _degree_two_monomials(chart)
    exhaustive_pairs = 0
    if len(pool) ** (2 * n - 1) <= 4000:
        for fs in itertools.combinations(pool, n - 1):
            for gs in itertools.combinations(pool, n):
                exhaustive_pairs += 1
                if not residual_check(fs, gs):
                    return False

    rng = random.Random(seed)

    def draw():
        if rng.random() < 0.6:
            return rng.choice(pool)
        return _random_poly(chart, rng)

    for _ in range(samples):
        fs = [draw() for _ in range(n - 1)]
        gs = [draw() for _ in range(n)]
        if not residual_check(fs, gs):
            return False

    structure.fi_status = "passed"
    structure.fi_witness = None
    structure.fi_strategy = {
        "coordinate_tuples": "exhaustive",
        "degree_two_tuples": "exhaustive" if exhaustive_pairs else "sampled",
        "random_samples": samples,
        "seed": seed,
    }
    return True


def section_bracket(structure: NambuStructure, sections) -> GradedElement:
    """n-ary bracket of 1-form sections via the generating operator."""
    return filippov_bracket(canonical_operator(structure), sections)


def anchor(structure: NambuStructure, sections) -> GradedElement:
    """Anchor vector field of n-1 sections: fold their insertions into P.

    Acts on functions as the section bracket with the function in the last
    slot; C-infinity linear in every slot.
    """
    chart = structure.chart
    forms = []
    for a in sections:
        if not isinstance(a, GradedElement):
            raise TypeError("anchor takes 1-form sections")
        if not a.is_zero and a.degrees() != (1,):
            raise ValueError("anchor takes 1-form sections")
        forms.append(a)
    if len(forms) != structure.n - 1:
        raise ValueError(f"expected {structure.n - 1} sections")
    current = structure.multivector
    for a in forms:
        current = insert_covector(a, current)
    return current


@dataclass
class AlgebroidReport:
    """Residual log for the two algebroid axioms over sampled sections."""

    fi_status: str
    sections: list[str]
    fi_witness: tuple | None = None
    axiom1: list[tuple[str, GradedElement]] = field(default_factory=list)
    axiom2: list[tuple[str, GradedElement]] = field(default_factory=list)

    @property
    def failures(self) -> list[tuple[str, GradedElement]]:
        return [(lbl, res) for lbl, res in self.axiom1 + self.axiom2 if not res.is_zero]

    @property
    def status(self) -> str:
        if self.fi_status != "passed" or self.failures:
            return "failed"
        return "passed"

    @property
    def passed(self) -> bool:
        return self.status == "passed"


def _default_sections(structure: NambuStructure) -> list[tuple[str, GradedElement]]:
    chart = structure.chart
    out = []
    for name in chart.coordinates:
        out.append((f"d{name}", differential(RationalFunction.variable(chart, name))))
    # non-exact sections f*dg
    for i in range(min(chart.dim, 3)):
        f = chart.coordinates[(i + 1) % chart.dim]
        g = chart.coordinates[i]
        section = differential(RationalFunction.variable(chart, g))
        out.append((f"{f}*d{g}", section * RationalFunction.variable(chart, f)))
    return out


def algebroid_axioms_check(
    structure: NambuStructure,
    sections=None,
    seed: int = 0,
    pairs: int = 2,
) -> AlgebroidReport:
    """Check both algebroid axioms on sampled section tuples.

    Axiom 1: the anchor intertwines the section bracket with the commutator
    of vector fields.  Axiom 2: the bracket is a Leibniz derivation in the
    last slot with the anchor supplying the derivative term.
    """
    if structure.fi_status == "unverified":
        verify_fundamental_identity(structure, seed=seed)
    chart = structure.chart
    n = structure.n
    rng = random.Random(seed)
    named = _default_sections(structure)
    if sections:
        named = named + [(f"user{i}", s) for i, s in enumerate(sections)]
    report = AlgebroidReport(
        fi_status=structure.fi_status,
        sections=[lbl for lbl, _ in named],
        fi_witness=structure.fi_witness,
    )

    def draw_tuple():
        picked = rng.sample(named, n - 1)
        label = "(" + ", ".join(lbl for lbl, _ in picked) + ")"
        return label, [s for _, s in picked]

    for _ in range(pairs):
        xl, xs = draw_tuple()
        yl, ys = draw_tuple()
        lhs = vf_commutator(anchor(structure, xs), anchor(structure, ys))
        rhs = GradedElement.zero(chart, MULTIVECTOR)
        for i in range(n - 1):
            replaced = section_bracket(structure, [*xs, ys[i]])
            rhs = rhs + anchor(structure, [*ys[:i], replaced, *ys[i + 1 :]])
        report.axiom1.append((f"[q{xl}, q{yl}]", lhs - rhs))

    for _ in range(pairs):
        al, alphas = draw_tuple()
        f = rng.choice(
            [RationalFunction.variable(chart, c) for c in chart.coordinates]
            + [_random_poly(chart, rng, 2)]
        )
        bl, b = rng.choice(named)
        lhs = section_bracket(structure, [*alphas, b * f])
        rhs = section_bracket(structure, [*alphas, b]) * f + b * vf_apply(
            anchor(structure, alphas), f
        )
        report.axiom2.append((f"[[{al}, ({f})*{bl}]]", lhs - rhs))

    return report


# -- the two worked example systems -------------------------------------------------


def kepler_structure() -> tuple[NambuStructure, dict[str, RationalFunction]]:
    """Action-angle Kepler system: 6-vector scaled by 2mk^2/(J1+J2+J3)^3.

    Returns the structure and its five commuting first integrals
    (three actions and two angle differences).
    """
    chart = Chart(
        ("J1", "J2", "J3", "phi1", "phi2", "phi3"),
        ("m", "k"),
    )
    arity = len(chart.variables)

    def mono(coeff=1, **powers):
        exps = [0] * arity
        for name, p in powers.items():
            exps[chart.index(name)] = p
        return Polynomial.monomial(chart, tuple(exps), coeff)

    num = mono(2, m=1, k=2)
    s = mono(J1=1) + mono(J2=1) + mono(J3=1)
    coeff = RationalFunction(num, s ** 3)
    p6 = GradedElement.basis(chart, MULTIVECTOR, range(6)) * coeff
    structure = NambuStructure(chart, 6, p6)
    j1, j2, j3 = (RationalFunction.variable(chart, f"J{i}") for i in (1, 2, 3))
    phi1, phi2, phi3 = (RationalFunction.variable(chart, f"phi{i}") for i in (1, 2, 3))
    integrals = {
        "h1": j1,
        "h2": j2,
        "h3": j3,
        "h4": phi1 - phi2,
        "h5": phi2 - phi3,
    }
    return structure, integrals


def calogero_structure() -> tuple[NambuStructure, dict[str, RationalFunction]]:
    """Two inverse-square interacting particles in relative coordinates.

    Chart (z, r, p_z, p_r) with the constant 3-vector in the (r, p_z, p_r)
    directions; returns the structure plus the two conserved Hamiltonians.
    """
    chart = Chart(("z", "r", "p_z", "p_r"))
    r = RationalFunction.variable(chart, "r")
    pz = RationalFunction.variable(chart, "p_z")
    pr = RationalFunction.variable(chart, "p_r")
    p3 = GradedElement.basis(chart, MULTIVECTOR, (1, 2, 3))
    structure = NambuStructure(chart, 3, p3)
    energy = pz * pz + pr * pz + pr * pr * Fraction(1, 2) + (r * r) ** -1
    momentum = pz * 2 + pr
    return structure, {"H": energy, "K": momentum}
