"""Exterior algebra over a chart: differential forms and multivector fields.

A graded element is a finite sum of homogeneous terms, each a rational-function
coefficient times a wedge of basis covectors (variance "form") or basis
vectors (variance "multivector").  Terms are indexed by strictly increasing
tuples of coordinate indices; degree zero is the empty tuple, so functions
embed as degree-0 elements of either variance.

Insertion conventions (fixed once, everything downstream depends on them):

* inserting a decomposable multivector into a form fills the form's leading
  argument slots in factor order, so inserting @x^@y into dx^dy gives 1;
* inserting a covector into a multivector contracts the multivector's first
  factor slot, so inserting dx into @x^@y gives @y.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Mapping

from .rational import Chart, Polynomial, RationalFunction

FORM = "form"
MULTIVECTOR = "multivector"

Indices = tuple[int, ...]
ScalarLike = "RationalFunction | Polynomial | int | Fraction"


def _as_scalar_fn(chart: Chart, value) -> RationalFunction | None:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    if isinstance(value, (int, Fraction)):
        return RationalFunction.const(chart, value)
    return None


def _merge_sign(left: Indices, right: Indices) -> tuple[int, Indices] | None:
    """Sign and sorted tuple for concatenating two increasing index tuples.

    Returns None when the tuples overlap (the wedge vanishes).
    """
    if set(left) & set(right):
        return None
    inversions = 0
    for i in left:
        for j in right:
            if i > j:
                inversions += 1
    merged = tuple(sorted(left + right))
    return (-1 if inversions % 2 else 1, merged)


class GradedElement:
    """A sum of wedge terms of one variance over a fixed chart."""

    __slots__ = ("chart", "variance", "terms")

    def __init__(
        self,
        chart: Chart,
        variance: str,
        terms: Mapping[int, Mapping[Indices, RationalFunction]] | None = None,
    ):
        if variance not in (FORM, MULTIVECTOR):
            raise ValueError(f"variance must be {FORM!r} or {MULTIVECTOR!r}")
        cleaned: dict[int, dict[Indices, RationalFunction]] = {}
        for degree, comps in (terms or {}).items():
            for idx, coeff in comps.items():
                idx = tuple(idx)
                if len(idx) != degree:
                    raise ValueError(f"index tuple {idx} does not match degree {degree}")
                if any(not 0 <= i < chart.dim for i in idx):
                    raise ValueError(f"coordinate index out of range in {idx}")
                if any(a >= b for a, b in zip(idx, idx[1:])):
                    raise ValueError(f"index tuple {idx} must be strictly increasing")
                if coeff.chart != chart:
                    raise ValueError("chart mismatch in coefficient")
                if not coeff.is_zero:
                    cleaned.setdefault(degree, {})[idx] = coeff
        self.chart = chart
        self.variance = variance
        self.terms = cleaned

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, chart: Chart, variance: str) -> GradedElement:
        return cls(chart, variance)

    @classmethod
    def scalar(cls, chart: Chart, value, variance: str = FORM) -> GradedElement:
        fn = _as_scalar_fn(chart, value)
        if fn is None:
            raise TypeError(f"cannot use {type(value).__name__} as a scalar")
        return cls(chart, variance, {0: {(): fn}})

    @classmethod
    def basis(cls, chart: Chart, variance: str, indices: Iterable[int]) -> GradedElement:
        idx = tuple(indices)
        return cls(chart, variance, {len(idx): {idx: RationalFunction.one(chart)}})

    # -- introspection ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self.terms))

    @property
    def is_homogeneous(self) -> bool:
        return len(self.terms) <= 1

    def degree(self) -> int:
        """Degree of a homogeneous element; zero element counts as degree 0."""
        if not self.terms:
            return 0
        if len(self.terms) > 1:
            raise ValueError("element is not homogeneous")
        return next(iter(self.terms))

    def component(self, indices: Iterable[int]) -> RationalFunction:
        idx = tuple(indices)
        return self.terms.get(len(idx), {}).get(idx, RationalFunction.zero(self.chart))

    def homogeneous_part(self, degree: int) -> GradedElement:
        out = GradedElement.__new__(GradedElement)
        out.chart = self.chart
        out.variance = self.variance
        part = self.terms.get(degree)
        out.terms = {degree: dict(part)} if part else {}
        return out

    def as_scalar(self) -> RationalFunction:
        """The underlying function of a degree-0 element."""
        if self.is_zero:
            return RationalFunction.zero(self.chart)
        if self.degrees() != (0,):
            raise ValueError("element has positive-degree terms")
        return self.terms[0][()]

    # -- arithmetic ------------------------------------------------------------

    def _compatible_variance(self, other: GradedElement) -> str:
        if self.variance == other.variance:
            return self.variance
        # pure functions carry no variance of their own
        if not self.terms or self.degrees() == (0,):
            return other.variance
        if not other.terms or other.degrees() == (0,):
            return self.variance
        raise ValueError("cannot mix forms and multivectors")

    def __add__(self, other) -> GradedElement:
        if not isinstance(other, GradedElement):
            fn = _as_scalar_fn(self.chart, other)
            if fn is None:
                return NotImplemented
            other = GradedElement.scalar(self.chart, fn, self.variance)
        if self.chart != other.chart:
            raise ValueError("chart mismatch")
        variance = self._compatible_variance(other)
        out: dict[int, dict[Indices, RationalFunction]] = {
            d: dict(comps) for d, comps in self.terms.items()
        }
        for d, comps in other.terms.items():
            bucket = out.setdefault(d, {})
            for idx, coeff in comps.items():
                acc = bucket.get(idx)
                acc = coeff if acc is None else acc + coeff
                if acc.is_zero:
                    bucket.pop(idx, None)
                else:
                    bucket[idx] = acc
            if not bucket:
                out.pop(d, None)
        result = GradedElement.__new__(GradedElement)
        result.chart = self.chart
        result.variance = variance
        result.terms = out
        return result

    __radd__ = __add__

    def __neg__(self) -> GradedElement:
        result = GradedElement.__new__(GradedElement)
        result.chart = self.chart
        result.variance = self.variance
        result.terms = {
            d: {idx: -c for idx, c in comps.items()} for d, comps in self.terms.items()
        }
        return result

    def __sub__(self, other) -> GradedElement:
        if isinstance(other, GradedElement):
            return self + (-other)
        fn = _as_scalar_fn(self.chart, other)
        if fn is None:
            return NotImplemented
        return self + (-fn)

    def __rsub__(self, other) -> GradedElement:
        return (-self) + other

    def __mul__(self, other) -> GradedElement:
        if isinstance(other, GradedElement):
            raise TypeError("use wedge() to multiply graded elements")
        fn = _as_scalar_fn(self.chart, other)
        if fn is None:
            return NotImplemented
        if fn.is_zero:
            return GradedElement.zero(self.chart, self.variance)
        result = GradedElement.__new__(GradedElement)
        result.chart = self.chart
        result.variance = self.variance
        result.terms = {
            d: {idx: c * fn for idx, c in comps.items()} for d, comps in self.terms.items()
        }
        return result

    __rmul__ = __mul__

    def wedge(self, other: GradedElement) -> GradedElement:
        if not isinstance(other, GradedElement):
            fn = _as_scalar_fn(self.chart, other)
            if fn is None:
                raise TypeError(f"cannot wedge with {type(other).__name__}")
            return self * fn
        if self.chart != other.chart:
            raise ValueError("chart mismatch")
        variance = self._compatible_variance(other)
        out: dict[int, dict[Indices, RationalFunction]] = {}
        for d1, comps1 in self.terms.items():
            for d2, comps2 in other.terms.items():
                degree = d1 + d2
                for i1, c1 in comps1.items():
                    for i2, c2 in comps2.items():
                        merged = _merge_sign(i1, i2)
                        if merged is None:
                            continue
                        sign, idx = merged
                        coeff = c1 * c2
                        if sign < 0:
                            coeff = -coeff
                        bucket = out.setdefault(degree, {})
                        acc = bucket.get(idx)
                        acc = coeff if acc is None else acc + coeff
                        if acc.is_zero:
                            bucket.pop(idx, None)
                        else:
                            bucket[idx] = acc
        result = GradedElement.__new__(GradedElement)
        result.chart = self.chart
        result.variance = variance
        result.terms = {d: comps for d, comps in out.items() if comps}
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, Polynomial, RationalFunction)):
            fn = _as_scalar_fn(self.chart, other)
            other = GradedElement.scalar(self.chart, fn, self.variance)
        if not isinstance(other, GradedElement):
            return NotImplemented
        if self.chart != other.chart or self.terms != other.terms:
            return False
        if self.variance == other.variance:
            return True
        # degree-0 elements are plain functions whichever the variance
        return not self.terms or self.degrees() == (0,)

    def __hash__(self) -> int:
        payload = frozenset(
            (d, idx, c) for d, comps in self.terms.items() for idx, c in comps.items()
        )
        return hash((self.chart, payload))

    # -- printing ----------------------------------------------------------------

    def _label(self, i: int) -> str:
        name = self.chart.coordinates[i]
        return f"d{name}" if self.variance == FORM else f"@{name}"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        pieces = []
        for d in sorted(self.terms):
            for idx in sorted(self.terms[d]):
                coeff = self.terms[d][idx]
                if d == 0:
                    pieces.append(f"({coeff})")
                else:
                    factors = "^".join(self._label(i) for i in idx)
                    pieces.append(f"({coeff})*{factors}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"GradedElement({self})"


# -- basis helpers -----------------------------------------------------------


def coordinate_differential(chart: Chart, name: str) -> GradedElement:
    """The 1-form d<name>."""
    return GradedElement.basis(chart, FORM, (chart.coordinate_index(name),))


def basis_vector(chart: Chart, name: str) -> GradedElement:
    """The coordinate vector field @<name>."""
    return GradedElement.basis(chart, MULTIVECTOR, (chart.coordinate_index(name),))


def vector_field(chart: Chart, components: Mapping[str, object]) -> GradedElement:
    """Vector field from a mapping of coordinate name to coefficient."""
    total = GradedElement.zero(chart, MULTIVECTOR)
    for name, value in components.items():
        fn = _as_scalar_fn(chart, value)
        if fn is None:
            raise TypeError(f"bad component for {name!r}")
        total = total + basis_vector(chart, name) * fn
    return total


def differential(f: RationalFunction) -> GradedElement:
    """df as a 1-form; parameters contribute nothing."""
    chart = f.chart
    total = GradedElement.zero(chart, FORM)
    for name in chart.coordinates:
        df = f.derivative(name)
        if not df.is_zero:
            total = total + coordinate_differential(chart, name) * df
    return total


def exterior_derivative(omega: GradedElement) -> GradedElement:
    """d on forms, term by term: d(c dx_I) = sum_v (dc/dx_v) dx_v ^ dx_I."""
    if omega.variance != FORM and omega.terms and omega.degrees() != (0,):
        raise ValueError("exterior derivative acts on forms")
    chart = omega.chart
    out = GradedElement.zero(chart, FORM)
    for d, comps in omega.terms.items():
        for idx, coeff in comps.items():
            for v, name in enumerate(chart.coordinates):
                dc = coeff.derivative(name)
                if dc.is_zero or v in idx:
                    continue
                sign, merged = _merge_sign((v,), idx)
                term = dc if sign > 0 else -dc
                out = out + GradedElement(chart, FORM, {d + 1: {merged: term}})
    return out


# -- contractions ---------------------------------------------------------------


def _contract_index(j: int, element: GradedElement) -> GradedElement:
    """Remove index j from each term, with the sign of its position."""
    chart = element.chart
    out: dict[int, dict[Indices, RationalFunction]] = {}
    for d, comps in element.terms.items():
        if d == 0:
            continue
        for idx, coeff in comps.items():
            try:
                pos = idx.index(j)
            except ValueError:
                continue
            reduced = idx[:pos] + idx[pos + 1 :]
            term = coeff if pos % 2 == 0 else -coeff
            bucket = out.setdefault(d - 1, {})
            acc = bucket.get(reduced)
            acc = term if acc is None else acc + term
            if acc.is_zero:
                bucket.pop(reduced, None)
            else:
                bucket[reduced] = acc
    result = GradedElement.__new__(GradedElement)
    result.chart = chart
    result.variance = element.variance
    result.terms = {d: comps for d, comps in out.items() if comps}
    return result


def insert_multivector(mv: GradedElement, omega: GradedElement) -> GradedElement:
    """Insert a multivector into a form, filling the leading argument slots.

    For a decomposable p-vector the factors occupy the form's first p slots in
    order, so inserting @x^@y into dx^dy yields 1.
    """
    if mv.variance != MULTIVECTOR and mv.terms and mv.degrees() != (0,):
        raise ValueError("first argument must be a multivector")
    if omega.variance != FORM and omega.terms and omega.degrees() != (0,):
        raise ValueError("second argument must be a form")
    if mv.chart != omega.chart:
        raise ValueError("chart mismatch")
    chart = mv.chart
    total = GradedElement.zero(chart, FORM)
    for d, comps in mv.terms.items():
        for idx, coeff in comps.items():
            current = omega
            for j in idx:
                current = _contract_index(j, current)
                if current.is_zero:
                    break
            if not current.is_zero:
                total = total + current * coeff
    return total


def insert_covector(alpha: GradedElement, mv: GradedElement) -> GradedElement:
    """Contract a 1-form into a multivector's first factor slot.

    Inserting dx into @x^@y yields @y; chaining n covectors therefore
    evaluates an n-vector on them in reverse insertion order.
    """
    if alpha.terms and alpha.degrees() != (1,):
        raise ValueError("first argument must be a 1-form")
    if mv.variance != MULTIVECTOR and mv.terms and mv.degrees() != (0,):
        raise ValueError("second argument must be a multivector")
    if alpha.chart != mv.chart:
        raise ValueError("chart mismatch")
    chart = mv.chart
    total = GradedElement.zero(chart, MULTIVECTOR)
    for (j,), a_j in alpha.terms.get(1, {}).items():
        total = total + _contract_index(j, mv) * a_j
    return total


def pair(mv: GradedElement, omega: GradedElement) -> RationalFunction:
    """Full contraction of matching degrees: sum of P_I * w_I over index tuples."""
    if mv.chart != omega.chart:
        raise ValueError("chart mismatch")
    total = RationalFunction.zero(mv.chart)
    for d, comps in mv.terms.items():
        other = omega.terms.get(d)
        if not other:
            continue
        for idx, coeff in comps.items():
            oc = other.get(idx)
            if oc is not None:
                total = total + coeff * oc
    return total


# -- vector-field calculus --------------------------------------------------------


def vf_apply(x: GradedElement, f: RationalFunction) -> RationalFunction:
    """Directional derivative of a function along a vector field."""
    if x.terms and x.degrees() != (1,):
        raise ValueError("expected a vector field")
    chart = x.chart
    total = RationalFunction.zero(chart)
    for (j,), comp in x.terms.get(1, {}).items():
        total = total + comp * f.derivative(chart.coordinates[j])
    return total


def vf_commutator(x: GradedElement, y: GradedElement) -> GradedElement:
    """Commutator of two vector fields."""
    chart = x.chart
    comps: dict[str, RationalFunction] = {}
    for (k,), yk in y.terms.get(1, {}).items():
        comps[chart.coordinates[k]] = vf_apply(x, yk)
    for (k,), xk in x.terms.get(1, {}).items():
        name = chart.coordinates[k]
        comps[name] = comps.get(name, RationalFunction.zero(chart)) - vf_apply(y, xk)
    return vector_field(chart, comps)


def lie_derivative(x: GradedElement, target: GradedElement) -> GradedElement:
    """Lie derivative of a form or multivector along a vector field.

    Forms go through the homotopy formula; multivectors componentwise, where
    the component at an index tuple I is X(P_I) minus one contraction of P
    against each slot's differential-of-component substitution.  The result's
    support can be larger than the argument's.
    """
    if x.terms and x.degrees() != (1,):
        raise ValueError("expected a vector field")
    chart = x.chart
    if x.chart != target.chart:
        raise ValueError("chart mismatch")
    if target.variance == FORM and target.terms and target.degrees() != (0,):
        dw = exterior_derivative(target)
        return insert_multivector(x, dw) + exterior_derivative(insert_multivector(x, target))
    # multivector branch, degree by degree
    basis_differentials = [
        GradedElement.basis(chart, FORM, (i,)) for i in range(chart.dim)
    ]
    component_differentials = {
        j: differential(comp) for (j,), comp in x.terms.get(1, {}).items()
    }
    out = GradedElement.zero(chart, MULTIVECTOR)
    for n, comps in target.terms.items():
        if n == 0:
            f = comps[()]
            out = out + GradedElement.scalar(chart, vf_apply(x, f), MULTIVECTOR)
            continue
        part = target.homogeneous_part(n)
        for idx in itertools.combinations(range(chart.dim), n):
            coeff = vf_apply(x, part.component(idx))
            for a in range(n):
                dcomp = component_differentials.get(idx[a])
                if dcomp is None or dcomp.is_zero:
                    continue
                probe = GradedElement.scalar(chart, 1, FORM)
                for b in range(n):
                    probe = probe.wedge(dcomp if b == a else basis_differentials[idx[b]])
                coeff = coeff - pair(part, probe)
            if not coeff.is_zero:
                out = out + GradedElement(chart, MULTIVECTOR, {n: {idx: coeff}})
    return out
