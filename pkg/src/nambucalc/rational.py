"""Exact scalar arithmetic: charts, multivariate polynomials, rational functions.

Coefficients are exact rationals (`fractions.Fraction`).  A rational function
is kept in canonical form: numerator and denominator share no polynomial
factor, the zero function is 0/1, and the denominator's leading coefficient
under graded-lexicographic order is +1.  Equality of canonical forms therefore
decides equality of the functions themselves.
"""

from __future__ import annotations

import math
import random as _random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

Exponents = tuple[int, ...]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _as_fraction(value: int | Fraction) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class Chart:
    """An ordered coordinate chart plus symbolic parameters.

    Coordinates are the geometric variables; parameters behave as constants
    (their partial derivatives vanish and differentials/vector-field literals
    exist only for coordinates).
    """

    coordinates: tuple[str, ...]
    parameters: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        object.__setattr__(self, "parameters", tuple(self.parameters))
        names = self.coordinates + self.parameters
        if not self.coordinates:
            raise ValueError("a chart needs at least one coordinate")
        for name in names:
            if not _NAME_RE.match(name):
                raise ValueError(f"invalid variable name: {name!r}")
        if len(set(names)) != len(names):
            raise ValueError("coordinate and parameter names must be distinct")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.coordinates + self.parameters

    def index(self, name: str) -> int:
        try:
            return self._index[name]  # type: ignore[attr-defined]
        except KeyError:
            raise ValueError(f"unknown variable: {name!r}") from None

    def coordinate_index(self, name: str) -> int:
        i = self.index(name)
        if i >= self.dim:
            raise ValueError(f"{name!r} is a parameter, not a coordinate")
        return i


def _grlex_key(exps: Exponents) -> tuple[int, Exponents]:
    return (sum(exps), exps)


class Polynomial:
    """Sparse multivariate polynomial over Q, tied to a chart."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping[Exponents, Fraction] | None = None):
        cleaned: dict[Exponents, Fraction] = {}
        arity = len(chart.variables)
        for exps, coeff in (terms or {}).items():
            coeff = _as_fraction(coeff)
            if coeff == 0:
                continue
            exps = tuple(exps)
            if len(exps) != arity or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for chart of arity {arity}")
            cleaned[exps] = coeff
        self.chart = chart
        self.terms = cleaned

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, chart: Chart) -> Polynomial:
        return cls(chart, {})

    @classmethod
    def const(cls, chart: Chart, value: int | Fraction) -> Polynomial:
        value = _as_fraction(value)
        if value == 0:
            return cls.zero(chart)
        return cls(chart, {(0,) * len(chart.variables): value})

    @classmethod
    def variable(cls, chart: Chart, name: str) -> Polynomial:
        i = chart.index(name)
        exps = [0] * len(chart.variables)
        exps[i] = 1
        return cls(chart, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, chart: Chart, exps: Exponents, coeff: int | Fraction = 1) -> Polynomial:
        return cls(chart, {tuple(exps): _as_fraction(coeff)})

    # -- predicates ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        if self.is_zero:
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, var_index: int) -> int:
        if self.is_zero:
            return 0
        return max(e[var_index] for e in self.terms)

    def used_variables(self) -> set[int]:
        used: set[int] = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used.add(i)
        return used

    def leading(self) -> tuple[Exponents, Fraction]:
        """Leading term under graded-lexicographic order."""
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=_grlex_key)
        return exps, self.terms[exps]

    # -- arithmetic ----------------------------------------------------------

    def _check_chart(self, other: Polynomial) -> None:
        if self.chart != other.chart:
            raise ValueError("chart mismatch")

    def __add__(self, other: Polynomial | int | Fraction) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.chart, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_chart(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            acc = out.get(exps, Fraction(0)) + coeff
            if acc == 0:
                out.pop(exps, None)
            else:
                out[exps] = acc
        result = Polynomial.__new__(Polynomial)
        result.chart = self.chart
        result.terms = out
        return result

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        result = Polynomial.__new__(Polynomial)
        result.chart = self.chart
        result.terms = {e: -c for e, c in self.terms.items()}
        return result

    def __sub__(self, other: Polynomial | int | Fraction) -> Polynomial:
        return self + (-other if isinstance(other, Polynomial) else -_as_fraction(other))

    def __rsub__(self, other: int | Fraction) -> Polynomial:
        return (-self) + other

    def __mul__(self, other: Polynomial | int | Fraction) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            other = _as_fraction(other)
            if other == 0:
                return Polynomial.zero(self.chart)
            result = Polynomial.__new__(Polynomial)
            result.chart = self.chart
            result.terms = {e: c * other for e, c in self.terms.items()}
            return result
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_chart(other)
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                acc = out.get(exps, Fraction(0)) + c1 * c2
                if acc == 0:
                    out.pop(exps, None)
                else:
                    out[exps] = acc
        result = Polynomial.__new__(Polynomial)
        result.chart = self.chart
        result.terms = out
        return result

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> Polynomial:
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers take non-negative integer exponents")
        result = Polynomial.const(self.chart, 1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.chart, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.chart == other.chart and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.chart, frozenset(self.terms.items())))

    # -- calculus and evaluation ---------------------------------------------

    def derivative(self, name: str) -> Polynomial:
        """Partial derivative; parameters differentiate like any variable here.

        Rational-function callers restrict to coordinates as needed; for a
        parameter the exponent is simply absent so the result is zero anyway
        whenever the polynomial does not involve it.
        """
        i = self.chart.index(name)
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            new = list(exps)
            new[i] = e - 1
            out[tuple(new)] = coeff * e
        result = Polynomial.__new__(Polynomial)
        result.chart = self.chart
        result.terms = out
        return result

    def evaluate(self, point: Mapping[str, int | Fraction]) -> Fraction:
        values = [_as_fraction(point[name]) for name in self.chart.variables]
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            term = coeff
            for v, e in zip(values, exps):
                if e:
                    term *= v**e
            total += term
        return total

    def substitute(self, bindings: Mapping[str, int | Fraction]) -> Polynomial:
        """Bind a subset of variables to exact rationals."""
        idx = {self.chart.index(name): _as_fraction(v) for name, v in bindings.items()}
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self.terms.items():
            c = coeff
            new = list(exps)
            for i, v in idx.items():
                e = exps[i]
                if e:
                    c *= v**e
                new[i] = 0
            key = tuple(new)
            acc = out.get(key, Fraction(0)) + c
            if acc == 0:
                out.pop(key, None)
            else:
                out[key] = acc
        result = Polynomial.__new__(Polynomial)
        result.chart = self.chart
        result.terms = out
        return result

    # -- printing ------------------------------------------------------------

    def _monomial_str(self, exps: Exponents) -> str:
        parts = []
        for name, e in zip(self.chart.variables, exps):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        pieces: list[str] = []
        for exps in sorted(self.terms, key=_grlex_key, reverse=True):
            coeff = self.terms[exps]
            mono = self._monomial_str(exps)
            mag = abs(coeff)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            if not pieces:
                pieces.append(body if coeff > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


# ---------------------------------------------------------------------------
# Polynomial GCD: monomial/content fast paths plus a primitive pseudo-remainder
# sequence in a chosen main variable.  Self-contained on purpose.
# ---------------------------------------------------------------------------


def _make_primitive(p: Polynomial) -> Polynomial:
    """Scale to coprime integer coefficients with positive grlex-leading sign."""
    if p.is_zero:
        return p
    nums = [c.numerator for c in p.terms.values()]
    dens = [c.denominator for c in p.terms.values()]
    scale = Fraction(reduce(math.lcm, dens, 1), reduce(math.gcd, nums, 0))
    out = p * abs(scale)
    if out.leading()[1] < 0:
        out = -out
    return out


def _monomial_floor(p: Polynomial) -> Exponents:
    its = iter(p.terms)
    floor = list(next(its))
    for exps in its:
        for i, e in enumerate(exps):
            if e < floor[i]:
                floor[i] = e
    return tuple(floor)


def _shift_down(p: Polynomial, shift: Exponents) -> Polynomial:
    if not any(shift):
        return p
    result = Polynomial.__new__(Polynomial)
    result.chart = p.chart
    result.terms = {
        tuple(a - b for a, b in zip(exps, shift)): c for exps, c in p.terms.items()
    }
    return result


def divexact(f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact polynomial division; raises if g does not divide f."""
    f._check_chart(g)
    if g.is_zero:
        raise ZeroDivisionError("division by zero")
    if f.is_zero:
        return f
    if g.is_constant:
        return f * (1 / g.constant_value())
    g_exps, g_lc = g.leading()
    remainder = dict(f.terms)
    quotient: dict[Exponents, Fraction] = {}
    while remainder:
        r_exps = max(remainder, key=_grlex_key)
        r_lc = remainder[r_exps]
        diff = tuple(a - b for a, b in zip(r_exps, g_exps))
        if any(d < 0 for d in diff):
            raise ValueError("inexact polynomial division")
        c = r_lc / g_lc
        quotient[diff] = quotient.get(diff, Fraction(0)) + c
        for exps, coeff in g.terms.items():
            key = tuple(a + b for a, b in zip(diff, exps))
            acc = remainder.get(key, Fraction(0)) - c * coeff
            if acc == 0:
                remainder.pop(key, None)
            else:
                remainder[key] = acc
    result = Polynomial.__new__(Polynomial)
    result.chart = f.chart
    result.terms = {e: c for e, c in quotient.items() if c != 0}
    return result


def _to_univar(p: Polynomial, v: int) -> dict[int, Polynomial]:
    """View p as a univariate polynomial in variable v with polynomial coefficients."""
    coeffs: dict[int, dict[Exponents, Fraction]] = {}
    for exps, c in p.terms.items():
        d = exps[v]
        rest = list(exps)
        rest[v] = 0
        coeffs.setdefault(d, {})[tuple(rest)] = c
    out: dict[int, Polynomial] = {}
    for d, terms in coeffs.items():
        poly = Polynomial.__new__(Polynomial)
        poly.chart = p.chart
        poly.terms = terms
        out[d] = poly
    return out


def _from_univar(u: Mapping[int, Polynomial], chart: Chart, v: int) -> Polynomial:
    terms: dict[Exponents, Fraction] = {}
    for d, coeff in u.items():
        for exps, c in coeff.terms.items():
            new = list(exps)
            new[v] += d
            terms[tuple(new)] = c
    result = Polynomial.__new__(Polynomial)
    result.chart = chart
    result.terms = terms
    return result


def _univar_content(u: Mapping[int, Polynomial]) -> Polynomial:
    coeffs = sorted(u.values(), key=lambda p: len(p.terms))
    content = coeffs[0]
    for c in coeffs[1:]:
        if content.is_constant:
            break
        content = poly_gcd(content, c)
    if content.is_constant:
        content = Polynomial.const(content.chart, 1)
    return content


def _univar_primitive(u: dict[int, Polynomial], content: Polynomial) -> dict[int, Polynomial]:
    if content.is_constant and content.constant_value() == 1:
        return u
    return {d: divexact(c, content) for d, c in u.items()}


def _primitive_in(p: Polynomial, v: int) -> Polynomial:
    """Divide out the content of p viewed as univariate in variable v."""
    u = _to_univar(p, v)
    c = _univar_content(u)
    return _from_univar(_univar_primitive(u, c), p.chart, v)


# The pseudo-remainder sequence runs over plain integer coefficients: Fraction
# objects normalize on every operation, which dominates the runtime for dense
# remainders.  An IntPoly is a dict from exponent tuple to int.

IntPoly = dict[Exponents, int]


def _imul(p: IntPoly, q: IntPoly) -> IntPoly:
    out: IntPoly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            k = tuple(a + b for a, b in zip(e1, e2))
            acc = out.get(k, 0) + c1 * c2
            if acc:
                out[k] = acc
            else:
                out.pop(k, None)
    return out


def _isub(p: IntPoly, q: IntPoly) -> IntPoly:
    out = dict(p)
    for e, c in q.items():
        acc = out.get(e, 0) - c
        if acc:
            out[e] = acc
        else:
            out.pop(e, None)
    return out


def _ipow(p: IntPoly, n: int, arity: int) -> IntPoly:
    result: IntPoly = {(0,) * arity: 1}
    base = p
    while n:
        if n & 1:
            result = _imul(result, base)
        n >>= 1
        if n:
            base = _imul(base, base)
    return result


def _idivexact(p: IntPoly, q: IntPoly) -> IntPoly:
    """Exact long division over the integers; raises if not exact."""
    q_exps = max(q, key=_grlex_key)
    q_lc = q[q_exps]
    rem = dict(p)
    quo: IntPoly = {}
    while rem:
        r_exps = max(rem, key=_grlex_key)
        r_lc = rem[r_exps]
        diff = tuple(a - b for a, b in zip(r_exps, q_exps))
        if any(d < 0 for d in diff) or r_lc % q_lc:
            raise ValueError("inexact integer polynomial division")
        c = r_lc // q_lc
        quo[diff] = quo.get(diff, 0) + c
        for exps, coeff in q.items():
            key = tuple(a + b for a, b in zip(diff, exps))
            acc = rem.get(key, 0) - c * coeff
            if acc:
                rem[key] = acc
            else:
                rem.pop(key, None)
    return quo


def _ipseudo_rem(a: dict[int, IntPoly], b: dict[int, IntPoly]) -> dict[int, IntPoly]:
    """Strict pseudo-remainder: lc(b)^(deg a - deg b + 1) * a reduced mod b."""
    db = max(b)
    lc_b = b[db]
    r = dict(a)
    scalings = max(a) - db + 1
    while r:
        dr = max(r)
        if dr < db:
            break
        scalings -= 1
        lc_r = r[dr]
        new: dict[int, IntPoly] = {}
        for d, c in r.items():
            if d != dr:
                new[d] = _imul(c, lc_b)
        for d, c in b.items():
            if d == db:
                continue
            key = d + dr - db
            cur = new.get(key)
            prod = _imul(c, lc_r)
            acc = _isub(cur, prod) if cur is not None else {e: -x for e, x in prod.items()}
            if acc:
                new[key] = acc
            else:
                new.pop(key, None)
        r = new
    # pad skipped degrees so the total scaling matches the strict definition
    if r and scalings > 0:
        factor = _ipow(lc_b, scalings, len(next(iter(lc_b))))
        r = {d: _imul(c, factor) for d, c in r.items()}
    return r


def _int_view(u: dict[int, Polynomial]) -> dict[int, IntPoly]:
    """Clear denominators and the common integer factor across a univariate view."""
    nums = 0
    dens = 1
    for p in u.values():
        for c in p.terms.values():
            nums = math.gcd(nums, c.numerator)
            dens = math.lcm(dens, c.denominator)
    scale = Fraction(dens, nums)
    return {d: {e: int(c * scale) for e, c in p.terms.items()} for d, p in u.items()}


def _iview_to_poly(u: dict[int, IntPoly], chart: Chart, v: int) -> Polynomial:
    terms: dict[Exponents, Fraction] = {}
    for d, p in u.items():
        for exps, c in p.items():
            new = list(exps)
            new[v] += d
            terms[tuple(new)] = Fraction(c)
    result = Polynomial.__new__(Polynomial)
    result.chart = chart
    result.terms = terms
    return result


# Modular pretest: evaluate everything but the main variable at a random point
# mod a large prime.  A degree-zero image gcd proves the true gcd has degree
# zero in that variable (a positive image degree proves nothing and we fall
# back to the pseudo-remainder sequence).

_P61 = (1 << 61) - 1


def _eval_mod(p: Polynomial, v: int, point: list[int]) -> list[int] | None:
    arity = len(point)
    maxes = [0] * arity
    for exps in p.terms:
        for i, e in enumerate(exps):
            if e > maxes[i]:
                maxes[i] = e
    pows: list[list[int]] = []
    for i in range(arity):
        row = [1] * (maxes[i] + 1)
        for e in range(1, maxes[i] + 1):
            row[e] = row[e - 1] * point[i] % _P61
        pows.append(row)
    out = [0] * (maxes[v] + 1)
    for exps, c in p.terms.items():
        den = c.denominator % _P61
        if den == 0:
            return None
        val = c.numerator % _P61 * pow(den, _P61 - 2, _P61) % _P61
        for i, e in enumerate(exps):
            if e and i != v:
                val = val * pows[i][e] % _P61
        out[exps[v]] = (out[exps[v]] + val) % _P61
    return out


def _mod_gcd_degree(a: list[int], b: list[int]) -> int:
    def trim(poly: list[int]) -> None:
        while poly and poly[-1] == 0:
            poly.pop()

    trim(a)
    trim(b)
    while b:
        inv = pow(b[-1], _P61 - 2, _P61)
        db = len(b) - 1
        while len(a) - 1 >= db:
            c = a[-1] * inv % _P61
            off = len(a) - 1 - db
            for i, bc in enumerate(b):
                a[off + i] = (a[off + i] - c * bc) % _P61
            trim(a)
            if not a:
                break
        a, b = b, a
    return len(a) - 1


def _surely_coprime_in(f: Polynomial, g: Polynomial, v: int) -> bool:
    rng = _random.Random(0x5EED)
    df = f.degree_in(v)
    dg = g.degree_in(v)
    for _ in range(3):
        point = [rng.randrange(1, _P61) for _ in range(len(f.chart.variables))]
        fa = _eval_mod(f, v, point)
        ga = _eval_mod(g, v, point)
        if fa is None or ga is None:
            continue
        if not fa[df] or not ga[dg]:
            # leading coefficient vanished at this point; try another
            continue
        return _mod_gcd_degree(fa, ga) == 0
    return False


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """GCD of two polynomials, primitive with positive leading coefficient."""
    f._check_chart(g)
    if f.is_zero:
        return _make_primitive(g)
    if g.is_zero:
        return _make_primitive(f)
    mf = _monomial_floor(f)
    mg = _monomial_floor(g)
    common = tuple(min(a, b) for a, b in zip(mf, mg))
    f1 = _shift_down(f, mf)
    g1 = _shift_down(g, mg)
    base = Polynomial.monomial(f.chart, common)
    if f1.is_constant or g1.is_constant:
        return base
    shared = f1.used_variables() & g1.used_variables()
    if not shared:
        return base
    v = min(shared, key=lambda i: (f1.degree_in(i) + g1.degree_in(i), i))
    uf = _to_univar(f1, v)
    ug = _to_univar(g1, v)
    if _surely_coprime_in(f1, g1, v):
        # the gcd cannot involve v, so it divides both contents
        return _make_primitive(base * poly_gcd(_univar_content(uf), _univar_content(ug)))
    cf = _univar_content(uf)
    cg = _univar_content(ug)
    content_gcd = poly_gcd(cf, cg)
    a = _int_view(_univar_primitive(uf, cf))
    b = _int_view(_univar_primitive(ug, cg))
    if max(a) < max(b):
        a, b = b, a
    # subresultant sequence: exact divisions by g*h^delta bound the growth
    arity = len(f.chart.variables)
    unit: IntPoly = {(0,) * arity: 1}
    gg = unit
    hh = unit
    while True:
        if max(b) == 0:
            pp = Polynomial.const(f.chart, 1)
            break
        delta = max(a) - max(b)
        r = _ipseudo_rem(a, b)
        if not r:
            pp = _primitive_in(_iview_to_poly(b, f.chart, v), v)
            break
        divisor = _imul(gg, _ipow(hh, delta, arity))
        a, b = b, {d: _idivexact(c, divisor) for d, c in r.items()}
        gg = a[max(a)]
        if delta == 1:
            hh = gg
        elif delta > 1:
            hh = _idivexact(_ipow(gg, delta, arity), _ipow(hh, delta - 1, arity))
    return _make_primitive(base * content_gcd * pp)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Quotient of polynomials in canonical form."""

    __slots__ = ("num", "den")

    def __init__(
        self,
        num: Polynomial,
        den: Polynomial | None = None,
        *,
        _reduced: bool = False,
    ):
        if den is None:
            den = Polynomial.const(num.chart, 1)
        num._check_chart(den)
        if den.is_zero:
            raise ZeroDivisionError("division by zero")
        if num.is_zero:
            den = Polynomial.const(num.chart, 1)
        elif not _reduced:
            g = poly_gcd(num, den)
            if not (g.is_constant and g.constant_value() == 1):
                num = divexact(num, g)
                den = divexact(den, g)
        if not num.is_zero:
            lc = den.leading()[1]
            if lc != 1:
                num = num * (1 / lc)
                den = den * (1 / lc)
        self.num = num
        self.den = den

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, chart: Chart) -> RationalFunction:
        return cls(Polynomial.zero(chart))

    @classmethod
    def one(cls, chart: Chart) -> RationalFunction:
        return cls(Polynomial.const(chart, 1))

    @classmethod
    def const(cls, chart: Chart, value: int | Fraction) -> RationalFunction:
        return cls(Polynomial.const(chart, value))

    @classmethod
    def variable(cls, chart: Chart, name: str) -> RationalFunction:
        return cls(Polynomial.variable(chart, name))

    # -- predicates -------------------------------------------------------------

    @property
    def chart(self) -> Chart:
        return self.num.chart

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def used_parameters(self) -> set[str]:
        names = self.chart.variables
        used = self.num.used_variables() | self.den.used_variables()
        return {names[i] for i in used if i >= self.chart.dim}

    # -- arithmetic ---------------------------------------------------------------

    @staticmethod
    def _coerce(chart: Chart, value) -> RationalFunction | None:
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, Polynomial):
            return RationalFunction(value)
        if isinstance(value, (int, Fraction)):
            return RationalFunction.const(chart, value)
        return None

    def __add__(self, other) -> RationalFunction:
        other = self._coerce(self.chart, other)
        if other is None:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        g = poly_gcd(self.den, other.den)
        if g.is_constant:
            num = self.num * other.den + other.num * self.den
            return RationalFunction(num, self.den * other.den)
        da = divexact(self.den, g)
        db = divexact(other.den, g)
        num = self.num * db + other.num * da
        return RationalFunction(num, da * other.den)

    __radd__ = __add__

    def __neg__(self) -> RationalFunction:
        out = RationalFunction.__new__(RationalFunction)
        out.num = -self.num
        out.den = self.den
        return out

    def __sub__(self, other) -> RationalFunction:
        other = self._coerce(self.chart, other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> RationalFunction:
        return (-self) + other

    def __mul__(self, other) -> RationalFunction:
        other = self._coerce(self.chart, other)
        if other is None:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return RationalFunction.zero(self.chart)
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1 = self.num if g1.is_constant else divexact(self.num, g1)
        d2 = other.den if g1.is_constant else divexact(other.den, g1)
        n2 = other.num if g2.is_constant else divexact(other.num, g2)
        d1 = self.den if g2.is_constant else divexact(self.den, g2)
        return RationalFunction(n1 * n2, d1 * d2, _reduced=True)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RationalFunction:
        other = self._coerce(self.chart, other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by zero")
        # other is canonical, so num and den are already coprime
        return self * RationalFunction(other.den, other.num, _reduced=True)

    def __rtruediv__(self, other) -> RationalFunction:
        other = self._coerce(self.chart, other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int) -> RationalFunction:
        if not isinstance(exponent, int):
            raise ValueError("rational-function powers take integer exponents")
        if exponent < 0:
            if self.is_zero:
                raise ZeroDivisionError("division by zero")
            return RationalFunction(self.den ** (-exponent), self.num ** (-exponent))
        return RationalFunction(self.num**exponent, self.den**exponent, _reduced=True)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, Polynomial)):
            other = self._coerce(self.chart, other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    # -- calculus and evaluation ----------------------------------------------

    def derivative(self, name: str) -> RationalFunction:
        """Partial derivative; parameters are constants so they derive to zero."""
        i = self.chart.index(name)
        if i >= self.chart.dim:
            return RationalFunction.zero(self.chart)
        dn = self.num.derivative(name)
        dd = self.den.derivative(name)
        if dd.is_zero:
            return RationalFunction(dn, self.den)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: Mapping[str, int | Fraction]) -> Fraction:
        den = self.den.evaluate(point)
        if den == 0:
            raise ZeroDivisionError("evaluation at pole")
        return self.num.evaluate(point) / den

    def substitute(self, bindings: Mapping[str, int | Fraction]) -> RationalFunction:
        den = self.den.substitute(bindings)
        if den.is_zero:
            raise ZeroDivisionError("evaluation at pole")
        return RationalFunction(self.num.substitute(bindings), den)

    def __str__(self) -> str:
        if self.den == Polynomial.const(self.chart, 1):
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


def normalize(num: Polynomial, den: Polynomial) -> RationalFunction:
    """Canonical form of num/den; rejects a zero denominator."""
    return RationalFunction(num, den)
