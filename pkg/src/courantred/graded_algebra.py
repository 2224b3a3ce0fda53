"""Graded-commutative polynomial algebra over a single global chart.

Generators come in three families: ``x`` (degree 0, polynomial), ``e``
(degree 1, Grassmann) and ``p`` (degree 2, polynomial). Every element is
kept in a unique normal form: a map from monomials to nonzero
:class:`fractions.Fraction` coefficients, with the odd generators of each
monomial listed in strictly increasing order.

Odd partial derivatives act from the left unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Chart",
    "Gen",
    "GradedPoly",
    "ChartMismatch",
    "DegreeError",
    "normalize",
    "multiply",
    "degree",
    "partial_derivative",
    "right_partial_derivative",
    "substitute",
]

KINDS = ("x", "e", "p")
KIND_DEGREE = {"x": 0, "e": 1, "p": 2}


class ChartMismatch(ValueError):
    pass


class DegreeError(ValueError):
    pass


Gen = tuple  # (kind, index), index 0-based


@dataclass(frozen=True)
class Chart:
    """Counts and display names of the generators of a canonical chart."""

    n_x: int
    n_e: int
    n_p: int
    x_names: tuple = ()
    e_names: tuple = ()
    p_names: tuple = ()

    def __post_init__(self):
        for n in (self.n_x, self.n_e, self.n_p):
            if n < 0:
                raise ValueError("generator counts must be non-negative")
        for kind, n in zip(KINDS, (self.n_x, self.n_e, self.n_p)):
            attr = f"{kind}_names"
            names = tuple(getattr(self, attr))
            if not names:
                names = tuple(f"{kind}{i + 1}" for i in range(n))
            if len(names) != n:
                raise ValueError(f"expected {n} names for {kind}-generators")
            object.__setattr__(self, attr, names)
        allnames = self.x_names + self.e_names + self.p_names
        if len(set(allnames)) != len(allnames):
            raise ValueError("generator names must be unique")
        lookup = {}
        for kind in KINDS:
            for i, name in enumerate(getattr(self, f"{kind}_names")):
                lookup[name] = (kind, i)
        object.__setattr__(self, "_lookup", lookup)

    def names(self, kind: str) -> tuple:
        return getattr(self, f"{kind}_names")

    def count(self, kind: str) -> int:
        return {"x": self.n_x, "e": self.n_e, "p": self.n_p}[kind]

    def gen(self, name: str) -> Gen:
        try:
            return self._lookup[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def has(self, name: str) -> bool:
        return name in self._lookup

    def name_of(self, g: Gen) -> str:
        kind, i = g
        return self.names(kind)[i]

    def generators(self) -> list:
        return [(k, i) for k in KINDS for i in range(self.count(k))]

    def check_gen(self, g: Gen) -> None:
        kind, i = g
        if kind not in KIND_DEGREE or not 0 <= i < self.count(kind):
            raise KeyError(f"unknown generator {g!r}")

    def dims(self) -> tuple:
        return (self.n_x, self.n_e, self.n_p)


# A monomial is (x_exponents, e_mask, p_exponents): two tuples of ints and a
# strictly increasing tuple of e indices.


def _mono_degree(m) -> int:
    return len(m[1]) + 2 * sum(m[2])


def _merge_sign(a: tuple, b: tuple):
    """Sign and merged mask of the Grassmann product a*b (None if zero)."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    if set(a) & set(b):
        return 0, None
    inversions = 0
    for i in a:
        for j in b:
            if i > j:
                inversions += 1
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


def _mono_mul(m1, m2):
    sign, mask = _merge_sign(m1[1], m2[1])
    if not sign:
        return 0, None
    xs = tuple(a + b for a, b in zip(m1[0], m2[0]))
    ps = tuple(a + b for a, b in zip(m1[2], m2[2]))
    return sign, (xs, mask, ps)


class GradedPoly:
    """An immutable element of the coordinate algebra in normal form."""

    __slots__ = ("chart", "_terms", "_hash")

    def __init__(self, chart: Chart, terms: Mapping | None = None):
        self.chart = chart
        clean = {}
        if terms:
            for m, c in terms.items():
                if type(c) is not Fraction:
                    c = Fraction(c)
                if c:
                    clean[m] = c
        self._terms = clean
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart) -> "GradedPoly":
        return cls(chart)

    @classmethod
    def const(cls, chart: Chart, c) -> "GradedPoly":
        return cls(chart, {_unit(chart): Fraction(c)})

    @classmethod
    def generator(cls, chart: Chart, g) -> "GradedPoly":
        if isinstance(g, str):
            g = chart.gen(g)
        chart.check_gen(g)
        kind, i = g
        xs = [0] * chart.n_x
        ps = [0] * chart.n_p
        mask = ()
        if kind == "x":
            xs[i] = 1
        elif kind == "p":
            ps[i] = 1
        else:
            mask = (i,)
        return cls(chart, {(tuple(xs), mask, tuple(ps)): Fraction(1)})

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GradedPoly.const(self.chart, other)
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self.chart == other.chart and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.chart, frozenset(self._terms.items())))
        return self._hash

    def degree(self):
        return degree(self)

    def degrees(self) -> set:
        return {_mono_degree(m) for m in self._terms}

    def constant_term(self) -> Fraction:
        return self._terms.get(_unit(self.chart), Fraction(0))

    def homogeneous_part(self, d: int) -> "GradedPoly":
        return GradedPoly(self.chart, {m: c for m, c in self._terms.items() if _mono_degree(m) == d})

    def generators_used(self) -> set:
        used = set()
        for xs, mask, ps in self._terms:
            used.update(("x", i) for i, a in enumerate(xs) if a)
            used.update(("e", i) for i in mask)
            used.update(("p", i) for i, a in enumerate(ps) if a)
        return used

    def depends_on(self, g: Gen) -> bool:
        return g in self.generators_used()

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            if other.chart != self.chart:
                raise ChartMismatch("operands live on different charts")
            return other
        if isinstance(other, (int, Fraction)):
            return GradedPoly.const(self.chart, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return GradedPoly(self.chart, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly(self.chart, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return GradedPoly(self.chart, {m: c * v for m, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        out = GradedPoly.const(self.chart, 1)
        for _ in range(n):
            out = out * self
        return out

    # display ------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda mc: _sort_key(mc[0]))

    def to_str(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = _mono_factors(self.chart, m)
            mag = abs(c)
            if factors and mag == 1:
                body = "*".join(factors)
            elif factors:
                body = f"{_frac_str(mag)}*" + "*".join(factors)
            else:
                body = _frac_str(mag)
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for s, b in parts[1:]:
            out += f" {s} {b}"
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"GradedPoly({self.to_str()!r})"


def _unit(chart: Chart):
    return ((0,) * chart.n_x, (), (0,) * chart.n_p)


def _sort_key(m):
    return (_mono_degree(m), len(m[1]), tuple(-a for a in m[0]), m[1], tuple(-a for a in m[2]))


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _mono_factors(chart: Chart, m) -> list:
    xs, mask, ps = m
    out = []
    for i, a in enumerate(xs):
        if a:
            out.append(chart.x_names[i] + (f"^{a}" if a > 1 else ""))
    out.extend(chart.e_names[i] for i in mask)
    for i, a in enumerate(ps):
        if a:
            out.append(chart.p_names[i] + (f"^{a}" if a > 1 else ""))
    return out


def normalize(raw_terms: Iterable, chart: Chart) -> GradedPoly:
    """Normal form of a list of ``(generator sequence, coefficient)`` pairs.

    Generators may be given as names or ``(kind, index)`` pairs. Odd
    generators are sorted with the Koszul sign; repeated odd generators
    annihilate the term.
    """
    out: dict = {}
    for gens, coeff in raw_terms:
        xs = [0] * chart.n_x
        ps = [0] * chart.n_p
        odd = []
        for g in gens:
            if isinstance(g, str):
                g = chart.gen(g)
            chart.check_gen(g)
            kind, i = g
            if kind == "x":
                xs[i] += 1
            elif kind == "p":
                ps[i] += 1
            else:
                odd.append(i)
        if len(set(odd)) != len(odd):
            continue
        inversions = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a] > odd[b])
        sign = -1 if inversions % 2 else 1
        m = (tuple(xs), tuple(sorted(odd)), tuple(ps))
        out[m] = out.get(m, 0) + sign * Fraction(coeff)
    return GradedPoly(chart, out)


def multiply(f: GradedPoly, g: GradedPoly) -> GradedPoly:
    if f.chart != g.chart:
        raise ChartMismatch("operands live on different charts")
    out: dict = {}
    for m1, c1 in f._terms.items():
        for m2, c2 in g._terms.items():
            sign, m = _mono_mul(m1, m2)
            if sign:
                out[m] = out.get(m, 0) + sign * c1 * c2
    return GradedPoly(f.chart, out)


def degree(f: GradedPoly):
    """Common degree of all monomials; 0 for the zero element, None if mixed."""
    degs = f.degrees()
    if not degs:
        return 0
    if len(degs) == 1:
        return next(iter(degs))
    return None


def partial_derivative(f: GradedPoly, g, side: str = "left") -> GradedPoly:
    """Partial derivative with respect to one generator.

    For odd generators ``side`` selects the left or right derivative; the two
    differ by the sign ``(-1)^(|f|+1)`` on homogeneous ``f``.
    """
    chart = f.chart
    if isinstance(g, str):
        g = chart.gen(g)
    chart.check_gen(g)
    kind, k = g
    out: dict = {}
    for (xs, mask, ps), c in f._terms.items():
        if kind == "x":
            a = xs[k]
            if not a:
                continue
            nxs = list(xs)
            nxs[k] -= 1
            m = (tuple(nxs), mask, ps)
            coeff = c * a
        elif kind == "p":
            a = ps[k]
            if not a:
                continue
            nps = list(ps)
            nps[k] -= 1
            m = (xs, mask, tuple(nps))
            coeff = c * a
        else:
            if k not in mask:
                continue
            pos = mask.index(k)
            steps = pos if side == "left" else len(mask) - 1 - pos
            coeff = -c if steps % 2 else c
            m = (xs, mask[:pos] + mask[pos + 1:], ps)
        out[m] = out.get(m, 0) + coeff
    return GradedPoly(chart, out)


def right_partial_derivative(f: GradedPoly, g) -> GradedPoly:
    return partial_derivative(f, g, side="right")


def substitute(f: GradedPoly, assignments: Mapping, target: Chart | None = None) -> GradedPoly:
    """Simultaneous substitution of generators, followed by normalization.

    ``assignments`` maps generators (names or ``(kind, index)``) to
    GradedPolys of the generator's degree, or to rationals for ``x``
    generators. Unassigned generators are kept; when ``target`` is a
    different chart every surviving generator must be assigned or carry a
    name that exists in ``target``.
    """
    chart = f.chart
    target = target or chart
    table: dict = {}
    for g, val in assignments.items():
        if isinstance(g, str):
            g = chart.gen(g)
        chart.check_gen(g)
        if isinstance(val, (int, Fraction)):
            val = GradedPoly.const(target, val)
        if val.chart != target:
            raise ChartMismatch("replacement lives on the wrong chart")
        d = degree(val)
        if not val.is_zero() and d != KIND_DEGREE[g[0]]:
            raise DegreeError(
                f"replacement for {chart.name_of(g)} has degree {d}, expected {KIND_DEGREE[g[0]]}"
            )
        table[g] = val

    def image(g):
        if g in table:
            return table[g]
        if target is chart:
            return GradedPoly.generator(chart, g)
        return GradedPoly.generator(target, target.gen(chart.name_of(g)))

    cache: dict = {}

    def power(g, a):
        key = (g, a)
        if key not in cache:
            cache[key] = image(g) ** a
        return cache[key]

    one = GradedPoly.const(target, 1)
    out = GradedPoly.zero(target)
    for (xs, mask, ps), c in f._terms.items():
        term = one * c
        for i, a in enumerate(xs):
            if a:
                term = term * power(("x", i), a)
                if term.is_zero():
                    break
        if term.is_zero():
            continue
        for i in mask:
            term = term * image(("e", i))
            if term.is_zero():
                break
        if term.is_zero():
            continue
        for i, a in enumerate(ps):
            if a:
                term = term * power(("p", i), a)
        out = out + term
    return out


def evaluate_body(f: GradedPoly, point: Sequence) -> Fraction:
    """Degree-0 part of ``f`` evaluated at a rational body point."""
    total = Fraction(0)
    for (xs, mask, ps), c in f._terms.items():
        if mask or any(ps):
            continue
        v = c
        for a, t in zip(xs, point):
            if a:
                v *= Fraction(t) ** a
        total += v
    return total


def x_monomials(n: int, max_degree: int):
    """All x-exponent vectors of total degree at most ``max_degree``."""
    for exps in _cartesian(range(max_degree + 1), repeat=n):
        if sum(exps) <= max_degree:
            yield exps
