"""The degree -2 Poisson bracket of a canonical chart.

Generator relations: ``{p_i, x^j} = delta_ij``, ``{e^mu, e^nu} = g^{mu nu}``
for a constant symmetric invertible matrix ``g``; every other bracket of
generators vanishes. The bracket is evaluated by the bidifferential formula

    {f, h} = sum_i (d f/d p_i)(d h/d x^i) - (d f/d x^i)(d h/d p_i)
             + sum_{mu,nu} (f d^R/d e^mu) g^{mu nu} (d^L/d e^nu h)

with right derivatives on the first slot and left derivatives on the second.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from . import linalg
from .graded_algebra import (
    Chart,
    ChartMismatch,
    DegreeError,
    GradedPoly,
    degree,
    partial_derivative,
)

__all__ = [
    "BracketData",
    "NilpotencyError",
    "poisson",
    "hamiltonian_field",
    "nondegeneracy_check",
    "exp_adjoint",
    "iteration_cap",
]


class NilpotencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class BracketData:
    chart: Chart
    metric: tuple = field(default=())

    def __post_init__(self):
        g = tuple(tuple(Fraction(v) for v in row) for row in self.metric)
        object.__setattr__(self, "metric", g)
        if self.chart.n_x != self.chart.n_p:
            raise ValueError(
                f"canonical charts need as many x as p generators ({self.chart.n_x} != {self.chart.n_p})"
            )
        n = self.chart.n_e
        if len(g) != n or any(len(row) != n for row in g):
            raise ValueError(f"metric must be {n}x{n}")
        if not linalg.is_symmetric([list(r) for r in g]):
            raise ValueError("metric must be symmetric")
        if linalg.det([list(r) for r in g]) == 0:
            raise ValueError("metric must be invertible")
        nz = tuple((a, b, g[a][b]) for a in range(n) for b in range(n) if g[a][b] != 0)
        object.__setattr__(self, "_nonzero", nz)

    @property
    def metric_matrix(self) -> list:
        return [list(r) for r in self.metric]

    def pairing(self, u: Sequence, v: Sequence) -> Fraction:
        return linalg.bilinear(u, self.metric_matrix, v)


def _check(b: BracketData, *polys):
    for f in polys:
        if f.chart != b.chart:
            raise ChartMismatch("polynomial does not live on the bracket's chart")


def poisson(b: BracketData, f: GradedPoly, g: GradedPoly) -> GradedPoly:
    _check(b, f, g)
    chart = b.chart
    out = GradedPoly.zero(chart)
    if f.is_zero() or g.is_zero():
        return out
    fu = f.generators_used()
    gu = g.generators_used()
    for i in range(chart.n_x):
        if ("p", i) in fu and ("x", i) in gu:
            out = out + partial_derivative(f, ("p", i)) * partial_derivative(g, ("x", i))
        if ("x", i) in fu and ("p", i) in gu:
            out = out - partial_derivative(f, ("x", i)) * partial_derivative(g, ("p", i))
    right = {}
    left = {}
    for mu, nu, c in b._nonzero:
        if ("e", mu) not in fu or ("e", nu) not in gu:
            continue
        if mu not in right:
            right[mu] = partial_derivative(f, ("e", mu), side="right")
        if nu not in left:
            left[nu] = partial_derivative(g, ("e", nu), side="left")
        out = out + right[mu] * left[nu] * c
    return out


def hamiltonian_field(b: BracketData, h: GradedPoly) -> Callable[[GradedPoly], GradedPoly]:
    """The derivation ``f -> {h, f}`` (degree ``|h| - 2``)."""
    if degree(h) is None:
        raise DegreeError("hamiltonian must be homogeneous")

    def field_(f: GradedPoly) -> GradedPoly:
        return poisson(b, h, f)

    field_.degree = degree(h) - 2
    return field_


def nondegeneracy_check(b: BracketData, point: Sequence) -> bool:
    """Both determinant conditions at a body point.

    In a canonical chart ``{p, x}`` is the identity and ``g`` is constant,
    so the answer does not depend on ``point``.
    """
    chart = b.chart
    if len(point) != chart.n_x:
        raise ValueError("point has the wrong number of coordinates")
    if chart.n_x != chart.n_p:
        return False
    px = [
        [poisson(b, GradedPoly.generator(chart, ("p", i)), GradedPoly.generator(chart, ("x", j))).constant_term()
         for j in range(chart.n_x)]
        for i in range(chart.n_p)
    ]
    ee = [
        [poisson(b, GradedPoly.generator(chart, ("e", i)), GradedPoly.generator(chart, ("e", j))).constant_term()
         for j in range(chart.n_e)]
        for i in range(chart.n_e)
    ]
    return linalg.det(px) != 0 and linalg.det(ee) != 0


def _max_degrees(f: GradedPoly) -> tuple:
    pd = ed = 0
    for (xs, mask, ps), _ in f.items():
        pd = max(pd, sum(ps))
        ed = max(ed, len(mask))
    return pd, ed


def iteration_cap(f: GradedPoly) -> int:
    pd, ed = _max_degrees(f)
    return 2 * (pd + ed) + 4


def exp_adjoint(b: BracketData, B: GradedPoly, f: GradedPoly) -> GradedPoly:
    """Time-one flow of ``{B, .}``: the series sum_k ad_B^k(f) / k!."""
    _check(b, B, f)
    if not B.is_zero() and degree(B) != 2:
        raise DegreeError("exp_adjoint needs a degree-2 generator")
    cap = iteration_cap(f)
    total = f
    term = f
    for k in range(1, cap + 1):
        term = poisson(b, B, term)
        if term.is_zero():
            return total
        total = total + term * Fraction(1, factorial(k))
    raise NilpotencyError(f"ad_B did not vanish within {cap} iterations")
