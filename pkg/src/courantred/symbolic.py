"""Matrices of body polynomials, handled over the field of rational functions.

Only used where a frame has non-constant coefficients; the constant case
goes through :mod:`courantred.linalg`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce

import sympy
from sympy.polys.matrices import DomainMatrix

from .graded_algebra import Chart, GradedPoly

__all__ = [
    "body_symbols",
    "to_sympy",
    "from_sympy",
    "is_constant",
    "rank",
    "nullspace",
    "rref_rows",
    "solve_polynomial",
]


def body_symbols(chart: Chart) -> tuple:
    return tuple(sympy.Symbol(n) for n in chart.x_names)


def to_sympy(f: GradedPoly, syms=None):
    syms = syms or body_symbols(f.chart)
    out = sympy.Integer(0)
    for (xs, mask, ps), c in f.items():
        if mask or any(ps):
            raise ValueError("only body functions convert to sympy")
        term = sympy.Rational(c.numerator, c.denominator)
        for s, a in zip(syms, xs):
            if a:
                term *= s ** a
        out += term
    return out


def from_sympy(expr, chart: Chart, syms=None) -> GradedPoly:
    syms = syms or body_symbols(chart)
    expr = sympy.cancel(sympy.sympify(expr))
    num, den = sympy.fraction(expr)
    if sympy.Poly(den, *syms).total_degree() > 0:
        raise ValueError(f"not a polynomial: {expr}")
    poly = sympy.Poly(sympy.expand(num / den), *syms)
    terms = {}
    zero_p = tuple([0] * chart.n_p)
    for monom, c in poly.terms():
        c = sympy.Rational(c)
        terms[(tuple(int(a) for a in monom), (), zero_p)] = Fraction(int(c.p), int(c.q))
    return GradedPoly(chart, terms)


def is_constant(f: GradedPoly) -> bool:
    return all(not any(xs) and not mask and not any(ps) for (xs, mask, ps), _ in f.items())


def _domain(chart: Chart, syms):
    if not syms:
        return sympy.QQ
    return sympy.QQ.frac_field(*syms)


def _dm(rows, chart: Chart):
    syms = body_symbols(chart)
    K = _domain(chart, syms)
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    data = [[to_sympy(f, syms) for f in row] for row in rows]
    return DomainMatrix.from_list_sympy(nr, nc, data).convert_to(K), syms


def rank(rows, chart: Chart) -> int:
    """Rank over Q(x) of a matrix of body polynomials (list of rows)."""
    if not rows or not rows[0]:
        return 0
    m, _ = _dm(rows, chart)
    return m.rank()


def _clear(vec, syms):
    """Scale a vector of rational functions to coprime polynomials."""
    vec = [sympy.cancel(v) for v in vec]
    dens = [sympy.fraction(v)[1] for v in vec]
    lcm = reduce(sympy.lcm, dens, sympy.Integer(1))
    out = [sympy.expand(sympy.cancel(v * lcm)) for v in vec]
    nz = [v for v in out if v != 0]
    if nz:
        g = reduce(sympy.gcd, nz)
        out = [sympy.expand(sympy.cancel(v / g)) for v in out]
    return out


def nullspace(rows, chart: Chart, ncols: int | None = None) -> list:
    """Polynomial basis vectors of the right kernel over Q(x)."""
    syms = body_symbols(chart)
    if not rows:
        n = ncols or 0
        return [[GradedPoly.const(chart, int(i == j)) for i in range(n)] for j in range(n)]
    m, syms = _dm(rows, chart)
    ns = m.nullspace().to_Matrix()
    out = []
    for r in range(ns.rows):
        vec = _clear(list(ns.row(r)), syms)
        out.append([from_sympy(v, chart, syms) for v in vec])
    return out


def rref_rows(rows, chart: Chart) -> list:
    """Nonzero rows of the reduced row echelon form over Q(x), as sympy expressions."""
    if not rows:
        return []
    m, syms = _dm(rows, chart)
    red, pivots = m.rref()
    mat = red.to_Matrix()
    return [[sympy.cancel(v) for v in mat.row(i)] for i in range(len(pivots))]


def solve_polynomial(rows, rhs, chart: Chart):
    """A polynomial solution of rows . u = rhs over Q(x), free variables zero.

    Returns a list of GradedPolys, or None if the system is inconsistent or
    the particular solution is not polynomial.
    """
    syms = body_symbols(chart)
    nvar = len(rows[0]) if rows else 0
    if not rows:
        return [GradedPoly.zero(chart)] * nvar
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, syms = _dm(aug, chart)
    red, pivots = m.rref()
    if nvar in pivots:
        return None
    mat = red.to_Matrix()
    sol = [sympy.Integer(0)] * nvar
    for i, pc in enumerate(pivots):
        sol[pc] = sympy.cancel(mat[i, nvar])
    try:
        return [from_sympy(v, chart, syms) for v in sol]
    except ValueError:
        return None
