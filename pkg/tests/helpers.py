"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy

from courantred import linalg
from courantred.courant import hyperbolic_metric, standard_chart, theta_from_lie_algebroid
from courantred.graded_algebra import KIND_DEGREE, Chart, GradedPoly, x_monomials
from courantred.poisson import BracketData
from courantred.pseudo_linear import QuadraticSpace, Subspace, hyperbolic_space


# ---------------------------------------------------------------------------
# chart families


def chart_families():
    """(name, BracketData) for the chart families used in randomized tests."""
    std = BracketData(standard_chart(2), hyperbolic_metric(2))
    diag_chart = Chart(2, 3, 2, x_names=("a", "b"), e_names=("e1", "e2", "e3"), p_names=("pa", "pb"))
    diag = BracketData(diag_chart, [[1, 0, 0], [0, -1, 0], [0, 0, 2]])
    alg = theta_from_lie_algebroid([[1, 0], [0, "x1"]], [[[0, 1], [-1, 0]], [[0, 0], [0, 0]]]).bracket
    return [("standard", std), ("diagonal", diag), ("algebroid", alg)]


def _gen(chart, kind, i):
    return GradedPoly.generator(chart, (kind, i))


def random_monomial_of_degree(rng: random.Random, chart: Chart, d: int, max_coeff_degree: int = 2):
    """A random monomial of total degree d (x-factors carry degree 0)."""
    for _ in range(50):
        n_p = rng.randint(0, d // 2) if chart.n_p else 0
        n_e = d - 2 * n_p
        if n_e > chart.n_e:
            continue
        f = GradedPoly.const(chart, rng.choice([-2, -1, 1, 2, Fraction(1, 2)]))
        for _ in range(n_p):
            f = f * _gen(chart, "p", rng.randrange(chart.n_p))
        for mu in rng.sample(range(chart.n_e), n_e):
            f = f * _gen(chart, "e", mu)
        if chart.n_x:
            for _ in range(rng.randint(0, max_coeff_degree)):
                f = f * _gen(chart, "x", rng.randrange(chart.n_x))
        return f
    return GradedPoly.zero(chart)


def random_homogeneous(rng: random.Random, chart: Chart, d: int, terms: int = 3, max_coeff_degree: int = 2):
    f = GradedPoly.zero(chart)
    for _ in range(terms):
        f = f + random_monomial_of_degree(rng, chart, d, max_coeff_degree)
    return f


def random_section(rng, chart, max_coeff_degree=2):
    return random_homogeneous(rng, chart, 1, terms=rng.randint(1, 3), max_coeff_degree=max_coeff_degree)


def random_function(rng, chart, max_coeff_degree=2):
    f = GradedPoly.zero(chart)
    for m in rng.sample(list(x_monomials(chart.n_x, max_coeff_degree)), 2):
        t = GradedPoly.const(chart, rng.randint(-2, 2))
        for i, a in enumerate(m):
            if a:
                t = t * _gen(chart, "x", i) ** a
        f = f + t
    return f


# ---------------------------------------------------------------------------
# recursive Leibniz oracle for the Poisson bracket


def _factors(chart, key):
    xs, mask, ps = key
    out = []
    for i, a in enumerate(xs):
        out += [("x", i)] * a
    out += [("e", mu) for mu in mask]
    for i, a in enumerate(ps):
        out += [("p", i)] * a
    return out


def _deg(factors):
    return sum(KIND_DEGREE[k] for k, _ in factors)


def _prod(chart, factors):
    f = GradedPoly.const(chart, 1)
    for g in factors:
        f = f * GradedPoly.generator(chart, g)
    return f


def _gen_bracket(b: BracketData, a, c):
    """{a, c} for generators, from the defining relations only."""
    ch = b.chart
    (ka, ia), (kc, ic) = a, c
    if ka == "p" and kc == "x":
        return GradedPoly.const(ch, int(ia == ic))
    if ka == "x" and kc == "p":
        return GradedPoly.const(ch, -int(ia == ic))
    if ka == "e" and kc == "e":
        return GradedPoly.const(ch, b.metric_matrix[ia][ic])
    return GradedPoly.zero(ch)


def oracle_bracket(b: BracketData, f: GradedPoly, g: GradedPoly) -> GradedPoly:
    """{f, g} by bilinearity, second-slot Leibniz and graded antisymmetry."""
    ch = b.chart
    out = GradedPoly.zero(ch)
    for kf, cf in f.items():
        for kg, cg in g.items():
            out = out + _mono_bracket(b, _factors(ch, kf), _factors(ch, kg)) * (cf * cg)
    return out


def _mono_bracket(b, F, G):
    ch = b.chart
    if not F or not G:
        return GradedPoly.zero(ch)
    if len(G) > 1:
        g1, rest = G[:1], G[1:]
        sign = (-1) ** (((_deg(F) - 2) * _deg(g1)) % 2)
        return _mono_bracket(b, F, g1) * _prod(ch, rest) + _prod(ch, g1) * _mono_bracket(b, F, rest) * sign
    if len(F) > 1:
        sign = -((-1) ** (((_deg(F) - 2) * (_deg(G) - 2)) % 2))
        return _mono_bracket(b, G, F) * sign
    return _gen_bracket(b, F[0], G[0])


# ---------------------------------------------------------------------------
# Cartan-calculus oracle for the standard Courant algebroid on R^n


def section_to_forms(f: GradedPoly, n: int):
    """(X, alpha) as sympy coefficient lists, with xi_i <-> d/dx^i and v^i <-> dx^i."""
    syms = sympy.symbols(f"x1:{n + 1}")
    X = [sympy.Integer(0)] * n
    al = [sympy.Integer(0)] * n
    for (xs, mask, ps), c in f.items():
        (mu,) = mask
        term = sympy.Rational(c.numerator, c.denominator)
        for s, a in zip(syms, xs):
            term *= s ** a
        if mu < n:
            al[mu] += term
        else:
            X[mu - n] += term
    return X, al, syms


def dorfman(a, b, n: int):
    """[[X + alpha, Y + beta]] = [X, Y] + L_X beta - i_Y d alpha, componentwise."""
    (X, al, syms), (Y, be, _) = a, b
    bracket = [sympy.expand(sum(X[j] * sympy.diff(Y[i], syms[j]) - Y[j] * sympy.diff(X[i], syms[j])
                                for j in range(n))) for i in range(n)]
    # L_X beta = i_X d beta + d i_X beta
    ixb = sum(X[j] * be[j] for j in range(n))
    lie = [sum(X[j] * (sympy.diff(be[i], syms[j]) - sympy.diff(be[j], syms[i])) for j in range(n))
           + sympy.diff(ixb, syms[i]) for i in range(n)]
    # i_Y d alpha
    iyda = [sum(Y[j] * (sympy.diff(al[i], syms[j]) - sympy.diff(al[j], syms[i])) for j in range(n))
            for i in range(n)]
    form = [sympy.expand(lie[i] - iyda[i]) for i in range(n)]
    return bracket, form


# ---------------------------------------------------------------------------
# random isotropic subspaces of split-signature spaces


def random_isometry(rng: random.Random, m: int) -> list:
    """A random element of O(m, m) built from GL blocks, B-transforms, beta
    transforms and coordinate swaps of the hyperbolic form."""
    n = 2 * m
    M = linalg.identity(n)
    for _ in range(4):
        kind = rng.choice(["gl", "b", "beta", "swap"])
        T = linalg.identity(n)
        if kind == "gl":
            while True:
                A = [[rng.randint(-2, 2) for _ in range(m)] for _ in range(m)]
                if linalg.det(linalg.mat(A)) != 0:
                    break
            Ainv_t = linalg.transpose(linalg.inverse(linalg.mat(A)))
            for i in range(m):
                for j in range(m):
                    T[i][j] = Fraction(A[i][j])
                    T[m + i][m + j] = Ainv_t[i][j]
        elif kind in ("b", "beta"):
            for i in range(m):
                for j in range(i + 1, m):
                    c = rng.randint(-2, 2)
                    # block (lower-left for b, upper-right for beta), skew
                    if kind == "b":
                        T[m + i][j] = Fraction(c)
                        T[m + j][i] = Fraction(-c)
                    else:
                        T[i][m + j] = Fraction(c)
                        T[j][m + i] = Fraction(-c)
        else:
            k = rng.randrange(m)
            T[k][k] = T[m + k][m + k] = Fraction(0)
            T[k][m + k] = T[m + k][k] = Fraction(1)
        M = linalg.matmul(T, M)
    return M


def random_isotropic(rng: random.Random, m: int, k: int) -> Subspace:
    """A random isotropic subspace of dimension <= k of the hyperbolic R^{2m}."""
    M = random_isometry(rng, m)
    coords = rng.sample(range(m), k)
    vecs = []
    for c in coords:
        e = [Fraction(0)] * (2 * m)
        e[c] = Fraction(1)
        vecs.append(linalg.matvec(M, e))
    return Subspace.span(2 * m, vecs)


def random_lagrangian(rng: random.Random, m: int) -> Subspace:
    return random_isotropic(rng, m, m)


def is_isometry(M, m: int) -> bool:
    V: QuadraticSpace = hyperbolic_space(m)
    G = V.matrix
    return linalg.matmul(linalg.matmul(linalg.transpose(M), G), M) == G
