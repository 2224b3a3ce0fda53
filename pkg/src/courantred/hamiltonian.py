"""Degree-2 DGLAs, Courant algebras, hamiltonian actions and their reduction.

Conventions: a Lie algebra carries constants ``c[k][i][j]`` with
``[u_i, u_j] = sum_k c[k][i][j] u_k``; representations are lists of
matrices (one per g-basis element) acting on columns; ``varpi[k][i][j]`` is
the h_k-component of varpi(a_i, a_j); ``delta_h_a`` (na x nh) and
``delta_a_g`` (ng x na) act on columns.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from . import linalg
from .coiso import (
    GeometricCoisoData,
    _span_rank,
    ideal_from_data,
    membership,
    reduce,
    reduce_dirac,
    reduce_quadratic,
    restrict_to_N,
    sample_points,
    section_coeffs,
    section_from_coeffs,
)
from .courant import CourantScenario, anchor_apply, derived_bracket, master_equation
from .errors import DataError, ReductionError
from .graded_algebra import GradedPoly, degree, evaluate_body, partial_derivative
from .poisson import poisson
from .pseudo_linear import QuadraticSpace, Subspace, exactness_conditions, orthogonal

__all__ = [
    "LieAlgebra",
    "DGLA2Data",
    "CourantAlgebraData",
    "HamAction",
    "CheckReport",
    "abelian",
    "so3",
    "heisenberg",
    "aff1",
    "adjoint_rep",
    "trivial_rep",
    "validate_gla",
    "validate_dgla",
    "validate_courant_algebra",
    "dgla_to_courant_algebra",
    "courant_algebra_to_dgla",
    "hemisemidirect",
    "random_hemisemidirect",
    "change_basis",
    "validate_comoment",
    "validate_chain",
    "regular_zero",
    "zero_level_data",
    "left_central_check",
    "from_reduction_data",
    "extended_action_check",
    "ham_reduce",
]


def _F(x) -> Fraction:
    return Fraction(x)


def _tensor(t, n_out, n1, n2):
    t = [[[_F(t[k][i][j]) for j in range(n2)] for i in range(n1)] for k in range(n_out)]
    return t


def _bil(t, x, y) -> list:
    return [sum((t[k][i][j] * x[i] * y[j] for i in range(len(x)) if x[i] for j in range(len(y)) if y[j]),
                Fraction(0)) for k in range(len(t))]


def _unit(n, i) -> list:
    return [Fraction(int(j == i)) for j in range(n)]


def _vadd(a, b):
    return [x + y for x, y in zip(a, b)]


def _vsub(a, b):
    return [x - y for x, y in zip(a, b)]


@dataclass
class CheckReport:
    """Ordered axiom verdicts with the first witness of each failure."""

    results: dict = field(default_factory=dict)

    def record(self, name: str, ok: bool, witness=None):
        if name not in self.results:
            self.results[name] = (True, None)
        if not ok and self.results[name][0]:
            self.results[name] = (False, witness)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.results.values())

    def failed(self) -> list:
        return [k for k, (ok, _) in self.results.items() if not ok]

    def lines(self) -> list:
        return [f"{k}: {'pass' if ok else 'FAIL'}" + ("" if ok else f" {w}") for k, (ok, w) in self.results.items()]


# ---------------------------------------------------------------------------
# Lie algebras and representations


@dataclass(frozen=True)
class LieAlgebra:
    dim: int
    c: tuple = ()

    def __post_init__(self):
        n = self.dim
        c = self.c if self.c else [[[0] * n for _ in range(n)] for _ in range(n)]
        object.__setattr__(self, "c", tuple(tuple(tuple(_F(v) for v in row) for row in plane) for plane in c))

    def bracket(self, x, y) -> list:
        return _bil(self.c, x, y)


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(n)


def _from_rules(n, rules) -> LieAlgebra:
    c = [[[0] * n for _ in range(n)] for _ in range(n)]
    for (i, j), out in rules.items():
        for k, v in out.items():
            c[k][i][j] += v
            c[k][j][i] -= v
    return LieAlgebra(n, c)


def so3() -> LieAlgebra:
    return _from_rules(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})


def heisenberg() -> LieAlgebra:
    return _from_rules(3, {(0, 1): {2: 1}})


def aff1() -> LieAlgebra:
    return _from_rules(2, {(0, 1): {1: 1}})


def adjoint_rep(g: LieAlgebra) -> list:
    n = g.dim
    return [[[g.c[k][i][j] for j in range(n)] for k in range(n)] for i in range(n)]


def trivial_rep(g: LieAlgebra, m: int) -> list:
    return [linalg.zeros(m, m) for _ in range(g.dim)]


def _rep_witness(g: LieAlgebra, rep) -> tuple | None:
    n = g.dim
    for i in range(n):
        for j in range(n):
            comb = None
            for k in range(n):
                if g.c[k][i][j]:
                    term = linalg.scale(rep[k], g.c[k][i][j])
                    comb = term if comb is None else linalg.add(comb, term)
            m = len(rep[0]) if rep else 0
            if comb is None:
                comb = linalg.zeros(m, m)
            comm = linalg.add(linalg.matmul(rep[i], rep[j]), linalg.scale(linalg.matmul(rep[j], rep[i]), -1))
            if comm != comb:
                return (i, j)
    return None


def _jacobi_witness(g: LieAlgebra) -> tuple | None:
    n = g.dim
    for i in range(n):
        for j in range(n):
            if g.c and any(g.c[k][i][j] + g.c[k][j][i] for k in range(n)):
                return ("antisymmetry", i, j)
    for i, j, k in product(range(n), repeat=3):
        ui, uj, uk = _unit(n, i), _unit(n, j), _unit(n, k)
        t = _vadd(_vadd(g.bracket(ui, g.bracket(uj, uk)), g.bracket(uj, g.bracket(uk, ui))),
                  g.bracket(uk, g.bracket(ui, uj)))
        if any(t):
            return (i, j, k)
    return None


# ---------------------------------------------------------------------------
# DGLAs of degree 2


@dataclass(frozen=True)
class DGLA2Data:
    g: LieAlgebra
    na: int
    nh: int
    tau: tuple  # per g-basis element, na x na
    lam: tuple  # per g-basis element, nh x nh
    varpi: tuple  # nh x na x na
    delta_h_a: tuple = ()  # na x nh
    delta_a_g: tuple = ()  # ng x na
    is_dgla: bool = True

    def __post_init__(self):
        ng, na, nh = self.g.dim, self.na, self.nh
        object.__setattr__(self, "tau", tuple(tuple(map(tuple, linalg.mat(m))) for m in self.tau))
        object.__setattr__(self, "lam", tuple(tuple(map(tuple, linalg.mat(m))) for m in self.lam))
        object.__setattr__(self, "varpi", tuple(tuple(map(tuple, p)) for p in _tensor(self.varpi, nh, na, na)))
        dha = self.delta_h_a or [[0] * nh for _ in range(na)]
        dag = self.delta_a_g or [[0] * na for _ in range(ng)]
        object.__setattr__(self, "delta_h_a", tuple(map(tuple, linalg.mat(dha))))
        object.__setattr__(self, "delta_a_g", tuple(map(tuple, linalg.mat(dag))))
        if len(self.tau) != ng or len(self.lam) != ng:
            raise DataError("one representation matrix per g-basis element is required")

    def tau_m(self, i):
        return [list(r) for r in self.tau[i]]

    def lam_m(self, i):
        return [list(r) for r in self.lam[i]]

    def tau_of(self, u) -> list:
        out = linalg.zeros(self.na, self.na)
        for i, ui in enumerate(u):
            if ui:
                out = linalg.add(out, linalg.scale(self.tau_m(i), ui))
        return out

    def lam_of(self, u) -> list:
        out = linalg.zeros(self.nh, self.nh)
        for i, ui in enumerate(u):
            if ui:
                out = linalg.add(out, linalg.scale(self.lam_m(i), ui))
        return out

    def dha(self, h) -> list:
        return linalg.matvec([list(r) for r in self.delta_h_a], h) if self.na else []

    def dag(self, a) -> list:
        return linalg.matvec([list(r) for r in self.delta_a_g], a) if self.g.dim else []

    def pi(self, a1, a2) -> list:
        return _bil(self.varpi, a1, a2)

    def is_exact(self) -> bool:
        ng, na, nh = self.g.dim, self.na, self.nh
        D1 = [list(r) for r in self.delta_h_a]
        D2 = [list(r) for r in self.delta_a_g]
        if na != ng + nh:
            return False
        if nh and linalg.rank(D1) != nh:
            return False
        if ng and linalg.rank(D2) != ng:
            return False
        return not ng or not nh or linalg.is_zero(linalg.matmul(D2, D1))


def validate_gla(d: DGLA2Data) -> CheckReport:
    r = CheckReport()
    g = d.g
    ng, na, nh = g.dim, d.na, d.nh
    r.record("jacobi(g)", _jacobi_witness(g) is None, _jacobi_witness(g))
    w = _rep_witness(g, [d.tau_m(i) for i in range(ng)]) if na else None
    r.record("tau representation", w is None, w)
    w = _rep_witness(g, [d.lam_m(i) for i in range(ng)]) if nh else None
    r.record("lambda representation", w is None, w)
    r.record("varpi symmetric", True)
    for i in range(na):
        for j in range(na):
            if d.pi(_unit(na, i), _unit(na, j)) != d.pi(_unit(na, j), _unit(na, i)):
                r.record("varpi symmetric", False, (i, j))
    r.record("varpi equivariant", True)
    for k, i, j in product(range(ng), range(na), range(na)):
        ai, aj = _unit(na, i), _unit(na, j)
        lhs = linalg.matvec(d.lam_m(k), d.pi(ai, aj)) if nh else []
        rhs = _vadd(d.pi(linalg.matvec(d.tau_m(k), ai), aj), d.pi(ai, linalg.matvec(d.tau_m(k), aj)))
        if lhs != rhs:
            r.record("varpi equivariant", False, (k, i, j))
    return r


def validate_dgla(d: DGLA2Data) -> CheckReport:
    r = validate_gla(d)
    g = d.g
    ng, na, nh = g.dim, d.na, d.nh
    D1 = [list(x) for x in d.delta_h_a]
    D2 = [list(x) for x in d.delta_a_g]
    r.record("delta^2 = 0", not (ng and nh) or linalg.is_zero(linalg.matmul(D2, D1)))
    ad = adjoint_rep(g)
    r.record("delta equivariant on a", True)
    r.record("delta equivariant on h", True)
    for i in range(ng):
        if ng and na and linalg.matmul(D2, d.tau_m(i)) != linalg.matmul(ad[i], D2):
            r.record("delta equivariant on a", False, i)
        if na and nh and linalg.matmul(D1, d.lam_m(i)) != linalg.matmul(d.tau_m(i), D1):
            r.record("delta equivariant on h", False, i)
    r.record("delta varpi", True)
    for i, j in product(range(na), repeat=2):
        ai, aj = _unit(na, i), _unit(na, j)
        lhs = d.dha(d.pi(ai, aj)) if nh else [Fraction(0)] * na
        rhs = _vadd(linalg.matvec(d.tau_of(d.dag(ai)), aj), linalg.matvec(d.tau_of(d.dag(aj)), ai))
        if lhs != rhs:
            r.record("delta varpi", False, (i, j))
    r.record("lambda(delta a) = varpi(a, delta .)", True)
    for i, j in product(range(na), range(nh)):
        ai, hj = _unit(na, i), _unit(nh, j)
        lhs = linalg.matvec(d.lam_of(d.dag(ai)), hj)
        rhs = d.pi(ai, d.dha(hj))
        if lhs != rhs:
            r.record("lambda(delta a) = varpi(a, delta .)", False, (i, j))
    return r


# ---------------------------------------------------------------------------
# Courant algebras


@dataclass(frozen=True)
class CourantAlgebraData:
    na: int
    bracket: tuple  # na x na x na
    g: LieAlgebra
    p: tuple  # ng x na
    h_basis: tuple = ()  # basis of ker p, as vectors in a

    def __post_init__(self):
        na, ng = self.na, self.g.dim
        object.__setattr__(self, "bracket", tuple(tuple(map(tuple, t)) for t in _tensor(self.bracket, na, na, na)))
        object.__setattr__(self, "p", tuple(map(tuple, linalg.mat(self.p))) if self.p else tuple(() for _ in range(ng)))
        object.__setattr__(self, "h_basis", tuple(tuple(_F(x) for x in v) for v in self.h_basis))

    def br(self, x, y) -> list:
        return _bil(self.bracket, x, y)

    def proj(self, a) -> list:
        return linalg.matvec([list(r) for r in self.p], a) if self.g.dim else []

    @property
    def nh(self) -> int:
        return len(self.h_basis)


def validate_courant_algebra(c: CourantAlgebraData, exact: bool = True) -> CheckReport:
    r = CheckReport()
    na, ng = c.na, c.g.dim
    units = [_unit(na, i) for i in range(na)]
    r.record("leibniz", True)
    for i, j, k in product(range(na), repeat=3):
        a1, a2, a3 = units[i], units[j], units[k]
        lhs = c.br(a1, c.br(a2, a3))
        rhs = _vadd(c.br(c.br(a1, a2), a3), c.br(a2, c.br(a1, a3)))
        if lhs != rhs:
            r.record("leibniz", False, (i, j, k))
            break
    r.record("p bracket preserving", True)
    for i, j in product(range(na), repeat=2):
        if c.proj(c.br(units[i], units[j])) != c.g.bracket(c.proj(units[i]), c.proj(units[j])):
            r.record("p bracket preserving", False, (i, j))
            break
    if exact:
        P = [list(row) for row in c.p]
        r.record("p surjective", not ng or linalg.rank(P) == ng)
        hb = [list(v) for v in c.h_basis]
        ok = len(hb) == na - ng and all(not any(c.proj(v)) for v in hb)
        ok = ok and (not hb or linalg.rank(linalg.from_columns(hb, na)) == len(hb))
        r.record("h basis spans ker p", ok)
        r.record("ker p left-central", True)
        for v in hb:
            for a in units:
                if any(c.br(v, a)):
                    r.record("ker p left-central", False, (v, a))
    return r


def hemisemidirect(g: LieAlgebra, h_rep: Sequence, nh: int | None = None) -> CourantAlgebraData:
    """Exact Courant algebra on g + h with [[(u1,h1),(u2,h2)]] = ([u1,u2], u1.h2).

    ``nh`` is dim h; it is read off ``h_rep`` unless g is zero-dimensional.
    """
    ng = g.dim
    if nh is None:
        nh = len(h_rep[0]) if h_rep else 0
    w = _rep_witness(g, [linalg.mat(m) for m in h_rep]) if nh else None
    if w is not None:
        raise DataError(f"h is not a g-module (fails on basis pair {w})")
    na = ng + nh
    t = [[[Fraction(0)] * na for _ in range(na)] for _ in range(na)]
    for i in range(ng):
        for j in range(ng):
            for k in range(ng):
                t[k][i][j] = g.c[k][i][j]
        for j in range(nh):
            for k in range(nh):
                t[ng + k][i][ng + j] = _F(h_rep[i][k][j])
    p = [[Fraction(int(i == j)) for j in range(na)] for i in range(ng)]
    hb = [_unit(na, ng + j) for j in range(nh)]
    return CourantAlgebraData(na, t, g, p, hb)


def change_basis(c: CourantAlgebraData, P: Sequence) -> CourantAlgebraData:
    """Express ``c`` in the basis given by the columns of the invertible P."""
    na = c.na
    Pm = linalg.mat(P)
    Pinv = linalg.inverse(Pm)
    cols = linalg.columns(Pm)
    t = [[[Fraction(0)] * na for _ in range(na)] for _ in range(na)]
    for i in range(na):
        for j in range(na):
            v = linalg.matvec(Pinv, c.br(cols[i], cols[j]))
            for k in range(na):
                t[k][i][j] = v[k]
    p = linalg.matmul([list(r) for r in c.p], Pm) if c.g.dim else []
    hb = [linalg.matvec(Pinv, list(v)) for v in c.h_basis]
    return CourantAlgebraData(na, t, c.g, p, hb)


def dgla_to_courant_algebra(d: DGLA2Data) -> CourantAlgebraData:
    if not d.is_exact():
        raise DataError("the DGLA is not exact")
    na = d.na
    t = [[[Fraction(0)] * na for _ in range(na)] for _ in range(na)]
    for i in range(na):
        T = d.tau_of(d.dag(_unit(na, i)))
        for j in range(na):
            for k in range(na):
                t[k][i][j] = T[k][j]
    hb = linalg.columns([list(r) for r in d.delta_h_a]) if d.nh else []
    return CourantAlgebraData(na, t, d.g, [list(r) for r in d.delta_a_g], hb)


def courant_algebra_to_dgla(c: CourantAlgebraData) -> DGLA2Data:
    rep = validate_courant_algebra(c, exact=True)
    if not rep.passed:
        raise DataError(f"the Courant algebra is not exact: {rep.failed()}")
    na, ng, nh = c.na, c.g.dim, c.nh
    P = [list(r) for r in c.p]
    hb = [list(v) for v in c.h_basis]
    H = linalg.from_columns(hb, na) if hb else []
    tau, lam = [], []
    for i in range(ng):
        lift = linalg.solve(P, _unit(ng, i))
        T = linalg.from_columns([c.br(lift, _unit(na, j)) for j in range(na)], na)
        tau.append(T)
        if nh:
            cols = [linalg.coordinates(hb, linalg.matvec(T, v), na) for v in hb]
            lam.append(linalg.from_columns(cols, nh))
        else:
            lam.append([])
    varpi = [[[Fraction(0)] * na for _ in range(na)] for _ in range(nh)]
    for i, j in product(range(na), repeat=2):
        s = _vadd(c.br(_unit(na, i), _unit(na, j)), c.br(_unit(na, j), _unit(na, i)))
        if nh:
            co = linalg.coordinates(hb, s, na)
            for k in range(nh):
                varpi[k][i][j] = co[k]
    return DGLA2Data(c.g, na, nh, tau, lam, varpi, H if nh else [[] for _ in range(na)], P)


def random_hemisemidirect(rng: random.Random, max_total: int = 12) -> CourantAlgebraData:
    """A hemisemidirect product in a random basis; 2 (dim g + dim h) <= max_total."""
    while True:
        choice = rng.choice(["abelian", "so3", "heisenberg", "aff1"])
        g = {"abelian": lambda: abelian(rng.randint(1, 3)), "so3": so3, "heisenberg": heisenberg, "aff1": aff1}[choice]()
        if rng.random() < 0.5:
            rep = adjoint_rep(g)
        else:
            rep = trivial_rep(g, rng.randint(0, 2))
        nh = len(rep[0]) if rep and rep[0] else 0
        if 2 * (g.dim + nh) <= max_total:
            break
    c = hemisemidirect(g, rep)
    na = c.na
    while True:
        P = [[rng.randint(-2, 2) for _ in range(na)] for _ in range(na)]
        if linalg.det(linalg.mat(P)) != 0:
            break
    return change_basis(c, P)


# ---------------------------------------------------------------------------
# hamiltonian actions


@dataclass(frozen=True)
class HamAction:
    scenario: CourantScenario
    dgla: DGLA2Data
    phi: tuple  # per g-basis element, degree 2
    rho_a: tuple  # per a-basis element, degree 1
    mu_star: tuple  # per h-basis element, degree 0
    label: str = ""

    def __post_init__(self):
        d = self.dgla
        if len(self.phi) != d.g.dim or len(self.rho_a) != d.na or len(self.mu_star) != d.nh:
            raise DataError("component counts do not match the DGLA dimensions")
        for fs, deg, what in ((self.phi, 2, "phi"), (self.rho_a, 1, "rho"), (self.mu_star, 0, "mu*")):
            for f in fs:
                if f.chart != self.scenario.chart:
                    raise DataError(f"{what} component on a different chart")
                if not f.is_zero() and degree(f) != deg:
                    raise DataError(f"{what} component {f} must have degree {deg}")

    @property
    def chart(self):
        return self.scenario.chart

    def _lin(self, comps, vec):
        out = GradedPoly.zero(self.chart)
        for c, f in zip(vec, comps):
            if c:
                out = out + f * c
        return out

    def phi_of(self, u):
        return self._lin(self.phi, u)

    def rho_of(self, a):
        return self._lin(self.rho_a, a)

    def mu_of(self, h):
        return self._lin(self.mu_star, h)


def _symbol(b, phi: GradedPoly) -> list:
    """Components u_M^i = {phi, x^i} of the symbol of a degree-2 function."""
    ch = b.chart
    return [poisson(b, phi, GradedPoly.generator(ch, ("x", i))) for i in range(ch.n_x)]


def _vf_apply(components, f: GradedPoly) -> GradedPoly:
    out = GradedPoly.zero(f.chart)
    for i, c in enumerate(components):
        if not c.is_zero():
            d = partial_derivative(f, ("x", i))
            if not d.is_zero():
                out = out + c * d
    return out


def _derivation_on_section(b, phi: GradedPoly, s: GradedPoly) -> GradedPoly:
    """phi acting on a section by the chain rule: symbol on coefficients plus
    the action on frame generators."""
    ch = b.chart
    sym = _symbol(b, phi)
    out = GradedPoly.zero(ch)
    for mu, c in enumerate(section_coeffs(s)):
        if c.is_zero():
            continue
        e = GradedPoly.generator(ch, ("e", mu))
        out = out + _vf_apply(sym, c) * e + c * poisson(b, phi, e)
    return out


def _metric_pairing(b, s: GradedPoly, t: GradedPoly) -> GradedPoly:
    cs, ct = section_coeffs(s), section_coeffs(t)
    out = GradedPoly.zero(b.chart)
    for mu, nu, g in b._nonzero:
        if not cs[mu].is_zero() and not ct[nu].is_zero():
            out = out + cs[mu] * ct[nu] * g
    return out


def validate_comoment(A: HamAction) -> CheckReport:
    """Bracket-morphism property of the momentum map, symbolically and via the
    four classical conditions; the two verdicts must agree."""
    b = A.scenario.bracket
    d = A.dgla
    g = d.g
    ng, na, nh = g.dim, d.na, d.nh
    U = [_unit(ng, i) for i in range(ng)]
    Av = [_unit(na, i) for i in range(na)]
    Hv = [_unit(nh, i) for i in range(nh)]
    r = CheckReport()
    for name in ("symbolic {phi,phi}", "symbolic {phi,rho}", "symbolic {phi,mu}", "symbolic {rho,rho}"):
        r.record(name, True)
    for i, j in product(range(ng), repeat=2):
        if poisson(b, A.phi[i], A.phi[j]) != A.phi_of(g.bracket(U[i], U[j])):
            r.record("symbolic {phi,phi}", False, (i, j))
    for i, j in product(range(ng), range(na)):
        if poisson(b, A.phi[i], A.rho_a[j]) != A.rho_of(linalg.matvec(d.tau_m(i), Av[j])):
            r.record("symbolic {phi,rho}", False, (i, j))
    for i, j in product(range(ng), range(nh)):
        if poisson(b, A.phi[i], A.mu_star[j]) != A.mu_of(linalg.matvec(d.lam_m(i), Hv[j])):
            r.record("symbolic {phi,mu}", False, (i, j))
    for i, j in product(range(na), repeat=2):
        if poisson(b, A.rho_a[i], A.rho_a[j]) != A.mu_of(d.pi(Av[i], Av[j])):
            r.record("symbolic {rho,rho}", False, (i, j))
    sym_ok = r.passed
    ch = A.chart
    gens = [GradedPoly.generator(ch, ("x", i)) for i in range(ch.n_x)] + \
           [GradedPoly.generator(ch, ("e", i)) for i in range(ch.n_e)]
    for name in ("(a) phi Lie morphism", "(b) rho equivariant", "(c) mu equivariant", "(d) <rho,rho> = mu*varpi"):
        r.record(name, True)
    for i, j in product(range(ng), repeat=2):
        target = A.phi_of(g.bracket(U[i], U[j]))
        for x in gens:
            lhs = poisson(b, A.phi[i], poisson(b, A.phi[j], x)) - poisson(b, A.phi[j], poisson(b, A.phi[i], x))
            if lhs != poisson(b, target, x):
                r.record("(a) phi Lie morphism", False, (i, j, str(x)))
                break
    for i, j in product(range(ng), range(na)):
        if A.rho_of(linalg.matvec(d.tau_m(i), Av[j])) != _derivation_on_section(b, A.phi[i], A.rho_a[j]):
            r.record("(b) rho equivariant", False, (i, j))
    for i, j in product(range(ng), range(nh)):
        if A.mu_of(linalg.matvec(d.lam_m(i), Hv[j])) != _vf_apply(_symbol(b, A.phi[i]), A.mu_star[j]):
            r.record("(c) mu equivariant", False, (i, j))
    for i, j in product(range(na), repeat=2):
        if A.mu_of(d.pi(Av[i], Av[j])) != _metric_pairing(b, A.rho_a[i], A.rho_a[j]):
            r.record("(d) <rho,rho> = mu*varpi", False, (i, j))
    geo_ok = all(r.results[k][0] for k in r.results if k.startswith("("))
    r.record("verdicts agree", sym_ok == geo_ok)
    return r


def validate_chain(A: HamAction) -> CheckReport:
    """Compatibility of the momentum map with the differentials."""
    s = A.scenario
    b = s.bracket
    d = A.dgla
    ng, na, nh = d.g.dim, d.na, d.nh
    ch = A.chart
    th = s.theta
    r = CheckReport()
    for name in ("symbolic {Theta,mu*h}", "symbolic {Theta,rho a}", "symbolic {Theta,phi u}"):
        r.record(name, True)
    for j in range(nh):
        if poisson(b, th, A.mu_star[j]) != A.rho_of(d.dha(_unit(nh, j))):
            r.record("symbolic {Theta,mu*h}", False, j)
    for j in range(na):
        if poisson(b, th, A.rho_a[j]) != A.phi_of(d.dag(_unit(na, j))):
            r.record("symbolic {Theta,rho a}", False, j)
    for i in range(ng):
        res = poisson(b, th, A.phi[i])
        if not res.is_zero():
            r.record("symbolic {Theta,phi u}", False, (i, str(res)))
    sym_ok = all(v[0] for v in r.results.values())
    for name in ("(a) rho(delta h) = rho* d mu*h", "(b) phi(delta a) = [[rho a, .]]", "(c) phi(u) derivation of [[.,.]]"):
        r.record(name, True)
    xs = [GradedPoly.generator(ch, ("x", i)) for i in range(ch.n_x)]
    es = [GradedPoly.generator(ch, ("e", i)) for i in range(ch.n_e)]
    dx = [poisson(b, th, x) for x in xs]
    for j in range(nh):
        f = A.mu_star[j]
        rhs = GradedPoly.zero(ch)
        for i in range(ch.n_x):
            df = partial_derivative(f, ("x", i))
            if not df.is_zero():
                rhs = rhs + df * dx[i]
        if A.rho_of(d.dha(_unit(nh, j))) != rhs:
            r.record("(a) rho(delta h) = rho* d mu*h", False, j)
    for j in range(na):
        op = A.phi_of(d.dag(_unit(na, j)))
        ra = A.rho_a[j]
        for e in es:
            if poisson(b, op, e) != derived_bracket(s, ra, e):
                r.record("(b) phi(delta a) = [[rho a, .]]", False, (j, str(e)))
                break
        for x in xs:
            if poisson(b, op, x) != anchor_apply(s, ra, x):
                r.record("(b) phi(delta a) = [[rho a, .]]", False, (j, str(x)))
                break
    seconds = list(es) + [x * e for x in xs for e in es]
    for i in range(ng):
        ph = A.phi[i]
        D = lambda e: poisson(b, ph, e)  # noqa: E731
        bad = None
        for e1 in es:
            for e2 in seconds:
                lhs = D(derived_bracket(s, e1, e2))
                rhs = derived_bracket(s, D(e1), e2) + derived_bracket(s, e1, D(e2))
                if lhs != rhs:
                    bad = (i, str(e1), str(e2))
                    break
            if bad:
                break
        if bad:
            r.record("(c) phi(u) derivation of [[.,.]]", False, bad)
    geo_ok = all(v[0] for k, v in r.results.items() if k.startswith("("))
    r.record("verdicts agree", sym_ok == geo_ok)
    return r


def _zero_set_indices(A: HamAction) -> tuple:
    """Coordinate indices cutting out the zero set of mu*."""
    ch = A.chart
    n = ch.n_x
    rows = []
    for f in A.mu_star:
        row = [Fraction(0)] * n
        for (xs, mask, ps), c in f.items():
            if sum(xs) == 1:
                row[xs.index(1)] += c
        rows.append(row)
    idx: list = []
    if rows and linalg.rank(rows) == len(rows):
        idx = list(linalg.rref(rows)[1])
    else:
        for f in A.mu_star:
            items = list(f.items())
            if len(items) == 1:
                (xs, mask, ps), _ = items[0]
                nz = [i for i, a in enumerate(xs) if a]
                if len(nz) == 1:
                    idx.append(nz[0])
                    continue
            raise DataError(f"the zero set of {f} is not a coordinate subspace in this chart")
    idx = sorted(set(idx))
    for f in A.mu_star:
        if not restrict_to_N(f, idx).is_zero():
            raise DataError(f"mu* component {f} does not vanish on {{x^A = 0}}")
    return tuple(idx)


def regular_zero(A: HamAction, samples: int = 5, seed: int = 0) -> CheckReport:
    """(a) 0 regular value of mu; (b) rho injective; (c) locally free action, on mu^{-1}(0)."""
    ch = A.chart
    b = A.scenario.bracket
    r = CheckReport()
    try:
        Aidx = _zero_set_indices(A)
    except DataError as exc:
        r.record("(a) 0 regular value of mu", False, str(exc))
        return r
    pts = sample_points(_Pts(ch, Aidx), seed=seed, count=samples)
    nh, na, ng = A.dgla.nh, A.dgla.na, A.dgla.g.dim
    dmu = [[partial_derivative(f, ("x", i)) for i in range(ch.n_x)] for f in A.mu_star]
    rho = [section_coeffs(f) for f in A.rho_a]
    sym = [_symbol(b, f) for f in A.phi]
    for name in ("(a) 0 regular value of mu", "(b) rho injective", "(c) locally free action"):
        r.record(name, True)
    for pt in pts:
        if nh and linalg.rank([[evaluate_body(c, pt) for c in row] for row in dmu]) != nh:
            r.record("(a) 0 regular value of mu", False, [str(x) for x in pt])
        if na and linalg.rank([[evaluate_body(c, pt) for c in row] for row in rho]) != na:
            r.record("(b) rho injective", False, [str(x) for x in pt])
        if ng and linalg.rank([[evaluate_body(c, pt) for c in row] for row in sym]) != ng:
            r.record("(c) locally free action", False, [str(x) for x in pt])
    return r


@dataclass(frozen=True)
class _Pts:
    chart: object
    N: tuple


def zero_level_data(A: HamAction, seed: int = 0) -> GeometricCoisoData:
    """Coisotropic data (N, K, F, flat frame) of the zero level of the momentum map."""
    s = A.scenario
    b = s.bracket
    ch = A.chart
    m = ch.n_e
    Aidx = _zero_set_indices(A)
    K = [restrict_to_N(f, Aidx) for f in A.rho_a]
    K = [k for k in K if not k.is_zero()]
    kvecs = []
    for k in K:
        cs = section_coeffs(k)
        if not all(not any(sum(xs) for (xs, _, _), _ in c.items()) for c in cs):
            raise DataError("zero_level_data supports constant K frames only")
        kvecs.append([c.constant_term() for c in cs])
    Ks = Subspace.span(m, kvecs)
    K = [section_from_coeffs(ch, v) for v in Ks.basis]
    # F from the symbols of phi restricted to N
    C: list = []
    for f in A.phi:
        sym = [restrict_to_N(c, Aidx) for c in _symbol(b, f)]
        if any(sum(xs) for c in sym for (xs, _, _), _ in c.items()):
            raise DataError("the action must be by coordinate translations along N")
        vec = [c.constant_term() for c in sym]
        C.append(vec)
    Cidx: list = []
    if C:
        red, piv = linalg.rref(C)
        for row, pc in zip(red, piv):
            if sum(1 for v in row if v) != 1:
                raise DataError("orbit directions are not coordinate fields in this chart")
            Cidx.append(pc)
    V = QuadraticSpace(b.metric)
    Kp = orthogonal(V, Ks)
    units = [_unit(m, i) for i in range(m) if Kp.contains(_unit(m, i))]
    cands = units + [list(v) for v in Kp.basis]
    flat = []
    cur = [list(v) for v in Ks.basis]
    for v in cands:
        trial = cur + [v]
        if linalg.rank(linalg.from_columns(trial, m)) == len(trial):
            cur = trial
            flat.append(section_from_coeffs(ch, v))
    # flat sections must be phi-invariant modulo K on N
    for f in A.phi:
        for sgm in flat:
            img = restrict_to_N(poisson(b, f, sgm), Aidx)
            cs = section_coeffs(img)
            if any(sum(xs) for c in cs for (xs, _, _), _ in c.items()):
                raise DataError("phi does not preserve the constant flat frame")
            if not Ks.contains([c.constant_term() for c in cs]):
                raise DataError("phi does not preserve the constant flat frame")
    return GeometricCoisoData(b, N=Aidx, K=tuple(K), F=tuple(Cidx), flat=tuple(flat), seed=seed)


def left_central_check(s: CourantScenario) -> bool:
    """[[rho* dx^i, e^mu]] = 0 for all coordinate functions and generators."""
    b = s.bracket
    ch = s.chart
    for i in range(ch.n_x):
        dx = poisson(b, s.theta, GradedPoly.generator(ch, ("x", i)))
        for mu in range(ch.n_e):
            if not derived_bracket(s, dx, GradedPoly.generator(ch, ("e", mu))).is_zero():
                return False
    return True


def from_reduction_data(s: CourantScenario, g: LieAlgebra, psi: Sequence, mu_star: Sequence,
                        h_rep: Sequence | None = None, label: str = "") -> HamAction:
    """Hamiltonian action of the hemisemidirect product g + h built from
    reduction data (psi, mu)."""
    b = s.bracket
    ng = g.dim
    nh = len(mu_star)
    if len(psi) != ng:
        raise DataError("psi needs one section per g-basis element")
    h_rep = h_rep if h_rep is not None else trivial_rep(g, nh)
    if not left_central_check(s):
        raise DataError("rho* d(functions) is not left-central for this Courant function")
    U = [_unit(ng, i) for i in range(ng)]
    for i, j in product(range(ng), repeat=2):
        pr = poisson(b, psi[i], psi[j])
        if not pr.is_zero():
            raise DataError(f"psi has non-isotropic image: <psi_{i + 1}, psi_{j + 1}> = {pr}")
        target = GradedPoly.zero(s.chart)
        for k, c in enumerate(g.bracket(U[i], U[j])):
            if c:
                target = target + psi[k] * c
        if derived_bracket(s, psi[i], psi[j]) != target:
            raise DataError(f"psi is not bracket preserving on basis pair ({i + 1}, {j + 1})")
    for i, j in product(range(ng), range(nh)):
        lhs = GradedPoly.zero(s.chart)
        for k in range(nh):
            c = _F(h_rep[i][k][j])
            if c:
                lhs = lhs + mu_star[k] * c
        if lhs != anchor_apply(s, psi[i], mu_star[j]):
            raise DataError(f"mu is not equivariant on basis pair ({i + 1}, {j + 1})")
    c = hemisemidirect(g, h_rep, nh)
    d = courant_algebra_to_dgla(c)
    rho = [psi[i] for i in range(ng)] + [poisson(b, s.theta, f) for f in mu_star]
    phi = [poisson(b, s.theta, psi[i]) for i in range(ng)]
    return HamAction(s, d, tuple(phi), tuple(rho), tuple(mu_star), label=label)


def extended_action_check(s: CourantScenario, c: CourantAlgebraData, Psi: Sequence, mu_star: Sequence,
                          samples: int = 5, seed: int = 0) -> CheckReport:
    """Extended-action conditions for an exact Courant algebra acting on an
    exact Courant algebroid; ``mu_star`` lists mu*(h) on ``c.h_basis``."""
    b = s.bracket
    ch = s.chart
    na = c.na
    r = CheckReport()
    if s.kind not in ("standard", "twisted"):
        r.record("exact scenario", False, s.kind)
    units = [_unit(na, i) for i in range(na)]

    def Psi_of(a):
        out = GradedPoly.zero(ch)
        for x, f in zip(a, Psi):
            if x:
                out = out + f * x
        return out

    def mu_of_h(v):
        co = linalg.coordinates([list(h) for h in c.h_basis], v, na) if c.h_basis else []
        out = GradedPoly.zero(ch)
        for x, f in zip(co, mu_star):
            if x:
                out = out + f * x
        return out

    r.record("Psi bracket preserving", True)
    for i, j in product(range(na), repeat=2):
        if derived_bracket(s, Psi[i], Psi[j]) != Psi_of(c.br(units[i], units[j])):
            r.record("Psi bracket preserving", False, (i, j))
    r.record("Psi on h is rho* d mu*", True)
    for k, h in enumerate(c.h_basis):
        if Psi_of(list(h)) != poisson(b, s.theta, mu_star[k]):
            r.record("Psi on h is rho* d mu*", False, k)
    r.record("mu*([[a,a]]) = 1/2 <Psi a, Psi a>", True)
    for i, j in product(range(na), repeat=2):
        sym = _vadd(c.br(units[i], units[j]), c.br(units[j], units[i]))
        if any(c.proj(sym)):
            r.record("mu*([[a,a]]) = 1/2 <Psi a, Psi a>", False, (i, j, "symmetric part outside h"))
            continue
        if mu_of_h(sym) != poisson(b, Psi[i], Psi[j]):
            r.record("mu*([[a,a]]) = 1/2 <Psi a, Psi a>", False, (i, j))
    extra_ok = r.results["mu*([[a,a]]) = 1/2 <Psi a, Psi a>"][0]
    # isotropy of K = Psi(a) along mu^{-1}(0), at sample points
    try:
        tmp = HamAction.__new__(HamAction)
        object.__setattr__(tmp, "scenario", s)
        object.__setattr__(tmp, "mu_star", tuple(mu_star))
        Aidx = _zero_set_indices(tmp)
    except DataError as exc:
        r.record("K isotropic on mu^-1(0)", False, str(exc))
        return r
    iso = True
    for pt in sample_points(_Pts(ch, Aidx), seed=seed, count=samples):
        for i, j in product(range(na), repeat=2):
            if evaluate_body(poisson(b, Psi[i], Psi[j]), pt) != 0:
                iso = False
    symbolic_iso = all(restrict_to_N(poisson(b, Psi[i], Psi[j]), Aidx).is_zero()
                       for i, j in product(range(na), repeat=2))
    r.record("K isotropic on mu^-1(0)", iso and symbolic_iso)
    r.record("isotropy agrees with mu*([[a,a]]) condition", (iso and symbolic_iso) == extra_ok)
    return r


@dataclass
class HamReduction:
    reduction: object
    data: GeometricCoisoData
    ideal: object
    J_red: GradedPoly | None = None
    L_red: list | None = None
    exactness: tuple = ()
    reduced_exact: bool = False
    checks: dict = field(default_factory=dict)


def ham_reduce(A: HamAction, J: GradedPoly | None = None, L: Sequence | None = None,
               samples: int = 5, seed: int = 0) -> HamReduction:
    s = A.scenario
    b = s.bracket
    ch = A.chart
    checks = {
        "comoment": validate_comoment(A),
        "chain": validate_chain(A),
        "regular zero": regular_zero(A, samples=samples, seed=seed),
    }
    for name, rep in checks.items():
        if not rep.passed:
            raise ReductionError(f"{name} check fails: {rep.failed()}")
    d = zero_level_data(A, seed=seed)
    I = ideal_from_data(d)
    for f in list(A.mu_star) + list(A.rho_a) + list(A.phi):
        if not membership(f, I):
            raise ReductionError(f"momentum component {f} is not in the zero-level ideal")
    red = reduce(s, I)
    out = HamReduction(red, d, I, checks={k: v.passed for k, v in checks.items()})
    if J is not None:
        for f in A.phi:
            if not membership(poisson(b, f, J), I):
                raise ReductionError("J is not invariant under the action")
        out.J_red, rep = reduce_quadratic(s, J, d, I, reduction=red)
        out.checks.update({f"J: {k}": v for k, v in rep.items()})
    if L is not None:
        for f in A.phi:
            for l in L:
                w = restrict_to_N(poisson(b, f, l), d.N)
                if _span_rank(L, d.N, ch, [w]) != _span_rank(L, d.N, ch):
                    raise ReductionError("L is not invariant under the action")
        out.L_red = reduce_dirac(L, s, d, I, reduction=red)
    # exactness of the reduced algebroid, at the origin of N
    pt = [Fraction(0)] * ch.n_x
    xs = [GradedPoly.generator(ch, ("x", i)) for i in range(ch.n_x)]

    def rho_vec(e):
        return [evaluate_body(anchor_apply(s, e, x), pt) for x in xs]

    n = ch.n_x
    rK = Subspace.span(n, [rho_vec(k) for k in d.K])
    rKp = Subspace.span(n, [rho_vec(e) for e in d.kperp_frame])
    F = Subspace.span(n, [_unit(n, c) for c in d.F])
    out.exactness = exactness_conditions((n - len(d.N), len(d.F)), rK, rKp, F)
    rs = red.scenario
    rch = rs.chart
    pt_r = [Fraction(0)] * rch.n_x
    anchors = [[evaluate_body(anchor_apply(rs, GradedPoly.generator(rch, ("e", mu)),
                                           GradedPoly.generator(rch, ("x", i))), pt_r)
                 for i in range(rch.n_x)] for mu in range(rch.n_e)]
    onto = rch.n_x == 0 or (anchors and linalg.rank(anchors) == rch.n_x)
    out.reduced_exact = bool(onto and rch.n_e == 2 * rch.n_x and master_equation(rs))
    return out
