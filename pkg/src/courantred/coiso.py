"""Coisotropic submanifolds, reducibility, and reduction.

A coisotropic submanifold is encoded by a triangular vanishing ideal

    x^a (a in A),   e^b + corr_b (b in B),   p_c + corr_c (c in C)

in which no correction involves an eliminated generator, or geometrically
by the data (N, K, F, flat frame): N = {x^A = 0}, K spanned by degree-1
functions, F spanned by the coordinate fields d/dx^c, and lifts of a
parallel frame of K^perp/K.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from . import linalg, symbolic
from .courant import CourantScenario, anchor_apply, derived_bracket, gcs_check, master_equation
from .errors import DataError, InternalError, ReductionError, SamplingError
from .graded_algebra import Chart, DegreeError, GradedPoly, degree, evaluate_body, partial_derivative, substitute
from .poisson import BracketData, poisson
from .pseudo_linear import QuadraticSpace, Subspace, orthogonal, split_decomposition

__all__ = [
    "CoisotropicIdeal",
    "GeometricCoisoData",
    "GeometricVerdict",
    "Reduction",
    "section_coeffs",
    "section_from_coeffs",
    "restrict_to_N",
    "sample_points",
    "ideal_from_data",
    "normal_form",
    "membership",
    "is_coisotropic",
    "in_normalizer",
    "reducible_symbolic",
    "reducible_geometric",
    "reduce",
    "reduce_quadratic",
    "clean_intersection",
    "reduce_dirac",
    "totdim",
]


# ---------------------------------------------------------------------------
# sections as coefficient vectors


def section_coeffs(f: GradedPoly) -> list:
    """Body-function coefficients of a degree-1 function, one per e-generator."""
    ch = f.chart
    out = [dict() for _ in range(ch.n_e)]
    zero_p = tuple([0] * ch.n_p)
    for (xs, mask, ps), c in f.items():
        if len(mask) != 1 or any(ps):
            raise DegreeError("expected a degree-1 function")
        out[mask[0]][(xs, (), zero_p)] = c
    return [GradedPoly(ch, t) for t in out]


def section_from_coeffs(chart: Chart, coeffs: Sequence) -> GradedPoly:
    out = GradedPoly.zero(chart)
    for mu, c in enumerate(coeffs):
        if isinstance(c, GradedPoly):
            if not c.is_zero():
                out = out + c * GradedPoly.generator(chart, ("e", mu))
        elif c:
            out = out + GradedPoly.generator(chart, ("e", mu)) * Fraction(c)
    return out


def _const_vector(coeffs) -> list | None:
    out = []
    for c in coeffs:
        if not symbolic.is_constant(c):
            return None
        out.append(c.constant_term())
    return out


def restrict_to_N(f: GradedPoly, A: Sequence) -> GradedPoly:
    if not A:
        return f
    return substitute(f, {("x", a): GradedPoly.zero(f.chart) for a in A})


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True)
class CoisotropicIdeal:
    bracket: BracketData
    A: tuple = ()
    g1: tuple = ()  # ((b, generator), ...) with generator = e^b + correction
    g2: tuple = ()  # ((c, generator), ...) with generator = p_c + correction
    data: "GeometricCoisoData | None" = field(default=None, compare=False)

    @property
    def chart(self) -> Chart:
        return self.bracket.chart

    @property
    def B(self) -> tuple:
        return tuple(b for b, _ in self.g1)

    @property
    def C(self) -> tuple:
        return tuple(c for c, _ in self.g2)

    def generators(self) -> list:
        ch = self.chart
        return ([GradedPoly.generator(ch, ("x", a)) for a in self.A]
                + [g for _, g in self.g1] + [g for _, g in self.g2])

    @classmethod
    def from_generators(cls, bracket: BracketData, gens: Sequence, data=None) -> "CoisotropicIdeal":
        """Triangularize homogeneous generators of degrees 0, 1, 2.

        Degree-0 generators must be single coordinates x^a (up to a nonzero
        constant); degree-1 and degree-2 generators must admit pivots with
        constant coefficients after restriction to N.
        """
        ch = bracket.chart
        zero = GradedPoly.zero(ch)
        A: list = []
        deg1: list = []
        deg2: list = []
        for g in gens:
            if g.chart != ch:
                raise DataError("generator lives on a different chart")
            if g.is_zero():
                continue
            d = degree(g)
            if d == 0:
                items = list(g.items())
                (xs, mask, ps), _ = items[0]
                if len(items) != 1 or sum(xs) != 1 or mask or any(ps):
                    raise DataError(f"degree-0 generator {g} is not a coordinate x^a")
                a = xs.index(1)
                if a not in A:
                    A.append(a)
            elif d == 1:
                deg1.append(g)
            elif d == 2:
                deg2.append(g)
            else:
                raise DataError(f"generator {g} has unsupported degree {d}")
        A.sort()
        # degree 1: rows of coefficients, restricted to N
        rows = [[restrict_to_N(c, A) for c in section_coeffs(g)] for g in deg1]
        piv1 = _triangularize(rows, ch.n_e, "degree-1")
        g1 = tuple((b, section_from_coeffs(ch, row)) for b, row in piv1)
        e_sub = {("e", b): GradedPoly.generator(ch, ("e", b)) - gen for b, gen in g1}
        # degree 2: linear in p plus quadratic in e
        rows2 = []
        for g in deg2:
            g = restrict_to_N(substitute(g, e_sub) if e_sub else g, A)
            p_part = [partial_derivative(g, ("p", j)) for j in range(ch.n_p)]
            rest = g - sum((c * GradedPoly.generator(ch, ("p", j)) for j, c in enumerate(p_part)), zero)
            rows2.append((p_part, rest))
        g2 = []
        done: list = []
        for p_part, rest in rows2:
            for c, (pp, rr) in done:
                f = p_part[c]
                if not f.is_zero():
                    p_part = [a - f * b for a, b in zip(p_part, pp)]
                    rest = rest - f * rr
            pc = next((j for j, f in enumerate(p_part) if symbolic.is_constant(f) and not f.is_zero()), None)
            if pc is None:
                if all(f.is_zero() for f in p_part) and rest.is_zero():
                    continue
                raise DataError("degree-2 generator has no p-pivot with constant coefficient")
            inv = 1 / p_part[pc].constant_term()
            p_part = [f * inv for f in p_part]
            rest = rest * inv
            for k, (c, (pp, rr)) in enumerate(done):
                f = pp[pc]
                if not f.is_zero():
                    done[k] = (c, ([a - f * b for a, b in zip(pp, p_part)], rr - f * rest))
            done.append((pc, (p_part, rest)))
        for c, (pp, rr) in sorted(done):
            g2.append((c, sum((f * GradedPoly.generator(ch, ("p", j)) for j, f in enumerate(pp)), zero) + rr))
        return cls(bracket, tuple(A), g1, tuple(g2), data)

    def describe(self) -> list:
        return [str(g) for g in self.generators()]


def _triangularize(rows, n, what):
    done: list = []  # (pivot, row)
    for row in rows:
        row = list(row)
        for c, prow in done:
            f = row[c]
            if not f.is_zero():
                row = [a - f * b for a, b in zip(row, prow)]
        if all(f.is_zero() for f in row):
            continue
        pc = next((j for j, f in enumerate(row) if symbolic.is_constant(f) and not f.is_zero()), None)
        if pc is None:
            raise DataError(f"{what} generators are not triangularizable (no constant pivot)")
        inv = 1 / row[pc].constant_term()
        row = [f * inv for f in row]
        for k, (c, prow) in enumerate(done):
            f = prow[pc]
            if not f.is_zero():
                done[k] = (c, [a - f * b for a, b in zip(prow, row)])
        done.append((pc, row))
    return sorted(done, key=lambda t: t[0])


def normal_form(f: GradedPoly, I: CoisotropicIdeal) -> GradedPoly:
    ch = I.chart
    if I.g2:
        sub = {("p", c): GradedPoly.generator(ch, ("p", c)) - g for c, g in I.g2}
        f = substitute(f, sub)
    if I.g1:
        sub = {("e", b): GradedPoly.generator(ch, ("e", b)) - g for b, g in I.g1}
        f = substitute(f, sub)
    return restrict_to_N(f, I.A)


def membership(f: GradedPoly, I: CoisotropicIdeal) -> bool:
    return normal_form(f, I).is_zero()


def is_coisotropic(I: CoisotropicIdeal) -> bool:
    gens = I.generators()
    for i, a in enumerate(gens):
        for b in gens[i:]:
            if not membership(poisson(I.bracket, a, b), I):
                return False
    return True


def in_normalizer(f: GradedPoly, I: CoisotropicIdeal) -> bool:
    return all(membership(poisson(I.bracket, f, g), I) for g in I.generators())


def reducible_symbolic(s: CourantScenario, I: CoisotropicIdeal) -> bool:
    return in_normalizer(s.theta, I)


def totdim(I: CoisotropicIdeal) -> int:
    """Total dimension of the graded submanifold cut out by I."""
    n_x, n_e, n_p = I.chart.dims()
    return (n_x - len(I.A)) + (n_e - len(I.g1)) + (n_p - len(I.g2))


# ---------------------------------------------------------------------------
# geometric data


@dataclass(frozen=True)
class GeometricCoisoData:
    bracket: BracketData
    N: tuple = ()  # A: N = {x^a = 0}
    K: tuple = ()  # degree-1 functions spanning K
    F: tuple = ()  # C: F = span(d/dx^c)
    flat: tuple = ()  # lifts of a parallel frame of K^perp/K
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "N", tuple(sorted(self.N)))
        object.__setattr__(self, "F", tuple(sorted(self.F)))
        object.__setattr__(self, "K", tuple(self.K))
        object.__setattr__(self, "flat", tuple(self.flat))
        _validate_data(self)

    @property
    def chart(self) -> Chart:
        return self.bracket.chart

    @property
    def kperp_frame(self) -> tuple:
        return self.K + self.flat

    def is_constant(self) -> bool:
        return all(_const_vector(section_coeffs(f)) is not None for f in self.kperp_frame)


def _validate_data(d: GeometricCoisoData):
    ch = d.chart
    b = d.bracket
    n = ch.n_x
    for idx in d.N + d.F:
        if not 0 <= idx < n:
            raise DataError(f"coordinate index {idx} out of range")
    if set(d.N) & set(d.F):
        raise DataError("F must be tangent to N (index sets A and C must be disjoint)")
    for f in d.kperp_frame:
        if f.chart != ch:
            raise DataError("frame element lives on a different chart")
        if f.is_zero() or degree(f) != 1:
            raise DataError(f"frame element {f} is not a nonzero degree-1 function")
    A = d.N
    for i, k in enumerate(d.K):
        for k2 in d.K[i:]:
            if not restrict_to_N(poisson(b, k, k2), A).is_zero():
                raise DataError(f"K is not isotropic: <{k}, {k2}> does not vanish on N")
    for s in d.flat:
        for k in d.K:
            if not restrict_to_N(poisson(b, s, k), A).is_zero():
                raise DataError(f"flat lift {s} is not orthogonal to K on N")
    nk, nf = len(d.K), len(d.flat)
    if 2 * nk + nf != ch.n_e:
        raise DataError(f"flat frame must have {ch.n_e - 2 * nk} elements, got {nf}")
    rows = [[restrict_to_N(c, A) for c in section_coeffs(f)] for f in d.kperp_frame]
    if rows and symbolic.rank(rows, ch) != nk + nf:
        raise DataError("K and the flat frame are not independent on N")
    gram = [[restrict_to_N(poisson(b, s, t), A) for t in d.flat] for s in d.flat]
    for row in gram:
        for g in row:
            if any(g.depends_on(("x", c)) for c in d.F):
                raise DataError("the pairing of flat lifts is not constant along F")
    if gram and symbolic.rank(gram, ch) != nf:
        raise DataError("flat lifts do not span a nondegenerate quotient")
    for pt in sample_points(d, seed=d.seed):
        vecs = [[evaluate_body(c, pt) for c in row] for row in rows]
        if vecs and linalg.rank(vecs) != nk + nf:
            raise SamplingError(f"frame drops rank at sample point {pt}")
        kv = vecs[:nk]
        if kv and linalg.rank(kv) != nk:
            raise SamplingError(f"K drops rank at sample point {pt}")


def sample_points(d, seed: int = 0, count: int = 5) -> list:
    """Origin, unit points and ``count`` seeded random points on N."""
    ch = d.chart if hasattr(d, "chart") else d
    A = set(d.N) if hasattr(d, "N") else set()
    n = ch.n_x
    pts = [[Fraction(0)] * n]
    for i in range(n):
        if i not in A:
            p = [Fraction(0)] * n
            p[i] = Fraction(1)
            pts.append(p)
    rng = random.Random(seed)
    for _ in range(count):
        pts.append([Fraction(0) if i in A else Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for i in range(n)])
    return pts


def ideal_from_data(d: GeometricCoisoData) -> CoisotropicIdeal:
    b = d.bracket
    ch = d.chart
    gens = [GradedPoly.generator(ch, ("x", a)) for a in d.N]
    gens += list(d.K)
    constant = d.is_constant()
    for c in d.F:
        pc = GradedPoly.generator(ch, ("p", c))
        if constant:
            gens.append(pc)
        else:
            gens.append(pc + _connection_correction(d, c))
    I = CoisotropicIdeal.from_generators(b, gens, data=d)
    if not is_coisotropic(I):
        raise DataError("the data do not define a coisotropic ideal")
    return I


def _connection_correction(d: GeometricCoisoData, c: int) -> GradedPoly:
    """Quadratic q with {p_c + q, s} in K on N for every s in the K^perp frame."""
    b = d.bracket
    ch = d.chart
    m = ch.n_e
    e = [GradedPoly.generator(ch, ("e", i)) for i in range(m)]
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    pc = GradedPoly.generator(ch, ("p", c))
    frame = d.kperp_frame
    rows, rhs = [], []
    for s in frame:
        ds = poisson(b, pc, s)
        acts = [poisson(b, e[i] * e[j], s) for i, j in pairs]
        for t in frame:
            rows.append([restrict_to_N(poisson(b, a, t), d.N) for a in acts])
            rhs.append(-restrict_to_N(poisson(b, ds, t), d.N))
    sol = symbolic.solve_polynomial(rows, rhs, ch)
    if sol is None:
        raise DataError(f"no polynomial connection term for d/dx^{c + 1}; frames not triangularizable")
    q = GradedPoly.zero(ch)
    for (i, j), a in zip(pairs, sol):
        if not a.is_zero():
            q = q + a * e[i] * e[j]
    return q


# ---------------------------------------------------------------------------
# reducibility in geometric terms


@dataclass
class GeometricVerdict:
    r1: bool
    r2: bool
    r3: bool
    r4: bool
    witnesses: dict = field(default_factory=dict)

    def as_tuple(self) -> tuple:
        return (self.r1, self.r2, self.r3, self.r4)

    @property
    def all(self) -> bool:
        return all(self.as_tuple())


def reducible_geometric(s: CourantScenario, d: GeometricCoisoData) -> GeometricVerdict:
    """(R1) rho(K^perp) tangent to N; (R2) rho(K) in F; (R3) anchors of flat
    sections are F-projectable; (R4) flat sections close under the bracket."""
    ch = s.chart
    if d.chart != ch:
        raise DataError("data and scenario live on different charts")
    A, C = d.N, d.F
    notC = [i for i in range(ch.n_x) if i not in C]
    xs = [GradedPoly.generator(ch, ("x", i)) for i in range(ch.n_x)]
    wit: dict = {}

    def anchor(e, i):
        return restrict_to_N(anchor_apply(s, e, xs[i]), A)

    r1 = True
    for e in d.kperp_frame:
        for a in A:
            v = anchor(e, a)
            if not v.is_zero():
                r1 = False
                wit.setdefault("R1", (str(e), ch.x_names[a], str(v)))
    r2 = True
    for k in d.K:
        for i in notC:
            v = anchor(k, i)
            if not v.is_zero():
                r2 = False
                wit.setdefault("R2", (str(k), ch.x_names[i], str(v)))
    r3 = True
    for e in d.kperp_frame:
        for i in notC:
            v = anchor(e, i)
            for c in C:
                dv = partial_derivative(v, ("x", c))
                if not dv.is_zero():
                    r3 = False
                    wit.setdefault("R3", (str(e), ch.x_names[i], ch.x_names[c], str(dv)))
    gens = list(d.kperp_frame)
    for a in A:
        for mu in range(ch.n_e):
            gens.append(xs[a] * GradedPoly.generator(ch, ("e", mu)))
    r4 = True
    for e1, e2 in product(gens, repeat=2):
        w = derived_bracket(s, e1, e2)
        bad = _flat_membership_failure(s.bracket, d, w)
        if bad is not None:
            r4 = False
            wit.setdefault("R4", (str(e1), str(e2), bad))
            break
    return GeometricVerdict(r1, r2, r3, r4, wit)


def _flat_membership_failure(b: BracketData, d: GeometricCoisoData, w: GradedPoly):
    A = d.N
    for k in d.K:
        v = restrict_to_N(poisson(b, w, k), A)
        if not v.is_zero():
            return f"<w, {k}> = {v} on N"
    for sj in d.flat:
        v = restrict_to_N(poisson(b, w, sj), A)
        for c in d.F:
            dv = partial_derivative(v, ("x", c))
            if not dv.is_zero():
                return f"d/d{d.chart.x_names[c]} <w, {sj}> = {dv} on N"
    return None


# ---------------------------------------------------------------------------
# reduction


@dataclass
class Reduction:
    """Result of a reduction plus the map sending reducible functions to the
    reduced chart."""

    scenario: CourantScenario
    ideal: CoisotropicIdeal
    kept_x: tuple
    r_vectors: tuple
    t_vectors: tuple
    _inter: Chart = None
    _emap: dict = None

    def to_intermediate(self, f: GradedPoly) -> GradedPoly:
        nf = normal_form(f, self.ideal)
        return substitute(nf, self._emap, target=self._inter)

    def project(self, f: GradedPoly) -> GradedPoly:
        """Image in the reduced chart of a function that descends."""
        g = self.to_intermediate(f)
        return self._finish(g, str(f))

    def _finish(self, g: GradedPoly, label: str) -> GradedPoly:
        inter = self._inter
        I = self.ideal
        nr = len(self.r_vectors)
        for (xs, mask, ps), _ in g.items():
            if any(i >= nr for i in mask):
                raise ReductionError(f"{label} does not descend: depends on directions transverse to K^perp")
            for c in I.C:
                if xs[c]:
                    raise ReductionError(f"{label} does not descend: depends on {inter.x_names[c]} along F")
            for a in I.A + I.C:
                if ps[a]:
                    raise ReductionError(f"{label} does not descend: depends on {inter.p_names[a]}")
        return substitute(g, {}, target=self.scenario.chart)


def _unit(n, i):
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return v


def reduce(s: CourantScenario, I: CoisotropicIdeal, check: bool = True) -> Reduction:
    """Coisotropic reduction of a Courant function by an ideal with constant frames."""
    ch = s.chart
    b = s.bracket
    if I.chart != ch:
        raise DataError("ideal and scenario live on different charts")
    if check and not is_coisotropic(I):
        raise ReductionError("the ideal is not coisotropic")
    if not reducible_symbolic(s, I):
        raise ReductionError("Theta is not in the normalizer of the ideal")
    m = ch.n_e
    V = QuadraticSpace(b.metric)
    kvecs = []
    for _, g in I.g1:
        v = _const_vector(section_coeffs(g))
        if v is None:
            raise ReductionError("reduction requires K with constant coefficients")
        kvecs.append(v)
    for c, g in I.g2:
        corr = g - GradedPoly.generator(ch, ("p", c))
        if any(sum(xs) for (xs, mask, ps), _ in corr.items()):
            raise ReductionError("reduction requires a connection with constant coefficients")
    K = Subspace(m, tuple(map(tuple, kvecs)))
    Kp = orthogonal(V, K)
    if I.data is not None and I.data.flat:
        rvecs = []
        for f in I.data.flat:
            v = _const_vector([restrict_to_N(c, I.A) for c in section_coeffs(f)])
            if v is None:
                raise ReductionError("reduction requires flat lifts with constant coefficients")
            rvecs.append(v)
    else:
        units = [_unit(m, i) for i in range(m) if Kp.contains(_unit(m, i))]
        rvecs = _complement(K.basis, units + [list(v) for v in Kp.basis], m)
    tvecs = [list(v) for v in split_decomposition(V, K).T.basis]
    basis = [list(v) for v in rvecs] + [list(v) for v in K.basis] + tvecs
    if linalg.rank(linalg.from_columns(basis, m)) != m:
        raise ReductionError("flat lifts do not complement K in K^perp")
    # e^mu = sum_j (B^{-1})_{j mu} E_j for the adapted basis E_j
    Binv = linalg.inverse(linalg.from_columns(basis, m))
    nr, nk = len(rvecs), len(K.basis)
    r_names = []
    for j, v in enumerate(rvecs):
        hit = [i for i in range(m) if v[i] != 0]
        if len(hit) == 1 and v[hit[0]] == 1:
            r_names.append(ch.e_names[hit[0]])
        else:
            r_names.append(f"r{j + 1}")
    if len(set(r_names)) != len(r_names):
        r_names = [f"r{j + 1}" for j in range(nr)]
    t_names = [f"_t{j + 1}" for j in range(len(tvecs))]
    inter = Chart(ch.n_x, nr + len(tvecs), ch.n_p, ch.x_names, tuple(r_names + t_names), ch.p_names)
    emap = {}
    for mu in range(m):
        img = GradedPoly.zero(inter)
        for j in range(m):
            cf = Binv[j][mu]
            if cf == 0 or nr <= j < nr + nk:
                continue
            jj = j if j < nr else j - nk
            img = img + GradedPoly.generator(inter, ("e", jj)) * cf
        emap[("e", mu)] = img
    kept = tuple(i for i in range(ch.n_x) if i not in I.A and i not in I.C)
    red_chart = Chart(
        len(kept), nr, len(kept),
        x_names=tuple(ch.x_names[i] for i in kept),
        e_names=tuple(r_names),
        p_names=tuple(ch.p_names[i] for i in kept),
    )
    gram = [[V.pair(u, v) for v in rvecs] for u in rvecs]
    try:
        red_bracket = BracketData(red_chart, gram)
    except ValueError as exc:
        raise ReductionError(f"reduced pairing is degenerate: {exc}") from None
    red = Reduction(None, I, kept, tuple(map(tuple, rvecs)), tuple(map(tuple, tvecs)), inter, emap)
    # the reduced scenario is filled in after Theta is projected
    red.scenario = CourantScenario(red_bracket, GradedPoly.zero(red_chart), label="", kind="reduced")
    theta_red = red.project(s.theta)
    kind = s.kind if s.kind in ("standard", "twisted") and nr == 2 * len(kept) else "reduced"
    red.scenario = CourantScenario(red_bracket, theta_red, label=f"{s.label} reduced".strip(), kind=kind)
    if not master_equation(red.scenario):
        raise InternalError("reduced Courant function violates the master equation")
    return red


def _complement(sub_basis, candidates, n) -> list:
    out = []
    cur = [list(v) for v in sub_basis]
    for v in candidates:
        trial = cur + [list(v)]
        if linalg.rank(linalg.from_columns(trial, n)) == len(trial):
            cur = trial
            out.append(list(v))
    return out


def reduce_quadratic(s: CourantScenario, J: GradedPoly, d: GeometricCoisoData | None,
                     I: CoisotropicIdeal, reduction: Reduction | None = None) -> tuple:
    """Reduce a generalized complex structure; returns (J_red, report)."""
    if not gcs_check(s, J):
        raise ReductionError("J is not a generalized complex structure")
    report = {}
    ch = s.chart
    b = s.bracket
    report["J(K) in K"] = all(membership(poisson(b, J, g), I) for _, g in I.g1)
    report["nabla J = 0"] = all(membership(poisson(b, g, J), I) for _, g in I.g2)
    report["normalizer"] = in_normalizer(J, I)
    if not report["normalizer"]:
        raise ReductionError("J is not in the normalizer of the ideal")
    red = reduction or reduce(s, I)
    J_red = red.project(J)
    if not gcs_check(red.scenario, J_red):
        raise InternalError("reduced J fails the generalized complex test")
    return J_red, report


def _span_rank(frame, A, chart, extra=()):
    rows = [[restrict_to_N(c, A) for c in section_coeffs(f)] for f in list(frame) + list(extra)]
    return symbolic.rank(rows, chart) if rows else 0


def _l_cap_kperp(L_frame, d: GeometricCoisoData) -> list:
    """Polynomial frame of L cap K^perp over N, as degree-1 functions."""
    b = d.bracket
    ch = d.chart
    if not d.K:
        return [restrict_to_N(l, d.N) for l in L_frame]
    Q = [[restrict_to_N(poisson(b, l, k), d.N) for l in L_frame] for k in d.K]
    ns = symbolic.nullspace(Q, ch, len(L_frame))
    out = []
    for coeffs in ns:
        f = GradedPoly.zero(ch)
        for c, l in zip(coeffs, L_frame):
            if not c.is_zero():
                f = f + c * l
        out.append(restrict_to_N(f, d.N))
    return out


def clean_intersection(L_frame: Sequence, d: GeometricCoisoData, samples: Sequence | None = None,
                       I: CoisotropicIdeal | None = None) -> bool:
    """(i) K cap L has constant rank on samples of N; (ii) L_quot is parallel."""
    ch = d.chart
    b = d.bracket
    m = ch.n_e
    samples = samples if samples is not None else sample_points(d, seed=d.seed)
    V = QuadraticSpace(b.metric)
    ranks = set()
    for pt in samples:
        Lv = [[evaluate_body(c, pt) for c in section_coeffs(l)] for l in L_frame]
        Kv = [[evaluate_body(c, pt) for c in section_coeffs(k)] for k in d.K]
        Ls = Subspace.span(m, Lv)
        if Ls.dim * 2 != m or any(V.pair(u, v) != 0 for u in Ls.basis for v in Ls.basis):
            raise DataError(f"L is not lagrangian at sample point {pt}")
        ranks.add(Ls.intersect(Subspace.span(m, Kv)).dim if Kv else 0)
    if len(ranks) > 1:
        return False
    if not d.K:
        return True
    I = I or ideal_from_data(d)
    sigma = _l_cap_kperp(L_frame, d)
    base = _span_rank(L_frame, d.N, ch, d.K)
    for _, g in I.g2:
        for sg in sigma:
            w = poisson(b, g, sg)
            if _span_rank(L_frame, d.N, ch, list(d.K) + [w]) != base:
                return False
    return True


def reduce_dirac(L_frame: Sequence, s: CourantScenario, d: GeometricCoisoData,
                 I: CoisotropicIdeal | None = None, reduction: Reduction | None = None) -> list:
    """Frame of the reduced Dirac structure, in canonical echelon form."""
    ch = s.chart
    I = I or ideal_from_data(d)
    verdict = reducible_geometric(s, d)
    if not verdict.all:
        raise ReductionError(f"data not reducible: {verdict.witnesses}")
    if not clean_intersection(L_frame, d, I=I):
        raise ReductionError("K and L do not intersect cleanly")
    base = _span_rank(L_frame, d.N, ch)
    for l1, l2 in product(L_frame, repeat=2):
        w = derived_bracket(s, l1, l2)
        if _span_rank(L_frame, d.N, ch, [w]) != base:
            raise ReductionError(f"L is not involutive: [[{l1}, {l2}]] leaves L")
    red = reduction or reduce(s, I)
    inter = red._inter
    nr = len(red.r_vectors)
    rows = []
    for sg in _l_cap_kperp(L_frame, d):
        g = red.to_intermediate(sg)
        coeffs = section_coeffs(g)
        if any(not c.is_zero() for c in coeffs[nr:]):
            raise InternalError("a section of K^perp has a transverse component")
        rows.append(coeffs[:nr])
    ech = symbolic.rref_rows(rows, inter) if rows else []
    syms = symbolic.body_symbols(inter)
    red_chart = red.scenario.chart
    frame = []
    for row in ech:
        polys = []
        for v in row:
            try:
                polys.append(symbolic.from_sympy(v, inter, syms))
            except ValueError:
                raise ReductionError("reduced Dirac frame is not polynomial") from None
        f = section_from_coeffs(inter, polys)
        frame.append(red._finish(f, "reduced Dirac frame"))
    rs = red.scenario
    if 2 * len(frame) != red_chart.n_e:
        raise InternalError("reduced Dirac frame has the wrong rank")
    for i, a in enumerate(frame):
        for bb in frame[i:]:
            if not poisson(rs.bracket, a, bb).is_zero():
                raise InternalError("reduced Dirac frame is not isotropic")
    rb = _span_rank(frame, (), red_chart)
    for a, bb in product(frame, repeat=2):
        if _span_rank(frame, (), red_chart, [derived_bracket(rs, a, bb)]) != rb:
            raise InternalError("reduced Dirac frame is not involutive")
    return frame
