"""Courant functions, derived brackets, and the standard constructions.

Sections of the pseudo-euclidean bundle are degree-1 functions; a section
``s`` is identified with the function ``<s, .>``. In a standard chart on
``TM + T*M`` the coordinate field ``d/dx^i`` is therefore the function
``xi_i`` and the form ``dx^i`` is ``v^i``, with ``{v^i, xi_j} = delta_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Mapping, Sequence

from . import linalg
from .errors import InternalError
from .graded_algebra import Chart, DegreeError, GradedPoly, degree
from .poisson import BracketData, exp_adjoint, poisson

__all__ = [
    "CourantScenario",
    "AxiomReport",
    "B_FIELD_SIGN",
    "standard_chart",
    "hyperbolic_metric",
    "standard_theta",
    "twisted_theta",
    "theta_from_lie_algebroid",
    "master_equation",
    "master_residual",
    "anchor_apply",
    "anchor_components",
    "derived_bracket",
    "pairing",
    "verify_axioms",
    "bfield_on_theta",
    "is_quadratic",
    "quadratic_from_endomorphism",
    "endomorphism_of",
    "apply_quadratic",
    "gc_from_symplectic",
    "gc_from_complex",
    "graph_of_two_form",
    "graph_of_bivector",
    "gcs_report",
    "gcs_check",
]

# exp(ad_B) maps Theta_chi to Theta_{chi + B_FIELD_SIGN * dB}; fixed by the
# committed expansion in tests/test_courant.py.
B_FIELD_SIGN = -1


@dataclass(frozen=True)
class CourantScenario:
    bracket: BracketData
    theta: GradedPoly
    label: str = ""
    kind: str = "explicit"

    def __post_init__(self):
        if self.theta.chart != self.bracket.chart:
            raise ValueError("theta lives on a different chart")
        if not self.theta.is_zero() and degree(self.theta) != 3:
            raise DegreeError("a Courant function must have degree 3")

    @property
    def chart(self) -> Chart:
        return self.bracket.chart

    def gen(self, name: str) -> GradedPoly:
        return GradedPoly.generator(self.chart, name)


@dataclass
class AxiomReport:
    results: dict = field(default_factory=dict)  # axiom -> (passed, witness or None)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.results.values())

    def failed(self) -> list:
        return [k for k, (ok, _) in self.results.items() if not ok]


# ---------------------------------------------------------------------------
# charts and standard functions


def hyperbolic_metric(n: int) -> list:
    g = linalg.zeros(2 * n, 2 * n)
    for i in range(n):
        g[i][n + i] = Fraction(1)
        g[n + i][i] = Fraction(1)
    return g


def standard_chart(n: int, e_prefix=("v", "xi")) -> Chart:
    return Chart(
        n, 2 * n, n,
        x_names=tuple(f"x{i + 1}" for i in range(n)),
        e_names=tuple(f"{e_prefix[0]}{i + 1}" for i in range(n)) + tuple(f"{e_prefix[1]}{i + 1}" for i in range(n)),
        p_names=tuple(f"p{i + 1}" for i in range(n)),
    )


def _standard_bracket(n: int) -> BracketData:
    return BracketData(standard_chart(n), hyperbolic_metric(n))


def _v(chart, i):
    return GradedPoly.generator(chart, ("e", i))


def _xi(chart, i):
    return GradedPoly.generator(chart, ("e", chart.n_x + i))


def standard_theta(n: int) -> CourantScenario:
    b = _standard_bracket(n)
    ch = b.chart
    theta = GradedPoly.zero(ch)
    for i in range(n):
        theta = theta + _v(ch, i) * GradedPoly.generator(ch, ("p", i))
    return CourantScenario(b, theta, label=f"standard R^{n}", kind="standard")


def _coerce_coeff(chart, c):
    if isinstance(c, GradedPoly):
        if c.chart != chart:
            raise ValueError("coefficient on a different chart")
        if not c.is_zero() and degree(c) != 0:
            raise DegreeError("coefficients must be functions on the body")
        return c
    if isinstance(c, str):
        from .parsing import parse_expr

        return _coerce_coeff(chart, parse_expr(c, chart))
    return GradedPoly.const(chart, Fraction(c))


def twisted_theta(n: int, chi: Mapping) -> CourantScenario:
    """``v^i p_i + 1/6 chi_ijk v^i v^j v^k``.

    ``chi`` maps index triples (0-based) to coefficient functions. Triples
    with distinct sorted indices may be given alone; when several orderings
    of a triple are supplied they must be consistent with total
    antisymmetry.
    """
    base = standard_theta(n)
    ch = base.chart
    comps: dict = {}
    for key, c in chi.items():
        i, j, k = key
        if len({i, j, k}) < 3:
            if not _coerce_coeff(ch, c).is_zero():
                raise ValueError(f"chi{key} must vanish: chi is alternating")
            continue
        srt = tuple(sorted(key))
        sign = _perm_sign(key, srt)
        val = _coerce_coeff(ch, c) * sign
        if srt in comps and comps[srt] != val:
            raise ValueError(f"chi is not totally antisymmetric at {srt}")
        comps[srt] = val
    theta = base.theta
    for (i, j, k), c in sorted(comps.items()):
        theta = theta + c * _v(ch, i) * _v(ch, j) * _v(ch, k)
    return CourantScenario(base.bracket, theta, label=f"twisted R^{n}", kind="twisted")


def _perm_sign(seq, target) -> int:
    seq = list(seq)
    sign = 1
    for pos, t in enumerate(target):
        j = seq.index(t, pos)
        if j != pos:
            seq[pos], seq[j] = seq[j], seq[pos]
            sign = -sign
    return sign


def theta_from_lie_algebroid(anchor: Sequence, structure: Sequence, n: int | None = None,
                             label: str = "Lie algebroid double") -> CourantScenario:
    """Courant function of the double ``A + A*`` of a Lie algebroid.

    ``anchor[i][a]`` is rho^i_a(x) (n rows, r columns); ``structure[c][a][b]``
    is c^c_ab(x). Entries are rationals, expression strings, or
    GradedPolys on the double's chart. Produces
    ``rho^i_a v^a p_i - 1/2 c^c_ab v^a v^b xi_c``.
    """
    r = len(structure)
    if n is None:
        n = len(anchor)
    if len(anchor) != n or any(len(row) != r for row in anchor):
        raise ValueError("anchor must be an n x r array")
    if any(len(plane) != r or any(len(row) != r for row in plane) for plane in structure):
        raise ValueError("structure constants must be r x r x r")
    chart = Chart(
        n, 2 * r, n,
        x_names=tuple(f"x{i + 1}" for i in range(n)),
        e_names=tuple(f"v{a + 1}" for a in range(r)) + tuple(f"xi{a + 1}" for a in range(r)),
        p_names=tuple(f"p{i + 1}" for i in range(n)),
    )
    b = BracketData(chart, hyperbolic_metric(r))
    v = [GradedPoly.generator(chart, ("e", a)) for a in range(r)]
    xi = [GradedPoly.generator(chart, ("e", r + a)) for a in range(r)]
    p = [GradedPoly.generator(chart, ("p", i)) for i in range(n)]
    theta = GradedPoly.zero(chart)
    for i in range(n):
        for a in range(r):
            c = _coerce_coeff(chart, anchor[i][a])
            if not c.is_zero():
                theta = theta + c * v[a] * p[i]
    for cc in range(r):
        for a in range(r):
            for bb in range(a, r):
                cab = _coerce_coeff(chart, structure[cc][a][bb])
                cba = _coerce_coeff(chart, structure[cc][bb][a])
                if not (cab + cba).is_zero():
                    raise ValueError(f"structure constants not antisymmetric at c^{cc}_({a},{bb})")
                # the (a, b) and (b, a) halves coincide
                if a != bb and not cab.is_zero():
                    theta = theta - cab * (v[a] * v[bb] * xi[cc])
    return CourantScenario(b, theta, label=label, kind="algebroid")


# ---------------------------------------------------------------------------
# derived structure


def master_residual(s: CourantScenario) -> GradedPoly:
    return poisson(s.bracket, s.theta, s.theta)


def master_equation(s: CourantScenario) -> bool:
    return master_residual(s).is_zero()


def _need(f: GradedPoly, d: int, what: str):
    if not f.is_zero() and degree(f) != d:
        raise DegreeError(f"{what} must have degree {d}")


def anchor_apply(s: CourantScenario, e: GradedPoly, f: GradedPoly) -> GradedPoly:
    """Lie derivative of ``f`` along the anchor of ``e``: {{Theta, e}, f}."""
    _need(e, 1, "section")
    _need(f, 0, "function")
    return poisson(s.bracket, poisson(s.bracket, s.theta, e), f)


def anchor_components(s: CourantScenario, e: GradedPoly) -> list:
    """Components rho(e)(x^i) of the anchored vector field."""
    ch = s.chart
    inner = poisson(s.bracket, s.theta, e)
    return [poisson(s.bracket, inner, GradedPoly.generator(ch, ("x", i))) for i in range(ch.n_x)]


def derived_bracket(s: CourantScenario, e1: GradedPoly, e2: GradedPoly) -> GradedPoly:
    _need(e1, 1, "section")
    _need(e2, 1, "section")
    return poisson(s.bracket, poisson(s.bracket, s.theta, e1), e2)


def pairing(s: CourantScenario, e1: GradedPoly, e2: GradedPoly) -> GradedPoly:
    return poisson(s.bracket, e1, e2)


def verify_axioms(s: CourantScenario, sections: Sequence, functions: Sequence) -> AxiomReport:
    """Exact check of the five Courant axioms on all sample combinations."""
    br = lambda a, b: derived_bracket(s, a, b)  # noqa: E731
    rho = lambda e, f: anchor_apply(s, e, f)  # noqa: E731
    pr = lambda a, b: pairing(s, a, b)  # noqa: E731
    half = Fraction(1, 2)
    report = AxiomReport()
    secs = list(sections)
    funs = list(functions)
    probes = funs + [GradedPoly.generator(s.chart, ("x", i)) for i in range(s.chart.n_x)]

    def first(pred, combos):
        for combo in combos:
            if not pred(*combo):
                return False, tuple(str(c) for c in combo)
        return True, None

    report.results["C1"] = first(
        lambda a, b, c: br(a, br(b, c)) == br(br(a, b), c) + br(b, br(a, c)),
        product(secs, repeat=3),
    )
    report.results["C2"] = first(
        lambda a, b, f: br(a, f * b) == f * br(a, b) + rho(a, f) * b,
        ((a, b, f) for a in secs for b in secs for f in funs),
    )
    report.results["C3"] = first(
        lambda a, b, c: rho(a, pr(b, c)) == pr(br(a, b), c) + pr(b, br(a, c)),
        product(secs, repeat=3),
    )
    report.results["C4"] = first(
        lambda a, b, f: rho(br(a, b), f) == rho(a, rho(b, f)) - rho(b, rho(a, f)),
        ((a, b, f) for a in secs for b in secs for f in probes),
    )
    report.results["C5"] = first(
        lambda a, b: pr(a, br(b, b)) == rho(a, pr(b, b)) * half,
        product(secs, repeat=2),
    )
    return report


def bfield_on_theta(s: CourantScenario, B: GradedPoly) -> CourantScenario:
    """Gauge transform of Theta by the time-one flow of ``{B, .}``."""
    ch = s.chart
    n = ch.n_x
    if not B.is_zero():
        if degree(B) != 2:
            raise DegreeError("B must be a quadratic function")
        for (xs, mask, ps), _ in B.items():
            if any(ps) or len(mask) != 2 or any(i >= n for i in mask):
                raise ValueError("B must be quadratic in the v-block")
    theta = exp_adjoint(s.bracket, B, s.theta)
    return CourantScenario(s.bracket, theta, label=f"{s.label} (B-field)", kind=s.kind)


# ---------------------------------------------------------------------------
# quadratic functions and generalized complex structures


def is_quadratic(J: GradedPoly) -> bool:
    return all(not any(ps) and len(mask) == 2 for (xs, mask, ps), _ in J.items())


def endomorphism_of(b: BracketData, J: GradedPoly) -> list:
    """Matrix M with {J, e^mu} = sum_beta M[beta][mu] e^beta (body-function entries)."""
    ch = b.chart
    m = ch.n_e
    M = [[GradedPoly.zero(ch) for _ in range(m)] for _ in range(m)]
    for mu in range(m):
        img = poisson(b, J, GradedPoly.generator(ch, ("e", mu)))
        for (xs, mask, ps), c in img.items():
            (beta,) = mask
            M[beta][mu] = M[beta][mu] + GradedPoly(ch, {(xs, (), ps): c})
    return M


def quadratic_from_endomorphism(b: BracketData, M: Sequence) -> GradedPoly:
    """Quadratic function whose hamiltonian action on degree-1 generators is M.

    ``M[beta][mu]`` is the coefficient of ``e^beta`` in the image of
    ``e^mu``; M must be skew for the pairing, i.e. ``M g^{-1}`` antisymmetric.
    """
    ch = b.chart
    m = ch.n_e
    ginv = linalg.inverse(b.metric_matrix)
    Mq = [[_coerce_coeff(ch, M[i][j]) for j in range(m)] for i in range(m)]
    A = [[sum((Mq[a][k] * ginv[k][c] for k in range(m) if ginv[k][c] != 0), GradedPoly.zero(ch))
           for c in range(m)] for a in range(m)]
    for a in range(m):
        for c in range(m):
            if A[a][c] + A[c][a] != GradedPoly.zero(ch):
                raise ValueError("endomorphism is not skew for the pairing")
    e = [GradedPoly.generator(ch, ("e", i)) for i in range(m)]
    J = GradedPoly.zero(ch)
    for a in range(m):
        for c in range(a + 1, m):
            if not A[a][c].is_zero():
                J = J + A[a][c] * e[a] * e[c]
    return J


def apply_quadratic(b: BracketData, J: GradedPoly, e: GradedPoly) -> GradedPoly:
    return poisson(b, J, e)


def _standard_block_to_quadratic(b: BracketData, block: Sequence) -> GradedPoly:
    """Quadratic function of an endomorphism of TM + T*M given as a 2n x 2n
    block matrix acting on columns (X; alpha)."""
    n = b.chart.n_x
    # basis index of d/dx^i is n + i (xi_i); of dx^i is i (v^i)
    pos = [n + i for i in range(n)] + [i for i in range(n)]
    m = 2 * n
    M = [[Fraction(0)] * m for _ in range(m)]
    for r in range(m):
        for c in range(m):
            M[pos[r]][pos[c]] = Fraction(block[r][c])
    return quadratic_from_endomorphism(b, M)


def gc_from_symplectic(b: BracketData, omega: Sequence) -> GradedPoly:
    """The structure [[0, -omega^{-1}], [omega, 0]] for a constant 2-form.

    ``omega[i][j]`` are the components omega(d/dx^i, d/dx^j).
    """
    n = b.chart.n_x
    w = linalg.mat(omega)
    flat = linalg.transpose(w)  # X -> i_X omega
    sharp = linalg.inverse(flat)
    block = linalg.zeros(2 * n, 2 * n)
    for i in range(n):
        for j in range(n):
            block[i][n + j] = -sharp[i][j]
            block[n + i][j] = flat[i][j]
    return _standard_block_to_quadratic(b, block)


def gc_from_complex(b: BracketData, J: Sequence) -> GradedPoly:
    """The structure diag(J, -J*) for a constant complex structure J on TM."""
    n = b.chart.n_x
    Jm = linalg.mat(J)
    Jt = linalg.transpose(Jm)
    block = linalg.zeros(2 * n, 2 * n)
    for i in range(n):
        for j in range(n):
            block[i][j] = Jm[i][j]
            block[n + i][n + j] = -Jt[i][j]
    return _standard_block_to_quadratic(b, block)


def graph_of_two_form(chart: Chart, omega: Sequence) -> list:
    """Frame {d/dx^i + i_{d/dx^i} omega} of graph(omega) as degree-1 functions."""
    n = chart.n_x
    frame = []
    for i in range(n):
        f = _xi(chart, i)
        for j in range(n):
            c = _coerce_coeff(chart, omega[i][j])
            if not c.is_zero():
                f = f + c * _v(chart, j)
        frame.append(f)
    return frame


def graph_of_bivector(chart: Chart, pi: Sequence) -> list:
    """Frame {dx^k + pi(dx^k, .)} of graph(pi)."""
    n = chart.n_x
    frame = []
    for k in range(n):
        f = _v(chart, k)
        for j in range(n):
            c = _coerce_coeff(chart, pi[k][j])
            if not c.is_zero():
                f = f + c * _xi(chart, j)
        frame.append(f)
    return frame


@dataclass
class GCSReport:
    almost_complex: tuple
    nijenhuis: tuple
    theta_identity: tuple | None = None

    @property
    def passed(self) -> bool:
        ok = self.almost_complex[0] and self.nijenhuis[0]
        if self.theta_identity is not None:
            ok = ok and self.theta_identity[0]
        return ok

    @property
    def consistent(self) -> bool:
        if self.theta_identity is None:
            return True
        return self.theta_identity[0] == (self.almost_complex[0] and self.nijenhuis[0])


def gcs_report(s: CourantScenario, J: GradedPoly, frame: Sequence | None = None) -> GCSReport:
    if not is_quadratic(J):
        raise ValueError("J must be a quadratic function")
    b = s.bracket
    ch = s.chart
    if frame is None:
        frame = [GradedPoly.generator(ch, ("e", i)) for i in range(ch.n_e)]
    Jop = lambda e: poisson(b, J, e)  # noqa: E731
    br = lambda x, y: derived_bracket(s, x, y)  # noqa: E731
    almost = (True, None)
    for e in frame:
        if Jop(Jop(e)) != -e:
            almost = (False, str(e))
            break
    nij = (True, None)
    for e1, e2 in product(frame, repeat=2):
        t = br(Jop(e1), Jop(e2)) - Jop(br(Jop(e1), e2)) - Jop(br(e1, Jop(e2))) + Jop(Jop(br(e1, e2)))
        if not t.is_zero():
            nij = (False, (str(e1), str(e2), str(t)))
            break
    theta_id = None
    if s.kind in ("standard", "twisted"):
        lhs = poisson(b, poisson(b, s.theta, J), J)
        theta_id = (lhs == -s.theta, None if lhs == -s.theta else str(lhs + s.theta))
    return GCSReport(almost, nij, theta_id)


def gcs_check(s: CourantScenario, J: GradedPoly, frame: Sequence | None = None) -> bool:
    """Generalized complex test: J^2 = -1 and vanishing Nijenhuis torsion.

    For standard/twisted scenarios the identity {{Theta, J}, J} = -Theta is
    also evaluated and must agree with the torsion verdict.
    """
    rep = gcs_report(s, J, frame)
    if not rep.consistent:
        raise InternalError("Nijenhuis verdict disagrees with {{Theta,J},J} = -Theta")
    return rep.almost_complex[0] and rep.nijenhuis[0]
