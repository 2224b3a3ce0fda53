import itertools
import random
import pytest

from courantred.courant import (
    B_FIELD_SIGN,
    CourantScenario,
    anchor_apply,
    apply_quadratic,
    bfield_on_theta,
    derived_bracket,
    gc_from_complex,
    gc_from_symplectic,
    gcs_check,
    gcs_report,
    master_equation,
    master_residual,
    standard_theta,
    theta_from_lie_algebroid,
    twisted_theta,
    verify_axioms,
)
from courantred.graded_algebra import GradedPoly
from courantred.parsing import parse_expr

from helpers import dorfman, random_function, random_section, section_to_forms

S2 = standard_theta(2)
S3 = standard_theta(3)
S4 = standard_theta(4)


def P(t, s):
    return parse_expr(t, s.chart)


def levi_civita():
    c = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for a, b, k in itertools.permutations(range(3)):
        sgn = 1 if (a, b, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1
        c[k][a][b] = sgn
    return c


SO3 = theta_from_lie_algebroid([], levi_civita(), n=0)


def test_standard_theta_form():
    assert S2.theta == P("v1*p1 + v2*p2", S2)
    for n in range(1, 6):
        assert master_equation(standard_theta(n))


def test_twisted_master_equation():
    closed3 = twisted_theta(3, {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
                                (1, 0, 2): -1, (0, 2, 1): -1, (2, 1, 0): -1})
    assert closed3.theta == P("v1*p1 + v2*p2 + v3*p3 + v1*v2*v3", closed3)
    assert master_equation(closed3)
    chi = {}
    for perm in itertools.permutations(range(3)):
        sgn = 1 if perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1
        chi[perm] = "x4" if sgn == 1 else "-x4"
    open4 = twisted_theta(4, chi)
    assert master_residual(open4) == P("-2*v1*v2*v3*v4", open4)
    assert not master_equation(open4)
    with pytest.raises(ValueError):
        twisted_theta(3, {(0, 1, 2): 1, (1, 0, 2): 1})
    with pytest.raises(ValueError):
        twisted_theta(3, {(0, 0, 2): 1})


def test_anchor_and_bracket_examples():
    # d/dx^i <-> xi_i and dx^i <-> v^i
    assert anchor_apply(S2, P("xi1", S2), P("x1", S2)) == P("1", S2)
    assert anchor_apply(S2, P("v1", S2), P("x1", S2)).is_zero()
    assert anchor_apply(S2, P("x2*xi1", S2), P("x1", S2)) == P("x2", S2)
    assert derived_bracket(S2, P("xi1", S2), P("x1*xi2", S2)) == P("xi2", S2)
    assert derived_bracket(S2, P("xi1", S2), P("x1*v1", S2)) == P("v1", S2)
    assert derived_bracket(S2, P("v1", S2), P("v2", S2)).is_zero()


def test_verify_axioms_examples():
    secs = [P(t, S2) for t in ("xi1", "v1", "x1*xi2")]
    funs = [P(t, S2) for t in ("x1", "x2")]
    assert verify_axioms(S2, secs, funs).passed
    assert verify_axioms(S2, [], []).passed
    chi = {}
    for perm in itertools.permutations(range(3)):
        chi[perm] = "x4" if perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else "-x4"
    bad = twisted_theta(4, chi)
    rep = verify_axioms(bad, [P(t, bad) for t in ("xi1", "xi2", "xi3", "xi4")], [P("x1", bad)])
    assert not rep.results["C1"][0]
    assert rep.results["C1"][1] is not None


def _random_axiom_check(s, seed, n_samples=50, max_coeff=2):
    rng = random.Random(seed)
    ch = s.chart
    for _ in range(n_samples):
        secs = [random_section(rng, ch, max_coeff) for _ in range(3)]
        funs = [random_function(rng, ch, max_coeff)] if ch.n_x else []
        rep = verify_axioms(s, secs, funs)
        assert rep.passed, rep.results


def test_axioms_randomized_standard():
    _random_axiom_check(S3, 1)


def test_axioms_randomized_twisted():
    chi = {}
    for perm in itertools.permutations(range(3)):
        chi[perm] = "x1" if perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else "-x1"
    tw = twisted_theta(3, chi)
    assert master_equation(tw)
    _random_axiom_check(tw, 2)


def test_axioms_randomized_so3_double():
    assert master_equation(SO3)
    assert derived_bracket(SO3, P("xi1", SO3), P("xi2", SO3)) == P("xi3", SO3)
    _random_axiom_check(SO3, 3)


def test_cartan_oracle():
    rng = random.Random(11)
    n = 3
    ch = S3.chart
    for _ in range(50):
        a, b = random_section(rng, ch), random_section(rng, ch)
        X, form = dorfman(section_to_forms(a, n), section_to_forms(b, n), n)
        got = section_to_forms(derived_bracket(S3, a, b), n)
        assert [x - y for x, y in zip(got[0], X)] == [0] * n
        assert [x - y for x, y in zip(got[1], form)] == [0] * n


def jacobi_holds(c):
    n = 3
    def br(x, y):
        return [sum(c[k][i][j] * x[i] * y[j] for i in range(n) for j in range(n)) for k in range(n)]
    units = [[int(i == j) for j in range(n)] for i in range(n)]
    for a, b, d in itertools.combinations(units, 3):
        t = [p + q + r for p, q, r in zip(br(a, br(b, d)), br(b, br(d, a)), br(d, br(a, b)))]
        if any(t):
            return False
    return True


def test_lie_algebroid_examples():
    # A = TM on R^2 gives the standard function
    s = theta_from_lie_algebroid([[1, 0], [0, 1]], [[[0, 0], [0, 0]], [[0, 0], [0, 0]]])
    assert s.theta == P("v1*p1 + v2*p2", s)
    c = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    c[0][1][2], c[0][2][1] = 1, -1
    heis = theta_from_lie_algebroid([], c, n=0)
    assert master_equation(heis)  # Heisenberg algebra: Jacobi holds
    c[1][0][1], c[1][1][0] = 1, -1
    broken = theta_from_lie_algebroid([], c, n=0)
    assert not jacobi_holds(c) and not master_equation(broken)
    with pytest.raises(ValueError):
        theta_from_lie_algebroid([], [[[0, 1, 0], [0, 0, 0], [0, 0, 0]]] * 3, n=0)


def test_bfield():
    assert bfield_on_theta(S2, GradedPoly.zero(S2.chart)).theta == S2.theta
    assert bfield_on_theta(S2, P("v1*v2", S2)).theta == S2.theta
    out = bfield_on_theta(S3, P("x1*v2*v3", S3))
    # dB = dx1 dx2 dx3, so chi' = B_FIELD_SIGN * dB
    assert B_FIELD_SIGN == -1
    assert out.theta == P("v1*p1 + v2*p2 + v3*p3 - v1*v2*v3", out)
    assert master_equation(out)


def test_gcs_examples():
    w2 = [[0, 1], [-1, 0]]
    J = gc_from_symplectic(S2.bracket, w2)
    assert gcs_check(S2, J)
    w = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
    Jw = gc_from_symplectic(S4.bracket, w)
    assert Jw == P("-v1*v3 - v2*v4 - xi1*xi3 - xi2*xi4", S4)
    assert apply_quadratic(S4.bracket, Jw, P("xi1", S4)) == P("v3", S4)
    assert apply_quadratic(S4.bracket, Jw, P("v1", S4)) == P("xi3", S4)
    assert gcs_check(S4, Jw) and gcs_report(S4, Jw).theta_identity[0]
    Jc = gc_from_complex(S4.bracket, [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    assert Jc == P("-v1*xi2 + v2*xi1 - v3*xi4 + v4*xi3", S4)
    assert gcs_check(S4, Jc)
    assert not gcs_check(S2, GradedPoly.zero(S2.chart))


def test_gcs_torsion_failure_is_consistent():
    s = S4
    ch = s.chart
    # J_omega for a non-closed 2-form x3 dx1 dx2 + dx3 dx4 is almost complex but not integrable
    J = parse_expr("-x3*v1*v2 - v3*v4 - xi1*xi2 - xi3*xi4", ch)
    rep = gcs_report(s, J)
    assert rep.consistent
    assert not rep.passed
