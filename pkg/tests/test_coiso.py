import itertools
import random
from fractions import Fraction

import pytest

from courantred import linalg
from courantred.coiso import (
    CoisotropicIdeal,
    clean_intersection,
    GeometricCoisoData,
    ideal_from_data,
    in_normalizer,
    is_coisotropic,
    membership,
    normal_form,
    reduce,
    reduce_dirac,
    reduce_quadratic,
    reducible_geometric,
    reducible_symbolic,
    section_from_coeffs,
    totdim,
)
from courantred.courant import (
    gc_from_complex,
    gc_from_symplectic,
    graph_of_bivector,
    graph_of_two_form,
    standard_theta,
    twisted_theta,
)
from courantred.errors import DataError, ReductionError
from courantred.graded_algebra import GradedPoly
from courantred.parsing import parse_expr
from courantred.pseudo_linear import hyperbolic_space, split_decomposition

from helpers import random_isotropic


def P(t, s):
    return parse_expr(t, s.chart)


def ideal(s, *texts):
    return CoisotropicIdeal.from_generators(s.bracket, [P(t, s) for t in texts])


def data(s, N=(), K=(), F=(), flat=()):
    return GeometricCoisoData(s.bracket, N=N, K=tuple(P(t, s) for t in K), F=F,
                              flat=tuple(P(t, s) for t in flat))


S2, S3, S4 = (standard_theta(n) for n in (2, 3, 4))


def test_normal_form_and_membership():
    I = ideal(S3, "x1", "xi1", "p1")
    assert normal_form(P("x1*x2 + x2*xi1 + v2", S3), I) == P("v2", S3)
    assert membership(P("x1*v2*p3 + xi1*xi2 + p1", S3), I)
    assert not membership(P("x2", S3), I)
    assert totdim(I) == 2 + 5 + 2


def test_coisotropic_examples():
    assert is_coisotropic(ideal(S2, "x1", "xi2", "v1", "p2"))
    assert is_coisotropic(ideal(S3, "xi1", "p1"))
    # <v1, xi1> = 1 is not in the ideal
    assert not is_coisotropic(ideal(S2, "v1", "xi1"))
    # {p1, x1} = 1
    assert not is_coisotropic(ideal(S2, "x1", "p1"))
    with pytest.raises(DataError):
        ideal(S2, "x1*x2")
    with pytest.raises(DataError):
        ideal(S2, "x1*p1")


def test_lagrangian_ideal_reduces_to_point():
    I = ideal(S2, "x1", "xi2", "v1", "p2")
    assert reducible_symbolic(S2, I)
    red = reduce(S2, I)
    assert red.scenario.chart.dims() == (0, 0, 0)
    assert red.scenario.theta.is_zero()


def test_translation_reduction():
    I = ideal(S3, "xi1", "p1")
    red = reduce(S3, I)
    rs = red.scenario
    assert rs.chart.x_names == ("x2", "x3")
    assert rs.theta == P("v2*p2 + v3*p3", rs)
    assert red.project(P("x2*v3", S3)) == P("x2*v3", rs)
    with pytest.raises(ReductionError):
        red.project(P("x1", S3))
    with pytest.raises(ReductionError):
        red.project(P("v1", S3))


def test_non_reducible_ideal():
    # rho(xi2) is not in F = span(d/dx1)
    I = ideal(S2, "xi2", "p1")
    assert is_coisotropic(I)
    assert not reducible_symbolic(S2, I)
    with pytest.raises(ReductionError):
        reduce(S2, I)


def test_non_constant_frame_ideal():
    # a degree-2 generator with a non-constant quadratic correction
    I = ideal(S3, "p1 + xi2*xi3")
    assert I.C == (0,)
    assert is_coisotropic(I)
    assert normal_form(P("p1", S3), I) == P("-xi2*xi3", S3)


def test_geometric_matches_symbolic_on_corpus_data():
    d = data(S4, N=(2,), K=("xi1", "v3"), F=(0,), flat=("v2", "v4", "xi2", "xi4"))
    I = ideal_from_data(d)
    v = reducible_geometric(S4, d)
    assert v.all and reducible_symbolic(S4, I)
    red = reduce(S4, I)
    assert red.scenario.theta == P("v2*p2 + v4*p4", red.scenario)
    J = gc_from_symplectic(S4.bracket, [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    J_red, rep = reduce_quadratic(S4, J, d, I, red)
    assert all(rep.values())
    assert J_red == P("-v2*v4 - xi2*xi4", red.scenario)


def test_holomorphic_quotient():
    d = data(S4, K=("xi1", "xi2"), F=(0, 1), flat=("v3", "v4", "xi3", "xi4"))
    I = ideal_from_data(d)
    red = reduce(S4, I)
    J = gc_from_complex(S4.bracket, [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    J_red, _ = reduce_quadratic(S4, J, d, I, red)
    assert J_red == P("-v3*xi4 + v4*xi3", red.scenario)


def test_presymplectic_dirac_reduction():
    d = data(S3, K=("xi3",), F=(2,), flat=("v1", "v2", "xi1", "xi2"))
    L = graph_of_two_form(S3.chart, [[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    frame = reduce_dirac(L, S3, d)
    red = reduce(S3, ideal_from_data(d))
    rs = red.scenario
    assert [str(f) for f in frame] == ["v1 - xi2", "v2 + xi1"]
    # the reduced frame spans the graph of dx1 dx2 on R^2
    expected = graph_of_two_form(rs.chart, [[0, 1], [-1, 0]])
    M = [[c for c in section_coeffs_of(f)] for f in frame + expected]
    assert linalg.rank(M) == 2


def section_coeffs_of(f):
    from courantred.coiso import section_coeffs
    return [c.constant_term() for c in section_coeffs(f)]


def test_poisson_dirac_reduction():
    d = data(S4, N=(0,), K=("xi2", "v1"), F=(1,), flat=("v3", "v4", "xi3", "xi4"))
    L = graph_of_bivector(S4.chart, [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
    frame = reduce_dirac(L, S4, d)
    assert len(frame) == 2
    rs = reduce(S4, ideal_from_data(d)).scenario
    exp = graph_of_bivector(rs.chart, [[0, 1], [-1, 0]])
    assert linalg.rank([section_coeffs_of(f) for f in frame + exp]) == 2


def test_bad_geometric_data():
    with pytest.raises(DataError):
        data(S2, N=(0,), F=(0,))
    with pytest.raises(DataError):
        data(S2, K=("xi1 + v1",), flat=("xi2", "v2"))
    with pytest.raises(DataError):
        data(S2, K=("xi1",), flat=("xi2",))


# ---------------------------------------------------------------------------
# randomized cross-check of symbolic and geometric reducibility


def _sec(s, vec):
    return section_from_coeffs(s.chart, [GradedPoly.const(s.chart, c) for c in vec])


def _random_data(rng, s, n):
    N = tuple(sorted(rng.sample(range(n), rng.randint(0, 1))))
    rest = [i for i in range(n) if i not in N]
    F = tuple(sorted(rng.sample(rest, rng.randint(0, len(rest)))))
    V = hyperbolic_space(n)
    # hyperbolic coordinates of the chart are (v1..vn, xi1..xin)
    K = random_isotropic(rng, n, rng.randint(0, n - 1))
    sp = split_decomposition(V, K)
    return GeometricCoisoData(s.bracket, N=N, K=tuple(_sec(s, v) for v in K.basis), F=F,
                              flat=tuple(_sec(s, v) for v in sp.R.basis))


def test_random_reducibility_cross_check():
    rng = random.Random(77)
    chi = {(0, 1, 2): "x1"}
    scenarios = [standard_theta(3), twisted_theta(3, chi), twisted_theta(3, {(0, 1, 2): 1})]
    checked = agreeing_true = agreeing_false = 0
    while checked < 50:
        s = rng.choice(scenarios)
        try:
            d = _random_data(rng, s, 3)
            I = ideal_from_data(d)
        except DataError:
            continue
        sym = reducible_symbolic(s, I)
        geo = reducible_geometric(s, d)
        assert sym == geo.all, (s.label, d, geo.witnesses)
        checked += 1
        agreeing_true += sym
        agreeing_false += not sym
    assert agreeing_true and agreeing_false


def test_restriction_ideal():
    # K = Ann(TN) on N = {x1 = 0}: restriction of E to N
    I = ideal(S2, "x1", "v1")
    assert is_coisotropic(I) and reducible_symbolic(S2, I)
    rs = reduce(S2, I).scenario
    assert rs.chart.x_names == ("x2",) and rs.chart.e_names == ("v2", "xi2")
    assert rs.theta == P("v2*p2", rs)


def test_clean_intersection_bivector():
    d = data(S3, K=("xi1",), F=(0,), flat=("v2", "v3", "xi2", "xi3"))
    L = graph_of_bivector(S3.chart, [[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    assert clean_intersection(L, d)
    d2 = data(S3, K=("xi3",), F=(2,), flat=("v1", "v2", "xi1", "xi2"))
    assert clean_intersection(graph_of_two_form(S3.chart, [[0, 1, 0], [-1, 0, 0], [0, 0, 0]]), d2)
