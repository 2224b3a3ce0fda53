import random

import pytest

from courantred.courant import standard_chart, hyperbolic_metric
from courantred.graded_algebra import Chart, GradedPoly, degree
from courantred.parsing import parse_expr
from courantred.poisson import (
    BracketData,
    NilpotencyError,
    exp_adjoint,
    hamiltonian_field,
    nondegeneracy_check,
    poisson,
)

from helpers import chart_families, oracle_bracket, random_homogeneous

STD = BracketData(standard_chart(2), hyperbolic_metric(2))


def P(t, b=STD):
    return parse_expr(t, b.chart)


def sign(a, b):
    return (-1) ** (((a - 2) * (b - 2)) % 2)


def test_generator_relations():
    assert poisson(STD, P("p1"), P("x1")) == P("1")
    assert poisson(STD, P("x1"), P("x2")).is_zero()
    assert poisson(STD, P("v1*p1"), P("x1")) == P("v1")
    assert poisson(STD, P("v1"), P("xi1")) == P("1")
    assert poisson(STD, P("x1"), P("p1")) == P("-1")


def test_hamiltonian_field_examples():
    assert hamiltonian_field(STD, P("p1"))(P("x1")) == P("1")
    assert hamiltonian_field(STD, P("x1"))(P("p1")) == P("-1")
    ident = BracketData(Chart(0, 1, 0), [[1]])
    e1 = GradedPoly.generator(ident.chart, "e1")
    assert hamiltonian_field(ident, e1)(e1) == GradedPoly.const(ident.chart, 1)


def test_bracket_data_constructor_errors():
    with pytest.raises(ValueError):
        BracketData(Chart(1, 2, 1), [[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        BracketData(Chart(1, 2, 2), [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        BracketData(Chart(1, 2, 1), [[0, 1], [2, 0]])
    assert nondegeneracy_check(STD, [3, -1])


def test_exp_adjoint():
    assert exp_adjoint(STD, GradedPoly.zero(STD.chart), P("xi1")) == P("xi1")
    assert exp_adjoint(STD, P("v1*v2"), P("x1")) == P("x1")
    # two-term series: xi1 + {v1 v2, xi1}
    assert exp_adjoint(STD, P("v1*v2"), P("xi1")) == P("xi1 - v2")
    with pytest.raises(NilpotencyError):
        exp_adjoint(STD, P("x1*p1"), P("p1"))


@pytest.mark.parametrize("name,b", chart_families())
def test_bracket_axioms_and_oracle(name, b):
    rng = random.Random(sum(map(ord, name)))
    ch = b.chart
    for _ in range(200):
        da, db = rng.randint(0, 4), rng.randint(0, 4)
        f = random_homogeneous(rng, ch, da)
        g = random_homogeneous(rng, ch, db)
        fg = poisson(b, f, g)
        assert fg == oracle_bracket(b, f, g)
        if not fg.is_zero():
            assert degree(fg) == da + db - 2
        assert fg + poisson(b, g, f) * sign(da, db) == GradedPoly.zero(ch)
    for _ in range(60):
        ds = [rng.randint(0, 3) for _ in range(3)]
        f, g, h = (random_homogeneous(rng, ch, d, terms=2) for d in ds)
        # Leibniz in the second slot
        assert poisson(b, f, g * h) == poisson(b, f, g) * h + g * poisson(b, f, h) * ((-1) ** (((ds[0] - 2) * ds[1]) % 2))
        # graded Jacobi
        lhs = poisson(b, f, poisson(b, g, h))
        rhs = poisson(b, poisson(b, f, g), h) + poisson(b, g, poisson(b, f, h)) * sign(ds[0], ds[1])
        assert lhs == rhs


def test_commutator_of_hamiltonian_fields():
    rng = random.Random(7)
    ch = STD.chart
    gens = [GradedPoly.generator(ch, g) for g in ch.generators()]
    for _ in range(30):
        df, dg = rng.randint(1, 3), rng.randint(1, 3)
        f = random_homogeneous(rng, ch, df, terms=2)
        g = random_homogeneous(rng, ch, dg, terms=2)
        Xf, Xg = hamiltonian_field(STD, f), hamiltonian_field(STD, g)
        Xfg = hamiltonian_field(STD, poisson(STD, f, g))
        for z in gens:
            assert Xfg(z) == Xf(Xg(z)) - Xg(Xf(z)) * sign(df, dg)
