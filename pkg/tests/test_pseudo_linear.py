import random
from fractions import Fraction

import pytest

from courantred import linalg
from courantred.pseudo_linear import (
    QuadraticSpace,
    Subspace,
    exactness_conditions,
    graph_subspace,
    hyperbolic_space,
    induced_endomorphism,
    is_isotropic,
    is_lagrangian,
    lagrangian_quotient,
    lift_derivation,
    orthogonal,
    quotient_space,
    signature,
    split_decomposition,
)

from helpers import is_isometry, random_isometry, random_isotropic, random_lagrangian


def test_signature_and_orthogonal():
    V = hyperbolic_space(2)
    assert signature(V) == (2, 2)
    assert signature(QuadraticSpace(((1, 0, 0), (0, -1, 0), (0, 0, 2)))) == (2, 1)
    K = Subspace.span(4, [[0, 0, 1, 0]])
    assert orthogonal(V, K).same_as(Subspace.span(4, [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))
    q = quotient_space(V, K)
    assert q.dim == 2 and signature(q.space) == (1, 1)


def test_non_isotropic_rejected():
    V = hyperbolic_space(1)
    with pytest.raises(ValueError):
        split_decomposition(V, Subspace.span(2, [[1, 1]]))


def test_random_isometries():
    rng = random.Random(5)
    for _ in range(50):
        m = rng.randint(1, 4)
        assert is_isometry(random_isometry(rng, m), m)


def _random_skew_for(rng, G):
    m = len(G)
    S = linalg.zeros(m, m)
    for i in range(m):
        for j in range(i + 1, m):
            c = Fraction(rng.randint(-3, 3))
            S[i][j], S[j][i] = c, -c
    return linalg.matmul(linalg.inverse(G), S)


def test_split_and_quotient_random():
    rng = random.Random(2024)
    for _ in range(200):
        m = rng.randint(1, 5)
        n = 2 * m
        V = hyperbolic_space(m)
        K = random_isotropic(rng, m, rng.randint(0, m))
        L = random_lagrangian(rng, m) if rng.random() < 0.7 else None
        assert is_isotropic(V, K)
        sp = split_decomposition(V, K, L)
        Kp = orthogonal(V, K)
        assert is_isotropic(V, sp.T) and sp.T.dim == K.dim
        assert (sp.R + sp.K).same_as(Kp)
        assert (sp.R + sp.K + sp.T).dim == n
        assert all(V.pair(r, w) == 0 for r in sp.R.basis for w in list(sp.K.basis) + list(sp.T.basis))
        if L is not None:
            # L is adapted: it splits along R + K + T
            assert sum(S.intersect(L).dim for S in (sp.R, sp.K, sp.T)) == L.dim
        q = quotient_space(V, K)
        assert q.dim == n - 2 * K.dim
        if q.dim:
            assert signature(q.space) == (q.dim // 2, q.dim // 2)
        Lf = L or random_lagrangian(rng, m)
        lq = lagrangian_quotient(V, Lf, K, q)
        if q.dim:
            assert is_lagrangian(q.space, lq)
            v = [Fraction(rng.randint(-2, 2)) for _ in range(q.dim)]
            assert q.project(q.lift(v)) == v
            delta = _random_skew_for(rng, q.space.matrix)
            A = [[rng.randint(-1, 1) for _ in range(K.dim)] for _ in range(K.dim)]
            D = lift_derivation(V, K, delta, q, A=A)
            GD = linalg.matmul(V.matrix, D)
            assert all(GD[i][j] + GD[j][i] == 0 for i in range(n) for j in range(n))
            assert induced_endomorphism(V, K, D, q) == delta
        else:
            assert lq.dim == 0


def test_lift_derivation_rejects_non_skew():
    V = hyperbolic_space(1)
    q = quotient_space(V, Subspace.zero(2))
    with pytest.raises(ValueError):
        lift_derivation(V, Subspace.zero(2), [[1, 0], [0, 0]], q)


def test_graph_lagrangian():
    V = hyperbolic_space(3)
    assert is_lagrangian(V, graph_subspace(3, [[0, 1, 2], [-1, 0, 3], [-2, -3, 0]]))
    assert not is_lagrangian(V, graph_subspace(3, [[1, 0, 0], [0, 0, 0], [0, 0, 0]]))


def test_exactness_conditions():
    n = 3
    e = [[int(i == j) for j in range(n)] for i in range(n)]
    rhoK = Subspace.span(n, [e[0]])
    rhoKp = Subspace.span(n, [e[0], e[1]])
    F = Subspace.span(n, [e[0], e[2]])
    assert exactness_conditions((n, 2), rhoK, rhoKp, F) == (True, True)
    assert exactness_conditions((n, 1), rhoK, rhoKp, Subspace.span(n, [e[0]]))[0] is False
    with pytest.raises(ValueError):
        exactness_conditions((n, 2), rhoKp, rhoK, F)
