"""Exact linear algebra in a pseudo-euclidean vector space.

Vectors are coordinate lists of Fractions; a :class:`Subspace` stores a
full-rank list of basis vectors. All complement choices go through the
first-pivot rules of :mod:`courantred.linalg`, so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg

__all__ = [
    "QuadraticSpace",
    "Subspace",
    "QuotientData",
    "SplitDecomposition",
    "hyperbolic_space",
    "orthogonal",
    "is_isotropic",
    "is_lagrangian",
    "quotient_space",
    "split_decomposition",
    "lagrangian_quotient",
    "lift_derivation",
    "induced_endomorphism",
    "exactness_conditions",
    "graph_subspace",
    "signature",
]


def _vec(v) -> tuple:
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class QuadraticSpace:
    form: tuple

    def __post_init__(self):
        g = tuple(_vec(row) for row in self.form)
        object.__setattr__(self, "form", g)
        m = [list(r) for r in g]
        if not linalg.is_symmetric(m):
            raise ValueError("form must be symmetric")
        if linalg.det(m) == 0:
            raise ValueError("form must be nondegenerate")

    @property
    def dim(self) -> int:
        return len(self.form)

    @property
    def matrix(self) -> list:
        return [list(r) for r in self.form]

    def pair(self, u, v) -> Fraction:
        return linalg.bilinear(u, self.form, v)

    def gram(self, vectors: Sequence) -> list:
        return [[self.pair(a, b) for b in vectors] for a in vectors]


@dataclass(frozen=True)
class Subspace:
    n: int
    basis: tuple = ()

    def __post_init__(self):
        b = tuple(_vec(v) for v in self.basis)
        if any(len(v) != self.n for v in b):
            raise ValueError("basis vectors have the wrong length")
        if b and linalg.rank(linalg.from_columns(b, self.n)) != len(b):
            raise ValueError("basis is not linearly independent")
        object.__setattr__(self, "basis", b)

    @classmethod
    def span(cls, n: int, vectors: Sequence) -> "Subspace":
        return cls(n, tuple(linalg.column_basis(vectors, n)))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(tuple(r) for r in linalg.identity(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v) -> bool:
        return linalg.in_span(self.basis, v, self.n)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def same_as(self, other: "Subspace") -> bool:
        return self.dim == other.dim and self.contains_subspace(other)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.n, list(self.basis) + list(other.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        return Subspace(self.n, tuple(tuple(v) for v in linalg.intersect(self.basis, other.basis, self.n)))

    def coordinates(self, v) -> list:
        return linalg.coordinates(self.basis, v, self.n)


def hyperbolic_space(n: int) -> QuadraticSpace:
    """R^{2n} with the pairing of the first n coordinates against the last n."""
    g = linalg.zeros(2 * n, 2 * n)
    for i in range(n):
        g[i][n + i] = Fraction(1)
        g[n + i][i] = Fraction(1)
    return QuadraticSpace(tuple(map(tuple, g)))


def signature(V: QuadraticSpace) -> tuple:
    """(positive, negative) index of inertia via symmetric Gaussian elimination."""
    m = V.matrix
    n = len(m)
    pos = neg = 0
    while n:
        piv = next((i for i in range(n) if m[i][i] != 0), None)
        if piv is None:
            j = next((j for j in range(1, n) if m[0][j] != 0), None)
            if j is None:  # row 0 is zero; impossible for nondegenerate forms
                raise ValueError("degenerate form")
            # replace e0 by e0 + ej to create a nonzero diagonal entry
            for k in range(n):
                m[0][k] += m[j][k]
            for k in range(n):
                m[k][0] += m[k][j]
            piv = 0
        d = m[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        rest = [i for i in range(n) if i != piv]
        m = [[m[i][j] - m[i][piv] * m[piv][j] / d for j in rest] for i in rest]
        n -= 1
    return pos, neg


def orthogonal(V: QuadraticSpace, K: Subspace) -> Subspace:
    if K.n != V.dim:
        raise ValueError("subspace lives in a different space")
    if K.dim == 0:
        return Subspace.full(V.dim)
    rows = [linalg.matvec(V.matrix, k) for k in K.basis]  # (G k)^T v = <k, v>
    ns = linalg.nullspace(rows, V.dim)
    return Subspace(V.dim, tuple(tuple(v) for v in ns))


def is_isotropic(V: QuadraticSpace, K: Subspace) -> bool:
    return all(V.pair(a, b) == 0 for a in K.basis for b in K.basis)


def is_lagrangian(V: QuadraticSpace, K: Subspace) -> bool:
    return is_isotropic(V, K) and 2 * K.dim == V.dim


@dataclass(frozen=True)
class SplitDecomposition:
    R: Subspace
    K: Subspace
    T: Subspace

    def adapted_basis(self) -> list:
        return list(self.R.basis) + list(self.K.basis) + list(self.T.basis)

    def components(self, v) -> tuple:
        """(R, K, T) coordinate blocks of v."""
        n = self.R.n
        c = linalg.coordinates(self.adapted_basis(), v, n)
        r, k = self.R.dim, self.K.dim
        return c[:r], c[r:r + k], c[r + k:]


def split_decomposition(V: QuadraticSpace, K: Subspace, L: Subspace | None = None) -> SplitDecomposition:
    """Decompose V = R + K + T with T isotropic, T + K nondegenerate and
    R = (T + K)^perp, so that K^perp = K + R.

    With a lagrangian L the choice is adapted so that
    L = (L cap R) + (L cap K) + (L cap T).
    """
    n = V.dim
    if not is_isotropic(V, K):
        raise ValueError("K must be isotropic")
    Kp = orthogonal(V, K)
    seeds: list = []
    avoid: list = []
    if L is not None:
        if not is_lagrangian(V, L):
            raise ValueError("L must be lagrangian")
        LK = L.intersect(Kp)
        # I: complement of L cap K^perp in L
        seeds = _extend(LK.basis, L.basis, n)
        # M: complement of L cap K in L cap K^perp
        avoid = _extend(L.intersect(K).basis, LK.basis, n)
    pool = orthogonal(V, Subspace.span(n, seeds + avoid)).basis
    chosen = list(seeds)
    for w in list(pool) + [tuple(r) for r in linalg.identity(n)]:
        if len(chosen) == K.dim:
            break
        trial = list(Kp.basis) + chosen + [list(w)]
        if linalg.rank(linalg.from_columns(trial, n)) == len(trial):
            chosen.append(list(w))
    if len(chosen) != K.dim:
        raise ValueError("inconsistent ranks: no complement of K^perp found")
    # dual basis w'_j with <w'_j, k_i> = delta_ij, then isotropize
    k = K.dim
    P = [[V.pair(chosen[j], K.basis[i]) for i in range(k)] for j in range(k)]
    Pinv = linalg.inverse(P) if k else []
    dual = [[sum((Pinv[j][i] * chosen[i][c] for i in range(k)), Fraction(0)) for c in range(n)] for j in range(k)]
    T_vecs = []
    for j in range(k):
        t = list(dual[j])
        for i in range(k):
            c = V.pair(dual[j], dual[i]) / 2
            if c:
                t = [a - c * b for a, b in zip(t, K.basis[i])]
        T_vecs.append(t)
    T = Subspace(n, tuple(map(tuple, T_vecs)))
    R = orthogonal(V, T + K)
    return SplitDecomposition(R, K, T)


def _extend(sub_basis: Sequence, candidates: Sequence, n: int) -> list:
    """Vectors from ``candidates`` completing ``sub_basis`` to their joint span."""
    out = []
    cur = [list(v) for v in sub_basis]
    for v in candidates:
        trial = cur + [list(v)]
        if linalg.rank(linalg.from_columns(trial, n)) == len(trial):
            cur = trial
            out.append(list(v))
    return out


@dataclass(frozen=True)
class QuotientData:
    """K^perp/K realized on the complement R of a split decomposition."""

    space: QuadraticSpace | None
    split: SplitDecomposition

    @property
    def dim(self) -> int:
        return self.split.R.dim

    def project(self, v) -> list:
        """Class of v in K^perp/K, as coordinates in the R basis."""
        r, k, t = self.split.components(v)
        if any(t):
            raise ValueError("vector does not lie in K^perp")
        return r

    def lift(self, coords) -> list:
        n = self.split.R.n
        out = [Fraction(0)] * n
        for c, b in zip(coords, self.split.R.basis):
            out = [o + Fraction(c) * x for o, x in zip(out, b)]
        return out


def quotient_space(V: QuadraticSpace, K: Subspace) -> QuotientData:
    if not is_isotropic(V, K):
        raise ValueError("K must be isotropic")
    sp = split_decomposition(V, K)
    R = sp.R
    space = QuadraticSpace(tuple(map(tuple, V.gram(R.basis)))) if R.dim else None
    return QuotientData(space, sp)


def lagrangian_quotient(V: QuadraticSpace, L: Subspace, K: Subspace,
                        quotient: QuotientData | None = None) -> Subspace:
    """Image of L cap K^perp in K^perp/K, in the coordinates of ``quotient``."""
    q = quotient or quotient_space(V, K)
    LK = L.intersect(orthogonal(V, K))
    return Subspace.span(q.dim, [q.project(v) for v in LK.basis])


def lift_derivation(V: QuadraticSpace, K: Subspace, delta: Sequence,
                    quotient: QuotientData | None = None, A: Sequence | None = None) -> list:
    """Skew endomorphism D of V preserving K and inducing ``delta`` on K^perp/K.

    ``delta`` is a matrix in the R coordinates of ``quotient``; D acts as
    delta on R, as A on K (zero by default) and as -A* on T.
    """
    q = quotient or quotient_space(V, K)
    sp = q.split
    r, k = sp.R.dim, sp.K.dim
    Dq = linalg.mat(delta) if r else []
    if r:
        Gq = q.space.matrix
        S = linalg.matmul(Gq, Dq)
        if not all(S[i][j] + S[j][i] == 0 for i in range(r) for j in range(r)):
            raise ValueError("delta is not skew for the quotient form")
    Am = linalg.mat(A) if A is not None else linalg.zeros(k, k)
    # T block: X = -(P A P^{-1})^T with P_ij = <t_i, k_j>
    if k:
        P = [[V.pair(sp.T.basis[i], sp.K.basis[j]) for j in range(k)] for i in range(k)]
        X = linalg.scale(linalg.transpose(linalg.matmul(linalg.matmul(P, Am), linalg.inverse(P))), -1)
    else:
        X = []
    size = V.dim
    block = linalg.zeros(size, size)
    for i in range(r):
        for j in range(r):
            block[i][j] = Dq[i][j]
    for i in range(k):
        for j in range(k):
            block[r + i][r + j] = Am[i][j]
            block[r + k + i][r + k + j] = X[i][j]
    B = linalg.from_columns(sp.adapted_basis(), size)
    return linalg.matmul(linalg.matmul(B, block), linalg.inverse(B))


def induced_endomorphism(V: QuadraticSpace, K: Subspace, D: Sequence,
                         quotient: QuotientData | None = None) -> list:
    """The map [D] on K^perp/K (R coordinates); D must preserve K and K^perp."""
    q = quotient or quotient_space(V, K)
    Dm = linalg.mat(D)
    for kv in K.basis:
        if not K.contains(linalg.matvec(Dm, kv)):
            raise ValueError("D does not preserve K")
    cols = [q.project(linalg.matvec(Dm, rv)) for rv in q.split.R.basis]
    return linalg.from_columns(cols, q.dim) if cols else []


def exactness_conditions(dims: tuple, rhoK: Subspace, rhoKperp: Subspace, F: Subspace) -> tuple:
    """Rank condition (a) and intersection condition (b) for exactness of a reduction.

    ``dims`` is (dim N, rank F); subspaces live in the tangent space of M.
    """
    dim_n, rank_f = dims
    if not rhoKperp.contains_subspace(rhoK):
        raise ValueError("rho(K) must be contained in rho(K^perp)")
    if F.dim != rank_f:
        raise ValueError("rank F disagrees with the supplied F")
    a = dim_n - rhoKperp.dim == rank_f - rhoK.dim
    b = rhoKperp.intersect(F).same_as(rhoK)
    return a, b


def graph_subspace(n: int, B: Sequence) -> Subspace:
    """Graph {(X, B X)} inside the hyperbolic R^{2n}."""
    Bm = linalg.mat(B)
    vecs = []
    for i in range(n):
        col = [Bm[j][i] for j in range(n)]
        vecs.append([Fraction(int(j == i)) for j in range(n)] + col)
    return Subspace(2 * n, tuple(map(tuple, vecs)))
