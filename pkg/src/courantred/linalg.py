"""Small exact linear algebra over the rationals.

Matrices are lists of rows of :class:`Fraction`. Pivoting is always on the
first usable row/column so that every basis returned here is deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list


def mat(rows) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def zeros(n: int, m: int) -> Matrix:
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def shape(a: Matrix) -> tuple:
    return (len(a), len(a[0]) if a else 0)


def transpose(a: Matrix) -> Matrix:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    bt = transpose(b)
    if not bt:
        return [[] for _ in a]
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence) -> list:
    return [sum((x * Fraction(y) for x, y in zip(row, v)), Fraction(0)) for row in a]


def add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def scale(a: Matrix, c) -> Matrix:
    c = Fraction(c)
    return [[c * x for x in row] for row in a]


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def is_symmetric(a: Matrix) -> bool:
    n = len(a)
    return all(len(row) == n for row in a) and all(a[i][j] == a[j][i] for i in range(n) for j in range(n))


def columns(a: Matrix) -> list:
    return transpose(a)


def from_columns(cols: Sequence, n: int | None = None) -> Matrix:
    cols = [list(c) for c in cols]
    if not cols:
        return [[] for _ in range(n or 0)]
    return transpose(cols)


def rref(a: Matrix):
    """Reduced row echelon form and pivot columns."""
    m = [list(row) for row in a]
    rows, cols = shape(m)
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pr = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def det(a: Matrix) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    m = [list(row) for row in a]
    d = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            d = -d
        piv = m[c][c]
        d *= piv
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / piv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + e for row, e in zip(a, identity(n))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def nullspace(a: Matrix, ncols: int | None = None) -> list:
    """Basis (list of vectors) of {v : a v = 0}."""
    if not a:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    red, pivots = rref(a)
    n = len(a[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][f]
        basis.append(v)
    return basis


def column_basis(vectors: Sequence, n: int) -> list:
    """Independent subset (first-come) of the given vectors, as a list."""
    out = []
    for v in vectors:
        trial = out + [list(v)]
        if rank(from_columns(trial, n)) == len(trial):
            out.append([Fraction(x) for x in v])
    return out


def solve(a: Matrix, b: Sequence):
    """One solution of a x = b (free variables set to zero) or None."""
    rows, cols = shape(a)
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(a, b)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


def in_span(vectors: Sequence, v: Sequence, n: int) -> bool:
    if not vectors:
        return all(Fraction(x) == 0 for x in v)
    return solve(from_columns(vectors, n), v) is not None


def coordinates(vectors: Sequence, v: Sequence, n: int) -> list:
    x = solve(from_columns(vectors, n), v)
    if x is None:
        raise ValueError("vector not in span")
    return x


def bilinear(u: Sequence, form: Matrix, v: Sequence) -> Fraction:
    return sum((Fraction(u[i]) * form[i][j] * Fraction(v[j]) for i in range(len(u)) for j in range(len(v))
                if form[i][j] != 0), Fraction(0))


def intersect(u_basis: Sequence, w_basis: Sequence, n: int) -> list:
    """Basis of span(u) ∩ span(w)."""
    if not u_basis or not w_basis:
        return []
    cols = [list(x) for x in u_basis] + [[-y for y in w] for w in w_basis]
    ns = nullspace(from_columns(cols, n), len(cols))
    k = len(u_basis)
    vecs = []
    for coeffs in ns:
        vecs.append([sum((coeffs[j] * u_basis[j][i] for j in range(k)), Fraction(0)) for i in range(n)])
    return column_basis(vecs, n)
