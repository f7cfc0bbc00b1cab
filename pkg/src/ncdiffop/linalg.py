"""Small exact linear algebra over Scalars (Gauss-Jordan elimination)."""

from __future__ import annotations

from typing import Sequence

from .scalar import ONE, ZERO, Scalar

Matrix = list[list[Scalar]]


def zeros(n: int, m: int) -> Matrix:
    return [[ZERO] * m for _ in range(n)]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> Matrix:
    m = len(b[0]) if b else 0
    out = zeros(len(a), m)
    for i, row in enumerate(a):
        for k, aik in enumerate(row):
            if not aik:
                continue
            for j, bkj in enumerate(b[k]):
                if bkj:
                    out[i][j] = out[i][j] + aik * bkj
    return out


def matadd(a, b, sign: int = 1) -> Matrix:
    return [[x + y if sign > 0 else x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def matscale(c: Scalar, a) -> Matrix:
    return [[c * x for x in row] for row in a]


def is_zero_matrix(a) -> bool:
    return all(not x for row in a for x in row)


def rref(rows: Sequence[Sequence[Scalar]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (leftmost first)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[Scalar]], ncols: int | None = None) -> list[list[Scalar]]:
    """Basis of {x : rows · x = 0}."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    red, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for r, pc in enumerate(piv):
            x[pc] = -red[r][f]
        basis.append(x)
    return basis


def solve(a: Sequence[Sequence[Scalar]], b: Sequence[Scalar]) -> list[Scalar] | None:
    """One solution of a·x = b (free variables set to zero), or None."""
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, piv = rref(aug)
    if ncols in piv:
        return None
    x = [ZERO] * ncols
    for r, pc in enumerate(piv):
        x[pc] = red[r][ncols]
    return x


def inverse(a: Sequence[Sequence[Scalar]]) -> Matrix:
    n = len(a)
    aug = [list(row) + idrow for row, idrow in zip(a, identity(n))]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def transpose(a) -> Matrix:
    return [list(col) for col in zip(*a)]
