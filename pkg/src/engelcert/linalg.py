"""Small exact linear algebra over ``Fraction`` (lists of rows)."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def as_matrix(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def matvec(A: Matrix, v: Sequence) -> list[Fraction]:
    return [sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A]


def transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)]


def trace(A: Matrix) -> Fraction:
    return sum((A[i][i] for i in range(len(A))), Fraction(0))


def rref(A: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(r) for r in A]
    if not M:
        return M, []
    rows, cols = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A: Matrix) -> int:
    return len(rref(A)[1]) if A else 0


def nullspace(A: Matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}``."""
    if not A:
        n = ncols or 0
        return identity(n)
    R, pivots = rref(A)
    n = len(A[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def span_basis(vectors) -> list[list[Fraction]]:
    """Row-reduced basis of the span of the given vectors."""
    vecs = [list(v) for v in vectors]
    if not vecs:
        return []
    R, pivots = rref(vecs)
    return R[: len(pivots)]


def det(A: Matrix) -> Fraction:
    M = [list(r) for r in A]
    n = len(M)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            result = -result
        result *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return result


def inverse(A: Matrix) -> Matrix:
    n = len(A)
    aug = [list(A[i]) + identity(n)[i] for i in range(n)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def coordinates(basis, v) -> list[Fraction] | None:
    """Coefficients expressing ``v`` in ``basis`` (rows), or None."""
    if not basis:
        return [] if all(x == 0 for x in v) else None
    n = len(basis)
    aug = [[basis[j][i] for j in range(n)] + [v[i]] for i in range(len(v))]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    out = [Fraction(0)] * n
    for row, p in zip(R, pivots):
        out[p] = row[n]
    return out


def signature(S: Matrix) -> tuple[int, int, int]:
    """(positive, negative, zero) inertia of a symmetric matrix, exactly.

    Symmetric Gaussian elimination by congruence; a zero diagonal with a
    nonzero off-diagonal entry is cured by adding one row/column to another.
    """
    M = [list(r) for r in S]
    n = len(M)
    pos = neg = 0
    active = list(range(n))
    while active:
        k = next((i for i in active if M[i][i] != 0), None)
        if k is None:
            pair = next(((i, j) for i in active for j in active if i != j and M[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j makes M[i][i] = 2 M[i][j] + M[j][j]; use e_i - e_j if that cancels
            s = 1 if 2 * M[i][j] + M[j][j] != 0 else -1
            for r in range(n):
                M[i][r] += s * M[j][r]
            for r in range(n):
                M[r][i] += s * M[r][j]
            k = i
        piv = M[k][k]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        others = [i for i in active if i != k]
        for i in others:
            f = M[i][k] / piv
            if f:
                for r in range(n):
                    M[i][r] -= f * M[k][r]
                for r in range(n):
                    M[r][i] -= f * M[r][k]
        active = others
    return pos, neg, n - pos - neg
