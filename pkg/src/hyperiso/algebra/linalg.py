"""Exact dense linear algebra over a field object.

Matrices are lists of row lists holding raw field elements.
"""

from __future__ import annotations


def mat_vec(field, A, v):
    out = []
    for row in A:
        s = field.zero
        for a, x in zip(row, v):
            s = field.add(s, field.mul(a, x))
        out.append(s)
    return out


def _eliminate(field, M):
    """Row-reduce M in place; returns list of pivot column indices."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if not field.is_zero(M[i][c]):
                pivot = i
                break
        if pivot is None:
            continue
        M[r], M[pivot] = M[pivot], M[r]
        inv = field.inv(M[r][c])
        M[r] = [field.mul(inv, x) for x in M[r]]
        for i in range(rows):
            if i != r and not field.is_zero(M[i][c]):
                f = M[i][c]
                M[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def solve(field, A, b):
    """Solution of A x = b for square A; None if singular/inconsistent."""
    n = len(A)
    M = [list(row) + [bv] for row, bv in zip(A, b)]
    pivots = _eliminate(field, M)
    if len(pivots) < n or any(p >= n for p in pivots):
        return None
    x = [field.zero] * n
    for r, c in enumerate(pivots):
        x[c] = M[r][n]
    return x


def nullspace(field, A):
    """Basis of the right kernel of A (list of vectors)."""
    if not A:
        return []
    cols = len(A[0])
    M = [list(row) for row in A]
    pivots = _eliminate(field, M)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [field.zero] * cols
        v[fc] = field.one
        for r, pc in enumerate(pivots):
            v[pc] = field.neg(M[r][fc])
        basis.append(v)
    return basis


def rank(field, A):
    M = [list(row) for row in A]
    return len(_eliminate(field, M))


def det(field, A):
    n = len(A)
    M = [list(row) for row in A]
    sign = field.one
    acc = field.one
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if not field.is_zero(M[i][c]):
                pivot = i
                break
        if pivot is None:
            return field.zero
        if pivot != c:
            M[c], M[pivot] = M[pivot], M[c]
            sign = field.neg(sign)
        acc = field.mul(acc, M[c][c])
        inv = field.inv(M[c][c])
        for i in range(c + 1, n):
            if not field.is_zero(M[i][c]):
                t = field.mul(inv, M[i][c])
                M[i] = [field.sub(x, field.mul(t, y)) for x, y in zip(M[i], M[c])]
    return field.mul(sign, acc)


def inverse_matrix(field, A):
    n = len(A)
    M = [list(row) + [field.one if i == j else field.zero for j in range(n)]
         for i, row in enumerate(A)]
    pivots = _eliminate(field, M)
    if len(pivots) < n or any(p >= n for p in pivots):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in M]
