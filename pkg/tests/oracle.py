"""Slow, independent reference implementations used to check the package.

Matrices are tuples of tuples of Fractions.  Nothing here imports nilfreiman.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as cartesian

import numpy as np


def identity(n):
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def matmul(A, B):
    n = len(A)
    return tuple(
        tuple(sum((A[i][k] * B[k][j] for k in range(n)), Fraction(0)) for j in range(n)) for i in range(n)
    )


def add(A, B, s=1):
    return tuple(tuple(a + s * b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def scale(A, t):
    return tuple(tuple(t * a for a in r) for r in A)


def nilpart(A):
    return add(A, identity(len(A)), -1)


def inverse(A):
    n = len(A)
    N = nilpart(A)
    out, term = identity(n), identity(n)
    for _ in range(n):
        term = scale(matmul(term, N), -1)
        out = add(out, term)
    return out


def log(A):
    n = len(A)
    N = nilpart(A)
    out = tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
    term = identity(n)
    for k in range(1, n):
        term = matmul(term, N)
        out = add(out, scale(term, Fraction((-1) ** (k + 1), k)))
    return out


def exp(X):
    n = len(X)
    out, term = identity(n), identity(n)
    for k in range(1, n):
        term = scale(matmul(term, X), Fraction(1, k))
        out = add(out, term)
    return out


def commutator(g, h):
    return matmul(matmul(inverse(g), inverse(h)), matmul(g, h))


def heis(a, b, c):
    F = Fraction
    return ((F(1), F(a), F(c)), (F(0), F(1), F(b)), (F(0), F(0), F(1)))


def heis_coords(M):
    return (M[0][1], M[1][2], M[0][2])


def set_product(A, B):
    return {matmul(a, b) for a in A for b in B}


def set_power(A, k):
    cur = set(A)
    for _ in range(k - 1):
        cur = set_product(cur, A)
    return cur


def heisenberg_box(L1, L2, L3):
    box = {heis(a, b, c) for a, b, c in cartesian(range(-L1, L1 + 1), range(-L2, L2 + 1), range(-L3, L3 + 1))}
    return box | {inverse(g) for g in box}


def word_ball(n, r):
    gens = [identity(n)]
    for i in range(n - 1):
        for s in (1, -1):
            M = [list(row) for row in identity(n)]
            M[i][i + 1] = Fraction(s)
            gens.append(tuple(tuple(row) for row in M))
    seen = {identity(n)}
    frontier = {identity(n)}
    for _ in range(r):
        frontier = {matmul(g, s) for g in frontier for s in gens} - seen
        seen |= frontier
    return seen


def strict_entries(M):
    """Strictly upper entries in graded order: superdiagonal first, then by row."""
    n = len(M)
    return tuple(M[i][i + d] for d in range(1, n) for i in range(n - d))


def rank(vectors):
    rows = [list(map(Fraction, v)) for v in vectors]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def in_span(vectors, v):
    return rank(list(vectors) + [v]) == rank(vectors)


def as_int_array(matrices):
    return np.array([[[int(x) for x in row] for row in M] for M in matrices], dtype=np.int64)


def centralizer_counts_dense(A2: np.ndarray, gammas: np.ndarray, block: int = 128) -> np.ndarray:
    """For each gamma, how many elements of A2 commute with it (dense int64 matmul)."""
    out = []
    for s in range(0, len(gammas), block):
        g = gammas[s:s + block, None]
        left = g @ A2[None]
        right = A2[None] @ g
        out.append((left == right).all(axis=(2, 3)).sum(axis=1))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


# -- integer Heisenberg arithmetic on (a, b, c) triples ----------------------------


def hmul(g, h):
    a, b, c = g
    x, y, z = h
    return (a + x, b + y, c + z + a * y)


def hinv(g):
    a, b, c = g
    return (-a, -b, a * b - c)


def hbox(L1, L2, L3):
    box = {(a, b, c) for a in range(-L1, L1 + 1) for b in range(-L2, L2 + 1) for c in range(-L3, L3 + 1)}
    return box | {hinv(g) for g in box}


def hpower(A, k):
    cur = set(A)
    for _ in range(k - 1):
        cur = {hmul(g, h) for g in cur for h in A}
    return cur
