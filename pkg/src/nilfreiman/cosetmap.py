"""Coset canonicalization compiled to integer polynomials.

:func:`nilfreiman.subalg.canon_coset` is a polynomial map in the matrix
entries of its argument.  Expanding the pivot sweep symbolically once per
subalgebra and clearing denominators gives integer polynomials P_q with
``canon(g)_q = P_q(g) / D_q`` for every non-pivot coordinate q.  Evaluating
them on integer rows is then a plain numeric kernel, and two integral
elements lie in the same coset exactly when their key rows agree.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from . import kernels
from .kernels import PolyMap
from .ratlinalg import coord_degrees, coord_dim, rref
from .subalg import InvariantViolation, Subalgebra
from .unigroup import UniTri, _strict_mul, product_table


def scaled_subalgebra(h: Subalgebra, scale: int) -> Subalgebra:
    """Image of h under the automorphism that multiplies entry (i, j) by scale**(j - i)."""
    if scale == 1:
        return h
    deg = coord_degrees(h.n)
    return Subalgebra(rref([[x * scale**d for x, d in zip(b, deg)] for b in h.basis], h.n))


def _compile(h: Subalgebra) -> tuple[list[int], list[int], PolyMap]:
    n = h.n
    m = coord_dim(n)
    R, *xs = ring([f"x{q}" for q in range(m)], QQ)
    cur = list(xs)
    table = product_table(n)
    for B, p in zip(h.basis, h.pivots):
        # exp(-c B) = sum_k (-c)^k B^k / k!, with c the current pivot entry
        Bk = list(B)
        series = [[Fraction(x) for x in B]]
        for k in range(2, n):
            Bk = _strict_mul(Bk, B, n)
            if not any(Bk):
                break
            series.append([x / factorial(k) for x in Bk])
        neg_c = -cur[p]
        powers = [neg_c]
        for _ in range(1, len(series)):
            powers.append(powers[-1] * neg_c)
        E = [R.zero] * m
        for coeffs, cp in zip(series, powers):
            for q, x in enumerate(coeffs):
                if x:
                    E[q] += cp * QQ(x.numerator, x.denominator)
        nxt = []
        for q, terms in enumerate(table):
            s = cur[q] + E[q]
            for a, b in terms:
                if cur[a] and E[b]:
                    s += cur[a] * E[b]
            nxt.append(s)
        cur = nxt
    pivots = set(h.pivots)
    if any(cur[p] for p in pivots):
        raise InvariantViolation("compiled coset sweep leaves a pivot entry nonzero")
    free = [q for q in range(m) if q not in pivots]
    dens, coef, exps, owner = [], [], [], []
    for r, q in enumerate(free):
        den, P = cur[q].clear_denoms()
        dens.append(int(den))
        for monom, c in P.terms():
            coef.append(int(c))
            exps.append(list(monom))
            owner.append(r)
    big = any(abs(c) >= kernels.INT_SAFE for c in coef)
    poly = PolyMap(
        nvars=m,
        nout=len(free),
        coef=np.asarray(coef, dtype=object if big else np.int64),
        exps=np.asarray(exps, dtype=np.int64).reshape(len(coef), m),
        owner=np.asarray(owner, dtype=np.int64),
    )
    return free, dens, poly


class CosetMap:
    """Canonical coset keys for left cosets g.exp(h) of integral rows.

    ``scale`` names the coordinate frame of the rows (see
    :func:`scaled_subalgebra`); keys are only comparable within one frame.
    """

    def __init__(self, h: Subalgebra, scale: int = 1):
        self.h = h
        self.scale = scale
        self.n = h.n
        self.frame_h = scaled_subalgebra(h, scale)
        if self.frame_h.dim == 0:
            self.free = list(range(coord_dim(h.n)))
            self.dens = [1] * len(self.free)
            self.poly = None
        else:
            self.free, self.dens, self.poly = _compile(self.frame_h)

    @property
    def nkey(self) -> int:
        return len(self.free)

    def keys(self, X: np.ndarray) -> np.ndarray:
        if self.poly is None:
            return X
        return kernels.poly_rows(self.poly, X)

    def members(self, X: np.ndarray) -> np.ndarray:
        """Boolean mask: row lies in exp(h)."""
        K = self.keys(X)
        if K.shape[1] == 0:
            return np.ones(len(X), dtype=bool)
        return ~(K != 0).any(axis=1)

    def rep_from_key(self, key) -> UniTri:
        """The canonical representative, in the unscaled frame."""
        deg = coord_degrees(self.n)
        coords = [Fraction(0)] * coord_dim(self.n)
        for q, den, v in zip(self.free, self.dens, key):
            coords[q] = Fraction(int(v), den * self.scale ** deg[q])
        return UniTri(self.n, tuple(coords))

    def product_keys(self, A: np.ndarray, B: np.ndarray, what: str = "coset product"):
        """Distinct coset keys of all products a*b, with first witnessing index pairs."""
        if self.poly is None:
            P = PolyMap(
                nvars=A.shape[1], nout=A.shape[1],
                coef=np.ones(A.shape[1], dtype=np.int64),
                exps=np.eye(A.shape[1], dtype=np.int64),
                owner=np.arange(A.shape[1], dtype=np.int64),
            )
        else:
            P = self.poly
        return kernels.product_poly_unique(self.n, P, A, B, what)


@lru_cache(maxsize=256)
def coset_map(h: Subalgebra, scale: int = 1) -> CosetMap:
    return CosetMap(h, scale)
