"""Finite subsets of U_n(Q): product sets, powers, intersections with
subgroups, and sets of cosets.

A :class:`SymSet` keeps its elements as a sorted array of distinct integer
rows in a scaled frame: row entry q equals ``scale**deg(q)`` times the true
matrix entry.  The scaling is a group automorphism, so products, inverses
and coset tests can all run on integers.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .cosetmap import coset_map
from .kernels import ResourceCapExceeded
from .ratlinalg import coord_degrees, coord_dim
from .subalg import QuotientCtx, Subalgebra, SubalgebraError, is_ideal
from .unigroup import (
    UniTri,
    canonical_key,
    canonical_key_ints,
    check_n,
    element_from_json,
    element_to_json,
)


def row_element(n: int, scale: int, row) -> UniTri:
    """The element whose scaled-frame row is ``row``."""
    deg = coord_degrees(n)
    return UniTri(n, tuple(Fraction(int(v), scale**d) for v, d in zip(row, deg)))


class NotSymmetricError(ValueError):
    """The operation needs a symmetric set containing the identity."""


def _frame_rows(elements: Sequence[UniTri], n: int, scale: int) -> np.ndarray:
    deg = coord_degrees(n)
    rows = []
    for g in elements:
        row = []
        for x, d in zip(g.coords, deg):
            v = x * scale**d
            if v.denominator != 1:
                raise ValueError("scale does not clear the denominators")
            row.append(v.numerator)
        rows.append(row)
    return kernels.as_rows(np.asarray(rows, dtype=object).reshape(len(rows), coord_dim(n)))


def _rescale(rows: np.ndarray, n: int, factor: int) -> np.ndarray:
    if factor == 1:
        return rows
    mult = [factor**d for d in coord_degrees(n)]
    return kernels.as_rows(rows.astype(object) * np.asarray(mult, dtype=object))


class SymSet:
    """A finite set of U_n elements, deduplicated and canonically ordered.

    Iteration yields elements sorted by :func:`canonical_key`.  The
    ``symmetric`` property is recomputed from the elements, never stored.
    """

    def __init__(self, n: int, rows: np.ndarray, scale: int = 1, *, presorted: bool = False):
        self.n = check_n(n)
        self.scale = int(scale)
        rows = kernels.as_rows(np.asarray(rows).reshape(-1, coord_dim(n)))
        self.rows = rows if presorted else kernels.unique_rows(rows)
        self._powers: dict[int, SymSet] = {1: self}

    # -- construction --------------------------------------------------

    @classmethod
    def from_elements(cls, elements: Iterable[UniTri], n: int | None = None) -> "SymSet":
        elements = list(elements)
        if n is None:
            if not elements:
                raise ValueError("ambient n is required for an empty set")
            n = elements[0].n
        if any(g.n != n for g in elements):
            raise ValueError("elements of different ambient sizes")
        scale = 1
        for g in elements:
            for x in g.coords:
                scale = lcm(scale, x.denominator)
        return cls(n, _frame_rows(elements, n, scale), scale)

    @classmethod
    def identity(cls, n: int) -> "SymSet":
        return cls(n, np.zeros((1, coord_dim(n)), dtype=np.int64), presorted=True)

    def with_scale(self, scale: int) -> "SymSet":
        if scale == self.scale:
            return self
        if scale % self.scale:
            raise ValueError("new scale must be a multiple of the current one")
        return SymSet(self.n, _rescale(self.rows, self.n, scale // self.scale), scale, presorted=True)

    # -- container protocol --------------------------------------------

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: UniTri) -> bool:
        try:
            row = _frame_rows([g], self.n, self.scale)
        except ValueError:
            return False
        return bool(kernels.find_rows(self.rows, row)[0] >= 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymSet) or other.n != self.n or len(other) != len(self):
            return False
        s = lcm(self.scale, other.scale)
        a, b = self.with_scale(s).rows, other.with_scale(s).rows
        return bool(np.array_equal(a, b))

    __hash__ = None

    def __repr__(self) -> str:
        return f"SymSet(n={self.n}, size={len(self)}, scale={self.scale})"

    def row_to_element(self, row) -> UniTri:
        return row_element(self.n, self.scale, row)

    @cached_property
    def elements(self) -> list[UniTri]:
        if self.scale == 1:
            keyed = [(canonical_key_ints(self.n, r), r) for r in self.rows.tolist()]
            keyed.sort()
            return [UniTri.from_coords(self.n, r) for _, r in keyed]
        return sorted((self.row_to_element(r) for r in self.rows.tolist()), key=canonical_key)

    @cached_property
    def canonical_order(self) -> np.ndarray:
        """Permutation of ``rows`` into canonical_key order."""
        if self.scale == 1:
            keys = [canonical_key_ints(self.n, r) for r in self.rows.tolist()]
        else:
            keys = [canonical_key(self.row_to_element(r)) for r in self.rows.tolist()]
        return np.asarray(sorted(range(len(keys)), key=keys.__getitem__), dtype=np.int64)

    # -- structure -----------------------------------------------------

    @cached_property
    def contains_identity(self) -> bool:
        return bool(kernels.find_rows(self.rows, np.zeros((1, self.rows.shape[1]), self.rows.dtype))[0] >= 0)

    @cached_property
    def inverse_rows(self) -> np.ndarray:
        return kernels.unique_rows(kernels.inverse_rows(self.n, self.rows))

    @cached_property
    def symmetric(self) -> bool:
        """Identity present and closed under inversion."""
        if not self.contains_identity:
            return False
        return bool(np.array_equal(self.inverse_rows, self.rows))

    def inverse(self) -> "SymSet":
        return SymSet(self.n, self.inverse_rows, self.scale, presorted=True)

    def symmetrized(self) -> "SymSet":
        """S u S^-1 u {id}."""
        rows = np.concatenate([self.rows, self.inverse_rows, np.zeros((1, self.rows.shape[1]), self.rows.dtype)])
        return SymSet(self.n, rows, self.scale)

    def require_symmetric(self) -> None:
        if not self.symmetric:
            raise NotSymmetricError("set must contain the identity and be closed under inverses")

    def power(self, k: int) -> "SymSet":
        return power(self, k)

    def to_json(self) -> dict:
        return {"n": self.n, "elements": [element_to_json(g) for g in self.elements]}

    @classmethod
    def from_json(cls, obj: dict) -> "SymSet":
        n = obj["n"]
        elements = [element_from_json(e) for e in obj["elements"]]
        if any(g.n != n for g in elements):
            raise ValueError("element size disagrees with the set's 'n'")
        return cls.from_elements(elements, n)


def _common_frame(A: SymSet, B: SymSet) -> tuple[SymSet, SymSet]:
    if A.n != B.n:
        raise ValueError(f"size mismatch: U_{A.n} vs U_{B.n}")
    s = lcm(A.scale, B.scale)
    return A.with_scale(s), B.with_scale(s)


def product(A: SymSet, B: SymSet) -> SymSet:
    """The product set {ab : a in A, b in B}."""
    A, B = _common_frame(A, B)
    rows = kernels.product_rows(A.n, A.rows, B.rows)
    return SymSet(A.n, rows, A.scale, presorted=True)


def power(A: SymSet, k: int) -> SymSet:
    """A^k by left-to-right products A^(j+1) = A^j * A, memoised on A."""
    if k < 1:
        raise ValueError("power needs k >= 1")
    cache = A._powers
    j = max(i for i in cache if i <= k)
    cur = cache[j]
    while j < k:
        try:
            cur = SymSet(A.n, kernels.product_rows(A.n, cur.rows, A.rows, what=f"A^{j + 1}"), A.scale, presorted=True)
        except ResourceCapExceeded as exc:
            sizes = {i: len(s) for i, s in sorted(cache.items())}
            raise ResourceCapExceeded(f"{exc} (computed sizes so far: {sizes})", sizes=sizes, **exc.partial) from None
        j += 1
        cache[j] = cur
    return cur


def member_mask(A: SymSet, S: Subalgebra) -> np.ndarray:
    if A.n != S.n:
        raise ValueError("size mismatch between set and subalgebra")
    return coset_map(S, A.scale).members(A.rows)


def intersect_subgroup(A: SymSet, S: Subalgebra) -> SymSet:
    """{a in A : log a in S}."""
    return SymSet(A.n, A.rows[member_mask(A, S)], A.scale, presorted=True)


class CosetSet:
    """Left cosets g.exp(h) met by a set, one integral lift per coset.

    ``keys`` are the sorted canonical coset keys; ``lifts[i]`` is an element of
    coset ``keys[i]`` taken from the originating set.
    """

    def __init__(self, h: Subalgebra, scale: int, keys: np.ndarray, lifts: np.ndarray, witness=None):
        self.h = h
        self.n = h.n
        self.scale = scale
        self.keys = keys
        self.lifts = lifts
        self.witness = witness
        self.cmap = coset_map(h, scale)

    def __len__(self) -> int:
        return len(self.keys)

    def __repr__(self) -> str:
        return f"CosetSet(n={self.n}, dim h={self.h.dim}, cosets={len(self)})"

    def rep(self, i: int) -> UniTri:
        return self.cmap.rep_from_key(self.keys[i].tolist())

    @cached_property
    def reps(self) -> list[UniTri]:
        """Canonical representatives in canonical_key order."""
        return sorted((self.rep(i) for i in range(len(self))), key=canonical_key)

    def lift_element(self, i: int) -> UniTri:
        return row_element(self.n, self.scale, self.lifts[i])

    @cached_property
    def identity_index(self) -> int:
        zero = np.zeros((1, self.keys.shape[1]), dtype=self.keys.dtype)
        return int(kernels.find_rows(self.keys, zero)[0])

    def lifts_set(self) -> SymSet:
        return SymSet(self.n, self.lifts, self.scale)

    def index_of(self, rows: np.ndarray) -> np.ndarray:
        """Coset index of each integral row (in this set's frame), or -1."""
        return kernels.find_rows(self.keys, self.cmap.keys(rows))

    def to_json(self) -> dict:
        from .subalg import subalgebra_to_json

        return {"h": subalgebra_to_json(self.h), "reps": [element_to_json(g) for g in self.reps]}


def quotient_mod(A: SymSet, h: Subalgebra) -> CosetSet:
    """Canonical representatives of the cosets {a.exp(h) : a in A}."""
    if A.n != h.n:
        raise ValueError("size mismatch between set and subalgebra")
    cmap = coset_map(h, A.scale)
    keys, first = kernels.unique_rows(cmap.keys(A.rows), return_index=True)
    return CosetSet(h, A.scale, keys, A.rows[first])


def coset_product(P: CosetSet, Q: CosetSet, ctx: QuotientCtx | None = None) -> CosetSet:
    """Product of coset sets in G/H, computed on lifts.

    Well defined only when H is normal in a group containing every lift; pass
    ``ctx`` to have that checked.  ``witness`` holds, for each product coset,
    the first pair (i, j) of lift indices (i-major) whose product lands in it.
    """
    if P.h != Q.h or P.scale != Q.scale:
        raise SubalgebraError("coset sets modulo different subgroups")
    if ctx is not None and (ctx.h != P.h or not is_ideal(ctx)):
        raise SubalgebraError("h is not an ideal of g; G/H is not a group")
    keys, wi, wj = P.cmap.product_keys(P.lifts, Q.lifts)
    lifts = kernels.rowwise_mul(P.n, P.lifts[wi], Q.lifts[wj]) if len(wi) else P.lifts[:0]
    return CosetSet(P.h, P.scale, keys, lifts, witness=(wi, wj))


def coset_power(P: CosetSet, k: int, ctx: QuotientCtx | None = None) -> CosetSet:
    cur = P
    for _ in range(k - 1):
        cur = coset_product(cur, P, ctx)
    return cur
