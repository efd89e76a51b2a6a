"""The group U_n of upper unitriangular rational matrices and its Lie algebra.

Elements are stored by their strictly-upper entries in graded coordinate
order (see :mod:`nilfreiman.ratlinalg`).  Everything is exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

from .ratlinalg import (
    as_fraction,
    coord_dim,
    coord_index,
    coord_pairs,
    format_rational,
    parse_rational,
)

MIN_N = 2
MAX_N = 8


class UnitriangularError(ValueError):
    """A matrix violates the unitriangular (or strictly upper) shape."""


def check_n(n: int) -> int:
    if not isinstance(n, int) or not MIN_N <= n <= MAX_N:
        raise ValueError(f"ambient size n must be an integer in [{MIN_N}, {MAX_N}], got {n!r}")
    return n


@lru_cache(maxsize=None)
def product_table(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """For each coordinate (i, j): the pairs of coordinates ((i, k), (k, j)) with i < k < j."""
    idx = coord_index(n)
    return tuple(
        tuple((idx[(i, k)], idx[(k, j)]) for k in range(i + 1, j)) for i, j in coord_pairs(n)
    )


@lru_cache(maxsize=None)
def bracket_table(n: int) -> tuple[tuple[int, int, int], ...]:
    """Nonzero structure constants: ([E_a, E_b])_c = 1 for each (a, b, c) listed.

    [E_ik, E_kj] = E_ij; antisymmetry is applied by the caller.
    """
    idx = coord_index(n)
    return tuple(
        (idx[(i, k)], idx[(k, j)], idx[(i, j)]) for i, j in coord_pairs(n) for k in range(i + 1, j)
    )


def _strict_mul(x: Sequence, y: Sequence, n: int) -> list:
    """Product of two strictly upper triangular matrices given by coordinates."""
    return [sum((x[a] * y[b] for a, b in terms), Fraction(0)) for terms in product_table(n)]


def _lie_bracket(x: Sequence, y: Sequence, n: int) -> list:
    out = [Fraction(0)] * len(x)
    for a, b, c in bracket_table(n):
        xa, yb = x[a], y[b]
        ya, xb = y[a], x[b]
        if xa and yb:
            out[c] += xa * yb
        if ya and xb:
            out[c] -= ya * xb
    return out


@dataclass(frozen=True)
class NilVec:
    """An element of the Lie algebra of U_n: a strictly upper triangular matrix."""

    n: int
    coords: tuple

    def __post_init__(self):
        check_n(self.n)
        if len(self.coords) != coord_dim(self.n):
            raise UnitriangularError(f"expected {coord_dim(self.n)} coordinates for n={self.n}")

    @classmethod
    def from_coords(cls, n: int, coords: Sequence) -> "NilVec":
        return cls(n, tuple(as_fraction(c) for c in coords))

    @classmethod
    def zero(cls, n: int) -> "NilVec":
        return cls(n, (Fraction(0),) * coord_dim(n))

    @classmethod
    def elementary(cls, n: int, i: int, j: int, t=1) -> "NilVec":
        """t * E_{ij} with 1-based (i, j), i < j."""
        v = [Fraction(0)] * coord_dim(n)
        v[coord_index(n)[(i - 1, j - 1)]] = as_fraction(t)
        return cls(n, tuple(v))

    def __add__(self, other: "NilVec") -> "NilVec":
        _same_n(self, other)
        return NilVec(self.n, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "NilVec") -> "NilVec":
        _same_n(self, other)
        return NilVec(self.n, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "NilVec":
        return NilVec(self.n, tuple(-a for a in self.coords))

    def scale(self, t) -> "NilVec":
        t = as_fraction(t)
        return NilVec(self.n, tuple(t * a for a in self.coords))

    __rmul__ = scale

    def bracket(self, other: "NilVec") -> "NilVec":
        _same_n(self, other)
        return NilVec(self.n, tuple(_lie_bracket(self.coords, other.coords, self.n)))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def matrix(self) -> list[list[Fraction]]:
        m = [[Fraction(0)] * self.n for _ in range(self.n)]
        for (i, j), x in zip(coord_pairs(self.n), self.coords):
            m[i][j] = x
        return m


@dataclass(frozen=True)
class UniTri:
    """An upper unitriangular n x n matrix with rational entries."""

    n: int
    coords: tuple

    def __post_init__(self):
        check_n(self.n)
        if len(self.coords) != coord_dim(self.n):
            raise UnitriangularError(f"expected {coord_dim(self.n)} coordinates for n={self.n}")

    @classmethod
    def from_coords(cls, n: int, coords: Sequence) -> "UniTri":
        return cls(n, tuple(as_fraction(c) for c in coords))

    @classmethod
    def identity(cls, n: int) -> "UniTri":
        return cls(n, (Fraction(0),) * coord_dim(n))

    @classmethod
    def elementary(cls, n: int, i: int, j: int, t=1) -> "UniTri":
        """I + t * E_{ij} with 1-based (i, j)."""
        return cls(n, NilVec.elementary(n, i, j, t).coords)

    @classmethod
    def heisenberg(cls, a, b, c) -> "UniTri":
        """U_3 element with (1,2) = a, (2,3) = b, (1,3) = c."""
        return cls.from_coords(3, (a, b, c))

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence]) -> "UniTri":
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise UnitriangularError("matrix is not square")
        check_n(n)
        entries = [[as_fraction(x) for x in r] for r in rows]
        for i in range(n):
            if entries[i][i] != 1:
                raise UnitriangularError(f"diagonal entry ({i + 1},{i + 1}) is {entries[i][i]}, not 1")
            for j in range(i):
                if entries[i][j] != 0:
                    raise UnitriangularError(f"entry ({i + 1},{j + 1}) below the diagonal is nonzero")
        return cls(n, tuple(entries[i][j] for i, j in coord_pairs(n)))

    def entry(self, i: int, j: int) -> Fraction:
        """Matrix entry with 1-based indices."""
        if i == j:
            return Fraction(1)
        if i > j:
            return Fraction(0)
        return self.coords[coord_index(self.n)[(i - 1, j - 1)]]

    def matrix(self) -> list[list[Fraction]]:
        m = [[Fraction(int(i == j)) for j in range(self.n)] for i in range(self.n)]
        for (i, j), x in zip(coord_pairs(self.n), self.coords):
            m[i][j] = x
        return m

    def is_identity(self) -> bool:
        return not any(self.coords)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.coords)

    def __mul__(self, other: "UniTri") -> "UniTri":
        return mul(self, other)

    def __pow__(self, k: int) -> "UniTri":
        return power(self, k)

    def __lt__(self, other: "UniTri") -> bool:
        return canonical_key(self) < canonical_key(other)


def _same_n(a, b) -> None:
    if a.n != b.n:
        raise UnitriangularError(f"size mismatch: U_{a.n} vs U_{b.n}")


def mul(g: UniTri, h: UniTri) -> UniTri:
    _same_n(g, h)
    x, y = g.coords, h.coords
    out = []
    for q, terms in enumerate(product_table(g.n)):
        s = x[q] + y[q]
        for a, b in terms:
            if x[a] and y[b]:
                s += x[a] * y[b]
        out.append(s)
    return UniTri(g.n, tuple(out))


def inv(g: UniTri) -> UniTri:
    # solve g * y = I coordinate by coordinate in increasing degree
    x = g.coords
    y = [Fraction(0)] * len(x)
    for q, terms in enumerate(product_table(g.n)):
        s = -x[q]
        for a, b in terms:
            if x[a] and y[b]:
                s -= x[a] * y[b]
        y[q] = s
    return UniTri(g.n, tuple(y))


def comm(g: UniTri, h: UniTri) -> UniTri:
    """The commutator g^-1 h^-1 g h."""
    return mul(mul(inv(g), inv(h)), mul(g, h))


def power(g: UniTri, k: int) -> UniTri:
    if k < 0:
        return power(inv(g), -k)
    out = UniTri.identity(g.n)
    base = g
    while k:
        if k & 1:
            out = mul(out, base)
        base = mul(base, base)
        k >>= 1
    return out


def log(g: UniTri) -> NilVec:
    """log(I + N) = sum_{k>=1} (-1)^(k+1) N^k / k, a finite sum since N^n = 0."""
    n = g.n
    N = list(g.coords)
    acc = list(N)
    Nk = N
    for k in range(2, n):
        Nk = _strict_mul(Nk, N, n)
        c = Fraction((-1) ** (k + 1), k)
        acc = [a + c * b for a, b in zip(acc, Nk)]
    return NilVec(n, tuple(acc))


def exp(X: NilVec) -> UniTri:
    """exp(X) = sum_k X^k / k!, finite since X^n = 0."""
    n = X.n
    acc = list(X.coords)
    Xk = list(X.coords)
    for k in range(2, n):
        Xk = _strict_mul(Xk, X.coords, n)
        c = Fraction(1, factorial(k))
        acc = [a + c * b for a, b in zip(acc, Xk)]
    return UniTri(n, tuple(acc))


def _int_bytes(v: int) -> bytes:
    raw = v.to_bytes((v.bit_length() + 8) // 8 or 1, "big", signed=True)
    return struct.pack(">I", len(raw)) + raw


def canonical_key(g: UniTri) -> bytes:
    """Injective byte encoding: n, then length-prefixed numerator/denominator per coordinate."""
    parts = [struct.pack(">B", g.n)]
    for x in g.coords:
        parts.append(_int_bytes(x.numerator))
        parts.append(_int_bytes(x.denominator))
    return b"".join(parts)


def canonical_key_ints(n: int, coords: Sequence[int]) -> bytes:
    """canonical_key for an integral element given by plain integer coordinates."""
    one = _int_bytes(1)
    return struct.pack(">B", n) + b"".join(_int_bytes(int(v)) + one for v in coords)


# -- JSON encodings -------------------------------------------------------


def element_to_json(g: UniTri) -> dict:
    return {"n": g.n, "rows": [[format_rational(x) for x in row] for row in g.matrix()]}


def element_from_json(obj: dict) -> UniTri:
    if not isinstance(obj, dict) or "rows" not in obj or "n" not in obj:
        raise UnitriangularError("element JSON needs keys 'n' and 'rows'")
    rows = obj["rows"]
    if len(rows) != obj["n"]:
        raise UnitriangularError(f"'n' is {obj['n']} but {len(rows)} rows were given")
    return UniTri.from_matrix([[parse_rational(x) for x in r] for r in rows])


def nilvec_to_json(X: NilVec) -> list[str]:
    return [format_rational(x) for x in X.coords]
