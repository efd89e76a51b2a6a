"""Exact rational linear algebra on the coordinate space of strictly upper
triangular n x n matrices.

Coordinates are graded: superdiagonal index ``d = col - row`` ascending, then
row ascending.  For n = 3 the order is (0,1), (1,2), (0,2).
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

CoordVector = tuple  # tuple[Fraction, ...] of length n(n-1)/2


class DimensionError(ValueError):
    """Inputs live in different ambient coordinate spaces."""


@lru_cache(maxsize=None)
def coord_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """Matrix positions (row, col) in graded coordinate order."""
    return tuple((i, i + d) for d in range(1, n) for i in range(n - d))


@lru_cache(maxsize=None)
def coord_index(n: int) -> dict[tuple[int, int], int]:
    return {p: q for q, p in enumerate(coord_pairs(n))}


@lru_cache(maxsize=None)
def coord_degrees(n: int) -> tuple[int, ...]:
    return tuple(j - i for i, j in coord_pairs(n))


def coord_dim(n: int) -> int:
    return n * (n - 1) // 2


def ambient_from_dim(m: int) -> int:
    n = 1
    while coord_dim(n) < m:
        n += 1
    if coord_dim(n) != m:
        raise DimensionError(f"{m} is not a triangular number")
    return n


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))  # numpy integers would otherwise leak into the numerator
    return Fraction(x)


def parse_rational(s: str) -> Fraction:
    """Parse "p/q" or "p"; rejects floats and malformed strings."""
    if not isinstance(s, str):
        raise TypeError(f"rational must be encoded as a string, got {type(s).__name__}")
    text = s.strip()
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {s!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {s!r}")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def zero_vector(n: int) -> CoordVector:
    return (Fraction(0),) * coord_dim(n)


def unit_vector(n: int, q: int) -> CoordVector:
    v = [Fraction(0)] * coord_dim(n)
    v[q] = Fraction(1)
    return tuple(v)


def _check_len(vectors: Sequence[Sequence], m: int) -> None:
    for v in vectors:
        if len(v) != m:
            raise DimensionError(f"vector of length {len(v)} in a space of dimension {m}")


def _rref_rows(rows: list[list[Fraction]], m: int) -> tuple[list[list[Fraction]], list[int]]:
    """In-place Gauss-Jordan elimination; returns nonzero rows and pivots."""
    pivots: list[int] = []
    r = 0
    for c in range(m):
        if r == len(rows):
            break
        sel = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        piv = rows[r][c]
        if piv != 1:
            rows[r] = [x / piv for x in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f != 0:
                    rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


@dataclass(frozen=True)
class Subspace:
    """A rational subspace stored by its unique reduced row-echelon basis."""

    ambient_n: int
    basis: tuple[CoordVector, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def coord_dim(self) -> int:
        return coord_dim(self.ambient_n)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(c for c, x in enumerate(b) if x != 0) for b in self.basis)

    def __contains__(self, v) -> bool:
        return member(self, v)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(member(other, b) for b in self.basis)

    def reduce(self, v: Sequence[Fraction]) -> CoordVector:
        """Residual of ``v`` after clearing every pivot coordinate; zero iff v is in the span."""
        out = list(v)
        for b, p in zip(self.basis, self.pivots):
            c = out[p]
            if c != 0:
                out = [x - c * y for x, y in zip(out, b)]
        return tuple(out)

    def coefficients(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Coordinates of ``v`` in the canonical basis (v must be a member)."""
        return tuple(Fraction(v[p]) for p in self.pivots)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(unit_vector(n, q) for q in range(coord_dim(n))))


def rref(vectors: Iterable[Sequence], n: int) -> Subspace:
    """Canonical reduced basis of the span of ``vectors`` in the U_n coordinate space."""
    m = coord_dim(n)
    rows = [[as_fraction(x) for x in v] for v in vectors]
    _check_len(rows, m)
    reduced, _ = _rref_rows(rows, m)
    return Subspace(n, tuple(tuple(r) for r in reduced))


def member(S: Subspace, v: Sequence) -> bool:
    if len(v) != S.coord_dim:
        raise DimensionError(f"vector of length {len(v)} vs ambient dimension {S.coord_dim}")
    return not any(S.reduce([as_fraction(x) for x in v]))


def subspace_sum(S1: Subspace, S2: Subspace) -> Subspace:
    if S1.ambient_n != S2.ambient_n:
        raise DimensionError("subspaces of different ambient groups")
    return rref(S1.basis + S2.basis, S1.ambient_n)


def nullspace(matrix: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of {t : matrix @ t = 0}, one vector per free column."""
    rows = [[as_fraction(x) for x in r] for r in matrix]
    reduced, pivots = _rref_rows(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        t = [Fraction(0)] * ncols
        t[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            t[p] = -row[f]
        basis.append(t)
    return basis


def apply_map(map_matrix: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in map_matrix]


def kernel(map_matrix: Sequence[Sequence], domain: Subspace) -> Subspace:
    """{v in domain : map_matrix @ v = 0}, where the map acts on ambient coordinates."""
    m = domain.coord_dim
    if any(len(row) != m for row in map_matrix):
        raise DimensionError("map matrix columns do not match the ambient coordinate dimension")
    if domain.dim == 0:
        return domain
    # columns of M @ B^T, one per basis vector of the domain
    images = [apply_map(map_matrix, b) for b in domain.basis]
    restricted = [[img[i] for img in images] for i in range(len(map_matrix))]
    sols = nullspace(restricted, domain.dim)
    vecs = []
    for t in sols:
        vecs.append([sum((ti * b[q] for ti, b in zip(t, domain.basis)), Fraction(0)) for q in range(m)])
    return rref(vecs, domain.ambient_n)
