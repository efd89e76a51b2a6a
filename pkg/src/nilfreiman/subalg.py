"""Closed connected subgroups of U_n(R), held as bracket-closed rational subspaces.

A subalgebra ``h`` stands for the subgroup ``exp(h)``.  Quotients G/H are
never built as groups of their own: a :class:`QuotientCtx` pairs the two
subalgebras and cosets are named by canonical representatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .ratlinalg import (
    DimensionError,
    Subspace,
    coord_dim,
    format_rational,
    kernel,
    member,
    parse_rational,
    rref,
    subspace_sum,
    unit_vector,
)
from .unigroup import NilVec, UniTri, _lie_bracket, exp, log, mul


class SubalgebraError(ValueError):
    """A subspace is not bracket-closed, or a quotient context is malformed."""


class InvariantViolation(AssertionError):
    """An invariant that the construction guarantees was found broken."""


def _brackets_close(space: Subspace) -> bool:
    n = space.ambient_n
    B = space.basis
    return all(
        member(space, _lie_bracket(B[i], B[j], n)) for i in range(len(B)) for j in range(i + 1, len(B))
    )


@dataclass(frozen=True)
class Subalgebra:
    space: Subspace

    def __post_init__(self):
        if not _brackets_close(self.space):
            raise SubalgebraError("subspace is not closed under the matrix bracket")

    @property
    def n(self) -> int:
        return self.space.ambient_n

    ambient_n = n

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> tuple:
        return self.space.basis

    @property
    def pivots(self) -> tuple[int, ...]:
        return self.space.pivots

    def __contains__(self, X) -> bool:
        coords = X.coords if isinstance(X, NilVec) else X
        return member(self.space, coords)

    def __le__(self, other: "Subalgebra") -> bool:
        return self.space.is_subspace_of(other.space)

    def __lt__(self, other: "Subalgebra") -> bool:
        return self <= other and self.dim < other.dim

    @classmethod
    def zero(cls, n: int) -> "Subalgebra":
        return cls(Subspace.zero(n))

    @classmethod
    def full(cls, n: int) -> "Subalgebra":
        return cls(Subspace.full(n))

    @classmethod
    def span(cls, n: int, vectors: Iterable) -> "Subalgebra":
        """Span of the given vectors, which must already be bracket-closed."""
        vecs = [v.coords if isinstance(v, NilVec) else v for v in vectors]
        return cls(rref(vecs, n))

    def basis_nilvecs(self) -> list[NilVec]:
        return [NilVec(self.n, b) for b in self.basis]


@dataclass(frozen=True)
class QuotientCtx:
    """The pair (G_k, H_k): h must sit inside g; normality is checked by :func:`is_ideal`."""

    g: Subalgebra
    h: Subalgebra

    def __post_init__(self):
        if self.g.n != self.h.n:
            raise DimensionError("g and h live in different ambient groups")
        if not self.h <= self.g:
            raise SubalgebraError("h is not contained in g")


def lie_closure(gens: Sequence[NilVec], n: int | None = None) -> Subalgebra:
    """Smallest bracket-closed subspace containing the generators."""
    if n is None:
        if not gens:
            raise ValueError("ambient n is required for an empty generator list")
        n = gens[0].n
    if any(X.n != n for X in gens):
        raise DimensionError("generators of different ambient sizes")
    space = rref([X.coords for X in gens], n)
    for _ in range(coord_dim(n) + 1):
        B = space.basis
        brackets = [_lie_bracket(B[i], B[j], n) for i in range(len(B)) for j in range(i + 1, len(B))]
        grown = rref(list(B) + brackets, n)
        if grown.dim == space.dim:
            return Subalgebra(space)
        space = grown
    raise InvariantViolation("bracket saturation did not stabilise")  # pragma: no cover


def contains_elt(S: Subalgebra, g: UniTri) -> bool:
    if S.n != g.n:
        raise DimensionError(f"U_{g.n} element tested against a subalgebra of U_{S.n}")
    return member(S.space, log(g).coords)


def is_ideal(ctx: QuotientCtx) -> bool:
    n = ctx.g.n
    return all(member(ctx.h.space, _lie_bracket(b, c, n)) for b in ctx.g.basis for c in ctx.h.basis)


def extend_by(ctx: QuotientCtx, log_gamma: NilVec) -> Subalgebra:
    """h + Q.log_gamma, re-verified to be a subalgebra of dimension dim(h) + 1."""
    if log_gamma not in ctx.g:
        raise SubalgebraError("log(gamma) is not in g")
    if log_gamma in ctx.h:
        raise SubalgebraError("log(gamma) already lies in h")
    space = rref(list(ctx.h.basis) + [log_gamma.coords], ctx.h.n)
    if space.dim != ctx.h.dim + 1:
        raise InvariantViolation("extending h by log(gamma) did not raise the dimension by one")
    if not _brackets_close(space):
        raise InvariantViolation("h + Q.log(gamma) is not bracket-closed")
    return Subalgebra(space)


def _bracket_mod_h_matrix(ctx: QuotientCtx, X: NilVec) -> list[list[Fraction]]:
    """Matrix of Y -> [Y, X] reduced modulo h, acting on ambient coordinates."""
    n = X.n
    m = coord_dim(n)
    cols = [ctx.h.space.reduce(_lie_bracket(unit_vector(n, q), X.coords, n)) for q in range(m)]
    return [[cols[q][r] for q in range(m)] for r in range(m)]


def centralizer_preimage(ctx: QuotientCtx, log_gamma: NilVec) -> Subalgebra:
    """{Y in g : [Y, log_gamma] in h}: the Lie algebra of the preimage of C_{G/H}(gamma H)."""
    if log_gamma not in ctx.g:
        raise SubalgebraError("log(gamma) is not in g")
    space = kernel(_bracket_mod_h_matrix(ctx, log_gamma), ctx.g.space)
    out = Subalgebra(space)
    if not (ctx.h <= out and log_gamma in out):
        raise InvariantViolation("centralizer preimage does not sit between h and g")
    return out


def lower_central_series(ctx: QuotientCtx) -> list[Subalgebra]:
    """Pullbacks c_1 = g, c_{i+1} = [g, c_i] + h of the lower central series of G/H."""
    n = ctx.g.n
    series = [ctx.g]
    cur = ctx.g
    while cur.dim != ctx.h.dim:
        brackets = [_lie_bracket(b, c, n) for b in ctx.g.basis for c in cur.basis]
        nxt = Subalgebra(subspace_sum(rref(brackets, n), ctx.h.space))
        if nxt.dim == cur.dim:
            raise InvariantViolation("lower central series stalled above h: g/h is not nilpotent")
        series.append(nxt)
        cur = nxt
    return series


def canon_coset(h: Subalgebra, g: UniTri) -> UniTri:
    """Canonical representative of the left coset g.exp(h).

    Sweeps the pivots of h's graded basis in ascending order, right-multiplying
    by exp(-c B_j) to clear the matrix entry at each pivot.  The result has a
    zero entry at every pivot position and depends only on the coset.
    """
    if h.n != g.n:
        raise DimensionError("size mismatch between coset and subalgebra")
    pivots = h.pivots
    cur = g
    for _ in range(max(h.n - 1, 1)):
        for B, p in zip(h.basis, pivots):
            c = cur.coords[p]
            if c:
                cur = mul(cur, exp(NilVec(h.n, tuple(-c * x for x in B))))
        if not any(cur.coords[p] for p in pivots):
            return cur
    raise InvariantViolation("coset sweep failed to clear the pivot entries")  # pragma: no cover


# -- JSON -----------------------------------------------------------------


def subalgebra_to_json(S: Subalgebra) -> dict:
    return {"n": S.n, "basis": [[format_rational(x) for x in b] for b in S.basis]}


def subalgebra_from_json(obj: dict) -> Subalgebra:
    n = obj["n"]
    vecs = [[parse_rational(x) for x in b] for b in obj["basis"]]
    return Subalgebra(rref(vecs, n))
