"""Doubling statistics, K-approximate-group certificates, and exact checks of
the basic product-set inequalities for a set and a subgroup."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .finset import (
    SymSet,
    coset_product,
    intersect_subgroup,
    power,
    product,
    quotient_mod,
)
from .ratlinalg import format_rational, parse_rational
from .subalg import QuotientCtx, Subalgebra, is_ideal


@dataclass(frozen=True)
class ApproxCert:
    """X symmetric, X inside A^3, A.A inside X.A and |X| <= K."""

    K: Fraction
    X: SymSet
    for_set: SymSet

    def to_json(self) -> dict:
        return {"K": format_rational(self.K), "X": self.X.to_json()["elements"]}

    @classmethod
    def from_json(cls, obj: dict, A: SymSet) -> "ApproxCert":
        from .unigroup import element_from_json

        elements = [element_from_json(e) for e in obj["X"]]
        if elements:
            X = SymSet.from_elements(elements, A.n)
        else:
            X = SymSet(A.n, np.zeros((0, A.rows.shape[1]), np.int64))
        return cls(parse_rational(obj["K"]), X, A)


@dataclass(frozen=True)
class Clause:
    clause: str
    lhs: object
    rhs: object
    passed: bool | None
    note: str = ""

    def to_json(self) -> dict:
        out = {"clause": self.clause, "lhs": _num(self.lhs), "rhs": _num(self.rhs), "pass": self.passed}
        if self.note:
            out["note"] = self.note
        return out


def _num(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    return x


def doubling(A: SymSet) -> Fraction:
    """|A^2| / |A|."""
    A.require_symmetric()
    return Fraction(len(power(A, 2)), len(A))


def _mark_translates(A: SymSet, A2: SymSet, t: np.ndarray, covered: np.ndarray) -> None:
    hits = kernels.find_rows(A2.rows, kernels.rowwise_mul(A.n, t[None, :], A.rows))
    covered[hits[hits >= 0]] = True


def certify(A: SymSet) -> ApproxCert:
    """Greedy covering certificate.

    Elements s of A^2 are scanned in canonical_key order; whenever s is not
    yet in X.A, both s and s^-1 join X.  Hence X is symmetric, X is inside
    A^2 (a subset of A^3) and A^2 is inside X.A.  K = |X| is an upper bound,
    not the optimum.
    """
    A.require_symmetric()
    A2 = power(A, 2)
    covered = np.zeros(len(A2), dtype=bool)
    chosen: list[np.ndarray] = []
    inv_rows = kernels.inverse_rows(A.n, A2.rows)
    for idx in A2.canonical_order:
        if covered[idx]:
            continue
        s, s_inv = A2.rows[idx], inv_rows[idx]
        chosen.extend((s, s_inv))
        _mark_translates(A, A2, s, covered)
        _mark_translates(A, A2, s_inv, covered)
    X = SymSet(A.n, np.asarray(chosen, dtype=A2.rows.dtype).reshape(-1, A2.rows.shape[1]), A.scale)
    return ApproxCert(Fraction(len(X)), X, A)


def verify_cert(A: SymSet, c: ApproxCert) -> bool:
    """Direct check of every clause of the certificate."""
    return all(cl.passed for cl in cert_clauses(A, c))


def cert_clauses(A: SymSet, c: ApproxCert) -> list[Clause]:
    X = c.X
    out = [Clause("A symmetric", len(A), len(A), A.symmetric)]
    out.append(Clause("X symmetric", len(X), len(X), len(X) > 0 and X.symmetric))
    out.append(Clause("|X| <= K", len(X), c.K, len(X) <= c.K))
    if len(X) == 0:
        out.append(Clause("X in A^3", 0, 0, True))
        out.append(Clause("A^2 in X.A", len(power(A, 2)), 0, False))
        return out
    X, A_ = _same_frame(X, A)
    A3 = power(A_, 3)
    out.append(Clause("X in A^3", len(X), len(A3), bool((kernels.find_rows(A3.rows, X.rows) >= 0).all())))
    A2 = power(A_, 2)
    XA = product(X, A_)
    out.append(Clause("A^2 in X.A", len(A2), len(XA), bool((kernels.find_rows(XA.rows, A2.rows) >= 0).all())))
    return out


def _same_frame(X: SymSet, A: SymSet) -> tuple[SymSet, SymSet]:
    from math import lcm

    s = lcm(X.scale, A.scale)
    return X.with_scale(s), A.with_scale(s)


def check_calculus(A: SymSet, c: ApproxCert, H: Subalgebra, kmax: int) -> list[Clause]:
    """Exact truth values of the product-set calculus for A and the subgroup exp(H).

    (i)   |A| <= |A^2 n H| |AH/H| <= |A^3|
    (ii)  |A^k n H| <= K^(k-1) |A^2 n H| for 1 <= k <= kmax
    (iii) when H is normal, the image of X certifies the image of A at the same K
    """
    A.require_symmetric()
    K = c.K
    A2H = len(intersect_subgroup(power(A, 2), H))
    AHH = len(quotient_mod(A, H))
    A3 = len(power(A, 3))
    out = [
        Clause("(i) |A| <= |A^2 n H| |AH/H|", len(A), A2H * AHH, len(A) <= A2H * AHH),
        Clause("(i) |A^2 n H| |AH/H| <= |A^3|", A2H * AHH, A3, A2H * AHH <= A3),
    ]
    for k in range(1, kmax + 1):
        lhs = len(intersect_subgroup(power(A, k), H))
        rhs = K ** (k - 1) * A2H
        out.append(Clause(f"(ii) |A^{k} n H| <= K^{k - 1} |A^2 n H|", lhs, rhs, lhs <= rhs))
    full = Subalgebra.full(A.n)
    if not is_ideal(QuotientCtx(full, H)):
        out.append(Clause("(iii) image certificate", None, None, None, "H is not normal in U_n; no quotient homomorphism"))
        return out
    out.extend(quotient_cert_clauses(A, c, H))
    return out


def quotient_cert_clauses(A: SymSet, c: ApproxCert, H: Subalgebra) -> list[Clause]:
    """Clauses for pi(X) certifying pi(A) in U_n / exp(H), H normal."""
    ctx = QuotientCtx(Subalgebra.full(A.n), H)
    X, A_ = _same_frame(c.X, A)
    Aq = quotient_mod(A_, H)
    Xq = quotient_mod(X, H)
    out = [Clause("(iii) |pi(X)| <= K", len(Xq), c.K, len(Xq) <= c.K)]
    inv_idx = Xq.index_of(kernels.inverse_rows(A.n, Xq.lifts))
    has_id = Xq.identity_index >= 0
    out.append(Clause("(iii) pi(X) symmetric", len(Xq), len(Xq), bool(has_id and (inv_idx >= 0).all())))
    Aq3 = coset_product(coset_product(Aq, Aq, ctx), Aq, ctx)
    inside = (Aq3.index_of(Xq.lifts) >= 0).all()
    out.append(Clause("(iii) pi(X) in pi(A)^3", len(Xq), len(Aq3), bool(inside)))
    Aq2 = coset_product(Aq, Aq, ctx)
    XqAq = coset_product(Xq, Aq, ctx)
    covered = (XqAq.index_of(Aq2.lifts) >= 0).all()
    out.append(Clause("(iii) pi(A)^2 in pi(X).pi(A)", len(Aq2), len(XqAq), bool(covered)))
    return out


def report_json(clauses: list[Clause]) -> list[dict]:
    return [cl.to_json() for cl in clauses]


__all__ = [
    "ApproxCert",
    "Clause",
    "certify",
    "check_calculus",
    "doubling",
    "quotient_cert_clauses",
    "verify_cert",
]
