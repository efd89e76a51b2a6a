"""The large-centralizer procedure, the iterative covering construction and
the Gleason-type growth checks.

Every inequality is checked in exact integer or rational arithmetic and
recorded as a :class:`~nilfreiman.approxcert.Clause`; nothing here rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .approxcert import ApproxCert, Clause
from .cosetmap import coset_map
from .finset import (
    CosetSet,
    SymSet,
    coset_power,
    coset_product,
    intersect_subgroup,
    _frame_rows,
    member_mask,
    power,
    product,
    quotient_mod,
    row_element,
)
from .kernels import ResourceCapExceeded
from .ratlinalg import coord_dim, format_rational, member
from .subalg import (
    InvariantViolation,
    QuotientCtx,
    Subalgebra,
    SubalgebraError,
    _lie_bracket,
    canon_coset,
    centralizer_preimage,
    contains_elt,
    extend_by,
    is_ideal,
    lie_closure,
    lower_central_series,
    subalgebra_to_json,
)
from .unigroup import UniTri, canonical_key, comm, element_to_json, inv, log, mul

COVER_STEP_EXPONENT = 29


class TrivialSetError(ValueError):
    """The coset set is {id}: there is no non-identity element to work with."""


@dataclass
class CentralizerWitness:
    gamma: UniTri
    gamma_lift: UniTri
    witness_pair: tuple[UniTri, UniTri]
    depth: int
    popular_value: UniTri
    count: int
    centralizer_count: int
    centralizer: Subalgebra
    series: list[Subalgebra]
    n_classes: int
    size: int
    square_size: int
    internal_bound: Clause
    exhaustive: dict | None = None

    def to_json(self) -> dict:
        out = {
            "gamma": element_to_json(self.gamma),
            "gamma_lift": element_to_json(self.gamma_lift),
            "witness_pair": [element_to_json(g) for g in self.witness_pair],
            "depth": self.depth,
            "popular_value": element_to_json(self.popular_value),
            "count": self.count,
            "n_classes": self.n_classes,
            "centralizer_count": self.centralizer_count,
            "centralizer": subalgebra_to_json(self.centralizer),
            "set_size": self.size,
            "square_size": self.square_size,
            "internal_bound": self.internal_bound.to_json(),
        }
        if self.exhaustive is not None:
            out["exhaustive"] = self.exhaustive
        return out


def _comm_rows(n: int, gamma_row: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Rows of [gamma, x] = gamma^-1 x^-1 gamma x for every row x."""
    g = gamma_row[None, :]
    left = kernels.rowwise_mul(n, kernels.inverse_rows(n, g), kernels.inverse_rows(n, X))
    right = kernels.rowwise_mul(n, g, X)
    return kernels.rowwise_mul(n, left, right)


def _argmin_key(elements: Sequence[UniTri]) -> int:
    keys = [canonical_key(g) for g in elements]
    return min(range(len(keys)), key=keys.__getitem__)


def find_central_element(
    Aq: CosetSet,
    ctx: QuotientCtx,
    K_q: Fraction | None = None,
    exhaustive: bool = False,
) -> CentralizerWitness:
    """Pick gamma in the deepest lower-central term met by Aq^2 and count its centralizer.

    Aq holds cosets of ctx.h with lifts in ctx.g.  The commutator classes
    [gamma, a] mod h over a in Aq are tallied to find the most popular one.
    When ``K_q`` is given, |Aq^6 n c_(depth+1)| <= K_q^6 is also checked.
    """
    if Aq.h != ctx.h:
        raise SubalgebraError("coset set and context use different subgroups h")
    if len(Aq) <= 1:
        raise TrivialSetError("coset set is trivial; the covering loop should stop here")
    if not is_ideal(ctx):
        raise SubalgebraError("h is not an ideal of g")
    n, scale = Aq.n, Aq.scale
    sq = coset_product(Aq, Aq)
    series = lower_central_series(ctx)
    not_id = np.ones(len(sq), dtype=bool)
    if sq.identity_index >= 0:
        not_id[sq.identity_index] = False

    depth, cand = 0, None
    for j in range(len(series), 0, -1):
        mask = coset_map(series[j - 1], scale).members(sq.lifts) & not_id
        if mask.any():
            depth, cand = j, np.flatnonzero(mask)
            break
    if cand is None:  # pragma: no cover - c_1 = g always contains Aq^2
        raise InvariantViolation("Aq^2 meets no term of the lower central series")

    reps = [sq.rep(int(i)) for i in cand]
    pick = int(cand[_argmin_key(reps)])
    gamma = sq.rep(pick)
    gamma_row = sq.lifts[pick]
    gamma_lift = row_element(n, scale, gamma_row)
    wi, wj = sq.witness
    pair = (Aq.lift_element(int(wi[pick])), Aq.lift_element(int(wj[pick])))

    ckeys = Aq.cmap.keys(_comm_rows(n, gamma_row, Aq.lifts))
    classes, first = kernels.unique_rows(ckeys, return_index=True)
    counts = np.bincount(kernels.find_rows(classes, ckeys), minlength=len(classes))
    best = int(counts.max())
    tied = np.flatnonzero(counts == best)
    tied_reps = [Aq.cmap.rep_from_key(classes[i].tolist()) for i in tied]
    popular = tied_reps[_argmin_key(tied_reps)]

    cent = centralizer_preimage(ctx, log(gamma_lift))
    cent_count = int(coset_map(cent, scale).members(sq.lifts).sum())

    bound = _internal_bound(Aq, ctx, series, depth, K_q)
    ex = _exhaustive_scan(sq, ctx, not_id, len(Aq), K_q) if exhaustive else None
    return CentralizerWitness(
        gamma=gamma,
        gamma_lift=gamma_lift,
        witness_pair=pair,
        depth=depth,
        popular_value=popular,
        count=best,
        centralizer_count=cent_count,
        centralizer=cent,
        series=series,
        n_classes=len(classes),
        size=len(Aq),
        square_size=len(sq),
        internal_bound=bound,
        exhaustive=ex,
    )


def _internal_bound(Aq: CosetSet, ctx, series, depth: int, K_q) -> Clause:
    name = f"|A^6 n C_{depth + 1}| <= K^6"
    rhs = None if K_q is None else Fraction(K_q) ** 6
    nxt = series[depth] if depth < len(series) else ctx.h
    if nxt.dim == ctx.h.dim:
        # C_(depth+1) is the trivial subgroup of G/H; A^6 contains the identity
        return Clause(name, 1, rhs, None if rhs is None else 1 <= rhs, "C_(depth+1) is trivial")
    try:
        six = coset_power(Aq, 6)
    except ResourceCapExceeded as exc:
        return Clause(name, None, rhs, None, f"skipped: size ({exc})")
    lhs = int(coset_map(nxt, Aq.scale).members(six.lifts).sum())
    return Clause(name, lhs, rhs, None if rhs is None else lhs <= rhs)


def _exhaustive_scan(sq: CosetSet, ctx: QuotientCtx, not_id: np.ndarray, size: int, K_q) -> dict:
    best_count, best_rep, rows = -1, None, []
    for i in np.flatnonzero(not_id):
        lift = row_element(sq.n, sq.scale, sq.lifts[i])
        cent = centralizer_preimage(ctx, log(lift))
        cnt = int(coset_map(cent, sq.scale).members(sq.lifts).sum())
        rep = sq.rep(int(i))
        rows.append(cnt)
        if cnt > best_count or (cnt == best_count and canonical_key(rep) < canonical_key(best_rep)):
            best_count, best_rep = cnt, rep
    out = {"candidates": len(rows), "best_count": best_count, "best_gamma": element_to_json(best_rep)}
    if K_q is not None:
        out["all_meet_bound"] = all(c * Fraction(K_q) ** 6 >= size for c in rows)
    return out


# -- the bound for the whole set ---------------------------------------------


def check_centralizer_bound(A: SymSet, cert: ApproxCert, exhaustive: bool = False) -> "CentralizerReport":
    """Centralizer bound |A^2 n C(gamma)| K^6 >= |A| with the pigeonhole chain made explicit."""
    A.require_symmetric()
    n = A.n
    K = cert.K
    ctx = QuotientCtx(Subalgebra.full(n), Subalgebra.zero(n))
    Aq = quotient_mod(A, ctx.h)
    w = find_central_element(Aq, ctx, K_q=K, exhaustive=exhaustive)
    clauses = [
        Clause("|A^2 n C(gamma)| K^6 >= |A|", w.centralizer_count * K**6, len(A), w.centralizer_count * K**6 >= len(A)),
        w.internal_bound,
        Clause("gamma in A^2, gamma != id", 1, 1, (not w.gamma.is_identity()) and w.gamma in power(A, 2)),
    ]
    # pigeonhole chain: x, y with the popular commutator give x^-1 y in C(gamma)
    gamma_row = _frame_rows([w.gamma_lift], n, A.scale)[0]
    crow = _comm_rows(n, gamma_row, A.rows)
    pop_row = _frame_rows([w.popular_value], n, A.scale)[0]
    P_rows = A.rows[(crow == pop_row).all(axis=1)]
    P = SymSet(n, P_rows, A.scale, presorted=True)
    D = product(P.inverse(), P)
    A2 = power(A, 2)
    in_A2 = bool((kernels.find_rows(A2.rows, D.rows) >= 0).all())
    g_rep = np.broadcast_to(gamma_row, D.rows.shape)
    commute = bool(np.array_equal(kernels.rowwise_mul(n, g_rep, D.rows), kernels.rowwise_mul(n, D.rows, g_rep)))
    clauses += [
        Clause("count >= |A| / #classes", w.count * w.n_classes, len(A), w.count * w.n_classes >= len(A)),
        Clause("#classes <= K^6", w.n_classes, K**6, w.n_classes <= K**6),
        Clause("|D| >= count", len(D), w.count, len(D) >= w.count and len(P) == w.count),
        Clause("D in A^2", len(D), len(A2), in_A2),
        Clause("D commutes with gamma", len(D), len(D), commute),
        Clause("|A^2 n C(gamma)| >= |D|", w.centralizer_count, len(D), w.centralizer_count >= len(D)),
    ]
    return CentralizerReport(len(A), K, w, clauses, len(P), len(D))


@dataclass
class CentralizerReport:
    size: int
    K: Fraction
    witness: CentralizerWitness
    clauses: list[Clause]
    popular_size: int
    d_size: int

    @property
    def ok(self) -> bool:
        return all(c.passed is not False for c in self.clauses)

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "K": format_rational(self.K),
            "witness": self.witness.to_json(),
            "popular_set_size": self.popular_size,
            "D_size": self.d_size,
            "clauses": [c.to_json() for c in self.clauses],
            "ok": self.ok,
        }


# -- the covering construction ------------------------------------------------


@dataclass
class CoverStep:
    index: int
    G: Subalgebra
    H: Subalgebra
    gamma: UniTri | None
    density: int
    exponent: int
    witness: CentralizerWitness | None = None

    def to_json(self) -> dict:
        out = {
            "index": self.index,
            "G": subalgebra_to_json(self.G),
            "H": subalgebra_to_json(self.H),
            "gamma": None if self.gamma is None else element_to_json(self.gamma),
            "density": self.density,
            "exponent": self.exponent,
        }
        if self.witness is not None:
            w = self.witness
            out["quotient"] = {
                "size": w.size,
                "square_size": w.square_size,
                "depth": w.depth,
                "gamma_coset": element_to_json(w.gamma),
                "witness_pair": [element_to_json(g) for g in w.witness_pair],
                "popular_count": w.count,
                "classes": w.n_classes,
                "centralizer_count": w.centralizer_count,
            }
        return out


@dataclass
class CoverResult:
    K: Fraction
    size: int
    trace: list[CoverStep]
    final_H: Subalgebra
    final_dim: int
    cosets: list[UniTri]
    ledger: list[Clause] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed is not False for c in self.ledger)

    def to_json(self) -> dict:
        return {
            "K": format_rational(self.K),
            "size": self.size,
            "final_dim": self.final_dim,
            "final_H": subalgebra_to_json(self.final_H),
            "trace": [s.to_json() for s in self.trace],
            "cosets": [element_to_json(g) for g in self.cosets],
            "ledger": [c.to_json() for c in self.ledger],
        }


def _stopped(A2G: SymSet, H: Subalgebra) -> bool:
    return bool(member_mask(A2G, H).all())


def cover(A: SymSet, cert: ApproxCert, exhaustive_gamma: bool = False) -> CoverResult:
    """Build G_0 > G_1 > ... and 0 = H_0 < H_1 < ... until A^2 n G_k lies in H_k,
    then cover A by the cosets of H_k it meets."""
    A.require_symmetric()
    n = A.n
    K = Fraction(cert.K)
    m = coord_dim(n)
    G, H = Subalgebra.full(n), Subalgebra.zero(n)
    A2 = power(A, 2)
    density = len(intersect_subgroup(A2, G))
    exponent = 0
    trace = [CoverStep(0, G, H, None, density, exponent)]
    ledger: list[Clause] = []
    k = 0
    while True:
        A2G = intersect_subgroup(A2, G)
        if _stopped(A2G, H):
            break
        if k >= m:
            raise InvariantViolation("covering loop ran past the ambient dimension")
        ctx = QuotientCtx(G, H)
        Aq = quotient_mod(A2G, H)
        w = find_central_element(Aq, ctx, K_q=K**3, exhaustive=exhaustive_gamma)
        gamma = w.gamma_lift
        X = log(gamma)
        G1 = w.centralizer
        H1 = extend_by(ctx, X)
        exponent1 = exponent + COVER_STEP_EXPONENT
        density1 = len(intersect_subgroup(A2, G1))
        i = k + 1
        x, y = w.witness_pair
        lifted = mul(x, y) == gamma and x in A2G and y in A2G
        ledger += [
            Clause(f"step {i}: H_{i} normal in G_{i}", None, None, is_ideal(QuotientCtx(G1, H1))),
            Clause(
                f"step {i}: gamma_{i} normalizes H_{k}", None, None,
                all(member(H.space, _lie_bracket(X.coords, c, n)) for c in H.basis),
            ),
            Clause(
                f"step {i}: H_{i} generated by H_{k} and gamma_{i}", None, None,
                lie_closure(H.basis_nilvecs() + [X], n) == H1,
            ),
            Clause(
                f"step {i}: gamma_{i} in H_{i} minus H_{k}", None, None,
                contains_elt(H1, gamma) and not contains_elt(H, gamma),
            ),
            Clause(f"step {i}: gamma_{i} lifted into (A^2 n G_{k})^2", None, None, lifted and contains_elt(G1, gamma)),
            Clause(f"step {i}: dim H_{i} = {i}", H1.dim, i, H1.dim == i),
            Clause(
                f"step {i}: |A^2 n G_{i}| K^{exponent1} >= |A|",
                density1 * K**exponent1, len(A), density1 * K**exponent1 >= len(A),
            ),
            Clause(
                f"step {i}: |A^2 n G_{i}| K^29 >= |A^2 n G_{k}|",
                density1 * K**COVER_STEP_EXPONENT, density, density1 * K**COVER_STEP_EXPONENT >= density,
            ),
            Clause(
                f"step {i}: centralizer count K^18 >= |A'_{k}|",
                w.centralizer_count * K**18, w.size, w.centralizer_count * K**18 >= w.size,
            ),
            Clause(f"step {i}: " + w.internal_bound.clause, w.internal_bound.lhs, w.internal_bound.rhs,
                   w.internal_bound.passed, w.internal_bound.note),
        ]
        G, H, density, exponent, k = G1, H1, density1, exponent1, i
        trace.append(CoverStep(i, G, H, gamma, density, exponent, w))

    cosets = quotient_mod(A, H)
    reps = cosets.reps
    bound = K ** (2 + exponent)
    ledger += [
        Clause("A^2 n G_k inside H_k at termination", None, None, True),
        Clause(f"cosets <= K^(2 + {exponent})", len(reps), bound, len(reps) <= bound),
        Clause("final dim <= dim U_n", k, m, k <= m),
        _k_vs_K9(k, K),
    ]
    return CoverResult(K, len(A), trace, H, k, reps, ledger)


def _k_vs_K9(k: int, K: Fraction) -> Clause:
    K9 = K**9
    if K9 >= 2**63:
        return Clause("final dim <= K^9", k, None, None, "not binding at this scale")
    return Clause("final dim <= K^9", k, K9, k <= K9)


def verify_cover(A: SymSet, r: CoverResult) -> bool:
    """Recheck a cover from scratch: every element is in its representative's coset,
    representatives are inequivalent, and each step's invariants hold."""
    H = r.final_H
    if not r.trace or r.trace[-1].H != H or r.final_dim != H.dim:
        return False
    canon_of_rep = {}
    for rep in r.cosets:
        key = canonical_key(canon_coset(H, rep))
        if key in canon_of_rep:
            return False
        canon_of_rep[key] = rep
    for a in A.elements:
        rep = canon_of_rep.get(canonical_key(canon_coset(H, a)))
        if rep is None or not contains_elt(H, mul(inv(rep), a)):
            return False
    K = Fraction(r.K)
    n = A.n
    A2 = power(A, 2)
    first = r.trace[0]
    if first.H.dim != 0 or first.G != Subalgebra.full(n) or first.exponent != 0:
        return False
    for prev, step in zip(r.trace, r.trace[1:]):
        i = step.index
        X = log(step.gamma)
        ok = (
            i == prev.index + 1
            and step.exponent == COVER_STEP_EXPONENT * i
            and step.H.dim == i
            and prev.H <= step.H
            and step.G <= prev.G
            and step.H <= step.G
            and is_ideal(QuotientCtx(step.G, step.H))
            and contains_elt(step.H, step.gamma)
            and not contains_elt(prev.H, step.gamma)
            and contains_elt(prev.G, step.gamma)
            and all(member(prev.H.space, _lie_bracket(X.coords, c, n)) for c in prev.H.basis)
        )
        if not ok:
            return False
    for step in r.trace:
        dens = len(intersect_subgroup(A2, step.G))
        if dens != step.density or dens * K**step.exponent < len(A):
            return False
    last = r.trace[-1]
    if not _stopped(intersect_subgroup(A2, last.G), last.H):
        return False
    return len(r.cosets) <= K ** (2 + last.exponent)


# -- Gleason-type growth ---------------------------------------------------------


@dataclass
class GleasonWitness:
    chain: list[Subalgebra]
    h_elems: list[UniTri | None]
    disjoint_ok: bool | None
    ratio: Fraction | None
    hypothesis_met: bool
    passed: bool | None
    sizes: list[int]
    note: str = ""

    def to_json(self) -> dict:
        return {
            "chain": [subalgebra_to_json(S) for S in self.chain],
            "h_elems": [None if h is None else element_to_json(h) for h in self.h_elems],
            "disjoint_ok": self.disjoint_ok,
            "ratio": None if self.ratio is None else format_rational(self.ratio),
            "k": len(self.chain) - 1,
            "hypothesis_met": self.hypothesis_met,
            "sizes": self.sizes,
            "pass": self.passed,
            "note": self.note,
        }


def _check_chain(chain: Sequence[Subalgebra]) -> None:
    if not chain or chain[0].dim != 0:
        raise SubalgebraError("chain must start at the zero subalgebra")
    for a, b in zip(chain, chain[1:]):
        if not a < b:
            raise SubalgebraError("chain must be strictly increasing")


def gleason_check(A: SymSet, chain: Sequence[Subalgebra], strict: bool = True) -> GleasonWitness:
    """Find h_(i+1) in A_(i+1)^2 outside A_(i+1) H_i, where A_i = A^2 n H_i, and test
    that the translates A h_i are disjoint and |A^5| >= k |A|.

    When A^2 n H_i grows strictly along the chain the bound must hold; a
    failure then raises :class:`InvariantViolation` if ``strict``.
    """
    A.require_symmetric()
    chain = list(chain)
    _check_chain(chain)
    k = len(chain) - 1
    A2 = power(A, 2)
    parts = [intersect_subgroup(A2, S) for S in chain]
    sizes = [len(p) for p in parts]
    hyp = all(a < b for a, b in zip(sizes, sizes[1:]))
    hs: list[UniTri | None] = []
    h_rows = []
    for i in range(k):
        Ai1 = parts[i + 1]
        sq = product(Ai1, Ai1)
        cm = coset_map(chain[i], A.scale)
        own = kernels.unique_rows(cm.keys(Ai1.rows))
        outside = kernels.find_rows(own, cm.keys(sq.rows)) < 0
        if not outside.any():
            hs.append(None)
            continue
        order = [j for j in sq.canonical_order if outside[j]]
        j = order[0]
        h_rows.append(sq.rows[j])
        hs.append(sq.row_to_element(sq.rows[j]))
    found = all(h is not None for h in hs)
    disjoint = None
    if found and k:
        translates = np.concatenate([kernels.rowwise_mul(A.n, A.rows, np.broadcast_to(h, A.rows.shape)) for h in h_rows])
        disjoint = len(kernels.unique_rows(translates)) == k * len(A)
    elif found:
        disjoint = True
    note = ""
    try:
        ratio = Fraction(len(power(A, 5)), len(A))
    except ResourceCapExceeded as exc:
        ratio, note = None, f"skipped: size ({exc})"
    passed = None if ratio is None else bool(found and disjoint and ratio >= k)
    if not hyp:
        note = (note + "; " if note else "") + "hypothesis not met: A^2 n H_i does not grow strictly"
    if strict and hyp and passed is False:
        raise InvariantViolation("strictly growing chain without the predicted growth of A^5")
    return GleasonWitness(chain, hs, disjoint, ratio, hyp, passed, sizes, note)


def check_a10(A: SymSet, r: CoverResult) -> list[Clause]:
    """A^4 n H_i grows strictly along the cover's H-chain (gamma_i witnesses), hence |A^10| >= k |A^2|."""
    k = r.final_dim
    if k == 0:
        return [Clause("|A^10| >= k |A^2|", None, 0, True, "vacuous: k = 0")]
    out = []
    try:
        A4 = power(A, 4)
    except ResourceCapExceeded as exc:
        return [Clause("|A^10| >= k |A^2|", None, None, None, f"skipped: size ({exc})")]
    steps = r.trace
    prev_size = len(intersect_subgroup(A4, steps[0].H))
    for prev, step in zip(steps, steps[1:]):
        size = len(intersect_subgroup(A4, step.H))
        wit = step.gamma in A4 and contains_elt(step.H, step.gamma) and not contains_elt(prev.H, step.gamma)
        out.append(Clause(f"A^4 n H_{prev.index} strictly inside A^4 n H_{step.index}", prev_size, size,
                          wit and prev_size < size))
        prev_size = size
    A2 = len(power(A, 2))
    try:
        A10 = len(power(A, 10))
    except ResourceCapExceeded as exc:
        out.append(Clause("|A^10| >= k |A^2|", None, k * A2, None,
                          f"skipped: size (cap max_set_size={kernels.get_limits().max_set_size}, max_pairs={kernels.get_limits().max_pairs}: {exc})"))
        return out
    out.append(Clause("|A^10| >= k |A^2|", A10, k * A2, A10 >= k * A2))
    return out
