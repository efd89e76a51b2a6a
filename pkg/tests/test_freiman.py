import dataclasses
from fractions import Fraction as F

import numpy as np
import pytest

from nilfreiman.approxcert import certify
from nilfreiman.finset import SymSet, power, quotient_mod
from nilfreiman.freiman import (
    COVER_STEP_EXPONENT,
    TrivialSetError,
    check_a10,
    check_centralizer_bound,
    cover,
    find_central_element,
    gleason_check,
    verify_cover,
)
from nilfreiman.generators import central_interval, heisenberg_box, word_ball
from nilfreiman.subalg import QuotientCtx, Subalgebra, contains_elt, lie_closure
from nilfreiman.unigroup import NilVec, UniTri, comm, inv, mul

E12 = NilVec.elementary(3, 1, 2)
E23 = NilVec.elementary(3, 2, 3)
E13 = NilVec.elementary(3, 1, 3)
FULL, ZERO = Subalgebra.full(3), Subalgebra.zero(3)
CENTER = lie_closure([E13])
z = UniTri.elementary(3, 1, 3)


def top_ctx(n=3):
    return QuotientCtx(Subalgebra.full(n), Subalgebra.zero(n))


def test_central_element_for_central_set():
    A = SymSet.from_elements([UniTri.identity(3), z, inv(z)])
    w = find_central_element(quotient_mod(A, ZERO), top_ctx())
    assert w.depth == 2
    assert w.gamma in (z, inv(z))
    assert w.gamma == min(z, inv(z))
    assert w.centralizer_count == len(power(A, 2)) == 5
    assert w.centralizer == FULL


def test_central_element_for_box():
    A = heisenberg_box(2, 2, 8)
    w = find_central_element(quotient_mod(A, ZERO), top_ctx())
    assert w.depth == 2
    assert w.centralizer == FULL
    assert w.centralizer_count == len(power(A, 2))


def test_central_element_trivial_set_errors():
    with pytest.raises(TrivialSetError):
        find_central_element(quotient_mod(SymSet.identity(3), ZERO), top_ctx())


def test_internal_bound_when_square_misses_the_centre():
    # A = generators only: A^2 has no nontrivial central element, so gamma sits at depth 1
    A = word_ball(3, 1)
    c = certify(A)
    w = find_central_element(quotient_mod(A, ZERO), top_ctx(), K_q=c.K)
    assert w.depth == 1
    assert w.internal_bound.lhs > 1 and w.internal_bound.passed
    # the commutator classes match a direct tally
    tally = {}
    for a in A.elements:
        tally[comm(w.gamma, a)] = tally.get(comm(w.gamma, a), 0) + 1
    assert w.count == max(tally.values())
    assert w.n_classes == len(tally)


def test_popular_value_tie_break_is_canonical():
    A = word_ball(3, 1)
    w = find_central_element(quotient_mod(A, ZERO), top_ctx())
    tally = {}
    for a in A.elements:
        tally.setdefault(comm(w.gamma, a), []).append(a)
    best = max(len(v) for v in tally.values())
    assert w.popular_value == min(k for k, v in tally.items() if len(v) == best)


def test_exhaustive_mode_reports_best_gamma():
    A = word_ball(3, 2)
    c = certify(A)
    w = find_central_element(quotient_mod(A, ZERO), top_ctx(), K_q=c.K, exhaustive=True)
    assert w.exhaustive["best_count"] >= w.centralizer_count
    assert w.exhaustive["all_meet_bound"]


def test_centralizer_bound_examples():
    A = central_interval(3)
    rep = check_centralizer_bound(A, certify(A))
    assert rep.ok and rep.witness.centralizer_count == len(power(A, 2))
    for A in (heisenberg_box(2, 2, 8), heisenberg_box(3, 3, 12)):
        rep = check_centralizer_bound(A, certify(A))
        assert rep.ok
        lhs = rep.witness.centralizer_count * rep.K**6
        assert lhs >= len(A)


def test_cover_identity_set():
    A = SymSet.identity(3)
    r = cover(A, certify(A))
    assert r.final_dim == 0 and r.final_H == ZERO
    assert len(r.cosets) == 1 and r.cosets[0].is_identity()
    assert verify_cover(A, r)


def test_cover_central_interval():
    A = central_interval(5)
    r = cover(A, certify(A))
    assert r.final_dim == 1 and r.final_H == CENTER
    assert len(r.cosets) == 1
    assert r.trace[1].G == FULL
    assert r.ok and verify_cover(A, r)


def test_cover_box_trace():
    A = heisenberg_box(2, 2, 8)
    c = certify(A)
    r = cover(A, c)
    assert r.final_dim <= 3 and r.ok and verify_cover(A, r)
    for i, step in enumerate(r.trace):
        assert step.index == i and step.H.dim == i
        assert step.exponent == COVER_STEP_EXPONENT * i
        assert step.density * c.K**step.exponent >= len(A)
    for prev, step in zip(r.trace, r.trace[1:]):
        assert contains_elt(step.H, step.gamma) and not contains_elt(prev.H, step.gamma)
        x, y = step.witness.witness_pair
        assert mul(x, y) == step.gamma
    for a in A.elements:
        assert any(contains_elt(r.final_H, mul(inv(rep), a)) for rep in r.cosets)


def test_verify_cover_rejects_tampering():
    # word_ball(4, 1) ends with three cosets of a 3-dimensional H
    A = word_ball(4, 1)
    r = cover(A, certify(A))
    assert len(r.cosets) == 3 and verify_cover(A, r)
    assert not verify_cover(A, dataclasses.replace(r, cosets=r.cosets[1:]))
    assert not verify_cover(A, dataclasses.replace(r, cosets=r.cosets + [r.cosets[0]]))
    smaller = r.trace[-2].H
    assert smaller < r.final_H
    assert not verify_cover(A, dataclasses.replace(r, final_H=smaller))
    bad_step = dataclasses.replace(r.trace[1], exponent=0)
    assert not verify_cover(A, dataclasses.replace(r, trace=[r.trace[0], bad_step] + r.trace[2:]))


def test_gleason_examples():
    A = heisenberg_box(2, 2, 8)
    w = gleason_check(A, [ZERO])
    assert w.passed and w.ratio == F(len(power(A, 5)), len(A))
    chain = [ZERO, CENTER, lie_closure([E23, E13]), FULL]
    w = gleason_check(A, chain)
    assert w.hypothesis_met and w.disjoint_ok and w.passed
    assert all(h is not None for h in w.h_elems)
    assert w.ratio >= 3
    # h_(i+1) lies in (A^2 n H_(i+1))^2 but outside (A^2 n H_(i+1)).H_i
    A2 = power(A, 2)
    for i, h in enumerate(w.h_elems):
        Ai1 = [a for a in A2.elements if contains_elt(chain[i + 1], a)]
        assert not any(contains_elt(chain[i], mul(inv(a), h)) for a in Ai1)


def test_gleason_hypothesis_not_met():
    A = central_interval(4)
    w = gleason_check(A, [ZERO, CENTER, lie_closure([E23, E13])])
    assert not w.hypothesis_met
    assert "hypothesis not met" in w.note


def test_gleason_rejects_bad_chain():
    with pytest.raises(Exception):
        gleason_check(central_interval(2), [CENTER, FULL])


def test_a10_examples():
    A = SymSet.identity(3)
    (cl,) = check_a10(A, cover(A, certify(A)))
    assert cl.passed
    A = central_interval(5)
    clauses = check_a10(A, cover(A, certify(A)))
    assert clauses[-1].lhs == 101 and clauses[-1].rhs == 21 and clauses[-1].passed
