from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilfreiman.unigroup import (
    NilVec,
    UniTri,
    UnitriangularError,
    canonical_key,
    canonical_key_ints,
    comm,
    element_from_json,
    element_to_json,
    exp,
    inv,
    log,
    mul,
    power,
)

import oracle

bounded = st.fractions(min_value=-10, max_value=10, max_denominator=10)


@st.composite
def elements(draw, n=None):
    n = n or draw(st.integers(2, 5))
    m = n * (n - 1) // 2
    return UniTri.from_coords(n, draw(st.lists(bounded, min_size=m, max_size=m)))


@st.composite
def same_n(draw, k):
    n = draw(st.integers(2, 5))
    return [draw(elements(n)) for _ in range(k)]


def to_oracle(g):
    return tuple(tuple(r) for r in g.matrix())


X12 = UniTri.elementary(3, 1, 2)
Y23 = UniTri.elementary(3, 2, 3)


def test_mul_examples():
    g = UniTri.heisenberg(2, -3, F(1, 2))
    assert mul(UniTri.identity(3), g) == g
    assert mul(g, inv(g)).is_identity()
    assert mul(X12, Y23) == UniTri.heisenberg(1, 1, 1)
    with pytest.raises(UnitriangularError):
        mul(X12, UniTri.identity(4))


def test_inv_examples():
    assert inv(UniTri.identity(3)).is_identity()
    assert inv(X12) == UniTri.elementary(3, 1, 2, -1)
    a, b, c = F(2), F(-5), F(7, 3)
    assert inv(UniTri.heisenberg(a, b, c)) == UniTri.heisenberg(-a, -b, a * b - c)


def test_comm_examples():
    g = UniTri.heisenberg(1, 2, 3)
    assert comm(g, UniTri.identity(3)).is_identity()
    assert comm(g, g).is_identity()
    assert comm(X12, Y23) == UniTri.heisenberg(0, 0, 1)
    # against the dense-matrix oracle
    assert to_oracle(comm(X12, Y23)) == oracle.commutator(to_oracle(X12), to_oracle(Y23))


def test_log_exp_examples():
    assert log(UniTri.identity(3)).is_zero()
    assert log(X12) == NilVec.elementary(3, 1, 2)
    assert log(UniTri.heisenberg(1, 1, 1)).coords == (1, 1, F(1, 2))
    assert exp(NilVec.zero(3)).is_identity()
    assert exp(NilVec.elementary(3, 1, 2)) == X12
    assert exp(NilVec.elementary(3, 1, 3, F(7, 2))) == UniTri.heisenberg(0, 0, F(7, 2))


def test_canonical_key_examples():
    g = UniTri.heisenberg(3, F(1, 3), -2)
    assert canonical_key(mul(g, inv(g))) == canonical_key(UniTri.identity(3))
    assert canonical_key(UniTri.heisenberg(F(1, 2), 0, 0)) == canonical_key(UniTri.heisenberg(F(2, 4), 0, 0))
    assert canonical_key(UniTri.heisenberg(1, 2, 3)) != canonical_key(UniTri.heisenberg(1, 2, 4))
    assert canonical_key_ints(3, (1, -2, 5)) == canonical_key(UniTri.heisenberg(1, -2, 5))


def test_shape_validation():
    with pytest.raises(UnitriangularError):
        UniTri.from_matrix([[1, 0], [1, 1]])
    with pytest.raises(UnitriangularError):
        UniTri.from_matrix([[2, 0], [0, 1]])
    with pytest.raises(ValueError):
        UniTri.identity(9)
    with pytest.raises(UnitriangularError):
        element_from_json({"n": 3, "rows": [["1", "0", "0"], ["0", "1", "0"], ["1", "0", "1"]]})


def test_entry_is_one_based():
    g = UniTri.heisenberg(4, 5, 6)
    assert (g.entry(1, 2), g.entry(2, 3), g.entry(1, 3)) == (4, 5, 6)
    assert g.entry(2, 2) == 1 and g.entry(3, 1) == 0


@given(elements())
def test_json_round_trip(g):
    assert element_from_json(element_to_json(g)) == g


@given(elements())
def test_log_exp_round_trip(g):
    assert exp(log(g)) == g
    assert log(exp(log(g))) == log(g)


@given(elements())
def test_log_exp_match_dense_series(g):
    M = to_oracle(g)
    assert oracle.log(M) == tuple(tuple(r) for r in log(g).matrix())
    assert oracle.exp(oracle.log(M)) == M


@given(same_n(3))
def test_associativity(gs):
    a, b, c = gs
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


@given(same_n(2))
def test_mul_and_inv_match_dense(gs):
    a, b = gs
    assert to_oracle(mul(a, b)) == oracle.matmul(to_oracle(a), to_oracle(b))
    assert to_oracle(inv(a)) == oracle.inverse(to_oracle(a))


@given(same_n(2))
def test_comm_trivial_iff_commuting(gs):
    g, h = gs
    assert comm(g, h).is_identity() == (mul(g, h) == mul(h, g))


@given(elements(), st.integers(-6, 6))
def test_log_of_power_is_multiple(g, m):
    assert log(power(g, m)) == log(g).scale(m)


@given(same_n(2))
def test_canonical_key_injective(gs):
    g, h = gs
    assert (canonical_key(g) == canonical_key(h)) == (g == h)


@given(elements())
def test_identity_key_is_smallest(g):
    assert canonical_key(UniTri.identity(g.n)) <= canonical_key(g)
