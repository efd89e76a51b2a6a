import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilfreiman import kernels
from nilfreiman.cosetmap import coset_map
from nilfreiman.finset import row_element
from nilfreiman.kernels import ResourceCapExceeded
from nilfreiman.subalg import Subalgebra, canon_coset, lie_closure
from nilfreiman.unigroup import NilVec, UniTri, canonical_key, inv, mul

BACKENDS = ["numba", "numpy"]


def rows_strategy(n, lo=-6, hi=6, max_size=25):
    m = n * (n - 1) // 2
    return st.lists(st.lists(st.integers(lo, hi), min_size=m, max_size=m), min_size=1, max_size=max_size).map(
        lambda r: np.asarray(r, dtype=np.int64)
    )


def brute_products(n, A, B):
    out = set()
    for a in A.tolist():
        for b in B.tolist():
            out.add(mul(UniTri.from_coords(n, a), UniTri.from_coords(n, b)).coords)
    return sorted(tuple(int(x) for x in c) for c in out)


@pytest.mark.parametrize("be", BACKENDS)
@given(A=rows_strategy(4), B=rows_strategy(4))
def test_product_rows_matches_brute_force(be, A, B):
    with kernels.backend(be), kernels.limits(chunk_pairs=16, workers=2):
        got = kernels.product_rows(4, A, B)
    assert [tuple(r) for r in got.tolist()] == brute_products(4, A, B)


def test_chunked_unique_path_matches_bitmap_path():
    rng = np.random.default_rng(3)
    A = rng.integers(-40, 40, size=(120, 6))
    B = rng.integers(-40, 40, size=(90, 6))
    ref = kernels.product_rows(4, A, B)
    old = kernels.BITMAP_LIMIT
    kernels.BITMAP_LIMIT = 0
    try:
        for be in BACKENDS:
            with kernels.backend(be), kernels.limits(chunk_pairs=64, workers=3):
                assert np.array_equal(kernels.product_rows(4, A, B), ref)
    finally:
        kernels.BITMAP_LIMIT = old


def test_big_integers_fall_back_to_exact_objects():
    big = 1 << 40
    A = np.asarray([[big, big, 0], [1, -big, 3]], dtype=np.int64)
    out = kernels.product_rows(3, A, A)
    assert out.dtype == object
    assert [tuple(r) for r in out.tolist()] == brute_products(3, A, A)


def test_caps_raise_with_partial_information():
    A = np.asarray([[i, 0, 0] for i in range(50)], dtype=np.int64)
    with kernels.limits(max_set_size=10):
        with pytest.raises(ResourceCapExceeded):
            kernels.product_rows(3, A, A)
    with kernels.limits(max_pairs=100):
        with pytest.raises(ResourceCapExceeded):
            kernels.product_rows(3, A, A)


@given(rows_strategy(3, max_size=10), rows_strategy(3, max_size=10))
def test_rowwise_mul_and_inverse(X, Y):
    k = min(len(X), len(Y))
    X, Y = X[:k], Y[:k]
    prod = kernels.rowwise_mul(3, X, Y)
    invs = kernels.inverse_rows(3, X)
    for x, y, p, i in zip(X.tolist(), Y.tolist(), prod.tolist(), invs.tolist()):
        gx, gy = UniTri.from_coords(3, x), UniTri.from_coords(3, y)
        assert mul(gx, gy).coords == tuple(p)
        assert inv(gx).coords == tuple(i)


@given(rows_strategy(4, max_size=30))
def test_unique_and_find_rows(X):
    U, first = kernels.unique_rows(X, return_index=True)
    expected = sorted(set(map(tuple, X.tolist())))
    assert [tuple(r) for r in U.tolist()] == expected
    for u, i in zip(U.tolist(), first.tolist()):
        assert X[i].tolist() == u
        assert all(X[j].tolist() != u for j in range(i))
    assert (kernels.find_rows(U, X) >= 0).all()
    assert kernels.find_rows(U, np.asarray([[99] * 6]))[0] == -1


# -- compiled coset keys ----------------------------------------------------------

E = lambda i, j, n=4: NilVec.elementary(n, i, j)
SUBALGEBRAS = [
    lie_closure([E(1, 2)], 4),
    lie_closure([E(2, 3), E(1, 4)], 4),
    lie_closure([E(1, 2) + E(3, 4), E(2, 3)], 4),
    lie_closure([E(1, 2).scale(2) + E(2, 3) + E(1, 3).scale(3)], 4),
    lie_closure([E(1, 3), E(2, 4)], 4),
]


@pytest.mark.parametrize("be", BACKENDS)
@pytest.mark.parametrize("hi", range(len(SUBALGEBRAS)))
@pytest.mark.parametrize("scale", [1, 6])
def test_coset_keys_agree_with_exact_sweep(be, hi, scale):
    h = SUBALGEBRAS[hi]
    rng = np.random.default_rng(hi)
    X = rng.integers(-5, 6, size=(40, 6))
    cm = coset_map(h, scale)
    with kernels.backend(be):
        keys = cm.keys(X)
    reps = [canon_coset(h, row_element(4, scale, r)) for r in X]
    for i in range(len(X)):
        assert cm.rep_from_key(keys[i].tolist()) == reps[i]
        for j in range(i):
            assert (keys[i] == keys[j]).all() == (reps[i] == reps[j])


@pytest.mark.parametrize("be", BACKENDS)
def test_coset_product_keys_first_witness(be):
    h = SUBALGEBRAS[2]
    rng = np.random.default_rng(9)
    A = rng.integers(-3, 4, size=(15, 6))
    B = rng.integers(-3, 4, size=(12, 6))
    cm = coset_map(h)
    with kernels.backend(be), kernels.limits(chunk_pairs=8):
        keys, wi, wj = cm.product_keys(A, B)
    seen = {}
    for i in range(len(A)):
        for j in range(len(B)):
            g = mul(UniTri.from_coords(4, A[i]), UniTri.from_coords(4, B[j]))
            seen.setdefault(canonical_key(canon_coset(h, g)), (i, j))
    got = {}
    for k, i, j in zip(keys.tolist(), wi.tolist(), wj.tolist()):
        got[canonical_key(cm.rep_from_key(k))] = (i, j)
    assert got == seen


def test_backend_selected_by_environment():
    import os
    import subprocess
    import sys

    code = "from nilfreiman import kernels; print(kernels.get_backend())"
    for name in ("numpy", "numba"):
        env = dict(os.environ, NILFREIMAN_BACKEND=name)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        assert res.stdout.strip() == name
    env = dict(os.environ, NILFREIMAN_BACKEND="cuda")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert res.returncode != 0
