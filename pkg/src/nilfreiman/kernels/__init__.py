"""Set-level numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once from the ``NILFREIMAN_BACKEND`` environment
variable (``numba`` or ``numpy``; default ``numba`` when importable) and can
be switched at runtime with :func:`set_backend`.  Values whose interval
bounds leave the int64 range are routed to the numpy code on ``dtype=object``
arrays, so results stay exact either way.

Rows are group elements in graded integer coordinates.  Every function here
returns rows sorted lexicographically, which makes results independent of
chunking, worker count and backend.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _numpy

try:
    from . import _numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _numba = None
    HAVE_NUMBA = False

INT_SAFE = 1 << 62
BITMAP_LIMIT = 1 << 27


class ResourceCapExceeded(RuntimeError):
    """A set operation would exceed the configured size or pair caps."""

    def __init__(self, message: str, **partial):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class Limits:
    max_set_size: int = 10**7
    max_pairs: int = 5 * 10**9
    workers: int = 1
    chunk_pairs: int = 1 << 21


_limits = Limits()


def _initial_backend() -> str:
    name = os.environ.get("NILFREIMAN_BACKEND", "numba" if HAVE_NUMBA else "numpy").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"NILFREIMAN_BACKEND must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        name = "numpy"
    return name


_backend = _initial_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


def get_limits() -> Limits:
    return _limits


def set_limits(**kw) -> Limits:
    global _limits
    _limits = replace(_limits, **kw)
    return _limits


@contextmanager
def limits(**kw):
    global _limits
    saved = _limits
    _limits = replace(_limits, **kw)
    try:
        yield _limits
    finally:
        _limits = saved


@contextmanager
def backend(name: str):
    saved = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(saved)


def _impl(dtype):
    if dtype == object or _backend == "numpy":
        return _numpy
    return _numba


# -- product structure ----------------------------------------------------


@lru_cache(maxsize=None)
def product_csr(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    from ..unigroup import product_table

    table = product_table(n)
    pstart = np.zeros(len(table) + 1, dtype=np.int64)
    pa, pb = [], []
    for q, terms in enumerate(table):
        for a, b in terms:
            pa.append(a)
            pb.append(b)
        pstart[q + 1] = len(pa)
    return pstart, np.asarray(pa, dtype=np.int64), np.asarray(pb, dtype=np.int64)


def col_bounds(X: np.ndarray) -> tuple[list[int], list[int]]:
    if len(X) == 0:
        return [0] * X.shape[1], [0] * X.shape[1]
    return [int(v) for v in X.min(axis=0)], [int(v) for v in X.max(axis=0)]


def product_bounds(n: int, bA, bB) -> tuple[list[int], list[int]]:
    """Interval bounds for the coordinates of a product a*b."""
    from ..unigroup import product_table

    (loA, hiA), (loB, hiB) = bA, bB
    lo, hi = [], []
    for q, terms in enumerate(product_table(n)):
        l, h = loA[q] + loB[q], hiA[q] + hiB[q]
        for a, b in terms:
            corners = (loA[a] * loB[b], loA[a] * hiB[b], hiA[a] * loB[b], hiA[a] * hiB[b])
            l += min(corners)
            h += max(corners)
        lo.append(l)
        hi.append(h)
    return lo, hi


def _fits(*vals) -> bool:
    return all(abs(v) < INT_SAFE for v in vals)


def as_rows(X, force_object: bool = False) -> np.ndarray:
    """int64 rows when every entry is safely inside int64, object rows otherwise."""
    X = np.asarray(X, dtype=object if force_object else None)
    if X.dtype != object and X.dtype != np.int64:
        X = X.astype(np.int64) if np.issubdtype(X.dtype, np.integer) else X.astype(object)
    if X.dtype == object and X.size and not force_object:
        lo, hi = col_bounds(X)
        if _fits(*lo, *hi):
            X = X.astype(np.int64)
    return X


def _strides(lo, hi):
    widths = [h - l + 1 for l, h in zip(lo, hi)]
    strides = [1] * len(widths)
    for q in range(len(widths) - 2, -1, -1):
        strides[q] = strides[q + 1] * widths[q + 1]
    volume = strides[0] * widths[0] if widths else 1
    return widths, strides, volume


def _decode(keys: np.ndarray, lo, widths, strides, dtype) -> np.ndarray:
    out = np.empty((len(keys), len(lo)), dtype=dtype)
    for q in range(len(lo)):
        out[:, q] = lo[q] + (keys // strides[q]) % widths[q]
    return out


def _chunks(na: int, nb: int, chunk_pairs: int) -> list[tuple[int, int]]:
    step = max(1, chunk_pairs // max(nb, 1))
    return [(s, min(s + step, na)) for s in range(0, na, step)]


def _run(fn, spans):
    workers = _limits.workers
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, spans))
    return [fn(s) for s in spans]


def _check_pairs(na: int, nb: int, what: str) -> None:
    if na * nb > _limits.max_pairs:
        raise ResourceCapExceeded(
            f"{what}: {na} x {nb} pairs exceed max_pairs={_limits.max_pairs}",
            left=na, right=nb, max_pairs=_limits.max_pairs,
        )


def _check_size(size: int, what: str) -> None:
    if size > _limits.max_set_size:
        raise ResourceCapExceeded(
            f"{what}: result has {size} elements, above max_set_size={_limits.max_set_size}",
            size=size, max_set_size=_limits.max_set_size,
        )


# -- row utilities --------------------------------------------------------


def unique_rows(rows: np.ndarray, return_index: bool = False):
    """Lexicographically sorted distinct rows (and first-occurrence indices)."""
    if rows.ndim != 2:
        raise ValueError("expected a 2-d array")
    if len(rows) == 0 or rows.shape[1] == 0:
        k = min(len(rows), 1)
        out = rows[:k]
        return (out, np.arange(k, dtype=np.int64)) if return_index else out
    if rows.dtype == object:
        first: dict[tuple, int] = {}
        for i, r in enumerate(map(tuple, rows.tolist())):
            first.setdefault(r, i)
        order = sorted(first)
        out = np.empty((len(order), rows.shape[1]), dtype=object)
        for i, r in enumerate(order):
            out[i] = r
        idx = np.asarray([first[r] for r in order], dtype=np.int64)
        return (as_rows(out), idx) if return_index else as_rows(out)
    lo, hi = col_bounds(rows)
    widths, strides, volume = _strides(lo, hi)
    if volume < INT_SAFE:
        keys = ((rows - np.asarray(lo)) * np.asarray(strides)).sum(axis=1)
        _, idx = np.unique(keys, return_index=True)
        out = rows[idx]
    else:
        out, idx = np.unique(rows, axis=0, return_index=True)
    return (out, idx.astype(np.int64)) if return_index else out


def find_rows(table: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Index of each query row in ``table`` (sorted distinct rows), or -1."""
    if len(queries) == 0:
        return np.zeros(0, dtype=np.int64)
    if len(table) == 0:
        return np.full(len(queries), -1, dtype=np.int64)
    if table.shape[1] == 0:
        return np.zeros(len(queries), dtype=np.int64)
    if table.dtype != object and queries.dtype != object:
        lt, ht = col_bounds(table)
        lq, hq = col_bounds(queries)
        lo = [min(a, b) for a, b in zip(lt, lq)]
        hi = [max(a, b) for a, b in zip(ht, hq)]
        widths, strides, volume = _strides(lo, hi)
        if volume < INT_SAFE:
            lo_a, st = np.asarray(lo), np.asarray(strides)
            tk = ((table - lo_a) * st).sum(axis=1)
            qk = ((queries - lo_a) * st).sum(axis=1)
            pos = np.searchsorted(tk, qk)
            pos_c = np.minimum(pos, len(tk) - 1)
            return np.where(tk[pos_c] == qk, pos_c, -1).astype(np.int64)
    index = {r: i for i, r in enumerate(map(tuple, table.tolist()))}
    return np.asarray([index.get(r, -1) for r in map(tuple, queries.tolist())], dtype=np.int64)


def rowwise_mul(n: int, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Row i of the result is X[i] * Y[i] (Y may have a single row, broadcast)."""
    lo, hi = product_bounds(n, col_bounds(X), col_bounds(Y))
    obj = X.dtype == object or Y.dtype == object or not _fits(*lo, *hi)
    if obj:
        X, Y = X.astype(object), Y.astype(object)
    pstart, pa, pb = product_csr(n)
    out = X + Y
    for q in range(X.shape[1]):
        for t in range(pstart[q], pstart[q + 1]):
            out[:, q] = out[:, q] + X[:, pa[t]] * Y[:, pb[t]]
    return as_rows(out) if obj else out


def inverse_rows(n: int, X: np.ndarray) -> np.ndarray:
    """Row-wise group inverses, solved coordinate by coordinate in increasing degree."""
    pstart, pa, pb = product_csr(n)
    Y = np.zeros_like(X, dtype=object) if X.dtype == object else np.zeros_like(X)
    M = max((abs(v) for v in col_bounds(X)[0] + col_bounds(X)[1]), default=0)
    # |inverse entry| <= (number of paths) * M^degree; check before int64 arithmetic
    if X.dtype != object and (M + 1) ** n * 2 ** n >= INT_SAFE:
        X = X.astype(object)
        Y = Y.astype(object)
    for q in range(X.shape[1]):
        col = -X[:, q]
        for t in range(pstart[q], pstart[q + 1]):
            col = col - X[:, pa[t]] * Y[:, pb[t]]
        Y[:, q] = col
    return as_rows(Y) if Y.dtype == object else Y


# -- product sets ---------------------------------------------------------


def product_rows(n: int, A: np.ndarray, B: np.ndarray, what: str = "product") -> np.ndarray:
    """Sorted distinct rows of {a*b : a in A, b in B}."""
    m = A.shape[1]
    na, nb = len(A), len(B)
    if na == 0 or nb == 0:
        return np.zeros((0, m), dtype=np.int64)
    _check_pairs(na, nb, what)
    lo, hi = product_bounds(n, col_bounds(A), col_bounds(B))
    widths, strides, volume = _strides(lo, hi)
    pstart, pa, pb = product_csr(n)
    exact_ints = A.dtype != object and B.dtype != object and _fits(*lo, *hi) and volume < INT_SAFE
    if not exact_ints:
        A_o, B_o = A.astype(object), B.astype(object)

        def part(span):
            s, e = span
            return unique_rows(_numpy.pair_products(A_o[s:e], B_o, pstart, pa, pb))

        parts = _run(part, _chunks(na, nb, _limits.chunk_pairs // 8))
        out = unique_rows(np.concatenate(parts)) if parts else np.zeros((0, m), dtype=object)
        _check_size(len(out), what)
        return as_rows(out)

    impl = _impl(np.int64)
    lo_a = np.asarray(lo, dtype=np.int64)
    st_a = np.asarray(strides, dtype=np.int64)
    chunk = _limits.chunk_pairs if impl is _numpy else _limits.chunk_pairs * 8
    spans = _chunks(na, nb, chunk)
    if volume <= BITMAP_LIMIT:
        bitmap = np.zeros(volume, dtype=np.uint8)
        _run(lambda sp: impl.mark_products(A[sp[0]:sp[1]], B, pstart, pa, pb, lo_a, st_a, bitmap), spans)
        keys = np.flatnonzero(bitmap)
    else:
        acc: list[np.ndarray] = []
        pending = 0
        keys = np.zeros(0, dtype=np.int64)
        for group_start in range(0, len(spans), max(_limits.workers, 1)):
            group = spans[group_start:group_start + max(_limits.workers, 1)]
            parts = _run(
                lambda sp: np.unique(impl.product_keys(A[sp[0]:sp[1]], B, pstart, pa, pb, lo_a, st_a)),
                group,
            )
            acc.extend(parts)
            pending += sum(len(p) for p in parts)
            if pending > 4 * max(len(keys), 1 << 20):
                keys = np.unique(np.concatenate([keys] + acc))
                acc, pending = [], 0
                _check_size(len(keys), what)
        keys = np.unique(np.concatenate([keys] + acc))
    _check_size(len(keys), what)
    return _decode(keys.astype(np.int64), lo, widths, strides, np.int64)


# -- polynomial coset keys ------------------------------------------------


@dataclass(frozen=True)
class PolyMap:
    """Integer polynomials P_r(x); the r-th output is P_r(x) for integral x."""

    nvars: int
    nout: int
    coef: np.ndarray
    exps: np.ndarray
    owner: np.ndarray

    def bound(self, maxabs: Sequence[int]) -> int:
        worst = 0
        per_out = [0] * self.nout
        for c, e, o in zip(self.coef.tolist(), self.exps.tolist(), self.owner.tolist()):
            t = abs(int(c))
            for q, k in enumerate(e):
                if k:
                    t *= maxabs[q] ** k
            per_out[o] += t
        for v in per_out:
            worst = max(worst, v)
        return worst

    def int_coefs(self) -> bool:
        return self.coef.dtype == np.int64


def _poly_args(P: PolyMap, obj: bool):
    coef = P.coef.astype(object) if obj else P.coef
    return coef, P.exps, P.owner, P.nout


def poly_rows(P: PolyMap, X: np.ndarray) -> np.ndarray:
    """Evaluate the polynomial map row-wise."""
    if len(X) == 0:
        return np.zeros((0, P.nout), dtype=np.int64)
    lo, hi = col_bounds(X)
    maxabs = [max(abs(a), abs(b)) for a, b in zip(lo, hi)]
    obj = X.dtype == object or not P.int_coefs() or P.bound(maxabs) >= INT_SAFE
    if obj:
        return as_rows(_numpy.poly_eval(X.astype(object), *_poly_args(P, True)))
    impl = _impl(np.int64)
    spans = _chunks(len(X), 1, _limits.chunk_pairs)
    parts = _run(lambda sp: impl.poly_eval(X[sp[0]:sp[1]], *_poly_args(P, False)), spans)
    return np.concatenate(parts)


def product_poly_unique(n: int, P: PolyMap, A: np.ndarray, B: np.ndarray, what: str = "coset product"):
    """Distinct values of P(a*b) over all pairs, with the first pair (i, j) reaching each.

    Pairs are ordered i-major.  Returns (keys, first_i, first_j).
    """
    na, nb = len(A), len(B)
    if na == 0 or nb == 0:
        return np.zeros((0, P.nout), dtype=np.int64), np.zeros(0, np.int64), np.zeros(0, np.int64)
    _check_pairs(na, nb, what)
    lo, hi = product_bounds(n, col_bounds(A), col_bounds(B))
    maxabs = [max(abs(a), abs(b)) for a, b in zip(lo, hi)]
    obj = (
        A.dtype == object or B.dtype == object or not _fits(*lo, *hi)
        or not P.int_coefs() or P.bound(maxabs) >= INT_SAFE
    )
    pstart, pa, pb = product_csr(n)
    if obj:
        impl, A, B = _numpy, A.astype(object), B.astype(object)
    else:
        impl = _impl(np.int64)
    chunk = _limits.chunk_pairs if impl is _numpy else _limits.chunk_pairs * 4
    if obj:
        chunk //= 8

    def part(span):
        s, e = span
        keys = impl.product_poly(A[s:e], B, pstart, pa, pb, *_poly_args(P, obj))
        ukeys, idx = unique_rows(keys, return_index=True)
        return ukeys, idx + s * nb

    keys_acc, idx_acc = [], []
    merged_keys = np.zeros((0, P.nout), dtype=object if obj else np.int64)
    merged_idx = np.zeros(0, dtype=np.int64)
    for uk, gi in _run(part, _chunks(na, nb, chunk)):
        keys_acc.append(uk)
        idx_acc.append(gi)
        if sum(len(k) for k in keys_acc) > 4 * max(len(merged_keys), 1 << 18):
            merged_keys, merged_idx = _merge_first(merged_keys, merged_idx, keys_acc, idx_acc)
            keys_acc, idx_acc = [], []
            _check_size(len(merged_keys), what)
    merged_keys, merged_idx = _merge_first(merged_keys, merged_idx, keys_acc, idx_acc)
    _check_size(len(merged_keys), what)
    return merged_keys, merged_idx // nb, merged_idx % nb


def _merge_first(keys, idx, keys_acc, idx_acc):
    if not keys_acc:
        return keys, idx
    allk = np.concatenate([keys.astype(object) if any(k.dtype == object for k in keys_acc) else keys] + keys_acc)
    alli = np.concatenate([idx] + idx_acc)
    # order by global pair index so that "first occurrence" means smallest index
    order = np.argsort(alli, kind="stable")
    uk, first = unique_rows(allk[order], return_index=True)
    return uk, alli[order][first]
