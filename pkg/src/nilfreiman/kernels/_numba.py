"""numba kernels.  Every function mirrors one in ``_numpy.py`` exactly.

All arithmetic is int64; callers guarantee by interval bounds that nothing
overflows before dispatching here.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _product_into(A, i, B, j, pstart, pa, pb, buf):
    m = A.shape[1]
    for q in range(m):
        v = A[i, q] + B[j, q]
        for t in range(pstart[q], pstart[q + 1]):
            v += A[i, pa[t]] * B[j, pb[t]]
        buf[q] = v


@njit(cache=True, nogil=True)
def mark_products(A, B, pstart, pa, pb, lo, strides, bitmap):
    m = A.shape[1]
    buf = np.empty(m, dtype=np.int64)
    for i in range(A.shape[0]):
        for j in range(B.shape[0]):
            _product_into(A, i, B, j, pstart, pa, pb, buf)
            key = 0
            for q in range(m):
                key += (buf[q] - lo[q]) * strides[q]
            bitmap[key] = 1


@njit(cache=True, nogil=True)
def product_keys(A, B, pstart, pa, pb, lo, strides):
    m = A.shape[1]
    nb = B.shape[0]
    out = np.empty(A.shape[0] * nb, dtype=np.int64)
    buf = np.empty(m, dtype=np.int64)
    for i in range(A.shape[0]):
        for j in range(nb):
            _product_into(A, i, B, j, pstart, pa, pb, buf)
            key = 0
            for q in range(m):
                key += (buf[q] - lo[q]) * strides[q]
            out[i * nb + j] = key
    return out


@njit(cache=True, nogil=True)
def pair_products(A, B, pstart, pa, pb):
    m = A.shape[1]
    nb = B.shape[0]
    out = np.empty((A.shape[0] * nb, m), dtype=np.int64)
    for i in range(A.shape[0]):
        for j in range(nb):
            _product_into(A, i, B, j, pstart, pa, pb, out[i * nb + j])
    return out


@njit(cache=True, nogil=True)
def _poly_into(x, coef, exps, owner, out_row):
    for r in range(out_row.shape[0]):
        out_row[r] = 0
    m = x.shape[0]
    for t in range(coef.shape[0]):
        v = coef[t]
        for q in range(m):
            for _ in range(exps[t, q]):
                v *= x[q]
        out_row[owner[t]] += v


@njit(cache=True, nogil=True)
def poly_eval(X, coef, exps, owner, r):
    out = np.empty((X.shape[0], r), dtype=np.int64)
    for i in range(X.shape[0]):
        _poly_into(X[i], coef, exps, owner, out[i])
    return out


@njit(cache=True, nogil=True)
def product_poly(A, B, pstart, pa, pb, coef, exps, owner, r):
    m = A.shape[1]
    nb = B.shape[0]
    out = np.empty((A.shape[0] * nb, r), dtype=np.int64)
    buf = np.empty(m, dtype=np.int64)
    for i in range(A.shape[0]):
        for j in range(nb):
            _product_into(A, i, B, j, pstart, pa, pb, buf)
            _poly_into(buf, coef, exps, owner, out[i * nb + j])
    return out
