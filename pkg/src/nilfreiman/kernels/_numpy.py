"""Pure-numpy versions of the kernels in ``_numba.py``.

These also accept ``dtype=object`` arrays of Python ints, which is how
values outside the int64 range stay exact.
"""

import numpy as np


def _pairs(A, B, pstart, pa, pb):
    out = A[:, None, :] + B[None, :, :]
    for q in range(A.shape[1]):
        for t in range(pstart[q], pstart[q + 1]):
            out[:, :, q] += A[:, None, pa[t]] * B[None, :, pb[t]]
    return out.reshape(-1, A.shape[1])


def _pack(rows, lo, strides):
    return ((rows - lo) * strides).sum(axis=1)


def mark_products(A, B, pstart, pa, pb, lo, strides, bitmap):
    bitmap[_pack(_pairs(A, B, pstart, pa, pb), lo, strides)] = 1


def product_keys(A, B, pstart, pa, pb, lo, strides):
    return _pack(_pairs(A, B, pstart, pa, pb), lo, strides)


def pair_products(A, B, pstart, pa, pb):
    return _pairs(A, B, pstart, pa, pb)


def poly_eval(X, coef, exps, owner, r):
    out = np.zeros((X.shape[0], r), dtype=X.dtype)
    for t in range(coef.shape[0]):
        term = np.full(X.shape[0], coef[t], dtype=X.dtype)
        for q in np.flatnonzero(exps[t]):
            term = term * X[:, q] ** int(exps[t, q])
        out[:, owner[t]] += term
    return out


def product_poly(A, B, pstart, pa, pb, coef, exps, owner, r):
    return poly_eval(_pairs(A, B, pstart, pa, pb), coef, exps, owner, r)
