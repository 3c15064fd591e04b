# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; see ``_pykernels`` for the reference semantics."""
import numpy as np

from libc.math cimport INFINITY, fabs, isinf, log

cdef enum:
    CROSS_ENTROPY = 0
    ZERO_ONE = 1


def expected_losses(const double[:, ::1] weights, const double[:, :, ::1] preds, int kind):
    cdef Py_ssize_t n_pred = preds.shape[0]
    cdef Py_ssize_t n_atoms = preds.shape[1]
    cdef Py_ssize_t K = preds.shape[2]
    cdef Py_ssize_t p, a, y, best
    cdef double total, w, q
    cdef bint infinite
    out = np.empty(n_pred, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for p in range(n_pred):
            total = 0.0
            infinite = False
            for a in range(n_atoms):
                if kind == CROSS_ENTROPY:
                    for y in range(K):
                        w = weights[a, y]
                        if w == 0.0:
                            continue
                        q = preds[p, a, y]
                        if q <= 0.0:
                            infinite = True
                            break
                        total += w * -log(q)
                else:
                    best = 0
                    for y in range(1, K):
                        if preds[p, a, y] > preds[p, a, best]:
                            best = y
                    for y in range(K):
                        if y != best:
                            total += weights[a, y]
                if infinite:
                    break
            res[p] = INFINITY if infinite else total
    return out


def hdh_sup(const double[::1] ra, const double[::1] rb):
    cdef Py_ssize_t n = ra.shape[0]
    cdef Py_ssize_t i, j
    cdef Py_ssize_t skipped = 0
    cdef double best = 0.0
    cdef double nu_a, nu_b, d
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                if isinf(ra[i]) and isinf(ra[j]):
                    skipped += 1
                    continue
                if isinf(rb[i]) and isinf(rb[j]):
                    skipped += 1
                    continue
                nu_a = fabs(ra[i] - ra[j])
                nu_b = fabs(rb[i] - rb[j])
                if isinf(nu_a) and isinf(nu_b):
                    skipped += 1
                    continue
                d = fabs(nu_a - nu_b)
                if d > best:
                    best = d
    return best, skipped
