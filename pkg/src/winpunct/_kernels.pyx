"""Compiled fused fusion kernel; semantics mirror `_fuse_py.fuse` exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, log

cnp.import_array()

cdef double PI = 3.14159265358979323846
cdef double MAX_ENTROPY = 1.3862943611198906  # log(4)
cdef double UNIFORM_EPS = 1e-12

MODE_MEAN = 0
MODE_ENTROPY = 1
MODE_HAMMING = 2


def fuse(const cnp.int64_t[::1] starts, const cnp.int64_t[::1] lengths,
         const cnp.int64_t[::1] mask_l, const cnp.int64_t[::1] mask_r,
         const cnp.int64_t[::1] offsets, const double[:, ::1] probs,
         Py_ssize_t n_words, int mode):
    """See `_fuse_py.fuse`; same contract, same accumulation order."""
    cdef Py_ssize_t n_windows = starts.shape[0]
    out_arr = np.zeros((n_words, 4), dtype=np.float64)
    counts_arr = np.zeros(n_words, dtype=np.int64)
    plain_arr = np.zeros((n_words, 4), dtype=np.float64)
    totw_arr = np.zeros(n_words, dtype=np.float64)
    maxw_arr = np.zeros(n_words, dtype=np.float64)
    first_arr = np.full(n_words, -1, dtype=np.int64)

    cdef double[:, ::1] out = out_arr
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef double[:, ::1] plain = plain_arr
    cdef double[::1] totw = totw_arr
    cdef double[::1] maxw = maxw_arr
    cdef cnp.int64_t[::1] first = first_arr

    cdef Py_ssize_t k, p, c, row, word
    cdef cnp.int64_t lo, hi
    cdef double w, h, v

    for k in range(n_windows):
        lo = mask_l[k]
        hi = lengths[k] - mask_r[k]
        for p in range(lo, hi):
            row = offsets[k] + p
            word = starts[k] + p
            if mode == 1:
                h = 0.0
                for c in range(4):
                    v = probs[row, c]
                    if v > 0.0:
                        h -= v * log(v)
                w = MAX_ENTROPY - h
                if w < 0.0:
                    w = 0.0
                for c in range(4):
                    plain[word, c] += probs[row, c]
                if w > maxw[word]:
                    maxw[word] = w
            elif mode == 2:
                if lengths[k] == 1:
                    w = 0.54
                else:
                    w = 0.54 - 0.46 * cos(2.0 * PI * p / <double>(lengths[k] - 1))
            else:
                w = 1.0
            for c in range(4):
                out[word, c] += w * probs[row, c]
            totw[word] += w
            counts[word] += 1
            if counts[word] == 1:
                first[word] = row
            else:
                first[word] = -2

    for word in range(n_words):
        if counts[word] == 0:
            continue
        if counts[word] == 1:
            row = first[word]
            for c in range(4):
                out[word, c] = probs[row, c]
        elif mode == 1 and maxw[word] < UNIFORM_EPS:
            for c in range(4):
                out[word, c] = plain[word, c] / <double>counts[word]
        else:
            for c in range(4):
                out[word, c] /= totw[word]

    return out_arr, counts_arr
