# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. ``_kernels_py`` holds the reference fallbacks."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

ctypedef unsigned long long u64

cdef extern from *:
    """
    static inline unsigned long long gr_mul_hi(unsigned long long a, unsigned long long b,
                                               unsigned long long *lo) {
        unsigned __int128 m = (unsigned __int128)a * b;
        *lo = (unsigned long long)m;
        return (unsigned long long)(m >> 64);
    }
    """
    u64 gr_mul_hi(u64 a, u64 b, u64 *lo) nogil


def fisher_yates(const u64[::1] raw, Py_ssize_t n):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t[::1] perm = out
    cdef Py_ssize_t i, pos = 0, nwords = raw.shape[0]
    cdef u64 s, lo, t, hi
    cdef cnp.int64_t j, tmp
    for i in range(n - 1, 0, -1):
        s = <u64>(i + 1)
        if pos >= nwords:
            return None
        hi = gr_mul_hi(raw[pos], s, &lo)
        pos += 1
        if lo < s:
            t = (<u64>0 - s) % s
            while lo < t:
                if pos >= nwords:
                    return None
                hi = gr_mul_hi(raw[pos], s, &lo)
                pos += 1
        j = <cnp.int64_t>hi
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    return out


def batch_abs_deviation(const double[::1] half_values, const cnp.int64_t[::1] order,
                        Py_ssize_t batch_size, double target, Py_ssize_t d):
    cdef Py_ssize_t nb = order.shape[0] // batch_size
    cdef Py_ssize_t b, j, base, k
    cdef double s, dev, sg, contrib, total = 0.0
    cdef double scale = <double>(nb * batch_size)
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(half_values.shape[0])
    cdef double[::1] w = out
    for b in range(nb):
        base = b * batch_size
        k = order[base]
        if k > d - k:
            k = d - k
        s = half_values[k]
        for j in range(1, batch_size):
            k = order[base + j]
            if k > d - k:
                k = d - k
            s = s + half_values[k]
        dev = s / batch_size - target
        total = total + fabs(dev)
        if dev > 0:
            sg = 1.0
        elif dev < 0:
            sg = -1.0
        else:
            sg = 0.0
        contrib = sg / scale
        for j in range(batch_size):
            k = order[base + j]
            if k > d - k:
                k = d - k
            w[k] += contrib
    return total / nb, out


def smooth5(const double[:, ::1] img):
    cdef Py_ssize_t n0 = img.shape[0], n1 = img.shape[1]
    cdef Py_ssize_t i, j, up, down, left, right
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n0, n1))
    cdef double[:, ::1] o = out
    for i in range(n0):
        up = i - 1 if i > 0 else n0 - 1
        down = i + 1 if i < n0 - 1 else 0
        for j in range(n1):
            left = j - 1 if j > 0 else n1 - 1
            right = j + 1 if j < n1 - 1 else 0
            o[i, j] = 0.5 * img[i, j] + 0.125 * (
                ((img[up, j] + img[down, j]) + img[i, left]) + img[i, right])
    return out


def circular_autocorr_direct(const double[::1] x):
    cdef Py_ssize_t d = x.shape[0]
    cdef Py_ssize_t r, l, idx
    cdef double acc
    cdef cnp.ndarray[double, ndim=1] out = np.empty(d)
    cdef double[::1] o = out
    for r in range(d):
        acc = 0.0
        idx = r
        for l in range(d):
            acc += x[l] * x[idx]
            idx += 1
            if idx == d:
                idx = 0
        o[r] = acc / d
    return out
