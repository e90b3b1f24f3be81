# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trace-histogram kernel.

Same contract as ``_kernels_py.trace_histogram``; see that module for the
description of the table layout.
"""
import numpy as np

cimport cython
from libc.stdlib cimport malloc, free


def trace_histogram(const int[:, ::1] tables, const long long[:, ::1] exps,
                    long long u0, int p, long long lo, long long hi):
    cdef Py_ssize_t T = tables.shape[0]
    cdef Py_ssize_t n = exps.shape[1]
    cdef long long mod = tables.shape[1]
    cdef long long Q = mod + 1
    cdef Py_ssize_t width = (T + 1) * p
    raw_arr = np.zeros(width, dtype=np.int64)
    cdef long long[::1] raw = raw_arr

    cdef long long *idx = <long long *> malloc((n + 1) * sizeof(long long))
    cdef long long *s = <long long *> malloc((T + 1) * sizeof(long long))
    cdef long long *cur = <long long *> malloc((T + 1) * sizeof(long long))
    cdef long long *step = <long long *> malloc((T + 1) * sizeof(long long))
    cdef Py_ssize_t *act = <Py_ssize_t *> malloc((T + 1) * sizeof(Py_ssize_t))
    cdef int *zeroed = <int *> malloc((T + 1) * sizeof(int))
    if not idx or not s or not cur or not step or not act or not zeroed:
        free(idx); free(s); free(cur); free(step); free(act); free(zeroed)
        raise MemoryError()

    cdef Py_ssize_t t, v, na, k
    cdef long long base, u, L, x, e
    cdef Py_ssize_t inner = n - 1
    cdef bint done

    try:
        with nogil:
            if n == 1:
                for x in range(lo, hi):
                    u = u0
                    if x > 0:
                        L = x - 1
                        for t in range(T):
                            u += tables[t, (exps[t, 0] * L) % mod]
                    raw[u] += 1
            elif lo < hi:
                # odometer over variables 0 .. n-2; variable 0 restricted to [lo, hi)
                idx[0] = lo
                for v in range(1, inner):
                    idx[v] = 0
                done = False
                while not done:
                    for t in range(T):
                        s[t] = 0
                        zeroed[t] = 0
                        for v in range(inner):
                            e = exps[t, v]
                            if e:
                                if idx[v] == 0:
                                    zeroed[t] = 1
                                    break
                                s[t] = (s[t] + e * (idx[v] - 1)) % mod
                    base = u0
                    na = 0
                    for t in range(T):
                        if zeroed[t]:
                            continue
                        if exps[t, inner] == 0:
                            base += tables[t, s[t]]
                        else:
                            act[na] = t
                            cur[na] = s[t]
                            step[na] = exps[t, inner] % mod
                            na += 1
                    # innermost variable equal to zero
                    raw[base] += 1
                    if na == 0:
                        raw[base] += mod
                    elif na == 1:
                        t = act[0]
                        L = cur[0]
                        e = step[0]
                        for x in range(mod):
                            raw[base + tables[t, L]] += 1
                            L += e
                            if L >= mod:
                                L -= mod
                    else:
                        for x in range(mod):
                            u = base
                            for k in range(na):
                                u += tables[act[k], cur[k]]
                                cur[k] += step[k]
                                if cur[k] >= mod:
                                    cur[k] -= mod
                            raw[u] += 1
                    # advance odometer (last outer variable fastest)
                    v = inner - 1
                    while True:
                        idx[v] += 1
                        if v == 0:
                            if idx[0] >= hi:
                                done = True
                            break
                        if idx[v] < Q:
                            break
                        idx[v] = 0
                        v -= 1
    finally:
        free(idx); free(s); free(cur); free(step); free(act); free(zeroed)

    hist = np.zeros(p, dtype=np.int64)
    for k in range(width):
        hist[k % p] += raw_arr[k]
    return hist
