"""Numpy implementation of the trace-histogram kernel.

Points of ``F^n`` with ``|F| = Q`` are indexed per coordinate by
``0`` (the zero element) or ``k + 1`` (the element ``g^k``, ``g`` primitive).
For the non-constant term ``t`` with exponent row ``exps[t]``,
``tables[t, k]`` is the residue ``Tr(beta_t * g^k) mod p``, so the term
contributes ``tables[t, sum_v exps[t, v] * log(x_v) mod (Q-1)]`` when no
variable it involves is zero, and 0 otherwise.  ``u0`` is the residue of the
constant term.

``trace_histogram`` returns ``N_u`` for the points whose first coordinate
index lies in ``[lo, hi)``; the last coordinate is the innermost loop.
"""
from __future__ import annotations

import itertools

import numpy as np


def trace_histogram(tables: np.ndarray, exps: np.ndarray, u0: int, p: int,
                    lo: int, hi: int) -> np.ndarray:
    tables = np.asarray(tables, dtype=np.int64)
    exps = np.asarray(exps, dtype=np.int64)
    T, mod = tables.shape
    n = exps.shape[1]
    Q = mod + 1
    hist = np.zeros(p, dtype=np.int64)
    if lo >= hi:
        return hist
    logs = np.arange(mod, dtype=np.int64)

    if n == 1:
        xs = np.arange(max(lo, 1), hi, dtype=np.int64) - 1
        u = np.full(xs.shape, u0, dtype=np.int64)
        for t in range(T):
            u += tables[t, (exps[t, 0] * xs) % mod]
        hist += np.bincount(u % p, minlength=p)
        if lo == 0:
            hist[u0 % p] += 1
        return hist

    inner = n - 1
    steps = [(exps[t, inner] * logs) % mod for t in range(T)]
    ranges = [range(lo, hi)] + [range(Q)] * (inner - 1)
    for idx in itertools.product(*ranges):
        base = u0
        active = []
        for t in range(T):
            s = 0
            zeroed = False
            for v in range(inner):
                e = exps[t, v]
                if e:
                    if idx[v] == 0:
                        zeroed = True
                        break
                    s += int(e) * (idx[v] - 1)
            if zeroed:
                continue
            s %= mod
            if exps[t, inner] == 0:
                base += int(tables[t, s])
            else:
                active.append((t, s))
        hist[base % p] += 1
        if not active:
            hist[base % p] += mod
            continue
        u = np.full(mod, base, dtype=np.int64)
        for t, s in active:
            k = steps[t] + s
            k[k >= mod] -= mod
            u += tables[t][k]
        hist += np.bincount(u % p, minlength=p)
    return hist
