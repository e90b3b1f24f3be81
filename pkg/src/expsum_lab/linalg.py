"""Exact Gaussian elimination over a finite field on numpy int64 matrices.

Entries are field encodings (see :mod:`expsum_lab.ffield`).  Every routine
works column-by-column with whole-matrix row updates, which keeps the Python
overhead at one vector operation per pivot.
"""
from __future__ import annotations

import numpy as np

from .ffield import FieldSpec


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def rref(A: np.ndarray, field: FieldSpec) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    R = np.array(A, dtype=np.int64, copy=True)
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    prime = field.a == 1
    p = field.p
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        lead = int(R[r, c])
        if lead != 1:
            inv = field.inv(lead)
            R[r] = (R[r] * inv) % p if prime else field.vmul(R[r], inv)
        col = R[:, c].copy()
        col[r] = 0
        mask = np.flatnonzero(col)
        if mask.size:
            if prime:
                R[mask] = (R[mask] - col[mask, None] * R[r][None, :]) % p
            else:
                R[mask] = field.vsub(R[mask], field.vmul(col[mask, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A: np.ndarray, field: FieldSpec) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    # eliminate along the shorter side
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(rref(A, field)[1])


def nullspace(A: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Basis of ``{v : A v = 0}`` as the columns of the returned matrix."""
    A = np.asarray(A, dtype=np.int64)
    cols = A.shape[1]
    if A.shape[0] == 0 or cols == 0:
        return np.eye(cols, dtype=np.int64)
    R, pivots = rref(A, field)
    free = [c for c in range(cols) if c not in set(pivots)]
    N = zeros(cols, len(free))
    for j, f in enumerate(free):
        N[f, j] = 1
        for i, pc in enumerate(pivots):
            v = int(R[i, f])
            if v:
                N[pc, j] = field.neg(v)
    return N


def matmul(A: np.ndarray, B: np.ndarray, field: FieldSpec) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if field.a == 1:
        if A.shape[1] == 0:
            return zeros(A.shape[0], B.shape[1])
        # blocks keep int64 partial sums from overflowing
        p = field.p
        step = max(1, (1 << 62) // (p * p))
        out = zeros(A.shape[0], B.shape[1])
        for s in range(0, A.shape[1], step):
            out = (out + A[:, s : s + step] @ B[s : s + step]) % p
        return out
    out = zeros(A.shape[0], B.shape[1])
    for k in range(A.shape[1]):
        col = A[:, k]
        if not col.any():
            continue
        out = field.vadd(out, field.vmul(col[:, None], B[k][None, :]))
    return out


def in_span(rows: np.ndarray, v: np.ndarray, field: FieldSpec) -> bool:
    """Whether ``v`` lies in the row span of ``rows``."""
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, len(v))
    base = rank(rows, field)
    return rank(np.vstack([rows, np.asarray(v, dtype=np.int64)[None, :]]), field) == base
