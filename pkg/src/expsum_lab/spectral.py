"""Pages of the spectral sequence of the filtered complex ``(Omega, df ^ -)``.

``F_r Omega^m`` is spanned by homogeneous forms of internal degree ``<= r``.
With ``Z_t^r = {x in F_r : df ^ x in F_(r-t)}`` the page is

    E_t^r = Z_t^r / (Z_(t-1)^(r-1) + df ^ Z_(t-1)^(r+t-1))

in each form degree ``m``; the cell is ``(r, s)`` with ``s = m - r``.  Every
space involved is finite dimensional, so the dimension at ``r`` is exact as
soon as the pieces up to ``r + t - 1`` are built.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .koszul import BasisElem, Complex, piece_basis, wedge_map
from .mpoly import HomogDecomp


def filtration_pieces(decomp: HomogDecomp, m: int, r_max: int) -> dict[int, tuple[BasisElem, ...]]:
    """Basis of each graded piece of ``Omega^m`` in degrees ``0..r_max``."""
    return {r: piece_basis(decomp.n, m, r, decomp.delta) for r in range(r_max + 1)}


class FilteredDifferential:
    """``df ^`` on ``F_R Omega^m -> F_R Omega^(m+1)`` with degree bookkeeping."""

    def __init__(self, decomp: HomogDecomp, m: int, R: int):
        self.decomp, self.m, self.R = decomp, m, R
        n, delta, F = decomp.n, decomp.delta, decomp.field
        self.field = F
        self.src = filtration_pieces(decomp, m, R)
        self.tgt = filtration_pieces(decomp, m + 1, R)
        self.src_off = _offsets(self.src)
        self.tgt_off = _offsets(self.tgt)
        self.src_dim = self.src_off[R + 1]
        self.tgt_dim = self.tgt_off[R + 1]
        self.col_deg = np.concatenate([np.full(len(self.src[r]), r) for r in range(R + 1)]) \
            if self.src_dim else np.zeros(0, dtype=np.int64)
        self.row_deg = np.concatenate([np.full(len(self.tgt[r]), r) for r in range(R + 1)]) \
            if self.tgt_dim else np.zeros(0, dtype=np.int64)
        A = np.zeros((self.tgt_dim, self.src_dim), dtype=np.int64)
        if 0 <= m < n:
            for j, g in decomp.components.items():
                if j == 0 or g.is_zero():
                    continue
                shift = j - delta
                for r in range(R + 1):
                    rt = r + shift
                    if rt < 0 or not self.src[r] or not self.tgt.get(rt):
                        continue
                    block = wedge_map(g, m, r, delta)
                    rs, cs = slice(self.tgt_off[rt], self.tgt_off[rt + 1]), slice(self.src_off[r], self.src_off[r + 1])
                    A[rs, cs] = F.vadd(A[rs, cs], block) if F.a > 1 else (A[rs, cs] + block) % F.p
        self.matrix = A

    def cycles(self, t: int, r: int) -> np.ndarray:
        """Basis (rows, in ``F_R`` coordinates) of ``Z_t^r``."""
        r = min(r, self.R)
        if r < 0:
            return np.zeros((0, self.src_dim), dtype=np.int64)
        cols = np.flatnonzero(self.col_deg <= r)
        rows = np.flatnonzero(self.row_deg > r - t)
        sub = self.matrix[np.ix_(rows, cols)]
        N = linalg.nullspace(sub, self.field)
        out = np.zeros((N.shape[1], self.src_dim), dtype=np.int64)
        out[:, cols] = N.T
        return out

    def apply(self, rows: np.ndarray) -> np.ndarray:
        """Images of row vectors, as rows."""
        if rows.shape[0] == 0:
            return np.zeros((0, self.tgt_dim), dtype=np.int64)
        return linalg.matmul(rows, self.matrix.T, self.field)


def _offsets(pieces: dict[int, tuple]) -> list[int]:
    out = [0]
    for r in sorted(pieces):
        out.append(out[-1] + len(pieces[r]))
    return out


@dataclass
class EPage:
    t: int
    r_max: int
    n: int
    dims: dict[tuple[int, int], int]

    @property
    def vanish_off_diagonal(self) -> bool:
        return all(d == 0 for (r, s), d in self.dims.items() if r + s != self.n)

    @property
    def diagonal_total(self) -> int:
        return sum(d for (r, s), d in self.dims.items() if r + s == self.n)

    def row(self, m: int) -> list[int]:
        """Dimensions in form degree ``m`` for ``r = 0..r_max``."""
        return [self.dims[(r, m - r)] for r in range(self.r_max + 1)]

    def to_json(self) -> dict:
        cells = [{"r": r, "s": s, "dim": d} for (r, s), d in sorted(self.dims.items())]
        return {"t": self.t, "r_max": self.r_max, "cells": cells,
                "vanish_off_diagonal": self.vanish_off_diagonal}


def e_page(decomp: HomogDecomp, t: int, r_max: int) -> EPage:
    """All cells ``E_t^(r,s)`` with ``0 <= r <= r_max`` and ``0 <= r + s <= n``."""
    if t < 1:
        raise ValueError("page index must be >= 1")
    n = decomp.n
    R = r_max + t - 1
    diffs = {m: FilteredDifferential(decomp, m, R) for m in range(-1, n + 1)}
    dims: dict[tuple[int, int], int] = {}
    F = decomp.field
    for m in range(n + 1):
        here, below = diffs[m], diffs[m - 1]
        for r in range(r_max + 1):
            Z = here.cycles(t, r)
            if Z.shape[0] == 0:
                dims[(r, m - r)] = 0
                continue
            lower = here.cycles(t - 1, r - 1)
            bounded = below.apply(below.cycles(t - 1, r + t - 1)) if below.src_dim else \
                np.zeros((0, here.src_dim), dtype=np.int64)
            denom = np.vstack([lower, bounded])
            dims[(r, m - r)] = Z.shape[0] - (linalg.rank(denom, F) if denom.shape[0] else 0)
    return EPage(t, r_max, n, dims)


def e1_vs_cohomology(decomp: HomogDecomp, r_max: int, page: EPage | None = None) -> bool:
    """``E_1`` cells equal the graded cohomology of ``df^(delta) ^`` at every degree."""
    page = page if page is not None and page.t == 1 else e_page(decomp, 1, r_max)
    cx = Complex(decomp.top, decomp.delta)
    return all(page.dims[(r, m - r)] == cx.h(m, r)
               for m in range(decomp.n + 1) for r in range(min(r_max, page.r_max) + 1))


def pages_monotone(pages: Sequence[EPage]) -> bool:
    """Dimensions weakly decrease from each page to the next."""
    for a, b in zip(pages, pages[1:]):
        if any(b.dims[k] > a.dims[k] for k in a.dims if k in b.dims):
            return False
    return True
