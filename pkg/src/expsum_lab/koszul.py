"""Graded differential forms and the complexes ``(Omega, dg ^ -)``.

A homogeneous ``k``-form ``sum_I w_I dx_I`` with polynomial degree ``l`` has
internal degree ``l + (n - k)(delta - 1)``, where ``delta`` is the top degree
of the job.  Under this grading ``dg ^`` preserves degree when
``deg g = delta`` and shifts it by ``deg g - delta`` in general, so every
cohomology group splits into finite-dimensional graded pieces.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .errors import CokernelTailError, NotStabilized
from .ffield import FieldSpec
from .mpoly import Exponent, HomogDecomp, MultiPoly, monomials

log = logging.getLogger(__name__)

Index = tuple[int, ...]
BasisElem = tuple[Index, Exponent]


def wedge_sign(j: int, I: Index) -> int:
    """Sign of ``dx_j ^ dx_I`` against the sorted index ``I + {j}``; 0 if ``j`` in ``I``."""
    if j in I:
        return 0
    return -1 if sum(1 for i in I if i < j) % 2 else 1


def _insert(j: int, I: Index) -> Index:
    return tuple(sorted(I + (j,)))


class KForm:
    """A differential ``k``-form with polynomial coefficients (indices 1-based)."""

    __slots__ = ("field", "n", "k", "coeffs")

    def __init__(self, field: FieldSpec, n: int, k: int, coeffs: Mapping[Index, MultiPoly] | None = None):
        self.field, self.n, self.k = field, n, k
        clean = {}
        for I, w in (coeffs or {}).items():
            I = tuple(I)
            if len(I) != k or list(I) != sorted(set(I)) or not all(1 <= i <= n for i in I):
                raise ValueError(f"bad index tuple {I}")
            if not w.is_zero():
                clean[I] = w
        self.coeffs = clean

    @classmethod
    def differential(cls, g: MultiPoly) -> "KForm":
        """``dg`` as a 1-form."""
        return cls(g.field, g.n, 1, {(i,): g.partial(i) for i in range(1, g.n + 1)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "KForm") -> "KForm":
        out = dict(self.coeffs)
        for I, w in other.coeffs.items():
            out[I] = out[I] + w if I in out else w
        return KForm(self.field, self.n, self.k, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, KForm) and self.k == other.k and self.coeffs == other.coeffs

    def wedge_dg(self, g: MultiPoly) -> "KForm":
        """``dg ^ self``."""
        out: dict[Index, MultiPoly] = {}
        zero = MultiPoly.zero(self.field, self.n)
        for j in range(1, self.n + 1):
            gj = g.partial(j)
            if gj.is_zero():
                continue
            for I, w in self.coeffs.items():
                s = wedge_sign(j, I)
                if not s:
                    continue
                term = gj * w
                if s < 0:
                    term = -term
                J = _insert(j, I)
                out[J] = out.get(J, zero) + term
        return KForm(self.field, self.n, self.k + 1, out)

    def degree(self, delta: int) -> int | None:
        """Internal degree if homogeneous, else ``None``."""
        degs = set()
        for w in self.coeffs.values():
            if not w.is_homogeneous():
                return None
            degs.add(int(w.degree()))
        if len(degs) != 1:
            return None
        return degs.pop() + (self.n - self.k) * (delta - 1)

    def to_vector(self, basis: Sequence[BasisElem]) -> np.ndarray:
        pos = {b: i for i, b in enumerate(basis)}
        v = np.zeros(len(basis), dtype=np.int64)
        for I, w in self.coeffs.items():
            for e, c in w.terms.items():
                v[pos[(I, e)]] = c
        return v

    @classmethod
    def from_vector(cls, field: FieldSpec, n: int, k: int, basis: Sequence[BasisElem], vec) -> "KForm":
        acc: dict[Index, dict[Exponent, int]] = {}
        for (I, e), c in zip(basis, vec):
            if c:
                acc.setdefault(I, {})[e] = int(c)
        return cls(field, n, k, {I: MultiPoly(field, n, t) for I, t in acc.items()})

    def __repr__(self) -> str:
        return f"KForm(k={self.k}, {self.coeffs})"


# ---------------------------------------------------------------------------
# graded bases


def poly_degree(n: int, k: int, r: int, delta: int) -> int:
    """Polynomial degree of the coefficients in the internal-degree-``r`` piece of ``Omega^k``."""
    return r - (n - k) * (delta - 1)


@lru_cache(maxsize=None)
def piece_basis(n: int, k: int, r: int, delta: int) -> tuple[BasisElem, ...]:
    """Monomial-wedge basis of the internal-degree-``r`` piece of ``Omega^k``."""
    if not 0 <= k <= n:
        return ()
    l = poly_degree(n, k, r, delta)
    if l < 0:
        return ()
    mons = monomials(n, l)
    return tuple((I, e) for I in itertools.combinations(range(1, n + 1), k) for e in mons)


def _index(basis: Sequence[BasisElem]) -> dict[BasisElem, int]:
    return {b: i for i, b in enumerate(basis)}


def wedge_map(g: MultiPoly, k: int, r: int, delta: int) -> np.ndarray:
    """Matrix of ``dg ^`` from the degree-``r`` piece of ``Omega^k``.

    Columns index the source basis, rows the target piece of ``Omega^(k+1)``
    in degree ``r + deg g - delta``.
    """
    if not g.is_homogeneous():
        raise ValueError("wedge_map needs a homogeneous polynomial")
    n, F = g.n, g.field
    src = piece_basis(n, k, r, delta)
    if g.is_zero():
        return np.zeros((0, len(src)), dtype=np.int64)
    shift = int(g.degree()) - delta
    tgt = piece_basis(n, k + 1, r + shift, delta)
    A = np.zeros((len(tgt), len(src)), dtype=np.int64)
    if not src or not tgt:
        return A
    pos = _index(tgt)
    grads = [g.partial(j).terms for j in range(1, n + 1)]
    for col, (I, e) in enumerate(src):
        for j in range(1, n + 1):
            s = wedge_sign(j, I)
            if not s:
                continue
            J = _insert(j, I)
            for ge, c in grads[j - 1].items():
                key = (J, tuple(a + b for a, b in zip(e, ge)))
                # a missing key would mean the grading bookkeeping is off
                row = pos[key]
                A[row, col] = F.add(A[row, col], c if s > 0 else F.neg(c))
    return A


# ---------------------------------------------------------------------------
# cohomology


@dataclass
class GradedCohomology:
    m: int
    dims: dict[int, int]
    bound: int
    stable_value: int | None
    window: int

    def to_json(self) -> dict:
        return {"m": self.m, "bound": self.bound, "dims": [self.dims[r] for r in range(self.bound + 1)],
                "stable_value": self.stable_value}


@dataclass
class PoincareSeries:
    """Coefficients of ``p(t)`` and, when stable, the numerator of ``q(t)/(1-t)``."""

    coeffs: list[int]
    numerator: list[int] | None = None

    @classmethod
    def from_cohomology(cls, H: GradedCohomology) -> "PoincareSeries":
        coeffs = [H.dims[r] for r in range(H.bound + 1)]
        num = None
        if H.stable_value is not None:
            num = [coeffs[0]] + [coeffs[r] - coeffs[r - 1] for r in range(1, len(coeffs))]
            while num and num[-1] == 0:
                num.pop()
        return cls(coeffs, num)

    def q_at_one(self) -> int | None:
        return None if self.numerator is None else sum(self.numerator)

    def to_json(self) -> dict:
        return {"coeffs": self.coeffs, "numerator": self.numerator}


class Complex:
    """Ranks of ``dg ^`` on graded pieces, memoized per ``(k, r)``."""

    def __init__(self, g: MultiPoly, delta: int):
        self.g, self.delta = g, delta
        self.n, self.field = g.n, g.field
        self._mats: dict[tuple[int, int], np.ndarray] = {}
        self._ranks: dict[tuple[int, int], int] = {}

    def matrix(self, k: int, r: int) -> np.ndarray:
        key = (k, r)
        if key not in self._mats:
            self._mats[key] = wedge_map(self.g, k, r, self.delta)
        return self._mats[key]

    def rank(self, k: int, r: int) -> int:
        key = (k, r)
        if key not in self._ranks:
            if k < 0 or k >= self.n:
                self._ranks[key] = 0
            else:
                self._ranks[key] = linalg.rank(self.matrix(k, r), self.field)
        return self._ranks[key]

    def dim(self, k: int, r: int) -> int:
        return len(piece_basis(self.n, k, r, self.delta))

    def h(self, m: int, r: int) -> int:
        """``dim H^m`` in degree ``r`` (``g`` must have degree ``delta``)."""
        return self.dim(m, r) - self.rank(m, r) - self.rank(m - 1, r)


def cohomology_dims(g: MultiPoly, m: int, r_max: int, delta: int | None = None, *,
                    strict: bool = True, cx: Complex | None = None) -> GradedCohomology:
    """Per-degree dimensions of ``H^m(Omega, dg ^)`` for ``r = 0..r_max``.

    Stable when the last ``delta`` degrees share one value; with ``strict``
    an unstable sequence raises :class:`NotStabilized`.
    """
    delta = delta if delta is not None else int(g.degree())
    cx = cx or Complex(g, delta)
    dims = {r: cx.h(m, r) for r in range(r_max + 1)}
    tail = [dims[r] for r in range(max(0, r_max - delta + 1), r_max + 1)]
    stable = tail[0] if len(tail) == delta and len(set(tail)) == 1 else None
    if stable is None and strict:
        raise NotStabilized(f"H^{m} not stabilized by r_max={r_max}")
    return GradedCohomology(m, dims, r_max, stable, delta)


def expected_difference(n: int, delta: int, bound: int) -> list[int]:
    """Coefficients of ``((1 - t^(delta-1)) / (1 - t))^n`` up to ``t^bound``."""
    base = [1] * (delta - 1)
    out = [1]
    for _ in range(n):
        nxt = [0] * (len(out) + len(base) - 1)
        for i, a in enumerate(out):
            for j, b in enumerate(base):
                nxt[i + j] += a * b
        out = nxt
    out = out[: bound + 1]
    return out + [0] * (bound + 1 - len(out))


def series_identity_check(p_n: PoincareSeries, p_n1: PoincareSeries, delta: int, n: int) -> bool:
    """``p_n - p_(n-1) == ((1 - t^(delta-1))/(1 - t))^n`` coefficientwise up to the common bound."""
    bound = min(len(p_n.coeffs), len(p_n1.coeffs)) - 1
    if bound < n * (delta - 2) + 1:
        raise ValueError("series too short for the identity check")
    want = expected_difference(n, delta, bound)
    return all(p_n.coeffs[r] - p_n1.coeffs[r] == want[r] for r in range(bound + 1))


def default_r_max(n: int, delta: int, delta_prime: int | None) -> int:
    dp = delta_prime if delta_prime is not None else delta - 1
    return n * (delta - 1) + (delta - dp) + 2 * delta


@dataclass
class CokernelResult:
    total: int
    contributions: dict[int, int]
    injective: bool
    kernel_degrees: list[int] = dc_field(default_factory=list)
    r_max: int = 0

    def to_json(self) -> dict:
        return {"total": self.total, "r_max": self.r_max,
                "contributions": [self.contributions[r] for r in sorted(self.contributions)],
                "injective": self.injective}


def _rows(A: np.ndarray) -> np.ndarray:
    """Column space of ``A`` as a row stack."""
    return np.ascontiguousarray(A.T)


def cokernel_by_degree(decomp: HomogDecomp, r_max: int) -> CokernelResult:
    """Per-degree cokernel of ``[w] -> [df^(delta') ^ w]`` from ``H^(n-1)`` to ``H^n``.

    The map lowers internal degree by ``delta - delta'``, so the degree-``r``
    part of ``H^n`` receives ``H^(n-1)`` in degree ``r + delta - delta'``.
    """
    n, F, delta = decomp.n, decomp.field, decomp.delta
    top = Complex(decomp.top, delta)
    g2 = decomp.second
    shift = delta - decomp.delta_prime if g2 is not None else 0
    contributions: dict[int, int] = {}
    injective = True
    bad: list[int] = []
    for r in range(r_max + 1):
        dim_n = top.dim(n, r)
        B_n = _rows(top.matrix(n - 1, r))
        rank_B = top.rank(n - 1, r)
        if g2 is None:
            contributions[r] = dim_n - rank_B
            continue
        s = r + shift
        # cycles of H^(n-1) in degree s
        Z = linalg.nullspace(top.matrix(n - 1, s), F)
        img = linalg.matmul(wedge_map(g2, n - 1, s, delta), Z, F) if Z.size else np.zeros((dim_n, 0), dtype=np.int64)
        stacked = np.vstack([_rows(img), B_n]) if img.size else B_n
        joint = linalg.rank(stacked, F) if stacked.size else 0
        contributions[r] = dim_n - joint
        h_src = top.h(n - 1, s)
        if joint - rank_B != h_src:
            injective = False
            bad.append(r)
    return CokernelResult(sum(contributions.values()), contributions, injective, bad, r_max)


def mf_from_cokernel(decomp: HomogDecomp, r_max: int | None = None, *, retries: int = 3) -> CokernelResult:
    """Total cokernel dimension, raising ``r_max`` by ``delta`` up to ``retries`` times.

    A trailing window of ``delta`` zero contributions is required before the
    total is reported.
    """
    delta = decomp.delta
    r_max = r_max if r_max is not None else default_r_max(decomp.n, delta, decomp.delta_prime)
    for attempt in range(retries + 1):
        res = cokernel_by_degree(decomp, r_max)
        window = [res.contributions[r] for r in range(max(0, r_max - delta + 1), r_max + 1)]
        if len(window) == delta and not any(window):
            return res
        log.info("cokernel tail nonzero at r_max=%d, retrying", r_max)
        if attempt < retries:
            r_max += delta
    raise CokernelTailError(f"cokernel tail not zero by r_max={r_max}")
