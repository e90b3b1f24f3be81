"""Common projective zeros of the partials of ``f^(delta)`` and their local invariants.

All local algebra is done by truncation: ``dim F[y] / (I + m^N)`` is the
corank of a Macaulay matrix, and once two consecutive truncations agree the
ideal contains ``m^N`` locally (Nakayama), so the common value is the exact
local length.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .errors import CertificateMismatch, NoStabilization, NotStabilized, PositiveDimensional
from .ffield import DEFAULT_BUDGET, FieldSpec, check_budget, make_extension
from .mpoly import Exponent, HomogDecomp, MultiPoly, monomials, monomials_below

log = logging.getLogger(__name__)

DEFAULT_N_MAX = 20


# ---------------------------------------------------------------------------
# graded quotient


def _row(poly_terms: Mapping[Exponent, int], pos: Mapping[Exponent, int], width: int) -> np.ndarray:
    v = np.zeros(width, dtype=np.int64)
    for e, c in poly_terms.items():
        v[pos[e]] = c
    return v


def _shift(e: Exponent, m: Exponent) -> Exponent:
    return tuple(a + b for a, b in zip(e, m))


def hilbert_function(gens: Sequence[MultiPoly], d: int) -> int:
    """``dim (F[x] / (gens))_d`` for homogeneous generators."""
    if not gens:
        raise ValueError("need at least one generator (possibly zero)")
    n, F = gens[0].n, gens[0].field
    basis = monomials(n, d)
    pos = {e: i for i, e in enumerate(basis)}
    rows = []
    for g in gens:
        if g.is_zero() or g.degree() > d:
            continue
        for m in monomials(n, d - int(g.degree())):
            rows.append(_row({_shift(e, m): c for e, c in g.terms.items()}, pos, len(basis)))
    if not rows:
        return len(basis)
    return len(basis) - linalg.rank(np.array(rows), F)


@dataclass
class HilbertResult:
    values: list[int]
    degree: int
    certified_at: int

    def to_json(self) -> dict:
        return {"values": self.values, "degree": self.degree, "certified_at": self.certified_at}


def scheme_degree(gens: Sequence[MultiPoly], d_max: int | None = None) -> HilbertResult:
    """Stable value ``D`` of the Hilbert function, with a persistence certificate.

    ``H(d) = H(d+1) = c <= d`` with ``d`` at least the generator degree forces
    ``H`` to stay at ``c`` (maximal growth of a constant), so ``D = c``.
    """
    n = gens[0].n
    degs = [int(g.degree()) for g in gens if not g.is_zero()]
    top = max(degs, default=0)
    if d_max is None:
        d_max = n * (top + 1) + top ** max(n - 1, 0) + 4
    values = [hilbert_function(gens, 0)]
    for d in range(1, d_max + 1):
        values.append(hilbert_function(gens, d))
        c = values[d - 1]
        if d - 1 >= top and values[d] == c and c <= d - 1:
            return HilbertResult(values, c, d - 1)
    if values[-1] > values[-2]:
        raise PositiveDimensional(f"positive-dimensional zero set (Hilbert function still growing at {d_max})")
    raise NotStabilized(f"Hilbert function not certified by degree {d_max}")


# ---------------------------------------------------------------------------
# local algebra


@dataclass
class LocalLength:
    value: int
    n_star: int
    sequence: list[int]


def local_length(gens: Sequence[MultiPoly], N_max: int = DEFAULT_N_MAX) -> LocalLength:
    """Length of ``F[y]_m / (gens)`` at the origin, by truncation.

    Raises :class:`NoStabilization` if ``d_N`` keeps changing up to ``N_max``.
    """
    m_vars, F = gens[0].n, gens[0].field
    seq: list[int] = []
    prev = None
    for N in range(1, N_max + 2):
        basis = monomials_below(m_vars, N)
        pos = {e: i for i, e in enumerate(basis)}
        rows = []
        for g in gens:
            terms = g.truncate(N).terms
            if not terms:
                continue
            for mono in basis:
                shifted = {}
                for e, c in terms.items():
                    s = _shift(e, mono)
                    if sum(s) < N:
                        shifted[s] = c
                if shifted:
                    rows.append(_row(shifted, pos, len(basis)))
        dim = len(basis) - (linalg.rank(np.array(rows), F) if rows else 0)
        seq.append(dim)
        if prev is not None and dim == prev:
            return LocalLength(dim, N - 1, seq)
        prev = dim
    raise NoStabilization(f"no stabilization by N_max={N_max}")


def milnor_number(h: MultiPoly, at: Sequence[int] | None = None, N_max: int = DEFAULT_N_MAX) -> LocalLength:
    """``dim F[y]_m / (dh/dy_1, ..., dh/dy_m)`` at the affine point ``at``."""
    if at is not None:
        h = h.translate(at)
    if h.n == 0:
        return LocalLength(1, 0, [1])
    return local_length(h.gradient(), N_max)


def jacobian_membership(h: MultiPoly, at: Sequence[int] | None, n_star: int) -> bool:
    """Whether ``h`` lies in ``m * (dh/dy)`` locally at ``at``.

    Checked modulo ``m^T`` with ``T = n_star + deg h``; the Jacobian ideal
    contains ``m^n_star`` locally, so nothing is lost by the truncation.
    """
    if at is not None:
        h = h.translate(at)
    if h.n == 0:
        return h.is_zero()
    T = n_star + max(int(h.degree()), 1) if not h.is_zero() else n_star + 1
    F = h.field
    basis = monomials_below(h.n, T)
    pos = {e: i for i, e in enumerate(basis)}
    rows = []
    for g in h.gradient():
        terms = g.truncate(T).terms
        if not terms:
            continue
        for mono in basis[1:]:  # multipliers in m
            shifted = {}
            for e, c in terms.items():
                s = _shift(e, mono)
                if sum(s) < T:
                    shifted[s] = c
            if shifted:
                rows.append(_row(shifted, pos, len(basis)))
    target = _row(h.truncate(T).terms, pos, len(basis))
    if not target.any():
        return True
    if not rows:
        return False
    return linalg.in_span(np.array(rows), target, F)


def weighted_degrees(h: MultiPoly, at: Sequence[int] | None = None) -> list[int]:
    """Total degrees under which the germ at ``at`` is literally weighted homogeneous.

    One variable: the order of the germ.  Several: positive integer weights
    up to ``deg h`` with gcd 1 under which every monomial of the shifted germ
    has the same weight.
    """
    if at is not None:
        h = h.translate(at)
    if h.is_zero() or h.order() < 1:
        return []
    if h.n == 1:
        return [int(h.order())]
    W = int(h.degree())
    exps = list(h.terms)
    found = set()
    for w in itertools.product(range(1, W + 1), repeat=h.n):
        if math.gcd(*w) != 1:
            continue
        degs = {sum(a * b for a, b in zip(e, w)) for e in exps}
        if len(degs) == 1:
            found.add(degs.pop())
    return sorted(found)


# ---------------------------------------------------------------------------
# points


@dataclass
class SingularPoint:
    """A closed point of the critical locus, stored by one representative."""

    coords: tuple[int, ...]
    field: FieldSpec
    d: int
    multiplicity: int
    chart: int
    mu: int | None = None
    n_star: int | None = None
    jacobian_membership: bool | None = None
    total_degree: int | None = None
    total_degree_candidates: list[int] = dc_field(default_factory=list)
    total_degree_source: str = "none"
    on_fprime: bool = False
    local_68: int | None = None
    label: str = ""
    error: str = ""

    def affine(self) -> tuple[int, ...]:
        """Coordinates in the chart ``x_chart = 1`` (the chart variable dropped)."""
        F = self.field
        k = self.chart - 1
        inv = F.inv(self.coords[k])
        return tuple(F.mul(c, inv) for j, c in enumerate(self.coords) if j != k)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "coords": [list(self.field.coords(c)) for c in self.coords],
            "d": self.d,
            "chart": self.chart,
            "multiplicity": self.multiplicity,
            "mu": self.mu,
            "membership": self.jacobian_membership,
            "total_degree": self.total_degree,
            "total_degree_candidates": self.total_degree_candidates,
            "total_degree_source": self.total_degree_source,
            "on_fprime": self.on_fprime,
            "local_68": self.local_68,
            "error": self.error,
        }


def _veval(g: MultiPoly, cols: Sequence, F: FieldSpec, size: int) -> np.ndarray:
    """Evaluate ``g`` (over ``F``) on a batch of points given column-wise."""
    total = np.zeros(size, dtype=np.int64)
    powers: dict[tuple[int, int], np.ndarray] = {}

    def pw(j: int, k: int) -> np.ndarray:
        if (j, k) not in powers:
            base = np.broadcast_to(np.asarray(cols[j], dtype=np.int64), (size,))
            powers[(j, k)] = base.copy() if k == 1 else F.vmul(pw(j, k - 1), base)
        return powers[(j, k)]

    for e, c in g.terms.items():
        v = np.full(size, c, dtype=np.int64)
        for j, k in enumerate(e):
            if k:
                v = F.vmul(v, pw(j, k))
        total = F.vadd(total, v)
    return total


def _projective_batches(F: FieldSpec, n: int):
    """Normalized points of ``P^(n-1)(F)`` grouped by the position of the leading 1."""
    Q = F.q
    for lead in range(n):
        free = n - 1 - lead
        size = Q**free
        idx = np.arange(size, dtype=np.int64)
        cols: list = [0] * lead + [1]
        for j in range(free):
            cols.append((idx // Q ** (free - 1 - j)) % Q)
        yield size, cols


def _orbit(pt: tuple[int, ...], F: FieldSpec, q: int, d: int) -> list[tuple[int, ...]]:
    out = [pt]
    cur = pt
    for _ in range(d):
        cur = tuple(F.pow(c, q) for c in cur)
        if cur == pt:
            break
        out.append(cur)
    return out


def find_common_zeros(partials: Sequence[MultiPoly], *, budget: int = DEFAULT_BUDGET,
                      hilbert: HilbertResult | None = None) -> tuple[list[SingularPoint], HilbertResult]:
    """Closed points of ``V(partials)`` in ``P^(n-1)``, complete by the degree certificate.

    Each point is stored once (lexicographically smallest conjugate) with its
    residue degree ``d`` and the local length of the partials' ideal,
    computed in the chart of its last nonzero coordinate.
    """
    base, n = partials[0].field, partials[0].n
    hil = hilbert or scheme_degree(partials)
    D = hil.degree
    points: list[SingularPoint] = []
    acc = 0
    for d in range(1, D + 1):
        if acc >= D:
            break
        ext, emb = make_extension(base, d)
        check_budget((ext.q**n - 1) // (ext.q - 1), budget)
        mapped = [g.map_field(emb) for g in partials]
        for size, cols in _projective_batches(ext, n):
            mask = np.ones(size, dtype=bool)
            for g in mapped:
                mask &= _veval(g, cols, ext, size) == 0
                if not mask.any():
                    break
            for k in np.flatnonzero(mask):
                pt = tuple(int(np.broadcast_to(np.asarray(c), (size,))[k]) for c in cols)
                orbit = _orbit(pt, ext, base.q, d)
                if len(orbit) != d or pt != min(orbit):
                    continue
                chart = max(j for j, c in enumerate(pt) if c) + 1
                sp = SingularPoint(pt, ext, d, 0, chart)
                gens = [g.dehomogenize(chart).translate(sp.affine()) for g in mapped]
                if n == 1:
                    mult = 1
                else:
                    mult = local_length(gens, N_max=max(DEFAULT_N_MAX, D + 2)).value
                sp.multiplicity = mult
                points.append(sp)
                acc += mult * d
        log.debug("after degree %d: %d of %d accounted for", d, acc, D)
    if acc != D:
        raise CertificateMismatch(f"certificate mismatch: found {acc}, scheme degree {D}")
    points.sort(key=lambda s: (s.d, s.coords))
    for i, sp in enumerate(points, start=1):
        sp.label = f"P{i}"
    return points, hil


def analyze_points(decomp: HomogDecomp, points: Sequence[SingularPoint], *,
                   total_degrees: Mapping[str, int | Sequence[int]] | None = None,
                   N_max: int = DEFAULT_N_MAX) -> None:
    """Fill in mu, membership, total degree, ``f^(delta')`` vanishing and the length of ``(dh/dy, h_n)``."""
    total_degrees = dict(total_degrees or {})
    base = decomp.field
    for sp in points:
        _, emb = make_extension(base, sp.d)
        top = decomp.top.map_field(emb)
        at = sp.affine()
        h = top.dehomogenize(sp.chart)
        h_n = top.partial(sp.chart).dehomogenize(sp.chart)
        try:
            ll = milnor_number(h, at, N_max)
        except NoStabilization as exc:
            sp.error = str(exc)
        else:
            sp.mu, sp.n_star = ll.value, ll.n_star
            sp.jacobian_membership = jacobian_membership(h, at, ll.n_star)
            sp.local_68 = local_length([g.translate(at) for g in h.gradient() + [h_n]], N_max).value \
                if h.n else 1
        if decomp.second is not None:
            sp.on_fprime = decomp.second.map_field(emb).evaluate(sp.coords) == 0
        if sp.label in total_degrees:
            given = total_degrees[sp.label]
            cands = [int(given)] if isinstance(given, int) else [int(x) for x in given]
            sp.total_degree_candidates = cands
            sp.total_degree_source = "user"
        elif sp.jacobian_membership:
            sp.total_degree_candidates = weighted_degrees(h, at)
            sp.total_degree_source = "detected" if sp.total_degree_candidates else "none"
        p = base.p
        coprime = [x for x in sp.total_degree_candidates if x % p]
        if coprime:
            sp.total_degree = coprime[0]
        elif sp.total_degree_candidates:
            sp.total_degree = sp.total_degree_candidates[0]


def local_sum_68(points: Sequence[SingularPoint]) -> int:
    """``sum d * dim F[y]_m / (dh/dy, h_n)`` over the analyzed points."""
    if any(sp.local_68 is None for sp in points):
        raise ValueError("points not analyzed")
    return sum(sp.d * sp.local_68 for sp in points)


def milnor_total(points: Sequence[SingularPoint]) -> int:
    """``sum mu_i`` over geometric points (a closed point of degree ``d`` counts ``d`` times)."""
    if any(sp.mu is None for sp in points):
        raise ValueError("a Milnor number is missing")
    return sum(sp.d * sp.mu for sp in points)
