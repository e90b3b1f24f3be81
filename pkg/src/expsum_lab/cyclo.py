"""Exact arithmetic in Q(zeta_p) and truncated power series over it.

A :class:`CycloNum` stores rational coordinates against ``1, zeta, ...,
zeta^(p-2)``; the relation ``1 + zeta + ... + zeta^(p-1) = 0`` is applied on
construction so that equality is coordinate equality.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

Rational = Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den or 1))


class CycloNum:
    __slots__ = ("p", "coords")

    def __init__(self, p: int, coords: Sequence):
        cs = [_frac(c) for c in coords]
        if len(cs) > p:
            raise ValueError("too many coordinates")
        cs += [Fraction(0)] * (p - len(cs))
        # reduce against 1 + zeta + ... + zeta^(p-1) = 0
        top = cs[p - 1]
        self.p = p
        self.coords = tuple(c - top for c in cs[: p - 1])

    @classmethod
    def from_int(cls, p: int, k) -> "CycloNum":
        return cls(p, [k])

    @classmethod
    def from_histogram(cls, p: int, counts: Sequence[int]) -> "CycloNum":
        """``sum_u counts[u] zeta^u``."""
        return cls(p, list(counts))

    def _full(self) -> list[Fraction]:
        return list(self.coords) + [Fraction(0)]

    def _lift(self, other) -> "CycloNum":
        if isinstance(other, CycloNum):
            if other.p != self.p:
                raise TypeError("different cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNum(self.p, [other])
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return CycloNum(self.p, [a + b for a, b in zip(self._full(), o._full())])

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.p, [-a for a in self._full()])

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNum(self.p, [a * other for a in self._full()])
        o = self._lift(other)
        if o is NotImplemented:
            return o
        p = self.p
        out = [Fraction(0)] * p
        a, b = self._full(), o._full()
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % p] += x * y
        return CycloNum(p, out)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, (int, Fraction)):
            return CycloNum(self.p, [a / k for a in self._full()])
        return NotImplemented

    def __pow__(self, e: int):
        result = CycloNum.from_int(self.p, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        o = self._lift(other) if isinstance(other, (CycloNum, int, Fraction)) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self) -> int:
        return hash((self.p, self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_integral(self) -> bool:
        """Integer coordinates, i.e. membership in Z[zeta_p]."""
        return all(c.denominator == 1 for c in self.coords)

    def galois(self, k: int) -> "CycloNum":
        """Image under ``zeta -> zeta^k`` for ``k`` prime to ``p``."""
        if k % self.p == 0:
            raise ValueError("k must be prime to p")
        out = [Fraction(0)] * self.p
        for j, c in enumerate(self._full()):
            out[(j * k) % self.p] += c
        return CycloNum(self.p, out)

    def __repr__(self) -> str:
        terms = [f"{c}*z^{j}" for j, c in enumerate(self.coords) if c]
        return f"CycloNum(p={self.p}: {' + '.join(terms) or '0'})"

    def to_json(self) -> dict:
        return {"p": self.p, "coords": [format_rational(c) for c in self.coords]}

    @classmethod
    def from_json(cls, data: dict) -> "CycloNum":
        return cls(int(data["p"]), [parse_rational(s) for s in data["coords"]])


def zeta_power(p: int, u: int) -> CycloNum:
    """``zeta_p^u`` in reduced coordinates."""
    counts = [0] * p
    counts[u % p] = 1
    return CycloNum(p, counts)


@dataclass(frozen=True)
class ComplexBall:
    """Complex number ``center`` with ``|true - center| <= radius``."""

    center: mpmath.mpc
    radius: mpmath.mpf

    def __abs__(self):
        return abs(self.center)


def _endpoints(v) -> tuple[mpmath.mpf, mpmath.mpf]:
    # exact endpoints; going through .mid would round to a double
    return tuple(mpmath.mp.make_mpf(r) for r in v._mpi_)


def embed_complex(x: CycloNum, precision: int = 30) -> ComplexBall:
    """Evaluate at ``zeta_p = exp(2 pi i / p)`` with a rigorous error radius.

    Interval arithmetic carries the rounding error; the working precision is
    raised until the radius is at most ``10^-precision``.
    """
    if precision < 15:
        raise ValueError("precision must be at least 15 digits")
    p = x.p
    bound = mpmath.mpf(10) ** (-precision)
    extra = 10
    iv = mpmath.iv
    while True:
        saved = iv.prec
        iv.dps = precision + extra
        try:
            re = iv.mpf(0)
            im = iv.mpf(0)
            for j, c in enumerate(x.coords):
                if not c:
                    continue
                cv = iv.mpf(c.numerator) / c.denominator
                angle = 2 * iv.pi * j / p
                re += cv * iv.cos(angle)
                im += cv * iv.sin(angle)
        finally:
            iv.prec = saved
        with mpmath.workdps(precision + extra):
            (r0, r1), (i0, i1) = (_endpoints(v) for v in (re, im))
            center = mpmath.mpc((r0 + r1) / 2, (i0 + i1) / 2)
            radius = mpmath.hypot(r1 - r0, i1 - i0) / 2
        if radius <= bound:
            return ComplexBall(center, radius)
        extra += 20


# ---------------------------------------------------------------------------


class CycloSeries:
    """Power series ``sum_{k<=N} c_k t^k`` over Q(zeta_p), truncated at order ``N``."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable):
        self.p = p
        self.coeffs = tuple(c if isinstance(c, CycloNum) else CycloNum(p, [c]) for c in coeffs)
        if not self.coeffs:
            raise ValueError("series needs at least a constant term")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> CycloNum:
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def _zero(self) -> CycloNum:
        return CycloNum(self.p, [])

    def __add__(self, other: "CycloSeries") -> "CycloSeries":
        N = min(self.order, other.order)
        return CycloSeries(self.p, [self[k] + other[k] for k in range(N + 1)])

    def __neg__(self) -> "CycloSeries":
        return CycloSeries(self.p, [-c for c in self.coeffs])

    def __mul__(self, other) -> "CycloSeries":
        if isinstance(other, (int, Fraction, CycloNum)):
            return CycloSeries(self.p, [c * other for c in self.coeffs])
        N = min(self.order, other.order)
        out = []
        for k in range(N + 1):
            acc = self._zero()
            for j in range(k + 1):
                if self[j] and other[k - j]:
                    acc = acc + self[j] * other[k - j]
            out.append(acc)
        return CycloSeries(self.p, out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycloSeries):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def truncate(self, N: int) -> "CycloSeries":
        return CycloSeries(self.p, self.coeffs[: N + 1])

    def galois(self, k: int) -> "CycloSeries":
        return CycloSeries(self.p, [c.galois(k) for c in self.coeffs])

    def __repr__(self) -> str:
        return f"CycloSeries(p={self.p}, order={self.order})"


def series_exp(s: CycloSeries) -> CycloSeries:
    """``exp(s)`` to the order of ``s``, from ``E' = s' E``."""
    if s[0]:
        raise ValueError("nonzero constant term")
    N = s.order
    E = [CycloNum.from_int(s.p, 1)]
    for k in range(1, N + 1):
        acc = CycloNum(s.p, [])
        for j in range(1, k + 1):
            if s[j]:
                acc = acc + s[j] * E[k - j] * j
        E.append(acc / k)
    return CycloSeries(s.p, E)


def series_log(E: CycloSeries) -> CycloSeries:
    """Inverse of :func:`series_exp` for series with constant term 1."""
    if E[0] != 1:
        raise ValueError("log needs constant term 1")
    N = E.order
    s = [CycloNum(E.p, [])]
    for k in range(1, N + 1):
        acc = E[k] * k
        for j in range(1, k):
            if s[j]:
                acc = acc - s[j] * E[k - j] * j
        s.append(acc / k)
    return CycloSeries(E.p, s)
