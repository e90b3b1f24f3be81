"""Sparse multivariate polynomials over a finite field.

Variables are indexed from 1 in every public method, matching the ``x1 .. xn``
names of the text format.  Coefficients are field encodings (ints).
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ParseError
from .ffield import Embedding, FieldElement, FieldSpec

Exponent = tuple[int, ...]
NEG_INF = -math.inf


def grlex_key(e: Exponent) -> tuple:
    return (sum(e), e)


class MultiPoly:
    """Immutable polynomial ``sum c_e x^e`` with ``e`` ranging over exponent tuples."""

    __slots__ = ("field", "n", "_terms", "_hash")

    def __init__(self, field: FieldSpec, n: int, terms: Mapping[Exponent, int] | None = None):
        self.field = field
        self.n = n
        clean: dict[Exponent, int] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != n or any(k < 0 for k in e):
                raise ValueError(f"bad exponent {e} for {n} variables")
            if isinstance(c, FieldElement):
                c = c.value
            if c:
                clean[e] = c
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field: FieldSpec, n: int) -> "MultiPoly":
        return cls(field, n)

    @classmethod
    def constant(cls, field: FieldSpec, n: int, c: int) -> "MultiPoly":
        return cls(field, n, {(0,) * n: c})

    @classmethod
    def variable(cls, field: FieldSpec, n: int, i: int) -> "MultiPoly":
        e = [0] * n
        e[i - 1] = 1
        return cls(field, n, {tuple(e): 1})

    @classmethod
    def monomial(cls, field: FieldSpec, exps: Sequence[int], c: int = 1) -> "MultiPoly":
        return cls(field, len(exps), {tuple(exps): c})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self) -> list[tuple[Exponent, int]]:
        """Terms in graded-lexicographic order, highest first."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def __iter__(self) -> Iterator[tuple[Exponent, int]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, e: Sequence[int]) -> FieldElement:
        return FieldElement(self.field, self._terms.get(tuple(e), 0))

    def degree(self) -> int | float:
        """Total degree; ``-inf`` for the zero polynomial."""
        if not self._terms:
            return NEG_INF
        return max(sum(e) for e in self._terms)

    def order(self) -> int | float:
        """Lowest total degree of a term; ``inf`` for the zero polynomial."""
        if not self._terms:
            return math.inf
        return min(sum(e) for e in self._terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def homogeneous_component(self, d: int) -> "MultiPoly":
        return MultiPoly(self.field, self.n, {e: c for e, c in self._terms.items() if sum(e) == d})

    def components(self) -> dict[int, "MultiPoly"]:
        out: dict[int, dict] = {}
        for e, c in self._terms.items():
            out.setdefault(sum(e), {})[e] = c
        return {d: MultiPoly(self.field, self.n, t) for d, t in sorted(out.items())}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.field == other.field and self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field, self.n, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "MultiPoly") -> None:
        if self.field != other.field or self.n != other.n:
            raise TypeError("polynomials over different rings")

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, FieldElement):
            return MultiPoly.constant(self.field, self.n, other.value)
        if isinstance(other, int):
            return MultiPoly.constant(self.field, self.n, self.field.from_int(other))
        return NotImplemented

    def __add__(self, other) -> "MultiPoly":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        F = self.field
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = F.add(out.get(e, 0), c)
        return MultiPoly(F, self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        F = self.field
        return MultiPoly(F, self.n, {e: F.neg(c) for e, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def scale(self, c: int) -> "MultiPoly":
        F = self.field
        return MultiPoly(F, self.n, {e: F.mul(c, v) for e, v in self._terms.items()})

    def __mul__(self, other) -> "MultiPoly":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        F = self.field
        out: dict[Exponent, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = F.add(out.get(e, 0), F.mul(c1, c2))
        return MultiPoly(F, self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        result = MultiPoly.constant(self.field, self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- calculus -----------------------------------------------------------

    def partial(self, i: int) -> "MultiPoly":
        """Formal partial derivative in ``x_i`` (coefficients reduced mod p)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"variable index {i} out of range 1..{self.n}")
        F = self.field
        k = i - 1
        out: dict[Exponent, int] = {}
        for e, c in self._terms.items():
            if e[k] % F.p:
                e2 = list(e)
                e2[k] -= 1
                out[tuple(e2)] = F.mul(F.from_int(e[k]), c)
        return MultiPoly(F, self.n, out)

    def gradient(self) -> list["MultiPoly"]:
        return [self.partial(i) for i in range(1, self.n + 1)]

    # -- evaluation and substitution ----------------------------------------

    def evaluate(self, point: Sequence[int], embed: Embedding | None = None) -> int:
        """Value at ``point``; with ``embed`` the point lives in ``embed.dst``."""
        F = embed.dst if embed is not None else self.field
        if len(point) != self.n:
            raise ValueError("point has wrong length")
        powers: list[dict[int, int]] = [{0: 1} for _ in range(self.n)]

        def pw(j: int, k: int) -> int:
            cache = powers[j]
            if k not in cache:
                cache[k] = F.pow(point[j], k)
            return cache[k]

        total = 0
        for e, c in self._terms.items():
            v = embed(c) if embed is not None else c
            for j, k in enumerate(e):
                if k:
                    v = F.mul(v, pw(j, k))
                    if not v:
                        break
            total = F.add(total, v)
        return total

    def map_field(self, embed: Embedding) -> "MultiPoly":
        return MultiPoly(embed.dst, self.n, {e: embed(c) for e, c in self._terms.items()})

    def substitute(self, polys: Sequence["MultiPoly"]) -> "MultiPoly":
        """``f(g_1, ..., g_n)`` for polynomials ``g_j`` sharing one ring."""
        if len(polys) != self.n:
            raise ValueError("need one polynomial per variable")
        ring_field, ring_n = polys[0].field, polys[0].n
        cache: dict[tuple[int, int], MultiPoly] = {}

        def pw(j: int, k: int) -> MultiPoly:
            if (j, k) not in cache:
                cache[(j, k)] = polys[j] ** k
            return cache[(j, k)]

        out = MultiPoly.zero(ring_field, ring_n)
        for e, c in self._terms.items():
            term = MultiPoly.constant(ring_field, ring_n, c)
            for j, k in enumerate(e):
                if k:
                    term = term * pw(j, k)
            out = out + term
        return out

    def dehomogenize(self, i: int) -> "MultiPoly":
        """Set ``x_i = 1``; the result has ``n - 1`` variables."""
        k = i - 1
        F = self.field
        out: dict[Exponent, int] = {}
        for e, c in self._terms.items():
            e2 = e[:k] + e[k + 1 :]
            out[e2] = F.add(out.get(e2, 0), c)
        return MultiPoly(F, self.n - 1, out)

    def translate(self, shift: Sequence[int]) -> "MultiPoly":
        """``f(y + shift)``."""
        F = self.field
        if not any(shift):
            return self
        polys = [
            MultiPoly.variable(F, self.n, j + 1) + MultiPoly.constant(F, self.n, s)
            for j, s in enumerate(shift)
        ]
        return self.substitute(polys)

    def truncate(self, N: int) -> "MultiPoly":
        """Drop every term of total degree ``>= N``."""
        return MultiPoly(self.field, self.n, {e: c for e, c in self._terms.items() if sum(e) < N})

    # -- text ---------------------------------------------------------------

    def render(self) -> str:
        if not self._terms:
            return "0"
        if self.field.a > 1 and any(c >= self.field.p for c in self._terms.values()):
            raise ValueError("only prime-field coefficients have a text form")
        parts = []
        for e, c in self.items():
            mono = "*".join(
                f"x{j + 1}" if k == 1 else f"x{j + 1}^{k}" for j, k in enumerate(e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        try:
            body = self.render()
        except ValueError:
            body = repr(self.to_json())
        return f"MultiPoly({body!r} over {self.field!r})"

    def to_json(self) -> list:
        """Canonical term list ``[[exponent, coords], ...]`` in grlex order."""
        return [[list(e), list(self.field.coords(c))] for e, c in self.items()]

    def canonical(self) -> str:
        return json.dumps({"field": self.field.to_json(), "n": self.n, "terms": self.to_json()},
                          sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>x)|(?P<op>[-+*^]))")


def _tokens(src: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(src):
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(src)))
    return out


def parse(src: str, n: int, field: FieldSpec) -> MultiPoly:
    """Parse the ``x1^2*x2 + 3*x2`` text format.

    Grammar (whitespace ignored)::

        poly     ::= term (('+'|'-') term)*
        term     ::= coeff ('*' monomial)? | monomial
        monomial ::= 'x' INDEX ('^' EXP)? ('*' monomial)*

    A leading sign is also accepted.  Integer coefficients are reduced mod p.
    """
    toks = _tokens(src)
    pos = 0

    def peek() -> tuple[str, str, int]:
        return toks[pos]

    def take(kind: str, value: str | None = None) -> tuple[str, str, int]:
        nonlocal pos
        tok = toks[pos]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want}, got {got!r}", tok[2])
        pos += 1
        return tok

    def factor(exps: list[int]) -> None:
        take("var")
        kind, val, at = peek()
        if kind != "int":
            raise ParseError("expected variable index after 'x'", at)
        take("int")
        idx = int(val)
        if not 1 <= idx <= n:
            raise ParseError(f"variable index {idx} out of range 1..{n}", at)
        power = 1
        if peek()[:2] == ("op", "^"):
            take("op", "^")
            power = int(take("int")[1])
        exps[idx - 1] += power

    def term() -> tuple[int, list[int]]:
        exps = [0] * n
        coeff = 1
        kind, val, at = peek()
        if kind == "int":
            take("int")
            coeff = int(val)
            if peek()[:2] != ("op", "*"):
                return coeff, exps
            take("op", "*")
        elif kind != "var":
            raise ParseError(f"expected term, got {val or 'end of input'!r}", at)
        factor(exps)
        while peek()[:2] == ("op", "*"):
            take("op", "*")
            factor(exps)
        return coeff, exps

    terms: dict[Exponent, int] = {}
    sign = 1
    if peek()[0] == "op" and peek()[1] in "+-":
        sign = -1 if take("op")[1] == "-" else 1
    while True:
        coeff, exps = term()
        e = tuple(exps)
        terms[e] = terms.get(e, 0) + sign * coeff
        kind, val, at = peek()
        if kind == "end":
            break
        if kind == "op" and val in "+-":
            take("op")
            sign = -1 if val == "-" else 1
            continue
        raise ParseError(f"unexpected {val!r}", at)
    return MultiPoly(field, n, {e: field.from_int(c) for e, c in terms.items()})


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomogDecomp:
    """``f = f^(delta) + f^(delta') + ...`` with ``delta'`` the second-highest degree."""

    f: MultiPoly
    delta: int
    delta_prime: int | None
    components: dict[int, MultiPoly] = dc_field(repr=False)

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def field(self) -> FieldSpec:
        return self.f.field

    @property
    def top(self) -> MultiPoly:
        return self.components[self.delta]

    @property
    def second(self) -> MultiPoly | None:
        return None if self.delta_prime is None else self.components[self.delta_prime]

    @property
    def homogeneous(self) -> bool:
        return len(self.components) == 1

    def component(self, d: int) -> MultiPoly:
        return self.components.get(d, MultiPoly.zero(self.field, self.n))

    @property
    def e(self) -> int | None:
        return None if self.delta_prime is None else self.delta - self.delta_prime + 1


def decompose(f: MultiPoly) -> HomogDecomp:
    """Split ``f`` into homogeneous components.

    ``delta_prime`` is the largest degree in ``[1, delta - 1]`` carrying a
    nonzero component, or ``None`` when there is none (homogeneous input, or
    only a constant below the top degree).
    """
    if f.is_zero() or f.degree() < 2:
        raise ValueError("constant or linear polynomial")
    comps = f.components()
    delta = int(f.degree())
    lower = [d for d in comps if 1 <= d < delta]
    return HomogDecomp(f, delta, max(lower) if lower else None, comps)


@dataclass(frozen=True)
class EulerResult:
    holds: bool
    residue: MultiPoly
    p_divides_degree: bool


def euler_check(g: MultiPoly) -> EulerResult:
    """Check ``d g = sum x_i dg/dx_i`` for homogeneous ``g`` of degree ``d``.

    When ``p | d`` this is the rearranged relation
    ``x_n dg/dx_n = -sum_{i<n} x_i dg/dx_i``, and the residue reported is its
    difference.
    """
    if not g.is_homogeneous():
        raise ValueError("euler_check needs a homogeneous polynomial")
    F, n = g.field, g.n
    d = 0 if g.is_zero() else int(g.degree())
    p_div = d % F.p == 0
    xs = [MultiPoly.variable(F, n, i) for i in range(1, n + 1)]
    if p_div:
        lhs = xs[-1] * g.partial(n)
        rhs = -sum((xs[i] * g.partial(i + 1) for i in range(n - 1)), MultiPoly.zero(F, n))
    else:
        lhs = g.scale(F.from_int(d))
        rhs = sum((xs[i] * g.partial(i + 1) for i in range(n)), MultiPoly.zero(F, n))
    residue = lhs - rhs
    return EulerResult(residue.is_zero(), residue, p_div)


def random_poly(field: FieldSpec, n: int, degree: int, rng, density: float = 0.5,
                homogeneous: bool = False) -> MultiPoly:
    """Random polynomial for property tests."""
    from itertools import product

    terms = {}
    for e in product(range(degree + 1), repeat=n):
        s = sum(e)
        if s > degree or (homogeneous and s != degree):
            continue
        if rng.random() < density:
            terms[e] = rng.randrange(field.q)
    return MultiPoly(field, n, terms)


def monomials(n: int, d: int) -> list[Exponent]:
    """Exponent tuples of total degree ``d`` in ``n`` variables, grlex descending."""
    if d < 0:
        return []
    if n == 0:
        return [()] if d == 0 else []
    out = []
    for k in range(d, -1, -1):
        for rest in monomials(n - 1, d - k):
            out.append((k,) + rest)
    return out


def monomials_below(n: int, N: int) -> list[Exponent]:
    """All exponents of total degree ``< N``, in increasing degree."""
    out: list[Exponent] = []
    for d in range(N):
        out.extend(monomials(n, d))
    return out


def poly_from_vector(field: FieldSpec, n: int, basis: Iterable[Exponent], vec) -> MultiPoly:
    return MultiPoly(field, n, {e: int(v) for e, v in zip(basis, vec) if v})
