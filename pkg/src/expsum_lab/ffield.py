"""Finite fields F_p, F_q = F_{p^a} and their extensions F_{q^i}.

Elements are encoded as Python ints ``v = c_0 + c_1 p + ... + c_{a-1} p^{a-1}``
where ``(c_0, ..., c_{a-1})`` are the coordinates in the power basis of the
defining modulus.  Prime-field elements therefore encode as themselves, and
the embedding F_p -> F_{p^a} is the identity on encodings.

Every extension F_{q^i} is built directly over F_p with its own modulus of
degree ``a*i``; the embedding F_q -> F_{q^i} is constructed explicitly by
locating a root of the base modulus (see :func:`embedding`).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded

TABLE_LIMIT = 1 << 16
"""Fields up to this size get log/antilog tables for scalar multiplication."""

VECTOR_TABLE_LIMIT = 1 << 20
DEFAULT_BUDGET = 1 << 36


# ---------------------------------------------------------------------------
# polynomials over F_p as coefficient lists, low degree first


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pmod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        if c:
            for j, y in enumerate(m):
                a[shift + j] = (a[shift + j] - c * y) % p
        a.pop()
        _trim(a)
    return _trim(a)


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base: Sequence[int], e: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic polynomial over F_p.

    ``modulus`` has degree ``a`` and is irreducible iff it shares no factor
    with ``x^(p^k) - x`` for every ``k <= a/2``.
    """
    m = _trim(list(modulus))
    a = len(m) - 1
    if a < 1:
        return False
    x = [0, 1]
    power = x
    for _ in range(1, a // 2 + 1):
        power = _ppowmod(power, p, m, p)
        diff = list(power) + [0] * max(0, 2 - len(power))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(m, _trim(diff), p)) > 1:
            return False
    return True


def first_irreducible(p: int, a: int) -> tuple[int, ...]:
    """First monic irreducible of degree ``a`` over F_p.

    Candidates are ordered by the integer ``c_0 + c_1 p + ... + c_{a-1} p^{a-1}``
    of their non-leading coefficients, i.e. lexicographically from the
    coefficient of ``x^(a-1)`` down.  Returned low degree first, leading 1
    included.
    """
    for v in range(p**a):
        coeffs = [(v // p**j) % p for j in range(a)] + [1]
        if coeffs[0] == 0 and a > 1:
            continue
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def _is_prime(p: int) -> bool:
    from sympy import isprime

    return bool(isprime(p))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """The field F_{p^a} with a fixed monic irreducible modulus.

    ``modulus`` lists coefficients low degree first, leading 1 included; it is
    empty for prime fields.  When omitted for ``a > 1`` the first irreducible
    in lexicographic order is chosen, so reports are reproducible.
    """

    p: int
    a: int = 1
    modulus: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or self.p < 2 or not _is_prime(self.p):
            raise ValueError(f"p = {self.p!r} is not prime")
        if self.a < 1:
            raise ValueError("a must be a positive integer")
        mod = tuple(int(c) for c in self.modulus)
        if self.a == 1:
            if mod not in ((),):
                if len(mod) != 2 or mod[1] != 1:
                    raise ValueError("prime-field modulus must be empty")
                mod = ()
        elif not mod:
            mod = first_irreducible(self.p, self.a)
        else:
            if len(mod) != self.a + 1 or mod[-1] != 1:
                raise ValueError("modulus must be monic of degree a (low degree first)")
            if any(not 0 <= c < self.p for c in mod):
                raise ValueError("modulus coefficients must lie in [0, p)")
            if not is_irreducible(mod, self.p):
                raise ValueError(f"modulus {mod} is reducible over F_{self.p}")
        object.__setattr__(self, "modulus", mod)

    # -- basic data ---------------------------------------------------------

    @property
    def q(self) -> int:
        return self.p**self.a

    @property
    def is_prime_field(self) -> bool:
        return self.a == 1

    def __repr__(self) -> str:
        if self.a == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^{self.a}"

    def to_json(self) -> dict:
        return {"p": self.p, "a": self.a, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        return cls(int(data["p"]), int(data.get("a", 1)), tuple(data.get("modulus") or ()))

    def coords(self, x: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.a):
            x, r = divmod(x, p)
            out.append(r)
        return tuple(out)

    def from_coords(self, cs: Iterable[int]) -> int:
        v = 0
        for j, c in enumerate(cs):
            v += (int(c) % self.p) * self.p**j
        return v

    def from_int(self, k: int) -> int:
        """Image of the integer ``k`` in the prime subfield."""
        return k % self.p

    def element(self, v: int) -> "FieldElement":
        return FieldElement(self, v)

    def elements(self) -> range:
        return range(self.q)

    # -- scalar arithmetic --------------------------------------------------

    def add(self, x: int, y: int) -> int:
        p = self.p
        if self.a == 1:
            return (x + y) % p
        if p == 2:
            return x ^ y
        v, scale = 0, 1
        while x or y:
            x, r = divmod(x, p)
            y, s = divmod(y, p)
            v += ((r + s) % p) * scale
            scale *= p
        return v

    def neg(self, x: int) -> int:
        p = self.p
        if self.a == 1:
            return (-x) % p
        if p == 2:
            return x
        v, scale = 0, 1
        while x:
            x, r = divmod(x, p)
            v += ((-r) % p) * scale
            scale *= p
        return v

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def _mul_generic(self, x: int, y: int) -> int:
        prod = _pmul(self.coords(x), self.coords(y), self.p)
        return self.from_coords(_pmod(prod, self.modulus, self.p))

    def mul(self, x: int, y: int) -> int:
        if self.a == 1:
            return (x * y) % self.p
        if x == 0 or y == 0:
            return 0
        if self.q <= TABLE_LIMIT:
            exp, log = self._tables
            return int(exp[(log[x] + log[y]) % (self.q - 1)])
        return self._mul_generic(x, y)

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            x, e = self.inv(x), -e
        if self.a == 1:
            return pow(x, e, self.p)
        if x == 0:
            return 1 if e == 0 else 0
        if self.q <= TABLE_LIMIT:
            exp, log = self._tables
            return int(exp[(int(log[x]) * e) % (self.q - 1)])
        result = 1
        while e:
            if e & 1:
                result = self._mul_generic(result, x)
            x = self._mul_generic(x, x)
            e >>= 1
        return result

    def _pow_generic(self, x: int, e: int) -> int:
        if self.a == 1:
            return pow(x, e, self.p)
        result = 1
        while e:
            if e & 1:
                result = self._mul_generic(result, x)
            x = self._mul_generic(x, x)
            e >>= 1
        return result

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if self.a == 1:
            return pow(x, self.p - 2, self.p)
        if self.q <= TABLE_LIMIT:
            exp, log = self._tables
            return int(exp[(-int(log[x])) % (self.q - 1)])
        return self._pow_generic(x, self.q - 2)

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def frobenius(self, x: int, k: int = 1) -> int:
        """``x^(p^k)``."""
        return self.pow(x, self.p ** (k % self.a)) if self.a > 1 else x

    def trace(self, x: int) -> int:
        """Absolute trace to F_p as a residue in ``[0, p)``."""
        return sum(c * t for c, t in zip(self.coords(x), self.trace_vector)) % self.p

    def trace_form(self, beta: int) -> np.ndarray:
        """Vector ``w`` with ``Tr(beta * x) = coords(x) . w  (mod p)``."""
        return np.array(
            [self.trace(self.mul(beta, self.p**j)) for j in range(self.a)], dtype=np.int64
        )

    # -- cached structure ---------------------------------------------------

    @cached_property
    def trace_vector(self) -> tuple[int, ...]:
        out = []
        for j in range(self.a):
            x = self.p**j
            total = 0
            y = x
            for _ in range(self.a):
                total = self.add(total, y)
                y = self._pow_generic(y, self.p)
            # trace lies in F_p: its encoding is its constant coordinate
            assert total < self.p
            out.append(total)
        return tuple(out)

    @cached_property
    def primitive_element(self) -> int:
        from sympy import factorint

        q = self.q
        if q == 2:
            return 1
        primes = list(factorint(q - 1))
        for g in range(2, q):
            if all(self._pow_generic(g, (q - 1) // ell) != 1 for ell in primes):
                return g
        raise AssertionError("no primitive element")  # pragma: no cover

    @cached_property
    def exp_table(self) -> np.ndarray:
        """``exp_table[k] = g^k`` for ``k < q - 1`` with ``g`` the primitive element."""
        g = self.primitive_element
        N = self.q - 1
        B = math.isqrt(N) + 1
        baby = [1]
        for _ in range(B - 1):
            baby.append(self._mul_by(baby[-1], g))
        giant = self._mul_by(baby[-1], g)
        cur = self.digits(np.array(baby, dtype=np.int64))
        # column j = coords(giant * t^j)
        M = np.array(
            [self.coords(self._mul_by(giant, self.p**j)) for j in range(self.a)], dtype=np.int64
        ).T
        blocks = [cur]
        total = B
        while total < N:
            cur = (cur @ M.T) % self.p
            blocks.append(cur)
            total += B
        coords = np.vstack(blocks)[:N]
        return coords @ self._place_values

    @cached_property
    def log_table(self) -> np.ndarray:
        log = np.full(self.q, -1, dtype=np.int64)
        log[self.exp_table] = np.arange(self.q - 1, dtype=np.int64)
        return log

    def _mul_by(self, x: int, y: int) -> int:
        if self.a == 1:
            return (x * y) % self.p
        return self._mul_generic(x, y)

    @cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        return self.exp_table, self.log_table

    @cached_property
    def _place_values(self) -> np.ndarray:
        return np.array([self.p**j for j in range(self.a)], dtype=np.int64)

    # -- vectorized arithmetic on numpy int arrays --------------------------

    def digits(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        return (arr[..., None] // self._place_values) % self.p

    def vadd(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.a == 1:
            return (x + y) % self.p
        if self.p == 2:
            return np.bitwise_xor(x, y)
        return ((self.digits(x) + self.digits(y)) % self.p) @ self._place_values

    def vneg(self, x: np.ndarray) -> np.ndarray:
        if self.a == 1:
            return (-x) % self.p
        if self.p == 2:
            return x
        return ((-self.digits(x)) % self.p) @ self._place_values

    def vsub(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.a == 1:
            return (x - y) % self.p
        return self.vadd(x, self.vneg(y))

    def vmul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.a == 1:
            return (x * y) % self.p
        x, y = np.broadcast_arrays(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64))
        if self.q <= VECTOR_TABLE_LIMIT:
            exp, log = self._tables
            out = exp[(log[x] + log[y]) % (self.q - 1)]
            return np.where((x == 0) | (y == 0), 0, out)
        return np.vectorize(self._mul_generic, otypes=[np.int64])(x, y)

    def vtrace(self, x: np.ndarray) -> np.ndarray:
        return (self.digits(x) @ np.array(self.trace_vector, dtype=np.int64)) % self.p


@dataclass(frozen=True)
class FieldElement:
    """An element of ``owner`` with operator overloading; wraps the int encoding."""

    owner: FieldSpec
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.owner.q:
            raise ValueError(f"{self.value} is not an element of {self.owner!r}")

    @property
    def coords(self) -> tuple[int, ...]:
        return self.owner.coords(self.value)

    def _coerce(self, other: Any) -> int:
        if isinstance(other, FieldElement):
            if other.owner != self.owner:
                raise TypeError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return self.owner.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.owner, self.owner.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.owner, self.owner.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.owner, self.owner.sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElement(self.owner, self.owner.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return FieldElement(self.owner, self.owner.div(self.value, o))

    def __neg__(self):
        return FieldElement(self.owner, self.owner.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.owner, self.owner.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.owner, self.owner.inv(self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.owner!r}({list(self.coords)})"


# ---------------------------------------------------------------------------
# embeddings and extensions


@dataclass(frozen=True)
class Embedding:
    """Field homomorphism ``src -> dst`` sending the generator of ``src`` to ``root``."""

    src: FieldSpec
    dst: FieldSpec
    root: int

    def __call__(self, x: int) -> int:
        if self.src.a == 1:
            return x
        if self.src.q <= TABLE_LIMIT:
            return int(self.table[x])
        return self._apply(x)

    def _apply(self, x: int) -> int:
        dst = self.dst
        out, power = 0, 1
        for c in self.src.coords(x):
            if c:
                out = dst.add(out, dst.mul(c, power))
            power = dst.mul(power, self.root)
        return out

    @cached_property
    def table(self) -> np.ndarray:
        return np.array([self._apply(x) for x in range(self.src.q)], dtype=np.int64)

    def is_identity(self) -> bool:
        return self.src == self.dst


def _eval_fp_poly(field: FieldSpec, coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = field.add(field.mul(acc, x), c)
    return acc


def embedding(src: FieldSpec, dst: FieldSpec) -> Embedding:
    """The deterministic embedding of ``src`` into ``dst``.

    The image of the generator is the smallest-encoded root of ``src.modulus``
    in ``dst``; roots are searched inside the unique subfield of order
    ``src.q``.
    """
    if src.p != dst.p or dst.a % src.a:
        raise ValueError(f"{src!r} does not embed in {dst!r}")
    if src.a == 1:
        return Embedding(src, dst, 0)
    if src == dst:
        return Embedding(src, dst, src.p)
    g = dst.primitive_element
    beta = dst._pow_generic(g, (dst.q - 1) // (src.q - 1))
    best = None
    x = 1
    for _ in range(src.q - 1):
        if _eval_fp_poly(dst, src.modulus, x) == 0 and (best is None or x < best):
            best = x
        x = dst._mul_generic(x, beta)
    assert best is not None
    return Embedding(src, dst, best)


_EXTENSIONS: dict[tuple[FieldSpec, int], tuple[FieldSpec, Embedding]] = {}


def make_extension(base: FieldSpec, i: int) -> tuple[FieldSpec, Embedding]:
    """F_{q^i} together with the embedding of ``base`` into it."""
    if i < 1:
        raise ValueError("extension degree must be >= 1")
    key = (base, i)
    if key not in _EXTENSIONS:
        ext = base if i == 1 else FieldSpec(base.p, base.a * i)
        _EXTENSIONS[key] = (ext, embedding(base, ext))
    return _EXTENSIONS[key]


def abs_trace(x: FieldElement) -> int:
    return x.owner.trace(x.value)


# ---------------------------------------------------------------------------
# enumeration


def shard_ranges(size: int, shards: int) -> list[tuple[int, int]]:
    """Split ``range(size)`` into ``shards`` contiguous pieces (some may be empty)."""
    shards = max(1, shards)
    bounds = [size * k // shards for k in range(shards + 1)]
    return list(zip(bounds[:-1], bounds[1:]))


def check_budget(count: int, budget: int = DEFAULT_BUDGET) -> None:
    if count > budget:
        raise BudgetExceeded(f"enumeration too large: {count} points exceeds budget {budget}")


def enumerate_points(
    field: FieldSpec,
    n: int,
    fold: Callable[[Any, tuple[int, ...]], Any],
    init: Any,
    merge: Callable[[Any, Any], Any] | None = None,
    *,
    shards: int = 1,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> Any:
    """Fold ``fold`` over every point of ``field^n``.

    The index space is partitioned on the first coordinate into ``shards``
    pieces, each folded from ``init``; partial results are combined with the
    associative, commutative ``merge`` (default ``+``).
    """
    if n < 1:
        raise ValueError("n must be positive")
    q = field.q
    check_budget(q**n, budget)
    merge = merge or (lambda x, y: x + y)

    def run(bounds: tuple[int, int]) -> Any:
        lo, hi = bounds
        acc = init
        for x0 in range(lo, hi):
            for rest in _product(q, n - 1):
                acc = fold(acc, (x0,) + rest)
        return acc

    pieces = shard_ranges(q, shards)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, pieces))
    else:
        results = [run(b) for b in pieces]
    return reduce(merge, results)


def _product(q: int, k: int):
    if k == 0:
        yield ()
        return
    for head in range(q):
        for tail in _product(q, k - 1):
            yield (head,) + tail
