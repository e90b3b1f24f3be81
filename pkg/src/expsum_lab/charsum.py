"""Brute-force exponential sums ``S_i = sum_{x in F_{q^i}^n} psi(Tr f(x))``.

The additive character is ``psi(y) = zeta_p^{Tr_{F_q/F_p}(c y)}``, so each
point contributes ``zeta_p`` to the power of one residue; sums are kept as a
length-``p`` histogram of those residues and converted to Z[zeta_p] at the end.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _core
from .cyclo import CycloNum
from .errors import BudgetExceeded
from .ffield import DEFAULT_BUDGET, FieldSpec, check_budget, enumerate_points, make_extension, shard_ranges
from .mpoly import MultiPoly

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SumValue:
    i: int
    histogram: tuple[int, ...]

    @property
    def p(self) -> int:
        return len(self.histogram)

    @property
    def value(self) -> CycloNum:
        return CycloNum.from_histogram(self.p, self.histogram)

    @property
    def total(self) -> int:
        return sum(self.histogram)


def _kernel_inputs(f: MultiPoly, field: FieldSpec, i: int, c: int):
    ext, emb = make_extension(field, i)
    F = field
    rows, exps = [], []
    u0 = 0
    coords = None
    for e, coef in f.items():
        beta = emb(F.mul(c, coef))
        if not any(e):
            u0 = ext.trace(beta)
            continue
        if coords is None:
            coords = ext.digits(ext.exp_table)
        rows.append((coords @ ext.trace_form(beta)) % ext.p)
        exps.append(e)
    if rows:
        tables = np.ascontiguousarray(np.vstack(rows), dtype=np.int32)
        exps_arr = np.ascontiguousarray(np.array(exps, dtype=np.int64))
    else:
        tables = np.zeros((0, ext.q - 1), dtype=np.int32)
        exps_arr = np.zeros((0, f.n), dtype=np.int64)
    return ext, tables, exps_arr, u0


def char_sum(
    f: MultiPoly,
    field: FieldSpec,
    i: int,
    c: int = 1,
    *,
    shards: int = 1,
    workers: int | None = None,
    budget: int = DEFAULT_BUDGET,
    backend: str | None = None,
) -> SumValue:
    """``S(A^n(F_{q^i}), f)`` with twist ``c`` as a residue histogram.

    ``f`` and ``c`` live in ``field``; ``shards`` splits the first coordinate
    and the per-shard histograms are added.
    """
    if f.field != field:
        raise ValueError("polynomial is not over the given field")
    if c == 0:
        raise ValueError("twist must be nonzero")
    n = f.n
    Q = field.q**i
    check_budget(Q**n, budget)
    ext, tables, exps, u0 = _kernel_inputs(f, field, i, c)
    kernel = _core.get_kernel(backend)
    pieces = shard_ranges(Q, shards)

    def run(bounds):
        return kernel(tables, exps, int(u0), ext.p, bounds[0], bounds[1])

    workers = workers or min(len(pieces), os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, pieces))
    else:
        parts = [run(b) for b in pieces]
    hist = np.sum(parts, axis=0)
    out = SumValue(i, tuple(int(h) for h in hist))
    assert out.total == Q**n
    return out


def char_sum_naive(f: MultiPoly, field: FieldSpec, i: int, c: int = 1, *,
                   shards: int = 1, budget: int = 1 << 20) -> SumValue:
    """Independent oracle: evaluate ``f`` at every point with field arithmetic."""
    ext, emb = make_extension(field, i)
    beta = emb(c)
    p = field.p

    def fold(acc, x):
        u = ext.trace(ext.mul(beta, f.evaluate(x, emb)))
        return acc[:u] + (acc[u] + 1,) + acc[u + 1 :]

    def merge(a, b):
        return tuple(x + y for x, y in zip(a, b))

    hist = enumerate_points(ext, f.n, fold, (0,) * p, merge, shards=shards, budget=budget)
    return SumValue(i, hist)


# ---------------------------------------------------------------------------
# on-disk cache


def cache_key(f: MultiPoly, field: FieldSpec, c: int, i: int) -> str:
    payload = json.dumps(
        {"field": field.to_json(), "f": f.canonical(), "c": list(field.coords(c)), "i": i},
        sort_keys=True, separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()


class SumCache:
    """Content-addressed store, one JSON record per sum."""

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.hits = 0
        self.misses = 0

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> SumValue | None:
        path = self._path(key)
        try:
            rec = json.loads(path.read_text())
        except (FileNotFoundError, json.JSONDecodeError):
            self.misses += 1
            return None
        if rec.get("key") != key:
            self.misses += 1
            return None
        self.hits += 1
        return SumValue(int(rec["i"]), tuple(int(h) for h in rec["histogram"]))

    def put(self, key: str, value: SumValue) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self._path(key)
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_text(json.dumps({"key": key, "i": value.i, "histogram": list(value.histogram)}))
        os.replace(tmp, path)


def sum_sequence(
    f: MultiPoly,
    field: FieldSpec,
    i_max: int,
    c: int = 1,
    *,
    cache: SumCache | None = None,
    shards: int = 1,
    budget: int = DEFAULT_BUDGET,
    backend: str | None = None,
) -> list[SumValue]:
    """``S_1, ..., S_{i_max}``, each computed (or loaded) independently."""
    out = []
    for i in range(1, i_max + 1):
        key = cache_key(f, field, c, i) if cache is not None else None
        value = cache.get(key) if cache is not None else None
        if value is None:
            try:
                value = char_sum(f, field, i, c, shards=shards, budget=budget, backend=backend)
            except BudgetExceeded as exc:
                raise BudgetExceeded(f"S_{i}: {exc}") from exc
            if cache is not None:
                cache.put(key, value)
        log.debug("S_%d histogram %s", i, value.histogram)
        out.append(value)
    return out
