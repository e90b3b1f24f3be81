"""Job description, stage orchestration and the master report."""
from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field as dc_field
from typing import Any, Mapping

from . import koszul, spectral
from .charsum import SumCache, sum_sequence
from .errors import ExpsumError, ParseError, ResourceError, SeriesTooShort
from .ffield import DEFAULT_BUDGET, FieldSpec
from .hypotheses import HypothesisReport, evaluate, purity_asserted
from .lfunc import DEFAULT_GUARD, build_L, certify_degree, purity_deviation, root_report
from .mpoly import HomogDecomp, MultiPoly, decompose, parse
from .singular import local_sum_68

log = logging.getLogger(__name__)

REPORT_VERSION = 1
PURITY_TOL = 1e-9
STAGES = ("hypotheses", "koszul", "spectral", "lfunction")


@dataclass
class Job:
    field: FieldSpec
    n: int
    f: str | list
    c: int = 1
    r_max: int | None = None
    guard: int = DEFAULT_GUARD
    i_max: int | None = None
    budget: int = DEFAULT_BUDGET
    precision: int = 30
    total_degrees: dict[str, Any] = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.guard < 1:
            raise ValueError("guard must be at least 1")
        if not 0 < self.c < self.field.q:
            raise ValueError("twist c must be a nonzero field element")

    def polynomial(self) -> MultiPoly:
        if isinstance(self.f, str):
            return parse(self.f, self.n, self.field)
        terms = {tuple(e): self.field.from_coords(cs) for e, cs in self.f}
        return MultiPoly(self.field, self.n, terms)

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Job":
        opts = dict(data.get("options", {}))
        flat = {k: v for k, v in data.items() if k not in ("field", "n", "f", "c", "options")}
        opts.update(flat)
        field = FieldSpec.from_json(data["field"])
        c = data.get("c", 1)
        if isinstance(c, list):
            c = field.from_coords(c)
        return cls(
            field=field,
            n=int(data["n"]),
            f=data["f"],
            c=int(c),
            r_max=opts.get("r_max"),
            guard=int(opts.get("guard", DEFAULT_GUARD)),
            i_max=opts.get("i_max"),
            budget=int(opts.get("budget", DEFAULT_BUDGET)),
            precision=int(opts.get("precision", 30)),
            total_degrees=dict(opts.get("total_degrees", {})),
        )

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Job":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "n": self.n,
            "f": self.f,
            "c": list(self.field.coords(self.c)),
            "options": {
                "r_max": self.r_max,
                "guard": self.guard,
                "i_max": self.i_max,
                "budget": self.budget,
                "precision": self.precision,
                "total_degrees": self.total_degrees,
            },
        }


@dataclass
class MasterReport:
    data: dict
    exit_code: int
    timing: dict | None = None

    def to_json(self, timing: bool = False) -> dict:
        out = dict(self.data)
        if timing and self.timing is not None:
            out["timing"] = self.timing
        return out

    def dumps(self, timing: bool = False) -> str:
        return json.dumps(self.to_json(timing), indent=2, sort_keys=True, ensure_ascii=False)

    @property
    def banner(self) -> str | None:
        return self.data.get("banner")


def _largest_guard(q: int, n: int, M: int, guard: int, budget: int) -> int:
    while guard > 1 and q ** ((M + guard) * n) > budget:
        guard -= 1
    return guard


class _Run:
    def __init__(self, job: Job, stages, cache: SumCache | None, shards: int, backend: str | None):
        self.job, self.stages, self.cache = job, set(stages), cache
        self.shards, self.backend = shards, backend
        self.errors: list[dict] = []
        self.checks: dict[str, bool] = {}
        self.caveats: list[str] = []
        self.timing: dict[str, float] = {}
        self.out: dict[str, Any] = {"report_version": REPORT_VERSION, "job": job.to_json(),
                                    "stages": [s for s in STAGES if s in self.stages]}

    def error(self, stage: str, exc: BaseException) -> None:
        log.info("stage %s: %s", stage, exc)
        self.errors.append({"stage": stage, "type": type(exc).__name__, "message": str(exc)})

    def timed(self, name: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.timing[name] = round(time.perf_counter() - t0, 6)

    # -- stages -------------------------------------------------------------

    def hypotheses(self, decomp: HomogDecomp) -> HypothesisReport:
        rep = self.timed("hypotheses", evaluate, decomp, total_degrees=self.job.total_degrees,
                         budget=self.job.budget)
        self.out["hypotheses"] = rep.to_json()
        pts = rep.points
        sing = {"scheme_degree": rep.scheme_degree, "points": [sp.to_json() for sp in pts]}
        if rep.verdict != "fail" or all(sp.mu is not None for sp in pts):
            try:
                sing["sum_mu"] = sum(sp.d * sp.mu for sp in pts)
                sing["local_sum_68"] = local_sum_68(pts)
                if rep.passed:
                    self.checks["local_sum_equals_sum_mu"] = sing["local_sum_68"] == sing["sum_mu"]
            except (TypeError, ValueError) as exc:
                self.error("singular", exc)
        self.out["singular"] = sing
        return rep

    def koszul(self, decomp: HomogDecomp, rep: HypothesisReport | None) -> int:
        n, delta = decomp.n, decomp.delta
        r_max = self.job.r_max or koszul.default_r_max(n, delta, decomp.delta_prime)
        section: dict[str, Any] = {}
        coker = None
        try:
            coker = self.timed("cokernel", koszul.mf_from_cokernel, decomp, r_max)
            r_max = coker.r_max
            section["cokernel"] = coker.to_json()
            self.out.setdefault("mf", {})["cokernel"] = coker.total
        except ResourceError as exc:
            self.error("koszul", exc)
            r_max += 3 * delta
        section["r_max"] = r_max
        cx = koszul.Complex(decomp.top, delta)
        cohom = [koszul.cohomology_dims(decomp.top, m, r_max, delta, strict=False, cx=cx) for m in range(n + 1)]
        section["cohomology"] = [H.to_json() for H in cohom]
        p_n = koszul.PoincareSeries.from_cohomology(cohom[n])
        p_n1 = koszul.PoincareSeries.from_cohomology(cohom[n - 1]) if n >= 1 else None
        section["poincare"] = {"p_n": p_n.to_json(), "p_n_minus_1": p_n1.to_json() if p_n1 else None}
        passing = rep is not None and rep.passed
        if p_n1 is not None and r_max >= n * (delta - 2) + 1:
            ok = koszul.series_identity_check(p_n, p_n1, delta, n)
            section["series_identity"] = ok
            if passing:
                self.checks["series_identity"] = ok
        q1 = [p_n.q_at_one(), p_n1.q_at_one() if p_n1 else None]
        section["q_at_one"] = q1
        if passing:
            self.checks["low_cohomology_vanishes"] = all(
                H.stable_value == 0 and not any(H.dims.values()) for H in cohom[: max(n - 1, 0)])
            if rep.sum_mu is not None:
                self.checks["q_at_one_equals_sum_mu"] = q1[0] == q1[1] == rep.sum_mu
            if coker is not None:
                self.checks["cokernel_injective"] = coker.injective
        self.out["koszul"] = section
        return r_max

    def spectral(self, decomp: HomogDecomp, rep: HypothesisReport | None, r_max: int) -> None:
        e = decomp.e if decomp.e is not None else 1
        pages = {1: self.timed("spectral_e1", spectral.e_page, decomp, 1, r_max)}
        if e != 1:
            pages[e] = self.timed("spectral_ee", spectral.e_page, decomp, e, r_max)
        match = spectral.e1_vs_cohomology(decomp, r_max, pages[1])
        self.out["spectral"] = {
            "e": e,
            "pages": [pages[t].to_json() for t in sorted(pages)],
            "e1_matches_cohomology": match,
            "diagonal_total": pages[e].diagonal_total,
        }
        self.checks["e1_matches_cohomology"] = match
        if rep is not None and rep.passed:
            t = 1 if rep.theorem == "regular-sequence" else e
            self.checks["page_vanishes_off_diagonal"] = pages[t].vanish_off_diagonal
            self.out.setdefault("mf", {})["spectral"] = pages[t].diagonal_total

    def lfunction(self, decomp: HomogDecomp, rep: HypothesisReport | None) -> None:
        job = self.job
        mf = self.out.get("mf", {})
        M = rep.mf_formula if rep is not None and rep.mf_formula is not None else mf.get("cokernel")
        n, q = decomp.n, job.field.q
        guard = job.guard
        if job.i_max is not None:
            i_max = int(job.i_max)
        elif M is None:
            self.caveats.append("no predicted degree; L-function not computed (pass i_max to explore)")
            return
        else:
            guard = _largest_guard(q, n, M, guard, job.budget)
            if guard != job.guard:
                self.caveats.append(f"guard reduced from {job.guard} to {guard} to fit the point budget")
            i_max = M + guard
        sums = self.timed("sums", sum_sequence, decomp.f, job.field, i_max, job.c, cache=self.cache,
                          shards=self.shards, budget=job.budget, backend=self.backend)
        sign = 1 if (n + 1) % 2 == 0 else -1
        series = self.timed("exp", build_L, sums, sign)
        section: dict[str, Any] = {
            "sums": [{"i": s.i, "histogram": list(s.histogram)} for s in sums],
        }
        self.checks["coefficients_integral"] = all(c.is_integral() for c in series.coeffs)
        if M is None:
            section["series"] = [c.to_json() for c in series.coeffs]
            section["certified_degree"] = None
            self.out["lfunction"] = section
            return
        try:
            lrep = certify_degree(series, M, i_max - M, sign=sign, q=q, n=n)
        except SeriesTooShort as exc:
            self.error("lfunction", exc)
            section["series"] = [c.to_json() for c in series.coeffs]
            self.out["lfunction"] = section
            return
        asserted = rep is not None and purity_asserted(rep)
        if lrep.certified:
            self.out.setdefault("mf", {})["l_degree"] = lrep.certified_degree
            lrep = self.timed("roots", root_report, lrep, job.precision, assert_purity=asserted)
            if asserted and lrep.roots:
                self.checks["purity"] = purity_deviation(lrep) <= PURITY_TOL
        else:
            self.out.setdefault("mf", {})["l_degree"] = None
        section.update(lrep.to_json())
        self.out["lfunction"] = section


def run(job: Job, stages=STAGES, *, cache: SumCache | None = None, shards: int = 1,
        backend: str | None = None) -> MasterReport:
    """Run the requested stages; stage errors are collected into the report."""
    R = _Run(job, stages, cache, shards, backend)
    t0 = time.perf_counter()
    hard = False
    decomp = None
    try:
        decomp = decompose(job.polynomial())
    except (ParseError, ValueError) as exc:
        R.error("parse", exc)
        hard = True
    rep = None
    r_max = job.r_max
    if decomp is not None:
        R.out["decomposition"] = {
            "delta": decomp.delta, "delta_prime": decomp.delta_prime, "e": decomp.e,
            "components": {str(d): g.to_json() for d, g in sorted(decomp.components.items())},
        }
        needs_hyp = R.stages & {"hypotheses", "lfunction", "spectral", "koszul"}
        if needs_hyp:
            try:
                rep = R.hypotheses(decomp)
            except ExpsumError as exc:
                R.error("hypotheses", exc)
        if rep is not None:
            R.out.setdefault("mf", {})["formula"] = rep.mf_formula
        for name in ("koszul", "spectral", "lfunction"):
            if name not in R.stages:
                continue
            try:
                if name == "koszul":
                    r_max = R.koszul(decomp, rep)
                elif name == "spectral":
                    if r_max is None:
                        r_max = koszul.default_r_max(decomp.n, decomp.delta, decomp.delta_prime)
                    R.spectral(decomp, rep, r_max)
                else:
                    R.lfunction(decomp, rep)
            except (ExpsumError, OSError) as exc:
                R.error(name, exc)
    R.timing["total"] = round(time.perf_counter() - t0, 6)
    if cache is not None:
        R.timing["cache_hits"] = cache.hits
        R.timing["cache_misses"] = cache.misses
    return _assemble(R, rep, hard)


def _assemble(R: _Run, rep: HypothesisReport | None, hard: bool) -> MasterReport:
    out = R.out
    mf = out.setdefault("mf", {})
    passing = rep is not None and rep.passed
    values = [mf.get(k) for k in ("formula", "cokernel", "l_degree") if k in mf]
    values += [mf["spectral"]] if "spectral" in mf else []
    present = [v for v in values if v is not None]
    consistent = len(set(present)) <= 1
    if passing:
        expected = [k for k, s in (("cokernel", "koszul"), ("l_degree", "lfunction"), ("spectral", "spectral"))
                    if s in R.stages]
        consistent = consistent and all(mf.get(k) is not None for k in expected) \
            and not any(err["stage"] in R.stages for err in R.errors)
    mf["consistent"] = consistent
    out["checks"] = dict(sorted(R.checks.items()))
    out["errors"] = R.errors
    out["caveats"] = R.caveats + (list(rep.caveats) if rep is not None else [])
    mismatch = (passing and not consistent) or not all(R.checks.values())
    resource = hard or any(err["type"] in _RESOURCE_TYPES for err in R.errors)
    failed = rep is not None and not rep.passed
    out["banner"] = "MISMATCH" if mismatch else None
    code = 3 if resource else 2 if mismatch else 1 if failed else 0
    out["exit_code"] = code
    return MasterReport(out, code, dict(R.timing))


_RESOURCE_TYPES = {"BudgetExceeded", "NotStabilized", "CokernelTailError", "ResourceError",
                   "ParseError", "ValueError", "OSError", "FileNotFoundError", "SeriesTooShort"}
