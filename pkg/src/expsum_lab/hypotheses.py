"""Which vanishing theorem applies to ``f``, and the degree it predicts.

Three routes are recognised:

* ``"regular-sequence"``: the partials of ``f^(delta)`` form a regular
  sequence, so ``M_f = (delta - 1)^n``;
* ``"1.10"``: ``p`` does not divide ``delta``; the critical points of
  ``f^(delta)`` must be weighted homogeneous, off ``f^(delta') = 0``, with
  all total degrees prime to ``p``;
* ``"1.11"``: ``p`` divides ``delta``; the critical locus must be finite and
  nonempty and avoid ``f^(delta') = 0``.

Outside these the verdict is ``"none"``.  Failures are verdicts, not errors.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Sequence

from .cyclo import format_rational
from .errors import HypothesisFailure, WrongBranch
from .mpoly import HomogDecomp
from .singular import (
    SingularPoint,
    analyze_points,
    find_common_zeros,
    hilbert_function,
    milnor_total,
)
from .koszul import expected_difference

log = logging.getLogger(__name__)

PASS, CONDITIONAL, FAIL = "pass", "conditional", "fail"

REASON_ON_FPRIME = "singularity on f^(δ′)=0"
REASON_COMMON_ZERO = "common zero on f^(δ′)=0"
REASON_P_DELTA = "(p,δ) ≠ 1"
REASON_P_DELTA_PRIME = "(p,δ′) ≠ 1"
CAVEAT_UNDECIDED = "conditionally passed (local Jacobian membership verified; weighted homogeneity not decided)"
CAVEAT_INEQ = "degree inequality unmet; the degree-M_f statement is not guaranteed"


def degree_inequality(p: int, e: int, delta: int) -> dict:
    """``(1 + p/(p-1)^2)(e - 1) < delta`` with the exact left side."""
    lhs = (1 + Fraction(p, (p - 1) ** 2)) * (e - 1)
    return {"lhs": lhs, "rhs": delta, "holds": lhs < delta}


def b_interval(p: int, e: int, delta: int) -> tuple[Fraction, Fraction]:
    """Open interval of admissible Dwork parameters ``b`` (reported, never used)."""
    lo = Fraction(delta, (p - 1) * (delta - e + 1))
    hi = Fraction(p * delta, (p - 1) * delta + e - 1)
    return lo, hi


def mf_from_formula(decomp: HomogDecomp, points: Sequence[SingularPoint]) -> tuple[int, int]:
    """``((delta-1)^n - (delta - delta') * sum mu, sum mu)``."""
    total_mu = milnor_total(points)
    base = (decomp.delta - 1) ** decomp.n
    if not points:
        return base, 0
    if decomp.delta_prime is None:
        raise ValueError("formula needs a second-highest component")
    return base - (decomp.delta - decomp.delta_prime) * total_mu, total_mu


def check_regular_sequence(decomp: HomogDecomp) -> bool:
    """Hilbert function of ``F[x]/(partials)`` equals that of a complete intersection of degree ``delta-1`` forms."""
    n, delta = decomp.n, decomp.delta
    gens = decomp.top.gradient()
    if any(g.is_zero() for g in gens):
        return False
    bound = n * (delta - 2) + 1
    want = expected_difference(n, delta, bound)
    return all(hilbert_function(gens, d) == want[d] for d in range(bound + 1))


@dataclass
class HypothesisReport:
    theorem: str
    verdict: str
    e: int
    delta: int
    delta_prime: int | None
    p: int
    reasons: list[str] = dc_field(default_factory=list)
    caveats: list[str] = dc_field(default_factory=list)
    coprimality: dict[str, bool] = dc_field(default_factory=dict)
    points: list[SingularPoint] = dc_field(default_factory=list)
    scheme_degree: int | None = None
    mf_formula: int | None = None
    sum_mu: int | None = None

    @property
    def passed(self) -> bool:
        return self.verdict in (PASS, CONDITIONAL)

    @property
    def ineq_15(self) -> dict:
        return degree_inequality(self.p, self.e, self.delta)

    @property
    def b_interval(self) -> tuple[Fraction, Fraction]:
        return b_interval(self.p, self.e, self.delta)

    @property
    def max_residue_degree(self) -> int:
        return max((sp.d for sp in self.points), default=1)

    def to_json(self) -> dict:
        ineq = self.ineq_15
        lo, hi = self.b_interval
        return {
            "theorem": self.theorem,
            "verdict": self.verdict,
            "reasons": list(self.reasons),
            "e": self.e,
            "delta": self.delta,
            "delta_prime": self.delta_prime,
            "ineq_15": {"lhs": format_rational(ineq["lhs"]), "rhs": ineq["rhs"], "holds": ineq["holds"]},
            "b_interval": [format_rational(lo), format_rational(hi)],
            "coprimality": dict(self.coprimality),
            "scheme_degree": self.scheme_degree,
            "max_residue_degree": self.max_residue_degree,
            "mf_formula": self.mf_formula,
            "sum_mu": self.sum_mu,
            "caveats": list(self.caveats),
        }


def _report(decomp: HomogDecomp, theorem: str, points=(), scheme_degree=None) -> HypothesisReport:
    e = decomp.e if decomp.e is not None else 1
    return HypothesisReport(theorem, PASS, e, decomp.delta, decomp.delta_prime, decomp.field.p,
                            points=list(points), scheme_degree=scheme_degree)


def _finish(rep: HypothesisReport, decomp: HomogDecomp) -> HypothesisReport:
    if rep.reasons:
        rep.verdict = FAIL
    if rep.verdict != FAIL:
        try:
            rep.mf_formula, rep.sum_mu = mf_from_formula(decomp, rep.points)
        except ValueError as exc:
            rep.reasons.append(str(exc))
            rep.verdict = FAIL
    if not rep.ineq_15["holds"]:
        rep.caveats.append(CAVEAT_INEQ)
    return rep


def check_1_10(decomp: HomogDecomp, points: Sequence[SingularPoint], scheme_degree: int | None = None) -> HypothesisReport:
    """Side conditions when ``p`` does not divide ``delta``."""
    p = decomp.field.p
    rep = _report(decomp, "1.10", points, scheme_degree)
    if decomp.delta_prime is None:
        rep.reasons.append("no second-highest component")
        return _finish(rep, decomp)
    rep.coprimality["(p,δ)"] = decomp.delta % p != 0
    rep.coprimality["(p,δ′)"] = decomp.delta_prime % p != 0
    if not rep.coprimality["(p,δ)"]:
        rep.reasons.append(REASON_P_DELTA)
    if not rep.coprimality["(p,δ′)"]:
        rep.reasons.append(REASON_P_DELTA_PRIME)
    undecided = False
    for sp in points:
        if sp.mu is None:
            rep.reasons.append(f"no stabilization at {sp.label}")
            continue
        if not sp.jacobian_membership:
            rep.reasons.append(f"Jacobian membership fails at {sp.label}")
        if sp.on_fprime:
            rep.reasons.append(REASON_ON_FPRIME)
        if sp.total_degree_candidates:
            ok = any(x % p for x in sp.total_degree_candidates)
            rep.coprimality[f"(p,δ_{sp.label})"] = ok
            if not ok:
                rep.reasons.append(f"(p,δ_i) ≠ 1 at {sp.label}")
        else:
            undecided = True
    if undecided and not rep.reasons:
        rep.verdict = CONDITIONAL
        rep.caveats.append(CAVEAT_UNDECIDED)
    return _finish(rep, decomp)


def check_1_11(decomp: HomogDecomp, points: Sequence[SingularPoint], scheme_degree: int | None = None) -> HypothesisReport:
    """Side conditions when ``p`` divides ``delta``."""
    p = decomp.field.p
    if decomp.delta % p:
        raise WrongBranch("wrong theorem branch: p does not divide δ")
    rep = _report(decomp, "1.11", points, scheme_degree)
    if decomp.delta_prime is None:
        rep.reasons.append("no second-highest component")
        return _finish(rep, decomp)
    rep.coprimality["(p,δ′)"] = decomp.delta_prime % p != 0
    if not rep.coprimality["(p,δ′)"]:
        rep.reasons.append(REASON_P_DELTA_PRIME)
    if not points:
        rep.reasons.append("common zero set is empty")
    for sp in points:
        if sp.mu is None:
            rep.reasons.append(f"no stabilization at {sp.label}")
        if sp.on_fprime:
            rep.reasons.append(REASON_COMMON_ZERO)
    return _finish(rep, decomp)


def evaluate(decomp: HomogDecomp, *, total_degrees: Mapping[str, int | Sequence[int]] | None = None,
             budget: int | None = None) -> HypothesisReport:
    """Dispatch to exactly one branch and return its report."""
    if check_regular_sequence(decomp):
        rep = _report(decomp, "regular-sequence", (), 0)
        rep.e = 1
        rep.mf_formula, rep.sum_mu = (decomp.delta - 1) ** decomp.n, 0
        if not rep.ineq_15["holds"]:
            rep.caveats.append(CAVEAT_INEQ)
        return rep
    kwargs = {} if budget is None else {"budget": budget}
    try:
        points, hil = find_common_zeros(decomp.top.gradient(), **kwargs)
    except HypothesisFailure as exc:
        rep = _report(decomp, "none")
        rep.verdict = FAIL
        rep.reasons.append(str(exc))
        return rep
    analyze_points(decomp, points, total_degrees=total_degrees)
    if decomp.delta_prime is None:
        rep = _report(decomp, "none", points, hil.degree)
        rep.verdict = FAIL
        rep.reasons.append("homogeneous polynomial with singular leading form")
        return rep
    if decomp.delta % decomp.field.p == 0:
        return check_1_11(decomp, points, hil.degree)
    return check_1_10(decomp, points, hil.degree)


def purity_asserted(rep: HypothesisReport) -> bool:
    """Purity is claimed only where it is proven: regular sequences and ``delta' = delta - 1`` with p prime to delta."""
    if rep.theorem == "regular-sequence":
        return True
    return rep.theorem == "1.10" and rep.verdict == PASS and rep.delta_prime == rep.delta - 1
