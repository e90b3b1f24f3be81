"""L-function assembly, degree certification and reciprocal-root magnitudes."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import mpmath

from .charsum import SumValue
from .cyclo import CycloNum, CycloSeries, embed_complex, series_exp
from .errors import SeriesTooShort

DEFAULT_GUARD = 4


def build_L(sums: Sequence[SumValue | CycloNum], sign: int) -> CycloSeries:
    """``L^sign = exp(sign * sum_i S_i t^i / i)`` to order ``len(sums)``."""
    if not sums:
        raise ValueError("need at least one sum")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    vals = [s.value if isinstance(s, SumValue) else s for s in sums]
    p = vals[0].p
    log_terms = [CycloNum(p, [])] + [v * Fraction(sign, i) for i, v in enumerate(vals, start=1)]
    return series_exp(CycloSeries(p, log_terms))


@dataclass(frozen=True)
class RootInfo:
    abs: float
    residual: float


@dataclass(frozen=True)
class LFunctionReport:
    sign: int
    coefficients: tuple[CycloNum, ...]
    certified_degree: int | None
    predicted_degree: int
    guard: int
    purity_target: float
    purity_status: str = "reported-only"
    roots: tuple[RootInfo, ...] = ()
    reason: str = ""
    notes: tuple[str, ...] = field(default=())

    @property
    def certified(self) -> bool:
        return self.certified_degree is not None

    def to_json(self) -> dict:
        return {
            "sign": self.sign,
            "coefficients": [c.to_json() for c in self.coefficients],
            "certified_degree": self.certified_degree,
            "predicted_degree": self.predicted_degree,
            "guard": self.guard,
            "status": "consistent to guard depth" if self.certified else "not certified",
            "reason": self.reason,
            "roots": [{"abs": r.abs, "residual": r.residual} for r in self.roots],
            "purity": self.purity_status,
            "purity_target": self.purity_target,
        }


def certify_degree(series: CycloSeries, M_pred: int, guard: int = DEFAULT_GUARD, *,
                   sign: int = 1, q: int = 1, n: int = 0) -> LFunctionReport:
    """Check that ``series`` looks like a polynomial of degree ``M_pred``.

    Certified iff the coefficients at ``M_pred+1 .. M_pred+guard`` are exactly
    zero and the one at ``M_pred`` is not.  This is evidence to depth
    ``guard``, not a proof.
    """
    if guard < 1:
        raise ValueError("guard must be at least 1")
    if M_pred < 0:
        raise ValueError("predicted degree must be nonnegative")
    if series.order < M_pred + guard:
        raise SeriesTooShort(
            f"series too short: order {series.order} < {M_pred} + {guard}")
    if series[0] != 1:
        raise ValueError("L-series must start with 1")
    tail_zero = all(series[k].is_zero() for k in range(M_pred + 1, M_pred + guard + 1))
    lead = not series[M_pred].is_zero()
    if tail_zero and lead:
        reason = ""
    elif not lead:
        reason = f"coefficient {M_pred} is zero"
    else:
        bad = next(k for k in range(M_pred + 1, M_pred + guard + 1) if not series[k].is_zero())
        reason = f"coefficient {bad} is nonzero"
    return LFunctionReport(
        sign=sign,
        coefficients=series.coeffs,
        certified_degree=M_pred if tail_zero and lead else None,
        predicted_degree=M_pred,
        guard=guard,
        purity_target=float(mpmath.sqrt(mpmath.mpf(q) ** n)) if q > 1 else 0.0,
        reason=reason,
    )


def reciprocal_roots(coeffs: Sequence[CycloNum], precision: int = 30) -> list[tuple[mpmath.mpc, mpmath.mpf]]:
    """Roots ``alpha_j`` of ``sum_k c_k t^(M-k)``, i.e. ``P(t) = prod (1 - alpha_j t)``.

    Returns ``(alpha, |residual|)`` pairs; residuals are not raised on.
    """
    M = len(coeffs) - 1
    if M < 1:
        return []
    with mpmath.workdps(precision + 20):
        vals = [embed_complex(c, max(15, precision + 20)).center for c in coeffs]
        try:
            roots = mpmath.polyroots(vals, maxsteps=400, extraprec=4 * precision + 100)
        except mpmath.libmp.NoConvergence:
            roots, _ = mpmath.polyroots(vals, maxsteps=400, extraprec=4 * precision + 100, error=True)
        out = []
        for r in roots:
            res = abs(mpmath.polyval(vals, r))
            out.append((r, res))
    return out


def root_report(report: LFunctionReport, precision: int = 30, *, assert_purity: bool = False) -> LFunctionReport:
    """Attach reciprocal-root magnitudes of the certified polynomial."""
    if not report.certified:
        raise ValueError("degree not certified")
    M = report.certified_degree
    roots = reciprocal_roots(report.coefficients[: M + 1], precision)
    infos = tuple(
        RootInfo(float(abs(a)), float(res))
        for a, res in sorted(roots, key=lambda ar: (float(abs(ar[0])), float(mpmath.arg(ar[0]))))
    )
    return replace(report, roots=infos,
                   purity_status="asserted" if assert_purity else "reported-only")


def purity_deviation(report: LFunctionReport) -> float:
    """Largest ``| |alpha_j| - q^(n/2) |`` over the reported roots."""
    return max((abs(r.abs - report.purity_target) for r in report.roots), default=0.0)
