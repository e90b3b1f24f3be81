"""Command line entry point ``expsum-lab``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from .charsum import SumCache
from .ffield import DEFAULT_BUDGET, FieldSpec
from .lfunc import DEFAULT_GUARD
from .pipeline import STAGES, Job, MasterReport, run

EXIT_OK, EXIT_HYPOTHESIS, EXIT_MISMATCH, EXIT_RESOURCE = 0, 1, 2, 3

SUBCOMMANDS = {
    "check": ("hypotheses",),
    "milnor": ("hypotheses",),
    "mf": ("hypotheses", "koszul"),
    "lfun": ("hypotheses", "lfunction"),
    "spectral": ("hypotheses", "spectral"),
    "full": STAGES,
}


def default_cache_dir() -> Path:
    env = os.environ.get("EXPSUM_LAB_CACHE")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "expsum-lab"


def _total_degree(text: str) -> tuple[str, list[int]]:
    label, sep, vals = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected LABEL=d[,d...]")
    return label.strip(), [int(v) for v in vals.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("job")
    g.add_argument("--job", metavar="FILE", help="job description (JSON)")
    g.add_argument("--p", type=int, help="characteristic")
    g.add_argument("--a", type=int, default=1, help="extension degree, q = p^a")
    g.add_argument("--modulus", type=int, nargs="+", help="field modulus, low degree first")
    g.add_argument("--n", type=int, help="number of variables")
    g.add_argument("--f", help='polynomial, e.g. "x1^2*x2 + x2^2"')
    g.add_argument("--c", type=int, default=1, help="twist, as an integer-encoded field element")
    o = common.add_argument_group("options")
    o.add_argument("--guard", type=int, help=f"extra vanishing coefficients (default {DEFAULT_GUARD})")
    o.add_argument("--rmax", type=int, help="top filtration degree for the linear algebra")
    o.add_argument("--imax", type=int, help="compute S_1..S_imax regardless of the predicted degree")
    o.add_argument("--budget", type=int, help=f"largest point count per stage (default {DEFAULT_BUDGET})")
    o.add_argument("--precision", type=int, help="decimal digits for root finding")
    o.add_argument("--total-degree", type=_total_degree, action="append", default=[], metavar="LABEL=d",
                   help="weighted total degree at a singular point, e.g. P1=6")
    r = common.add_argument_group("execution")
    r.add_argument("--shards", type=int, default=1, help="worker processes for the sums")
    r.add_argument("--backend", choices=("compiled", "numpy"), help="force a kernel backend")
    r.add_argument("--cache-dir", type=Path, help="character sum cache location")
    r.add_argument("--no-cache", action="store_true", help="do not read or write the sum cache")
    r.add_argument("--out", type=Path, help="write the JSON report here")
    r.add_argument("--json", action="store_true", help="print the JSON report")
    r.add_argument("--timing", action="store_true", help="include timings and cache statistics")
    r.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="expsum-lab", description="Degree and spectral data of L-functions of exponential sums.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "check": "evaluate the vanishing hypotheses",
        "milnor": "critical points of the leading form and their Milnor numbers",
        "mf": "degree from the Milnor formula and from the Jacobian cokernel",
        "lfun": "character sums, L-function and its degree",
        "spectral": "spectral sequence pages",
        "full": "everything, with cross-checks",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def job_from_args(args: argparse.Namespace) -> Job:
    if args.job:
        job = Job.load(args.job)
    else:
        if args.p is None or args.n is None or args.f is None:
            raise ValueError("give --job FILE or all of --p --n --f")
        field = FieldSpec(args.p, args.a, tuple(args.modulus or ()))
        job = Job(field=field, n=args.n, f=args.f, c=args.c)
    for attr, name in (("guard", "guard"), ("rmax", "r_max"), ("imax", "i_max"),
                       ("budget", "budget"), ("precision", "precision")):
        value = getattr(args, attr)
        if value is not None:
            setattr(job, name, value)
    for label, vals in args.total_degree:
        job.total_degrees[label] = vals
    job.__post_init__()
    return job


def _fmt_points(data: dict) -> list[str]:
    lines = []
    for pt in data.get("singular", {}).get("points", []):
        mu = pt.get("mu")
        coords = ", ".join(str(c[0]) if len(c) == 1 else str(tuple(c)) for c in pt["coords"])
        lines.append(f"  {pt['label']}: ({coords}) residue degree {pt['d']} mu={mu if mu is not None else '?'}"
                     + (f" ({pt['error']})" if pt.get("error") else ""))
    return lines


def render_text(command: str, rep: MasterReport) -> str:
    d = rep.data
    lines: list[str] = []
    if rep.banner:
        lines.append(f"*** {rep.banner} ***")
    hyp = d.get("hypotheses")
    mf = d.get("mf", {})
    if command == "mf" and hyp is not None and hyp["verdict"] != "fail" and mf.get("consistent"):
        lines.append(str(mf.get("formula")))
        return "\n".join(lines)
    if hyp is not None:
        lines.append(f"theorem: {hyp['theorem']}  verdict: {hyp['verdict']}")
        lines += [f"  reason: {r}" for r in hyp["reasons"]]
    if command in ("milnor", "full"):
        sing = d.get("singular", {})
        lines.append(f"scheme degree: {sing.get('scheme_degree')}")
        lines += _fmt_points(d)
    if command in ("mf", "full", "lfun", "spectral"):
        parts = [f"{k}={mf[k]}" for k in ("formula", "cokernel", "spectral", "l_degree") if k in mf]
        lines.append("M_f: " + " ".join(parts))
    if "spectral" in d:
        sp = d["spectral"]
        for page in sp["pages"]:
            lines.append(f"E_{page['t']}: vanishes off diagonal: {page['vanish_off_diagonal']}")
    if "lfunction" in d:
        lf = d["lfunction"]
        lines.append(f"L-function: {lf.get('status', 'not certified')}, degree {lf.get('certified_degree')}")
        if lf.get("roots"):
            lines.append("  |alpha|: " + ", ".join(f"{r['abs']:.12g}" for r in lf["roots"]) +
                         f"  (purity {lf.get('purity')})")
    lines += [f"caveat: {c}" for c in d.get("caveats", [])]
    lines += [f"error [{e['stage']}]: {e['message']}" for e in d.get("errors", [])]
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        job = job_from_args(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"expsum-lab: cannot load job: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    cache = None if args.no_cache else SumCache(args.cache_dir or default_cache_dir())
    report = run(job, SUBCOMMANDS[args.command], cache=cache, shards=args.shards, backend=args.backend)
    text = report.dumps(timing=args.timing)
    if args.out is not None:
        try:
            args.out.write_text(text + "\n")
        except OSError as exc:
            print(f"expsum-lab: cannot write report: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
    print(text if args.json else render_text(args.command, report))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
