"""Compare the compiled enumeration kernel with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each case times one character sum per backend and checks that both backends
return the same histogram.
"""
import argparse
import time

from expsum_lab import _core
from expsum_lab.charsum import char_sum
from expsum_lab.ffield import FieldSpec
from expsum_lab.mpoly import parse

CASES = [
    ("F_5, n=2, i=4", 5, 2, "x1^2*x2 + x2^2", 4),
    ("F_5, n=2, i=6", 5, 2, "x1^2*x2 + x2^2", 6),
    ("F_2, n=2, i=8", 2, 2, "x1^3*x2 + x1*x2^3 + x1^3", 8),
    ("F_7, n=2, i=4", 7, 2, "x1^3 + x2^3 + x1", 4),
    ("F_3, n=3, i=3", 3, 3, "x1^2*x2 + x2*x3^2 + x1", 3),
]


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = sorted(_core.BACKENDS)
    print(f"backends: {backends} (default {_core.DEFAULT_BACKEND})")
    print(f"{'case':<18}{'points':>12}" + "".join(f"{b + ' s':>14}" for b in backends) + f"{'speedup':>10}")
    for label, p, n, src, i in CASES:
        F = FieldSpec(p)
        f = parse(src, n, F)
        times, hists = {}, set()
        for b in backends:
            times[b], val = best_of(lambda: char_sum(f, F, i, backend=b, workers=1), args.repeat)
            hists.add(val.histogram)
        if len(hists) != 1:
            raise SystemExit(f"{label}: backends disagree")
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        row = f"{label:<18}{(p ** i) ** n:>12}" + "".join(f"{times[b]:>14.4f}" for b in backends)
        print(row + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
