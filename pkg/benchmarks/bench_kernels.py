"""Compare the compiled and pure-Python survival-moment kernels.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``. Reports the
best-of-N time per call for a life-only moment evaluation and for a full
cash-refund solve, plus the largest disagreement between backends.
"""
from __future__ import annotations

import argparse
import math
import timeit

from refund_annuity.kernels import available_backends
from refund_annuity.mortality import GompertzLaw
from refund_annuity.pricing import ProductSpec, ValuationContext, cria_price
from refund_annuity.quadrature import QuadratureSettings

CASES = [(55.0, 0.02), (65.0, 0.02), (75.0, 0.04), (85.0, 0.01)]


def _raw_call(fn, x, r, lo=0.0, hi=math.inf):
    s = QuadratureSettings()
    return fn(0, 90.0, 10.0, x, r, lo, hi, False, s.relative_tolerance,
              s.absolute_tolerance, s.truncation_survival_floor, s.max_subdivisions)


def _cria_with(fn):
    import refund_annuity.kernels as k

    saved = k._impl.survival_moments
    # swap the dispatch target for one solve
    k._impl.survival_moments = fn
    try:
        return cria_price(ValuationContext(), ProductSpec("CR", 65.0, 0.02))
    finally:
        k._impl.survival_moments = saved


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=200)
    args = parser.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; only the pure-Python backend is available")

    moments = {name: [_raw_call(fn, x, r) for x, r in CASES] for name, fn in backends.items()}
    if len(moments) == 2:
        worst = max(abs(a - b) / max(abs(b), 1e-300)
                    for pa, pb in zip(moments["cython"], moments["python"])
                    for a, b in zip(pa[:3], pb[:3]))
        print(f"max relative disagreement across backends: {worst:.3g}")

    print(f"{'backend':<8} {'moments (us)':>14} {'cria solve (ms)':>16}")
    timings = {}
    for name, fn in backends.items():
        per_moment = min(timeit.repeat(lambda: _raw_call(fn, 65.0, 0.02),
                                       number=args.number, repeat=args.repeat)) / args.number
        solves = max(1, args.number // 20)
        per_solve = min(timeit.repeat(lambda: _cria_with(fn), number=solves,
                                      repeat=args.repeat)) / solves
        timings[name] = (per_moment, per_solve)
        print(f"{name:<8} {per_moment * 1e6:>14.2f} {per_solve * 1e3:>16.3f}")
    if len(timings) == 2:
        print(f"speedup: moments x{timings['python'][0] / timings['cython'][0]:.1f}, "
              f"cria solve x{timings['python'][1] / timings['cython'][1]:.1f}")


if __name__ == "__main__":
    main()
