"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--h 0.005] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from concentra import _backend
from concentra.distance import dilated_area, squared_edt
from concentra.functionals import equivalent_radius, fraenkel_asymmetry
from concentra.shapes import ShapeSpec, generate


def cases(h):
    E = generate(ShapeSpec("blob", {"modes": 5, "amplitude": 0.2}, h=h, seed=3))
    r_E = equivalent_radius(E)
    mask = np.random.default_rng(0).random((1024, 1024)) < 0.02
    return {
        "squared EDT 1024x1024": lambda: squared_edt(mask),
        "dilated area r=r_E": lambda: dilated_area(E, r_E),
        "asymmetry center search": lambda: fraenkel_asymmetry(E),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--h", type=float, default=0.005)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["python"]
    try:
        _backend.use("cython")
        backends.append("cython")
    except ImportError:
        print("compiled extension not built; timing the fallback only")
    timings = {}
    for name in backends:
        _backend.use(name)
        for label, fn in cases(args.h).items():
            fn()
            timings[label, name] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    print(f"{'kernel':<26}" + "".join(f"{b:>10}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for label in cases(args.h):
        row = f"{label:<26}" + "".join(f"{timings[label, b]:9.3f}s" for b in backends)
        if len(backends) > 1:
            row += f"  {timings[label, 'python'] / timings[label, 'cython']:7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
