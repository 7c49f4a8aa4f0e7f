"""Compare the compiled and pure-Python kernels on the hot loops.

Usage: python benchmarks/bench_kernels.py [--quick]
Both backends run single-threaded on identical substreams; outputs are
checked for equality before timings are reported.
"""

import argparse
import time

import numpy as np

from froglab import _backend, simulate
from froglab.analysis import model_constants


def timed(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(quick):
    c = model_constants()
    scale = 1 if quick else 4
    return [
        ("chain n=1000", lambda k: simulate.chain_batch(1000, 1, 50 * scale, threads=1, kernels=k)),
        ("level n=10^4", lambda k: simulate.level_batch(10 ** 4, 1, 20 * scale, threads=1, kernels=k)),
        ("ideal n=10^4", lambda k: simulate.ideal_batch(10 ** 4, 1, 10 * scale, c, threads=1, kernels=k)),
        ("exact_pmf n=500", lambda k: k.exact_pmf(500 * scale)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = _backend.available()
    if "compiled" not in names:
        print("compiled core not built; only the python backend is available")
    print(f"{'case':<18}" + "".join(f"{n:>12}" for n in names) + ("   speedup" if len(names) == 2 else ""))
    for label, run in cases(args.quick):
        times, outs = [], []
        for name in names:
            t, out = timed(lambda: run(_backend.load(name)), args.repeat)
            times.append(t)
            outs.append(out)
        if len(outs) == 2:
            a, b = outs
            pairs = zip(a, b) if isinstance(a, tuple) else [(a, b)]
            for x, y in pairs:
                np.testing.assert_allclose(x, y, rtol=0, atol=1e-15)
        row = f"{label:<18}" + "".join(f"{t:>11.4f}s" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.0f}x"
        print(row)


if __name__ == "__main__":
    main()
