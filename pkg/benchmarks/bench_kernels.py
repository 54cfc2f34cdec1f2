"""Compiled vs numpy-fallback kernels: mode-3 DFT, batched Jacobi SVD and Ht-SVD.

Usage::

    python3 benchmarks/bench_kernels.py [--repeats 5] [--csv out.csv]

Prints the best time of each kernel under every available backend and the
speed-up of the compiled one.
"""
import argparse
import csv
import sys
import time

import numpy as np

from rbtensor import _backend, decomp, linalg
from rbtensor.tensor import RBTensor


def cases(rng):
    tubes = rng.standard_normal((64 * 64, 32)) + 1j * rng.standard_normal((64 * 64, 32))
    odd = rng.standard_normal((64 * 64, 97)) + 1j * rng.standard_normal((64 * 64, 97))
    mats = rng.standard_normal((32, 16, 16)) + 1j * rng.standard_normal((32, 16, 16))
    tall = rng.standard_normal((8, 48, 24)) + 1j * rng.standard_normal((8, 48, 24))
    tensor = RBTensor.random((32, 32, 16), rng)
    return [
        ("dft n3=32 (4096 tubes)", lambda: linalg.dft_forward(tubes)),
        ("dft n3=97 prime (4096 tubes)", lambda: linalg.dft_forward(odd)),
        ("jacobi svd 32 x 16x16", lambda: linalg.svd_batch(mats)),
        ("jacobi svd 8 x 48x24", lambda: linalg.svd_batch(tall)),
        ("ht_svd 32x32x16", lambda: decomp.ht_svd(tensor)),
    ]


def best_time(fn, repeats):
    fn()  # warm up
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--csv")
    args = p.parse_args(argv)
    backends = _backend.available()
    rows = []
    for label, fn in cases(np.random.default_rng(0)):
        times = {}
        for name in backends:
            with _backend.use(name):
                times[name] = best_time(fn, args.repeats)
        rows.append((label, times))
    width = max(len(label) for label, _ in rows)
    print(f"{'kernel':{width}s}  " + "  ".join(f"{b:>10s}" for b in backends) + "   speed-up")
    for label, times in rows:
        cells = "  ".join(f"{times[b] * 1e3:8.2f}ms" for b in backends)
        ratio = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{label:{width}s}  {cells}   {ratio:7.2f}x")
    if "compiled" not in backends:
        print("compiled extension not built; only the fallback was timed", file=sys.stderr)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["kernel", "backend", "seconds"])
            for label, times in rows:
                for b, s in times.items():
                    w.writerow([label, b, repr(s)])
    return 0


if __name__ == "__main__":
    sys.exit(main())
