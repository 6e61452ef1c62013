"""Time the compiled Jacobi kernel against the numpy fallback.

    python3 benchmarks/bench_jacobi.py [--sizes 8 16 32 64] [--repeats 5] [--json out.json]

Reports the median wall time per decomposition and the speedup, plus one
end-to-end optimizer run (practical ASGO, exact kernel) per backend.
"""
import argparse
import json
import statistics
import sys
import time

import numpy as np

from asgo import _backend, linalg
from asgo.optim import OptimizerConfig, OptimizerState, step
from asgo.problems import generator, random_spd


def _median_seconds(fn, repeats):
    fn()  # warm-up
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def bench_eig(sizes, repeats):
    rows = []
    for n in sizes:
        x = random_spd(generator(0, "bench", n), n, 100.0)
        row = {"n": n}
        for name in _backend.available():
            with _backend.use_backend(name):
                row[name] = _median_seconds(lambda: linalg.sym_eig(x), repeats)
        rows.append(row)
    return rows


def bench_optimizer(steps, shape=(32, 16)):
    rng = generator(0, "bench", "optimizer")
    grads = [rng.standard_normal(shape) for _ in range(steps)]
    cfg = OptimizerConfig(kind="asgo-practical", lr=0.01, eps=1e-6)
    out = {}
    for name in _backend.available():
        with _backend.use_backend(name):
            def run():
                state, w = OptimizerState(), np.zeros(shape)
                for g in grads:
                    w, state = step(cfg, state, w, g)
            out[name] = _median_seconds(run, 3)
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 32, 64])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--steps", type=int, default=50)
    parser.add_argument("--json", help="also write the results here")
    args = parser.parse_args(argv)

    backends = _backend.available()
    if "cython" not in backends:
        print("compiled kernel not built; only the numpy fallback is available", file=sys.stderr)

    eig = bench_eig(args.sizes, args.repeats)
    print(f"{'n':>4}  " + "  ".join(f"{b:>12}" for b in backends) + ("  speedup" if len(backends) > 1 else ""))
    for row in eig:
        line = f"{row['n']:>4}  " + "  ".join(f"{row[b] * 1e3:>10.3f}ms" for b in backends)
        if len(backends) > 1:
            line += f"  {row['python'] / row['cython']:>6.1f}x"
        print(line)

    opt = bench_optimizer(args.steps)
    print(f"\npractical ASGO, 32x16, {args.steps} steps: "
          + ", ".join(f"{b} {t * 1e3:.1f}ms" for b, t in opt.items()))

    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"sym_eig": eig, "optimizer": opt, "steps": args.steps}, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
