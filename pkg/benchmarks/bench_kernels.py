"""Compare the compiled inference kernel against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 5]
"""

import argparse
import importlib
import timeit

import numpy as np

from fuzzysched.fuzzy import default_engine


def _load(name):
    try:
        return importlib.import_module(f"fuzzysched._core.{name}")
    except ImportError:
        return None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20_000, help="batch size")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    packed = default_engine()._pack_args()
    X = np.random.default_rng(0).uniform([0, 0], [10, 25], size=(args.n, 2))
    single = X[: min(2000, args.n)]

    backends = {"cython": _load("_inference"), "python": _load("_inference_py")}
    timings = {}
    results = {}
    for label, mod in backends.items():
        if mod is None:
            print(f"{label:>7}: not available (extension not built)")
            continue
        model = mod.Model(*packed)
        batch = min(timeit.repeat(lambda: model.infer_batch(X), number=1, repeat=args.repeat))
        loop = min(timeit.repeat(lambda: [model.infer(row) for row in single], number=1, repeat=args.repeat))
        timings[label] = (batch, loop)
        results[label] = model.infer_batch(X)
        print(
            f"{label:>7}: infer_batch {args.n} pts {batch * 1e3:9.2f} ms "
            f"({batch / args.n * 1e6:7.2f} us/pt) | single infer {loop / len(single) * 1e6:7.2f} us/call"
        )

    if len(timings) == 2:
        diff = float(np.max(np.abs(results["cython"] - results["python"])))
        print(f"speedup batch {timings['python'][0] / timings['cython'][0]:.1f}x, "
              f"single {timings['python'][1] / timings['cython'][1]:.1f}x, max |diff| {diff:.1e}")


if __name__ == "__main__":
    main()
