"""Compare the compiled and pure-Python crossing kernels.

Usage::

    python3 benchmarks/bench_ingest.py --samples 200000 --levels 4
"""

import argparse
import timeit

import numpy as np

from hocpoles import _backend
from hocpoles.crossings import HocState


def run(kernel, y, levels, mean_mode, ewma):
    _backend.ingest_block = _backend.KERNELS[kernel]
    return HocState(levels, mean_mode=mean_mode, ewma_lambda=ewma).extend(y)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--mean-mode", choices=["zero", "running"], default="zero")
    p.add_argument("--ewma-lambda", type=float, default=None)
    args = p.parse_args(argv)

    y = np.random.default_rng(0).standard_normal(args.samples).cumsum() * 0.01
    y += np.random.default_rng(1).standard_normal(args.samples)
    default = _backend.ingest_block
    timings, dumps = {}, {}
    try:
        for name in sorted(_backend.KERNELS):
            call = lambda: run(name, y, args.levels, args.mean_mode, args.ewma_lambda)
            timings[name] = min(timeit.repeat(call, number=1, repeat=args.repeat))
            dumps[name] = call().dumps()
    finally:
        _backend.ingest_block = default

    print(f"{args.samples} samples, {args.levels} levels, mean mode {args.mean_mode}, "
          f"ewma {args.ewma_lambda}; default backend: {_backend.BACKEND}")
    for name, t in timings.items():
        print(f"  {name:<7} {t * 1e3:9.2f} ms  {args.samples / t / 1e6:8.2f} Msamples/s")
    if len(timings) == 2:
        print(f"  speedup {timings['python'] / timings['cython']:.1f}x, identical state: "
              f"{dumps['python'] == dumps['cython']}")


if __name__ == "__main__":
    main()
