"""Compare the compiled and pure-Python simulation kernels.

    python benchmarks/bench_kernel.py [--c 2] [--horizon 1000] [--replicates 2000]

Both kernels run the same seeds; outputs are checked for equality before the
timings are reported.
"""

import argparse
import time

import numpy as np

from mmcmax import _kernel_py
from mmcmax.rng import derive_seeds

try:
    from mmcmax import _kernel
except ImportError:
    _kernel = None


def timed(kernel, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = kernel.simulate_batch(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--c", type=int, default=2)
    parser.add_argument("--horizon", type=float, default=1000.0)
    parser.add_argument("--replicates", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    lam, mu = 1 / 3, 1 / (2 * args.c)
    seeds = derive_seeds(0, 0, args.replicates)
    call = (args.c, lam, mu, args.horizon, 0, seeds)

    t_py, out_py = timed(_kernel_py, call, 1)
    events = int(out_py[1].sum())
    print(f"M/M/{args.c} lam=1/3 mu=1/{2 * args.c} n={args.horizon:g} "
          f"replicates={args.replicates} events={events}")
    print(f"python  {t_py:9.3f} s  {events / t_py / 1e6:8.2f} M events/s")
    if _kernel is None:
        print("cython  not built (pip install -e . --no-build-isolation)")
        return
    t_cy, out_cy = timed(_kernel, call, args.repeat)
    same = all(np.array_equal(a, b) for a, b in zip(out_py, out_cy))
    print(f"cython  {t_cy:9.3f} s  {events / t_cy / 1e6:8.2f} M events/s")
    print(f"speedup {t_py / t_cy:9.1f}x  identical output: {same}")
    if not same:
        raise SystemExit("kernels disagree")


if __name__ == "__main__":
    main()
