"""Time the compiled kernels against the numpy fallback.

Usage: ``python benchmarks/bench_kernels.py [--repeat N]``. Both backends are
imported directly so a single process compares them; results are checked
for agreement before timing.
"""

import argparse
import timeit

import numpy as np
from scipy.special import roots_hermite

from atomcoherence import _kernels_py

try:
    from atomcoherence import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None


def doppler_case(n_scan=201, n_nodes=400, u=100.0):
    o1 = np.linspace(-10, 10, n_scan)
    zeros = np.zeros_like(o1)
    x, w = roots_hermite(n_nodes)
    args = (o1, zeros, zeros, u * x, w / np.sqrt(np.pi), 1.0, 0.9, 1.1,
            np.ones(6), np.array([1.0, 0.0, 0.0]), 1.0)
    return args


def pv_case(n=200001):
    x = np.linspace(-100, 100, n)
    h = 1 / (1 + x ** 2)
    x0 = 0.4
    return (x, h, x0, 1 / (1 + x0 ** 2), 0.0)


def bench(name, func_py, func_c, args, repeat):
    ref = func_py(*args)
    t_py = min(timeit.repeat(lambda: func_py(*args), number=1, repeat=repeat))
    if func_c is None:
        print(f"{name:16s} python {t_py * 1e3:9.3f} ms   cython   n/a")
        return
    dev = np.max(np.abs(np.asarray(func_c(*args)) - ref)) / np.max(np.abs(ref))
    t_c = min(timeit.repeat(lambda: func_c(*args), number=1, repeat=repeat))
    print(f"{name:16s} python {t_py * 1e3:9.3f} ms   cython {t_c * 1e3:9.3f} ms   "
          f"speedup {t_py / t_c:6.2f}x   max rel dev {dev:.1e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    opts = parser.parse_args()
    get = (lambda n: getattr(_kernels_c, n)) if _kernels_c else (lambda n: None)
    bench("chi3_average", _kernels_py.chi3_average, get("chi3_average"), doppler_case(), opts.repeat)
    bench("pv_trapezoid", _kernels_py.pv_trapezoid, get("pv_trapezoid"), pv_case(), opts.repeat)


if __name__ == "__main__":
    main()
