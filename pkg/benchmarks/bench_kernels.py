"""Time the compiled and pure-Python integrator kernels on the same shots.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case is a single recorded shot, as used inside the bisection loops.
The two kernels are checked to agree bit for bit before timing.
"""

import argparse
import sys
import timeit

import numpy as np

from hyperlane import _pykernel
from hyperlane.ode import ExponentPair, taylor_start

try:
    from hyperlane import _kernel
except ImportError:
    _kernel = None

CASES = {
    "N=3 p=q=3 near ground state": (3, 3.0, 3.0, 4.898979485, 4.898979485),
    "N=3 p=2 q=4 near ground state": (3, 2.0, 4.0, 3.49978878, 7.09148794),
    "N=5 p=q=2 near ground state": (5, 2.0, 2.0, 120.0, 120.0),
    "N=3 p=q=3 early crossing": (3, 3.0, 3.0, 50.0, 50.0),
}


def _args(N, p, q, a, b):
    s = taylor_start(a, b, N, ExponentPair(p, q), 1e-3)
    return (float(N), p, q, s.t, s[1:], 60.0, 1e-10, 1e-10, 7, 1e6,
            1e-8 * max(a, b), True)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    opts = parser.parse_args(argv)
    if _kernel is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`")
        return 1
    print(f"{'case':34s} {'steps':>6s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s}")
    for name, case in CASES.items():
        args = _args(*case)
        rc = _kernel.integrate_kernel(*args)
        rp = _pykernel.integrate_kernel(*args)
        assert np.array_equal(rc[1], rp[1]) and rc[2:] == rp[2:], name
        tc = min(timeit.repeat(lambda: _kernel.integrate_kernel(*args),
                               number=1, repeat=opts.repeat))
        tp = min(timeit.repeat(lambda: _pykernel.integrate_kernel(*args),
                               number=1, repeat=opts.repeat))
        print(f"{name:34s} {rc[4]:6d} {tc * 1e3:10.2f} {tp * 1e3:10.2f} {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
