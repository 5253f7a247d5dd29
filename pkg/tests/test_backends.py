import os
import subprocess
import sys

import numpy as np
import pytest

from hyperlane import _backend, _pykernel

kernel = pytest.importorskip("hyperlane._kernel")

CASES = [
    # N, p, q, t_start, y0, t_end, events, blowup, decay_level
    (3.0, 3.0, 3.0, 1e-3, (4.9, -1e-2, 4.9, -1e-2), 60.0, 7, 1e6, 4.9e-8),
    (3.0, 2.0, 4.0, 1e-3, (3.5, -1e-2, 7.09, -1e-2), 60.0, 7, 1e6, 7e-8),
    (5.0, 2.0, 2.0, 1e-3, (120.0, -1.0, 119.0, -1.0), 30.0, 7, 1e6, 1e-6),
    (3.0, 3.0, 3.0, 5.0, (1e-3, -2e-3, 1e-3, -2e-3), 1.0, 0, np.inf, 0.0),
    (4.0, 1.5, 2.5, 1e-2, (50.0, 0.0, 1.0, 0.0), 10.0, 7, 10.0, 0.0),
]


@pytest.mark.parametrize("case", CASES)
def test_backends_bitwise_identical(case):
    N, p, q, t0, y0, t1, ev, big, dec = case
    args = (N, p, q, t0, y0, t1, 1e-10, 1e-12, ev, big, dec, True)
    ts_c, ys_c, st_c, te_c, na_c, nr_c = kernel.integrate_kernel(*args)
    ts_p, ys_p, st_p, te_p, na_p, nr_p = _pykernel.integrate_kernel(*args)
    assert (st_c, na_c, nr_c) == (st_p, na_p, nr_p)
    assert te_c == te_p
    assert np.array_equal(ts_c, ts_p) and np.array_equal(ys_c, ys_p)


def test_record_flag_keeps_only_endpoints():
    args = (3.0, 3.0, 3.0, 1e-3, (4.9, -1e-2, 4.9, -1e-2), 60.0,
            1e-10, 1e-12, 7, 1e6, 4.9e-8)
    ts_full, *_ = kernel.integrate_kernel(*args, True)
    ts, ys, status, t_ev, *_ = kernel.integrate_kernel(*args, False)
    assert len(ts) <= 2 and len(ts_full) > 100


def test_default_backend_is_compiled():
    assert _backend.BACKEND == "cython"


def test_env_forces_python_fallback():
    code = "import hyperlane; print(hyperlane.BACKEND)"
    env = dict(os.environ, HYPERLANE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_full_solve_identical_under_fallback(solved):
    code = ("from hyperlane import find_ground_state, ExponentPair, BACKEND;"
            "g = find_ground_state(3, ExponentPair(2.0, 4.0));"
            "print(BACKEND, repr(g.a), repr(g.b))")
    env = dict(os.environ, HYPERLANE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    backend, a, b = out.stdout.split()
    gs = solved(3, 2.0, 4.0).state
    assert backend == "python"
    assert (float(a), float(b)) == (gs.a, gs.b)


def test_benchmark_script_runs(capsys):
    from pathlib import Path
    import runpy
    path = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    mod = runpy.run_path(str(path))
    assert mod["main"](["--repeat", "1"]) == 0
    assert "speedup" in capsys.readouterr().out
