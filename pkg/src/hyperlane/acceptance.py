"""Acceptance checks shared by ``hyperlane verify`` and the test suite.

Each ``criterion_*`` function returns a :class:`Criterion` with a verdict
and a one-line detail string.  Ground states are solved once per
``(N, p, q, tolerance factor)`` and cached for the life of the process.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import diagnostics as dg
from .geometry import (FLOAT_ROUNDTRIP_LIMIT, RadialGrid,
                       ball_radius_from_geodesic, geodesic_from_ball_radius,
                       radial_integral)
from .ode import ExponentPair, IntegratorControls, Trajectory
from .regimes import classify_exponents, sobolev_pair_interval
from .shooting import bisect_on_diagonal, find_ground_state

FIXTURES = ((3, 3, 3), (4, 2, 2), (5, 2, 2), (3, 2, 4))
SOLVE_SECONDS = 30.0
DECAY_REL = 0.05
ENERGY_SHRINK = 4.0
REFINE = 10.0
IDENTITY_REL = 1e-3
DIAGONAL_REL = 1e-6
ROUNDTRIP_REL = 1e-12
QUADRATURE_REL = 1e-8
SLOPE_REL = 1e-10
PROPERTY_SAMPLES = 10_000
TAIL_FRACTIONS = dg.TAIL_EPS_FRACTIONS

# (N, p, q) -> (hyperbola margin, subcritical, strict, above hyperbola, interval)
TRUTH_TABLE = {
    (3, 2.0, 2.0): (1 / 3, True, True, True, (0.5, 1.5)),
    (3, 5.0, 5.0): (0.0, True, False, False, (1.0, 1.0)),
    (4, 1.5, 1.5): (0.3, True, True, True, (0.4, 1.6)),
    (5, 10.0, 1.2): (1 / 11 + 1 / 2.2 - 0.6, False, False, False, None),
    (3, 2.0, 4.0): (0.2, True, True, True, (0.9, 1.5)),
    (3, 3.0, 3.0): (1 / 6, True, True, True, (0.75, 1.25)),
    (4, 3.0, 3.0): (0.0, True, False, False, (1.0, 1.0)),
    (3, 1.5, 9.0): (1 / 6, False, False, True, (1.2, 1.7)),
}


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number}. {self.title}: {self.detail}"


@dataclass(frozen=True)
class Solved:
    state: object
    seconds: float
    bundle: dg.DiagnosticsBundle


@lru_cache(maxsize=None)
def solved(N, p, q, factor=1.0):
    ctl = IntegratorControls().tightened(factor)
    start = time.perf_counter()
    gs = find_ground_state(N, ExponentPair(p, q), ctl)
    seconds = time.perf_counter() - start
    return Solved(gs, seconds, dg.run_all(gs.trajectory, N, gs.pq, t0=ctl.t0))


def criterion_1():
    worst_dev, worst_time, ok = 0.0, 0.0, True
    for N, p, q in FIXTURES:
        s = solved(N, p, q)
        d = s.bundle.decay
        ok &= s.state.polished and d.max_rel_dev <= DECAY_REL
        ok &= all(x < 0 for x in d.slopes) and s.seconds < SOLVE_SECONDS
        worst_dev = max(worst_dev, d.max_rel_dev)
        worst_time = max(worst_time, s.seconds)
    return Criterion(1, "decay rate -2(N-1)", ok,
                     f"worst slope deviation {worst_dev:.2e} (limit {DECAY_REL}), "
                     f"slowest solve {worst_time:.2f} s (limit {SOLVE_SECONDS:g} s)")


def criterion_2():
    bad = []
    for N, p, q in FIXTURES:
        s = solved(N, p, q)
        traj = s.state.trajectory
        positive = bool(np.all(traj.u > 0) and np.all(traj.v > 0))
        if not (s.bundle.monotone.passed and positive):
            bad.append((N, p, q))
    return Criterion(2, "monotone decreasing profiles", not bad,
                     f"violations on {bad}" if bad else "zero violations on all fixtures")


def criterion_3():
    ok, worst_ratio, worst_shrink = True, 0.0, math.inf
    for N, p, q in FIXTURES:
        coarse = solved(N, p, q).bundle.energy
        fine = solved(N, p, q, REFINE).bundle.energy
        ratio = coarse.max_increase / coarse.bound
        shrink = coarse.dissipation_residual / fine.dissipation_residual
        ok &= coarse.passed and shrink >= ENERGY_SHRINK
        worst_ratio = max(worst_ratio, ratio)
        worst_shrink = min(worst_shrink, shrink)
    return Criterion(3, "energy dissipation", ok,
                     f"max increase / bound {worst_ratio:.2e}, "
                     f"smallest residual shrink {worst_shrink:.2f}x (need {ENERGY_SHRINK:g}x)")


def criterion_4():
    ok, worst = True, 0.0
    for N, p, q in FIXTURES:
        coarse = solved(N, p, q).bundle.identities
        fine = solved(N, p, q, REFINE).bundle.identities
        ok &= coarse.max_residual <= IDENTITY_REL
        ok &= fine.max_residual < coarse.max_residual
        worst = max(worst, coarse.max_residual)
    trend = "decreasing" if ok else "check failed"
    return Criterion(4, "integral identities A = B = C", ok,
                     f"worst pairwise residual {worst:.2e} (limit {IDENTITY_REL:g}), "
                     f"refinement trend: {trend}")


def criterion_5():
    ok, worst, smallest = True, 0.0, math.inf
    for N, p, q in FIXTURES:
        ident = solved(N, p, q).bundle.identities
        ok &= ident.action > 0 and ident.action_mismatch <= IDENTITY_REL
        worst = max(worst, ident.action_mismatch)
        smallest = min(smallest, ident.action)
    return Criterion(5, "positive action, two routes agree", ok,
                     f"smallest action {smallest:.4g}, worst route mismatch {worst:.2e}")


def criterion_6():
    ok, worst = True, 0.0
    for N, p, q in FIXTURES:
        if p != q:
            continue
        gs = solved(N, p, q).state
        star = bisect_on_diagonal(N, ExponentPair(p, q))
        dev = max(abs(gs.a - star), abs(gs.b - star)) / star
        asym = abs(gs.a - gs.b) / gs.a
        ok &= dev <= DIAGONAL_REL and asym <= DIAGONAL_REL
        worst = max(worst, dev, asym)
    return Criterion(6, "diagonal oracle", ok,
                     f"worst relative deviation {worst:.2e} (limit {DIAGONAL_REL:g})")


def truth_table_mismatches():
    bad = []
    for (N, p, q), (margin, sub, strict, above, interval) in TRUTH_TABLE.items():
        r = classify_exponents(N, p, q)
        got_iv = r.sobolev_interval
        same_iv = (got_iv is None) == (interval is None) and (
            interval is None or np.allclose(got_iv, interval, rtol=0, atol=1e-15))
        if not (math.isclose(r.hyperbola_margin, margin, rel_tol=0, abs_tol=1e-15)
                and r.subcritical == sub and r.subcritical_strict == strict
                and r.above_hyperbola == above and same_iv):
            bad.append((N, p, q))
    if classify_exponents(3, 5.0, 5.0).hyperbola_margin != 0.0:
        bad.append("(3, 5, 5) margin not exactly zero")
    return bad


def random_triple_failures(n=PROPERTY_SAMPLES, seed=20261019):
    rng = np.random.default_rng(seed)
    Ns = rng.integers(3, 11, size=n)
    ps = rng.uniform(1.0, 20.0, size=n)
    qs = rng.uniform(1.0, 20.0, size=n)
    fails = 0
    for N, p, q in zip(Ns, ps, qs):
        if p <= 1 or q <= 1:
            continue
        margin = classify_exponents(int(N), p, q).hyperbola_margin
        iv = sobolev_pair_interval(int(N), p, q)
        nonempty = iv is not None
        positive = nonempty and iv[1] > iv[0]
        if nonempty != (margin >= 0) or positive != (margin > 0):
            fails += 1
    return fails


def criterion_7():
    bad = truth_table_mismatches()
    fails = random_triple_failures()
    return Criterion(7, "exponent arithmetic", not bad and fails == 0,
                     f"truth table mismatches {bad or 'none'}, "
                     f"property failures {fails}/{PROPERTY_SAMPLES}")


def criterion_8():
    bad = []
    for N, p, q in FIXTURES:
        for r in solved(N, p, q).bundle.tail_bounds:
            if not r.passed:
                bad.append((N, p, q, r.eps))
    return Criterion(8, "tail sandwich", not bad,
                     f"failures {bad}" if bad else
                     "passes for eps in {0.1, 0.25, 0.5}*(N-1)^2/4 on all fixtures")


def roundtrip_error():
    import mpmath
    t = np.linspace(0.0, FLOAT_ROUNDTRIP_LIMIT, 12001)
    back = geodesic_from_ball_radius(ball_radius_from_geodesic(t))
    worst = float(np.max(np.abs(back - t) / np.maximum(t, 1.0)))
    with mpmath.workdps(40):
        for x in np.linspace(0.0, 50.0, 201):
            x = mpmath.mpf(float(x))
            back = geodesic_from_ball_radius(ball_radius_from_geodesic(x))
            worst = max(worst, float(abs(back - x) / max(x, 1)))
    return worst


def quadrature_error():
    t = np.linspace(0.0, 20.0, 4001)
    val = radial_integral(RadialGrid(t, np.exp(-4.0 * t)), 3, tail_rate=-2.0)
    return abs(val - math.pi / 6) / (math.pi / 6)


def planted_slope_error(N=3):
    t = np.linspace(0.0, 30.0, 601)
    e = np.exp(-(N - 1) * t)
    y = np.column_stack([e, -(N - 1) * e, e, -(N - 1) * e])
    rep = dg.fit_decay(Trajectory(t, y, 1e-10, 1e-10), N)
    return rep.max_rel_dev


def criterion_9():
    rt, qd, sl = roundtrip_error(), quadrature_error(), planted_slope_error()
    ok = rt <= ROUNDTRIP_REL and qd <= QUADRATURE_REL and sl <= SLOPE_REL
    return Criterion(9, "infrastructure", ok,
                     f"round trip {rt:.1e}, quadrature pi/6 {qd:.1e}, planted slope {sl:.1e}")


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9)


def run_all():
    return [c() for c in CRITERIA]
