import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperlane.errors import DomainError, InputError
from hyperlane.geometry import (FLOAT_ROUNDTRIP_LIMIT, RadialGrid,
                                ball_radius_from_geodesic,
                                geodesic_from_ball_radius, radial_integral,
                                sphere_area, trapezoid_richardson, weight_k)


def test_ball_radius_examples():
    assert ball_radius_from_geodesic(0.0) == 0.0
    assert ball_radius_from_geodesic(math.log(3)) == pytest.approx(0.5, rel=1e-15)
    assert ball_radius_from_geodesic(2 * math.atanh(0.9)) == pytest.approx(0.9, rel=1e-15)


def test_geodesic_examples():
    assert geodesic_from_ball_radius(0.0) == 0.0
    assert geodesic_from_ball_radius(0.5) == pytest.approx(1.0986122886681098, rel=1e-15)
    t = geodesic_from_ball_radius(0.999999)
    assert math.isfinite(t) and t > 14


def test_ball_radius_stays_below_one():
    assert ball_radius_from_geodesic(400.0) < 1.0
    assert np.all(ball_radius_from_geodesic(np.array([50.0, 1e3])) < 1.0)


@pytest.mark.parametrize("bad", [-1e-9, math.inf, math.nan])
def test_ball_radius_domain(bad):
    with pytest.raises(DomainError):
        ball_radius_from_geodesic(bad)


@pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5, math.nan])
def test_geodesic_domain(bad):
    with pytest.raises(DomainError):
        geodesic_from_ball_radius(bad)


@given(st.floats(min_value=0.0, max_value=FLOAT_ROUNDTRIP_LIMIT))
def test_float_roundtrip(t):
    back = geodesic_from_ball_radius(ball_radius_from_geodesic(t))
    assert abs(back - t) <= 1e-12 * max(t, 1.0)


def test_mpmath_roundtrip_to_fifty():
    with mpmath.workdps(40):
        for x in np.linspace(0.0, 50.0, 51):
            x = mpmath.mpf(float(x))
            back = geodesic_from_ball_radius(ball_radius_from_geodesic(x))
            assert abs(back - x) <= 1e-12 * max(x, 1)


@given(st.floats(min_value=0.0, max_value=30.0), st.floats(min_value=1e-6, max_value=5.0))
def test_ball_radius_increasing(t, dt):
    assert ball_radius_from_geodesic(t + dt) >= ball_radius_from_geodesic(t)


def test_weight_examples():
    assert weight_k(0.0, 3) == 0.0
    assert weight_k(math.log(2), 3) == pytest.approx(0.5625, rel=1e-15)


def test_weight_log_branch_matches_direct():
    t = np.array([20.5, 25.0, 40.0])
    for N in (3, 5, 8):
        assert np.allclose(weight_k(t, N), np.sinh(t) ** (N - 1), rtol=1e-13)


def test_weight_increasing():
    t = np.linspace(0, 60, 2000)
    assert np.all(np.diff(weight_k(t, 4)) > 0)


def test_weight_domain():
    with pytest.raises(DomainError):
        weight_k(-1.0, 3)
    with pytest.raises(DomainError):
        weight_k(1.0, 2)


def test_sphere_area():
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(4) == pytest.approx(2 * math.pi ** 2)


def test_grid_invariants():
    with pytest.raises(InputError):
        RadialGrid([0.0, 1.0, 1.0], [1, 2, 3])
    with pytest.raises(InputError):
        RadialGrid([-1.0, 1.0], [1, 2])
    with pytest.raises(InputError):
        RadialGrid([0.0, 1.0], [1, 2, 3])


def test_trapezoid_richardson_exact_on_cubics():
    rng = np.random.default_rng(3)
    x = np.sort(rng.uniform(0, 2, 41))
    x[0], x[-1] = 0.0, 2.0
    # on uniform nodes the pairwise Richardson rule is Simpson's rule
    xu = np.linspace(0, 2, 41)
    assert trapezoid_richardson(xu, xu ** 3) == pytest.approx(4.0, rel=1e-14)
    assert trapezoid_richardson(x, x ** 3) == pytest.approx(4.0, rel=1e-3)


def test_closed_form_quadrature():
    # 4 pi * integral of sinh^2(t) e^{-4t} dt = pi / 6
    t = np.linspace(0.0, 20.0, 4001)
    val = radial_integral(RadialGrid(t, np.exp(-4.0 * t)), 3, tail_rate=-2.0)
    assert val == pytest.approx(math.pi / 6, rel=1e-8)


def test_tail_closure_matters():
    t = np.linspace(0.0, 6.0, 4001)
    f = np.exp(-4.0 * t)
    cut = radial_integral(RadialGrid(t, f), 3)
    closed = radial_integral(RadialGrid(t, f), 3, tail_rate=-2.0)
    assert abs(closed - math.pi / 6) < 0.01 * abs(cut - math.pi / 6)


def test_radial_integral_errors():
    with pytest.raises(InputError):
        radial_integral(RadialGrid([0.0, 1.0], [1.0, 1.0]), 3)
    with pytest.raises(InputError):
        radial_integral(RadialGrid([0.0, 1.0, 2.0], [1.0, math.nan, 1.0]), 3)
    with pytest.raises(InputError):
        radial_integral(RadialGrid([0.0, 1.0, 2.0], [1.0, 1.0, 1.0]), 3, tail_rate=1.0)


def test_ball_laplacian_reduces_to_radial_operator():
    sp = pytest.importorskip("sympy")
    t = sp.symbols("t", positive=True)
    rho = sp.symbols("rho", positive=True)
    f = sp.Function("f")
    for N in (3, 4, 5):
        g = f(rho)
        lam = 2 / (1 - rho ** 2)
        # conformally flat metric lam^2 delta: Lap = lam^-N div(lam^(N-2) grad)
        lap_ball = lam ** (-N) * rho ** (1 - N) * sp.diff(
            lam ** (N - 2) * rho ** (N - 1) * sp.diff(g, rho), rho)
        h = f(sp.tanh(t / 2))
        radial = sp.diff(h, t, 2) + (N - 1) * sp.cosh(t) / sp.sinh(t) * sp.diff(h, t)
        diff = lap_ball.subs(rho, sp.tanh(t / 2)).doit() - radial
        for tv in (sp.Rational(3, 10), sp.Rational(11, 10), sp.Rational(27, 10)):
            num = diff.subs(t, tv)
            # replace the unknown profile by a concrete one to evaluate
            num = num.replace(f, sp.Lambda(rho, sp.exp(rho) + rho ** 3)).doit()
            assert abs(sp.N(num, 50)) < 1e-40
