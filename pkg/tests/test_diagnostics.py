import json
import math

import numpy as np
import pytest

from hyperlane import diagnostics as dg
from hyperlane.errors import InputError, NotApplicable, WindowError
from hyperlane.ode import ExponentPair, RadialState, Trajectory

PQ2 = ExponentPair(2.0, 2.0)


def _traj(t, u, du, v, dv, tol=1e-10):
    return Trajectory(t, np.column_stack([u, du, v, dv]), tol, tol)


def _planted(N, t_end=30.0, n=601):
    t = np.linspace(0.0, t_end, n)
    e = np.exp(-(N - 1) * t)
    return _traj(t, e, -(N - 1) * e, e, -(N - 1) * e)


# ---------------------------------------------------------------- monotone

def test_monotone_passes_on_ground_states(solved):
    for key in [(3, 3.0, 3.0), (3, 2.0, 4.0)]:
        assert dg.check_monotone(solved(*key).state.trajectory).passed


def test_monotone_planted_violation(solved):
    traj = solved(3, 3.0, 3.0).state.trajectory
    y = traj.y.copy()
    y[40, 1] = 1e-3
    bad = Trajectory(traj.t, y, traj.rel_tol, traj.abs_tol)
    rep = dg.check_monotone(bad)
    assert not rep.passed and rep.first_violation == 40
    assert rep.t_violation == traj.t[40]


def test_monotone_needs_two_nodes():
    with pytest.raises(InputError):
        dg.check_monotone(_traj([0.1], [1.0], [0.0], [1.0], [0.0]))


# ---------------------------------------------------------------- energy

def test_energy_examples():
    assert dg.energy_J(RadialState(1.0, 0, 0, 0, 0), PQ2) == 0.0
    s = RadialState(1.0, 1.0, -0.1, 1.0, -0.2)
    assert dg.energy_J(s, PQ2) == pytest.approx(0.02 + 1 / 3 + 1 / 3, rel=1e-15)
    assert dg.energy_J(RadialState(1.0, 0.0, 1.0, 0.0, -1.0), PQ2) == -1.0


def test_energy_constant_state_exact():
    traj = _traj([1.0, 2.0], [1.0, 1.0], [0.0, 0.0], [1.0, 1.0], [0.0, 0.0])
    rep = dg.check_energy_dissipation(traj, 3, PQ2)
    assert rep.max_increase == 0.0
    assert np.diff(rep.J_samples)[0] == 0.0
    assert rep.dissipation_residual == 0.0


def test_energy_on_ground_state(solved):
    s = solved(3, 2.0, 4.0)
    rep = s.bundle.energy
    traj = s.state.trajectory
    assert rep.J_samples.shape == traj.t.shape
    assert rep.max_increase <= 100 * traj.rel_tol * rep.J_samples[0]
    assert rep.passed


def test_dissipation_residual_shrinks_under_refinement(solved):
    coarse = solved(3, 2.0, 4.0).bundle.energy
    fine = solved(3, 2.0, 4.0, 10.0).bundle.energy
    assert coarse.dissipation_residual >= 4 * fine.dissipation_residual


def test_symmetric_rate_only_matches_on_diagonal(solved):
    diag = solved(3, 3.0, 3.0).bundle.energy
    off = solved(3, 2.0, 4.0).bundle.energy
    assert diag.diagonal_rate_mismatch == pytest.approx(diag.dissipation_residual, rel=1e-6)
    assert off.diagonal_rate_mismatch > 1e5 * off.dissipation_residual


def test_energy_errors():
    with pytest.raises(InputError):
        dg.check_energy_dissipation(_traj([0.5], [1.0], [0.0], [1.0], [0.0]), 3, PQ2)
    with pytest.raises(InputError):
        dg.check_energy_dissipation(_traj([0.0, 1.0], [1, 1], [0, 0], [1, 1], [0, 0]), 3, PQ2)


# ---------------------------------------------------------------- decay

@pytest.mark.parametrize("N", [3, 4, 7])
def test_planted_exponential_slopes(N):
    rep = dg.fit_decay(_planted(N), N)
    assert rep.target == -2.0 * (N - 1)
    assert rep.max_rel_dev <= 1e-10
    assert rep.window == pytest.approx((20.0, 30.0))


@pytest.mark.parametrize("key, target", [((3, 3.0, 3.0), -4.0), ((4, 2.0, 2.0), -6.0)])
def test_ground_state_slopes(solved, key, target):
    rep = solved(*key).bundle.decay
    assert rep.target == target
    for s in rep.slopes:
        assert s == pytest.approx(target, rel=0.05)
    lo, hi = rep.window
    assert hi - lo >= 5


def test_decay_window_too_short():
    with pytest.raises(WindowError):
        dg.fit_decay(_planted(3, t_end=12.0, n=200), 3)


def test_decay_needs_decayed_profile():
    t = np.linspace(0, 30, 100)
    one = np.ones_like(t)
    with pytest.raises(InputError):
        dg.fit_decay(_traj(t, one, -1e-3 * one, one, -1e-3 * one), 3)


def test_decay_reports_excluded_zeros():
    traj = _planted(3)
    y = traj.y.copy()
    y[-5:, 3] = 0.0
    rep = dg.fit_decay(Trajectory(traj.t, y, 1e-10, 1e-10), 3)
    assert rep.excluded == {"dv": 5}
    assert rep.slope_dv2 == pytest.approx(-4.0, rel=1e-10)


# ---------------------------------------------------------------- identities

def test_identities_zero_profile():
    t = np.linspace(0.0, 30.0, 50)
    z = np.zeros_like(t)
    rep = dg.check_identities(_traj(t, z, z, z, z), 3, PQ2)
    assert (rep.A, rep.B, rep.C, rep.action) == (0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("key", [(3, 3.0, 3.0), (4, 2.0, 2.0), (5, 2.0, 2.0), (3, 2.0, 4.0)])
def test_identities_on_ground_states(solved, key):
    rep = solved(*key).bundle.identities
    assert min(rep.A, rep.B, rep.C) > 0
    assert rep.max_residual <= 1e-3
    assert rep.action > 0
    assert rep.action_mismatch <= 1e-3


def test_identity_residuals_decrease_under_refinement(solved):
    coarse = solved(3, 2.0, 4.0).bundle.identities
    fine = solved(3, 2.0, 4.0, 10.0).bundle.identities
    assert fine.max_residual < coarse.max_residual


def test_identities_reject_crossing_profile():
    t = np.linspace(0.0, 2.0, 50)
    u = 1 - t
    with pytest.raises(InputError):
        dg.check_identities(_traj(t, u, -np.ones_like(t), u, -np.ones_like(t)), 3, PQ2)


def test_action_decomposition_algebra(solved):
    rep = solved(3, 2.0, 4.0).bundle.identities
    p, q = 2.0, 4.0
    assert rep.action == pytest.approx((0.5 - 1 / (p + 1)) * rep.C + (0.5 - 1 / (q + 1)) * rep.B)
    assert rep.action_direct == pytest.approx(rep.A - rep.C / (p + 1) - rep.B / (q + 1), rel=1e-6)


# ---------------------------------------------------------------- tail bound

def test_tail_bound_eps_quarter(solved):
    traj = solved(3, 3.0, 3.0).state.trajectory
    rep = dg.characteristic_tail_bound(traj, 3, 0.25, ExponentPair(3.0, 3.0))
    assert rep.passed and rep.n_checked > 10
    assert rep.nu_minus == pytest.approx((-2 - math.sqrt(3)) / 2)


@pytest.mark.parametrize("key", [(3, 3.0, 3.0), (4, 2.0, 2.0), (5, 2.0, 2.0), (3, 2.0, 4.0)])
def test_tail_bound_all_fractions(solved, key):
    assert all(r.passed for r in solved(*key).bundle.tail_bounds)


def test_tail_bound_errors(solved):
    traj = solved(3, 3.0, 3.0).state.trajectory
    pq = ExponentPair(3.0, 3.0)
    for eps in (0.0, 1.0, 2.0):
        with pytest.raises(InputError):
            dg.characteristic_tail_bound(traj, 3, eps, pq)
    short = Trajectory(traj.t[:20], traj.y[:20], traj.rel_tol, traj.abs_tol)
    with pytest.raises(NotApplicable):
        dg.characteristic_tail_bound(short, 3, 0.1, pq)


def test_tail_bound_detects_planted_violation(solved):
    traj = solved(3, 3.0, 3.0).state.trajectory
    y = traj.y.copy()
    y[-1, 0] *= 1e6
    bad = Trajectory(traj.t, y, traj.rel_tol, traj.abs_tol)
    rep = dg.characteristic_tail_bound(bad, 3, 0.25, ExponentPair(3.0, 3.0))
    assert rep.lower_ok and not rep.upper_ok


# ---------------------------------------------------------------- bundle

def test_bundle_is_json_serialisable(solved):
    d = solved(3, 2.0, 4.0).bundle.as_dict()
    text = json.dumps(d)
    assert json.loads(text)["passed"] is True
