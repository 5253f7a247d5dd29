"""Shooting for positive, exponentially decaying radial solutions.

Along a line ``a = const`` the shot crosses zero in ``v`` first for small
``b`` and in ``u`` first for large ``b``.  The switch between the two
happens across a curve ``b*(a)``.  Below the ground state the curve carries
positive, slowly decaying solutions; above it the two components hit zero
together.  The ground state is the point on the curve where the behaviour
changes, and it is located in two phases:

1. nested bisection: in ``b`` onto the switching curve for each trial
   ``a``, then in ``a`` on whether the curve point stays positive;
2. a damped Newton polish on the mismatch at a matching distance ``T``
   between the forward shot and a decaying tail integrated back from the
   far end, where the linear decaying mode is imposed exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (BracketError, DomainError, IntegrationError,
                     NoBracketError, PreconditionError, StructureError)
from .geometry import weight_k
from .ode import (IntegratorControls, Outcome, RadialState, ShootingOutcome,
                  Trajectory, integrate, propagate, taylor_start)
from .regimes import classify_exponents

log = logging.getLogger(__name__)

SEED_LO = 1e-2
SEED_HI = 1e3
SEED_POINTS = 16
MATCH_LEVEL = 1e-4        # matching point: max(|u|,|v|) below this * max(a,b)
FD_STEP = 1e-6
RESIDUAL_FACTOR = 1e-8
INNER_RTOL = 1e-14
OUTER_RTOL = 1e-12
TAIL_EXPONENT_CAP = 250.0  # keeps (N-1) * T_end clear of float underflow


def classify_outcome(a, b, N, pq, ctl=None):
    """Outcome of a single shot, without keeping the trajectory."""
    return integrate(a, b, N, pq, ctl, record=False)[1]


def _bisection_controls(ctl):
    # the margin-based Decay stop also fires on shots just above the ground
    # state (they decay below the margin before crossing), so bisection
    # classifies on crossing versus staying positive up to T_max
    return replace(ctl, decay_margin=1e-300)


def _positive(outcome):
    return outcome.kind in (Outcome.DECAY, Outcome.UNDETERMINED)


# --------------------------------------------------------------------------
# diagonal oracle


def bisect_on_diagonal(N, pq, ctl=None, bracket=(SEED_LO, SEED_HI),
                       rtol=OUTER_RTOL):
    """Symmetric ground-state height ``a*`` for ``p = q``.

    On ``u = v`` the system collapses to a single equation; shots with
    ``a < a*`` stay positive and shots with ``a > a*`` cross zero.  Returns
    the bracket midpoint once its width is below ``rtol * a*``.
    """
    if pq.p != pq.q:
        raise PreconditionError("bisect_on_diagonal needs p == q")
    ctl = ctl or IntegratorControls()
    bctl = _bisection_controls(ctl)
    lo, hi = map(float, bracket)
    if not 0 < lo < hi:
        raise DomainError(f"bad bracket {bracket}")
    out_lo = classify_outcome(lo, lo, N, pq, bctl)
    out_hi = classify_outcome(hi, hi, N, pq, bctl)
    if _positive(out_lo) == _positive(out_hi):
        raise BracketError(
            f"same classification at both ends: {out_lo} / {out_hi}")
    low_positive = _positive(out_lo)
    while hi - lo > rtol * lo:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        out = classify_outcome(mid, mid, N, pq, bctl)
        if _positive(out) == low_positive:
            lo, out_lo = mid, out
        else:
            hi, out_hi = mid, out
    pos_end = lo if low_positive else hi
    traj, out = integrate(pos_end, pos_end, N, pq, ctl)
    if out.kind is not Outcome.DECAY or not _monotone_positive(traj, ctl):
        raise StructureError(
            f"bracket collapsed at {pos_end!r} without a decaying side ({out})")
    return 0.5 * (lo + hi)


def _monotone_positive(traj, ctl):
    ok_sign = np.all(traj.u > 0) and np.all(traj.v > 0)
    late = traj.t > ctl.t0
    slack = 10 * ctl.abs_tol
    return bool(ok_sign and np.all(traj.du[late] < slack)
                and np.all(traj.dv[late] < slack))


# --------------------------------------------------------------------------
# phase 1: nested bisection


@dataclass
class _Curve:
    """Result of bisecting one line ``a = const`` onto the switching curve."""

    a: float
    below: bool
    b_lo: float
    b_hi: float
    b_pos: float | None = None
    outcome_pos: ShootingOutcome | None = None


def _b_side(outcome):
    if outcome.kind is Outcome.V_CROSSED:
        return -1
    if outcome.kind is Outcome.U_CROSSED:
        return 1
    if _positive(outcome):
        return 0
    return None


def _bisect_b(a, b_lo, b_hi, N, pq, ctl, counter):
    """Bisect ``b`` between a V-crossing and a U-crossing shot."""
    lo, hi = b_lo, b_hi
    while hi - lo > INNER_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        out = classify_outcome(a, mid, N, pq, ctl)
        counter[0] += 1
        side = _b_side(out)
        if side == 0:
            return _Curve(a, True, lo, hi, mid, out)
        if side is None:
            raise StructureError(f"blow-up at (a, b) = ({a!r}, {mid!r}) inside the bracket")
        if side < 0:
            lo = mid
        else:
            hi = mid
    return _Curve(a, False, lo, hi)


def _find_b_bracket(a, b_lo, b_hi, N, pq, ctl, counter, max_expand=60):
    s_lo = _b_side(classify_outcome(a, b_lo, N, pq, ctl))
    s_hi = _b_side(classify_outcome(a, b_hi, N, pq, ctl))
    counter[0] += 2
    for _ in range(max_expand):
        if s_lo == -1 and s_hi == 1:
            return b_lo, b_hi
        if s_lo != -1:
            b_lo *= 0.5
            s_lo = _b_side(classify_outcome(a, b_lo, N, pq, ctl))
            counter[0] += 1
        if s_hi != 1:
            b_hi *= 2.0
            s_hi = _b_side(classify_outcome(a, b_hi, N, pq, ctl))
            counter[0] += 1
    raise NoBracketError(f"no V/U switch in b for a = {a!r}")


def scan_seed_region(N, pq, ctl, lo=SEED_LO, hi=SEED_HI, n=SEED_POINTS):
    """Outcomes on an ``n x n`` log grid; returns (grid, outcome matrix)."""
    grid = np.geomspace(lo, hi, n)
    outcomes = [[classify_outcome(a, b, N, pq, ctl) for b in grid]
                for a in grid]
    return grid, outcomes


def flip_cells(grid, outcomes):
    """Adjacent grid pairs whose outcome kinds differ."""
    cells = []
    n = len(grid)
    for i in range(n):
        for j in range(n):
            k = outcomes[i][j].kind
            if j + 1 < n and outcomes[i][j + 1].kind is not k:
                cells.append(((grid[i], grid[j]), (grid[i], grid[j + 1]),
                              k.value, outcomes[i][j + 1].kind.value))
            if i + 1 < n and outcomes[i + 1][j].kind is not k:
                cells.append(((grid[i], grid[j]), (grid[i + 1], grid[j]),
                              k.value, outcomes[i + 1][j].kind.value))
    return cells


def _row_bracket(row, grid):
    sides = [_b_side(o) for o in row]
    for j in range(len(grid) - 1):
        if sides[j] == -1 and sides[j + 1] in (0, 1):
            k = j + 1
            while k < len(grid) and sides[k] == 0:
                k += 1
            if k < len(grid) and sides[k] == 1:
                return grid[j], grid[k], any(s == 0 for s in sides[j + 1:k])
            return None
    return None


@dataclass
class PhaseOne:
    a: float
    b: float
    outcome: ShootingOutcome
    a_bracket: tuple
    flip_cells: list = field(default_factory=list)
    n_shots: int = 0


def nested_bisection(N, pq, ctl, seed=(SEED_LO, SEED_HI), n_seed=SEED_POINTS):
    """Phase 1: locate the ground state to bisection precision."""
    counter = [0]
    ctl = _bisection_controls(ctl)
    grid, outcomes = scan_seed_region(N, pq, ctl, seed[0], seed[1], n_seed)
    counter[0] += n_seed * n_seed
    cells = flip_cells(grid, outcomes)
    log.info("seed scan found %d flip cells", len(cells))
    for c in cells:
        log.debug("flip cell %s", c)

    rows = []
    for i, a in enumerate(grid):
        br = _row_bracket(outcomes[i], grid)
        if br is None:
            continue
        b_lo, b_hi, has_pos = br
        curve = _bisect_b(a, b_lo, b_hi, N, pq, ctl, counter)
        if has_pos and not curve.below:
            log.warning("row a=%.4g has positive scan cells but bisected above", a)
        rows.append(curve)
    lo_curve = hi_curve = None
    for prev, cur in zip(rows, rows[1:]):
        if prev.below and not cur.below:
            lo_curve, hi_curve = prev, cur
            break
    if lo_curve is None:
        raise NoBracketError(
            f"no below/above transition along the switching curve in the seed "
            f"region [{seed[0]:g}, {seed[1]:g}]")
    sides = [c.below for c in rows]
    if sum(1 for x, y in zip(sides, sides[1:]) if x != y) > 1:
        log.warning("switching curve changes side more than once: %s", sides)

    b_lo = min(lo_curve.b_lo, hi_curve.b_lo)
    b_hi = max(lo_curve.b_hi, hi_curve.b_hi)
    while hi_curve.a - lo_curve.a > OUTER_RTOL * hi_curve.a:
        a = 0.5 * (lo_curve.a + hi_curve.a)
        if a <= lo_curve.a or a >= hi_curve.a:
            break
        bl, bh = _find_b_bracket(a, b_lo, b_hi, N, pq, ctl, counter)
        cur = _bisect_b(a, bl, bh, N, pq, ctl, counter)
        if cur.below:
            lo_curve = cur
        else:
            hi_curve = cur
        b_lo = min(lo_curve.b_lo, hi_curve.b_lo)
        b_hi = max(lo_curve.b_hi, hi_curve.b_hi)
    if lo_curve.b_pos is None:
        raise StructureError("outer bisection ended without a positive shot")
    return PhaseOne(lo_curve.a, lo_curve.b_pos, lo_curve.outcome_pos,
                    (lo_curve.a, hi_curve.a), cells, counter[0])


# --------------------------------------------------------------------------
# phase 2: matched polish


def decaying_mode_integral(T, N):
    """``G(T) = integral from T to infinity of (sinh s)^(1-N) ds``.

    ``-G`` is the decaying solution of ``(k y')' = 0`` normalised by
    ``k y' = 1``.  Summed from the binomial series of
    ``(1 - e^{-2s})^{1-N}``; needs ``T >= 1``.
    """
    if T < 1:
        raise DomainError("decaying_mode_integral needs T >= 1")
    m = N - 1
    total = 0.0
    coef = 1.0
    k = 0
    while True:
        term = coef * math.exp(-(m + 2 * k) * T) / (m + 2 * k)
        total += term
        if term < 1e-18 * total:
            break
        coef *= (m + k) / (k + 1)
        k += 1
        if k > 10000:
            break
    return 2.0 ** m * total


def tail_end(N, ctl):
    return min(ctl.T_max, TAIL_EXPONENT_CAP / (N - 1))


def _tail(alpha, beta, T, L, N, pq, rel_tol):
    g = decaying_mode_integral(L, N)
    kL = weight_k(L, N)
    s = RadialState(L, alpha * g, -alpha / kL, beta * g, -beta / kL)
    atol = rel_tol * 1e-6 * min(abs(x) for x in s[1:])
    traj, _ = propagate(s, T, N, pq, rel_tol, atol)
    return traj


def match_tail(fwd_state, L, N, pq, rel_tol, max_iter=30):
    """Decaying tail on ``[T, L]`` whose slopes at ``T`` match ``fwd_state``.

    Returns ``(tail_trajectory, alpha, beta)`` where ``alpha, beta`` are the
    far-field amplitudes ``-k u'`` and ``-k v'`` imposed at ``L``.
    """
    T = fwd_state.t
    kT = weight_k(T, N)
    alpha, beta = -kT * fwd_state.du, -kT * fwd_state.dv
    if not (alpha > 0 and beta > 0):
        raise StructureError("forward slopes at the matching point are not negative")
    for _ in range(max_iter):
        tail = _tail(alpha, beta, T, L, N, pq, rel_tol)
        du_b, dv_b = tail.du[0], tail.dv[0]
        ra, rb = fwd_state.du / du_b, fwd_state.dv / dv_b
        alpha *= ra
        beta *= rb
        if abs(ra - 1) < 1e-15 and abs(rb - 1) < 1e-15:
            break
    tail = _tail(alpha, beta, T, L, N, pq, rel_tol)
    return tail, alpha, beta


def _forward_to(a, b, T, N, pq, ctl, record=False):
    s0 = _start(a, b, N, pq, ctl)
    traj, out = propagate(s0, T, N, pq, ctl.rel_tol, ctl.abs_tol, crossings=True)
    if out.kind is not Outcome.UNDETERMINED:
        return traj, None
    return traj, traj.state(len(traj) - 1)


def _start(a, b, N, pq, ctl):
    return taylor_start(a, b, N, pq, ctl.t0)


def matching_residual(a, b, T, N, pq, ctl):
    """Value mismatch ``(u_fwd - u_tail, v_fwd - v_tail)`` at ``T``.

    Returns None when the forward shot crosses zero before ``T``.
    """
    _, st = _forward_to(a, b, T, N, pq, ctl)
    if st is None or st.u <= 0 or st.v <= 0 or st.du >= 0 or st.dv >= 0:
        return None
    tail, _, _ = match_tail(st, tail_end(N, ctl), N, pq, ctl.rel_tol)
    return np.array([st.u - tail.u[0], st.v - tail.v[0]]), st


def matching_point(traj, a, b):
    """First node with ``max(|u|, |v|) < MATCH_LEVEL * max(a, b)``."""
    level = MATCH_LEVEL * max(a, b)
    idx = np.nonzero(np.maximum(np.abs(traj.u), np.abs(traj.v)) < level)[0]
    if idx.size == 0:
        raise StructureError("shot never decays to the matching level")
    return float(traj.t[idx[0]])


def ground_state_trajectory(a, b, N, pq, ctl, T):
    """Forward shot on ``[t0, T]`` joined to the matched tail on ``(T, L]``.

    Returns ``(trajectory, residual_vector, tail_amplitudes)``.
    """
    s0 = _start(a, b, N, pq, ctl)
    fwd, out = propagate(s0, T, N, pq, ctl.rel_tol, ctl.abs_tol, crossings=True)
    if out.kind is not Outcome.UNDETERMINED:
        raise StructureError(f"forward shot ends early: {out}")
    st = fwd.state(len(fwd) - 1)
    L = tail_end(N, ctl)
    tail, alpha, beta = match_tail(st, L, N, pq, ctl.rel_tol)
    t = np.concatenate([fwd.t, tail.t[1:]])
    y = np.concatenate([fwd.y, tail.y[1:]])
    meta = {"n_accept": fwd.meta["n_accept"] + tail.meta["n_accept"],
            "n_reject": fwd.meta["n_reject"] + tail.meta["n_reject"],
            "backend": fwd.meta["backend"], "T_match": T, "T_end": L,
            "join_index": len(fwd) - 1}
    traj = Trajectory(t, y, ctl.rel_tol, ctl.abs_tol, meta)
    resid = np.array([st.u - tail.u[0], st.v - tail.v[0]])
    return traj, resid, (alpha, beta)


def _residual_tol(st, ctl):
    return RESIDUAL_FACTOR * (abs(st.u) + abs(st.v) + ctl.abs_tol)


def newton_polish(a, b, T, N, pq, ctl, max_iter=30):
    """Phase 2: damped Newton on the matching residual.

    Returns ``(a, b, residual_norm, converged)``.
    """
    res = matching_residual(a, b, T, N, pq, ctl)
    if res is None:
        return a, b, math.inf, False
    R, st = res
    norm = float(np.linalg.norm(R))
    best = (a, b, norm)
    for it in range(max_iter):
        if norm <= _residual_tol(st, ctl):
            return a, b, norm, True
        J = np.empty((2, 2))
        ok = True
        for col, (da, db) in enumerate(((FD_STEP * a, 0.0), (0.0, FD_STEP * b))):
            r = matching_residual(a + da, b + db, T, N, pq, ctl)
            if r is None:
                ok = False
                break
            J[:, col] = (r[0] - R) / (da + db)
        if not ok:
            break
        try:
            step = np.linalg.solve(J, -R)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        improved = False
        while lam > 1e-4:
            na, nb = a + lam * step[0], b + lam * step[1]
            if na > 0 and nb > 0:
                r = matching_residual(na, nb, T, N, pq, ctl)
                if r is not None and np.linalg.norm(r[0]) < norm:
                    a, b = na, nb
                    R, st = r
                    norm = float(np.linalg.norm(R))
                    improved = True
                    break
            lam *= 0.5
        log.debug("newton it=%d a=%r b=%r |R|=%.3e lam=%g", it, a, b, norm, lam)
        if norm < best[2]:
            best = (a, b, norm)
        if not improved:
            break
    a, b, norm = best
    return a, b, norm, norm <= _residual_tol(st, ctl)


# --------------------------------------------------------------------------


@dataclass
class GroundState:
    """Converged shooting data ``(a, b) = (u(0), v(0))`` and its profile."""

    N: int
    pq: object
    a: float
    b: float
    trajectory: Trajectory
    outcome: ShootingOutcome
    residual: float
    polished: bool
    T_match: float
    tail_amplitudes: tuple
    controls: IntegratorControls
    phase_one: PhaseOne | None = None

    @property
    def initial_pair(self):
        return (self.a, self.b)


def find_ground_state(N, pq, ctl=None, seed=(SEED_LO, SEED_HI),
                      n_seed=SEED_POINTS, override_regime=False):
    """Locate a positive decaying radial solution for exponents ``pq``.

    Requires ``1/(p+1) + 1/(q+1) > (N-2)/N`` unless ``override_regime``.
    When the Newton polish fails the bisection candidate is returned with
    ``polished=False``.
    """
    ctl = ctl or IntegratorControls()
    regime = classify_exponents(N, pq.p, pq.q)
    if not regime.above_hyperbola and not override_regime:
        raise PreconditionError(
            f"(N, p, q) = ({N}, {pq.p}, {pq.q}) is not strictly above the "
            f"critical hyperbola: 1/(p+1) + 1/(q+1) - (N-2)/N = "
            f"{regime.hyperbola_margin:.6g}")
    p1 = nested_bisection(N, pq, ctl, seed, n_seed)
    log.info("phase 1: a=%r b=%r (%s, %d shots)", p1.a, p1.b, p1.outcome, p1.n_shots)

    traj0, _ = integrate(p1.a, p1.b, N, pq, ctl)
    T = matching_point(traj0, p1.a, p1.b)
    a, b, norm, converged = newton_polish(p1.a, p1.b, T, N, pq, ctl)
    if not converged:
        log.warning("phase 2 did not reach the residual tolerance (|R|=%.3e)", norm)
        if not math.isfinite(norm):
            a, b = p1.a, p1.b
    try:
        traj, resid, amps = ground_state_trajectory(a, b, N, pq, ctl, T)
    except (StructureError, IntegrationError):
        if (a, b) == (p1.a, p1.b):
            raise
        a, b, converged = p1.a, p1.b, False
        traj, resid, amps = ground_state_trajectory(a, b, N, pq, ctl, T)
    return GroundState(
        N=int(N), pq=pq, a=float(a), b=float(b), trajectory=traj,
        outcome=ShootingOutcome(Outcome.DECAY, float(traj.t[-1])),
        residual=float(np.linalg.norm(resid)), polished=converged,
        T_match=T, tail_amplitudes=amps, controls=ctl, phase_one=p1)
