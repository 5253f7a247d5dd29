"""Checks run on a computed radial profile.

Every check takes an immutable :class:`~hyperlane.ode.Trajectory` and
returns a small report; none of them integrates anything.  Pass/fail
thresholds scale with the tolerances stored on the trajectory so that a
tighter solve is held to a tighter standard.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InputError, NotApplicable, WindowError
from .geometry import RadialGrid, radial_integral, sphere_area
from .ode import odd_pow
from .regimes import characteristic_roots

DECAY_TOLERANCE = 0.05
IDENTITY_TOLERANCE = 1e-3
ENERGY_FACTOR = 100.0
MONOTONE_FACTOR = 10.0
MIN_WINDOW = 5.0
MAX_WINDOW = 10.0
DECAY_LEVEL = 1e-6
TAIL_EPS_FRACTIONS = (0.1, 0.25, 0.5)


def _nonempty(traj, need=1):
    if len(traj) < need:
        raise InputError(f"trajectory needs at least {need} nodes, got {len(traj)}")


# --------------------------------------------------------------------------
# monotonicity


@dataclass(frozen=True)
class MonotoneReport:
    passed: bool
    slack: float
    first_violation: int | None
    t_violation: float | None


def check_monotone(traj, t0=None, abs_tol=None):
    """Both slopes negative, up to ``10 * abs_tol``, at every node past ``t0``.

    ``t0`` defaults to the first node and ``abs_tol`` to the tolerance the
    trajectory was computed with.
    """
    _nonempty(traj, 2)
    t0 = traj.t[0] if t0 is None else t0
    abs_tol = traj.abs_tol if abs_tol is None else abs_tol
    slack = MONOTONE_FACTOR * abs_tol
    bad = (traj.t > t0) & ((traj.du >= slack) | (traj.dv >= slack))
    idx = np.flatnonzero(bad)
    if idx.size == 0:
        return MonotoneReport(True, slack, None, None)
    i = int(idx[0])
    return MonotoneReport(False, slack, i, float(traj.t[i]))


# --------------------------------------------------------------------------
# energy


def energy_J(state, pq):
    """``u'v' + |v|^(p+1)/(p+1) + |u|^(q+1)/(q+1)``."""
    p, q = pq.p, pq.q
    return (state.du * state.dv + abs(state.v) ** (p + 1) / (p + 1)
            + abs(state.u) ** (q + 1) / (q + 1))


def _energy_samples(traj, pq):
    p, q = pq.p, pq.q
    return (traj.du * traj.dv + np.abs(traj.v) ** (p + 1) / (p + 1)
            + np.abs(traj.u) ** (q + 1) / (q + 1))


def _second_derivatives(traj, N, pq):
    c = (N - 1) / np.tanh(traj.t)
    ddu = -c * traj.du - odd_pow(traj.v, pq.p)
    ddv = -c * traj.dv - odd_pow(traj.u, pq.q)
    return c, ddu, ddv


def _hermite_increments(t, g, dg):
    # trapezoid with the endpoint-derivative correction, exact for cubics
    h = np.diff(t)
    return 0.5 * h * (g[:-1] + g[1:]) + h * h / 12.0 * (dg[:-1] - dg[1:])


@dataclass(frozen=True)
class EnergyReport:
    J_samples: np.ndarray
    max_increase: float
    bound: float
    dissipation_residuals: np.ndarray
    dissipation_residual: float
    diagonal_rate_mismatch: float
    passed: bool

    def as_dict(self):
        return {
            "max_increase": self.max_increase,
            "bound": self.bound,
            "dissipation_residual": self.dissipation_residual,
            "diagonal_rate_mismatch": self.diagonal_rate_mismatch,
            "J_start": float(self.J_samples[0]),
            "J_end": float(self.J_samples[-1]),
            "passed": self.passed,
        }


def check_energy_dissipation(traj, N, pq):
    """Monotone decrease of ``J`` and its rate along the trajectory.

    Along solutions ``dJ/dt = -2 (N-1) coth(t) u' v'``.  Each increment of
    ``J`` between nodes is compared against the integral of that rate,
    evaluated with the derivative-corrected trapezoid rule; the per-interval
    mismatches make up ``dissipation_residuals``.  The symmetric rate
    ``-(N-1) coth(t) (u'^2 + v'^2)``, which agrees only when ``u' = v'``,
    is compared the same way and reported as ``diagonal_rate_mismatch``.
    """
    _nonempty(traj, 2)
    if traj.t[0] <= 0:
        raise InputError("energy check needs t > 0 at every node")
    J = _energy_samples(traj, pq)
    dJ = np.diff(J)
    max_inc = float(max(dJ.max(), 0.0))
    bound = ENERGY_FACTOR * traj.rel_tol * abs(float(J[0]))

    c, ddu, ddv = _second_derivatives(traj, N, pq)
    csch2 = 1.0 / np.sinh(traj.t) ** 2
    n1 = N - 1

    w = traj.du * traj.dv
    g = -2.0 * c * w
    dg = -2.0 * (-n1 * csch2 * w + c * (ddu * traj.dv + traj.du * ddv))
    resid = np.abs(dJ - _hermite_increments(traj.t, g, dg))

    s = traj.du ** 2 + traj.dv ** 2
    g_sym = -c * s
    dg_sym = -(-n1 * csch2 * s + 2.0 * c * (traj.du * ddu + traj.dv * ddv))
    sym = np.abs(dJ - _hermite_increments(traj.t, g_sym, dg_sym))

    return EnergyReport(
        J_samples=J, max_increase=max_inc, bound=bound,
        dissipation_residuals=resid, dissipation_residual=float(resid.max()),
        diagonal_rate_mismatch=float(sym.max()), passed=max_inc <= bound)


# --------------------------------------------------------------------------
# exponential decay


@dataclass(frozen=True)
class DecayReport:
    slope_u2: float
    slope_v2: float
    slope_du2: float
    slope_dv2: float
    target: float
    window: tuple
    max_rel_dev: float
    excluded: dict = field(default_factory=dict)

    @property
    def slopes(self):
        return (self.slope_u2, self.slope_v2, self.slope_du2, self.slope_dv2)

    @property
    def passed(self):
        return (all(math.isfinite(s) and s < 0 for s in self.slopes)
                and self.max_rel_dev <= DECAY_TOLERANCE)

    def as_dict(self):
        d = asdict(self)
        d["window"] = list(self.window)
        d["passed"] = self.passed
        return d


def _log_slope(t, x):
    keep = x != 0
    if np.count_nonzero(keep) < 2:
        return math.nan, int(np.count_nonzero(~keep))
    slope = np.polyfit(t[keep], np.log(x[keep] ** 2), 1)[0]
    return float(slope), int(np.count_nonzero(~keep))


def fit_decay(traj, N):
    """Least-squares slopes of ``log u^2``, ``log v^2``, ``log u'^2``, ``log v'^2``.

    The fit uses the last ``W = min(10, span/3)`` units of the trajectory;
    a window shorter than 5 raises :class:`WindowError`.  Nodes where a
    quantity is exactly zero are dropped from its fit and counted in
    ``excluded``.
    """
    _nonempty(traj, 3)
    scale = max(abs(traj.u[0]), abs(traj.v[0]))
    end = max(abs(traj.u[-1]), abs(traj.v[-1]))
    if end > DECAY_LEVEL * scale:
        raise InputError(
            f"trajectory has not decayed: max(|u|,|v|) = {end:.3g} at the end, "
            f"start scale {scale:.3g}")
    span = traj.t[-1] - traj.t[0]
    W = min(MAX_WINDOW, span / 3.0)
    if W < MIN_WINDOW:
        raise WindowError(f"fit window {W:.3g} is shorter than {MIN_WINDOW}")
    t_hi = float(traj.t[-1])
    t_lo = t_hi - W
    sel = traj.t >= t_lo
    t = traj.t[sel]
    slopes, excluded = [], {}
    for name, x in (("u", traj.u), ("v", traj.v), ("du", traj.du), ("dv", traj.dv)):
        s, n_ex = _log_slope(t, x[sel])
        slopes.append(s)
        if n_ex:
            excluded[name] = n_ex
    target = -2.0 * (N - 1)
    dev = max(abs(s - target) / abs(target) if math.isfinite(s) else math.inf
              for s in slopes)
    return DecayReport(*slopes, target=target, window=(t_lo, t_hi),
                       max_rel_dev=float(dev), excluded=excluded)


# --------------------------------------------------------------------------
# integral identities and the action


@dataclass(frozen=True)
class IdentityReport:
    A: float
    B: float
    C: float
    rel_residuals: dict
    action: float
    action_direct: float
    action_mismatch: float

    @property
    def max_residual(self):
        return max(self.rel_residuals.values())

    @property
    def passed(self):
        return (self.max_residual <= IDENTITY_TOLERANCE
                and self.action > 0
                and self.action_mismatch <= IDENTITY_TOLERANCE)

    def as_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _require_decay(traj):
    if np.any(traj.u < 0) or np.any(traj.v < 0):
        raise InputError("profile changes sign; identities need a decaying positive profile")
    scale = max(float(np.max(np.abs(traj.u))), float(np.max(np.abs(traj.v))))
    end = max(abs(traj.u[-1]), abs(traj.v[-1]))
    if end > DECAY_LEVEL * scale:
        raise InputError("identities need a profile that has decayed at the last node")


def _pole_cap(traj, f0, N):
    # integral of k * f over [0, t_first] with f frozen at its first sample
    t = traj.t[0]
    return sphere_area(N) * f0 * t ** N / N


def _weighted(traj, f, N, rate):
    if len(traj) < 3:
        raise InputError("identity quadrature needs at least 3 nodes")
    tail = rate if (rate is not None and rate < 0) else None
    return radial_integral(RadialGrid(traj.t, f), N, tail) + _pole_cap(traj, f[0], N)


def check_identities(traj, N, pq, decay=None):
    """``A = B = C`` and the action computed two ways.

    Each of ``A``, ``B``, ``C`` is ``omega * integral of k(t) f(t)``, with
    ``f`` equal to ``u'v'``, ``u^(q+1)`` or ``v^(p+1)`` respectively; the part past the last node is closed with
    the exponential rate from :func:`fit_decay` (pass ``decay`` to reuse a
    fit).  The action is ``(1/2 - 1/(p+1)) C + (1/2 - 1/(q+1)) B``;
    ``action_direct`` integrates ``u'v' - v^(p+1)/(p+1) - u^(q+1)/(q+1)``
    directly.
    """
    _nonempty(traj, 3)
    _require_decay(traj)
    p, q = pq.p, pq.q
    n1 = N - 1
    if not (np.any(traj.u) or np.any(traj.v)):
        zeros = {"AB": 0.0, "BC": 0.0, "AC": 0.0}
        return IdentityReport(0.0, 0.0, 0.0, zeros, 0.0, 0.0, 0.0)
    if decay is None:
        try:
            decay = fit_decay(traj, N)
        except WindowError:
            decay = None
    if decay is not None:
        r_a = n1 + 0.5 * (decay.slope_du2 + decay.slope_dv2)
        r_b = n1 + 0.5 * (q + 1) * decay.slope_u2
        r_c = n1 + 0.5 * (p + 1) * decay.slope_v2
    else:
        r_a = r_b = r_c = None

    fa = traj.du * traj.dv
    fb = np.abs(traj.u) ** (q + 1)
    fc = np.abs(traj.v) ** (p + 1)
    A = _weighted(traj, fa, N, r_a)
    B = _weighted(traj, fb, N, r_b)
    C = _weighted(traj, fc, N, r_c)
    rates = [r for r in (r_a, r_b, r_c) if r is not None]
    direct = _weighted(traj, fa - fc / (p + 1) - fb / (q + 1), N,
                       max(rates) if rates else None)

    top = max(abs(A), abs(B), abs(C))
    res = {"AB": abs(A - B) / top, "BC": abs(B - C) / top, "AC": abs(A - C) / top}
    action = (0.5 - 1 / (p + 1)) * C + (0.5 - 1 / (q + 1)) * B
    mismatch = abs(action - direct) / max(abs(action), abs(direct))
    return IdentityReport(float(A), float(B), float(C), res,
                          float(action), float(direct), float(mismatch))


# --------------------------------------------------------------------------
# exponential sandwich in the tail


@dataclass(frozen=True)
class TailBoundReport:
    eps: float
    t_eps: float
    mu_minus: float
    nu_minus: float
    lower_ok: bool
    upper_ok: bool
    worst_lower: float
    worst_upper: float
    n_checked: int

    @property
    def passed(self):
        return self.lower_ok and self.upper_ok

    def as_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _first_true(mask):
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else None


def characteristic_tail_bound(traj, N, eps, pq):
    """Check ``c e^{mu-(eps) t} <= u + v <= c e^{nu-(eps) t}`` past ``t_eps``.

    ``t_eps`` is the first node past which ``coth t <= 1 + eps`` holds
    together with the smallness conditions ``v^(p-1) <= eps`` and
    ``u^(q-1) <= eps``.  Both bounds are
    anchored at ``(u + v)(t_eps)``; the comparison allows a relative slack of
    ``10 * rel_tol``.  Raises :class:`NotApplicable` if ``t_eps`` is never
    reached.
    """
    roots = characteristic_roots(N, eps)
    if not eps > 0:
        raise InputError("eps must be positive for the tail comparison")
    _nonempty(traj, 2)
    t = traj.t
    conds = (1.0 / np.tanh(t) <= 1.0 + eps,
             np.abs(traj.v) ** (pq.p - 1) <= eps,
             np.abs(traj.u) ** (pq.q - 1) <= eps)
    # the profile is decreasing, so each condition holds from its first node on
    starts = [_first_true(c) for c in conds]
    if any(s is None for s in starts):
        raise NotApplicable(f"t_eps not reached for eps={eps}")
    i0 = max(starts)
    if i0 >= len(t) - 1:
        raise NotApplicable(f"t_eps reached only at the last node for eps={eps}")
    w = traj.u + traj.v
    tt = t[i0:] - t[i0]
    # compare in log space so the far tail does not underflow the ratio
    logw = np.log(w[i0:]) - math.log(w[i0])
    slack = math.log1p(MONOTONE_FACTOR * traj.rel_tol)
    gap_lo = logw - roots.mu_minus * tt
    gap_hi = roots.nu_minus * tt - logw
    return TailBoundReport(
        eps=float(eps), t_eps=float(t[i0]),
        mu_minus=roots.mu_minus, nu_minus=roots.nu_minus,
        lower_ok=bool(np.all(gap_lo >= -slack)),
        upper_ok=bool(np.all(gap_hi >= -slack)),
        worst_lower=float(gap_lo.min()), worst_upper=float(gap_hi.min()),
        n_checked=int(tt.size))


# --------------------------------------------------------------------------
# bundle


@dataclass(frozen=True)
class DiagnosticsBundle:
    monotone: MonotoneReport
    energy: EnergyReport
    decay: DecayReport
    identities: IdentityReport
    tail_bounds: tuple

    @property
    def passed(self):
        return (self.monotone.passed and self.energy.passed
                and self.decay.passed and self.identities.passed
                and all(r.passed for r in self.tail_bounds))

    def as_dict(self):
        return {
            "monotone": asdict(self.monotone),
            "energy": self.energy.as_dict(),
            "decay": self.decay.as_dict(),
            "identities": self.identities.as_dict(),
            "tail_bounds": [r.as_dict() for r in self.tail_bounds],
            "passed": self.passed,
        }


def run_all(traj, N, pq, t0=None):
    """Every check above at its default threshold."""
    mono = check_monotone(traj, t0=t0)
    energy = check_energy_dissipation(traj, N, pq)
    decay = fit_decay(traj, N)
    ident = check_identities(traj, N, pq, decay=decay)
    limit = (N - 1) ** 2 / 4.0
    tails = tuple(characteristic_tail_bound(traj, N, f * limit, pq)
                  for f in TAIL_EPS_FRACTIONS)
    return DiagnosticsBundle(mono, energy, decay, ident, tails)
