"""Radial form of the Lane-Emden system on H^N and its initial-value problem.

For radial ``u(t), v(t)`` the system reads::

    u'' + (N-1) coth(t) u' + |v|^(p-1) v = 0
    v'' + (N-1) coth(t) v' + |u|^(q-1) u = 0,      u'(0) = v'(0) = 0.

The coefficient ``coth t`` is singular at the pole, so integration starts
from a short series expansion at ``t0 > 0``.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import _backend as kb
from .errors import DomainError, InputError, IntegrationError


@dataclass(frozen=True)
class ExponentPair:
    p: float
    q: float

    def __post_init__(self):
        for name in ("p", "q"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 1):
                raise DomainError(f"exponent {name} must be finite and > 1, got {val!r}")


class RadialState(NamedTuple):
    t: float
    u: float
    du: float
    v: float
    dv: float


@dataclass(frozen=True)
class IntegratorControls:
    """Tolerances and stopping rules for :func:`integrate`.

    ``decay_margin`` is relative: Decay fires once ``max(|u|, |v|)`` drops
    below ``decay_margin * max(a, b)`` with both slopes negative.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    t0: float = 1e-3
    T_max: float = 60.0
    blowup_threshold: float = 1e6
    decay_margin: float = 1e-8

    def __post_init__(self):
        if not (0 < self.t0 <= 0.1):
            raise InputError(f"t0 must lie in (0, 0.1], got {self.t0}")
        if not self.T_max > self.t0:
            raise InputError(f"T_max must exceed t0, got {self.T_max}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InputError("tolerances must be positive")
        if not self.blowup_threshold > 1:
            raise InputError("blowup_threshold must exceed 1")
        if not self.decay_margin > 0:
            raise InputError("decay_margin must be positive")

    def tightened(self, factor, t0_factor=1.0):
        """Copy with both tolerances divided by ``factor``."""
        return replace(self, rel_tol=self.rel_tol / factor,
                       abs_tol=self.abs_tol / factor,
                       t0=self.t0 / t0_factor)


class Outcome(enum.Enum):
    DECAY = "decay"
    U_CROSSED = "u_crossed"
    V_CROSSED = "v_crossed"
    BLOWUP = "blowup"
    UNDETERMINED = "undetermined"


_STATUS_TO_OUTCOME = {
    kb.REACHED_END: Outcome.UNDETERMINED,
    kb.U_CROSSED: Outcome.U_CROSSED,
    kb.V_CROSSED: Outcome.V_CROSSED,
    kb.BLOWUP: Outcome.BLOWUP,
    kb.DECAY: Outcome.DECAY,
}


@dataclass(frozen=True)
class ShootingOutcome:
    """Classification of one shot with the time at which it was decided.

    ``t`` is T_reached for Decay, the crossing time for U/V crossings, the
    detection time for Blowup and T_max for Undetermined.
    """

    kind: Outcome
    t: float

    @property
    def is_crossing(self):
        return self.kind in (Outcome.U_CROSSED, Outcome.V_CROSSED)

    @property
    def stays_positive(self):
        return self.kind in (Outcome.DECAY, Outcome.UNDETERMINED)

    def __str__(self):
        return f"{self.kind.value}@{self.t:.6g}"


@dataclass(frozen=True)
class Trajectory:
    """Accepted integrator nodes ``t`` with states ``y = (u, u', v, v')``."""

    t: np.ndarray
    y: np.ndarray
    rel_tol: float
    abs_tol: float
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        y = np.asarray(self.y, dtype=float).reshape(-1, 4)
        if t.shape[0] != y.shape[0]:
            raise InputError("trajectory times and states differ in length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise InputError("trajectory times must be strictly increasing")
        t.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.t.size

    @property
    def u(self):
        return self.y[:, 0]

    @property
    def du(self):
        return self.y[:, 1]

    @property
    def v(self):
        return self.y[:, 2]

    @property
    def dv(self):
        return self.y[:, 3]

    def state(self, i):
        return RadialState(float(self.t[i]), *map(float, self.y[i]))

    @property
    def states(self):
        return [self.state(i) for i in range(len(self))]

    def to_csv(self, path=None):
        """Write ``t,u,du,v,dv`` rows with 17 significant digits.

        Returns the text when ``path`` is None.
        """
        buf = io.StringIO()
        buf.write("t,u,du,v,dv\n")
        for ti, row in zip(self.t, self.y):
            buf.write(",".join(f"{x:.17g}" for x in (ti, *row)) + "\n")
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
        return None

    @classmethod
    def from_csv(cls, path, rel_tol=float("nan"), abs_tol=float("nan")):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1:5], rel_tol, abs_tol)


def odd_pow(x, r):
    """``|x|^(r-1) x``; works on scalars and arrays."""
    if np.ndim(x) == 0:
        x = float(x)
        return x ** r if x >= 0 else -((-x) ** r)
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** r


def _check_state(s):
    if not all(math.isfinite(x) for x in s):
        raise InputError(f"non-finite state {s}")


def rhs(s, N, pq):
    """``(u', u'', v', v'')`` at state ``s``; singular at ``t = 0``."""
    _check_state(s)
    if s.t == 0:
        raise DomainError("rhs is singular at t = 0; start from taylor_start")
    if s.t < 0:
        raise DomainError("geodesic distance must be positive")
    c = (N - 1) / math.tanh(s.t)
    return (s.du, -c * s.du - odd_pow(s.v, pq.p),
            s.dv, -c * s.dv - odd_pow(s.u, pq.q))


def taylor_start(a, b, N, pq, t0):
    """State at ``t0`` from the even series about the pole.

    Uses ``coth t = 1/t + O(t)``, which gives ``u''(0) = -odd_pow(b, p)/N``.
    """
    if not (0 < t0 <= 0.1):
        raise InputError(f"t0 must lie in (0, 0.1], got {t0}")
    fb = odd_pow(b, pq.p)
    fa = odd_pow(a, pq.q)
    return RadialState(t0, a - fb * t0 * t0 / (2 * N), -fb * t0 / N,
                       b - fa * t0 * t0 / (2 * N), -fa * t0 / N)


def _trajectory(ts, ys, rel_tol, abs_tol, n_acc, n_rej):
    return Trajectory(ts, ys, rel_tol, abs_tol,
                      meta={"n_accept": int(n_acc), "n_reject": int(n_rej),
                            "backend": kb.BACKEND})


def _series_crossing(a, b, N, pq, ctl):
    # the series start itself may already be past a zero for lopsided data
    s = taylor_start(a, b, N, pq, ctl.t0)
    tu = math.sqrt(2 * N * a / odd_pow(b, pq.p)) if s.u <= 0 else math.inf
    tv = math.sqrt(2 * N * b / odd_pow(a, pq.q)) if s.v <= 0 else math.inf
    if tu == tv == math.inf:
        return None
    kind = Outcome.U_CROSSED if tu <= tv else Outcome.V_CROSSED
    tc = min(tu, tv)
    st = taylor_start(a, b, N, pq, max(tc, 1e-300))
    traj = Trajectory([tc], [st[1:]], ctl.rel_tol, ctl.abs_tol,
                      meta={"n_accept": 0, "n_reject": 0, "series_only": True})
    return traj, ShootingOutcome(kind, tc)


def integrate(a, b, N, pq, ctl=None, record=True):
    """Shoot from ``(u(0), v(0)) = (a, b)`` and classify the first event.

    Events are checked after each accepted step in this order:

    * a sign change of ``u`` or ``v``; the earlier refined root wins and an
      exact tie reports ``U_CROSSED``
    * ``max(|u|,|v|,|u'|,|v'|)`` above the blow-up threshold
    * decay below ``decay_margin * max(a, b)`` with ``u', v' < 0``

    Reaching ``T_max`` first gives ``UNDETERMINED``.

    Returns
    -------
    (Trajectory, ShootingOutcome)
    """
    ctl = ctl or IntegratorControls()
    if not (math.isfinite(a) and math.isfinite(b) and a > 0 and b > 0):
        raise DomainError(f"initial values must be positive, got a={a}, b={b}")
    early = _series_crossing(a, b, N, pq, ctl)
    if early is not None:
        return early
    s0 = taylor_start(a, b, N, pq, ctl.t0)
    ts, ys, status, t_ev, n_acc, n_rej = kb.integrate_kernel(
        float(N), float(pq.p), float(pq.q), s0.t, s0[1:], float(ctl.T_max),
        ctl.rel_tol, ctl.abs_tol,
        kb.EV_CROSSING | kb.EV_BLOWUP | kb.EV_DECAY,
        ctl.blowup_threshold, ctl.decay_margin * max(a, b), bool(record))
    traj = _trajectory(ts, ys, ctl.rel_tol, ctl.abs_tol, n_acc, n_rej)
    if status not in _STATUS_TO_OUTCOME:
        raise IntegrationError(
            f"integration failed at t={t_ev:.6g} (status {status})", traj)
    return traj, ShootingOutcome(_STATUS_TO_OUTCOME[status], float(t_ev))


def propagate(state, t_end, N, pq, rel_tol, abs_tol, crossings=False):
    """Integrate a state to ``t_end`` (either direction), no stopping rules.

    With ``crossings`` set, a sign change of ``u`` or ``v`` stops the run
    and the returned outcome says which.
    """
    _check_state(state)
    if state.t <= 0 or t_end <= 0:
        raise DomainError("propagate needs t > 0 at both ends")
    ts, ys, status, t_ev, n_acc, n_rej = kb.integrate_kernel(
        float(N), float(pq.p), float(pq.q), float(state.t), state[1:],
        float(t_end), rel_tol, abs_tol,
        kb.EV_CROSSING if crossings else 0, math.inf, 0.0, True)
    if ts[-1] < ts[0]:
        ts, ys = ts[::-1], ys[::-1]
    traj = _trajectory(ts, ys, rel_tol, abs_tol, n_acc, n_rej)
    if status not in _STATUS_TO_OUTCOME:
        raise IntegrationError(
            f"integration failed at t={t_ev:.6g} (status {status})", traj)
    return traj, ShootingOutcome(_STATUS_TO_OUTCOME[status], float(t_ev))
