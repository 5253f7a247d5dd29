"""Independent reference shots with scipy's DOP853 at rtol 1e-12."""

import math

from scipy.integrate import solve_ivp


def _odd_pow(x, r):
    return math.copysign(abs(x) ** r, x)


def reference_shot(a, b, N, p, q, T=60.0, t0=1e-3, blowup=1e6):
    """First event of the radial shot: ('u'|'v'|'blowup'|'none', t, y_end)."""

    def f(t, y):
        c = (N - 1) / math.tanh(t)
        return [y[1], -c * y[1] - _odd_pow(y[2], p),
                y[3], -c * y[3] - _odd_pow(y[0], q)]

    def cross_u(t, y):
        return y[0]

    def cross_v(t, y):
        return y[2]

    def big(t, y):
        return max(abs(x) for x in y) - blowup

    for ev in (cross_u, cross_v, big):
        ev.terminal = True
    cross_u.direction = cross_v.direction = -1
    fb, fa = b ** p, a ** q
    y0 = [a - fb * t0 ** 2 / (2 * N), -fb * t0 / N,
          b - fa * t0 ** 2 / (2 * N), -fa * t0 / N]
    sol = solve_ivp(f, (t0, T), y0, method="DOP853", rtol=1e-12, atol=1e-14,
                    events=[cross_u, cross_v, big])
    tu, tv, tb = (e[0] if e.size else math.inf for e in sol.t_events)
    first = min(tu, tv, tb)
    if first == math.inf:
        return "none", float(sol.t[-1]), sol.y[:, -1]
    kind = "u" if tu == first else "v" if tv == first else "blowup"
    return kind, float(first), sol.y[:, -1]
