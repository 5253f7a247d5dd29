"""Pure-Python Dormand-Prince 5(4) kernel for the radial system.

Mirrors ``_kernel.pyx`` operation for operation so that both backends
produce the same trajectories up to libm rounding.  Used when the compiled
extension is unavailable or ``HYPERLANE_PURE_PYTHON`` is set.
"""

from math import sqrt, tanh

import numpy as np

# status codes shared with the compiled kernel
REACHED_END = 0
U_CROSSED = 1
V_CROSSED = 2
BLOWUP = 3
DECAY = 4
STEP_UNDERFLOW = 5
MAX_STEPS = 6

EV_CROSSING = 1
EV_BLOWUP = 2
EV_DECAY = 4

_EPS = 2.220446049250313e-16

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176,
                           -5103 / 18656)
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (-71 / 57600, 71 / 16695, -71 / 1920,
                          17253 / 339200, -22 / 525, 1 / 40)

# quartic dense-output coefficients, rows = stages 1..7 (stage 2 is zero)
P1 = (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
      -12715105075 / 11282082432)
P3 = (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
      87487479700 / 32700410799)
P4 = (0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
      -10690763975 / 1880347072)
P5 = (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
      701980252875 / 199316789632)
P6 = (0.0, -282668133 / 205662961, 2019193451 / 616988883,
      -1453857185 / 822651844)
P7 = (0.0, 40617522 / 29380423, -110615467 / 29380423,
      69997945 / 29380423)

SAFE = 0.9
BETA = 0.04
EXPO1 = 0.2 - BETA * 0.75
FAC_LO = 0.1    # step may grow by at most 1/FAC_LO
FAC_HI = 5.0    # and shrink by at most FAC_HI


def odd_pow(x, r):
    if x >= 0.0:
        return x ** r
    return -((-x) ** r)


def rhs(t, y, N, p, q):
    """Derivative of (u, u', v, v') at geodesic distance ``t > 0``."""
    c = (N - 1.0) / tanh(t)
    return (y[1], -c * y[1] - odd_pow(y[2], p),
            y[3], -c * y[3] - odd_pow(y[0], q))


def _f(t, u, du, v, dv, N1, p, q):
    c = N1 / tanh(t)
    if v >= 0.0:
        fv = v ** p
    else:
        fv = -((-v) ** p)
    if u >= 0.0:
        fu = u ** q
    else:
        fu = -((-u) ** q)
    return du, -c * du - fv, dv, -c * dv - fu


def _dense(i, y, K, h, theta):
    th2 = theta * theta
    th3 = th2 * theta
    th4 = th3 * theta
    s = 0.0
    for k, P in ((0, P1), (2, P3), (3, P4), (4, P5), (5, P6), (6, P7)):
        s += K[k][i] * (P[0] * theta + P[1] * th2 + P[2] * th3 + P[3] * th4)
    return y[i] + h * s


def _refine_root(i, y, K, h, t, rtol):
    # Illinois iteration on the dense interpolant of component i over [0, 1]
    lo, hi = 0.0, 1.0
    flo = y[i]
    fhi = _dense(i, y, K, h, 1.0)
    side = 0
    for _ in range(200):
        if abs(hi - lo) * abs(h) <= rtol * max(abs(t + lo * h), abs(h)):
            break
        if fhi != flo:
            mid = (lo * fhi - hi * flo) / (fhi - flo)
        else:
            mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            mid = 0.5 * (lo + hi)
        fm = _dense(i, y, K, h, mid)
        if fm > 0.0:
            lo, flo = mid, fm
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = mid, fm
            if side == 1:
                flo *= 0.5
            side = 1
    return hi


def _initial_step(t, y, f0, N1, p, q, direction, rtol, atol):
    d0 = 0.0
    d1 = 0.0
    for i in range(4):
        sc = atol + rtol * abs(y[i])
        d0 += (y[i] / sc) * (y[i] / sc)
        d1 += (f0[i] / sc) * (f0[i] / sc)
    d0 = sqrt(d0 / 4)
    d1 = sqrt(d1 / 4)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    y1 = [y[i] + direction * h0 * f0[i] for i in range(4)]
    f1 = _f(t + direction * h0, y1[0], y1[1], y1[2], y1[3], N1, p, q)
    d2 = 0.0
    for i in range(4):
        sc = atol + rtol * abs(y[i])
        d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc)
    d2 = sqrt(d2 / 4) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def integrate_kernel(N, p, q, t_start, y0, t_end, rtol, atol, events,
                     blowup, decay_level, record=True, max_steps=1000000):
    """Adaptive integration from ``t_start`` toward ``t_end``.

    Returns ``(ts, ys, status, t_event, n_accept, n_reject)``.  ``ys`` has
    shape (n, 4).  With ``record`` false only the first and last nodes are
    returned.
    """
    N1 = N - 1.0
    direction = 1.0 if t_end >= t_start else -1.0
    t = float(t_start)
    y = [float(y0[0]), float(y0[1]), float(y0[2]), float(y0[3])]
    ts = [t]
    ys = [tuple(y)]
    status = REACHED_END
    t_event = t_end
    n_acc = 0
    n_rej = 0
    if t == t_end:
        return np.array(ts), np.array(ys), status, t_event, 0, 0

    k1 = _f(t, y[0], y[1], y[2], y[3], N1, p, q)
    h = _initial_step(t, y, k1, N1, p, q, direction, rtol, atol)
    facold = 1e-4
    last_rejected = False
    while True:
        if n_acc + n_rej >= max_steps:
            status = MAX_STEPS
            t_event = t
            break
        if abs(h) < 16.0 * _EPS * max(abs(t), 1.0):
            status = STEP_UNDERFLOW
            t_event = t
            break
        hs = direction * h
        final = False
        if direction * (t + hs - t_end) >= 0.0:
            hs = t_end - t
            final = True

        u, du, v, dv = y
        k2 = _f(t + C2 * hs,
                u + hs * (A21 * k1[0]), du + hs * (A21 * k1[1]),
                v + hs * (A21 * k1[2]), dv + hs * (A21 * k1[3]), N1, p, q)
        k3 = _f(t + C3 * hs,
                u + hs * (A31 * k1[0] + A32 * k2[0]),
                du + hs * (A31 * k1[1] + A32 * k2[1]),
                v + hs * (A31 * k1[2] + A32 * k2[2]),
                dv + hs * (A31 * k1[3] + A32 * k2[3]), N1, p, q)
        k4 = _f(t + C4 * hs,
                u + hs * (A41 * k1[0] + A42 * k2[0] + A43 * k3[0]),
                du + hs * (A41 * k1[1] + A42 * k2[1] + A43 * k3[1]),
                v + hs * (A41 * k1[2] + A42 * k2[2] + A43 * k3[2]),
                dv + hs * (A41 * k1[3] + A42 * k2[3] + A43 * k3[3]),
                N1, p, q)
        k5 = _f(t + C5 * hs,
                u + hs * (A51 * k1[0] + A52 * k2[0] + A53 * k3[0]
                          + A54 * k4[0]),
                du + hs * (A51 * k1[1] + A52 * k2[1] + A53 * k3[1]
                           + A54 * k4[1]),
                v + hs * (A51 * k1[2] + A52 * k2[2] + A53 * k3[2]
                          + A54 * k4[2]),
                dv + hs * (A51 * k1[3] + A52 * k2[3] + A53 * k3[3]
                           + A54 * k4[3]), N1, p, q)
        k6 = _f(t + hs,
                u + hs * (A61 * k1[0] + A62 * k2[0] + A63 * k3[0]
                          + A64 * k4[0] + A65 * k5[0]),
                du + hs * (A61 * k1[1] + A62 * k2[1] + A63 * k3[1]
                           + A64 * k4[1] + A65 * k5[1]),
                v + hs * (A61 * k1[2] + A62 * k2[2] + A63 * k3[2]
                          + A64 * k4[2] + A65 * k5[2]),
                dv + hs * (A61 * k1[3] + A62 * k2[3] + A63 * k3[3]
                           + A64 * k4[3] + A65 * k5[3]), N1, p, q)
        yn = [y[i] + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                           + B5 * k5[i] + B6 * k6[i]) for i in range(4)]
        tn = t + hs
        k7 = _f(tn, yn[0], yn[1], yn[2], yn[3], N1, p, q)

        err = 0.0
        for i in range(4):
            e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                      + E6 * k6[i] + E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
            err += (e / sc) * (e / sc)
        err = sqrt(err / 4)

        if err != err:
            n_rej += 1
            h = abs(hs) * 0.1
            last_rejected = True
            continue

        fac11 = err ** EXPO1
        if err <= 1.0:
            fac = fac11 / facold ** BETA
            fac = max(FAC_LO, min(FAC_HI, fac / SAFE))
            h_new = abs(hs) / fac
            if last_rejected:
                h_new = min(h_new, abs(hs))
            facold = max(err, 1e-4)
            n_acc += 1
            last_rejected = False

            K = (k1, k2, k3, k4, k5, k6, k7)
            if events & EV_CROSSING:
                cu = y[0] > 0.0 and yn[0] <= 0.0
                cv = y[2] > 0.0 and yn[2] <= 0.0
                if cu or cv:
                    thu = _refine_root(0, y, K, hs, t, rtol) if cu else 2.0
                    thv = _refine_root(2, y, K, hs, t, rtol) if cv else 2.0
                    if thu <= thv:
                        status, th = U_CROSSED, thu
                    else:
                        status, th = V_CROSSED, thv
                    t_event = t + th * hs
                    ye = tuple(_dense(i, y, K, hs, th) for i in range(4))
                    ts.append(t_event)
                    ys.append(ye)
                    break
            t = tn
            y = yn
            k1 = k7
            if record or final:
                ts.append(t)
                ys.append(tuple(y))
            if events & EV_BLOWUP:
                if max(abs(y[0]), abs(y[1]), abs(y[2]), abs(y[3])) > blowup:
                    status = BLOWUP
                    t_event = t
                    break
            if events & EV_DECAY:
                if (max(abs(y[0]), abs(y[2])) < decay_level
                        and y[1] < 0.0 and y[3] < 0.0):
                    status = DECAY
                    t_event = t
                    break
            if final:
                status = REACHED_END
                t_event = t
                break
            h = h_new
        else:
            n_rej += 1
            h = abs(hs) / min(FAC_HI, fac11 / SAFE)
            last_rejected = True

    if status != U_CROSSED and status != V_CROSSED and ts[-1] != t:
        ts.append(t)
        ys.append(tuple(y))
    return np.array(ts), np.array(ys), status, t_event, n_acc, n_rej
