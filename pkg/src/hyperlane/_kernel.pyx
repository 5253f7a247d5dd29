# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) kernel for the radial system.

Same algorithm, constants and status codes as ``_pykernel``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, tanh, pow

cnp.import_array()

cdef int REACHED_END = 0
cdef int U_CROSSED = 1
cdef int V_CROSSED = 2
cdef int BLOWUP = 3
cdef int DECAY = 4
cdef int STEP_UNDERFLOW = 5
cdef int MAX_STEPS = 6

cdef int EV_CROSSING = 1
cdef int EV_BLOWUP = 2
cdef int EV_DECAY = 4

cdef double _EPS = 2.220446049250313e-16

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187
cdef double A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247
cdef double A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192
cdef double B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = -71.0 / 57600, E3 = 71.0 / 16695, E4 = -71.0 / 1920
cdef double E5 = 17253.0 / 339200, E6 = -22.0 / 525, E7 = 1.0 / 40

cdef double[7][4] P
P[0][:] = [1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608,
           -12715105075.0 / 11282082432]
P[1][:] = [0.0, 0.0, 0.0, 0.0]
P[2][:] = [0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933,
           87487479700.0 / 32700410799]
P[3][:] = [0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304,
           -10690763975.0 / 1880347072]
P[4][:] = [0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408,
           701980252875.0 / 199316789632]
P[5][:] = [0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883,
           -1453857185.0 / 822651844]
P[6][:] = [0.0, 40617522.0 / 29380423, -110615467.0 / 29380423,
           69997945.0 / 29380423]

cdef double SAFE = 0.9
cdef double BETA = 0.04
cdef double EXPO1 = 0.2 - 0.04 * 0.75
cdef double FAC_LO = 0.1
cdef double FAC_HI = 5.0


cdef inline double _odd_pow(double x, double r) nogil:
    if x >= 0.0:
        return pow(x, r)
    return -pow(-x, r)


cdef inline void _f(double t, const double* y, double N1, double p, double q,
                    double* out) nogil:
    cdef double c = N1 / tanh(t)
    out[0] = y[1]
    out[1] = -c * y[1] - _odd_pow(y[2], p)
    out[2] = y[3]
    out[3] = -c * y[3] - _odd_pow(y[0], q)


cdef double _dense(int i, const double* y, double[7][4] K, double h,
                   double theta) nogil:
    cdef double th2 = theta * theta
    cdef double th3 = th2 * theta
    cdef double th4 = th3 * theta
    cdef double s = 0.0
    cdef int k
    for k in range(7):
        if k == 1:
            continue
        s += K[k][i] * (P[k][0] * theta + P[k][1] * th2 + P[k][2] * th3
                        + P[k][3] * th4)
    return y[i] + h * s


cdef double _refine_root(int i, const double* y, double[7][4] K, double h,
                         double t, double rtol) nogil:
    cdef double lo = 0.0, hi = 1.0
    cdef double flo = y[i]
    cdef double fhi = _dense(i, y, K, h, 1.0)
    cdef double mid, fm
    cdef int side = 0, it
    for it in range(200):
        if fabs(hi - lo) * fabs(h) <= rtol * max(fabs(t + lo * h), fabs(h)):
            break
        if fhi != flo:
            mid = (lo * fhi - hi * flo) / (fhi - flo)
        else:
            mid = 0.5 * (lo + hi)
        if not (lo < mid and mid < hi):
            mid = 0.5 * (lo + hi)
        fm = _dense(i, y, K, h, mid)
        if fm > 0.0:
            lo = mid
            flo = fm
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi = mid
            fhi = fm
            if side == 1:
                flo *= 0.5
            side = 1
    return hi


cdef double _initial_step(double t, const double* y, const double* f0,
                          double N1, double p, double q, double direction,
                          double rtol, double atol) nogil:
    cdef double d0 = 0.0, d1 = 0.0, d2 = 0.0, sc, h0, h1
    cdef double y1[4]
    cdef double f1[4]
    cdef int i
    for i in range(4):
        sc = atol + rtol * fabs(y[i])
        d0 += (y[i] / sc) * (y[i] / sc)
        d1 += (f0[i] / sc) * (f0[i] / sc)
    d0 = sqrt(d0 / 4)
    d1 = sqrt(d1 / 4)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    for i in range(4):
        y1[i] = y[i] + direction * h0 * f0[i]
    _f(t + direction * h0, y1, N1, p, q, f1)
    for i in range(4):
        sc = atol + rtol * fabs(y[i])
        d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc)
    d2 = sqrt(d2 / 4) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = pow(0.01 / max(d1, d2), 0.2)
    return min(100 * h0, h1)


def integrate_kernel(double N, double p, double q, double t_start, y0,
                     double t_end, double rtol, double atol, int events,
                     double blowup, double decay_level, bint record=True,
                     long max_steps=1000000):
    """Adaptive integration from ``t_start`` toward ``t_end``.

    Returns ``(ts, ys, status, t_event, n_accept, n_reject)``.
    """
    cdef double N1 = N - 1.0
    cdef double direction = 1.0 if t_end >= t_start else -1.0
    cdef double t = t_start
    cdef double y[4]
    cdef double yn[4]
    cdef double tmp[4]
    cdef double[7][4] K
    cdef double h, hs, tn, err, e, sc, fac, fac11, h_new, facold, th, thu, thv
    cdef double t_event = t_end
    cdef int status = REACHED_END
    cdef long n_acc = 0, n_rej = 0
    cdef bint final, last_rejected, cu, cv
    cdef int i, k
    cdef Py_ssize_t n = 0, cap = 1024 if record else 4

    for i in range(4):
        y[i] = y0[i]

    ts_arr = np.empty(cap, dtype=np.float64)
    ys_arr = np.empty((cap, 4), dtype=np.float64)
    cdef double[::1] ts_v = ts_arr
    cdef double[:, ::1] ys_v = ys_arr

    ts_v[0] = t
    for i in range(4):
        ys_v[0, i] = y[i]
    n = 1
    if t == t_end:
        return ts_arr[:1].copy(), ys_arr[:1].copy(), status, t_event, 0, 0

    _f(t, y, N1, p, q, K[0])
    h = _initial_step(t, y, K[0], N1, p, q, direction, rtol, atol)
    facold = 1e-4
    last_rejected = False
    while True:
        if n_acc + n_rej >= max_steps:
            status = MAX_STEPS
            t_event = t
            break
        if fabs(h) < 16.0 * _EPS * max(fabs(t), 1.0):
            status = STEP_UNDERFLOW
            t_event = t
            break
        hs = direction * h
        final = False
        if direction * (t + hs - t_end) >= 0.0:
            hs = t_end - t
            final = True

        for i in range(4):
            tmp[i] = y[i] + hs * (A21 * K[0][i])
        _f(t + C2 * hs, tmp, N1, p, q, K[1])
        for i in range(4):
            tmp[i] = y[i] + hs * (A31 * K[0][i] + A32 * K[1][i])
        _f(t + C3 * hs, tmp, N1, p, q, K[2])
        for i in range(4):
            tmp[i] = y[i] + hs * (A41 * K[0][i] + A42 * K[1][i]
                                  + A43 * K[2][i])
        _f(t + C4 * hs, tmp, N1, p, q, K[3])
        for i in range(4):
            tmp[i] = y[i] + hs * (A51 * K[0][i] + A52 * K[1][i]
                                  + A53 * K[2][i] + A54 * K[3][i])
        _f(t + C5 * hs, tmp, N1, p, q, K[4])
        for i in range(4):
            tmp[i] = y[i] + hs * (A61 * K[0][i] + A62 * K[1][i]
                                  + A63 * K[2][i] + A64 * K[3][i]
                                  + A65 * K[4][i])
        _f(t + hs, tmp, N1, p, q, K[5])
        for i in range(4):
            yn[i] = y[i] + hs * (B1 * K[0][i] + B3 * K[2][i] + B4 * K[3][i]
                                 + B5 * K[4][i] + B6 * K[5][i])
        tn = t + hs
        _f(tn, yn, N1, p, q, K[6])

        err = 0.0
        for i in range(4):
            e = hs * (E1 * K[0][i] + E3 * K[2][i] + E4 * K[3][i]
                      + E5 * K[4][i] + E6 * K[5][i] + E7 * K[6][i])
            sc = atol + rtol * max(fabs(y[i]), fabs(yn[i]))
            err += (e / sc) * (e / sc)
        err = sqrt(err / 4)

        if err != err:
            n_rej += 1
            h = fabs(hs) * 0.1
            last_rejected = True
            continue

        fac11 = pow(err, EXPO1)
        if err <= 1.0:
            fac = fac11 / pow(facold, BETA)
            fac = max(FAC_LO, min(FAC_HI, fac / SAFE))
            h_new = fabs(hs) / fac
            if last_rejected:
                h_new = min(h_new, fabs(hs))
            facold = max(err, 1e-4)
            n_acc += 1
            last_rejected = False

            if events & EV_CROSSING:
                cu = y[0] > 0.0 and yn[0] <= 0.0
                cv = y[2] > 0.0 and yn[2] <= 0.0
                if cu or cv:
                    thu = _refine_root(0, y, K, hs, t, rtol) if cu else 2.0
                    thv = _refine_root(2, y, K, hs, t, rtol) if cv else 2.0
                    if thu <= thv:
                        status = U_CROSSED
                        th = thu
                    else:
                        status = V_CROSSED
                        th = thv
                    t_event = t + th * hs
                    for i in range(4):
                        tmp[i] = _dense(i, y, K, hs, th)
                    if n >= cap:
                        cap *= 2
                        ts_arr = np.resize(ts_arr, cap)
                        ys_arr = np.resize(ys_arr, (cap, 4))
                        ts_v = ts_arr
                        ys_v = ys_arr
                    ts_v[n] = t_event
                    for i in range(4):
                        ys_v[n, i] = tmp[i]
                    n += 1
                    break
            t = tn
            for i in range(4):
                y[i] = yn[i]
                K[0][i] = K[6][i]
            if record or final:
                if n >= cap:
                    cap *= 2
                    ts_arr = np.resize(ts_arr, cap)
                    ys_arr = np.resize(ys_arr, (cap, 4))
                    ts_v = ts_arr
                    ys_v = ys_arr
                ts_v[n] = t
                for i in range(4):
                    ys_v[n, i] = y[i]
                n += 1
            if events & EV_BLOWUP:
                if max(max(fabs(y[0]), fabs(y[1])),
                       max(fabs(y[2]), fabs(y[3]))) > blowup:
                    status = BLOWUP
                    t_event = t
                    break
            if events & EV_DECAY:
                if (max(fabs(y[0]), fabs(y[2])) < decay_level
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
            h = fabs(hs) / min(FAC_HI, fac11 / SAFE)
            last_rejected = True

    if status != U_CROSSED and status != V_CROSSED and ts_v[n - 1] != t:
        if n >= cap:
            cap *= 2
            ts_arr = np.resize(ts_arr, cap)
            ys_arr = np.resize(ys_arr, (cap, 4))
            ts_v = ts_arr
            ys_v = ys_arr
        ts_v[n] = t
        for i in range(4):
            ys_v[n, i] = y[i]
        n += 1
    return (ts_arr[:n].copy(), ys_arr[:n].copy(), status, t_event,
            n_acc, n_rej)
