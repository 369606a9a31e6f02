# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integrator core: closed-form flow tensors and the RK5(4) loop.

Mirrors ``hcflow._core_py`` step for step; geometry ids and parameter packing
are documented there.
"""
import numpy as np

from libc.math cimport sqrt, fabs, isfinite, fmin, fmax

cdef double[7] _E = [71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                     -17253.0 / 339200, 22.0 / 525, -1.0 / 40]

cdef double[7][4] _P = [
    [1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799],
    [0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072],
    [0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632],
    [0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844],
    [0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423]]

cdef double[7][6] _A = [
    [0, 0, 0, 0, 0, 0],
    [1.0 / 5, 0, 0, 0, 0, 0],
    [3.0 / 40, 9.0 / 40, 0, 0, 0, 0],
    [44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0],
    [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0],
    [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0],
    [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84]]

STATUS_REACHED_TMAX = 0
STATUS_EXTINCT = 1
STATUS_FAILURE = 2

cdef double _SAFETY = 0.9
cdef double _ALPHA = 0.17
cdef double _BETA = 0.04


cdef inline void _closed_k(int geom, double p1, double p2, double x, double y,
                           double zre, double zim, double* out) nogil:
    cdef double u = zre * zre + zim * zim
    cdef double d = x * y - u
    cdef double d2 = d * d
    cdef double c, w, bb, a, b, q2
    if geom == 0:
        out[0] = 0.0; out[1] = 0.0; out[2] = 0.0; out[3] = 0.0
    elif geom == 1:
        out[0] = x * x * u / d2
        out[1] = u * u / d2
        w = x * x * y / d2
        out[2] = w * zre; out[3] = w * zim
    elif geom == 2:
        c = 1.0 + p1 * p1
        out[0] = (c * x * x * x * x + u * (2 * x * x + u)) / d2
        out[1] = (c * x * x * u + 2 * d2 + u * (y * y + 2 * u) - 2 * c * x * x * d) / d2
        w = x * (p1 * p1 * x * x + (x + y) * (x + y)) / d2
        out[2] = w * zre; out[3] = w * zim
    elif geom == 3:
        c = 1.0 + p1 * p1
        out[0] = (c * y * y * u - 2 * d2 + u * (x * x - 2 * u) - 2 * c * y * y * d) / d2
        out[1] = (p1 * p1 * y * y * y * y + (y * y - u) * (y * y - u)) / d2
        w = y * (p1 * p1 * y * y + (x - y) * (x - y)) / d2
        out[2] = w * zre; out[3] = w * zim
    elif geom == 4:
        out[0] = (y * y * u - 2 * y * y * d) / d2
        out[1] = y * y * y * y / d2
        w = y * y * y / d2
        out[2] = w * zre; out[3] = w * zim
    elif geom == 5:
        out[0] = (u * (x * x + y * y) - 2 * y * y * d) / d2
        out[1] = (y * y * y * y + u * u) / d2
        w = y * (x * x + y * y) / d2
        out[2] = w * zre; out[3] = w * zim
    elif geom == 6:
        a = p1; b = p2
        bb = b * b + 9 * a * a
        out[0] = x * x * u * bb / d2
        out[1] = ((a * a + b * b) * u * u + 16 * a * a * x * y * u
                  - 8 * a * a * x * x * y * y) / d2
        w = x * x * y * bb / d2
        out[2] = w * zre; out[3] = w * zim
    elif geom == 7:
        q2 = zim * zim
        out[0] = -3.0 + 4 * u * q2 / d2
        out[1] = 4 * y * y * q2 / d2
        out[2] = 4 * y * zre * q2 / d2
        out[3] = 4 * y * zim * (x * y - zre * zre) / d2
    else:
        q2 = zim * zim
        out[0] = -3.0 + (4 * u * q2 - 2 * y * y * d + y * y * u) / d2
        out[1] = y * y * (4 * q2 + y * y) / d2
        out[2] = (4 * y * zre * q2 + y * y * y * zre) / d2
        out[3] = (4 * y * zim * (x * y - zre * zre) + y * y * y * zim) / d2


cdef inline void _rhs(int geom, double p1, double p2, double* s, double* out) nogil:
    cdef double k[4]
    _closed_k(geom, p1, p2, s[0], s[1], s[2], s[3], k)
    out[0] = -k[0]; out[1] = -k[1]; out[2] = -k[2]; out[3] = -k[3]


def closed_k(int geom, double p1, double p2, double x, double y, double zre, double zim):
    cdef double out[4]
    _closed_k(geom, p1, p2, x, y, zre, zim, out)
    return out[0], out[1], out[2], out[3]


def closed_rhs(int geom, double p1, double p2, state):
    cdef double s[4]
    cdef double out[4]
    s[0] = state[0]; s[1] = state[1]; s[2] = state[2]; s[3] = state[3]
    _rhs(geom, p1, p2, s, out)
    return out[0], out[1], out[2], out[3]


cdef inline double _monitor(double* s, double isx, double isy, double isd) nogil:
    cdef double d = s[0] * s[1] - (s[2] * s[2] + s[3] * s[3])
    cdef double m = s[0] * isx
    cdef double my = s[1] * isy
    cdef double md = d * isd
    if my < m:
        m = my
    if md < m:
        m = md
    return m


cdef inline int _finite4(double* v) nogil:
    return isfinite(v[0]) and isfinite(v[1]) and isfinite(v[2]) and isfinite(v[3])


cdef inline void _dense_coeff(double k[7][4], double h, double q[4][4]) nogil:
    cdef int c, j, s
    cdef double acc
    for c in range(4):
        for j in range(4):
            acc = 0.0
            for s in range(7):
                acc += k[s][c] * _P[s][j]
            q[c][j] = acc * h

cdef inline void _dense_eval(double* y0, double q[4][4], double theta, double* out) nogil:
    cdef double p1 = theta, p2 = theta * theta
    cdef double p3 = p2 * theta, p4 = p3 * theta
    cdef int c
    for c in range(4):
        out[c] = y0[c] + q[c][0] * p1 + q[c][1] * p2 + q[c][2] * p3 + q[c][3] * p4


cdef void _emit(list rows, int geom, double p1, double p2, double tt, double* s):
    cdef double f[4]
    _rhs(geom, p1, p2, s, f)
    rows.append((tt, s[0], s[1], s[2], s[3], f[0], f[1], f[2], f[3]))


def run_closed_flow(int geom, double p1, double p2, state0, double t_max,
                    double rel_tol, double abs_tol, double stride,
                    double threshold, long max_steps=1_000_000):
    """Compiled twin of ``hcflow._core_py.run_closed_flow``."""
    cdef double y0[4]
    cdef double y1[4]
    cdef double ys[4]
    cdef double f0[4]
    cdef double yend[4]
    cdef double k[7][4]
    cdef double q[4][4]
    cdef double m_hist[12]
    cdef int n_hist = 0
    cdef int c, s, j, it
    cdef double isx, isy, isd, m0, m1, t, t1, h, err, e, scale, err_prev
    cdef double factor, lo, hi, mid, theta, t_end, ts
    cdef long n_acc = 0, n_rej = 0
    cdef bint bad, extinct, decreasing
    cdef long next_sample = 1

    for c in range(4):
        y0[c] = state0[c]
    isx = 1.0 / y0[0]; isy = 1.0 / y0[1]; isd = isx * isy

    rows = []

    m0 = _monitor(y0, isx, isy, isd)
    _emit(rows, geom, p1, p2, 0.0, y0)
    if t_max <= 0.0:
        return STATUS_REACHED_TMAX, None, np.array(rows, dtype=float), 0, 0, m0

    _rhs(geom, p1, p2, y0, f0)
    if not _finite4(f0):
        return STATUS_FAILURE, None, np.array(rows, dtype=float), 0, 0, m0

    h = _initial_step(geom, p1, p2, y0, f0, t_max, rel_tol, abs_tol)
    t = 0.0
    err_prev = 1.0
    m_hist[0] = m0; n_hist = 1
    for c in range(4):
        k[0][c] = f0[c]

    while t < t_max:
        if t_max - t < h:
            h = t_max - t
        # underflow floor relative to current time (see the python twin)
        if h < 1e-14 * fabs(t) + 1e-200:
            decreasing = n_hist >= 11
            if decreasing:
                for j in range(n_hist - 11, n_hist - 1):
                    if m_hist[j] <= m_hist[j + 1]:
                        decreasing = False
                        break
            if m_hist[n_hist - 1] < 1e-6 and decreasing:
                _emit(rows, geom, p1, p2, t, y0)
                return (STATUS_EXTINCT, t, np.array(rows, dtype=float),
                        n_acc, n_rej, m_hist[n_hist - 1])
            return (STATUS_FAILURE, None, np.array(rows, dtype=float),
                    n_acc, n_rej, m_hist[n_hist - 1])
        if n_acc + n_rej >= max_steps:
            return (STATUS_FAILURE, None, np.array(rows, dtype=float),
                    n_acc, n_rej, m_hist[n_hist - 1])

        bad = False
        for s in range(1, 7):
            for c in range(4):
                ys[c] = y0[c]
            for j in range(s):
                if _A[s][j] != 0.0:
                    for c in range(4):
                        ys[c] += h * _A[s][j] * k[j][c]
            _rhs(geom, p1, p2, ys, k[s])
            if not _finite4(k[s]):
                bad = True
                break
        if not bad:
            for c in range(4):
                y1[c] = ys[c]
            err = 0.0
            for c in range(4):
                e = 0.0
                for s in range(7):
                    e += _E[s] * k[s][c]
                e *= h
                scale = abs_tol + rel_tol * fmax(fabs(y0[c]), fabs(y1[c]))
                err += (e / scale) * (e / scale)
            err = sqrt(err / 4.0)
        if bad or not isfinite(err):
            n_rej += 1
            h *= 0.25
            continue
        if err > 1.0:
            n_rej += 1
            h *= fmin(0.7, fmax(0.1, _SAFETY * err ** (-0.2)))
            continue

        n_acc += 1
        t1 = t + h
        m1 = _monitor(y1, isx, isy, isd)

        extinct = m1 < threshold
        t_end = t1
        _dense_coeff(k, h, q)
        if extinct:
            lo = 0.0; hi = 1.0
            for it in range(60):
                mid = 0.5 * (lo + hi)
                _dense_eval(y0, q, mid, yend)
                if _monitor(yend, isx, isy, isd) < threshold:
                    hi = mid
                else:
                    lo = mid
            theta = hi
            t_end = t + theta * h
            _dense_eval(y0, q, theta, yend)

        while next_sample * stride <= t_end + 1e-12 * fmax(1.0, t_end):
            ts = next_sample * stride
            if ts > t_end:
                ts = t_end
            theta = (ts - t) / h
            if theta < 0.0:
                theta = 0.0
            elif theta > 1.0:
                theta = 1.0
            _dense_eval(y0, q, theta, ys)
            _emit(rows, geom, p1, p2, ts, ys)
            next_sample += 1

        if extinct:
            if len(rows) == 0 or rows[len(rows) - 1][0] < t_end - 1e-15:
                _emit(rows, geom, p1, p2, t_end, yend)
            return (STATUS_EXTINCT, t_end, np.array(rows, dtype=float),
                    n_acc, n_rej, _monitor(yend, isx, isy, isd))

        if n_hist == 12:
            for j in range(11):
                m_hist[j] = m_hist[j + 1]
            n_hist = 11
        m_hist[n_hist] = m1
        n_hist += 1

        t = t1
        for c in range(4):
            y0[c] = y1[c]
            k[0][c] = k[6][c]

        if err == 0.0:
            factor = 10.0
        else:
            factor = _SAFETY * err ** (-_ALPHA) * err_prev ** _BETA
            factor = fmin(10.0, fmax(0.2, factor))
        h *= factor
        err_prev = fmax(err, 1e-10)

    if len(rows) == 0 or rows[len(rows) - 1][0] < t_max - 1e-15:
        _emit(rows, geom, p1, p2, t_max, y0)
    return (STATUS_REACHED_TMAX, None, np.array(rows, dtype=float),
            n_acc, n_rej, m_hist[n_hist - 1])


cdef double _initial_step(int geom, double p1, double p2, double* y0, double* f0,
                          double t_max, double rel_tol, double abs_tol):
    cdef double sc[4]
    cdef double y1[4]
    cdef double f1[4]
    cdef double d0 = 0, d1 = 0, d2 = 0, h0, h1
    cdef int c
    for c in range(4):
        sc[c] = abs_tol + rel_tol * fabs(y0[c])
        d0 += (y0[c] / sc[c]) ** 2
        d1 += (f0[c] / sc[c]) ** 2
    d0 = sqrt(d0 / 4.0); d1 = sqrt(d1 / 4.0)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = fmin(h0, t_max)
    for c in range(4):
        y1[c] = y0[c] + h0 * f0[c]
    _rhs(geom, p1, p2, y1, f1)
    if _finite4(f1):
        for c in range(4):
            d2 += ((f1[c] - f0[c]) / sc[c]) ** 2
        d2 = sqrt(d2 / 4.0) / h0
    else:
        d2 = d1
    if fmax(d1, d2) <= 1e-15:
        h1 = fmax(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / fmax(d1, d2)) ** 0.2
    return fmin(fmin(100 * h0, h1), t_max)
