# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid kernels.

Mirror of ``_pure`` with identical arithmetic order; compiled with plain
-O2 (no fast-math, no fused multiply-add) so results match the fallback
bit for bit.  Escape codes: 0 = undecided, 1 = bounded, 2 = escaping.
"""

from libc.math cimport INFINITY, NAN, atan2, cos, exp, fabs, log, sin, sqrt

cdef double OVERFLOW_EXP = 700.0
cdef double PI = 3.141592653589793


cdef int _ml_series(double zr, double zi, const double[::1] ratios,
                    double tol, int cap,
                    double* out_r, double* out_i, int* out_n) nogil:
    cdef double sr = 1.0, si = 0.0, cr = 0.0, ci = 0.0
    cdef double tr = 1.0, ti = 0.0
    cdef double pr, pi, rn, yr, yi, t2, mt, ms
    cdef double bound = 0.5 * tol
    cdef int small = 0
    cdef int n = 0
    while n < cap:
        pr = tr * zr - ti * zi
        pi = tr * zi + ti * zr
        rn = ratios[n]
        tr = pr * rn
        ti = pi * rn
        n += 1
        yr = tr - cr
        t2 = sr + yr
        cr = (t2 - sr) - yr
        sr = t2
        yi = ti - ci
        t2 = si + yi
        ci = (t2 - si) - yi
        si = t2
        mt = fabs(tr) + fabs(ti)
        ms = fabs(sr) + fabs(si)
        if mt - mt != 0.0 or ms - ms != 0.0:
            out_r[0] = sr
            out_i[0] = si
            out_n[0] = n
            return 0
        if mt <= bound * ms:
            small += 1
            if small >= 5:
                out_r[0] = sr
                out_i[0] = si
                out_n[0] = n
                return 1
        else:
            small = 0
    out_r[0] = sr
    out_i[0] = si
    out_n[0] = n
    return 0


def ml_series_point(double zr, double zi, const double[::1] ratios,
                    double tol, int cap):
    """Series sum with gamma-ratio term recurrence; see _pure for contract."""
    cdef double sr = 0.0, si = 0.0
    cdef int n = 0
    cdef int ok
    ok = _ml_series(zr, zi, ratios, tol, cap, &sr, &si, &n)
    return sr, si, n, ok


def exp_ref_rows(double log_lam, double x0, double dx, double y0, double dy,
                 int nx, int r0, int r1, double[:, ::1] ref):
    cdef int i, j
    cdef double u, v, cv
    with nogil:
        for i in range(r0, r1):
            v = y0 + (i + 0.5) * dy
            cv = cos(v)
            for j in range(nx):
                u = x0 + (j + 0.5) * dx
                if u > OVERFLOW_EXP:
                    ref[i, j] = INFINITY if cv > 0.0 else -INFINITY
                else:
                    ref[i, j] = log_lam + exp(u) * cv


def ml_ref_rows(double rho, double log_a, const double[::1] ratios,
                double log_r_switch, double delta, double tol, int cap,
                double x0, double dx, double y0, double dy,
                int nx, int r0, int r1, double[:, ::1] ref, int[::1] fails):
    cdef int i, j, ok, nfail
    cdef int nterms = 0
    cdef double u, v, theta, az, zr, zi, sr, si, s2, e, c
    cdef double half = PI / (2.0 * rho) + delta
    cdef double log_rho = log(rho)
    with nogil:
        for i in range(r0, r1):
            v = y0 + (i + 0.5) * dy
            theta = atan2(sin(v), cos(v))
            nfail = 0
            for j in range(nx):
                u = x0 + (j + 0.5) * dx
                if u <= log_r_switch:
                    az = exp(u)
                    zr = az * cos(v)
                    zi = az * sin(v)
                    ok = _ml_series(zr, zi, ratios, tol, cap, &sr, &si, &nterms)
                    if ok == 0:
                        ref[i, j] = NAN
                        nfail += 1
                        continue
                    s2 = sr * sr + si * si
                    if s2 == 0.0:
                        ref[i, j] = -INFINITY
                    else:
                        ref[i, j] = log_a + 0.5 * log(s2)
                elif fabs(theta) <= half:
                    e = rho * u
                    c = cos(rho * theta)
                    if e > OVERFLOW_EXP:
                        ref[i, j] = INFINITY if c > 0.0 else -INFINITY
                    else:
                        ref[i, j] = log_a + log_rho + exp(e) * c
                else:
                    ref[i, j] = log_a
            fails[i] = nfail


cdef int _exp_escape_point(double x, double y, double lam, double q,
                           double bailout, int n_max) nogil:
    cdef double mp1 = -1.0, mp2 = -1.0
    cdef double m, dxq, ex, nxr, nyr
    cdef int n = 0
    while True:
        m = sqrt(x * x + y * y)
        if m > bailout:
            if (mp1 < 0.0 or m > mp1) and (mp2 < 0.0 or mp1 > mp2):
                return 2
            return 0
        dxq = x - q
        if dxq * dxq + y * y < 1e-12:
            return 1
        if n >= n_max:
            return 0
        if x > OVERFLOW_EXP:
            if mp1 < 0.0 or m > mp1:
                return 2
            return 0
        ex = lam * exp(x)
        nxr = ex * cos(y)
        nyr = ex * sin(y)
        mp2 = mp1
        mp1 = m
        x = nxr
        y = nyr
        n += 1


def exp_escape_rows(double lam, double q, double bailout, int n_max,
                    double x0, double dx, double y0, double dy,
                    int nx, int r0, int r1, unsigned char[:, ::1] out):
    cdef int i, j
    cdef double y0c
    with nogil:
        for i in range(r0, r1):
            y0c = y0 + (i + 0.5) * dy
            for j in range(nx):
                out[i, j] = <unsigned char>_exp_escape_point(
                    x0 + (j + 0.5) * dx, y0c, lam, q, bailout, n_max)


cdef int _ml_escape_point(double x, double y, double rho, double log_a,
                          const double[::1] ratios, double log_r_switch,
                          double delta, double tol, int cap,
                          double bailout, int n_max) nogil:
    cdef double half = PI / (2.0 * rho) + delta
    cdef double log_rho = log(rho)
    cdef double r_switch = exp(log_r_switch)
    cdef double mp1 = -1.0, mp2 = -1.0
    cdef double m, sr, si, s2, lm, sc, nxr, nyr, theta, e, c, w, arg, mag
    cdef int n = 0, ok
    cdef int nterms = 0
    while True:
        m = sqrt(x * x + y * y)
        if m > bailout:
            if (mp1 < 0.0 or m > mp1) and (mp2 < 0.0 or mp1 > mp2):
                return 2
            return 0
        if n >= n_max:
            return 0
        if m <= r_switch:
            ok = _ml_series(x, y, ratios, tol, cap, &sr, &si, &nterms)
            if ok == 0:
                return 0
            s2 = sr * sr + si * si
            if s2 == 0.0:
                nxr = 0.0
                nyr = 0.0
            else:
                lm = log_a + 0.5 * log(s2)
                if lm > OVERFLOW_EXP:
                    if mp1 < 0.0 or m > mp1:
                        return 2
                    return 0
                sc = exp(lm) / sqrt(s2)
                nxr = sc * sr
                nyr = sc * si
        else:
            theta = atan2(y, x)
            if fabs(theta) > half:
                return 0
            e = rho * log(m)
            c = cos(rho * theta)
            if e > OVERFLOW_EXP:
                if c > 0.0:
                    if mp1 < 0.0 or m > mp1:
                        return 2
                    return 0
                nxr = 0.0
                nyr = 0.0
            else:
                w = exp(e)
                lm = log_a + log_rho + w * c
                if lm > OVERFLOW_EXP:
                    if mp1 < 0.0 or m > mp1:
                        return 2
                    return 0
                arg = w * sin(rho * theta)
                mag = exp(lm)
                nxr = mag * cos(arg)
                nyr = mag * sin(arg)
        mp2 = mp1
        mp1 = m
        x = nxr
        y = nyr
        n += 1


def ml_escape_rows(double rho, double log_a, const double[::1] ratios,
                   double log_r_switch, double delta, double tol, int cap,
                   double bailout, int n_max,
                   double x0, double dx, double y0, double dy,
                   int nx, int r0, int r1, unsigned char[:, ::1] out):
    cdef int i, j
    cdef double y0c
    with nogil:
        for i in range(r0, r1):
            y0c = y0 + (i + 0.5) * dy
            for j in range(nx):
                out[i, j] = <unsigned char>_ml_escape_point(
                    x0 + (j + 0.5) * dx, y0c, rho, log_a, ratios,
                    log_r_switch, delta, tol, cap, bailout, n_max)
