"""Pure-Python grid kernels.

These are the fallback implementations of the hot per-cell loops; the
compiled module ``_core`` mirrors them operation for operation.  Both
backends keep the arithmetic order identical (explicit real/imaginary
component formulas, compensated summation, shared precomputed gamma-ratio
tables) so that their outputs agree bit for bit on the same platform.

Escape codes: 0 = undecided, 1 = bounded, 2 = escaping.
"""

import math

OVERFLOW_EXP = 700.0  # exp() argument guard; stays clear of the 709.78 limit


def ml_series_point(zr, zi, ratios, tol, cap):
    """Power-series value sum z^n / Gamma(n/rho + 1) at z = zr + i*zi.

    ``ratios[n]`` must hold Gamma(n/rho+1)/Gamma((n+1)/rho+1) so the terms
    follow t_{n+1} = t_n * z * ratios[n].  Accumulation is Kahan-compensated.
    Stops once the term 1-norm falls below tol/2 times the partial-sum
    1-norm for 5 consecutive terms (1-norms avoid squaring overflow);
    non-finite intermediates return converged = 0.

    Returns (sum_re, sum_im, terms_used, converged).
    """
    if hasattr(ratios, "tolist"):
        ratios = ratios.tolist()
    sr = 1.0
    si = 0.0
    cr = 0.0
    ci = 0.0
    tr = 1.0
    ti = 0.0
    bound = 0.5 * tol
    small = 0
    n = 0
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
        mt = abs(tr) + abs(ti)
        ms = abs(sr) + abs(si)
        if mt - mt != 0.0 or ms - ms != 0.0:
            return sr, si, n, 0
        if mt <= bound * ms:
            small += 1
            if small >= 5:
                return sr, si, n, 1
        else:
            small = 0
    return sr, si, n, 0


def exp_ref_rows(log_lam, x0, dx, y0, dy, nx, r0, r1, ref):
    """Re F = log(lam) + Re(e^w) for the exponential family on grid rows [r0, r1)."""
    for i in range(r0, r1):
        v = y0 + (i + 0.5) * dy
        cv = math.cos(v)
        for j in range(nx):
            u = x0 + (j + 0.5) * dx
            if u > OVERFLOW_EXP:
                ref[i, j] = math.inf if cv > 0.0 else -math.inf
            else:
                ref[i, j] = log_lam + math.exp(u) * cv


def ml_ref_rows(rho, log_a, ratios, log_r_switch, delta, tol, cap,
                x0, dx, y0, dy, nx, r0, r1, ref, fails):
    """Re F = log|a f_rho(e^w)| on grid rows [r0, r1).

    Branches: series for |e^w| <= r_switch, sector asymptotic inside the
    widened sector beyond it, and the bounded-modulus bound log(a) outside.
    Failed series cells are written as NaN and counted in fails[row].
    """
    half = math.pi / (2.0 * rho) + delta
    log_rho = math.log(rho)
    rlist = ratios.tolist() if hasattr(ratios, "tolist") else ratios
    for i in range(r0, r1):
        v = y0 + (i + 0.5) * dy
        theta = math.atan2(math.sin(v), math.cos(v))
        nfail = 0
        for j in range(nx):
            u = x0 + (j + 0.5) * dx
            if u <= log_r_switch:
                az = math.exp(u)
                zr = az * math.cos(v)
                zi = az * math.sin(v)
                sr, si, _, ok = ml_series_point(zr, zi, rlist, tol, cap)
                if not ok:
                    ref[i, j] = math.nan
                    nfail += 1
                    continue
                s2 = sr * sr + si * si
                if s2 == 0.0:
                    ref[i, j] = -math.inf
                else:
                    ref[i, j] = log_a + 0.5 * math.log(s2)
            elif abs(theta) <= half:
                e = rho * u
                c = math.cos(rho * theta)
                if e > OVERFLOW_EXP:
                    ref[i, j] = math.inf if c > 0.0 else -math.inf
                else:
                    ref[i, j] = log_a + log_rho + math.exp(e) * c
            else:
                ref[i, j] = log_a
        fails[i] = nfail


def exp_escape_rows(lam, q, bailout, n_max, x0, dx, y0, dy, nx, r0, r1, out):
    """Escape classification of z -> lam*e^z on grid rows [r0, r1)."""
    for i in range(r0, r1):
        y0c = y0 + (i + 0.5) * dy
        for j in range(nx):
            out[i, j] = _exp_escape_point(x0 + (j + 0.5) * dx, y0c,
                                          lam, q, bailout, n_max)


def _exp_escape_point(x, y, lam, q, bailout, n_max):
    mp1 = -1.0
    mp2 = -1.0
    n = 0
    while True:
        m = math.sqrt(x * x + y * y)
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
            # next modulus lam*e^x certainly exceeds the bailout
            if mp1 < 0.0 or m > mp1:
                return 2
            return 0
        ex = lam * math.exp(x)
        nxr = ex * math.cos(y)
        nyr = ex * math.sin(y)
        mp2 = mp1
        mp1 = m
        x = nxr
        y = nyr
        n += 1


def ml_escape_rows(rho, log_a, ratios, log_r_switch, delta, tol, cap,
                   bailout, n_max, x0, dx, y0, dy, nx, r0, r1, out):
    """Escape classification of z -> a*f_rho(z) on grid rows [r0, r1)."""
    ratios = ratios.tolist() if hasattr(ratios, "tolist") else ratios
    for i in range(r0, r1):
        y0c = y0 + (i + 0.5) * dy
        for j in range(nx):
            out[i, j] = _ml_escape_point(x0 + (j + 0.5) * dx, y0c, rho, log_a,
                                         ratios, log_r_switch, delta, tol, cap,
                                         bailout, n_max)


def _ml_escape_point(x, y, rho, log_a, ratios, log_r_switch, delta, tol, cap,
                     bailout, n_max):
    half = math.pi / (2.0 * rho) + delta
    log_rho = math.log(rho)
    r_switch = math.exp(log_r_switch)
    mp1 = -1.0
    mp2 = -1.0
    n = 0
    while True:
        m = math.sqrt(x * x + y * y)
        if m > bailout:
            if (mp1 < 0.0 or m > mp1) and (mp2 < 0.0 or mp1 > mp2):
                return 2
            return 0
        if n >= n_max:
            return 0
        if m <= r_switch:
            sr, si, _, ok = ml_series_point(x, y, ratios, tol, cap)
            if not ok:
                return 0
            s2 = sr * sr + si * si
            if s2 == 0.0:
                nxr = 0.0
                nyr = 0.0
            else:
                lm = log_a + 0.5 * math.log(s2)
                if lm > OVERFLOW_EXP:
                    if mp1 < 0.0 or m > mp1:
                        return 2
                    return 0
                sc = math.exp(lm) / math.sqrt(s2)
                nxr = sc * sr
                nyr = sc * si
        else:
            theta = math.atan2(y, x)
            if abs(theta) > half:
                # value is bounded in the unit disk but its position is not
                # resolvable here; leave the point unclassified
                return 0
            e = rho * math.log(m)
            c = math.cos(rho * theta)
            if e > OVERFLOW_EXP:
                if c > 0.0:
                    if mp1 < 0.0 or m > mp1:
                        return 2
                    return 0
                nxr = 0.0
                nyr = 0.0
            else:
                w = math.exp(e)
                lm = log_a + log_rho + w * c
                if lm > OVERFLOW_EXP:
                    if mp1 < 0.0 or m > mp1:
                        return 2
                    return 0
                arg = w * math.sin(rho * theta)
                mag = math.exp(lm)
                nxr = mag * math.cos(arg)
                nyr = mag * math.sin(arg)
        mp2 = mp1
        mp1 = m
        x = nxr
        y = nyr
        n += 1
