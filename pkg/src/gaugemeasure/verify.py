"""Self-check suites: one callable per module, printing measured values.

These are runtime diagnostics behind the ``verify`` CLI command; the
pytest suite asserts the same properties with frozen oracle values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import covering, distortion, dynamics, linearizer, logtransform, mittag


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    measured: str


def _res(suite, name, passed, measured):
    return CheckResult(suite=suite, name=name, passed=bool(passed), measured=measured)


def verify_linearizer() -> list:
    out = []
    for lam in (0.05, 0.1, 0.2, 0.3):
        spec = linearizer.make_gauge(lam, gamma=1.0)
        beta = spec.beta
        worst = 0.0
        for x in (beta + 0.1, beta + 0.5, 10.0, 1e3, 1e6, 1e8):
            lhs = linearizer.phi_log(spec, x + math.log(lam))
            rhs = beta * linearizer.phi(spec, x)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
        out.append(_res("linearizer", f"functional-equation lam={lam}",
                        worst <= 1e-8, f"max residual {worst:.3e}"))
    spec = linearizer.make_gauge(0.1, gamma=1.0)
    beta = spec.beta
    a2 = spec.series.coeffs[2]
    closed = 1.0 / (2.0 * (beta - 1.0))
    out.append(_res("linearizer", "a2 closed form",
                    abs(a2 - closed) <= 1e-10, f"|a2 - 1/(2(beta-1))| = {abs(a2-closed):.3e}"))
    resid = max(abs(r) for r in spec.series.recurrence_residuals())
    out.append(_res("linearizer", "series recurrence residual",
                    resid <= 1e-10, f"max coefficient residual {resid:.3e}"))
    xs = [beta + 0.1 * 1.5 ** k for k in range(40)]
    vals = [linearizer.phi(spec, x) for x in xs]
    mono = all(b > a for a, b in zip(vals, vals[1:]))
    out.append(_res("linearizer", "phi strictly increasing", mono,
                    f"{len(xs)} samples"))
    # gauge functions are increasing on their small-t interval only: h(1/beta)
    # returns to 0 with phi, so the turn sits below 1/beta for gamma > 0
    ts = np.geomspace(1e-9, 0.1 / beta, 64)
    spec2 = linearizer.make_gauge(0.1, gamma=2.0)
    hs = [linearizer.gauge_h(spec2, float(t)) for t in ts]
    mono_h = all(b > a for a, b in zip(hs, hs[1:]))
    out.append(_res("linearizer", "gauge_h strictly increasing on the gauge interval",
                    mono_h, f"{len(hs)} samples up to t = {ts[-1]:.4g}"))
    d1 = linearizer.phi(spec, beta + 1e-4) / 1e-4
    d2 = linearizer.phi(spec, beta + 1e-6) / 1e-6
    out.append(_res("linearizer", "phi'(beta) -> 1",
                    abs(d1 - 1.0) < 1e-3 and abs(d2 - 1.0) < 1e-5,
                    f"slopes {d1:.8f}, {d2:.8f}"))
    # growth slower than logs along orbits: log of phi(E^n(x0))/log(E^n(x0))
    # decreases, using phi(E^n(x0)) = beta^n phi(x0) and
    # log log E^n(x0) ~ log E^{n-1}(x0) once the cascade explodes
    x0 = 10.0
    log_phi0 = math.log(linearizer.phi(spec, x0))
    lx = math.log(0.1) + x0            # log E(x0)
    llx = math.log(lx)                 # log log E(x0)
    log_ratios = []
    for n in range(1, 4):
        log_ratios.append(n * math.log(beta) + log_phi0 - llx)
        llx = lx if lx > 50.0 else math.log(math.log(0.1) + math.exp(lx))
        lx = math.log(0.1) + math.exp(lx) if lx < 700.0 else math.inf
    slow = all(b < a for a, b in zip(log_ratios, log_ratios[1:]))
    out.append(_res("linearizer", "phi grows slower than log along orbits", slow,
                    f"log ratios {['%.4g' % r for r in log_ratios]}"))
    return out


def verify_mittag() -> list:
    out = []
    worst = 0.0
    for k in range(100):
        r = 10.0 * (k % 10 + 1) / 10.0
        th = -math.pi / 2 + math.pi * (k // 10) / 9.0
        z = complex(r * math.cos(th), r * math.sin(th))
        ref = np.exp(z)
        err = abs(mittag.ml_series(1.0, z) - ref) / abs(ref)
        worst = max(worst, err)
    out.append(_res("mittag", "series vs e^z (rho=1, Re z >= 0)",
                    worst <= 1e-10, f"max rel err {worst:.3e}"))
    worst = 0.0
    for k in range(50):
        x = 20.0 * (k + 1) / 50.0
        ref = math.cosh(math.sqrt(x))
        err = abs(mittag.ml_series(0.5, complex(x, 0.0)).real - ref) / ref
        worst = max(worst, err)
    out.append(_res("mittag", "series vs cosh(sqrt(z)) (rho=1/2)",
                    worst <= 1e-10, f"max rel err {worst:.3e}"))
    p = mittag.ml_params(3.0)
    seam = p.r_switch
    zs = [seam * 0.98, seam * 0.999]
    worst = 0.0
    for r in zs:
        z = complex(r, 0.0)
        series_lm = p.log_a + math.log(abs(mittag.ml_series(p.rho, z)))
        sector_lm = p.log_a + math.log(p.rho) + r ** p.rho
        worst = max(worst, abs(series_lm - sector_lm) / abs(sector_lm))
    out.append(_res("mittag", "series/sector seam consistency (rho=3)",
                    worst <= 0.05, f"max rel log-gap {worst:.3e}"))
    pc = mittag.calibrated_params(2.0)
    fam = dynamics.ScaledMittagLeffler(pc)
    worst = -math.inf
    spec = mittag.SectorSpec(rho=2.0)
    sampled = 0
    for u in np.linspace(math.log(pc.R) + 0.2, math.log(pc.R) + 2.0, 8):
        for v in np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False):
            w = complex(float(u), float(v))
            if not mittag.sector_contains(spec, w):
                continue
            sampled += 1
            worst = max(worst, logtransform.transform_value(fam, w)[0])
    out.append(_res("mittag", "no tract value inside the avoided band",
                    worst <= 0.0, f"max log-modulus {worst:.3e} over {sampled} pts"))
    # derivative of the log transform against rho * e^(rho Re w)
    worst = 0.0
    for u in (1.9, 2.1, 2.3):
        w = complex(u, 0.05)
        fp = logtransform.transform_derivative(fam, w, step=1e-7)
        ratio = abs(fp) / (pc.rho * math.exp(pc.rho * u))
        worst = max(worst, abs(ratio - 1.0))
    out.append(_res("mittag", "tract derivative ratio within 10%",
                    worst <= 0.1, f"max |ratio-1| = {worst:.3e}"))
    box = covering.Square(center=complex(0.0, 0.0), side=1000.0)
    for rho in (1.0, 2.0, 5.0):
        spec = mittag.SectorSpec(rho=rho)
        squares = mittag.sector_square_packing(spec, box)
        dens = sum(s.area for s in squares) / box.area
        target = (1.0 - 1.0 / (2.0 * rho)) - mittag.PACKING_EPS
        out.append(_res("mittag", f"band packing density rho={rho}",
                        dens >= target, f"density {dens:.4f} >= {target:.4f}"))
    return out


def verify_logtransform() -> list:
    out = []
    params = linearizer.solve_fixed_points(0.1)
    fam = dynamics.Exponential(params)
    grid = logtransform.tract_scan(fam, (0.0, 4.0, -math.pi, math.pi), 256, 256)
    consistent = bool(np.all((grid.ref > 0.0) == grid.in_tract))
    out.append(_res("logtransform", "mask consistency in_tract == (ReF > 0)",
                    consistent, f"{grid.nx}x{grid.ny} cells"))
    grid2 = logtransform.tract_scan(fam, (0.0, 4.0, -math.pi + 2 * math.pi, math.pi + 2 * math.pi), 256, 256)
    agree = float(np.mean(grid.in_tract == grid2.in_tract))
    out.append(_res("logtransform", "2 pi periodicity of the mask",
                    agree >= 0.99, f"agreement {agree:.4f}"))
    zs = [complex(1.0 + 99.0 * k / 999.0, (k % 7 - 3.0) * 2.0) for k in range(1000)]
    zs = [z for z in zs if z.real > 1.0]
    worst = logtransform.expansion_bound_check(fam, zs)
    out.append(_res("logtransform", "inverse-branch expansion bound (exp)",
                    worst <= 1.0, f"max normalized {worst:.4f}"))
    psis = [logtransform.exp_psi_closed_form(0.1, 0.3, r) for r in (50, 100, 400, 1600)]
    mono = all(b > a for a, b in zip(psis, psis[1:])) and psis[-1] < math.pi
    out.append(_res("logtransform", "psi increases toward pi (exp closed form)",
                    mono, f"psi {['%.4f' % p for p in psis]}"))
    lhs, rhs = logtransform.ab_integral_check(fam, 0.3, 0.5, 50.0, 800.0)
    out.append(_res("logtransform", "tract-width integral below log log M + C",
                    lhs - rhs <= 1.0, f"lhs {lhs:.4f}, rhs {rhs:.4f}"))
    return out


def verify_covering() -> list:
    out = []
    spec0 = linearizer.make_gauge(0.1, gamma=0.0)
    mask = covering.BoolGrid(bbox=(0.0, 1.0, 0.0, 1.0), cells=np.ones((256, 256), bool))
    rep, _ = covering.mesh_cover(mask, 0.125)
    gs = covering.gauged_sum(rep, spec0)
    expected = rep.count * 2.0 * 0.125 ** 2
    out.append(_res("covering", "gamma=0 gauged sum equals 2*count*scale^2",
                    abs(gs - expected) <= 1e-12, f"{gs} vs {expected}"))
    params = linearizer.solve_fixed_points(0.2)
    seq = covering.R_sequence(params, 3.0 * params.beta / 0.2, 3)
    ok = True
    checked = 0
    for k in range(1, len(seq.log_values)):
        prev = seq.values[k - 1]
        if prev is None or 0.2 * prev > 1e12:
            # beyond this the log-2 bracket falls below float resolution
            break
        checked += 1
        ok &= seq.log_values[k] >= 0.2 * prev - 1e-9
        ok &= seq.log_values[k] - 0.2 * prev < math.log(2.0) + 1e-9
    out.append(_res("covering", "doubling cascade brackets e^(lam R)",
                    ok and checked >= 2,
                    f"{checked} resolvable steps, "
                    f"log values {['%.4g' % v for v in seq.log_values]}"))
    rs = covering.r_sequence(10.0, 100.0, 4 * math.pi + 0.1, 8 * math.pi, 0.1, 6)
    vals = [v for v in rs.values if v is not None]
    dec = all(b < a for a, b in zip(vals[1:], vals[2:]))
    out.append(_res("covering", "mesh cascade strictly decreasing after n=1",
                    dec, f"first values {['%.3e' % v for v in vals[:4]]}"))
    spec = linearizer.make_gauge(0.1, gamma=1.0)
    gstar = covering.gamma_threshold_lower(2.0, 0.01, spec.series.params)
    up = linearizer.make_gauge(0.1, gamma=1.2 * gstar)
    dn = linearizer.make_gauge(0.1, gamma=0.8 * gstar)
    beta = spec.beta
    deltas = [0.01 / 2.0] * 20
    p_up = covering.mcmullen_product_orbit(up, 2.0 * beta, deltas)
    p_dn = covering.mcmullen_product_orbit(dn, 2.0 * beta, deltas)
    inc = all(b > a for a, b in zip(p_up[2:], p_up[3:]))
    dec = all(b < a for a, b in zip(p_dn[2:], p_dn[3:]))
    out.append(_res("covering", "nesting product dichotomy at the gamma threshold",
                    inc and dec, f"gamma* = {gstar:.4f}"))
    rng = np.random.default_rng(7)
    reqs = [(complex(x, y), s) for x, y, s in
            zip(rng.uniform(0, 100, 400), rng.uniform(0, 100, 400),
                rng.uniform(0.1, 10, 400))]
    chosen, overlap = covering.besicovitch_cover(reqs)
    covers = all(any(sq.contains_point(c, closed=True) for sq in chosen)
                 for c, _ in reqs)
    out.append(_res("covering", "greedy cover hits all centers with overlap <= 16",
                    covers and overlap <= covering.N0_IMPL,
                    f"kept {len(chosen)}, overlap {overlap}"))
    return out


def verify_distortion() -> list:
    out = []
    worst = 0.0
    for f, z0, r in ((np.exp, 1.0 + 0.2j, 0.3),
                     (distortion.koebe_map, 0.0j, 0.6),
                     (lambda z: 2.0 * z + 1.0, 0.0j, 1.0)):
        pts = distortion.disk_samples(z0, 0.8 * r, 120)
        d0 = abs(distortion.fd_derivative(f, z0, 1e-7 * r))
        bad = 0.0
        for z in pts:
            s = abs(z - z0)
            lo, hi = distortion.koebe_derivative_bounds(r, d0, s)
            m = abs(distortion.fd_derivative(f, z, 1e-7 * r))
            bad = max(bad, lo / m - 1.0 if m < lo else (m / hi - 1.0 if m > hi else 0.0))
        worst = max(worst, bad)
    out.append(_res("distortion", "derivative sandwich on the test corpus",
                    worst <= 0.01, f"max excursion {worst:.3e}"))
    worst = 0.0
    for f in (distortion.koebe_map,
              lambda z: z / (1.0 - 0.8 * z),
              lambda z: np.exp(z) - 1.0):
        for k in range(16):
            t = 2.0 * math.pi * k / 16
            z = 0.02 * complex(math.cos(t), math.sin(t))
            worst = max(worst, abs(f(z) / z - 1.0))
    out.append(_res("distortion", "normalized maps stay within 10% of identity "
                    "below radius 0.02", worst < 0.1, f"max |f(z)/z - 1| = {worst:.4f}"))
    l_m, l_b, d_m, d_b = distortion.lemma_first_check(
        lambda z: z / (1.0 - z / 3.0), 0.0j, 1.0, 3.0)
    out.append(_res("distortion", "Mobius bounds ((K+1)/(K-1))^4,6 at K=3",
                    l_m <= l_b and d_m <= d_b,
                    f"L {l_m:.3f} <= {l_b:.0f}, D {d_m:.3f} <= {d_b:.0f}"))
    quad = covering.Square(center=1.0 + 0.0j, side=0.05)
    inner, outer, contained, contains = distortion.square_image_frames(
        np.exp, quad, eps=0.1, kprime=100.0)
    out.append(_res("distortion", "image frames for e^z on a small square",
                    contained and contains,
                    f"inner side {inner.side:.4g}, outer side {outer.side:.4g}"))
    cells = np.ones((32, 32), bool)
    a = np.zeros_like(cells)
    a[:16, :] = True
    ug = covering.BoolGrid(bbox=(0.0, 0.5, 0.0, 0.5), cells=cells)
    ag = covering.BoolGrid(bbox=(0.0, 0.5, 0.0, 0.5), cells=a)
    lhs, rhs = distortion.density_transfer_check(np.exp, ag, ug)
    out.append(_res("distortion", "density transfer dens(A,U) <= L^2 dens(fA,fU)",
                    lhs <= rhs * 1.05, f"lhs {lhs:.4f}, rhs {rhs:.4f}"))
    return out


SUITES = {
    "linearizer": verify_linearizer,
    "mittag": verify_mittag,
    "logtransform": verify_logtransform,
    "covering": verify_covering,
    "distortion": verify_distortion,
}


def run_suite(name: str) -> list:
    if name == "all":
        results = []
        for fn in SUITES.values():
            results.extend(fn())
        return results
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name]()
