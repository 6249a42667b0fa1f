"""Logarithmic-coordinate tract analysis.

F = log o f o exp maps each logarithmic tract conformally onto the right
half plane; only Re F = log|f(e^w)| is needed for the measure-theoretic
pipeline, so no global branch bookkeeping is done.  Grids are scanned in
row blocks with per-cell results independent of the thread count.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels, mittag
from .dynamics import Exponential, FamilyMember, max_modulus, run_row_blocks
from .errors import DomainError, PreconditionError
from .linearizer import ExpParams

_OVERFLOW_EXP = 700.0


def exp_tract_F(params: ExpParams, w: complex) -> complex:
    """Logarithmic transform of the exponential family: F(w) = log(lam) + e^w.

    Defined on the log-plane tract Re(e^w) > log(1/lam); Re F(w) equals
    log|lam * exp(e^w)| there.
    """
    w = complex(w)
    if w.real > _OVERFLOW_EXP:
        raise DomainError("Re w too large to materialize e^w")
    ew = complex(math.exp(w.real) * math.cos(w.imag),
                 math.exp(w.real) * math.sin(w.imag))
    if ew.real <= math.log(1.0 / params.lam):
        raise DomainError(f"w={w} outside the logarithmic tract of the exponential map")
    return complex(math.log(params.lam) + ew.real, ew.imag)


@dataclass(frozen=True)
class TractGrid:
    """Rectangular sample grid in log coordinates.

    ``ref[i, j]`` holds Re F = log|f(e^w)| at the cell center, ``in_tract``
    is exactly ref > 0, and failed evaluations are NaN cells counted in
    ``eval_failures``.
    """

    bbox: tuple
    nx: int
    ny: int
    ref: np.ndarray
    eval_failures: int = 0

    @property
    def in_tract(self) -> np.ndarray:
        return self.ref > 0.0

    @property
    def dx(self) -> float:
        return (self.bbox[1] - self.bbox[0]) / self.nx

    @property
    def dy(self) -> float:
        return (self.bbox[3] - self.bbox[2]) / self.ny

    def cell_centers(self):
        x0, _, y0, _ = self.bbox
        xs = x0 + (np.arange(self.nx) + 0.5) * self.dx
        ys = y0 + (np.arange(self.ny) + 0.5) * self.dy
        return xs, ys

    def to_pgm_bytes(self) -> bytes:
        """P5 image, 255 = in-tract cells, top row = highest Im w."""
        img = np.where(self.in_tract, 255, 0).astype(np.uint8)[::-1, :]
        header = f"P5\n{self.nx} {self.ny}\n255\n".encode("ascii")
        return header + img.tobytes()

    def to_csv(self, path) -> None:
        xs, ys = self.cell_centers()
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["w_re", "w_im", "in_tract", "ReF"])
            mask = self.in_tract
            for i in range(self.ny):
                for j in range(self.nx):
                    wr.writerow([repr(float(xs[j])), repr(float(ys[i])),
                                 int(mask[i, j]), repr(float(self.ref[i, j]))])


def tract_scan(f: FamilyMember, bbox: tuple, nx: int, ny: int,
               threads: int = 1) -> TractGrid:
    """Per-cell Re F over the bbox via overflow-safe evaluation at exp(center)."""
    if nx < 16 or ny < 16:
        raise PreconditionError("tract scans need at least 16x16 resolution")
    x0, x1, y0, y1 = bbox
    if not (x1 > x0 and y1 > y0):
        raise PreconditionError("bbox must be nonempty")
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    ref = np.empty((ny, nx), dtype=np.float64)
    fails = np.zeros(ny, dtype=np.int32)
    if isinstance(f, Exponential):
        log_lam = math.log(f.params.lam)

        def worker(r0, r1):
            _kernels.exp_ref_rows(log_lam, x0, dx, y0, dy, nx, r0, r1, ref)
    else:
        p = f.params
        ratios = mittag.term_ratio_table(p.rho)
        log_rs = math.log(p.r_switch)

        def worker(r0, r1):
            _kernels.ml_ref_rows(p.rho, p.log_a, ratios, log_rs, p.delta,
                                 mittag.SERIES_TOL, mittag.MAX_TERMS,
                                 x0, dx, y0, dy, nx, r0, r1, ref, fails)

    run_row_blocks(ny, threads, worker)
    n_fail = int(fails.sum())
    if n_fail:
        warnings.warn(f"{n_fail} cells failed series evaluation and were "
                      "marked outside the tract", stacklevel=2)
    return TractGrid(bbox=tuple(bbox), nx=nx, ny=ny, ref=ref, eval_failures=n_fail)


def transform_value(f: FamilyMember, w: complex) -> tuple[float, float]:
    """(Re F, arg-part of F) at w, log-space safe.

    The imaginary part is reported modulo 2*pi; derivative estimates use
    local differences of it, never a global branch.
    """
    if isinstance(f, Exponential):
        v = exp_tract_F(f.params, w)
        return v.real, v.imag
    w = complex(w)
    if w.real > _OVERFLOW_EXP:
        raise DomainError("Re w too large to materialize e^w")
    az = math.exp(w.real)
    z = complex(az * math.cos(w.imag), az * math.sin(w.imag))
    lv = mittag.ml_eval(f.params, z)
    return lv.log_mod, lv.arg


def transform_derivative(f: FamilyMember, w: complex, step: float = 1e-6) -> complex:
    """F'(w) by a central difference along the real direction.

    The imaginary increment is taken modulo 2*pi, which is exact for
    |F'|*step below pi; keep the step small relative to the local scale.
    """
    re_p, im_p = transform_value(f, w + step)
    re_m, im_m = transform_value(f, w - step)
    d_im = math.remainder(im_p - im_m, 2.0 * math.pi)
    return complex((re_p - re_m) / (2.0 * step), d_im / (2.0 * step))


def expansion_bound_check(f: FamilyMember, samples: Sequence[complex],
                          tract_points: Sequence[complex] | None = None) -> float:
    """max over samples of |(F^{-1})'(zeta)| * Re(zeta) / (4*pi); contract <= 1.

    For the exponential family the inverse branch derivative has the
    closed form 1/(zeta - log lam).  For other families pass the tract
    points w with F(w) = zeta so the derivative can be taken as 1/F'(w)
    by finite differences.
    """
    worst = 0.0
    if isinstance(f, Exponential):
        log_lam = math.log(f.params.lam)
        for zeta in samples:
            zeta = complex(zeta)
            if zeta.real <= 1.0:
                raise PreconditionError(f"sample {zeta} has Re <= 1")
            g = 1.0 / abs(zeta - log_lam)
            worst = max(worst, g * zeta.real / (4.0 * math.pi))
        return worst
    if tract_points is None:
        raise PreconditionError("finite-difference check needs the tract points w")
    for w in tract_points:
        re_f, _ = transform_value(f, w)
        if re_f <= 1.0:
            raise PreconditionError(f"tract point {w} maps to Re F <= 1")
        fp = transform_derivative(f, w)
        if fp == 0:
            raise DomainError(f"vanishing F' at {w}")
        worst = max(worst, (1.0 / abs(fp)) * re_f / (4.0 * math.pi))
    return worst


def angular_measure_psi(f: FamilyMember, beta_exp: float, r: float,
                        n_theta: int = 1024) -> float:
    """psi(r): angular measure of {t : log|f(r e^{it})| >= r^beta_exp}.

    Angle sampling at n_theta equispaced points, log-space thresholds.
    """
    if not (0.0 < beta_exp < 0.5):
        raise PreconditionError("beta_exp must lie in (0, 1/2)")
    if n_theta < 256:
        raise PreconditionError("n_theta must be >= 256")
    thr = r ** beta_exp
    count = 0
    if isinstance(f, Exponential):
        log_lam = math.log(f.params.lam)
        for k in range(n_theta):
            t = 2.0 * math.pi * k / n_theta
            if log_lam + r * math.cos(t) >= thr:
                count += 1
    else:
        p = f.params
        for k in range(n_theta):
            t = 2.0 * math.pi * k / n_theta
            z = complex(r * math.cos(t), r * math.sin(t))
            if mittag.ml_log_modulus(p, z) >= thr:
                count += 1
    return 2.0 * math.pi * count / n_theta


def exp_psi_closed_form(lam: float, beta_exp: float, r: float) -> float:
    """Closed form for the exponential family: 2*arccos((r^beta - log lam)/r)."""
    c = (r ** beta_exp - math.log(lam)) / r
    if c > 1.0:
        return 0.0
    return 2.0 * math.acos(c)


@dataclass(frozen=True)
class AngularMeasureTable:
    """Tabulated psi(r) for one growth exponent beta_exp in (0, 1/2)."""

    r_values: tuple
    psi_values: tuple
    beta_exp: float

    def __post_init__(self):
        if not (0.0 < self.beta_exp < 0.5):
            raise DomainError("beta_exp must lie in (0, 1/2)")
        if any(not (0.0 <= p <= 2.0 * math.pi + 1e-12) for p in self.psi_values):
            raise DomainError("psi values must lie in [0, 2*pi]")


def angular_measure_table(f: FamilyMember, beta_exp: float,
                          r_values: Sequence[float],
                          n_theta: int = 1024) -> AngularMeasureTable:
    psis = tuple(angular_measure_psi(f, beta_exp, r, n_theta) for r in r_values)
    return AngularMeasureTable(r_values=tuple(r_values), psi_values=psis,
                               beta_exp=beta_exp)


def ab_integral_check(f: FamilyMember, beta_exp: float, kappa: float,
                      r0: float, r: float, n_nodes: int = 129,
                      n_theta: int = 1024) -> tuple[float, float]:
    """Tract-width integral against log log M.

    lhs = pi * integral_{r0}^{kappa r} dt/(t psi(t)) by trapezoid rule on
    log-spaced nodes; rhs = log log M(r, f).  The gap lhs - rhs stays
    bounded above along increasing r; the bounding constant is not pinned.
    Nodes with psi = 0 are dropped with a warning.
    """
    if not (0.0 < kappa < 1.0):
        raise PreconditionError("kappa must lie in (0, 1)")
    if r < r0 / kappa:
        raise PreconditionError("need r >= r0/kappa")
    if n_nodes < 9:
        raise PreconditionError("need at least 9 quadrature nodes")
    u0 = math.log(r0)
    u1 = math.log(kappa * r)
    us = [u0 + (u1 - u0) * k / (n_nodes - 1) for k in range(n_nodes)]
    vals = []
    for u in us:
        psi = angular_measure_psi(f, beta_exp, math.exp(u), n_theta)
        if psi == 0.0:
            warnings.warn(f"psi vanished at t={math.exp(u):.6g}; node dropped",
                          stacklevel=2)
            vals.append(None)
        else:
            vals.append(1.0 / psi)
    acc = 0.0
    for k in range(n_nodes - 1):
        a, b = vals[k], vals[k + 1]
        if a is None or b is None:
            continue
        acc += 0.5 * (a + b) * (us[k + 1] - us[k])
    lhs = math.pi * acc
    log_m = max_modulus(f, r, max(n_theta, 256))
    if log_m <= 0.0:
        raise DomainError("log M(r) <= 0; log log M undefined")
    return lhs, math.log(log_m)


def u_r_density(grid: TractGrid, threshold: float, qstar) -> float:
    """Density of {in-tract and Re F > threshold} among cells inside qstar."""
    x0, x1, y0, y1 = grid.bbox
    half = qstar.side / 2.0
    if qstar.angle == 0.0:
        eps = 1e-9 * max(abs(x1 - x0), abs(y1 - y0))
        qx0 = qstar.center.real - half
        qx1 = qstar.center.real + half
        qy0 = qstar.center.imag - half
        qy1 = qstar.center.imag + half
        if qx0 < x0 - eps or qx1 > x1 + eps or qy0 < y0 - eps or qy1 > y1 + eps:
            raise PreconditionError("qstar must lie inside the grid bbox")
    if qstar.side / grid.dx < 64.0 or qstar.side / grid.dy < 64.0:
        raise PreconditionError("need at least 64 grid cells across qstar")
    xs, ys = grid.cell_centers()
    inside = _square_mask(qstar, xs, ys)
    total = int(inside.sum())
    if total == 0:
        raise PreconditionError("qstar contains no cell centers")
    hot = inside & grid.in_tract & (grid.ref > threshold)
    return float(hot.sum()) / total


def _square_mask(square, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Boolean mask of cell centers lying inside the (possibly rotated) square."""
    gx, gy = np.meshgrid(xs, ys)
    rx = gx - square.center.real
    ry = gy - square.center.imag
    if square.angle != 0.0:
        c = math.cos(-square.angle)
        s = math.sin(-square.angle)
        rx, ry = c * rx - s * ry, s * rx + c * ry
    half = square.side / 2.0
    return (np.abs(rx) < half) & (np.abs(ry) < half)
