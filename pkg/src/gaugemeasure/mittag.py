"""Mittag-Leffler evaluation: power series, sector asymptotics, scaling.

f_rho(z) = sum z^n / Gamma(n/rho + 1) behaves like rho*exp(z^rho) inside
the sector |arg z| <= pi/(2 rho) + delta and stays bounded outside it once
|z| is large.  Everything beyond the series radius is handled in log
space; the scaling factor a of a*f_rho is likewise kept as log(a) because
calibrated values underflow double precision for large cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DomainError, PreconditionError

SERIES_TOL = 1e-14
MAX_TERMS = 10000
SERIES_EXP_CAP = 700.0  # exp overflow guard for materialized values
# The series carries terms up to exp(|z|^rho) regardless of the result
# size, so double precision loses the value entirely once |z|^rho exceeds
# |log eps| plus the dynamic range of interest.  Hybrid evaluation hands
# over to the asymptotic branches at this cancellation-safe seam.
SERIES_SAFE_CAP = 30.0

_ratio_cache: dict = {}


def series_safe_radius(rho: float) -> float:
    """Largest |z| at which the series value is cancellation-reliable."""
    return SERIES_SAFE_CAP ** (1.0 / rho)


def gamma_fn(x: float) -> float:
    """Gamma(x) for x in (0, 170]; use log_gamma beyond the overflow range."""
    if x <= 0.0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    if x > 170.0:
        raise DomainError("gamma_fn overflows for x > 170; use log_gamma")
    return math.gamma(x)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def term_ratio_table(rho: float, cap: int = MAX_TERMS) -> np.ndarray:
    """ratios[n] = Gamma(n/rho+1)/Gamma((n+1)/rho+1) for the term recurrence.

    Shared by the Python series and both grid-kernel backends so that all
    evaluation paths use identical per-term factors.
    """
    key = (rho, cap)
    table = _ratio_cache.get(key)
    if table is None:
        lg = [math.lgamma(n / rho + 1.0) for n in range(cap + 1)]
        table = np.array([math.exp(lg[n] - lg[n + 1]) for n in range(cap)])
        _ratio_cache[key] = table
    return table


def ml_series(rho: float, z: complex, tol: float = SERIES_TOL) -> complex:
    """Truncated series value of f_rho(z) with compensated summation.

    Stops after the term magnitude stays below tol*|partial sum| for 5
    consecutive terms; raises ConvergenceError at the 10000-term cap.
    """
    if rho <= 0.0:
        raise DomainError("rho must be positive")
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    z = complex(z)
    ratios = term_ratio_table(rho)
    sr, si, _, ok = _kernels.ml_series_point(z.real, z.imag, ratios, tol, MAX_TERMS)
    if not ok:
        raise ConvergenceError(f"series did not converge within {MAX_TERMS} terms at z={z}")
    if not (math.isfinite(sr) and math.isfinite(si)):
        raise ConvergenceError(f"series value left the double range at z={z}")
    return complex(sr, si)


def default_delta(rho: float) -> float:
    """Sector widening pi/(2 rho), always within the admissible range."""
    return math.pi / (2.0 * rho)


def estimate_c0(rho: float, delta: float | None = None,
                n_radii: int = 4, n_angles: int = 33) -> float:
    """Empirical bound for |f_rho(z) - rho*exp(z^rho)|*|z| inside the sector.

    Sampled on rings at moderate radii where the series is trustworthy; the
    asymptotic error constant is only asserted to exist, so a sampled
    surrogate is used.
    """
    if delta is None:
        delta = default_delta(rho)
    r_hi = min(series_safe_radius(rho), 32.0)
    radii = [r_hi * 0.5 ** k for k in range(n_radii)]
    half = math.pi / (2.0 * rho) + delta
    worst = 0.0
    for r in radii:
        if r < 1.0:
            continue
        for k in range(n_angles):
            th = -half + 2.0 * half * k / (n_angles - 1)
            z = complex(r * math.cos(th), r * math.sin(th))
            w = _cpow_principal(z, rho)
            if w.real > 25.0:
                # the dominant term dwarfs the double-precision resolution
                # of the difference; the deviation is unmeasurable there
                continue
            main = rho * _cexp(w)
            diff = abs(ml_series(rho, z) - main) * r
            worst = max(worst, diff)
    return worst


def _cpow_principal(z: complex, rho: float) -> complex:
    r = abs(z)
    if r == 0.0:
        return 0.0j
    th = math.atan2(z.imag, z.real)
    lr = rho * math.log(r)
    return complex(math.exp(lr) * math.cos(rho * th), math.exp(lr) * math.sin(rho * th))


def _cexp(w: complex) -> complex:
    m = math.exp(w.real)
    return complex(m * math.cos(w.imag), m * math.sin(w.imag))


@dataclass(frozen=True)
class MLParams:
    """Scaled Mittag-Leffler family member a*f_rho with evaluation cutoffs.

    ``log_a`` is authoritative: calibrated scalings behave like
    exp(-R^rho) and underflow the float range long before they stop being
    meaningful.  R is the asymptotic cutoff radius, delta the sector
    widening and C0 the sampled asymptotic-error constant.
    """

    rho: float
    log_a: float
    R: float
    delta: float
    C0: float

    def __post_init__(self):
        if self.rho <= 0.5:
            raise DomainError(f"rho must exceed 1/2, got {self.rho}")
        if not math.isfinite(self.log_a):
            raise DomainError("log_a must be finite (a > 0)")
        max_delta = max(math.pi / (2.0 * self.rho), (1.0 - 1.0 / (2.0 * self.rho)) * math.pi)
        if not (0.0 < self.delta <= max_delta):
            raise DomainError(f"delta={self.delta} outside (0, {max_delta}]")
        if self.C0 > 0.0 and self.R <= self.C0 / math.sin(self.delta):
            raise DomainError("cutoff R must exceed C0/sin(delta)")

    @property
    def a(self) -> float:
        """May underflow to 0.0 for aggressively calibrated parameters."""
        return math.exp(self.log_a) if self.log_a > -745.0 else 0.0

    @property
    def r_switch(self) -> float:
        """Series/asymptotic seam, pinned at the cancellation-safe radius.

        Inside the sector the asymptotic formula is empirically accurate
        well below the cutoff R; outside it, values at moderate |z| are
        bounded through the maximum principle by the |z| = R calibration.
        """
        return series_safe_radius(self.rho)


def ml_params(rho: float, a: float | None = 1.0, R: float | None = None,
              delta: float | None = None, log_a: float | None = None) -> MLParams:
    """MLParams with sampled C0 and a cutoff satisfying R > C0/sin(delta)."""
    if delta is None:
        delta = default_delta(rho)
    c0 = estimate_c0(rho, delta)
    if R is None:
        R = max(8.0, 2.0 * c0 / math.sin(delta))
    if log_a is None:
        if a is None or a <= 0.0:
            raise DomainError("scaling a must be positive")
        log_a = math.log(a)
    return MLParams(rho=rho, log_a=log_a, R=R, delta=delta, C0=c0)


def calibrated_params(rho: float, R: float | None = None,
                      delta: float | None = None, n_samples: int = 256) -> MLParams:
    """MLParams with the scaling calibrated so sampled |a f_rho| <= 1/2
    on the cutoff circle and outside the sector."""
    if delta is None:
        delta = default_delta(rho)
    c0 = estimate_c0(rho, delta)
    if R is None:
        R = max(8.0, 2.0 * c0 / math.sin(delta))
    log_a = calibrate_log_scaling(rho, R, n_samples, delta)
    return MLParams(rho=rho, log_a=log_a, R=R, delta=delta, C0=c0)


def calibrate_log_scaling(rho: float, R: float, n_samples: int = 256,
                          delta: float | None = None) -> float:
    """log of the scaling a = 0.5 / max sampled |f_rho|.

    The maximum runs over the circle |z| = R and over the complement of
    the sector on |z| in [R, 10R]; by construction the sampled version of
    both boundedness conditions then holds with a factor-2 margin.
    """
    if delta is None:
        delta = default_delta(rho)
    if n_samples < 16:
        raise PreconditionError("n_samples must be >= 16")
    r_switch = series_safe_radius(rho)
    worst = -math.inf
    for k in range(n_samples):
        th = 2.0 * math.pi * k / n_samples
        worst = max(worst, _log_abs_unscaled(rho, R, th, r_switch, delta))
    half = math.pi / (2.0 * rho) + delta
    if half < math.pi:
        n_r = 8
        n_th = max(16, n_samples // 8)
        for i in range(n_r):
            r = R * (10.0 ** (i / (n_r - 1.0)))
            for k in range(n_th):
                th = half + (2.0 * math.pi - 2.0 * half) * (k + 0.5) / n_th
                worst = max(worst, _log_abs_unscaled(rho, r, th, r_switch, delta))
    return math.log(0.5) - worst


def calibrate_scaling(rho: float, R: float, n_samples: int = 256,
                      delta: float | None = None) -> float:
    """Scaling a as a float; underflows to 0.0 when log(a) < -745."""
    log_a = calibrate_log_scaling(rho, R, n_samples, delta)
    return math.exp(log_a) if log_a > -745.0 else 0.0


def _log_abs_unscaled(rho, r, theta, r_switch, delta):
    """log|f_rho(r e^{i theta})| via the same branching as ml_eval, a = 1."""
    theta = math.atan2(math.sin(theta), math.cos(theta))
    if r <= r_switch:
        v = ml_series(rho, complex(r * math.cos(theta), r * math.sin(theta)))
        av = abs(v)
        return math.log(av) if av > 0.0 else -math.inf
    if abs(theta) <= math.pi / (2.0 * rho) + delta:
        return math.log(rho) + math.exp(rho * math.log(r)) * math.cos(rho * theta)
    return 0.0  # |g2| < 1 bound


@dataclass(frozen=True)
class LogComplex:
    """Value in log space: log-modulus, argument, and producing branch."""

    log_mod: float
    arg: float
    branch: str  # "series" | "sector" | "bound"

    def to_complex(self) -> complex:
        if self.log_mod > SERIES_EXP_CAP:
            raise DomainError("value too large to materialize as complex")
        m = math.exp(self.log_mod)
        return complex(m * math.cos(self.arg), m * math.sin(self.arg))


def ml_sector(rho: float, z: complex, R: float, delta: float | None = None) -> complex:
    """log of the dominant representation: log(rho) + z^rho (principal branch).

    Valid for |arg z| <= pi/(2 rho) + delta and |z| >= R; the relative
    error of exp(result) against f_rho(z) is O(1/(|z| |exp(z^rho)|)).
    """
    if delta is None:
        delta = default_delta(rho)
    z = complex(z)
    r = abs(z)
    if r < R:
        raise DomainError(f"|z|={r} below the sector cutoff R={R}")
    if abs(math.atan2(z.imag, z.real)) > math.pi / (2.0 * rho) + delta:
        raise DomainError("z outside the widened sector")
    return math.log(rho) + _cpow_principal(z, rho)


def ml_eval(params: MLParams, z: complex) -> LogComplex:
    """Hybrid log-space evaluation of a*f_rho(z).

    Series up to the seam radius, sector asymptotics inside the widened
    sector beyond it, and the bounded branch (|g2| < 1, so log-modulus
    log(a)) outside the sector beyond the seam.
    """
    z = complex(z)
    r = abs(z)
    if r <= params.r_switch:
        v = ml_series(params.rho, z)
        av = abs(v)
        if av == 0.0:
            return LogComplex(-math.inf, 0.0, "series")
        return LogComplex(params.log_a + math.log(av),
                          math.atan2(v.imag, v.real), "series")
    theta = math.atan2(z.imag, z.real)
    if abs(theta) <= math.pi / (2.0 * params.rho) + params.delta:
        w = _cpow_principal(z, params.rho)
        return LogComplex(params.log_a + math.log(params.rho) + w.real,
                          math.remainder(w.imag, 2.0 * math.pi), "sector")
    return LogComplex(params.log_a, 0.0, "bound")


def ml_log_modulus(params: MLParams, z: complex) -> float:
    return ml_eval(params, z).log_mod


@dataclass(frozen=True)
class SectorSpec:
    """Horizontal log-plane band family Im w in [pi/(2 rho), 2 pi - pi/(2 rho)] mod 2 pi."""

    rho: float

    def __post_init__(self):
        if self.rho <= 0.5:
            raise DomainError("rho must exceed 1/2")

    @property
    def band_lo(self) -> float:
        return math.pi / (2.0 * self.rho)

    @property
    def band_height(self) -> float:
        return 2.0 * math.pi * (1.0 - 1.0 / (2.0 * self.rho))


def sector_contains(spec: SectorSpec, z: complex) -> bool:
    """Exact band test on Im z mod 2 pi."""
    y = math.fmod(complex(z).imag, 2.0 * math.pi)
    if y < 0.0:
        y += 2.0 * math.pi
    return spec.band_lo <= y <= 2.0 * math.pi - spec.band_lo


PACKING_K_MIN = 8.0 * math.pi
PACKING_EPS = 0.05


def sector_square_packing(spec: SectorSpec, box) -> list:
    """Disjoint axis-aligned squares of side = band height inside band and box.

    The box must have side >= 8 pi (two band periods).  Large boxes reach
    density (1 - 1/(2 rho)) - eps; the achievable eps shrinks like
    side^{-1} because one row of squares fills each band exactly.
    """
    from .covering import Square

    if box.side < PACKING_K_MIN - 1e-9:
        raise PreconditionError(f"box side {box.side} below the 8*pi packing minimum")
    s = spec.band_height
    two_pi = 2.0 * math.pi
    ys = [c.imag for c in box.corners()]
    y_min, y_max = min(ys), max(ys)
    k_lo = math.floor((y_min - spec.band_lo) / two_pi) - 1
    k_hi = math.ceil((y_max - spec.band_lo) / two_pi) + 1
    squares = []
    for k in range(k_lo, k_hi + 1):
        b0 = spec.band_lo + two_pi * k
        b1 = b0 + s
        xa, xb = _strip_x_interval(box, b0, b1)
        if xa is None or xb - xa < s:
            continue
        m = int(math.floor((xb - xa) / s))
        yc = 0.5 * (b0 + b1)
        for j in range(m):
            squares.append(Square(center=complex(xa + (j + 0.5) * s, yc), side=s))
    return squares


def _strip_x_interval(box, y0, y1):
    """Largest x-interval such that [xa, xb] x [y0, y1] fits inside the box."""
    corners = box.corners()
    ys = [c.imag for c in corners]
    if y0 < min(ys) or y1 > max(ys):
        return None, None
    cand = [y0, y1] + [y for y in ys if y0 < y < y1]
    xa = -math.inf
    xb = math.inf
    for y in cand:
        lo, hi = _slice_x_range(corners, y)
        if lo is None:
            return None, None
        xa = max(xa, lo)
        xb = min(xb, hi)
    if xa >= xb:
        return None, None
    return xa, xb


def _slice_x_range(corners, y):
    """x-extent of the convex quadrilateral at height y."""
    xs = []
    n = len(corners)
    for i in range(n):
        a = corners[i]
        b = corners[(i + 1) % n]
        if a.imag == b.imag:
            if abs(a.imag - y) < 1e-12:
                xs.extend([a.real, b.real])
            continue
        t = (y - a.imag) / (b.imag - a.imag)
        if -1e-12 <= t <= 1.0 + 1e-12:
            xs.append(a.real + t * (b.real - a.real))
    if not xs:
        return None, None
    return min(xs), max(xs)
