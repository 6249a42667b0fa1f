"""Numerical verification layer for univalent-map distortion bounds.

Derivatives are estimated by central finite differences and bilipschitz
ratios from sample pairs, so the reported D is a lower bound for the true
distortion; univalence is checked only on the samples.  This module
verifies statements, it does not certify them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .covering import BoolGrid, Square
from .errors import DomainError, NonInjectiveError, PreconditionError

ComplexMap = Callable[[complex], complex]


def koebe_map(z: complex) -> complex:
    """z/(1-z)^2: the extremal normalized univalent map on the unit disk."""
    return z / (1.0 - z) ** 2


def make_mobius(a: complex, b: complex, c: complex, d: complex) -> ComplexMap:
    if a * d - b * c == 0:
        raise DomainError("degenerate Mobius coefficients")
    return lambda z: (a * z + b) / (c * z + d)


def mobius_disk_L(a: complex, b: complex, c: complex, d: complex,
                  center: complex, radius: float) -> float:
    """Exact sup|m'|/inf|m'| of a Mobius map over a closed disk.

    |m'(z)| = |ad - bc|/|cz + d|^2, so the ratio is ((p+r)/(p-r))^2 with p
    the distance from the disk center to the pole.  Mobius maps send disks
    to disks, and for convex domain and image the bilipschitz distortion
    equals this derivative ratio.
    """
    if c == 0:
        return 1.0
    p = abs(center + d / c)
    if p <= radius:
        raise DomainError("pole inside the disk; map not univalent there")
    return ((p + radius) / (p - radius)) ** 2


@dataclass(frozen=True)
class DistortionEstimate:
    """L = sup|f'|/inf|f'| over samples; d_lower = max/min pair ratio (<= true D)."""

    L: float
    D_lower: float

    def __post_init__(self):
        if self.L < 1.0 - 1e-12 or self.D_lower < 1.0 - 1e-12:
            raise DomainError("distortion measures are >= 1 by definition")


def koebe_derivative_bounds(r: float, d0: float, s: float) -> tuple[float, float]:
    """Sharp |f'| range at distance s from the center of a univalence disk
    of radius r with |f'(center)| = d0."""
    _check_koebe_args(r, d0, s)
    lo = r * r * d0 * (r - s) / (r + s) ** 3
    hi = r * r * d0 * (r + s) / (r - s) ** 3
    return lo, hi


def koebe_value_bounds(r: float, d0: float, s: float) -> tuple[float, float]:
    """Sharp |f(z) - f(center)| range at distance s; extremal for the Koebe map."""
    _check_koebe_args(r, d0, s)
    lo = r * r * d0 * s / (r + s) ** 2
    hi = r * r * d0 * s / (r - s) ** 2
    return lo, hi


def _check_koebe_args(r, d0, s):
    if d0 <= 0.0:
        raise DomainError("d0 = |f'(center)| must be positive")
    if not 0.0 <= s < r:
        raise DomainError(f"need 0 <= s < r, got s={s}, r={r}")


def fd_derivative(f: ComplexMap, z: complex, step: float) -> complex:
    """Central difference along the real direction; exact for holomorphic f."""
    return (f(z + step) - f(z - step)) / (2.0 * step)


def square_samples(region: Square, n_samples: int) -> list:
    """Deterministic m x m grid of interior points, m = floor(sqrt(n))."""
    m = max(2, int(math.isqrt(n_samples)))
    rot = complex(math.cos(region.angle), math.sin(region.angle))
    h = region.side / 2.0
    pts = []
    for i in range(m):
        for j in range(m):
            u = -h + (i + 0.5) * region.side / m
            v = -h + (j + 0.5) * region.side / m
            pts.append(region.center + rot * complex(u, v))
    return pts


def disk_samples(center: complex, radius: float, n_samples: int) -> list:
    """Deterministic polar grid covering the open disk."""
    n_r = max(2, int(math.isqrt(n_samples // 3)))
    pts = [center]
    for i in range(1, n_r + 1):
        rr = radius * i / (n_r + 0.5)
        n_t = max(6, int(2 * math.pi * i))
        for k in range(n_t):
            t = 2.0 * math.pi * k / n_t
            pts.append(center + rr * complex(math.cos(t), math.sin(t)))
    return pts


def estimate_distortion_points(f: ComplexMap, points: Sequence[complex],
                               fd_step: float) -> DistortionEstimate:
    """L from derivative magnitudes, D_lower from all sample pairs."""
    pts = [complex(p) for p in points]
    if len(pts) < 4:
        raise PreconditionError("need at least 4 sample points")
    derivs = [abs(fd_derivative(f, z, fd_step)) for z in pts]
    dmin, dmax = min(derivs), max(derivs)
    if dmin == 0.0:
        raise DomainError("vanishing derivative among samples")
    vals = [f(z) for z in pts]
    scale = max(abs(v - vals[0]) for v in vals[1:])
    hi = 0.0
    lo = math.inf
    for i in range(len(pts)):
        zi, vi = pts[i], vals[i]
        for j in range(i + 1, len(pts)):
            dz = abs(pts[j] - zi)
            dv = abs(vals[j] - vi)
            if dz == 0.0:
                continue
            if dv <= 1e-13 * scale:
                raise NonInjectiveError(
                    f"images of {zi} and {pts[j]} coincide on the sample set")
            q = dv / dz
            hi = max(hi, q)
            lo = min(lo, q)
    L = dmax / dmin
    return DistortionEstimate(L=max(L, 1.0), D_lower=max(hi / lo, 1.0))


def estimate_distortion(f: ComplexMap, region: Square,
                        n_samples: int = 256) -> DistortionEstimate:
    """Distortion estimate on a square region from a deterministic grid."""
    step = 1e-6 * region.side
    return estimate_distortion_points(f, square_samples(region, n_samples), step)


def lemma_first_check(f: ComplexMap, z0: complex, r: float, K: float,
                      n_samples: int = 300) -> tuple[float, float, float, float]:
    """Measured L and D_lower on D(z0, r) against the ((K+1)/(K-1))^{4,6}
    bounds valid for maps univalent on D(z0, K r)."""
    if K <= 1.0:
        raise PreconditionError("K must exceed 1")
    if r <= 0.0:
        raise PreconditionError("r must be positive")
    pts = disk_samples(z0, r, n_samples)
    est = estimate_distortion_points(f, pts, 1e-6 * r)
    l_bound = ((K + 1.0) / (K - 1.0)) ** 4
    d_bound = ((K + 1.0) / (K - 1.0)) ** 6
    return est.L, l_bound, est.D_lower, d_bound


def square_image_frames(f: ComplexMap, quad: Square, eps: float,
                        kprime: float, n_boundary: int = 1024,
                        d: float | None = None):
    """Inner and outer square frames of f(Q) for a low-distortion f.

    inner/outer are centered at f(center) with sides |f'| * side * (1/d)(1 - sqrt2 eps)
    and |f'| * side * d (1 + sqrt2 eps), rotated by arg f'.  Containment is
    tested on n_boundary boundary images: ``contains`` means inner lies in
    f(Q) (no boundary image enters the inner square, center lands inside),
    ``contained`` means f(Q) lies in outer.
    """
    if not (0.0 < eps < 1.0 / math.sqrt(2.0)):
        raise PreconditionError("eps must lie in (0, 1/sqrt(2))")
    if kprime <= 1.0:
        raise PreconditionError("kprime must exceed 1")
    if d is None:
        d = estimate_distortion(f, quad).D_lower
    step = 1e-6 * quad.side
    fp = fd_derivative(f, quad.center, step)
    if fp == 0:
        raise DomainError("f'(center) vanishes")
    mag = abs(fp)
    ang = math.atan2(fp.imag, fp.real)
    w0 = f(quad.center)
    root2 = math.sqrt(2.0)
    inner = Square(center=w0, side=mag * quad.side * (1.0 - root2 * eps) / d,
                   angle=quad.angle + ang)
    outer = Square(center=w0, side=mag * quad.side * d * (1.0 + root2 * eps),
                   angle=quad.angle + ang)
    images = [f(z) for z in _boundary_points(quad, n_boundary)]
    contained = all(outer.contains_point(w, closed=True) for w in images)
    contains = (not any(inner.contains_point(w) for w in images)) \
        and inner.contains_point(w0)
    return inner, outer, contained, contains


def _boundary_points(quad: Square, n: int) -> list:
    h = quad.side / 2.0
    rot = complex(math.cos(quad.angle), math.sin(quad.angle))
    pts = []
    per_side = max(1, n // 4)
    for k in range(per_side):
        t = -h + quad.side * k / per_side
        for local in (complex(t, -h), complex(h, t), complex(-t, h), complex(-h, -t)):
            pts.append(quad.center + rot * local)
    return pts


def density_transfer_check(f: ComplexMap, a_mask: BoolGrid, u_region: BoolGrid,
                           fd_step: float | None = None) -> tuple[float, float]:
    """dens(A, U) against L^2 * dens(f(A), f(U)) with Jacobian area weights.

    Image densities are approximated by sum |f'|^2 over cells, which is the
    forward area transport of the grid; the inequality lhs <= rhs holds up
    to grid slack for univalent f.
    """
    if a_mask.cells.shape != u_region.cells.shape or a_mask.bbox != u_region.bbox:
        raise PreconditionError("masks must share one grid")
    if not np.all(u_region.cells | ~a_mask.cells):
        raise PreconditionError("A must be a subset of U")
    if fd_step is None:
        fd_step = 1e-6 * min(u_region.dx, u_region.dy) * u_region.nx
    xs, ys = u_region.cell_centers()
    jac = np.zeros_like(u_region.cells, dtype=float)
    dmin = math.inf
    dmax = 0.0
    for i, j in zip(*np.nonzero(u_region.cells)):
        m = abs(fd_derivative(f, complex(xs[j], ys[i]), fd_step))
        jac[i, j] = m * m
        dmin = min(dmin, m)
        dmax = max(dmax, m)
    if dmin == 0.0:
        raise DomainError("vanishing derivative on U")
    n_u = int(u_region.cells.sum())
    if n_u == 0:
        raise DomainError("empty region U")
    lhs = float(a_mask.cells.sum()) / n_u
    img_dens = float(jac[a_mask.cells].sum()) / float(jac[u_region.cells].sum())
    L = dmax / dmin
    return lhs, L * L * img_dens
