"""Orbit iteration, escape classification and order estimation.

Two families are supported: the real exponential maps lam*e^z with
lam in (0, 1/e), and the scaled Mittag-Leffler maps a*f_rho.  Magnitude
comparisons beyond exp(700) happen in log space, so orbits and maximum
moduli never materialize overflowing floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels, mittag
from .errors import DomainError, InsufficientDataError, PreconditionError
from .linearizer import ExpParams
from .mittag import MLParams

DEFAULT_BAILOUT = 1e10
_OVERFLOW_EXP = 700.0


@dataclass(frozen=True)
class Exponential:
    params: ExpParams
    identifier: str = ""

    def __post_init__(self):
        if not self.identifier:
            object.__setattr__(self, "identifier", f"exp(lam={self.params.lam})")


@dataclass(frozen=True)
class ScaledMittagLeffler:
    params: MLParams
    identifier: str = ""

    def __post_init__(self):
        if not self.identifier:
            object.__setattr__(
                self, "identifier",
                f"ml(rho={self.params.rho}, log_a={self.params.log_a:.6g})")


FamilyMember = Union[Exponential, ScaledMittagLeffler]


@dataclass(frozen=True)
class Orbit:
    points: tuple
    escaped: bool
    escape_index: Optional[int] = None

    def __post_init__(self):
        if self.escaped != (self.escape_index is not None):
            raise DomainError("escape_index must be set iff escaped")


class ESCAPE:
    ESCAPING = "Escaping"
    BOUNDED = "Bounded"
    UNDECIDED = "Undecided"


def _step_exponential(lam: float, z: complex):
    """One step of z -> lam*e^z, or None when exp would overflow."""
    if z.real > _OVERFLOW_EXP:
        return None
    m = lam * math.exp(z.real)
    return complex(m * math.cos(z.imag), m * math.sin(z.imag))


def _step_ml(p: MLParams, z: complex):
    """One step of z -> a*f_rho(z).

    Returns None when the next value overflows, and the string "opaque"
    when z lies outside the sector beyond the seam: the image is then in
    the closed unit disk but its exact position is not resolvable.
    """
    lv = mittag.ml_eval(p, z)
    if lv.branch == "bound":
        return "opaque"
    if not math.isfinite(lv.log_mod):
        if lv.log_mod == -math.inf:
            return 0j
        return None
    if lv.log_mod > _OVERFLOW_EXP:
        return None
    m = math.exp(lv.log_mod)
    return complex(m * math.cos(lv.arg), m * math.sin(lv.arg))


def iterate(f: FamilyMember, z0: complex, n_max: int,
            bailout: float = DEFAULT_BAILOUT) -> Orbit:
    """Orbit of z0 until |z| > bailout or n_max steps.

    Points are truncated at escape.  When the next value would overflow
    the exponential range, the orbit is flagged escaped immediately with
    escape_index at the last stored point.
    """
    if n_max < 1:
        raise PreconditionError("n_max must be >= 1")
    if bailout <= 0.0:
        raise PreconditionError("bailout must be positive")
    pts = [complex(z0)]
    for k in range(n_max + 1):
        z = pts[-1]
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return Orbit(points=tuple(pts), escaped=True, escape_index=len(pts) - 1)
        if abs(z) > bailout:
            return Orbit(points=tuple(pts), escaped=True, escape_index=len(pts) - 1)
        if k == n_max:
            break
        if isinstance(f, Exponential):
            nxt = _step_exponential(f.params.lam, z)
        else:
            nxt = _step_ml(f.params, z)
        if nxt is None:
            return Orbit(points=tuple(pts), escaped=True, escape_index=len(pts) - 1)
        if nxt == "opaque":
            break
        pts.append(nxt)
    return Orbit(points=tuple(pts), escaped=False)


def classify(f: FamilyMember, z0: complex, n_max: int,
             bailout: float = DEFAULT_BAILOUT) -> str:
    """Escaping / Bounded / Undecided for the orbit of z0.

    Escaping requires the bailout to be exceeded with monotone modulus
    growth over the final recorded steps (up to 3); Bounded requires the
    orbit to enter a 1e-6 ball around the attracting fixed point of the
    exponential family.  Everything else is Undecided.
    """
    orbit = iterate(f, z0, n_max, bailout)
    if isinstance(f, Exponential):
        q = f.params.q
        for z in orbit.points:
            if abs(z - q) < 1e-6:
                return ESCAPE.BOUNDED
    if orbit.escaped:
        mods = [abs(z) for z in orbit.points]
        k = orbit.escape_index
        if k == len(mods) - 1 and mods[k] <= bailout:
            # escape via overflow guard: the unmaterialized next modulus
            # dominates everything recorded, so only check the last step
            if k == 0 or mods[k] > mods[k - 1]:
                return ESCAPE.ESCAPING
            return ESCAPE.UNDECIDED
        ok = True
        if k >= 1 and not mods[k] > mods[k - 1]:
            ok = False
        if k >= 2 and not mods[k - 1] > mods[k - 2]:
            ok = False
        return ESCAPE.ESCAPING if ok else ESCAPE.UNDECIDED
    return ESCAPE.UNDECIDED


def escape_grid(f: FamilyMember, bbox: tuple, nx: int, ny: int,
                n_max: int = 200, bailout: float = DEFAULT_BAILOUT,
                threads: int = 1) -> np.ndarray:
    """Per-cell classification codes (0 undecided, 1 bounded, 2 escaping).

    Cells are evaluated at their centers; rows are processed in parallel
    blocks with per-cell results independent of the thread count.
    """
    x0, x1, y0, y1 = bbox
    if nx < 1 or ny < 1:
        raise PreconditionError("grid must be at least 1x1")
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    out = np.zeros((ny, nx), dtype=np.uint8)
    if isinstance(f, Exponential):
        p = f.params

        def worker(r0, r1):
            _kernels.exp_escape_rows(p.lam, p.q, bailout, n_max,
                                     x0, dx, y0, dy, nx, r0, r1, out)
    else:
        p = f.params
        ratios = mittag.term_ratio_table(p.rho)
        log_rs = math.log(p.r_switch)

        def worker(r0, r1):
            _kernels.ml_escape_rows(p.rho, p.log_a, ratios, log_rs, p.delta,
                                    mittag.SERIES_TOL, mittag.MAX_TERMS,
                                    bailout, n_max, x0, dx, y0, dy, nx,
                                    r0, r1, out)

    run_row_blocks(ny, threads, worker)
    return out


def run_row_blocks(ny: int, threads: int, worker) -> None:
    """Dispatch worker(r0, r1) over row blocks; deterministic by disjointness."""
    if threads <= 1:
        worker(0, ny)
        return
    from concurrent.futures import ThreadPoolExecutor

    block = (ny + threads - 1) // threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(worker, r0, min(r0 + block, ny))
                for r0 in range(0, ny, block)]
        for fut in futs:
            fut.result()


def max_modulus(f: FamilyMember, r: float, n_samples: int = 256) -> float:
    """log M(r, f): max of log|f| over equi-angular samples on |z| = r.

    Returned in log space; the Mittag-Leffler branch switches to the
    sector asymptotics where |z|^rho would overflow.
    """
    if r <= 0.0:
        raise PreconditionError("radius must be positive")
    if n_samples < 64:
        raise PreconditionError("need at least 64 angular samples")
    best = -math.inf
    if isinstance(f, Exponential):
        lam = f.params.lam
        for k in range(n_samples):
            t = 2.0 * math.pi * k / n_samples
            best = max(best, math.log(lam) + r * math.cos(t))
        return best
    p = f.params
    for k in range(n_samples):
        t = 2.0 * math.pi * k / n_samples
        z = complex(r * math.cos(t), r * math.sin(t))
        best = max(best, mittag.ml_log_modulus(p, z))
    return best


@dataclass(frozen=True)
class OrderEstimate:
    r_values: tuple
    loglog_m: tuple
    slope: float
    intercept: float
    dropped: tuple = field(default=())


def order_estimate(f: FamilyMember, r_values: Sequence[float],
                   n_samples: int = 256) -> OrderEstimate:
    """Least-squares slope of log log M(r, f) against log r.

    The slope approximates the growth order.  Samples with non-positive
    log M are dropped; fewer than 4 survivors raise InsufficientDataError.
    """
    rs = list(r_values)
    if len(rs) < 4:
        raise PreconditionError("need at least 4 radii")
    if any(r <= 1.0 for r in rs) or any(b <= a for a, b in zip(rs, rs[1:])):
        raise PreconditionError("radii must be increasing and > 1")
    xs, ys, dropped = [], [], []
    for r in rs:
        lm = max_modulus(f, r, n_samples)
        if lm <= 0.0 or not math.isfinite(lm):
            dropped.append(r)
            continue
        xs.append(math.log(r))
        ys.append(math.log(lm))
    if len(xs) < 4:
        raise InsufficientDataError(
            f"only {len(xs)} usable radii after dropping {dropped}")
    A = np.vstack([xs, np.ones(len(xs))]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, np.array(ys), rcond=None)
    return OrderEstimate(r_values=tuple(r for r in rs if r not in dropped),
                         loglog_m=tuple(ys), slope=float(slope),
                         intercept=float(intercept), dropped=tuple(dropped))
