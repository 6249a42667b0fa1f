"""Squares, meshes, gauged covering sums and bounded-overlap covers.

All set densities are grid-cell counts; gauged sums use diam = sqrt(2)*side
for squares.  The two growth sequences (doubling cascade R_n and the
contracting mesh cascade r_n) iterate exponentials, so both switch to
log-space bookkeeping once values leave the double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, PreconditionError
from .linearizer import ExpParams, GaugeSpec, gauge_h, phi

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Square:
    """Open square with the given center, side and rotation angle."""

    center: complex
    side: float
    angle: float = 0.0

    def __post_init__(self):
        if self.side <= 0.0:
            raise DomainError("square side must be positive")

    @property
    def diam(self) -> float:
        return SQRT2 * self.side

    @property
    def area(self) -> float:
        return self.side * self.side

    def corners(self) -> list:
        h = self.side / 2.0
        rot = complex(math.cos(self.angle), math.sin(self.angle))
        return [self.center + rot * complex(sx * h, sy * h)
                for sx, sy in ((-1, -1), (1, -1), (1, 1), (-1, 1))]

    def contains_point(self, z: complex, closed: bool = False, tol: float = 0.0) -> bool:
        w = (complex(z) - self.center) * complex(math.cos(-self.angle),
                                                 math.sin(-self.angle))
        h = self.side / 2.0 + tol
        if closed:
            return abs(w.real) <= h and abs(w.imag) <= h
        return abs(w.real) < h and abs(w.imag) < h

    def contains_square(self, other: "Square", tol: float = 1e-12) -> bool:
        t = tol * max(1.0, self.side)
        return all(self.contains_point(c, closed=True, tol=t) for c in other.corners())

    def shrink(self, margin: float) -> "Square":
        """Concentric square with the side reduced by margin (on each full side)."""
        if margin >= self.side:
            raise DomainError("margin consumes the whole square")
        return Square(center=self.center, side=self.side - margin, angle=self.angle)


@dataclass(frozen=True)
class Mesh:
    """Axis-aligned tiling with cells centered at origin + (k + i l) * cell_side.

    ``index_range`` optionally records the covered index rectangle
    (k_min, k_max, l_min, l_max) when the mesh is bound to a cover.
    """

    cell_side: float
    origin: complex = 0j
    index_range: Optional[tuple] = None

    def __post_init__(self):
        if self.cell_side <= 0.0:
            raise DomainError("mesh cell side must be positive")

    def index_of(self, z: complex) -> tuple[int, int]:
        s = self.cell_side
        return (math.floor((z.real - self.origin.real) / s + 0.5),
                math.floor((z.imag - self.origin.imag) / s + 0.5))

    def cell(self, k: int, l: int) -> Square:
        return Square(center=self.origin + complex(k * self.cell_side,
                                                   l * self.cell_side),
                      side=self.cell_side)


@dataclass(frozen=True)
class BoolGrid:
    """Boolean mask over a bbox, the uniform currency for densities."""

    bbox: tuple
    cells: np.ndarray

    @property
    def ny(self) -> int:
        return self.cells.shape[0]

    @property
    def nx(self) -> int:
        return self.cells.shape[1]

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


def grid_from_tract(grid) -> BoolGrid:
    """Adapter for TractGrid-shaped objects (bbox + in_tract)."""
    return BoolGrid(bbox=tuple(grid.bbox), cells=np.asarray(grid.in_tract, dtype=bool))


@dataclass(frozen=True)
class CoverReport:
    scale: float
    count: int
    gauged_sum: float = math.nan


def mesh_cover(mask: BoolGrid, cell_side: float,
               origin: complex = 0j) -> tuple[CoverReport, list]:
    """All mesh cells meeting true mask cells (center-of-cell membership).

    Requires cell_side >= 2x the mask grid spacing so each mesh cell sees
    at least one sample row/column.
    """
    if cell_side < 2.0 * max(mask.dx, mask.dy):
        raise PreconditionError(
            f"mesh cell {cell_side} below twice the grid spacing "
            f"({max(mask.dx, mask.dy)})")
    xs, ys = mask.cell_centers()
    ii, jj = np.nonzero(mask.cells)
    if len(ii) == 0:
        return CoverReport(scale=cell_side, count=0, gauged_sum=0.0), []
    ks = np.floor((xs[jj] - origin.real) / cell_side + 0.5).astype(np.int64)
    ls = np.floor((ys[ii] - origin.imag) / cell_side + 0.5).astype(np.int64)
    hit = np.unique(np.stack([ks, ls], axis=1), axis=0)
    mesh = Mesh(cell_side=cell_side, origin=origin,
                index_range=(int(ks.min()), int(ks.max()),
                             int(ls.min()), int(ls.max())))
    squares = [mesh.cell(int(k), int(l)) for k, l in hit]
    return CoverReport(scale=cell_side, count=len(squares)), squares


def gauged_sum(report: CoverReport, spec: GaugeSpec) -> float:
    """count * h(sqrt(2) * scale); the cover's contribution to the gauged measure."""
    if report.count == 0:
        return 0.0
    return report.count * gauge_h(spec, SQRT2 * report.scale)


@dataclass(frozen=True)
class ScalingSeries:
    reports: tuple
    trend: float  # slope of log(gauged sum) against log(1/scale)


def scaling_series(mask_at_scale: Callable[[float], BoolGrid], spec: GaugeSpec,
                   scales: Sequence[float]) -> ScalingSeries:
    """Gauged mesh-cover sums across shrinking scales plus the log-log trend.

    Positive trend indicates growth toward infinite gauged measure,
    negative toward zero.  Scales must decrease by factor >= 2 each step;
    zero-count scales are excluded from the fit.
    """
    ss = list(scales)
    if len(ss) < 4:
        raise PreconditionError("need at least 4 scales")
    for a, b in zip(ss, ss[1:]):
        if b > a / 2.0 + 1e-12 * a:
            raise PreconditionError("scales must decrease by a factor >= 2")
    reports = []
    for s in ss:
        mask = mask_at_scale(s)
        rep, _ = mesh_cover(mask, s)
        reports.append(CoverReport(scale=s, count=rep.count,
                                   gauged_sum=gauged_sum(rep, spec)))
    xs = [math.log(1.0 / r.scale) for r in reports if r.gauged_sum > 0.0]
    ys = [math.log(r.gauged_sum) for r in reports if r.gauged_sum > 0.0]
    if len(xs) < 2:
        raise PreconditionError("fewer than 2 nonzero gauged sums; no trend")
    A = np.vstack([xs, np.ones(len(xs))]).T
    (slope, _), *_ = np.linalg.lstsq(A, np.array(ys), rcond=None)
    return ScalingSeries(reports=tuple(reports), trend=float(slope))


@dataclass(frozen=True)
class GrowthSequence:
    """Doubling cascade values with log-space spillover.

    values[n] is the float when representable else None; log_values[n] is
    always usable.  truncated marks that the recursion left even the
    log-space range.
    """

    values: tuple
    log_values: tuple
    truncated: bool


def R_sequence(params: ExpParams, R0: float, n: int) -> GrowthSequence:
    """R_k = smallest power-of-two multiple of R_{k-1} reaching e^{lam R_{k-1}}.

    Each value satisfies e^{lam R_{k-1}} <= R_k < 2 e^{lam R_{k-1}}.
    Requires the baseline R0 >= 3 beta / lam.
    """
    lam = params.lam
    base = 3.0 * params.beta / lam
    if R0 < base * (1.0 - 1e-12):
        raise PreconditionError(f"R0={R0} below the baseline 3*beta/lam={base}")
    if n < 0:
        raise PreconditionError("n must be >= 0")
    values: list = [R0]
    logs = [math.log(R0)]
    truncated = False
    for _ in range(n):
        prev = values[-1]
        if prev is None:
            truncated = True
            break
        target = lam * prev - logs[-1]  # log2-threshold: k*log2 >= lam*R - log R
        k = max(0, math.ceil(target / math.log(2.0)))
        logs.append(logs[-1] + k * math.log(2.0))
        nxt = math.ldexp(prev, k) if logs[-1] < 709.0 else None
        values.append(nxt)
    return GrowthSequence(values=tuple(values), log_values=tuple(logs),
                          truncated=truncated)


@dataclass(frozen=True)
class MeshScaleSequence:
    values: tuple
    log_values: tuple
    truncated: bool


def r_sequence(rho: float, M: float, c: float, K: float, r0: float,
               n: int) -> MeshScaleSequence:
    """Contracting mesh scales log r_{k+1} = -log(rho M) - rho c K / (M r_k).

    Evaluated in log space; the sequence is truncated with a flag once
    r_k leaves the representable range (the next step would need 1/r_k).
    """
    if r0 <= 0.0:
        raise PreconditionError("r0 must be positive")
    if M <= 0.0 or K <= 0.0 or c <= 0.0 or rho <= 0.0:
        raise PreconditionError("rho, M, c, K must be positive")
    values: list = [r0]
    logs = [math.log(r0)]
    truncated = False
    for _ in range(n):
        prev = values[-1]
        if prev is None or prev == 0.0:
            truncated = True
            break
        log_next = -math.log(rho * M) - rho * c * K / (M * prev)
        logs.append(log_next)
        values.append(math.exp(log_next) if log_next > -745.0 else None)
    return MeshScaleSequence(values=tuple(values), log_values=tuple(logs),
                             truncated=truncated)


def mcmullen_product(spec: GaugeSpec, d_seq: Sequence[float],
                     delta_seq: Sequence[float]) -> list:
    """P_n = phi(1/d_n)^gamma * prod_{j<=n} Delta_j for literal diameters.

    Divergence of P_n certifies infinite gauged measure for a nested
    family with these diameter and density sequences.
    """
    if len(d_seq) != len(delta_seq):
        raise PreconditionError("d_seq and delta_seq must have equal length")
    if any(b >= a for a, b in zip(d_seq, d_seq[1:])):
        raise PreconditionError("d_seq must be strictly decreasing")
    if any(not (0.0 < d <= 1.0) for d in delta_seq):
        raise PreconditionError("densities must lie in (0, 1]")
    out = []
    prod = 1.0
    for d, dens in zip(d_seq, delta_seq):
        prod *= dens
        out.append(phi(spec, 1.0 / d) ** spec.gamma * prod)
    return out


def mcmullen_product_orbit(spec: GaugeSpec, x0: float,
                           delta_seq: Sequence[float]) -> list:
    """P_n for the orbit-backed diameters d_n = 1/E^{n-1}(x0).

    Literal doubles cannot hold iterated-exponential diameters beyond a
    few levels; the linearizer functional equation gives
    phi(E^{n-1}(x0)) = beta^{n-1} * phi(x0) exactly, which is used here.
    """
    if any(not (0.0 < d <= 1.0) for d in delta_seq):
        raise PreconditionError("densities must lie in (0, 1]")
    phi0 = phi(spec, x0)
    beta = spec.beta
    out = []
    prod = 1.0
    for n, dens in enumerate(delta_seq):
        prod *= dens
        out.append((phi0 * beta ** n) ** spec.gamma * prod)
    return out


def gamma_threshold_lower(rho: float, c3: float, params: ExpParams) -> float:
    """(log rho - log c3)/log beta: gauge exponents above it force divergence."""
    return (math.log(rho) - math.log(c3)) / math.log(params.beta)


def gamma_threshold_upper(rho: float, M: float, N0: int, params: ExpParams,
                          eps: float = 0.0) -> float:
    """(log(2 rho) - log(M^2 N0) - log(1+eps))/log beta: below it the
    contracting cover forces vanishing gauged sums."""
    return ((math.log(2.0 * rho) - math.log(M * M * N0) - math.log1p(eps))
            / math.log(params.beta))


def gamma_thresholds(rho: float, c3: float, M: float, N0: int,
                     params: ExpParams, eps: float = 0.0) -> tuple[float, float]:
    if rho <= 0.0 or c3 <= 0.0 or M <= 0.0:
        raise PreconditionError("rho, c3, M must be positive")
    if N0 < 1:
        raise PreconditionError("N0 must be >= 1")
    return (gamma_threshold_lower(rho, c3, params),
            gamma_threshold_upper(rho, M, N0, params, eps))


# ---------------------------------------------------------------------------
# nesting families

Element = Union[Square, BoolGrid]


@dataclass(frozen=True)
class NestingFamily:
    """Levels of disjoint elements with parent links and the (d_n, Delta_n) bounds.

    levels[n] is a list of elements (squares or masks), parents[n][i] the
    index of the containing level-(n-1) element (-1 at level 0).
    """

    levels: tuple
    parents: tuple
    d_seq: tuple
    delta_seq: tuple


@dataclass(frozen=True)
class NestingReport:
    valid: bool
    violation: Optional[str]
    measured_densities: tuple = field(default=())


def _element_diam(el: Element) -> float:
    if isinstance(el, Square):
        return el.diam
    ii, jj = np.nonzero(el.cells)
    if len(ii) == 0:
        return 0.0
    xs, ys = el.cell_centers()
    w = (xs[jj.max()] - xs[jj.min()]) + el.dx
    h = (ys[ii.max()] - ys[ii.min()]) + el.dy
    return math.hypot(w, h)


def _element_contains(parent: Element, child: Element) -> bool:
    if isinstance(parent, Square) and isinstance(child, Square):
        return parent.contains_square(child)
    if isinstance(parent, BoolGrid) and isinstance(child, BoolGrid):
        if parent.cells.shape != child.cells.shape or parent.bbox != child.bbox:
            raise PreconditionError("mask elements must share one grid")
        return bool(np.all(parent.cells | ~child.cells))
    if isinstance(parent, Square) and isinstance(child, BoolGrid):
        ii, jj = np.nonzero(child.cells)
        if len(ii) == 0:
            return True
        xs, ys = child.cell_centers()
        slack = 0.5 * math.hypot(child.dx, child.dy)
        return all(parent.contains_point(complex(xs[j], ys[i]), closed=True, tol=slack)
                   for i, j in zip(ii, jj))
    # square child inside a mask parent: all corners in true cells
    xs, ys = parent.cell_centers()
    for c in child.corners():
        j = int(np.clip(np.searchsorted(xs, c.real), 0, parent.nx - 1))
        i = int(np.clip(np.searchsorted(ys, c.imag), 0, parent.ny - 1))
        if not parent.cells[i, j]:
            return False
    return True


def _density_in(children: list, parent: Element) -> float:
    if isinstance(parent, Square):
        area = 0.0
        for ch in children:
            if isinstance(ch, Square):
                area += ch.area
            else:
                area += float(ch.cells.sum()) * ch.dx * ch.dy
        return area / parent.area
    union = np.zeros_like(parent.cells, dtype=bool)
    for ch in children:
        if isinstance(ch, BoolGrid):
            union |= ch.cells
        else:
            xs, ys = parent.cell_centers()
            union |= _raster_square(ch, xs, ys)
    pc = int(parent.cells.sum())
    if pc == 0:
        raise DomainError("empty parent mask")
    return float((union & parent.cells).sum()) / pc


def _raster_square(square: Square, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    gx, gy = np.meshgrid(xs, ys)
    rx = gx - square.center.real
    ry = gy - square.center.imag
    if square.angle != 0.0:
        co = math.cos(-square.angle)
        si = math.sin(-square.angle)
        rx, ry = co * rx - si * ry, si * rx + co * ry
    h = square.side / 2.0
    return (np.abs(rx) < h) & (np.abs(ry) < h)


def nesting_validate(family: NestingFamily) -> NestingReport:
    """Checks parent containment, diameter bounds d_n (down to 0) and the
    per-parent density lower bounds Delta_n; reports the first violation."""
    levels = family.levels
    n_levels = len(levels)
    if len(family.parents) != n_levels:
        return NestingReport(False, "parents/levels length mismatch")
    if any(b >= a for a, b in zip(family.d_seq, family.d_seq[1:])):
        return NestingReport(False, "d_seq is not strictly decreasing")
    if any(d <= 0.0 for d in family.delta_seq):
        return NestingReport(False, "delta_seq must be positive")
    for n in range(1, n_levels):
        for i, el in enumerate(levels[n]):
            p = family.parents[n][i]
            if not (0 <= p < len(levels[n - 1])):
                return NestingReport(False, f"level {n} element {i} has no parent")
            if not _element_contains(levels[n - 1][p], el):
                return NestingReport(
                    False, f"level {n} element {i} escapes its parent {p}")
    for n in range(n_levels):
        if n >= len(family.d_seq):
            break
        for i, el in enumerate(levels[n]):
            d = _element_diam(el)
            if d > family.d_seq[n] * (1.0 + 1e-9):
                return NestingReport(
                    False, f"level {n} element {i} diam {d} exceeds d_{n}={family.d_seq[n]}")
    measured = []
    for n in range(n_levels - 1):
        if n >= len(family.delta_seq):
            break
        for b_idx, parent in enumerate(levels[n]):
            children = [levels[n + 1][i] for i in range(len(levels[n + 1]))
                        if family.parents[n + 1][i] == b_idx]
            dens = _density_in(children, parent)
            measured.append((n, b_idx, dens))
            if dens < family.delta_seq[n]:
                return NestingReport(
                    False,
                    f"density {dens:.6g} below Delta_{n}={family.delta_seq[n]} "
                    f"at level {n} element {b_idx}",
                    tuple(measured))
    return NestingReport(True, None, tuple(measured))


def load_nesting_family(path, d_seq: Sequence[float],
                        delta_seq: Sequence[float]) -> NestingFamily:
    """Line format: level id parent_id cx cy side [angle] (squares only)."""
    levels: dict = {}
    ids: dict = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (6, 7):
                raise DomainError(f"bad nesting line: {line!r}")
            lvl, ident, parent = int(parts[0]), parts[1], parts[2]
            cx, cy, side = float(parts[3]), float(parts[4]), float(parts[5])
            angle = float(parts[6]) if len(parts) == 7 else 0.0
            sq = Square(center=complex(cx, cy), side=side, angle=angle)
            levels.setdefault(lvl, []).append((ident, parent, sq))
            ids[(lvl, ident)] = len(levels[lvl]) - 1
    if not levels or sorted(levels) != list(range(len(levels))):
        raise DomainError("levels must be consecutive starting at 0")
    lvl_list = []
    par_list = []
    for n in range(len(levels)):
        lvl_list.append([sq for _, _, sq in levels[n]])
        if n == 0:
            par_list.append([-1] * len(levels[0]))
        else:
            par_list.append([ids[(n - 1, parent)] for _, parent, _ in levels[n]])
    return NestingFamily(levels=tuple(map(tuple, lvl_list)),
                         parents=tuple(map(tuple, par_list)),
                         d_seq=tuple(d_seq), delta_seq=tuple(delta_seq))


def save_nesting_family(family: NestingFamily, path) -> None:
    with open(path, "w") as fh:
        for n, level in enumerate(family.levels):
            for i, el in enumerate(level):
                if not isinstance(el, Square):
                    raise DomainError("only square elements serialize to text")
                parent = family.parents[n][i]
                pid = f"e{n-1}_{parent}" if n else "-"
                fh.write(f"{n} e{n}_{i} {pid} "
                         f"{el.center.real!r} {el.center.imag!r} {el.side!r} {el.angle!r}\n")


# ---------------------------------------------------------------------------
# Besicovitch cover

N0_IMPL = 16


def besicovitch_cover(requests: Sequence[tuple]) -> tuple[list, int]:
    """Greedy largest-first center cover with exact overlap count.

    Keeps a square iff its center is not covered by an already-kept one;
    the kept family covers every request center.  max_overlap is the exact
    maximum multiplicity of the kept open squares (slab sweep over the
    edge arrangement); the implementation bound N0_IMPL = 16 is verified
    per run by callers rather than trusted.
    """
    items = []
    for k, (center, side) in enumerate(requests):
        if side <= 0.0:
            raise DomainError("square sides must be positive")
        items.append((complex(center), float(side), k))
    order = sorted(items, key=lambda t: (-t[1], t[2]))
    chosen: list = []
    for center, side, _ in order:
        covered = False
        for sq in chosen:
            if sq.contains_point(center):
                covered = True
                break
        if not covered:
            chosen.append(Square(center=center, side=side))
    return chosen, _max_overlap_sweep(chosen)


def _max_overlap_sweep(squares: list) -> int:
    """Exact max multiplicity of open axis-aligned squares via x-slab sweep."""
    if not squares:
        return 0
    xs = []
    for sq in squares:
        h = sq.side / 2.0
        xs.extend((sq.center.real - h, sq.center.real + h))
    xs = sorted(set(xs))
    best = 0
    for x0, x1 in zip(xs, xs[1:]):
        xm = 0.5 * (x0 + x1)
        events = []
        for sq in squares:
            h = sq.side / 2.0
            if sq.center.real - h < xm < sq.center.real + h:
                events.append((sq.center.imag - h, 1))
                events.append((sq.center.imag + h, -1))
        if not events:
            continue
        # open intervals: close before open at equal coordinates
        events.sort(key=lambda e: (e[0], e[1]))
        depth = 0
        for _, d in events:
            depth += d
            best = max(best, depth)
    return best


def density(mask_a: np.ndarray, region: Union[Square, np.ndarray],
            grid: Optional[BoolGrid] = None) -> float:
    """Exact cell-count ratio |A and region| / |region|.

    ``region`` is either a boolean grid of the same shape or a Square (then
    ``grid`` must supply the geometry for rasterization).
    """
    mask_a = np.asarray(mask_a, dtype=bool)
    if isinstance(region, Square):
        if grid is None:
            raise PreconditionError("square regions need the carrying grid")
        xs, ys = grid.cell_centers()
        region_mask = _raster_square(region, xs, ys)
    else:
        region_mask = np.asarray(region, dtype=bool)
        if region_mask.shape != mask_a.shape:
            raise PreconditionError("mask shapes differ")
    denom = int(region_mask.sum())
    if denom == 0:
        raise DomainError("region has no cells")
    return float((mask_a & region_mask).sum()) / denom
