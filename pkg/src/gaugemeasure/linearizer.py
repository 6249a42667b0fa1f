"""Koenigs linearizer of the real exponential family and the derived gauges.

For lam in (0, 1/e) the map E(x) = lam*e^x has two real fixed points
0 < q < 1 < beta, with q attracting and beta repelling.  The Koenigs
linearizer L (L(0) = beta, L'(0) = 1) conjugates E to multiplication by
beta near beta; its real inverse ``phi`` grows slower than any iterate of
the logarithm and drives the gauge h(t) = t^2 * phi(1/t)^gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConvergenceError, DomainError, IllConditionedError, PreconditionError

_FIXED_POINT_TOL = 1e-12
_PULLBACK_CAP = 400
_INVERSE_ORDER = 10


@dataclass(frozen=True)
class ExpParams:
    """Parameter lam in (0, 1/e) with the two real fixed points of lam*e^x."""

    lam: float
    q: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0 / math.e):
            raise DomainError(f"lam={self.lam} outside (0, 1/e); fixed points coalesce at 1/e")
        if not (0.0 < self.q < 1.0 < self.beta):
            raise DomainError(f"fixed points must satisfy 0 < q < 1 < beta, got q={self.q}, beta={self.beta}")
        if abs(self.lam * math.exp(self.beta) - self.beta) > 1e-12 * self.beta:
            raise DomainError("beta does not satisfy lam*e^beta = beta to 1e-12 relative")
        if abs(self.lam * math.exp(self.q) - self.q) > 1e-12:
            raise DomainError("q does not satisfy lam*e^q = q to 1e-12")

    @property
    def multiplier(self) -> float:
        """E'(beta) = lam*e^beta = beta > 1 (repelling)."""
        return self.beta


def solve_fixed_points(lam: float) -> ExpParams:
    """Both real solutions of lam*e^x = x, each polished to 1e-12 relative.

    Bracketed bisection on [0, 1] and [1, 100/lam], then Newton.  Rejects
    lam outside (0, 1/e); at lam = 1/e the two roots collapse at x = 1.
    """
    if not (0.0 < lam < 1.0 / math.e):
        raise DomainError(f"lam={lam} outside (0, 1/e)")

    def g(x):
        if x > 700.0:
            return math.inf  # lam*e^x dwarfs x far above beta
        return lam * math.exp(x) - x

    def gp(x):
        if x > 700.0:
            return math.inf
        return lam * math.exp(x) - 1.0

    q = _bisect_then_newton(g, gp, 0.0, 1.0)
    beta = _bisect_then_newton(g, gp, 1.0, 100.0 / lam)
    return ExpParams(lam=lam, q=q, beta=beta)


def _bisect_then_newton(g, gp, lo, hi):
    glo = g(lo)
    if glo == 0.0:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            lo = hi = mid
            break
        if (gm > 0.0) == (glo > 0.0):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-9 * max(1.0, abs(lo)):
            break
    x = 0.5 * (lo + hi)
    for _ in range(8):
        d = gp(x)
        step = g(x) / d
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return x


@dataclass(frozen=True)
class LinearizerSeries:
    """Truncated power series of the Koenigs linearizer L around 0.

    coeffs[0] = beta and coeffs[1] = 1 exactly; the remaining coefficients
    satisfy the matching recurrence of lam*exp(L(z)) = L(beta*z).  ``radius``
    is the empirical radius inside which the truncation error of the last
    retained term is below 1e-14.
    """

    params: ExpParams
    coeffs: tuple
    order: int
    radius: float
    inverse_coeffs: tuple = field(repr=False, default=())

    def value(self, z: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self, z: float) -> float:
        acc = 0.0
        for k in range(self.order, 0, -1):
            acc = acc * z + k * self.coeffs[k]
        return acc

    def recurrence_residuals(self):
        """Coefficientwise residual of lam*exp(L(z)) - L(beta*z), orders 0..N."""
        beta = self.params.beta
        p = [0.0] + list(self.coeffs[1:])
        e = _exp_series(p)
        return [beta * e[k] - self.coeffs[k] * beta ** k for k in range(self.order + 1)]


def _exp_series(p: Sequence[float]):
    """exp of a power series with p[0] = 0, same truncation order."""
    n = len(p) - 1
    e = [1.0] + [0.0] * n
    for k in range(1, n + 1):
        s = 0.0
        for j in range(1, k + 1):
            s += j * p[j] * e[k - j]
        e[k] = s / k
    return e


def koenigs_series(params: ExpParams, order: int) -> LinearizerSeries:
    """Coefficients a_0..a_order of L from the matching recurrence.

    a_k = (sum_{j<k} j a_j e_{k-j}) / (k (beta^{k-1} - 1)) with e the
    exponential of the nonconstant part; in particular a_2 = 1/(2(beta-1)).
    """
    if order < 2:
        raise PreconditionError("series order must be >= 2")
    beta = params.beta
    a = [beta, 1.0] + [0.0] * (order - 1)
    e = [1.0] + [0.0] * order  # exp(sum_{j>=1} a_j z^j)
    e[1] = 1.0
    for k in range(2, order + 1):
        denom = k * (beta ** (k - 1) - 1.0)
        if denom == 0.0 or not math.isfinite(denom):
            raise IllConditionedError(f"recurrence denominator degenerate at order {k}")
        s = 0.0
        for j in range(1, k):
            s += j * a[j] * e[k - j]
        a[k] = s / denom
        # e_k = a_k + (1/k) sum_{j<k} j a_j e_{k-j}
        e[k] = a[k] + s / k
    radius = (1e-14 / abs(a[order])) ** (1.0 / order) if a[order] != 0.0 else math.inf
    inv = _revert_series(a, _INVERSE_ORDER)
    return LinearizerSeries(params=params, coeffs=tuple(a), order=order,
                            radius=radius, inverse_coeffs=tuple(inv))


def _revert_series(a: Sequence[float], order: int):
    """Coefficients b with B(L(z) - beta) = z + O(z^{order+1}).

    Reversion of w = z + a_2 z^2 + ...: b_1 = 1 and each b_n cancels the
    order-n coefficient of sum_k a_k B(w)^k.
    """
    order = min(order, len(a) - 1)
    b = [0.0, 1.0] + [0.0] * (order - 1)
    for n in range(2, order + 1):
        comp = _compose_poly(a, b, n)
        b[n] -= comp[n]
    return b


def _compose_poly(a: Sequence[float], b: Sequence[float], order: int):
    """(L(B(w)) - beta) truncated: sum_{k>=1} a_k B(w)^k up to w^order."""
    out = [0.0] * (order + 1)
    power = [0.0] * (order + 1)
    power[0] = 1.0
    for k in range(1, min(len(a), order + 1)):
        power = _poly_mul(power, b, order)
        for i in range(order + 1):
            out[i] += a[k] * power[i]
    return out


def _poly_mul(p, q, order):
    out = [0.0] * (order + 1)
    for i, pi in enumerate(p[: order + 1]):
        if pi == 0.0:
            continue
        for j in range(min(len(q), order + 1 - i)):
            out[i + j] += pi * q[j]
    return out


@dataclass(frozen=True)
class GaugeSpec:
    """Gauge h(t) = t^2 * phi(1/t)^gamma built on a linearizer series."""

    series: LinearizerSeries
    gamma: float
    pullback_tol: float

    def __post_init__(self):
        if self.gamma < 0.0:
            raise DomainError("gamma must be >= 0")
        if self.pullback_tol <= 0.0:
            raise DomainError("pullback_tol must be positive")

    @property
    def beta(self) -> float:
        return self.series.params.beta

    @property
    def lam(self) -> float:
        return self.series.params.lam


def make_gauge(lam: float, gamma: float, order: int = 24,
               pullback_tol: float | None = None) -> GaugeSpec:
    """Convenience constructor: fixed points, series, gauge in one step."""
    params = solve_fixed_points(lam)
    series = koenigs_series(params, order)
    if pullback_tol is None:
        pullback_tol = 1e-3 * (params.beta - 1.0)
    return GaugeSpec(series=series, gamma=gamma, pullback_tol=pullback_tol)


def _local_inverse(series: LinearizerSeries, y: float) -> float:
    """L^{-1}(y) for y near beta: reverted series plus one Newton step."""
    w = y - series.params.beta
    acc = 0.0
    for c in reversed(series.inverse_coeffs):
        acc = acc * w + c
    u = acc
    d = series.derivative(u)
    if d != 0.0:
        u -= (series.value(u) - y) / d
    return u


def phi(spec: GaugeSpec, x: float) -> float:
    """Real inverse of the linearizer, defined on [beta, inf).

    Pulls x back through E^{-1}(y) = log(y/lam) until within pullback_tol
    of beta, inverts the series locally, and rescales by beta^n.  Strictly
    increasing, phi(beta) = 0, and phi(E(x)) = beta*phi(x).
    """
    beta = spec.beta
    if not math.isfinite(x):
        raise DomainError(f"phi requires finite x >= beta, got {x}")
    if x < beta:
        # tolerate rounding-level undershoot (e.g. 1/(1/beta) or log pullback)
        if beta - x <= 1e-12 * beta:
            x = beta
        else:
            raise DomainError(f"phi requires x >= beta = {beta}, got {x}")
    log_lam = math.log(spec.lam)
    n = 0
    while x - beta > spec.pullback_tol:
        x = math.log(x) - log_lam
        n += 1
        if n > _PULLBACK_CAP:
            raise ConvergenceError("pullback did not reach the linearization disk")
    return beta ** n * _local_inverse(spec.series, x)


def phi_log(spec: GaugeSpec, log_x: float) -> float:
    """phi evaluated from log(x); handles arguments far beyond overflow.

    Uses one pullback step in log coordinates: phi(x) = beta * phi(log(x/lam)),
    valid for every x >= beta.
    """
    beta = spec.beta
    if log_x < math.log(beta) - 1e-12:
        raise DomainError("phi_log requires log_x >= log(beta)")
    pulled = log_x - math.log(spec.lam)
    return beta * phi(spec, pulled)


def gauge_h(spec: GaugeSpec, t: float) -> float:
    """h(t) = t^2 * phi(1/t)^gamma on (0, 1/beta], extended by h(0) = 0.

    For gamma > 0 the function is strictly increasing only on a small-t
    interval (it returns to 0 at t = 1/beta together with phi); gauge
    comparisons should stay well below 1/beta.
    """
    if t == 0.0:
        return 0.0
    if t < 0.0 or t > 1.0 / spec.beta:
        raise DomainError(f"gauge argument t={t} outside (0, 1/beta]")
    return t * t * phi(spec, 1.0 / t) ** spec.gamma


def gauge_equivalence_ratio(spec1: GaugeSpec, spec2: GaugeSpec,
                            t_grid: Sequence[float]) -> tuple[float, float]:
    """Extremes of h1(t)/h2(t) over t_grid for exponent-matched gauges.

    Requires beta1^gamma1 = beta2^gamma2 within 1e-10 relative; under that
    matching the two gauges are equivalent up to bounded constants.
    """
    m1 = spec1.gamma * math.log(spec1.beta)
    m2 = spec2.gamma * math.log(spec2.beta)
    if abs(m1 - m2) > 1e-10 * max(1.0, abs(m1)):
        raise PreconditionError(
            f"beta1^gamma1 != beta2^gamma2 (log mismatch {m1} vs {m2})")
    ratios = []
    for t in t_grid:
        h2 = gauge_h(spec2, t)
        if h2 == 0.0:
            raise DomainError(f"h2 vanishes at t={t}")
        ratios.append(gauge_h(spec1, t) / h2)
    return min(ratios), max(ratios)
