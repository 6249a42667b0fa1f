import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugemeasure import covering, distortion
from gaugemeasure.errors import DomainError, NonInjectiveError, PreconditionError

# sharp derivative-ratio bound for z^4 on {4(x-1)^2 + y^2 < 1}: the
# boundary point farthest from the origin sits at cos(phi) = 2/3 with
# |z|^2 = 7/3, the nearest at |z| = 1/2, so sup|f'|/inf|f'| = 8*(7/3)^(3/2)
Z4_L_BOUND = 8.0 * (7.0 / 3.0) ** 1.5


def ellipse_samples(n_r=12, n_t=24, r_max=0.97):
    pts = []
    for rr in np.linspace(0.1, r_max, n_r):
        for t in np.linspace(0.0, 2.0 * math.pi, n_t, endpoint=False):
            pts.append(complex(1.0 + 0.5 * rr * math.cos(t), rr * math.sin(t)))
    return pts


class TestKoebeBounds:
    def test_center_collapse(self):
        lo, hi = distortion.koebe_derivative_bounds(2.0, 3.0, 0.0)
        assert lo == hi == pytest.approx(3.0)
        vlo, vhi = distortion.koebe_value_bounds(2.0, 3.0, 0.0)
        assert vlo == vhi == 0.0

    def test_koebe_map_is_extremal(self):
        for s in (0.2, 0.5, 0.8):
            _, hi = distortion.koebe_derivative_bounds(1.0, 1.0, s)
            deriv = abs(distortion.fd_derivative(distortion.koebe_map, s + 0j, 1e-8))
            assert deriv == pytest.approx(hi, rel=1e-6)
            _, vhi = distortion.koebe_value_bounds(1.0, 1.0, s)
            assert abs(distortion.koebe_map(s)) == pytest.approx(vhi, rel=1e-12)

    def test_identity_inside_bounds(self):
        for s in (0.1, 0.5, 0.9):
            lo, hi = distortion.koebe_derivative_bounds(1.0, 1.0, s)
            assert lo <= 1.0 <= hi
            vlo, vhi = distortion.koebe_value_bounds(1.0, 1.0, s)
            assert vlo <= s <= vhi

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            distortion.koebe_derivative_bounds(1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            distortion.koebe_value_bounds(1.0, -1.0, 0.5)

    @given(st.floats(min_value=0.05, max_value=0.95))
    @settings(max_examples=50, deadline=None)
    def test_sandwich_for_univalent_corpus(self, s):
        # e^z is univalent on the unit disk; finite differences must stay
        # inside the sharp bounds normalized at the center
        z0 = 0.3 + 0.1j
        r = 1.0
        d0 = abs(distortion.fd_derivative(cmath.exp, z0, 1e-8))
        z = z0 + s * cmath.exp(0.7j)
        m = abs(distortion.fd_derivative(cmath.exp, z, 1e-8))
        lo, hi = distortion.koebe_derivative_bounds(r, d0, s)
        assert lo * (1.0 - 0.01) <= m <= hi * (1.0 + 0.01)


class TestEstimateDistortion:
    def test_affine_is_perfect(self):
        est = distortion.estimate_distortion(lambda z: (2.0 + 1.0j) * z + 3.0,
                                             covering.Square(center=0j, side=1.0))
        assert est.L == pytest.approx(1.0, abs=1e-9)
        assert est.D_lower == pytest.approx(1.0, abs=1e-9)

    def test_exponential_small_square(self):
        m = 16
        est = distortion.estimate_distortion(cmath.exp,
                                             covering.Square(center=1 + 1j, side=0.1),
                                             n_samples=m * m)
        # sample grid spans (m-1)/m of the side in each direction
        assert est.L == pytest.approx(math.exp(0.1 * (m - 1) / m), abs=1e-3)
        assert est.L <= math.exp(0.1 * math.sqrt(2.0))

    def test_quartic_bounded_ratio_unbounded_distortion(self):
        pts = ellipse_samples()
        est = distortion.estimate_distortion_points(lambda z: z ** 4, pts, 1e-7)
        assert est.L < Z4_L_BOUND
        corner = pts + [1 + 1j * (1 - e) for e in (1e-2, 1e-3)] \
            + [1 - 1j * (1 - e) for e in (1e-2, 1e-3)]
        est2 = distortion.estimate_distortion_points(lambda z: z ** 4, corner, 1e-7)
        assert est2.L < Z4_L_BOUND
        assert est2.D_lower > 20.0 * est2.L  # bilipschitz ratio blows up

    def test_non_injective_detected(self):
        pts = [0.5 + 0.5j, -0.5 + 0.5j, 0.5 - 0.5j, -0.5 - 0.5j, 0.1 + 0j]
        with pytest.raises(NonInjectiveError):
            distortion.estimate_distortion_points(lambda z: z * z, pts, 1e-8)

    def test_convex_image_ratio_dominates_pairs(self):
        # with convex domain and image the bilipschitz ratio equals the
        # derivative ratio, so the pair-sampled lower bound cannot exceed L
        # 1% slack: chords pass between cell centers where |f'| peaks
        for f in (lambda z: (1 + 2j) * z, cmath.exp,
                  distortion.make_mobius(1.0, 0.0, -0.05, 1.0)):
            est = distortion.estimate_distortion(f, covering.Square(center=0j, side=0.4))
            assert est.L >= est.D_lower * (1.0 - 0.01)


class TestLemmaFirst:
    def test_affine_trivial(self):
        lm, lb, dm, db = distortion.lemma_first_check(lambda z: 3 * z - 1j, 0j, 1.0, 2.0)
        assert lm == pytest.approx(1.0, abs=1e-9) and lm <= lb
        assert dm == pytest.approx(1.0, abs=1e-9) and dm <= db

    def test_mobius_at_k3(self):
        f = distortion.make_mobius(1.0, 0.0, -1.0 / 3.0, 1.0)  # z / (1 - z/3)
        lm, lb, dm, db = distortion.lemma_first_check(f, 0j, 1.0, 3.0)
        assert lb == pytest.approx(16.0) and db == pytest.approx(64.0)
        assert lm <= lb and dm <= db

    def test_large_k_limit_is_rigid(self):
        # |(e^z)'| spreads by e^{2r} over the disk, so L -> 1 with the radius
        lm, lb, dm, db = distortion.lemma_first_check(cmath.exp, 1 + 1j, 0.01, 50.0)
        assert 1.0 <= lm <= math.exp(0.02) * (1.0 + 1e-6)
        assert lb == pytest.approx((51.0 / 49.0) ** 4)
        assert lm <= lb and dm <= db

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            distortion.lemma_first_check(cmath.exp, 0j, 1.0, 1.0)
        with pytest.raises(PreconditionError):
            distortion.lemma_first_check(cmath.exp, 0j, -1.0, 2.0)


class TestSquareImageFrames:
    def test_affine_exact_frames(self):
        f = distortion.make_mobius(2.0 + 1.0j, 3.0, 0.0, 1.0)  # affine
        quad = covering.Square(center=0j, side=1.0, angle=0.2)
        inner, outer, contained, contains = distortion.square_image_frames(
            f, quad, eps=0.05, kprime=10.0)
        assert contained and contains
        mag = abs(2.0 + 1.0j)
        assert inner.side == pytest.approx(mag * (1 - math.sqrt(2) * 0.05), rel=1e-6)
        assert outer.side == pytest.approx(mag * (1 + math.sqrt(2) * 0.05), rel=1e-6)

    def test_exponential_small_square(self):
        quad = covering.Square(center=1 + 0j, side=0.05)
        inner, outer, contained, contains = distortion.square_image_frames(
            cmath.exp, quad, eps=0.1, kprime=100.0, n_boundary=1000)
        assert contained and contains

    def test_mobius_with_bound_distortion(self):
        f = distortion.make_mobius(1.0, 0.0, -0.1, 1.0)
        quad = covering.Square(center=0j, side=1.0)
        d_bound = ((10.0 + 1) / (10.0 - 1)) ** 6
        inner, outer, contained, contains = distortion.square_image_frames(
            f, quad, eps=0.2, kprime=10.0, d=d_bound)
        assert contained
        # with the loose distortion bound the inner frame shrinks a lot but
        # must still sit inside the image
        assert contains

    def test_eps_out_of_range(self):
        with pytest.raises(PreconditionError):
            distortion.square_image_frames(cmath.exp,
                                           covering.Square(center=0j, side=0.1),
                                           eps=0.9, kprime=10.0)


class TestDensityTransfer:
    @staticmethod
    def _grids(nx=24, bbox=(0.0, 0.4, 0.0, 0.4)):
        cells = np.ones((nx, nx), bool)
        a = np.zeros_like(cells)
        a[: nx // 2, :] = True
        return (covering.BoolGrid(bbox=bbox, cells=a),
                covering.BoolGrid(bbox=bbox, cells=cells))

    def test_affine_exact_equality(self):
        a, u = self._grids()
        lhs, rhs = distortion.density_transfer_check(lambda z: 2 * z + 1, a, u)
        assert lhs == pytest.approx(0.5)
        assert rhs == pytest.approx(0.5, rel=1e-9)

    def test_exponential_strip(self):
        a, u = self._grids(nx=32, bbox=(0.0, 2.0, 0.0, 0.25))
        lhs, rhs = distortion.density_transfer_check(cmath.exp, a, u)
        assert lhs <= rhs * 1.05

    def test_full_mask_consistency(self):
        _, u = self._grids()
        lhs, rhs = distortion.density_transfer_check(cmath.exp, u, u)
        assert lhs == 1.0
        assert rhs >= 1.0

    def test_subset_enforced(self):
        a, u = self._grids()
        with pytest.raises(PreconditionError):
            distortion.density_transfer_check(cmath.exp, u, a)


class TestSymmetryAndComposition:
    def test_inverse_symmetry_on_matched_regions(self):
        f = distortion.make_mobius(1.0, 0.0, -0.25, 1.0)
        finv = distortion.make_mobius(1.0, 0.0, 0.25, 1.0)
        quad = covering.Square(center=0j, side=1.0)
        est_f = distortion.estimate_distortion(f, quad, n_samples=256)
        # sample the image region by pushing an offset grid forward
        offs = covering.Square(center=0.001 + 0.0015j, side=0.995)
        img_pts = [f(z) for z in distortion.square_samples(offs, 256)]
        est_inv = distortion.estimate_distortion_points(finv, img_pts, 1e-6)
        assert est_inv.D_lower == pytest.approx(est_f.D_lower, rel=0.05)

    def test_composition_submultiplicative(self, rng):
        quad = covering.Square(center=0j, side=1.0)
        for _ in range(5):
            c1 = rng.uniform(0.05, 0.3)
            c2 = rng.uniform(0.05, 0.2)
            f = distortion.make_mobius(1.0, 0.0, -c1, 1.0)
            g = distortion.make_mobius(2.0, 1.0, c2, 1.0)
            comp = lambda z: g(f(z))  # noqa: E731
            est = distortion.estimate_distortion(comp, quad, n_samples=196)
            # exact ratio bounds on covering disks of the square and its image
            lf = distortion.mobius_disk_L(1.0, 0.0, -c1, 1.0, 0j, math.sqrt(2) / 2)
            img_radius = max(abs(f(z)) for z in quad.corners())
            lg = distortion.mobius_disk_L(2.0, 1.0, c2, 1.0, 0j, img_radius)
            assert est.D_lower <= lf * lg * (1.0 + 1e-9)

    def test_mobius_disk_L_closed_form(self):
        # pole at 10, disk radius 1 centered at origin
        L = distortion.mobius_disk_L(1.0, 0.0, -0.1, 1.0, 0j, 1.0)
        assert L == pytest.approx(((10 + 1) / (10 - 1)) ** 2)
        with pytest.raises(DomainError):
            distortion.mobius_disk_L(1.0, 0.0, -1.0, 1.0, 0j, 2.0)


class TestNormalizedMaps:
    def test_identity_deviation_witness(self):
        # normalized univalent maps stay within 10% of the identity on
        # |z| < 0.02 (empirical delta witness for eps = 0.1)
        maps = [distortion.koebe_map,
                lambda z: z / (1.0 - 0.9 * z),
                lambda z: cmath.exp(z) - 1.0]
        worst = 0.0
        for f in maps:
            for k in range(32):
                t = 2.0 * math.pi * k / 32
                z = 0.0199 * cmath.exp(1j * t)
                worst = max(worst, abs(f(z) / z - 1.0))
        assert worst < 0.1
