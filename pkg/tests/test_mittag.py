import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugemeasure import covering, mittag
from gaugemeasure.errors import ConvergenceError, DomainError, PreconditionError


class TestGammaFn:
    @pytest.mark.parametrize("x,expected", [(1.0, 1.0), (0.5, math.sqrt(math.pi)),
                                            (5.0, 24.0), (2.0, 1.0)])
    def test_known_values(self, x, expected):
        assert mittag.gamma_fn(x) == pytest.approx(expected, rel=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            mittag.gamma_fn(0.0)
        with pytest.raises(DomainError):
            mittag.gamma_fn(-2.5)

    def test_large_arguments_use_log_variant(self):
        with pytest.raises(DomainError):
            mittag.gamma_fn(171.0)
        assert mittag.log_gamma(500.0) == pytest.approx(math.lgamma(500.0))


class TestSeries:
    def test_exponential_case(self):
        assert mittag.ml_series(1.0, 1.0) == pytest.approx(math.e, rel=1e-12)

    def test_half_order_is_cosh_sqrt(self):
        assert mittag.ml_series(0.5, 4.0).real == pytest.approx(math.cosh(2.0), rel=1e-12)

    def test_value_at_zero(self):
        for rho in (0.7, 1.0, 2.5, 6.0):
            assert mittag.ml_series(rho, 0.0) == 1.0 + 0.0j

    def test_closed_form_exp_right_half_disk(self):
        # 100 points, |z| <= 10 with Re z >= 0: double-precision summation
        # cannot resolve the cancelling left half at 1e-10 relative
        worst = 0.0
        for kr in range(10):
            for ka in range(10):
                r = 10.0 * (kr + 1) / 10.0
                th = -math.pi / 2.0 + math.pi * ka / 9.0
                z = complex(r * math.cos(th), r * math.sin(th))
                ref = cmath.exp(z)
                worst = max(worst, abs(mittag.ml_series(1.0, z) - ref) / abs(ref))
        assert worst <= 1e-10

    def test_closed_form_cosh(self):
        worst = 0.0
        for k in range(50):
            x = 20.0 * (k + 1) / 50.0
            ref = math.cosh(math.sqrt(x))
            worst = max(worst, abs(mittag.ml_series(0.5, x).real - ref) / ref)
        assert worst <= 1e-10

    def test_term_cap_raises(self):
        # term peak sits near rho*|z|^rho, past the cap but below overflow
        with pytest.raises(ConvergenceError):
            mittag.ml_series(20.0, 1.382)

    def test_overflowing_sum_raises(self):
        with pytest.raises(ConvergenceError):
            mittag.ml_series(5.0, 30.0)

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            mittag.ml_series(-1.0, 1.0)
        with pytest.raises(DomainError):
            mittag.ml_series(1.0, 1.0, tol=0.0)

    @given(st.floats(min_value=0.6, max_value=4.0),
           st.floats(min_value=-3.0, max_value=3.0),
           st.floats(min_value=-3.0, max_value=3.0))
    @settings(max_examples=30, deadline=None)
    def test_conjugate_symmetry(self, rho, x, y):
        a = mittag.ml_series(rho, complex(x, y))
        b = mittag.ml_series(rho, complex(x, -y))
        assert a.real == pytest.approx(b.real, rel=1e-12, abs=1e-12)
        assert a.imag == pytest.approx(-b.imag, rel=1e-12, abs=1e-12)


class TestSector:
    def test_rho_one_is_plain_exponential(self):
        v = mittag.ml_sector(1.0, 50.0, R=10.0)
        assert v == pytest.approx(math.log(1.0) + 50.0)

    def test_formula_arithmetic(self):
        v = mittag.ml_sector(2.0, 10.0, R=5.0)
        assert v == pytest.approx(math.log(2.0) + 100.0)

    def test_against_series_oracle_moderate_z(self):
        # below the cutoff the series is trustworthy and already matches the
        # dominant term closely
        s = mittag.ml_series(3.0, 3.0)
        ratio = s / (3.0 * cmath.exp(27.0))
        assert abs(ratio - 1.0) <= 0.05

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            mittag.ml_sector(2.0, 1.0, R=5.0)
        with pytest.raises(DomainError):
            mittag.ml_sector(2.0, -10.0, R=5.0)  # arg pi outside sector


class TestHybridEval:
    def test_value_at_zero_is_scaling(self):
        p = mittag.ml_params(2.0, a=0.25)
        lv = mittag.ml_eval(p, 0.0)
        assert lv.log_mod == pytest.approx(math.log(0.25))
        assert lv.branch == "series"

    def test_seam_consistency(self):
        p = mittag.ml_params(3.0, a=1.0)
        seam = p.r_switch
        for r in (seam * 0.98, seam * 0.9999):
            series_lm = math.log(abs(mittag.ml_series(3.0, complex(r, 0.0))))
            sector_lm = math.log(3.0) + r ** 3
            assert abs(series_lm - sector_lm) <= 0.05 * abs(sector_lm)

    def test_bound_branch_outside_sector(self):
        p = mittag.ml_params(3.0, a=1.0)
        lv = mittag.ml_eval(p, -10.0)
        assert lv.branch == "bound"
        assert lv.log_mod <= math.log(p.a * (1.0 + 1e-12))

    def test_branch_dispatch(self):
        p = mittag.ml_params(2.0, a=1.0)
        assert mittag.ml_eval(p, 1.0).branch == "series"
        assert mittag.ml_eval(p, p.r_switch * 2.0).branch == "sector"
        assert mittag.ml_eval(p, -2.0 * p.r_switch).branch == "bound"


class TestCalibration:
    def test_rho_one_closed_form(self):
        log_a = mittag.calibrate_log_scaling(1.0, 10.0)
        assert log_a == pytest.approx(math.log(0.5) - 10.0, abs=1e-9)
        a = mittag.calibrate_scaling(1.0, 10.0)
        assert a <= 0.5 * math.exp(-10.0) * (1.0 + 1e-9)

    def test_scaled_values_bounded_on_cutoff_circle(self, ml2_calibrated):
        p = ml2_calibrated
        worst = -math.inf
        for k in range(128):
            th = 2.0 * math.pi * k / 128
            z = complex(p.R * math.cos(th), p.R * math.sin(th))
            worst = max(worst, mittag.ml_log_modulus(p, z))
        assert worst <= math.log(0.5) + 1e-9

    def test_sampling_stability(self):
        la1 = mittag.calibrate_log_scaling(3.0, 20.0, n_samples=256)
        la2 = mittag.calibrate_log_scaling(3.0, 20.0, n_samples=1024)
        # a changes by < 10 percent, i.e. |delta log a| < log(1.1)
        assert abs(la1 - la2) < math.log(1.1)

    def test_underflow_reported_as_zero(self):
        # rho=3, R=20 drives a below double range; log form stays usable
        la = mittag.calibrate_log_scaling(3.0, 20.0)
        assert la < -700.0
        assert mittag.calibrate_scaling(3.0, 20.0) == 0.0


class TestMLParams:
    def test_rejects_small_rho(self):
        with pytest.raises(DomainError):
            mittag.MLParams(rho=0.5, log_a=0.0, R=8.0, delta=0.5, C0=1.0)

    def test_rejects_small_cutoff(self):
        with pytest.raises(DomainError):
            mittag.MLParams(rho=2.0, log_a=0.0, R=0.5, delta=0.5, C0=1.0)

    def test_delta_range(self):
        with pytest.raises(DomainError):
            mittag.MLParams(rho=2.0, log_a=0.0, R=8.0, delta=4.0, C0=0.0)

    def test_seam_is_cancellation_safe(self):
        for rho in (0.7, 1.0, 2.0, 5.0):
            p = mittag.ml_params(rho, a=1.0)
            assert p.r_switch ** rho == pytest.approx(mittag.SERIES_SAFE_CAP, rel=1e-9)


class TestSectorGeometry:
    def test_band_membership_rho_one(self):
        spec = mittag.SectorSpec(rho=1.0)
        assert mittag.sector_contains(spec, complex(0.0, math.pi))
        assert not mittag.sector_contains(spec, 0.0)

    def test_band_edges_rho_two(self):
        spec = mittag.SectorSpec(rho=2.0)
        assert not mittag.sector_contains(spec, complex(0, math.pi / 4 - 0.01))
        assert mittag.sector_contains(spec, complex(0, math.pi / 4 + 0.01))

    def test_periodicity(self):
        spec = mittag.SectorSpec(rho=3.0)
        z = complex(2.0, 1.0)
        assert mittag.sector_contains(spec, z) == \
            mittag.sector_contains(spec, z + 2j * math.pi * 5)


class TestPacking:
    @pytest.mark.parametrize("rho,target", [(1.0, 0.45), (2.0, 0.70), (5.0, 0.85)])
    def test_density_axis_aligned(self, rho, target):
        box = covering.Square(center=0j, side=1000.0)
        squares = mittag.sector_square_packing(mittag.SectorSpec(rho=rho), box)
        dens = sum(s.area for s in squares) / box.area
        assert dens >= target

    def test_density_high_order(self):
        box = covering.Square(center=250 + 9j, side=1000.0)
        squares = mittag.sector_square_packing(mittag.SectorSpec(rho=100.0), box)
        assert sum(s.area for s in squares) / box.area >= 0.94

    def test_rotated_box(self):
        box = covering.Square(center=3 + 4j, side=1000.0, angle=math.pi / 6)
        squares = mittag.sector_square_packing(mittag.SectorSpec(rho=2.0), box)
        assert sum(s.area for s in squares) / box.area >= 0.70

    def test_squares_disjoint_and_inside(self):
        spec = mittag.SectorSpec(rho=2.0)
        box = covering.Square(center=5 - 2j, side=200.0, angle=0.3)
        squares = mittag.sector_square_packing(spec, box)
        assert squares
        side = spec.band_height
        for sq in squares:
            assert sq.side == side
            for c in sq.corners():
                assert box.contains_point(c, closed=True, tol=1e-9)
                assert mittag.sector_contains(spec, complex(c.real, c.imag + 1e-12)) \
                    or mittag.sector_contains(spec, complex(c.real, c.imag - 1e-12))
        for i in range(len(squares)):
            for j in range(i + 1, len(squares)):
                a, b = squares[i], squares[j]
                assert max(abs(a.center.real - b.center.real),
                           abs(a.center.imag - b.center.imag)) >= side - 1e-9

    def test_small_box_rejected(self):
        with pytest.raises(PreconditionError):
            mittag.sector_square_packing(mittag.SectorSpec(rho=2.0),
                                         covering.Square(center=0j, side=20.0))
