import math

import numpy as np
import pytest

from gaugemeasure import dynamics, mittag
from gaugemeasure.errors import InsufficientDataError, PreconditionError


class TestIterate:
    def test_attracting_fixed_point_constant(self, exp_family, params_01):
        orbit = dynamics.iterate(exp_family, params_01.q, 50)
        assert not orbit.escaped
        assert orbit.escape_index is None
        assert all(abs(z - params_01.q) < 1e-12 for z in orbit.points)

    def test_explosive_escape_from_100(self, exp_family):
        orbit = dynamics.iterate(exp_family, 100.0, 50, bailout=1e10)
        assert orbit.escaped
        assert orbit.escape_index is not None and orbit.escape_index <= 3
        assert len(orbit.points) == orbit.escape_index + 1

    def test_repelling_fixed_point_drift(self, exp_family, params_01):
        orbit = dynamics.iterate(exp_family, params_01.beta, 30)
        assert not orbit.escaped
        for a, b in zip(orbit.points, orbit.points[1:]):
            assert abs(b - a) < 1e-9

    def test_orbit_chain_recheck(self, exp_family):
        lam = exp_family.params.lam
        orbit = dynamics.iterate(exp_family, 1.0 + 0.5j, 20)
        for a, b in zip(orbit.points, orbit.points[1:]):
            ref = lam * complex(np.exp(a))
            assert abs(b - ref) <= 1e-14 * max(1.0, abs(ref))

    def test_determinism_bit_for_bit(self, exp_family):
        o1 = dynamics.iterate(exp_family, 0.3 + 2.1j, 64)
        o2 = dynamics.iterate(exp_family, 0.3 + 2.1j, 64)
        assert o1.points == o2.points

    def test_preconditions(self, exp_family):
        with pytest.raises(PreconditionError):
            dynamics.iterate(exp_family, 0j, 0)
        with pytest.raises(PreconditionError):
            dynamics.iterate(exp_family, 0j, 10, bailout=-1.0)


class TestClassify:
    def test_fixed_points(self, exp_family, params_01):
        assert dynamics.classify(exp_family, params_01.q, 100) == "Bounded"
        assert dynamics.classify(exp_family, 50.0, 100) == "Escaping"
        assert dynamics.classify(exp_family, params_01.beta, 100) == "Undecided"

    def test_real_axis_right_of_beta_escapes(self, exp_family, params_01):
        for x in np.linspace(params_01.beta + 0.05, 60.0, 40):
            assert dynamics.classify(exp_family, float(x), 300) == "Escaping"

    def test_stability_under_doubling(self, exp_family, params_01):
        # doubling the iteration cap never flips a decided classification
        rng = np.random.default_rng(11)
        pts = [complex(params_01.beta + rng.uniform(-1, 1),
                       10 * math.pi + rng.uniform(-2, 2)) for _ in range(100)]
        for n in (100, 200):
            first = [dynamics.classify(exp_family, z, n) for z in pts]
            second = [dynamics.classify(exp_family, z, 2 * n) for z in pts]
            for a, b in zip(first, second):
                if a != "Undecided" and b != "Undecided":
                    assert a == b

    def test_ml_orbit_in_disk_is_undecided(self, ml2_family):
        # calibrated scaling maps the disk into itself without an attracting
        # real fixed point detection, so the orbit stays unclassified
        assert dynamics.classify(ml2_family, 1.0 + 1.0j, 40) == "Undecided"


class TestEscapeGrid:
    def test_matches_pointwise_classify(self, exp_family):
        bbox = (-2.0, 8.0, -8.0, 8.0)
        codes = dynamics.escape_grid(exp_family, bbox, 32, 32, n_max=80)
        names = {0: "Undecided", 1: "Bounded", 2: "Escaping"}
        xs = bbox[0] + (np.arange(32) + 0.5) * (bbox[1] - bbox[0]) / 32
        ys = bbox[2] + (np.arange(32) + 0.5) * (bbox[3] - bbox[2]) / 32
        for i in range(0, 32, 5):
            for j in range(0, 32, 5):
                expected = dynamics.classify(exp_family, complex(xs[j], ys[i]), 80)
                assert names[int(codes[i, j])] == expected

    def test_thread_count_invariance(self, exp_family):
        bbox = (-2.0, 8.0, -8.0, 8.0)
        grids = [dynamics.escape_grid(exp_family, bbox, 64, 64, threads=t)
                 for t in (1, 3, 8)]
        assert np.array_equal(grids[0], grids[1])
        assert np.array_equal(grids[0], grids[2])


class TestMaxModulus:
    def test_exponential_closed_form(self, exp_family):
        for r in (0.5, 10.0, 300.0):
            lm = dynamics.max_modulus(exp_family, r, 256)
            assert lm == pytest.approx(math.log(0.1) + r, abs=1e-9)

    def test_small_radius_limit(self, exp_family):
        lm = dynamics.max_modulus(exp_family, 1e-9, 64)
        assert lm == pytest.approx(math.log(0.1), abs=1e-8)

    def test_small_radius_limit_ml(self, ml2_family):
        # f(0) = 1, so the scaled family tends to its scaling factor
        lm = dynamics.max_modulus(ml2_family, 1e-9, 64)
        assert lm == pytest.approx(ml2_family.params.log_a, abs=1e-8)

    def test_ml_sector_dominates(self):
        p = mittag.ml_params(3.0, a=1.0)
        fam = dynamics.ScaledMittagLeffler(p)
        lm = dynamics.max_modulus(fam, 10.0, 512)
        expected = p.log_a + math.log(3.0) + 10.0 ** 3
        assert abs(lm - expected) <= 0.01 * abs(expected)

    def test_ml_series_cross_check_moderate_radius(self):
        p = mittag.ml_params(2.0, a=1.0)
        fam = dynamics.ScaledMittagLeffler(p)
        r = 0.5 * p.r_switch
        lm = dynamics.max_modulus(fam, r, 256)
        # the series maximum on the circle sits on the positive axis
        direct = math.log(abs(mittag.ml_series(2.0, complex(r, 0.0))))
        assert lm == pytest.approx(direct, rel=1e-9)

    def test_preconditions(self, exp_family):
        with pytest.raises(PreconditionError):
            dynamics.max_modulus(exp_family, -1.0)
        with pytest.raises(PreconditionError):
            dynamics.max_modulus(exp_family, 1.0, 32)


class TestOrderEstimate:
    def test_exponential_order_one(self, exp_family):
        est = dynamics.order_estimate(exp_family, [100.0, 200.0, 400.0, 800.0])
        assert est.slope == pytest.approx(1.0, abs=0.02)

    @pytest.mark.parametrize("rho,tol", [(2.0, 0.1), (3.0, 0.1)])
    def test_ml_order_recovery(self, rho, tol):
        fam = dynamics.ScaledMittagLeffler(mittag.ml_params(rho, a=1.0))
        est = dynamics.order_estimate(fam, [5.0, 10.0, 20.0, 40.0])
        assert est.slope == pytest.approx(rho, abs=tol)

    def test_ml_order_one_scaled_exponential(self):
        # rho = 1 with unit scaling is e^z; keep radii large enough that the
        # log lam offset is negligible
        fam = dynamics.ScaledMittagLeffler(mittag.ml_params(1.01, a=1.0))
        est = dynamics.order_estimate(fam, [40.0, 80.0, 160.0, 320.0])
        assert est.slope == pytest.approx(1.01, abs=0.05)

    def test_insufficient_data(self, ml2_family):
        # heavily scaled-down family has log M <= 0 at small radii
        with pytest.raises(InsufficientDataError):
            dynamics.order_estimate(ml2_family, [1.5, 2.0, 3.0, 4.0])

    def test_preconditions(self, exp_family):
        with pytest.raises(PreconditionError):
            dynamics.order_estimate(exp_family, [10.0, 20.0, 40.0])
        with pytest.raises(PreconditionError):
            dynamics.order_estimate(exp_family, [10.0, 5.0, 20.0, 40.0])
