import numpy as np
import pytest

from gaugemeasure import dynamics, linearizer, mittag


@pytest.fixture(scope="session")
def params_01():
    return linearizer.solve_fixed_points(0.1)


@pytest.fixture(scope="session")
def gauge_01(params_01):
    series = linearizer.koenigs_series(params_01, 24)
    return linearizer.GaugeSpec(series=series, gamma=1.0,
                                pullback_tol=1e-3 * (params_01.beta - 1.0))


@pytest.fixture(scope="session")
def exp_family(params_01):
    return dynamics.Exponential(params_01)


@pytest.fixture(scope="session")
def ml2_calibrated():
    return mittag.calibrated_params(2.0)


@pytest.fixture(scope="session")
def ml2_family(ml2_calibrated):
    return dynamics.ScaledMittagLeffler(ml2_calibrated)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
