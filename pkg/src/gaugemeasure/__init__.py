"""Desk-scale numerics for gauged Hausdorff measure of escaping sets.

Building blocks: Koenigs linearizers and the derived gauges for the real
exponential family, Mittag-Leffler evaluation with sector asymptotics,
logarithmic-tract scans, square-mesh covering sums, the nesting-product
divergence criterion, bounded-overlap center covers, and numerical
verification of the classical distortion bounds.
"""

from ._kernels import BACKEND
from .covering import (
    BoolGrid,
    CoverReport,
    Mesh,
    N0_IMPL,
    NestingFamily,
    Square,
    R_sequence,
    besicovitch_cover,
    density,
    gamma_thresholds,
    gauged_sum,
    grid_from_tract,
    load_nesting_family,
    mcmullen_product,
    mcmullen_product_orbit,
    mesh_cover,
    nesting_validate,
    r_sequence,
    save_nesting_family,
    scaling_series,
)
from .distortion import (
    DistortionEstimate,
    density_transfer_check,
    estimate_distortion,
    koebe_derivative_bounds,
    koebe_value_bounds,
    lemma_first_check,
    square_image_frames,
)
from .dynamics import (
    Exponential,
    FamilyMember,
    Orbit,
    OrderEstimate,
    ScaledMittagLeffler,
    classify,
    escape_grid,
    iterate,
    max_modulus,
    order_estimate,
)
from .errors import (
    ConvergenceError,
    DomainError,
    GaugeMeasureError,
    IllConditionedError,
    InsufficientDataError,
    NonInjectiveError,
    PreconditionError,
)
from .linearizer import (
    ExpParams,
    GaugeSpec,
    LinearizerSeries,
    gauge_equivalence_ratio,
    gauge_h,
    koenigs_series,
    make_gauge,
    phi,
    phi_log,
    solve_fixed_points,
)
from .logtransform import (
    AngularMeasureTable,
    TractGrid,
    ab_integral_check,
    angular_measure_psi,
    exp_tract_F,
    expansion_bound_check,
    tract_scan,
    u_r_density,
)
from .mittag import (
    LogComplex,
    MLParams,
    SectorSpec,
    calibrate_scaling,
    calibrated_params,
    gamma_fn,
    log_gamma,
    ml_eval,
    ml_params,
    ml_sector,
    ml_series,
    sector_contains,
    sector_square_packing,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
