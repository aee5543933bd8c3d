"""gldlm: L-moment toolkit for the generalized lambda distribution."""

from .core import (
    GldParams,
    Region,
    RegionTag,
    cdf,
    classify_region,
    pdf,
    quantile,
    quantile_density,
    sample,
    support,
    validate,
)
from .lmoments import (
    LMomentSet,
    LegendreCoeffs,
    SYMMETRIC_TAU4_ARGMIN,
    SYMMETRIC_TAU4_MIN,
    SymmetricSolution,
    axis_case_ratios,
    feasibility_check,
    gld_lmoments,
    lmoment_ratios_from_shape,
    sample_lmoments,
    shifted_legendre,
    solve_symmetric,
    symmetric_tau4,
)
from .atlas import (
    BoundaryPolygon,
    CensusSolution,
    ContourSet,
    LambdaGrid,
    TauGrid,
    assemble_boundary,
    build_grid,
    contours,
    map_grid,
    points_in_polygon,
    potential_boundary_points,
    solution_census,
)
from .fitting import (
    FitResult,
    FitTarget,
    NelderMeadConfig,
    fit,
    fit_to_target,
    ks_statistic,
    nelder_mead,
    objective,
    recover_location_scale,
)
from .simbench import SimConfig, SimReport, format_report, run_simulation

__version__ = "0.1.0"
