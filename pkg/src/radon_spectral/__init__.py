"""Spectral cut-off estimation for the Radon-transform regression model and the
weighted empirical process of its residuals."""

from .basis import (
    BasisIndex,
    BrainPoint,
    DetectorPoint,
    chebyshev_U,
    chebyshev_U_derivative,
    index_set,
    psi,
    radial_poly,
    radial_poly_derivative,
    zernike_phi,
)
from .design import DesignGrid, GridCell, build_grid, cell_weight, radial_design_point
from .empirical import (
    EmpiricalProcessEval,
    ErrorLaw,
    covariance_kernel,
    linearization_gap,
    process,
    residuals,
    weighted_ecdf,
    weighted_ecdf_batch,
)
from .errors import CapabilityError, ConsistencyError, DomainError, RadonSpectralError, UsageError
from .estimator import (
    BandwidthRule,
    FilterSpec,
    SinogramData,
    default_bandwidth,
    ellipsoid_norm,
    estimate_at,
    estimate_coefficient,
    estimator_radon_trace,
    spectral_estimate,
)
from .harness import (
    DEGREE_TWO_PHANTOM,
    ExperimentConfig,
    PhantomSpec,
    covariance_study,
    generate_data,
    linearization_study,
    polar_eval_grid,
    rate_study,
)
from .radon import (
    CoefficientField,
    FieldFunction,
    evaluate_expansion,
    expansion_derivative,
    radon_line_integral,
    svd_forward,
    svd_inverse,
)

__version__ = "0.1.0"
