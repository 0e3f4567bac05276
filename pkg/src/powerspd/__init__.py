"""Riemannian geometry of the SPD cone under the beta-power potential metric."""

from .distance import (
    DistanceReport,
    curve_length,
    det_along_geodesic,
    distance_beta,
    geodesic_speed,
)
from .errors import (
    BetaOutOfRange,
    BranchMismatch,
    ConvergenceFailure,
    DimensionMismatch,
    GammaOutOfRange,
    LeftCone,
    LinearlyDependentPair,
    NoConvergence,
    NotPositiveDefinite,
    NotSymmetric,
    PowerSpdError,
    ZeroPower,
)
from .geodesic import (
    Branch,
    GeodesicDescriptor,
    alpha_t,
    build_geodesic,
    eta_t,
    geodesic,
    geodesic_point,
)
from .geometry import BetaBounds, ZetaData, beta_bounds, delta, gamma_beta, zeta_data
from .linalg import cholesky, geometric_mean, logdet, matrix_power_rel, rel_eigvals, sym_eig
from .means import (
    GBeta,
    Geometric,
    LimPalfia,
    MeanRequest,
    PowerEuclidean,
    beta_limit_scan,
    check_properties,
    mean,
)
from .metric import BetaParam, hessian_fd_check, metric_eval, potential

__version__ = "0.1.0"
