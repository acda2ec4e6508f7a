"""curvatura: total mean curvatures of level-set hypersurfaces in model
Riemannian manifolds, with quadrature-backed verification of the comparison
identity and its corollaries."""

from .errors import (
    CapabilityError,
    ChartSingularityError,
    ConfigError,
    CurvaturaError,
    DegenerateGradientError,
    GeometryError,
)
from .symmetric_algebra import (
    NewtonOperator,
    double_factorial,
    jacobi_eigh,
    kronecker_delta,
    newton_operator,
    newton_partial_form,
    sigma_elementary,
    sigma_hessian,
    sigma_hessian_eig,
    sigma_hessian_kronecker,
    trace_identity_residual,
)
from .model_manifolds import (
    ChartPoint,
    CurvatureTensorData,
    ModelManifold,
    WarpingProfile,
    christoffel_at,
    constant_curvature,
    euclidean,
    linear_profile,
    metric_at,
    poly3_profile,
    profile_by_name,
    riemann_at,
    sinh_profile,
    sphere_data,
    sphere_total_mean_curvature,
    unit_sphere_volume,
    warped,
)
from .level_set_geometry import (
    HessianData,
    OffCenterDistanceField,
    PrincipalFrameData,
    QuadraticFormField,
    RadialDistanceField,
    RadialSquaredHalfField,
    ScalarField,
    div_newton_fd,
    div_newton_frame,
    field_from_spec,
    hessian_frame,
    level_mean_curvature,
    principal_frame,
    reilly1_residual,
    reilly2_residual,
)
from .quadrature import (
    IntegralResult,
    QuadratureSpec,
    coarea_volume_integral,
    radial_integral,
    surface_integral,
)
from .curvature_integrals import (
    ComparisonBreakdown,
    MeanCurvatureReport,
    ball_bound,
    comparison_correction_residual,
    comparison_rhs,
    comparison_rhs_constant,
    m1_volume_bound,
    ricci_comparison,
    solanes_prediction,
    total_mean_curvature,
)

__version__ = "0.1.0"
