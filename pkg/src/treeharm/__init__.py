"""treeharm: harmonic analysis on homogeneous trees at desk scale.

Spherical functions and their derivatives, radial convolution and Fourier
transforms, Poisson transforms against boundary sectors, multiplier
operators with spectral-projection machinery, weak/Hardy norm diagnostics,
and a harness that checks eigenfunction-decomposition theorems on truncated
trees.
"""

from .errors import (
    ConfigError,
    DegenerateError,
    DepthError,
    DistinctnessError,
    EvaluationError,
    IllConditionedError,
    InvertibilityError,
    ParameterError,
    SingularityError,
    SynthesisError,
    TreeharmError,
    TruncationError,
    UnsupportedOrderError,
    UnsupportedScenarioError,
)
from .tree import (
    Sector,
    TreeGeometry,
    ball_size,
    build_tree,
    gjn_count,
    height,
    height_matrix,
    sectors,
    sphere_size,
)
from .spectral import (
    ExtremaReport,
    SpectralSymbol,
    StripParams,
    ball_symbol,
    beta_points,
    c_func,
    c_deriv,
    delta,
    gamma,
    gamma_deriv,
    gamma_j,
    heat_symbol,
    phi,
    phi_cap,
    phi_closed,
    phi_deriv,
    phi_profile,
    strip_min_modulus,
    symbol_ball,
    symbol_extrema,
    symbol_heat,
    symbol_laplacian,
    symbol_poly,
    symbol_sphere,
    tau,
    wrap_alpha,
)
from .transforms import (
    BoundaryFunction,
    RadialFunction,
    VertexFunction,
    convolve_radial,
    dirac,
    dirac_radial,
    helgason_ft,
    laplacian_kernel,
    pairing,
    poisson_transform,
    radialize,
    spherical_ft,
    synthesize_kernel,
    synthesize_kernel_adaptive,
)
from .multipliers import (
    MultiplierOperator,
    ball_avg,
    ball_avg_op,
    heat_apply,
    heat_op,
    invert_multiplier,
    kernel_op,
    laplacian_apply,
    laplacian_op,
    laplacian_radial,
    laplacian_radial_extend,
    psi_of_L_apply,
    psi_of_L_op,
    sphere_avg,
    sphere_avg_op,
)
from .eigenproject import (
    EigenDecomposition,
    GrowthReport,
    ProjectionPolynomial,
    confluent_vandermonde_solve,
    eigen_decompose,
    generalized_eigen_basis,
    growth_order_probe,
    q_factor,
    q_factor_from_polynomial,
)
from .norms import (
    BallSumTable,
    NormReport,
    ball_sum_diagnostic,
    hardy_norm,
    hardy_norm_power_weighted,
    lp_norm,
    schwartz_seminorm,
    weak_lp_norm,
)

__version__ = "0.1.0"
