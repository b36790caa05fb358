"""Numerical library for unitary valuations of degree 2 and 3 on convex
bodies in C^n: two independent evaluation routes, the hyperbolicity and
spectral machinery behind their quadratic inequalities, and experiment
drivers reproducing every inequality, threshold, and counterexample at desk
scale."""

from .bodies import (
    Ball,
    ConvexBody,
    DiffSupports,
    Ellipsoid,
    FnCombo,
    MinkowskiCombo,
    PerturbedBall,
    Polytope,
    SphereFunction,
    SupportFn,
    ball,
    body_to_document,
    minkowski,
    parse_body,
    point,
    proj_volume,
    restricted_hessian,
    scale,
    translate,
)
from .errors import ConeViolation, SchemaError, UnsupportedDimension, UnsupportedSmoothness
from .forms import (
    GardingGap,
    SymForm,
    ValuationCoeffs,
    garding_gap,
    hessian_q_eigenvalues,
    in_hyperbolicity_range,
    minor,
    p_mu,
    p_mu_polarized,
)
from .geometry import (
    AdaptedFrame,
    AmbientSpace,
    Subspace,
    adapted_frame,
    haar_unitary,
    kahler_angle_sq,
    sample_orbit,
)
from .harmonics import (
    BiDegreeHarmonic,
    dmu_eigenvalue,
    dmuB_eigenvalue,
    hermitian_cross_term,
    jacobi_Q,
    jn_eigenvalue,
    laplace_eigenvalue,
    spectrum_window,
    spherical_function,
)
from .operators import area_measure_density, d_mu, d_mu_B, d_mu_spectral, valuation_operator_route
from .spheregrid import SphereGrid, build_grid
from .valuations import (
    UnitaryValuation,
    eval_grassmannian,
    eval_mixed,
    klain_value,
    mean_width,
    phi_coeffs,
    phi_valuation,
    psi_coeffs,
    psi_valuation,
)

__version__ = "0.1.0"
