"""Geometry of orthogonal projections and spectral subspace perturbation bounds.

Operator angles between subspaces, geodesics and the length metric on
projections, the arcsine law for path length, and a posteriori bounds on
the rotation of spectral subspaces, all on dense finite matrices.
"""

from .constants import c_pi_value, c_star_value, compute_c_pi, compute_c_star
from .estimators import AngularOperator, SpectralProjector
from .exceptions import (
    GapClosedError,
    InputError,
    NotAGraphError,
    PreconditionError,
    ProjGeomError,
)
from .geometry import (
    Projection,
    SubspacePair,
    angle_addition_residual,
    angular_operator,
    distance,
    four_projections_factorization,
    project_onto_span,
    projection_from_graph,
    rotation_unitary,
)
from .linalg import eig_hermitian, matrix_function, operator_norm, sqrt_psd, inv_sqrt_psd
from .paths import (
    ProjectionPath,
    geodesic,
    polygonal_length,
    rho,
    riemannian_length,
    velocity_inequality_check,
    verify_arcsine_law,
)
from .spectral import (
    SpectralSplit,
    diag_bound,
    integral_bound,
    mceachin_ratio,
    offdiag_bound,
    old_bounds,
    spectral_projection,
    split_spectrum,
    track_components,
)

__version__ = "0.1.0"

__all__ = [
    "AngularOperator",
    "GapClosedError",
    "InputError",
    "NotAGraphError",
    "PreconditionError",
    "ProjGeomError",
    "Projection",
    "ProjectionPath",
    "SpectralProjector",
    "SpectralSplit",
    "SubspacePair",
    "angle_addition_residual",
    "angular_operator",
    "c_pi_value",
    "c_star_value",
    "compute_c_pi",
    "compute_c_star",
    "diag_bound",
    "distance",
    "eig_hermitian",
    "four_projections_factorization",
    "geodesic",
    "integral_bound",
    "inv_sqrt_psd",
    "matrix_function",
    "mceachin_ratio",
    "offdiag_bound",
    "old_bounds",
    "operator_norm",
    "polygonal_length",
    "project_onto_span",
    "projection_from_graph",
    "rho",
    "riemannian_length",
    "rotation_unitary",
    "spectral_projection",
    "split_spectrum",
    "sqrt_psd",
    "track_components",
    "velocity_inequality_check",
    "verify_arcsine_law",
]
