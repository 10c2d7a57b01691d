"""Indefinite theta series on tetrahedral and cubical cones.

Evaluates cone theta series, their face-indicator weightings, and their
modular completions built from smoothed sign functions (generalized error
functions), together with a numerical verification harness for the Jacobi
transformation laws and the Vigneras differential equation.
"""

from ._core import backend_name
from .cone import (Edge, SignPolynomial, ValidationReport, WallSet, edges,
                   face_indicator, face_indicator_cubical,
                   face_indicator_tetrahedral, is_non_negative,
                   isotropic_locus, membership, validate)
from .gerf import (NegDefFrame, QuadratureConfig, a_coeff, degeneration_check,
                   sgn_hat, sgn_hat_cone, sgn_product, vigneras_residual,
                   vol_hat)
from .quadspace import (DiscriminantGroup, Lattice, QuadSpace,
                        discriminant_group, signature)
from .theta import (JacobiPoint, ThetaValue, TruncationPolicy,
                    singular_set_distance, theta_cone, theta_hat, theta_sign)
from .verify import (CheckReport, check_S, check_T, check_elliptic,
                     check_vigneras_theta, running_example_oracle)
from .weil import WeilRep, apply, build_weil

__version__ = "0.1.0"

__all__ = [
    "Edge", "SignPolynomial", "ValidationReport", "WallSet", "edges",
    "face_indicator", "face_indicator_cubical", "face_indicator_tetrahedral",
    "is_non_negative", "isotropic_locus", "membership", "validate",
    "NegDefFrame", "QuadratureConfig", "a_coeff", "degeneration_check",
    "sgn_hat", "sgn_hat_cone", "sgn_product", "vigneras_residual", "vol_hat",
    "DiscriminantGroup", "Lattice", "QuadSpace", "discriminant_group",
    "signature", "JacobiPoint", "ThetaValue", "TruncationPolicy",
    "singular_set_distance", "theta_cone", "theta_hat", "theta_sign",
    "CheckReport", "check_S", "check_T", "check_elliptic",
    "check_vigneras_theta", "running_example_oracle", "WeilRep", "apply",
    "build_weil", "backend_name",
]
