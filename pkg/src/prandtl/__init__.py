"""Spectral solver for the Prandtl singular integro-differential equation on (-1, 1)."""
from ._kernels import backend
from .errors import (ConfigError, ConvergenceError, DomainError, GridError, OracleError,
                     PrandtlError, QuadratureError, SamplingError, SpecError)
from .grid import GridFunction, OmegaGrid, SpectralFunction, SpectralGrid, omega_of_x, sample, x_of_omega
from .operators import (GlauertExpansion, MultiplierTable, apply_prandtl_pv, apply_prandtl_spectral,
                        glauert_apply, glauert_project, multiplier, verify_coth_image)
from .ptransform import convolve, convolve_derivative, direct_convolution, forward, inverse, pairing
from .solver import (BoundRecord, CoefficientSpec, ProblemSpec, SolveReport, boundary_decay,
                     solve_glauert, solve_weak, verify_bounds)
from .spaces import embedding_constant, h1_norm_spatial, hs_norm, l2_tilde_norm, l2r_norm

__version__ = "0.1.0"

__all__ = [
    "BoundRecord", "CoefficientSpec", "ConfigError", "ConvergenceError", "DomainError",
    "GlauertExpansion", "GridError", "GridFunction", "MultiplierTable", "OmegaGrid", "OracleError",
    "PrandtlError", "ProblemSpec", "QuadratureError", "SamplingError", "SolveReport", "SpecError",
    "SpectralFunction", "SpectralGrid", "apply_prandtl_pv", "apply_prandtl_spectral", "backend",
    "boundary_decay", "convolve", "convolve_derivative", "direct_convolution", "embedding_constant",
    "forward", "glauert_apply", "glauert_project", "h1_norm_spatial", "hs_norm", "inverse",
    "l2_tilde_norm", "l2r_norm", "multiplier", "omega_of_x", "pairing", "sample", "solve_glauert",
    "solve_weak", "verify_bounds", "verify_coth_image", "x_of_omega",
]
