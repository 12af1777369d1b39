"""Functional currents: signal-carrying curves and surfaces as kernel-normed
Dirac sums, with matching pursuit compression and diffeomorphic registration."""
from .core import (DiracFCurrent, DimensionMismatchError, FCurrent, FunctionalShape, InvalidShapeError,
                   discrete_mass, scale_atoms, validate_shape)
from .discretization import DegenerateCellWarning, discretize, discretize_curve, discretize_surface, refine_curve
from .kernels import (KernelConfig, KernelSpecError, RadialKernel, dirac_inner_product, fcurrent_distance,
                      fcurrent_inner_product, fcurrent_norm, gram_matrix, parse_kernel_spec, squared_distance)
from .transport import (AnalyticVelocityField, DeformationPath, FlowDivergenceError, SingularJacobianError,
                        flow_map, flow_points, pushforward_atoms, transport_shape, velocity_at)
from .pursuit import MPConfig, MPResult, SingularGramError, mp_compress, reconstruct
from .registration import (RegistrationConfig, RegistrationError, RegistrationResult, apply_result, energy,
                           energy_and_gradient, gradient, register)
from .baselines import colored_current, colored_distance, product_distance, product_space_current

__version__ = "0.1.0"

__all__ = [
    "DiracFCurrent",
    "DimensionMismatchError",
    "FCurrent",
    "FunctionalShape",
    "InvalidShapeError",
    "discrete_mass",
    "scale_atoms",
    "validate_shape",
    "DegenerateCellWarning",
    "discretize",
    "discretize_curve",
    "discretize_surface",
    "refine_curve",
    "KernelConfig",
    "KernelSpecError",
    "RadialKernel",
    "dirac_inner_product",
    "fcurrent_distance",
    "fcurrent_inner_product",
    "fcurrent_norm",
    "gram_matrix",
    "parse_kernel_spec",
    "squared_distance",
    "AnalyticVelocityField",
    "DeformationPath",
    "FlowDivergenceError",
    "SingularJacobianError",
    "flow_map",
    "flow_points",
    "pushforward_atoms",
    "transport_shape",
    "velocity_at",
    "MPConfig",
    "MPResult",
    "SingularGramError",
    "mp_compress",
    "reconstruct",
    "RegistrationConfig",
    "RegistrationError",
    "RegistrationResult",
    "apply_result",
    "energy",
    "energy_and_gradient",
    "gradient",
    "register",
    "colored_current",
    "colored_distance",
    "product_distance",
    "product_space_current",
]
