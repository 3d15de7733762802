"""Scaling limits of classical unitary ensembles.

Projection kernels ``K_n`` built from orthonormal Hermite, Laguerre and
Jacobi functions, their bulk, soft-edge and hard-edge rescalings, the
Dyson, Airy and Bessel limit kernels, and Fredholm determinants
``det(I - K|_J)`` (gap probabilities) by Nystrom discretization.
"""

from .ensemble import (
    EnsembleSpec, ScalingMap, bulk_map, hard_map, limit_density, limit_mass, make_map,
    scaling_data, soft_map, tricomi_map,
)
from .fredholm import gap_probability, trace
from .kernels import (
    AiryKernel, BesselKernel, DysonKernel, FiniteKernel, airy_trace, bessel_trace, density,
    limit_kernel_for,
)
from .orthopoly import WeightFamily, gauss_rule, phi, phi_table

__version__ = "0.1.0"

__all__ = [
    "AiryKernel", "BesselKernel", "DysonKernel", "EnsembleSpec", "FiniteKernel", "ScalingMap",
    "WeightFamily", "airy_trace", "bessel_trace", "bulk_map", "density", "gap_probability",
    "gauss_rule", "hard_map", "limit_density", "limit_kernel_for", "limit_mass", "make_map",
    "phi", "phi_table", "scaling_data", "soft_map", "trace", "tricomi_map",
]
