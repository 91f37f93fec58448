"""Holonomy of projectively flat Randers surfaces, computed numerically.

Geometric quantities come from forward-mode dual numbers. Fields restricted
to the indicatrix circle are truncated Fourier series, and holonomy maps come
from RK4 parallel transport around loops.
"""

from .curvature import curvature_tensor, curvature_vector, flag_curvature, ricci, riemann_curvature
from .holonomy_algebra import CircleField, bracket, generate_algebra, project, sigma_basis, span, xi0
from .indicatrix import general_chart, omega_closed_form, origin_chart, restrict_field
from .model import DomainError, ModelKind, ModelVariant, finsler, fundamental_tensor, projective_factor, spray
from .transport import PathSpec, holonomy_map, small_loop_generator, transport, transport_vector

__version__ = "0.1.0"

__all__ = [
    "CircleField",
    "DomainError",
    "ModelKind",
    "ModelVariant",
    "PathSpec",
    "bracket",
    "curvature_tensor",
    "curvature_vector",
    "finsler",
    "flag_curvature",
    "fundamental_tensor",
    "general_chart",
    "generate_algebra",
    "holonomy_map",
    "omega_closed_form",
    "origin_chart",
    "project",
    "projective_factor",
    "restrict_field",
    "ricci",
    "riemann_curvature",
    "sigma_basis",
    "small_loop_generator",
    "span",
    "spray",
    "transport",
    "transport_vector",
    "xi0",
]
