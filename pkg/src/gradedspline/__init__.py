"""Local Chebyshev splines on graded meshes for functions with boundary singularities."""

from .classes import (
    ClassKind,
    ClassSpecError,
    FunctionClassSpec,
    check_membership,
    derive_params,
    test_function,
)

__all__ = [
    "ClassKind",
    "ClassSpecError",
    "FunctionClassSpec",
    "check_membership",
    "derive_params",
    "test_function",
]

__version__ = "0.1.0"
