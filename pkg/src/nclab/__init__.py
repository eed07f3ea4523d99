"""Finite spectral triples with twisted real structures."""

from .operator_core import (
    AntilinearOp,
    Tolerance,
    antilinear_apply,
    antilinear_conjugate,
    kron,
    rel_residual,
    spectrum,
)
from .triple import (
    AlgebraPresentation,
    Automorphism,
    FiniteSpectralTriple,
    KOSigns,
    StructuralError,
    TwistSpec,
    VerificationReport,
)
from .checks import (
    check_first_order_classical,
    check_zero_order,
    jacobi_residual,
    twisted_commutator,
    verify,
    verify_general_type,
    verify_nu_twisted,
    verify_rho_twisted,
)

__version__ = "0.1.0"

from .io import DocumentError, load_triple, save_triple  # noqa: E402

__all__ = [
    "AlgebraPresentation", "AntilinearOp", "Automorphism", "DocumentError",
    "FiniteSpectralTriple", "KOSigns", "StructuralError", "Tolerance", "TwistSpec",
    "VerificationReport", "antilinear_apply", "antilinear_conjugate",
    "check_first_order_classical", "check_zero_order", "jacobi_residual", "kron",
    "load_triple", "rel_residual", "save_triple", "spectrum", "twisted_commutator",
    "verify", "verify_general_type", "verify_nu_twisted", "verify_rho_twisted",
]
