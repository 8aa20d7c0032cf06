"""Hybrid-code transversal Toffoli: codes, exact checks, distillation and cost."""

from .codes import (
    ClassicalCode,
    CodeConstructionError,
    CssCode,
    NotTriorthogonalError,
    TriorthogonalCode,
    TriReport,
    build_css,
    build_triorthogonal,
    builtin_15_1_3,
    check_triorthogonal,
    code_distance,
    mirror,
)
from .gf2 import BinaryMatrix, BinaryVector, EnumerationLimitError, GF2Error
from .transversality import (
    HybridSystem,
    TransversalityVerdict,
    check_cnot_condition,
    check_cz_condition,
    verify_cnot_coset,
    verify_cz_phase,
    verify_t_transversality,
    verify_toffoli_transversality,
    verify_tx_transversality,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMatrix",
    "BinaryVector",
    "ClassicalCode",
    "CodeConstructionError",
    "CssCode",
    "EnumerationLimitError",
    "GF2Error",
    "HybridSystem",
    "NotTriorthogonalError",
    "TransversalityVerdict",
    "TriReport",
    "TriorthogonalCode",
    "build_css",
    "build_triorthogonal",
    "builtin_15_1_3",
    "check_cnot_condition",
    "check_cz_condition",
    "check_triorthogonal",
    "code_distance",
    "mirror",
    "verify_cnot_coset",
    "verify_cz_phase",
    "verify_t_transversality",
    "verify_toffoli_transversality",
    "verify_tx_transversality",
]
