"""Explicit monads with matrices of linear forms over Q or F_p."""

from .explicit import ExplicitMonad, h0_graded, h1_dual_coker, instanton_monad, random_monad
from .linalg import GF, QQ, field_from_token
from .scan import DegenerationReport, degeneration_scan, validate_explicit

__all__ = [
    "DegenerationReport", "ExplicitMonad", "GF", "QQ", "degeneration_scan", "field_from_token",
    "h0_graded", "h1_dual_coker", "instanton_monad", "random_monad", "validate_explicit",
]
