from .engine import CohomologyEngine, CohTable, Contradiction, TraceStep
from .derive import (
    CriterionResult,
    Derivation,
    ExteriorEvidence,
    Indeterminate,
    MissingAssumption,
    beilinson_dims,
    bott_form_oracle,
    build_display_engine,
    coverage_report,
    criterio_check,
    derive_instanton_table,
    derive_special_table,
    exterior_replay,
    closed_form_vanishing,
)

__all__ = [
    "CohomologyEngine", "CohTable", "Contradiction", "TraceStep", "CriterionResult", "Derivation",
    "ExteriorEvidence", "Indeterminate", "MissingAssumption", "beilinson_dims", "bott_form_oracle",
    "build_display_engine", "coverage_report", "criterio_check", "derive_instanton_table",
    "derive_special_table", "exterior_replay", "closed_form_vanishing",
]
