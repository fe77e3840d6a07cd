"""Exact-arithmetic dimension computations for rectangular shrinking targets
on grid self-similar carpets."""

from . import errors
from .coding import (
    SliceDimension,
    TargetSpec,
    alternating_block_word,
    base_expansions,
    canonical_representative,
    digit_frequencies,
    empirical_row_frequencies,
    expansions_of,
    frequency_slice_value,
    make_target,
    slice_dimension,
    target_from_word,
)
from .formulas import (
    closed_form_dimension,
    closed_form_for,
    ergodic_dimension,
    ratio_limsup_dimension,
    special_case_dimension,
)
from .grid import DigitPair, DyadicBox, GridIFS, project_prefix, validate_ifs
from .schedules import RateSchedule
from .shrinking import (
    DimensionReport,
    ExponentRecord,
    RowCounts,
    WindowPattern,
    axis_digits_admissible,
    axis_window_patterns,
    dimension_report,
    max_row_counts,
    row_agreement_length,
    stage_exponent,
    window_hit,
)
from .verify import (
    CheckReport,
    CoverFamily,
    HolderSample,
    MeasureBuilder,
    build_cover,
    build_lower_bound_measure,
    brute_force_window_set,
    check_containment_backward,
    check_containment_forward,
    check_set_relation,
    exhaustive_relation_check,
    exhaustive_truncations,
    holder_exponent_samples,
    oracle_window_report,
    pattern_window_set,
    random_words,
)
from .words import DigitWord, apply_shift

__all__ = [
    "errors",
    "DigitPair",
    "GridIFS",
    "DyadicBox",
    "validate_ifs",
    "project_prefix",
    "DigitWord",
    "apply_shift",
    "base_expansions",
    "expansions_of",
    "canonical_representative",
    "digit_frequencies",
    "empirical_row_frequencies",
    "frequency_slice_value",
    "slice_dimension",
    "SliceDimension",
    "TargetSpec",
    "make_target",
    "target_from_word",
    "alternating_block_word",
    "RateSchedule",
    "WindowPattern",
    "axis_window_patterns",
    "axis_digits_admissible",
    "window_hit",
    "row_agreement_length",
    "max_row_counts",
    "RowCounts",
    "stage_exponent",
    "ExponentRecord",
    "dimension_report",
    "DimensionReport",
    "closed_form_dimension",
    "closed_form_for",
    "special_case_dimension",
    "ergodic_dimension",
    "ratio_limsup_dimension",
    "CheckReport",
    "CoverFamily",
    "HolderSample",
    "MeasureBuilder",
    "build_cover",
    "build_lower_bound_measure",
    "brute_force_window_set",
    "pattern_window_set",
    "oracle_window_report",
    "check_containment_forward",
    "check_containment_backward",
    "check_set_relation",
    "exhaustive_relation_check",
    "exhaustive_truncations",
    "holder_exponent_samples",
    "random_words",
]
