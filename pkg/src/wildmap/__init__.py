"""Expanding full-branch interval maps with an attracting origin.

Library surface: map construction (:mod:`wildmap.mapcore`), exact cylinder
geometry and certified core measures (:mod:`wildmap.cylinders`), orbit and
basin statistics (:mod:`wildmap.orbits`), batch property verification
(:mod:`wildmap.verify`), and figure/CSV emission (:mod:`wildmap.plotting`).
The CLI in :mod:`wildmap.cli` wraps all of it.
"""

from .cylinders import (
    Cylinder,
    MeasureReport,
    NestingReport,
    core_measure,
    core_measure_by_enumeration,
    cylinder_interval,
    cylinder_measure,
    left_subinterval,
    nesting_check,
)
from .errors import (
    ConstructionError,
    ConvergenceError,
    DomainError,
    PrecisionError,
    ResourceLimitError,
    ScheduleExhausted,
    WildmapError,
)
from .mapcore import (
    Branch,
    ExpansionConfig,
    FullBranchMap,
    ProportionSchedule,
    ValidationReport,
    branch_breakpoint,
    branch_curve,
    expansion_constant,
    validate,
)
from .orbits import BasinStats, OrbitRecord, basin_sample, classify_itinerary, iterate, rational_orbit
from .rational import format_rational, parse_rational
from .transition import TransitionProfile, smooth_step, smooth_step_derivative, smooth_step_integral
from .verify import (
    DichotomyScan,
    PropertyReport,
    RatioCheck,
    check_branch,
    check_branch_properties,
    check_expansion_ratios,
    dichotomy_scan,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "BasinStats",
    "ConstructionError",
    "ConvergenceError",
    "Cylinder",
    "DichotomyScan",
    "DomainError",
    "ExpansionConfig",
    "FullBranchMap",
    "MeasureReport",
    "NestingReport",
    "OrbitRecord",
    "PrecisionError",
    "PropertyReport",
    "ProportionSchedule",
    "RatioCheck",
    "ResourceLimitError",
    "ScheduleExhausted",
    "TransitionProfile",
    "ValidationReport",
    "WildmapError",
    "basin_sample",
    "branch_breakpoint",
    "branch_curve",
    "check_branch",
    "check_branch_properties",
    "check_expansion_ratios",
    "classify_itinerary",
    "core_measure",
    "core_measure_by_enumeration",
    "cylinder_interval",
    "cylinder_measure",
    "dichotomy_scan",
    "expansion_constant",
    "format_rational",
    "iterate",
    "left_subinterval",
    "nesting_check",
    "parse_rational",
    "rational_orbit",
    "smooth_step",
    "smooth_step_derivative",
    "smooth_step_integral",
    "validate",
]
