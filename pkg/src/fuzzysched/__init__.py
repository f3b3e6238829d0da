"""CPU scheduling simulator with a Mamdani fuzzy new-priority policy."""

from ._core import BACKEND
from .fuzzy import (
    AggregatedOutput,
    FuzzyConfigError,
    FuzzyEngine,
    FuzzyRule,
    LinguisticVariable,
    MembershipFunction,
    NoRuleFiredError,
    RuleBase,
    aggregate,
    build_engine,
    default_engine,
    default_rulebase,
    default_variables,
    defuzzify_centroid,
    evaluate_rule,
    fuzzify,
    infer,
    load_geometry,
)
from .metrics import ComparisonReport, ScheduleMetrics, TaskMetrics, compare, compute_metrics
from .rules import RuleParseError, parse_rulebase, render_rulebase
from .scheduling import (
    Policy,
    PolicyKind,
    PrioritizedTask,
    Schedule,
    Segment,
    Task,
    WorkloadError,
    assign_new_priorities,
    simulate,
    validate_workload,
)
from .workload_io import (
    RenderOptions,
    WorkloadDocument,
    emit_report,
    load_workload,
    parse_report,
    parse_workload,
    render_gantt,
)

__version__ = "0.1.0"
