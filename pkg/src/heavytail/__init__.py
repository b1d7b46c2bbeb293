"""Concentration bounds for sums of integer random variables with power-law tails."""

from .bounds import (
    BoundEvaluation,
    BoundKind,
    centered_abs_bound,
    preasymptotic_bound,
    thm1_bound,
    thm2_bound,
    thm3_bound,
    thm4_bound,
)
from .distributions import (
    DIVERGENT,
    ExactTailPareto,
    FiniteTable,
    Geometric,
    IntegerDistribution,
    PointMass,
    TruncatedPareto,
    TwoSidedMixture,
    expectation_tail_sum,
    parse_dist,
    symmetric_pareto,
)
from .errors import HeavyTailError, InvalidInput, InvalidSchedule, UnsupportedScale, WrongRegime
from .exact_engine import (
    IntervalDecomposition,
    MuSchedule,
    interval_decomposition,
    lemma_grid,
    mu_schedule,
    summation_by_parts_check,
    truncated_mgf,
)
from .montecarlo import ComparisonVerdict, EmpiricalTailEstimate, ExperimentPlan, Side, compare, run_experiment
from .tail_model import MembershipReport, Regime, TailClassSpec, aggregate_sequence, verify_membership

__version__ = "0.1.0"
