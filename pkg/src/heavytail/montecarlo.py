"""Monte Carlo estimates of tail probabilities of ``S_n`` with exact intervals.

Trial ``t`` draws its summands from its own generator seeded by
``SeedSequence(seed, spawn_key=(t,))``, so results depend only on
``(plan, seed)`` and not on how trials are split across worker processes.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import stats

from .bounds import BoundEvaluation
from .distributions import DIVERGENT, IntegerDistribution, expectation_tail_sum
from .errors import InvalidInput
from .exact_engine import threshold_exponent
from .tail_model import TailClassSpec, aggregate_sequence

CONFIDENCE = 0.99
MIN_TRIALS = 100
_CHUNK_TRIALS = 256

REPORT_COLUMNS = (
    "dist_id", "n", "epsilon", "side", "trials", "seed", "x", "hits",
    "p_hat", "ci_low", "ci_high", "bound_kind", "bound_value", "verdict",
)


class Side(enum.Enum):
    RIGHT = "right"
    LEFT = "left"
    CENTERED_RIGHT = "centered_right"
    CENTERED_LEFT = "centered_left"
    CENTERED_ABS = "centered_abs"

    @property
    def centered(self) -> bool:
        return self.value.startswith("centered")


class ComparisonVerdict(enum.Enum):
    BOUND_HOLDS = "BoundHolds"
    INCONCLUSIVE = "Inconclusive"
    BOUND_VIOLATED = "BoundViolated"


DistLike = Union[IntegerDistribution, Sequence[IntegerDistribution]]


@dataclass(frozen=True)
class ExperimentPlan:
    """One tail-probability experiment.

    ``dist`` may be a list, in which case summand ``i`` follows ``dist[i % len(dist)]``.
    """

    dist: DistLike
    n: int
    trials: int
    epsilon: float
    side: Side = Side.RIGHT
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        dists = self.dists
        if not dists:
            raise InvalidInput("plan needs at least one distribution")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInput(f"n must be a positive integer, got {self.n!r}")
        if int(self.trials) != self.trials or self.trials < MIN_TRIALS:
            raise InvalidInput(f"trials must be an integer >= {MIN_TRIALS}, got {self.trials!r}")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise InvalidInput(f"epsilon must be positive, got {self.epsilon!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInput("seed must be a 64-bit unsigned integer")
        if int(self.workers) != self.workers or self.workers < 1:
            raise InvalidInput("workers must be a positive integer")
        if not isinstance(self.side, Side):
            object.__setattr__(self, "side", Side(self.side))
        if self.side.centered:
            if self.spec.min_alpha() <= 1:
                raise InvalidInput("centered experiments need min(alpha_l, alpha_r) > 1")
            if any(expectation_tail_sum(d) is DIVERGENT for d in dists):
                raise InvalidInput("centered experiments need a finite mean for every summand")

    @property
    def dists(self) -> list[IntegerDistribution]:
        if isinstance(self.dist, IntegerDistribution):
            return [self.dist]
        return list(self.dist)

    @property
    def spec(self) -> TailClassSpec:
        return aggregate_sequence(d.certified for d in self.dists)

    @property
    def dist_id(self) -> str:
        ids = [d.dist_id for d in self.dists]
        return ids[0] if len(ids) == 1 else "[" + ",".join(ids) + "]"

    def alpha(self) -> float:
        spec = self.spec
        if self.side is Side.RIGHT:
            return spec.alpha_r
        if self.side is Side.LEFT:
            return spec.alpha_l
        return spec.min_alpha()

    def threshold(self) -> float:
        return float(self.n) ** threshold_exponent(self.alpha(), self.epsilon)

    def mean(self) -> Optional[float]:
        """``E S_n`` from the tail-sum formula, for centered sides."""
        if not self.side.centered:
            return None
        dists = self.dists
        counts = [len(range(i, self.n, len(dists))) for i in range(len(dists))]
        return math.fsum(c * expectation_tail_sum(d) for c, d in zip(counts, dists))


@dataclass(frozen=True)
class EmpiricalTailEstimate:
    hits: int
    trials: int
    p_hat: float
    ci_low: float
    ci_high: float
    threshold_x: float
    mean_used: Optional[float]
    side: Side
    n: int
    epsilon: float
    seed: int
    dist_id: str


def clopper_pearson(hits: int, trials: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval."""
    ci = stats.binomtest(int(hits), int(trials)).proportion_ci(confidence_level=confidence, method="exact")
    return float(ci.low), float(ci.high)


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def _trial_sum(dists: list[IntegerDistribution], n: int, rng: np.random.Generator) -> float:
    if len(dists) == 1:
        return float(np.sum(dists[0].sample_array(rng, n)))
    total = 0.0
    for i, d in enumerate(dists):
        count = len(range(i, n, len(dists)))
        if count:
            total += float(np.sum(d.sample_array(rng, count)))
    return total


def _sums_for_range(args) -> np.ndarray:
    dists, n, seed, start, stop = args
    return np.array([_trial_sum(dists, n, trial_generator(seed, t)) for t in range(start, stop)])


def simulate_sums(plan: ExperimentPlan) -> np.ndarray:
    """Per-trial values of ``S_n`` (uncentered), in trial order."""
    dists, n, seed = plan.dists, int(plan.n), int(plan.seed)
    bounds = list(range(0, plan.trials, _CHUNK_TRIALS)) + [plan.trials]
    tasks = [(dists, n, seed, a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    if plan.workers == 1:
        parts = [_sums_for_range(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            parts = list(pool.map(_sums_for_range, tasks))
    return np.concatenate(parts)


def count_hits(sums: np.ndarray, side: Side, x: float, mean: Optional[float]) -> int:
    dev = sums - mean if side.centered else sums
    if side in (Side.RIGHT, Side.CENTERED_RIGHT):
        return int(np.count_nonzero(dev >= x))
    if side in (Side.LEFT, Side.CENTERED_LEFT):
        return int(np.count_nonzero(dev <= -x))
    return int(np.count_nonzero(np.abs(dev) >= x))


def run_experiment(plan: ExperimentPlan) -> EmpiricalTailEstimate:
    x = plan.threshold()
    mean = plan.mean()
    sums = simulate_sums(plan)
    hits = count_hits(sums, plan.side, x, mean)
    low, high = clopper_pearson(hits, plan.trials)
    return EmpiricalTailEstimate(
        hits=hits,
        trials=plan.trials,
        p_hat=hits / plan.trials,
        ci_low=low,
        ci_high=high,
        threshold_x=x,
        mean_used=mean,
        side=plan.side,
        n=int(plan.n),
        epsilon=float(plan.epsilon),
        seed=int(plan.seed),
        dist_id=plan.dist_id,
    )


def compare(estimate: EmpiricalTailEstimate, bound: BoundEvaluation) -> ComparisonVerdict:
    """Place the bound relative to the estimate's confidence interval."""
    if bound.n != estimate.n or not math.isclose(bound.epsilon, estimate.epsilon, rel_tol=1e-12):
        raise InvalidInput("estimate and bound were computed for different (n, epsilon)")
    if bound.side != estimate.side.value:
        raise InvalidInput(f"bound side {bound.side!r} does not match estimate side {estimate.side.value!r}")
    if not math.isclose(abs(bound.threshold_x), estimate.threshold_x, rel_tol=1e-12):
        raise InvalidInput("estimate and bound use different thresholds")
    return verdict_for(estimate.ci_low, estimate.ci_high, bound.value)


def verdict_for(ci_low: float, ci_high: float, value: float) -> ComparisonVerdict:
    if ci_high <= value:
        return ComparisonVerdict.BOUND_HOLDS
    if ci_low > value:
        return ComparisonVerdict.BOUND_VIOLATED
    return ComparisonVerdict.INCONCLUSIVE


def report_row(estimate: EmpiricalTailEstimate, bound: Optional[BoundEvaluation] = None) -> list[str]:
    if bound is None:
        kind, value, verdict = "", "", ""
    else:
        kind, value, verdict = bound.kind.value, repr(bound.value), compare(estimate, bound).value
    return [
        estimate.dist_id, str(estimate.n), repr(estimate.epsilon), estimate.side.value,
        str(estimate.trials), str(estimate.seed), repr(estimate.threshold_x), str(estimate.hits),
        repr(estimate.p_hat), repr(estimate.ci_low), repr(estimate.ci_high), kind, value, verdict,
    ]


def report_csv(rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    writer.writerows(rows)
    return buf.getvalue()
