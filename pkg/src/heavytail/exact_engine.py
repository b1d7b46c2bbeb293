"""Exact evaluation of the truncated-MGF proof machinery.

The tail bound for ``S_n`` goes through the truncated exponential moment

    R(mu, x) = sum_{k <= x} e^{mu k} P[X = k]

split at 0 and at ``M = 2 alpha / mu`` into three segments.  This module
computes each segment exactly and compares it with the explicit-constant upper
bound obtained by unfolding every big-O in the corresponding interval lemma.

Segment bounds, with ``a = alpha`` and ``c3 = V e^{3a} (2a)^{-a} mu^a``:

* ``a <= 1``:  ``I1 <= P[X<=0]``,
  ``I2 <= P[X>=1] + 2 mu + V e^{2a} I0``, ``I3 <= c3 + V e^{mu x} x^{-a}``
  where ``I0 = (2a)^{1-a} mu^a / (1-a)`` (``a < 1``) or ``mu ln 2 - mu ln mu`` (``a = 1``).
* ``a > 1``:  ``J1 <= P[X<=0] + mu E[X; X<=0] + W (mu^2 + mu^{a+1} + mu^a/(a-1) + sigma)``,
  ``J2 <= P[X>=1] + mu E[X; X>=1] + 2 V mu^2 + V e^{2a} mu^2 (1 + int_1^M t^{1-a} dt)``,
  ``J3`` as ``I3``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .distributions import IntegerDistribution, builtin_family
from .errors import InvalidInput, InvalidSchedule, UnsupportedScale
from .tail_model import Regime, TailClassSpec

MAX_MU_X = 700.0
DOMINANCE_TOL = 1e-10

GRID_ALPHAS = (0.5, 0.8, 1.0, 1.5, 2.0, 2.5, 3.0)
GRID_NS = (10**2, 10**3, 10**4)
GRID_EPSILONS = (0.1, 0.3, 0.5)

LEMMA_CSV_COLUMNS = ("lemma_id", "alpha", "n", "epsilon", "exact", "bound", "margin", "pass", "dist_id")


# -- mu schedule ---------------------------------------------------------------


def threshold_exponent(alpha: float, epsilon: float) -> float:
    """Exponent ``e`` with ``x = n^e``: ``1/alpha + eps`` for alpha <= 1, else ``max(1/alpha, 1/2) + eps``."""
    return max(1.0 / alpha, 0.5) + epsilon


@dataclass(frozen=True)
class MuSchedule:
    """The ``(x, mu, M)`` triple for given ``(n, epsilon, alpha)``.

    ``mu_x`` is stored separately because ``mu * x`` is known in closed form
    (``(max(1, alpha/2) - 1 + alpha eps) ln n``) and recomputing it from a
    rounded ``mu`` loses digits.
    """

    n: int
    epsilon: float
    alpha: float
    x: float
    mu: float
    m_split: float
    mu_x: float

    @property
    def regime(self) -> Regime:
        return Regime.for_alpha(self.alpha)

    @property
    def floor_x(self) -> int:
        return math.floor(self.x)

    @property
    def floor_m(self) -> int:
        return math.floor(self.m_split)

    def check_decomposable(self) -> None:
        """Raise :class:`InvalidSchedule` unless the interval lemmas apply."""
        if not self.mu < 1:
            raise InvalidSchedule(f"mu = {self.mu!r} must be < 1")
        if self.mu > self.alpha:
            raise InvalidSchedule(f"mu = {self.mu!r} exceeds alpha = {self.alpha!r}")
        if not self.m_split < self.x:
            raise InvalidSchedule(f"M = {self.m_split!r} is not below x = {self.x!r}")


def mu_schedule(n: int, epsilon: float, alpha: float, mu: Optional[float] = None) -> MuSchedule:
    """Schedule ``x = n^{max(1/alpha,1/2)+eps}``, ``mu = ln(x^alpha / n) / x``, ``M = 2 alpha / mu``.

    Parameters
    ----------
    n, epsilon, alpha
        Number of summands, threshold slack and tail exponent.
    mu
        Optional override of the default ``mu``; the threshold is unchanged.
    """
    if int(n) != n or n < 2:
        raise InvalidInput(f"n must be an integer >= 2, got {n!r}")
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise InvalidInput(f"epsilon must be positive, got {epsilon!r}")
    if not (alpha > 0 and math.isfinite(alpha)):
        raise InvalidInput(f"alpha must be positive, got {alpha!r}")
    n = int(n)
    log_n = math.log(n)
    x = float(n) ** threshold_exponent(alpha, epsilon)
    if mu is None:
        mu_x = (max(1.0, alpha / 2.0) - 1.0 + alpha * epsilon) * log_n
        mu_val = mu_x / x
    else:
        if not (mu > 0 and math.isfinite(mu)):
            raise InvalidInput(f"mu override must be positive, got {mu!r}")
        mu_val = float(mu)
        mu_x = mu_val * x
    return MuSchedule(n, float(epsilon), float(alpha), x, mu_val, 2.0 * alpha / mu_val, mu_x)


# -- summation by parts ----------------------------------------------------------


@dataclass(frozen=True)
class IdentityReport:
    lhs: float
    rhs: float
    diff: float


def summation_by_parts_check(
    dist: IntegerDistribution, f: Callable[[int], float], a: int, b: int
) -> IdentityReport:
    """Compare ``sum_{d=a}^b f(d) P[X=d]`` with its tail-function rewrite.

    The right-hand side is ``f(a) P[X>=a] - f(b) P[X>=b+1] + sum_{d=a+1}^b (f(d)-f(d-1)) P[X>=d]``.
    """
    if a < 0 or b < a:
        raise InvalidInput("summation by parts needs 0 <= a <= b")
    lhs = math.fsum(f(d) * dist.pmf(d) for d in range(a, b + 1))
    terms = [f(a) * dist.upper(a), -f(b) * dist.upper(b + 1)]
    terms += [(f(d) - f(d - 1)) * dist.upper(d) for d in range(a + 1, b + 1)]
    rhs = math.fsum(terms)
    return IdentityReport(lhs, rhs, abs(lhs - rhs))


# -- truncated MGF ---------------------------------------------------------------


def _check_scale(mu: float, x: float) -> None:
    if mu * x > MAX_MU_X:
        raise UnsupportedScale(f"mu * x = {mu * x!r} exceeds {MAX_MU_X}")


def truncated_mgf(dist: IntegerDistribution, mu: float, x: float) -> float:
    """``sum_{k <= floor(x)} e^{mu k} P[X = k]``."""
    if not mu > 0:
        raise InvalidInput(f"mu must be positive, got {mu!r}")
    _check_scale(mu, x)
    return dist.mgf_range(mu, -math.inf, math.floor(x))


# -- explicit-constant terms -----------------------------------------------------


def i0_bound(alpha: float, mu: float) -> float:
    """Upper bound on ``mu * int_1^M t^-alpha dt`` for ``alpha <= 1``."""
    if alpha < 1:
        return (2 * alpha) ** (1 - alpha) * mu**alpha / (1 - alpha)
    if alpha == 1:
        return mu * math.log(2) - mu * math.log(mu)
    raise InvalidInput("i0_bound applies to alpha <= 1")


def sigma(alpha: float, mu: float) -> float:
    """``mu^2 int_1^{1/mu} t^{1-alpha} dt``."""
    if alpha < 2:
        return mu**2 * (mu ** (alpha - 2) - 1) / (2 - alpha)
    if alpha == 2:
        return -(mu**2) * math.log(mu)
    return mu**2 * (1 - mu ** (alpha - 2)) / (alpha - 2)


def power_integral(alpha: float, m: float) -> float:
    """``int_1^M t^{1-alpha} dt``."""
    if alpha < 2:
        return (m ** (2 - alpha) - 1) / (2 - alpha)
    if alpha == 2:
        return math.log(m)
    return (1 - m ** (2 - alpha)) / (alpha - 2)


def far_segment_constant(alpha: float, v: float, mu: float) -> float:
    """``V e^{3 alpha} (2 alpha)^{-alpha} mu^alpha``, the big-O part of the far-segment bound."""
    return v * math.exp(3 * alpha - alpha * math.log(2 * alpha)) * mu**alpha


def left_correction(alpha: float, w: float, mu: float) -> float:
    """``W (mu^2 + mu^{alpha+1} + mu^alpha/(alpha-1) + sigma)``."""
    return w * (mu**2 + mu ** (alpha + 1) + mu**alpha / (alpha - 1) + sigma(alpha, mu))


def middle_correction(alpha: float, v: float, mu: float) -> float:
    """``2 V mu^2 + V e^{2 alpha} mu^2 (1 + int_1^M t^{1-alpha} dt)`` for alpha > 1."""
    m = 2 * alpha / mu
    return 2 * v * mu**2 + v * math.exp(2 * alpha) * mu**2 * (1 + power_integral(alpha, m))


def t0_term(alpha: float, v: float, mu: float) -> float:
    """Per-variable excess ``T_0`` of the truncated MGF over ``1 + V e^{mu x} x^-alpha`` (alpha <= 1)."""
    return 2 * mu + v * math.exp(2 * alpha) * i0_bound(alpha, mu) + far_segment_constant(alpha, v, mu)


def tau_term(alpha: float, v: float, w: float, mu: float) -> float:
    """Per-variable excess ``T`` over ``1 + mu E X + V e^{mu x} x^-alpha`` (alpha > 1)."""
    if not alpha > 1:
        raise InvalidInput("tau_term applies to alpha > 1")
    return left_correction(alpha, w, mu) + middle_correction(alpha, v, mu) + far_segment_constant(alpha, v, mu)


# -- interval decomposition ------------------------------------------------------


@dataclass(frozen=True)
class IntervalDecomposition:
    """Exact segment sums ``i1..i3`` and their explicit-constant bounds ``b1..b3``."""

    i1: float
    i2: float
    i3: float
    b1: float
    b2: float
    b3: float
    regime: Regime
    schedule: MuSchedule
    far_tail: float = 0.0

    @property
    def b3_corrected(self) -> float:
        """Far-segment bound with the constant ``4 V`` that the integral step actually yields."""
        return self.b3 + 3.0 * self.far_tail

    @property
    def lemma_ids(self) -> tuple[str, str, str]:
        p = "I" if self.regime is Regime.SUBLINEAR else "J"
        return (f"{p}1", f"{p}2", f"{p}3")

    def margins(self) -> tuple[float, float, float]:
        return (self.b1 - self.i1, self.b2 - self.i2, self.b3 - self.i3)

    def dominated(self, tol: float = DOMINANCE_TOL) -> bool:
        return all(m >= -tol for m in self.margins())


def _effective_constants(spec: TailClassSpec, schedule: MuSchedule) -> tuple[float, Optional[float]]:
    """Check the schedule exponent is admissible for ``spec`` and return ``(V, W)``."""
    a = schedule.alpha
    if schedule.regime is Regime.SUBLINEAR:
        if a > spec.alpha_r:
            raise InvalidInput(f"schedule alpha {a} exceeds the certified right exponent {spec.alpha_r}")
        return spec.v_const, spec.w_const
    if not spec.has_left:
        raise InvalidInput("alpha > 1 bounds need both tail fields")
    if a > spec.min_alpha():
        raise InvalidInput(f"schedule alpha {a} exceeds the certified exponent {spec.min_alpha()}")
    return spec.v_const, spec.w_const


def interval_decomposition(
    dist: IntegerDistribution, schedule: MuSchedule, spec: TailClassSpec
) -> IntervalDecomposition:
    """Split the truncated MGF at 0 and ``M`` and bound each piece.

    Segments are ``(-inf, 0]``, ``[1, floor(M)]`` and ``[floor(M)+1, floor(x)]``;
    the schedule's exponent is used for every majorant, so it must not exceed
    the certificate's exponent (which keeps ``V k^-alpha`` a valid majorant).
    """
    schedule.check_decomposable()
    _check_scale(schedule.mu, schedule.x)
    v, w = _effective_constants(spec, schedule)
    a, mu = schedule.alpha, schedule.mu
    fm, fx = schedule.floor_m, schedule.floor_x

    i1 = dist.mgf_range(mu, -math.inf, 0)
    i2 = dist.mgf_range(mu, 1, fm)
    i3 = dist.mgf_range(mu, fm + 1, fx)

    p_nonpos = dist.prob_range(-math.inf, 0)
    p_pos = dist.prob_range(1, math.inf)
    far_tail = v * math.exp(schedule.mu_x - a * math.log(schedule.x))
    far = far_segment_constant(a, v, mu) + far_tail
    if schedule.regime is Regime.SUBLINEAR:
        b1 = p_nonpos
        b2 = p_pos + 2 * mu + v * math.exp(2 * a) * i0_bound(a, mu)
    else:
        b1 = p_nonpos + mu * dist.moment_range(-math.inf, 0) + left_correction(a, w, mu)
        b2 = p_pos + mu * dist.moment_range(1, math.inf) + middle_correction(a, v, mu)
    return IntervalDecomposition(i1, i2, i3, b1, b2, far, schedule.regime, schedule, far_tail)


# -- lemma grid ----------------------------------------------------------------------


@dataclass(frozen=True)
class LemmaCheckRow:
    lemma_id: str
    alpha: float
    n: int
    epsilon: float
    exact: float
    bound: float
    margin: float
    passed: bool
    dist_id: str

    def as_csv_row(self) -> list[str]:
        return [
            self.lemma_id,
            repr(self.alpha),
            str(self.n),
            repr(self.epsilon),
            repr(self.exact),
            repr(self.bound),
            repr(self.margin),
            "true" if self.passed else "false",
            self.dist_id,
        ]


@dataclass
class LemmaGridResult:
    rows: list[LemmaCheckRow] = field(default_factory=list)
    skipped: list[tuple[float, int, float, str]] = field(default_factory=list)

    @property
    def failures(self) -> list[LemmaCheckRow]:
        return [r for r in self.rows if not r.passed]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(LEMMA_CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(row.as_csv_row())
        return buf.getvalue()


def lemma_grid(
    alphas: Iterable[float] = GRID_ALPHAS,
    ns: Iterable[int] = GRID_NS,
    epsilons: Iterable[float] = GRID_EPSILONS,
    family: Callable[[float], Sequence[IntegerDistribution]] = builtin_family,
    tol: float = DOMINANCE_TOL,
) -> LemmaGridResult:
    """Run the dominance check over every built-in law and grid cell.

    Cells whose schedule violates ``mu < 1``, ``mu <= alpha`` or ``M < x`` are
    recorded in ``skipped`` rather than evaluated.
    """
    result = LemmaGridResult()
    ns, epsilons = list(ns), list(epsilons)
    for alpha in alphas:
        dists = family(alpha)
        for n in ns:
            for eps in epsilons:
                sched = mu_schedule(n, eps, alpha)
                try:
                    sched.check_decomposable()
                except InvalidSchedule as exc:
                    result.skipped.append((alpha, n, eps, str(exc)))
                    continue
                for dist in dists:
                    dec = interval_decomposition(dist, sched, dist.certified)
                    exact = (dec.i1, dec.i2, dec.i3)
                    bound = (dec.b1, dec.b2, dec.b3)
                    for lid, e, b in zip(dec.lemma_ids, exact, bound):
                        margin = b - e
                        result.rows.append(
                            LemmaCheckRow(lid, alpha, n, eps, e, b, margin, margin >= -tol, dist.dist_id)
                        )
    return result
