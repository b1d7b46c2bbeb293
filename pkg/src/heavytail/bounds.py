"""Closed-form tail bounds for ``S_n`` and their explicit finite-n versions.

Theorem-style bounds (``thm1_bound`` ... ``thm4_bound``) are the asymptotic
statements evaluated at finite ``n``.  :func:`preasymptotic_bound` is the
inequality they come from,

    P[S_n >= x] <= n V x^-alpha + exp(-mu x + n T + V e^{mu x} n x^-alpha),

with ``T`` the explicit per-variable excess from the interval lemmas.  For
``alpha > 1`` the event is ``S_n - E S_n >= x``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import InvalidInput, InvalidSchedule, WrongRegime
from .exact_engine import MuSchedule, mu_schedule, t0_term, tau_term, threshold_exponent
from .tail_model import Regime, TailClassSpec, aggregate_sequence


class BoundKind(enum.Enum):
    THM1_RIGHT = "Thm1Right"
    THM2_LEFT = "Thm2Left"
    THM3_RIGHT_CENTERED = "Thm3RightCentered"
    THM4_LEFT_CENTERED = "Thm4LeftCentered"
    CENTERED_ABS = "CenteredAbs"
    PRE_ASYMPTOTIC = "PreAsymptotic"


@dataclass(frozen=True)
class BoundEvaluation:
    """A bound value with its additive term breakdown.

    ``terms`` are additive and sum to ``raw_value``; auxiliary quantities such as
    ``t0``/``tau``, ``mu`` and the exponent live in ``details``.
    """

    kind: BoundKind
    threshold_x: float
    raw_value: float
    terms: dict[str, float]
    n: int
    epsilon: float
    side: str = "right"
    details: dict[str, float] = field(default_factory=dict)

    @property
    def value(self) -> float:
        return min(1.0, max(0.0, self.raw_value))

    @property
    def vacuous(self) -> bool:
        return self.raw_value >= 1.0

    def to_json(self) -> dict:
        out = {
            "kind": self.kind.value,
            "x": self.threshold_x,
            "value": self.value,
            "raw": self.raw_value,
            "terms": dict(self.terms),
            "vacuous": self.vacuous,
        }
        if self.details:
            out["details"] = dict(self.details)
        return out


def _check_n_eps(n: int, epsilon: float) -> None:
    if int(n) != n or n < 2:
        raise InvalidInput(f"n must be an integer >= 2, got {n!r}")
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise InvalidInput(f"epsilon must be positive, got {epsilon!r}")


def _n_pow(n: int, exponent: float) -> float:
    return math.exp(exponent * math.log(n))


def _sublinear(kind: BoundKind, c: float, alpha: float, n: int, epsilon: float, side: str) -> BoundEvaluation:
    decay = _n_pow(n, -alpha * epsilon)
    x = float(n) ** (1.0 / alpha + epsilon)
    terms = {"union": c * decay, "mgf": math.exp(2 * c) * decay}
    return BoundEvaluation(kind, -x if side == "left" else x, terms["union"] + terms["mgf"], terms, int(n), epsilon, side)


def thm1_bound(spec: TailClassSpec, n: int, epsilon: float) -> BoundEvaluation:
    """``P[S_n >= n^{1/alpha_r + eps}] <= (V + e^{2V}) n^{-alpha_r eps}`` for ``alpha_r <= 1``."""
    _check_n_eps(n, epsilon)
    if spec.alpha_r > 1:
        raise WrongRegime(f"thm1 needs alpha_r <= 1, got {spec.alpha_r}")
    return _sublinear(BoundKind.THM1_RIGHT, spec.v_const, spec.alpha_r, n, epsilon, "right")


def thm2_bound(spec: TailClassSpec, n: int, epsilon: float) -> BoundEvaluation:
    """Mirror of :func:`thm1_bound` for ``P[S_n <= -n^{1/alpha_l + eps}]``."""
    _check_n_eps(n, epsilon)
    if not spec.has_left:
        raise InvalidInput("thm2 needs the left-tail fields alpha_l and w")
    if spec.alpha_l > 1:
        raise WrongRegime(f"thm2 needs alpha_l <= 1, got {spec.alpha_l}")
    return _sublinear(BoundKind.THM2_LEFT, spec.w_const, spec.alpha_l, n, epsilon, "left")


def _centered(kind: BoundKind, spec: TailClassSpec, n: int, epsilon: float, left: bool) -> BoundEvaluation:
    _check_n_eps(n, epsilon)
    if not spec.has_left:
        raise InvalidInput("centered bounds need both tail fields")
    alpha = spec.min_alpha()
    if alpha <= 1:
        raise WrongRegime(f"centered bounds need min(alpha_l, alpha_r) > 1, got {alpha}")
    c = spec.w_const if left else spec.v_const
    x = float(n) ** threshold_exponent(alpha, epsilon)
    terms = {
        "union": c * _n_pow(n, 1.0 - max(1.0, alpha / 2.0) - alpha * epsilon),
        "mgf": math.exp(2 * c) * _n_pow(n, -alpha * epsilon),
    }
    side = "centered_left" if left else "centered_right"
    return BoundEvaluation(kind, -x if left else x, terms["union"] + terms["mgf"], terms, int(n), epsilon, side)


def thm3_bound(spec: TailClassSpec, n: int, epsilon: float) -> BoundEvaluation:
    """``P[S_n - E S_n >= x] <= V n^{1-max(1,alpha/2)-alpha eps} + e^{2V} n^{-alpha eps}``, ``alpha > 1``."""
    return _centered(BoundKind.THM3_RIGHT_CENTERED, spec, n, epsilon, left=False)


def thm4_bound(spec: TailClassSpec, n: int, epsilon: float) -> BoundEvaluation:
    """Left-tail mirror of :func:`thm3_bound` with ``W``."""
    return _centered(BoundKind.THM4_LEFT_CENTERED, spec, n, epsilon, left=True)


def centered_abs_bound(spec: TailClassSpec, n: int, epsilon: float) -> BoundEvaluation:
    """Union bound ``thm3 + thm4`` for ``P[|S_n - E S_n| >= x]``."""
    right, left = thm3_bound(spec, n, epsilon), thm4_bound(spec, n, epsilon)
    terms = {f"right_{k}": v for k, v in right.terms.items()}
    terms.update({f"left_{k}": v for k, v in left.terms.items()})
    return BoundEvaluation(
        BoundKind.CENTERED_ABS, right.threshold_x, right.raw_value + left.raw_value, terms, int(n), epsilon, "centered_abs"
    )


# -- pre-asymptotic bound ------------------------------------------------------------


def _as_spec(dist_specs: Union[TailClassSpec, Iterable[TailClassSpec]]) -> TailClassSpec:
    if isinstance(dist_specs, TailClassSpec):
        return dist_specs
    return aggregate_sequence(dist_specs)


def _one_sided(
    spec: TailClassSpec,
    n: int,
    epsilon: float,
    schedule: Optional[MuSchedule],
    mu: Optional[float],
    far_factor: float,
    side: str,
) -> BoundEvaluation:
    """Right-tail pre-asymptotic bound for ``spec`` (callers mirror for the left tail)."""
    if spec.alpha_r <= 1:
        alpha, regime = spec.alpha_r, Regime.SUBLINEAR
    elif spec.has_left and spec.min_alpha() > 1:
        alpha, regime = spec.min_alpha(), Regime.CONCENTRATED
    else:
        raise WrongRegime("alpha > 1 bounds need both tail fields with min(alpha_l, alpha_r) > 1")
    v = spec.v_const
    if schedule is None:
        schedule = mu_schedule(n, epsilon, alpha, mu)
    elif (schedule.n, schedule.epsilon, schedule.alpha) != (int(n), float(epsilon), float(alpha)):
        raise WrongRegime(
            f"schedule (n={schedule.n}, eps={schedule.epsilon}, alpha={schedule.alpha}) "
            f"does not match (n={n}, eps={epsilon}, alpha={alpha})"
        )
    if not schedule.mu < 1:
        raise InvalidSchedule(f"mu = {schedule.mu!r} must be < 1")
    if schedule.mu > alpha:
        raise InvalidSchedule(f"mu = {schedule.mu!r} exceeds alpha = {alpha!r}")

    log_x = math.log(schedule.x)
    union = n * v * math.exp(-alpha * log_x)
    # V e^{mu x} n x^-alpha, evaluated in log space
    drift = far_factor * v * math.exp(schedule.mu_x + math.log(n) - alpha * log_x)
    if regime is Regime.SUBLINEAR:
        per_var, t_name = t0_term(alpha, v, schedule.mu), "t0"
        kind_side = "right"
    else:
        per_var, t_name = tau_term(alpha, v, spec.w_const, schedule.mu), "tau"
        kind_side = "centered_right"
    exponent = -schedule.mu_x + n * per_var + drift
    try:
        mgf = math.exp(exponent)
    except OverflowError:
        mgf = math.inf
    details = {t_name: per_var, "n_" + t_name: n * per_var, "mu": schedule.mu, "mu_x": schedule.mu_x, "exponent": exponent}
    return BoundEvaluation(
        BoundKind.PRE_ASYMPTOTIC,
        schedule.x,
        union + mgf,
        {"union": union, "mgf": mgf},
        int(n),
        float(epsilon),
        side if side != "right" else kind_side,
        details,
    )


def preasymptotic_bound(
    dist_specs: Union[TailClassSpec, Iterable[TailClassSpec]],
    n: int,
    epsilon: float,
    schedule: Optional[MuSchedule] = None,
    side: str = "right",
    mu: Optional[float] = None,
    far_factor: float = 1.0,
) -> BoundEvaluation:
    """Explicit finite-n bound from which the theorem statements follow.

    Parameters
    ----------
    dist_specs
        One certificate, or a list that is aggregated by min exponent / max constant.
    n, epsilon
        Number of summands and threshold slack.
    schedule
        Optional precomputed :class:`MuSchedule`; must match ``(n, epsilon, alpha)``.
    side
        ``"right"`` bounds ``P[S_n >= x]`` (centered when alpha > 1), ``"left"``
        the mirrored event, and ``"abs"`` the two-sided centered event (alpha > 1).
    mu
        Optional override of the schedule's ``mu``.
    far_factor
        Multiplier on ``V e^{mu x} n x^-alpha``; 1 reproduces the stated far-segment
        constant, 4 the constant the integral step yields.

    Returns
    -------
    BoundEvaluation
        Terms ``union`` (``n V x^-alpha``) and ``mgf`` (the exponential); ``details``
        carries ``t0`` or ``tau``, ``mu`` and the exponent.
    """
    _check_n_eps(n, epsilon)
    spec = _as_spec(dist_specs)
    if side == "right":
        return _one_sided(spec, n, epsilon, schedule, mu, far_factor, "right")
    if side == "left":
        if not spec.has_left:
            raise InvalidInput("left-side bound needs the left-tail fields")
        ev = _one_sided(spec.mirrored(), n, epsilon, schedule, mu, far_factor, "left")
        side_name = "left" if spec.alpha_l <= 1 else "centered_left"
        return BoundEvaluation(ev.kind, -ev.threshold_x, ev.raw_value, ev.terms, ev.n, ev.epsilon, side_name, ev.details)
    if side == "abs":
        if not (spec.has_left and spec.min_alpha() > 1):
            raise WrongRegime("two-sided centered bound needs min(alpha_l, alpha_r) > 1")
        right = _one_sided(spec, n, epsilon, schedule, mu, far_factor, "right")
        left = _one_sided(spec.mirrored(), n, epsilon, schedule, mu, far_factor, "left")
        terms = {f"right_{k}": v for k, v in right.terms.items()}
        terms.update({f"left_{k}": v for k, v in left.terms.items()})
        details = {f"right_{k}": v for k, v in right.details.items()}
        details.update({f"left_{k}": v for k, v in left.details.items()})
        return BoundEvaluation(
            BoundKind.PRE_ASYMPTOTIC, right.threshold_x, right.raw_value + left.raw_value, terms, int(n), float(epsilon), "centered_abs", details
        )
    raise InvalidInput(f"side must be 'right', 'left' or 'abs', got {side!r}")


# -- schedule identities -------------------------------------------------------------


@dataclass(frozen=True)
class DriftIdentity:
    """``lhs = V e^{mu x} n x^-alpha - mu x`` against ``rhs = V - alpha eps ln n``."""

    lhs: float
    rhs: float

    @property
    def equal(self) -> bool:
        return math.isclose(self.lhs, self.rhs, rel_tol=1e-9, abs_tol=1e-12)


def drift_identity(v: float, alpha: float, n: int, epsilon: float) -> DriftIdentity:
    """Evaluate both sides of the drift identity for the default schedule.

    Equality holds for ``alpha <= 2``; for ``alpha > 2`` the left side is smaller.
    """
    s = mu_schedule(n, epsilon, alpha)
    lhs = v * math.exp(s.mu_x + math.log(n) - alpha * math.log(s.x)) - s.mu_x
    return DriftIdentity(lhs, v - alpha * epsilon * math.log(n))


def vanishing_term(alpha: float, n: int, epsilon: float, v: float = 1.0, w: float = 1.0) -> float:
    """``n T_0(alpha, mu(n))`` for alpha <= 1, or ``n T(alpha, mu(n))`` for alpha > 1."""
    s = mu_schedule(n, epsilon, alpha)
    if alpha <= 1:
        return n * t0_term(alpha, v, s.mu)
    return n * tau_term(alpha, v, w, s.mu)
