"""Power-majorized tail classes and their aggregation over sequences.

A :class:`TailClassSpec` certifies that an integer-valued variable satisfies

    P[X >= k] <= V * k**(-alpha_r)   and   P[X <= -k] <= W * k**(-alpha_l)

for every integer ``k >= 1``.  The left-tail pair may be absent, in which case
the left tail is unconstrained.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Iterable, Optional

import numpy as np

from .errors import InvalidInput

if TYPE_CHECKING:
    from .distributions import IntegerDistribution


class Regime(enum.Enum):
    SUBLINEAR = "SubLinear"  # 0 < alpha <= 1
    CONCENTRATED = "Concentrated"  # alpha > 1

    @classmethod
    def for_alpha(cls, alpha: float) -> "Regime":
        return cls.SUBLINEAR if alpha <= 1 else cls.CONCENTRATED


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise InvalidInput(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class TailClassSpec:
    """Majorization certificate ``(V, W, alpha_l, alpha_r)``."""

    alpha_r: float
    v_const: float
    alpha_l: Optional[float] = None
    w_const: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha_r", _check_positive("alpha_r", self.alpha_r))
        object.__setattr__(self, "v_const", _check_positive("v", self.v_const))
        if (self.alpha_l is None) != (self.w_const is None):
            raise InvalidInput("alpha_l and w must be given together or both omitted")
        if self.alpha_l is not None:
            object.__setattr__(self, "alpha_l", _check_positive("alpha_l", self.alpha_l))
            object.__setattr__(self, "w_const", _check_positive("w", self.w_const))

    @property
    def has_left(self) -> bool:
        return self.alpha_l is not None

    def min_alpha(self) -> float:
        """Smallest tail exponent across both tails."""
        if self.alpha_l is None:
            return self.alpha_r
        return min(self.alpha_l, self.alpha_r)

    @property
    def regime(self) -> Regime:
        return Regime.for_alpha(self.min_alpha())

    def mirrored(self) -> "TailClassSpec":
        """Certificate of ``-X`` given the certificate of ``X``."""
        if not self.has_left:
            raise InvalidInput("cannot mirror a spec without left-tail fields")
        return TailClassSpec(self.alpha_l, self.w_const, self.alpha_r, self.v_const)

    def right_majorant(self, k):
        return self.v_const * np.power(np.asarray(k, dtype=float), -self.alpha_r)

    def left_majorant(self, k):
        if not self.has_left:
            raise InvalidInput("spec has no left-tail fields")
        return self.w_const * np.power(np.asarray(k, dtype=float), -self.alpha_l)

    def to_json(self) -> dict[str, float]:
        out = {"alpha_r": self.alpha_r, "v": self.v_const}
        if self.has_left:
            out["alpha_l"] = self.alpha_l
            out["w"] = self.w_const
        return out

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "TailClassSpec":
        if not isinstance(obj, dict):
            raise InvalidInput(f"tail spec must be a JSON object, got {type(obj).__name__}")
        unknown = set(obj) - {"alpha_r", "v", "alpha_l", "w"}
        if unknown:
            raise InvalidInput(f"unknown tail spec field(s): {sorted(unknown)}")
        for key in ("alpha_r", "v"):
            if key not in obj:
                raise InvalidInput(f"tail spec missing field {key!r}")
        return cls(obj["alpha_r"], obj["v"], obj.get("alpha_l"), obj.get("w"))


def aggregate_sequence(specs: Iterable[TailClassSpec]) -> TailClassSpec:
    """Combine per-variable certificates into one that majorizes all of them.

    Exponents combine by ``min`` and constants by ``max``; since ``k >= 1`` the
    result dominates every input tail.
    """
    specs = list(specs)
    if not specs:
        raise InvalidInput("aggregate_sequence needs at least one spec")
    has_left = {s.has_left for s in specs}
    if len(has_left) > 1:
        raise InvalidInput("specs mix present and absent left-tail fields")
    alpha_r = min(s.alpha_r for s in specs)
    v = max(s.v_const for s in specs)
    if specs[0].has_left:
        return TailClassSpec(
            alpha_r, v, min(s.alpha_l for s in specs), max(s.w_const for s in specs)
        )
    return TailClassSpec(alpha_r, v)


@dataclass(frozen=True)
class MembershipReport:
    """Outcome of checking a distribution's tails against a certificate.

    Margins are ``majorant - tail`` in absolute terms; a negative margin is a
    violation.
    """

    k_max: int
    passed: bool
    worst_margin: float
    worst_k: int
    first_violation: Optional[int]
    right_violations: int
    left_violations: int
    left_checked: bool


def verify_membership(
    dist: "IntegerDistribution", spec: TailClassSpec, k_max: int
) -> MembershipReport:
    """Check ``P[X >= k] <= V k^-alpha_r`` (and the left analogue) for ``1 <= k <= k_max``."""
    k_max = int(k_max)
    if k_max < 1:
        raise InvalidInput("k_max must be >= 1")
    ks = np.arange(1, k_max + 1)
    margins = spec.right_majorant(ks) - dist.tail_plus_array(ks)
    bad = margins < 0
    right_bad = int(bad.sum())
    left_bad = 0
    if spec.has_left:
        left_margins = spec.left_majorant(ks) - dist.tail_minus_array(ks)
        left_bad = int((left_margins < 0).sum())
        bad = bad | (left_margins < 0)
        margins = np.minimum(margins, left_margins)
    worst = int(np.argmin(margins))
    first = int(ks[np.argmax(bad)]) if bad.any() else None
    return MembershipReport(
        k_max=k_max,
        passed=first is None,
        worst_margin=float(margins[worst]),
        worst_k=int(ks[worst]),
        first_violation=first,
        right_violations=right_bad,
        left_violations=left_bad,
        left_checked=spec.has_left,
    )
