"""Exactly computable integer-valued laws with certified power-law tails.

Every law exposes ``upper(k) = P[X >= k]`` and ``lower(k) = P[X <= k]`` for any
integer ``k``, from which the right tail ``F+(k) = upper(k)`` and the left tail
``F-(k) = lower(-k)`` follow.  Range sums such as ``sum e^{ck} P[X=k]`` are
evaluated in closed form or with controlled truncation, so they stay exact to
double precision even when the range holds ~1e10 integers.
"""

from __future__ import annotations

import abc
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Union

import numpy as np
from scipy import special

from ._sums import DIRECT_LIMIT, exp_power_sum
from .errors import InvalidInput
from .tail_model import TailClassSpec

Bound = Union[int, float]  # an integer, or +-math.inf

# certificate constants computed at a maximizer get this relative slack so
# that rounding in ``V * k**-alpha`` cannot dip below the exact tail
_CERT_SLACK = 1e-12
_EXP_TOL = 1e-10
_MAX_SAMPLE_K = float(2**53)


class _DivergentType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Divergent"

    def __reduce__(self):
        return (_DivergentType, ())


DIVERGENT = _DivergentType()
"""Returned by :func:`expectation_tail_sum` when the mean does not exist."""


def _clip(lo: Bound, hi: Bound, smin: Bound, smax: Bound) -> tuple[Bound, Bound]:
    return max(lo, smin), min(hi, smax)


class IntegerDistribution(abc.ABC):
    """Base class for the built-in laws.  Instances are immutable."""

    kind: str = ""

    # -- support and tails -------------------------------------------------
    @property
    @abc.abstractmethod
    def support_min(self) -> Bound: ...

    @property
    @abc.abstractmethod
    def support_max(self) -> Bound: ...

    @abc.abstractmethod
    def pmf(self, k: int) -> float: ...

    @abc.abstractmethod
    def upper(self, k: int) -> float:
        """P[X >= k]."""

    @abc.abstractmethod
    def lower(self, k: int) -> float:
        """P[X <= k]."""

    def tail_plus(self, k: int) -> float:
        return self.upper(k)

    def tail_minus(self, k: int) -> float:
        return self.lower(-k)

    def upper_array(self, k: np.ndarray) -> np.ndarray:
        return np.array([self.upper(int(v)) for v in np.asarray(k).ravel()]).reshape(np.shape(k))

    def lower_array(self, k: np.ndarray) -> np.ndarray:
        return np.array([self.lower(int(v)) for v in np.asarray(k).ravel()]).reshape(np.shape(k))

    def tail_plus_array(self, k) -> np.ndarray:
        return self.upper_array(np.asarray(k))

    def tail_minus_array(self, k) -> np.ndarray:
        return self.lower_array(-np.asarray(k))

    # exact tail decay exponents; inf means faster than any power (or zero)
    @property
    @abc.abstractmethod
    def right_exponent(self) -> float: ...

    @property
    @abc.abstractmethod
    def left_exponent(self) -> float: ...

    @property
    @abc.abstractmethod
    def certified(self) -> TailClassSpec: ...

    # -- range sums ----------------------------------------------------------
    def prob_range(self, lo: Bound, hi: Bound) -> float:
        """P[lo <= X <= hi]."""
        lo, hi = _clip(lo, hi, self.support_min, self.support_max)
        if lo > hi:
            return 0.0
        if math.isinf(lo) and math.isinf(hi):
            return 1.0
        if math.isinf(lo):
            return self.lower(int(hi))
        if math.isinf(hi):
            return self.upper(int(lo))
        lo, hi = int(lo), int(hi)
        if hi - lo < 64:
            return math.fsum(self.pmf(k) for k in range(lo, hi + 1))
        if lo >= 1:
            return self.upper(lo) - self.upper(hi + 1)
        return self.lower(hi) - self.lower(lo - 1)

    @abc.abstractmethod
    def mgf_range(self, c: float, lo: Bound, hi: Bound) -> float:
        """sum_{lo <= k <= hi} exp(c k) P[X = k]."""

    @abc.abstractmethod
    def moment_range(self, lo: Bound, hi: Bound) -> float:
        """sum_{lo <= k <= hi} k P[X = k]."""

    @abc.abstractmethod
    def right_series(self) -> float:
        """sum_{j >= 1} P[X >= j]; only called when it converges."""

    @abc.abstractmethod
    def left_series(self) -> float:
        """sum_{j >= 1} P[X <= -j]; only called when it converges."""

    # -- sampling ------------------------------------------------------------
    def invert(self, u: float) -> int:
        """Largest integer k with P[X >= k] >= u, for u in (0, 1].

        Doubling bracket followed by bisection on the exact upper tail.
        """
        if not 0.0 < u <= 1.0:
            raise InvalidInput(f"u must lie in (0, 1], got {u!r}")
        if self.upper(0) >= u:
            lo, step = 0, 1
            while self.upper(lo + step) >= u:
                lo += step
                step *= 2
            hi = lo + step
        else:
            hi, step = 0, 1
            while self.upper(hi - step) < u:
                hi -= step
                step *= 2
            lo = hi - step
        # invariant: upper(lo) >= u > upper(hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.upper(mid) >= u:
                lo = mid
            else:
                hi = mid
        return lo

    def sample(self, rng: np.random.Generator) -> int:
        return self.invert(1.0 - rng.random())

    def sample_array(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Vectorised draws as float64 integers; one uniform per draw for leaf laws."""
        u = 1.0 - rng.random(size)
        return np.array([self.invert(float(v)) for v in u], dtype=float)

    # -- serialisation -------------------------------------------------------
    @abc.abstractmethod
    def to_json(self) -> dict[str, Any]: ...

    @property
    def dist_id(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def mean(self):
        return expectation_tail_sum(self)


def _correct_inversion(dist: IntegerDistribution, k: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Repair +-1 rounding errors of a closed-form inversion against the exact tail."""
    exact = k < _MAX_SAMPLE_K
    up = exact & (dist.upper_array(k + 1) >= u)
    k = np.where(up, k + 1, k)
    down = exact & (dist.upper_array(k) < u)
    return np.where(down, k - 1, k)


@dataclass(frozen=True)
class ExactTailPareto(IntegerDistribution):
    """Law with ``P[X >= k] = v k^-alpha`` for every integer ``k >= 1``.

    ``P[X = 0] = 1 - v``; the support is ``{1, 2, ...}`` when ``v == 1``.
    """

    alpha: float
    v: float = 1.0
    kind = "exact_tail_pareto"

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidInput(f"alpha must be positive, got {self.alpha!r}")
        if not 0 < self.v <= 1:
            raise InvalidInput(f"v must lie in (0, 1], got {self.v!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "v", float(self.v))

    @property
    def support_min(self):
        return 1 if self.v == 1.0 else 0

    @property
    def support_max(self):
        return math.inf

    def pmf(self, k: int) -> float:
        if k == 0:
            return 1.0 - self.v
        if k < 0:
            return 0.0
        return self.v * (k ** -self.alpha - (k + 1) ** -self.alpha)

    def upper(self, k: int) -> float:
        if k <= 0:
            return 1.0
        return self.v * float(k) ** -self.alpha

    def lower(self, k: int) -> float:
        if k < 0:
            return 0.0
        return 1.0 - self.v * float(k + 1) ** -self.alpha

    def upper_array(self, k):
        k = np.asarray(k, dtype=float)
        safe = np.where(k >= 1, k, 1.0)
        return np.where(k >= 1, self.v * np.power(safe, -self.alpha), 1.0)

    @property
    def right_exponent(self):
        return self.alpha

    @property
    def left_exponent(self):
        return math.inf

    @property
    def certified(self):
        return TailClassSpec(self.alpha, self.v, self.alpha, self.v)

    def mgf_range(self, c, lo, hi):
        lo, hi = _clip(lo, hi, 0, math.inf)
        if lo > hi:
            return 0.0
        total = 0.0
        if lo == 0:
            total += 1.0 - self.v
            lo = 1
            if hi < 1:
                return total
        a = int(lo)
        if not math.isinf(hi) and hi - a + 1 <= DIRECT_LIMIT:
            k = np.arange(a, int(hi) + 1, dtype=float)
            pm = self.v * (np.power(k, -self.alpha) - np.power(k + 1, -self.alpha))
            return total + float(np.sum(np.exp(c * k) * pm))
        # summation by parts over P[X = k] = F(k) - F(k+1)
        head = math.exp(c * a) * a ** -self.alpha
        tail_end = 0.0 if math.isinf(hi) else math.exp(c * hi) * (hi + 1) ** -self.alpha
        middle = -math.expm1(-c) * exp_power_sum(c, self.alpha, a + 1, hi)
        return total + self.v * (head - tail_end + middle)

    def moment_range(self, lo, hi):
        lo, hi = _clip(lo, hi, 1, math.inf)
        if lo > hi:
            return 0.0
        a = int(lo)
        if math.isinf(hi) and self.alpha <= 1:
            return math.inf
        end = 0.0 if math.isinf(hi) else hi * self.upper(int(hi) + 1)
        return a * self.upper(a) - end + self.v * exp_power_sum(0.0, self.alpha, a + 1, hi)

    def right_series(self):
        return self.v * float(special.zeta(self.alpha, 1))

    def left_series(self):
        return 0.0

    def sample_array(self, rng, size):
        u = 1.0 - rng.random(size)
        with np.errstate(over="ignore"):
            k = np.floor(np.power(self.v / u, 1.0 / self.alpha))
        k = np.where(u > self.v, 0.0, np.minimum(k, 1e300))
        return _correct_inversion(self, k, u)

    def to_json(self):
        return {"kind": self.kind, "alpha": self.alpha, "v": self.v}


@dataclass(frozen=True)
class TruncatedPareto(IntegerDistribution):
    """``P[X >= k] = v k^-alpha`` for ``1 <= k <= cap`` and zero beyond.

    The mass above ``cap`` is moved onto ``cap`` itself, so the law stays in the
    same tail class as :class:`ExactTailPareto` while carrying an atom at ``cap``.
    """

    alpha: float
    v: float
    cap: int
    kind = "truncated_pareto"

    def __post_init__(self):
        ExactTailPareto(self.alpha, self.v)  # validates alpha and v
        if int(self.cap) != self.cap or self.cap < 1:
            raise InvalidInput(f"cap must be a positive integer, got {self.cap!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "v", float(self.v))
        object.__setattr__(self, "cap", int(self.cap))

    @property
    def _base(self) -> ExactTailPareto:
        return ExactTailPareto(self.alpha, self.v)

    @property
    def support_min(self):
        return self._base.support_min

    @property
    def support_max(self):
        return self.cap

    def pmf(self, k):
        if k == self.cap:
            return self.upper(k)
        return self._base.pmf(k) if k < self.cap else 0.0

    def upper(self, k):
        return self._base.upper(k) if k <= self.cap else 0.0

    def lower(self, k):
        return self._base.lower(k) if k < self.cap else 1.0

    def upper_array(self, k):
        k = np.asarray(k, dtype=float)
        return np.where(k <= self.cap, self._base.upper_array(k), 0.0)

    @property
    def right_exponent(self):
        return math.inf

    @property
    def left_exponent(self):
        return math.inf

    @property
    def certified(self):
        return self._base.certified

    def mgf_range(self, c, lo, hi):
        lo, hi = _clip(lo, hi, self.support_min, self.cap)
        if lo > hi:
            return 0.0
        if hi < self.cap:
            return self._base.mgf_range(c, lo, hi)
        head = self._base.mgf_range(c, lo, self.cap - 1) if lo < self.cap else 0.0
        return head + math.exp(c * self.cap) * self.upper(self.cap)

    def moment_range(self, lo, hi):
        lo, hi = _clip(lo, hi, self.support_min, self.cap)
        if lo > hi:
            return 0.0
        if hi < self.cap:
            return self._base.moment_range(lo, hi)
        head = self._base.moment_range(lo, self.cap - 1) if lo < self.cap else 0.0
        return head + self.cap * self.upper(self.cap)

    def right_series(self):
        return self.v * exp_power_sum(0.0, self.alpha, 1, self.cap)

    def left_series(self):
        return 0.0

    def sample_array(self, rng, size):
        return np.minimum(self._base.sample_array(rng, size), float(self.cap))

    def to_json(self):
        return {"kind": self.kind, "alpha": self.alpha, "v": self.v, "cap": self.cap}


@dataclass(frozen=True)
class Geometric(IntegerDistribution):
    """``P[X = k] = p (1-p)^(k-1)`` on ``{1, 2, ...}``.

    The tail decays exponentially, so it is majorized by ``V k^-alpha`` for any
    certificate exponent ``alpha``; ``V`` is the exact maximum of
    ``(1-p)^(k-1) k^alpha`` over integers ``k >= 1``.
    """

    p: float
    alpha: float = 2.0
    kind = "geometric"

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise InvalidInput(f"p must lie in (0, 1), got {self.p!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidInput(f"alpha must be positive, got {self.alpha!r}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def _log_q(self) -> float:
        return math.log1p(-self.p)

    @property
    def support_min(self):
        return 1

    @property
    def support_max(self):
        return math.inf

    def pmf(self, k):
        if k < 1:
            return 0.0
        return self.p * math.exp((k - 1) * self._log_q)

    def upper(self, k):
        if k <= 1:
            return 1.0
        return math.exp((k - 1) * self._log_q)

    def lower(self, k):
        if k < 1:
            return 0.0
        return -math.expm1(k * self._log_q)

    def upper_array(self, k):
        k = np.asarray(k, dtype=float)
        return np.where(k <= 1, 1.0, np.exp((np.maximum(k, 1.0) - 1) * self._log_q))

    @property
    def right_exponent(self):
        return math.inf

    @property
    def left_exponent(self):
        return math.inf

    @property
    def certified(self):
        kstar = self.alpha / -self._log_q
        cands = {1, max(1, math.floor(kstar)), max(1, math.ceil(kstar))}
        v = max(math.exp((k - 1) * self._log_q + self.alpha * math.log(k)) for k in cands)
        v *= 1 + _CERT_SLACK
        return TailClassSpec(self.alpha, v, self.alpha, v)

    def mgf_range(self, c, lo, hi):
        lo, hi = _clip(lo, hi, 1, math.inf)
        if lo > hi:
            return 0.0
        lr = self._log_q + c  # log of the ratio q e^c
        a = int(lo)
        if math.isinf(hi):
            if lr >= 0:
                return math.inf
            geo = math.exp(a * lr) / -math.expm1(lr)
        else:
            count = int(hi) - a + 1
            geo = math.exp(a * lr) * (count if lr == 0 else math.expm1(count * lr) / math.expm1(lr))
        return self.p * math.exp(-self._log_q) * geo

    def moment_range(self, lo, hi):
        lo, hi = _clip(lo, hi, 1, math.inf)
        if lo > hi:
            return 0.0
        a = int(lo)
        # a F(a) - b F(b+1) + sum_{k=a+1}^{b} F(k),  F(k) = q^(k-1)
        q_a = math.exp(a * self._log_q)
        if math.isinf(hi):
            return a * self.upper(a) + q_a / self.p
        b = int(hi)
        q_b = math.exp(b * self._log_q)
        return a * self.upper(a) - b * q_b + (q_a - q_b) / self.p

    def right_series(self):
        return 1.0 / self.p

    def left_series(self):
        return 0.0

    def sample_array(self, rng, size):
        u = 1.0 - rng.random(size)
        k = 1.0 + np.floor(np.log(u) / self._log_q)
        return _correct_inversion(self, k, u)

    def to_json(self):
        return {"kind": self.kind, "p": self.p, "alpha": self.alpha}


@dataclass(frozen=True)
class PointMass(IntegerDistribution):
    """Degenerate law at ``c``; certified with exponent ``alpha`` and constant ``max(1,|c|)^alpha``."""

    c: int
    alpha: float = 2.0
    kind = "point_mass"

    def __post_init__(self):
        if int(self.c) != self.c:
            raise InvalidInput(f"point mass location must be an integer, got {self.c!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidInput(f"alpha must be positive, got {self.alpha!r}")
        object.__setattr__(self, "c", int(self.c))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def support_min(self):
        return self.c

    @property
    def support_max(self):
        return self.c

    def pmf(self, k):
        return 1.0 if k == self.c else 0.0

    def upper(self, k):
        return 1.0 if k <= self.c else 0.0

    def lower(self, k):
        return 1.0 if k >= self.c else 0.0

    def upper_array(self, k):
        return np.where(np.asarray(k) <= self.c, 1.0, 0.0)

    def lower_array(self, k):
        return np.where(np.asarray(k) >= self.c, 1.0, 0.0)

    @property
    def right_exponent(self):
        return math.inf

    @property
    def left_exponent(self):
        return math.inf

    @property
    def certified(self):
        const = max(1.0, float(abs(self.c))) ** self.alpha * (1 + _CERT_SLACK)
        return TailClassSpec(self.alpha, const, self.alpha, const)

    def mgf_range(self, c, lo, hi):
        return math.exp(c * self.c) if lo <= self.c <= hi else 0.0

    def moment_range(self, lo, hi):
        return float(self.c) if lo <= self.c <= hi else 0.0

    def right_series(self):
        return float(max(self.c, 0))

    def left_series(self):
        return float(max(-self.c, 0))

    def invert(self, u):
        if not 0.0 < u <= 1.0:
            raise InvalidInput(f"u must lie in (0, 1], got {u!r}")
        return self.c

    def sample_array(self, rng, size):
        rng.random(size)  # keep stream consumption uniform across kinds
        return np.full(size, float(self.c))

    def to_json(self):
        return {"kind": self.kind, "c": self.c, "alpha": self.alpha}


@dataclass(frozen=True)
class FiniteTable(IntegerDistribution):
    """Law given by an explicit finite probability table ``{k: P[X = k]}``.

    The certificate uses exponent ``alpha`` with the smallest constants that
    majorize the table's tails.
    """

    table: tuple[tuple[int, float], ...]
    alpha: float = 2.0
    kind = "table"
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        items = dict(self.table) if not isinstance(self.table, Mapping) else dict(self.table)
        if not items:
            raise InvalidInput("table must not be empty")
        if any(int(k) != k for k in items) or any(p < 0 for p in items.values()):
            raise InvalidInput("table keys must be integers and probabilities non-negative")
        total = math.fsum(items.values())
        if abs(total - 1.0) > 1e-12:
            raise InvalidInput(f"table probabilities sum to {total}, not 1")
        ordered = tuple(sorted((int(k), float(p)) for k, p in items.items() if p > 0))
        object.__setattr__(self, "table", ordered)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "_cum", np.cumsum([p for _, p in ordered]))

    @property
    def _keys(self):
        return [k for k, _ in self.table]

    @property
    def support_min(self):
        return self.table[0][0]

    @property
    def support_max(self):
        return self.table[-1][0]

    def pmf(self, k):
        return dict(self.table).get(int(k), 0.0)

    def upper(self, k):
        return math.fsum(p for j, p in self.table if j >= k)

    def lower(self, k):
        return math.fsum(p for j, p in self.table if j <= k)

    @property
    def right_exponent(self):
        return math.inf

    @property
    def left_exponent(self):
        return math.inf

    @property
    def certified(self):
        right = [self.upper(k) * k**self.alpha for k in range(1, max(self.support_max, 0) + 1)]
        left = [self.lower(-k) * k**self.alpha for k in range(1, max(-self.support_min, 0) + 1)]
        v = max(right) * (1 + _CERT_SLACK) if right and max(right) > 0 else None
        w = max(left) * (1 + _CERT_SLACK) if left and max(left) > 0 else None
        v = v or w or 1.0
        w = w or v
        return TailClassSpec(self.alpha, v, self.alpha, w)

    def mgf_range(self, c, lo, hi):
        return math.fsum(math.exp(c * k) * p for k, p in self.table if lo <= k <= hi)

    def moment_range(self, lo, hi):
        return math.fsum(k * p for k, p in self.table if lo <= k <= hi)

    def right_series(self):
        return self.moment_range(1, math.inf)

    def left_series(self):
        return -self.moment_range(-math.inf, -1)

    def sample_array(self, rng, size):
        u = 1.0 - rng.random(size)
        # largest k with P[X >= k] >= u  <=>  smallest k with P[X <= k] >= 1 - u (up to ties)
        return np.array([self.invert(float(v)) for v in u], dtype=float)

    def to_json(self):
        return {"kind": self.kind, "table": [[k, p] for k, p in self.table], "alpha": self.alpha}


@dataclass(frozen=True)
class TwoSidedMixture(IntegerDistribution):
    """Draws from ``right`` with probability ``p_right`` and from ``-left`` otherwise."""

    right: IntegerDistribution
    left: IntegerDistribution
    p_right: float = 0.5
    kind = "two_sided"

    def __post_init__(self):
        if not 0.0 <= self.p_right <= 1.0:
            raise InvalidInput(f"p_right must lie in [0, 1], got {self.p_right!r}")
        object.__setattr__(self, "p_right", float(self.p_right))

    @property
    def _q(self) -> float:
        return 1.0 - self.p_right

    @property
    def support_min(self):
        cands = []
        if self.p_right > 0:
            cands.append(self.right.support_min)
        if self._q > 0:
            cands.append(-self.left.support_max)
        return min(cands)

    @property
    def support_max(self):
        cands = []
        if self.p_right > 0:
            cands.append(self.right.support_max)
        if self._q > 0:
            cands.append(-self.left.support_min)
        return max(cands)

    def pmf(self, k):
        return self.p_right * self.right.pmf(k) + self._q * self.left.pmf(-k)

    def upper(self, k):
        return self.p_right * self.right.upper(k) + self._q * self.left.lower(-k)

    def lower(self, k):
        return self.p_right * self.right.lower(k) + self._q * self.left.upper(-k)

    def upper_array(self, k):
        k = np.asarray(k)
        return self.p_right * self.right.upper_array(k) + self._q * self.left.lower_array(-k)

    def lower_array(self, k):
        k = np.asarray(k)
        return self.p_right * self.right.lower_array(k) + self._q * self.left.upper_array(-k)

    def _parts(self):
        if self.p_right > 0:
            yield self.p_right, self.right, False
        if self._q > 0:
            yield self._q, self.left, True

    @property
    def right_exponent(self):
        return min(
            [d.left_exponent if neg else d.right_exponent for _, d, neg in self._parts()]
        )

    @property
    def left_exponent(self):
        return min(
            [d.right_exponent if neg else d.left_exponent for _, d, neg in self._parts()]
        )

    @property
    def certified(self):
        right_terms, left_terms = [], []
        for w, d, neg in self._parts():
            spec = d.certified
            pos_tail = (spec.alpha_l, spec.w_const) if neg else (spec.alpha_r, spec.v_const)
            neg_tail = (spec.alpha_r, spec.v_const) if neg else (spec.alpha_l, spec.w_const)
            lo, hi = (-d.support_max, -d.support_min) if neg else (d.support_min, d.support_max)
            if hi >= 1:
                right_terms.append((pos_tail[0], w * pos_tail[1]))
            if lo <= -1:
                left_terms.append((neg_tail[0], w * neg_tail[1]))

        def combine(terms):
            if not terms:
                return None
            return min(a for a, _ in terms), math.fsum(c for _, c in terms)

        right, left = combine(right_terms), combine(left_terms)
        if right is None and left is None:
            alpha = min(d.certified.min_alpha() for _, d, _ in self._parts())
            right = left = (alpha, 1.0)
        right = right or left
        left = left or right
        return TailClassSpec(right[0], right[1], left[0], left[1])

    def mgf_range(self, c, lo, hi):
        total = 0.0
        for w, d, neg in self._parts():
            total += w * (d.mgf_range(-c, -hi, -lo) if neg else d.mgf_range(c, lo, hi))
        return total

    def moment_range(self, lo, hi):
        total = 0.0
        for w, d, neg in self._parts():
            total += w * (-d.moment_range(-hi, -lo) if neg else d.moment_range(lo, hi))
        return total

    def prob_range(self, lo, hi):
        total = 0.0
        for w, d, neg in self._parts():
            total += w * (d.prob_range(-hi, -lo) if neg else d.prob_range(lo, hi))
        return total

    def right_series(self):
        return self.p_right * self.right.right_series() + self._q * self.left.left_series()

    def left_series(self):
        return self.p_right * self.right.left_series() + self._q * self.left.right_series()

    def sample(self, rng):
        if rng.random() < self.p_right:
            return self.right.sample(rng)
        return -self.left.sample(rng)

    def sample_array(self, rng, size):
        branch = rng.random(size) < self.p_right
        r = self.right.sample_array(rng, size)
        l = self.left.sample_array(rng, size)
        return np.where(branch, r, -l)

    def to_json(self):
        return {
            "kind": self.kind,
            "right": self.right.to_json(),
            "left": self.left.to_json(),
            "p_right": self.p_right,
        }


def symmetric_pareto(alpha: float, v: float = 1.0) -> TwoSidedMixture:
    """Two-sided law equal to ``+X`` or ``-X`` with equal odds, ``X ~ ExactTailPareto``."""
    base = ExactTailPareto(alpha, v)
    return TwoSidedMixture(base, base, 0.5)


# -- module-level operations ---------------------------------------------------


def pmf(dist: IntegerDistribution, k: int) -> float:
    return dist.pmf(k)


def tail_plus(dist: IntegerDistribution, k: int) -> float:
    """P[X >= k] for k >= 1."""
    if k < 1:
        raise InvalidInput("tail functions are defined for k >= 1")
    return dist.upper(k)


def tail_minus(dist: IntegerDistribution, k: int) -> float:
    """P[X <= -k] for k >= 1."""
    if k < 1:
        raise InvalidInput("tail functions are defined for k >= 1")
    return dist.lower(-k)


def sample(dist: IntegerDistribution, rng: np.random.Generator) -> int:
    return dist.sample(rng)


def _series_with_remainder(tail, alpha: float, const: float) -> float:
    """sum_{j>=1} tail(j), stopping once const * int_N^inf t^-alpha dt < _EXP_TOL."""
    # N with const * N^(1-alpha) / (alpha - 1) < tol
    n_stop = math.ceil((const / ((alpha - 1) * _EXP_TOL)) ** (1.0 / (alpha - 1)))
    if n_stop > 10**7:
        raise InvalidInput("tail series converges too slowly for remainder-controlled summation")
    return math.fsum(tail(j) for j in range(1, n_stop + 1))


def expectation_tail_sum(dist: IntegerDistribution):
    """E X as ``sum_j P[X >= j] - sum_j P[X <= -j]``, or :data:`DIVERGENT`.

    The mean is classified divergent when either tail genuinely decays like
    ``k^-alpha`` with ``alpha <= 1``.  Built-in laws evaluate both series in
    closed form; other laws are summed with the certificate's integral
    remainder bound.
    """
    if dist.right_exponent <= 1 or dist.left_exponent <= 1:
        return DIVERGENT
    try:
        return dist.right_series() - dist.left_series()
    except NotImplementedError:
        spec = dist.certified
        right = _series_with_remainder(dist.tail_plus, spec.alpha_r, spec.v_const)
        left = _series_with_remainder(dist.tail_minus, spec.alpha_l, spec.w_const)
        return right - left


# -- JSON parsing ----------------------------------------------------------------

_KINDS = {
    "exact_tail_pareto": ExactTailPareto,
    "pareto": ExactTailPareto,
    "geometric": Geometric,
    "point_mass": PointMass,
    "point": PointMass,
    "two_sided": TwoSidedMixture,
    "table": FiniteTable,
    "truncated_pareto": TruncatedPareto,
}

_FIELDS = {
    ExactTailPareto: ("alpha", "v"),
    TruncatedPareto: ("alpha", "v", "cap"),
    Geometric: ("p", "alpha"),
    PointMass: ("c", "alpha"),
    FiniteTable: ("table", "alpha"),
    TwoSidedMixture: ("right", "left", "p_right"),
}


def from_json(obj: Any, path: str = "dist") -> IntegerDistribution:
    """Build a distribution from its JSON object form."""
    if not isinstance(obj, dict):
        raise InvalidInput(f"{path}: expected a JSON object, got {type(obj).__name__}")
    kind = obj.get("kind")
    if kind not in _KINDS:
        raise InvalidInput(f"{path}.kind: unknown distribution kind {kind!r}")
    cls = _KINDS[kind]
    allowed = set(_FIELDS[cls]) | {"kind"}
    unknown = set(obj) - allowed
    if unknown:
        raise InvalidInput(f"{path}: unknown field(s) {sorted(unknown)} for kind {kind!r}")
    kwargs = {k: obj[k] for k in _FIELDS[cls] if k in obj}
    if cls is TwoSidedMixture:
        for side in ("right", "left"):
            if side not in obj:
                raise InvalidInput(f"{path}.{side}: missing component")
            kwargs[side] = from_json(obj[side], f"{path}.{side}")
    if cls is FiniteTable and "table" in kwargs:
        raw = kwargs["table"]
        pairs = raw.items() if isinstance(raw, dict) else raw
        kwargs["table"] = tuple((int(k), float(p)) for k, p in pairs)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise InvalidInput(f"{path}: {exc}") from None


def parse_dist(text: str) -> IntegerDistribution:
    """Parse a JSON object or a shorthand such as ``geometric:0.5`` or ``pareto:0.8:1``.

    Shorthands: ``pareto:ALPHA[:V]``, ``geometric:P[:ALPHA]``, ``point:C[:ALPHA]``,
    ``symmetric_pareto:ALPHA[:V]``.
    """
    text = text.strip()
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"dist JSON line {exc.lineno} col {exc.colno}: {exc.msg}") from None
        return from_json(obj)
    name, *args = text.split(":")
    try:
        nums = [float(a) for a in args]
    except ValueError:
        raise InvalidInput(f"bad numeric argument in distribution shorthand {text!r}") from None
    if name in ("pareto", "exact_tail_pareto") and 1 <= len(nums) <= 2:
        return ExactTailPareto(*nums)
    if name == "geometric" and 1 <= len(nums) <= 2:
        return Geometric(*nums)
    if name in ("point", "point_mass") and 1 <= len(nums) <= 2:
        return PointMass(int(nums[0]), *nums[1:])
    if name == "symmetric_pareto" and 1 <= len(nums) <= 2:
        return symmetric_pareto(*nums)
    raise InvalidInput(f"unrecognised distribution shorthand {text!r}")


def builtin_family(alpha: float) -> list[IntegerDistribution]:
    """Built-in laws whose certificate has minimum exponent ``alpha``."""
    return [
        ExactTailPareto(alpha, 1.0),
        ExactTailPareto(alpha, 0.5),
        Geometric(0.5, alpha),
        Geometric(0.2, alpha),
        PointMass(0, alpha),
        PointMass(3, alpha),
        PointMass(-2, alpha),
        symmetric_pareto(alpha),
        TwoSidedMixture(ExactTailPareto(alpha, 1.0), Geometric(0.5, alpha), 0.7),
    ]
