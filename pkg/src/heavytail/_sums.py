"""Accurate evaluation of ``sum_{k=a}^{b} exp(c*k) * k**(-s)`` over long ranges.

Short ranges are summed directly.  Long ranges with a slowly varying summand
(|c| small) are summed directly over a head block and by Euler-Maclaurin over
the rest; the remainder after the ``B_8`` term is below double precision once
the head block has length >= 2000.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy import special

from .errors import UnsupportedScale

DIRECT_LIMIT = 20_000
HEAD = 2_000
_SLOW_C = 0.01
_CHUNK = 1 << 20

# B_2, B_4, B_6, B_8 divided by (2j)!
_EM_COEFFS = (
    (1, 1.0 / 6.0 / 2.0),
    (3, -1.0 / 30.0 / 24.0),
    (5, 1.0 / 42.0 / 720.0),
    (7, -1.0 / 30.0 / 40320.0),
)

MAX_EXPONENT = 700.0


def _direct(c: float, s: float, a: int, b: int) -> float:
    total = 0.0
    for lo in range(a, b + 1, _CHUNK):
        hi = min(b, lo + _CHUNK - 1)
        k = np.arange(lo, hi + 1, dtype=float)
        total += float(np.sum(np.exp(c * k - s * np.log(k))))
    return total


def _derivative(c: float, s: float, m: int, t: float) -> float:
    """m-th derivative of exp(c t) t^-s."""
    acc = 0.0
    rising = 1.0
    for j in range(m + 1):
        acc += math.comb(m, j) * c ** (m - j) * (-1) ** j * rising * t ** (-s - j)
        rising *= s + j
    return math.exp(c * t) * acc


def _integral(c: float, s: float, a: float, b: float) -> float:
    """Integral of exp(c t) t^-s over [a, b]; b may be inf when c < 0 or s > 1."""
    if c == 0.0:
        if math.isinf(b):
            return a ** (1.0 - s) / (s - 1.0)
        if s == 1.0:
            return math.log(b / a)
        return (b ** (1.0 - s) - a ** (1.0 - s)) / (1.0 - s)
    with mpmath.workdps(30):
        if c < 0 and math.isinf(b):
            lam = mpmath.mpf(-c)
            val = lam ** (s - 1) * mpmath.gammainc(1 - s, lam * a)
            return float(val)
        f = lambda t: mpmath.exp(c * t) * t ** (-s)  # noqa: E731
        pts = list(np.geomspace(a, b, 12)) if b / a > 4 else [a, b]
        pts[0], pts[-1] = a, b
        return float(mpmath.quad(f, [mpmath.mpf(p) for p in pts]))


def _euler_maclaurin(c: float, s: float, a: int, b: float) -> float:
    total = _integral(c, s, float(a), float(b))
    total += 0.5 * math.exp(c * a) * a ** (-s)
    if not math.isinf(b):
        total += 0.5 * math.exp(c * b) * b ** (-s)
    for order, coeff in _EM_COEFFS:
        tail = 0.0 if math.isinf(b) else _derivative(c, s, order, float(b))
        total += coeff * (tail - _derivative(c, s, order, float(a)))
    return total


def exp_power_sum(c: float, s: float, a: int, b: float) -> float:
    """Return ``sum_{k=a}^{b} exp(c k) k^-s`` for integers ``1 <= a``.

    ``b`` may be ``math.inf`` when the series converges (``c < 0``, or
    ``c == 0`` with ``s > 1``).
    """
    a = int(a)
    if a < 1:
        raise ValueError("exp_power_sum requires a >= 1")
    if b < a:
        return 0.0
    if math.isinf(b):
        if c > 0 or (c == 0 and s <= 1):
            raise ValueError("series diverges")
        if c == 0:
            return float(special.zeta(s, a))
        span = int(math.ceil(50.0 / -c))
        if span <= DIRECT_LIMIT:
            return _direct(c, s, a, a + span)
    else:
        b = int(b)
        if c < -_SLOW_C:
            # terms past a + 50/|c| are below exp(-50) of the first one
            b = min(b, a + int(math.ceil(50.0 / -c)))
        if c * b > MAX_EXPONENT:
            raise UnsupportedScale(f"exp({c} * {b}) exceeds the supported range")
        if b - a + 1 <= DIRECT_LIMIT or abs(c) > _SLOW_C:
            return _direct(c, s, a, b)
    head_end = a + HEAD - 1
    return _direct(c, s, a, head_end) + _euler_maclaurin(c, s, head_end + 1, b)
