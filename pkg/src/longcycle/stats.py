"""Chernoff-type tail bounds and the Wilson score interval."""

from __future__ import annotations

import math
from statistics import NormalDist


def _check_np(n: float, p: float) -> None:
    if n <= 0 or not 0 < p <= 1:
        raise ValueError("need n > 0 and 0 < p <= 1")


def chernoff_lower(n: float, p: float, a: float) -> float:
    """Bound on ``P[X < (1 - a) n p]`` for ``X ~ Bin(n, p)``: ``exp(-a^2 n p / 2)``."""
    _check_np(n, p)
    if not a > 0:
        raise ValueError("a must be positive")
    return math.exp(-a * a * n * p / 2)


def chernoff_upper(n: float, p: float, a: float) -> float:
    """Bound on ``P[X > (1 + a) n p]``: ``exp(-a^2 n p / 3)`` for ``0 < a < 1``."""
    _check_np(n, p)
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    return math.exp(-a * a * n * p / 3)


def chernoff_tail(n: float, p: float, a: int) -> float:
    """Bound on ``P[X >= a]``: ``(e n p / a)^a`` for a positive integer ``a``."""
    _check_np(n, p)
    if isinstance(a, bool) or not isinstance(a, int) or a < 1:
        raise ValueError("a must be a positive integer")
    return (math.e * n * p / a) ** a


def wilson(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError("need 0 <= successes <= trials and trials >= 1")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # rounding can push an endpoint past phat when it sits at 0 or 1
    return min(phat, max(0.0, centre - half)), max(phat, min(1.0, centre + half))
