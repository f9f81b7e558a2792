"""Chernoff information between Poisson observation laws.

A photon counter observing a weak optical mode sees a Poisson-distributed
count whose mean depends on the hypothesis.  Discriminating two hypotheses
with per-slice means ``lambda0`` and ``lambda1`` is governed by the Chernoff
divergence

    C_s(lambda0, lambda1) = s*lambda0 + (1-s)*lambda1
                            - lambda0**s * lambda1**(1-s),   s in [0, 1],

which is the closed form of ``-log sum_y p0(y)**s * p1(y)**(1-s)`` for
Poisson laws.  This module provides the closed form, an independent series
evaluation used as a cross-check, the maximization over ``s``, and the
related tilted-rate and KL quantities.

Facts relied on elsewhere and tested here:

* ``C_s`` is strictly concave in ``s`` on [0, 1] when the rates differ and
  vanishes at both endpoints.
* The maximizing ``s*`` solves the stationarity condition
  ``lambda0**s * lambda1**(1-s) = (lambda1 - lambda0) / log(lambda1/lambda0)``
  and depends on the rates only through their ratio:
  ``s* = S(R) = log((R - 1)/log R) / log R`` with ``R = lambda0/lambda1``.
* ``S`` maps (0, 1) strictly increasingly into (0, 1/2), approaching 1/2 as
  the rates merge.
* The Poisson law with the tilted rate ``lambda0**s* * lambda1**(1-s*)`` is
  KL-equidistant from both hypotheses, and that common distance equals the
  maximal Chernoff value.
* Scaling both rates by ``c > 0`` scales ``C_s`` by ``c``; this is what turns
  a per-slice divergence into an exponent in the total photon number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

#: Relative tolerance below which two rates are treated as equal, making the
#: divergence identically zero and the maximizer conventionally 1/2.
EQUAL_RATE_RTOL = 1e-14

#: Golden-section parameters for the concave search over s.
GOLDEN_TOL = 1e-10
GOLDEN_MAX_ITER = 200


@dataclass(frozen=True)
class RatePair:
    """Mean photon counts under the two hypotheses of a binary test."""

    lambda0: float
    lambda1: float

    def __post_init__(self) -> None:
        for name in ("lambda0", "lambda1"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be finite and positive, got {value!r}")

    @property
    def degenerate(self) -> bool:
        """True when the rates agree to within EQUAL_RATE_RTOL (relatively)."""
        return abs(self.lambda0 - self.lambda1) <= EQUAL_RATE_RTOL * max(
            self.lambda0, self.lambda1
        )


@dataclass(frozen=True)
class ChernoffOptimum:
    """Maximizing tilt and value of the Chernoff divergence."""

    s_star: float
    value: float


def poisson_log_pmf(rate: float, count: int) -> float:
    """Log-probability of observing ``count`` photons at mean ``rate``.

    Args:
        rate: Poisson mean, must be positive.
        count: nonnegative integer observation.

    Returns:
        ``count*log(rate) - rate - log(count!)``.
    """
    if rate <= 0.0 or not math.isfinite(rate):
        raise ValueError(f"rate must be finite and positive, got {rate!r}")
    if count < 0 or count != int(count):
        raise ValueError(f"count must be a nonnegative integer, got {count!r}")
    return count * math.log(rate) - rate - math.lgamma(count + 1)


def chernoff_s(pair: RatePair, s: float) -> float:
    """Chernoff divergence ``C_s`` between Poisson(lambda0) and Poisson(lambda1).

    Args:
        pair: the two hypothesis rates.
        s: tilt parameter in [0, 1].

    Returns:
        ``s*lambda0 + (1-s)*lambda1 - lambda0**s * lambda1**(1-s)``, which is
        nonnegative and zero iff the rates coincide or s is an endpoint.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s!r}")
    l0, l1 = pair.lambda0, pair.lambda1
    mixed = math.exp(s * math.log(l0) + (1.0 - s) * math.log(l1))
    return s * l0 + (1.0 - s) * l1 - mixed


def chernoff_values(
    lambda0: np.ndarray, lambda1: np.ndarray, s: float
) -> np.ndarray:
    """Vectorized ``C_s`` over arrays of rate pairs.

    Zero rates are admitted with the continuous convention
    ``C_s(0, lambda1) = s*0 + (1-s)*lambda1`` for s in (0, 1].
    """
    l0 = np.asarray(lambda0, dtype=float)
    l1 = np.asarray(lambda1, dtype=float)
    with np.errstate(divide="ignore"):
        log0 = np.log(l0)
        log1 = np.log(l1)
    exponent = s * log0 + (1.0 - s) * log1
    # s*(-inf) is nan for s == 0; the convention 0**0 = 1 restores lambda1.
    mixed = np.where(np.isnan(exponent), np.where(l0 == 0, l1, l0), np.exp(exponent))
    return s * l0 + (1.0 - s) * l1 - mixed


def chernoff_s_series(pair: RatePair, s: float, tail_tol: float = 1e-16) -> float:
    """Series evaluation of ``-log sum_y p0(y)**s * p1(y)**(1-s)``.

    Independent of the closed form: sums the tilted product of the two pmfs
    term by term.  Summation stops once the current term has stayed below
    ``tail_tol`` times the accumulated sum for 5 consecutive counts, which
    can only happen past the mode because earlier terms grow.

    Intended as an oracle; the closed form is the production path.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s!r}")
    total = 0.0
    consecutive_small = 0
    y = 0
    while consecutive_small < 5:
        term = math.exp(
            s * poisson_log_pmf(pair.lambda0, y)
            + (1.0 - s) * poisson_log_pmf(pair.lambda1, y)
        )
        total += term
        if total > 0.0 and term < tail_tol * total:
            consecutive_small += 1
        else:
            consecutive_small = 0
        y += 1
        if y > 100_000:
            raise RuntimeError("series failed to converge within 100000 terms")
    return -math.log(total)


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = GOLDEN_TOL,
    max_iter: int = GOLDEN_MAX_ITER,
) -> tuple[float, float]:
    """Maximize a unimodal function on [lo, hi] by golden-section search.

    Args:
        f: unimodal (e.g. strictly concave) function.
        lo, hi: bracket endpoints, lo < hi.
        tol: absolute tolerance on the argument.
        max_iter: iteration cap.

    Returns:
        ``(x, f(x))`` at the located maximum.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def max_chernoff(pair: RatePair) -> ChernoffOptimum:
    """Maximize the Chernoff divergence over the tilt ``s``.

    Golden-section search on [0, 1] localizes the maximizer (``C_s`` is
    strictly concave in ``s`` for distinct rates, so the search is globally
    valid), then Newton steps on the stationarity equation
    ``lambda0 - lambda1 = t(s) log(lambda0/lambda1)`` sharpen it: when the
    rates are close the objective is nearly flat and bracket comparisons
    drown in rounding, while the derivative root stays well conditioned.
    For equal rates the divergence is identically zero and ``s_star = 1/2``
    by convention.
    """
    if pair.degenerate:
        return ChernoffOptimum(s_star=0.5, value=0.0)
    s, _ = golden_section_max(lambda s: chernoff_s(pair, s), 0.0, 1.0)
    log0, log1 = math.log(pair.lambda0), math.log(pair.lambda1)
    gap = pair.lambda0 - pair.lambda1
    x = log0 - log1
    for _ in range(4):
        tilted = math.exp(s * log0 + (1.0 - s) * log1)
        step = (gap - tilted * x) / (tilted * x * x)
        if not 0.0 < s + step < 1.0:
            break
        s += step
        if abs(step) < 1e-15:
            break
    return ChernoffOptimum(s_star=s, value=chernoff_s(pair, s))


def s_star_ratio(ratio: float) -> float:
    """Maximizing tilt as a function of the rate ratio ``R = lambda0/lambda1``.

    Closed form ``S(R) = log((R - 1)/log R) / log R`` for ``R`` in (0, 1),
    strictly increasing with range (0, 1/2).  Near ``R = 1`` the direct
    expression loses precision, so the expansion
    ``S(R) = 1/2 + x/24 - x**3/2880 + O(x**5)`` in ``x = log R`` is used.
    """
    if not 0.0 < ratio < 1.0 or not math.isfinite(ratio):
        raise ValueError(f"ratio must lie strictly inside (0, 1), got {ratio!r}")
    x = math.log(ratio)
    if abs(x) < 1e-4:
        return 0.5 + x / 24.0 - x**3 / 2880.0
    return math.log((ratio - 1.0) / x) / x


def kl_poisson(rate_a: float, rate_b: float) -> float:
    """KL divergence ``D(Poisson(rate_a) || Poisson(rate_b))``.

    Equals ``rate_a*log(rate_a/rate_b) + rate_b - rate_a``; nonnegative and
    zero iff the rates coincide.
    """
    if rate_a <= 0.0 or rate_b <= 0.0:
        raise ValueError("rates must be positive")
    return rate_a * math.log(rate_a / rate_b) + rate_b - rate_a


def tilted_rate(pair: RatePair, s: float) -> float:
    """Geometric interpolation ``lambda0**s * lambda1**(1-s)`` of the rates.

    At the maximizing tilt this is the rate of the Poisson law sitting
    KL-equidistant between the two hypotheses; see ``max_chernoff``.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s!r}")
    return math.exp(s * math.log(pair.lambda0) + (1.0 - s) * math.log(pair.lambda1))
