"""Analytic reference curves for binary coherent-state discrimination.

Two dark-count-free baselines are adopted in their standard closed forms
(documented here because different conventions circulate):

* ``helstrom_binary``: the quantum-optimal error for |+alpha> vs |-alpha>,
  (1/2)(1 - sqrt(1 - e**(-4 n_s))), from the squared overlap e**(-4 n_s).
* ``homodyne_binary``: shot-noise-limited quadrature detection,
  (1/2) erfc(sqrt(2 n_s)) — Gaussian discrimination of means +-2 sqrt(n_s)
  at unit variance in the measured quadrature convention used here.

``theorem_bound`` converts an exponent into an error-probability bound
prefactor * exp(-n_s * beta), with the union-bound prefactor M-1 in general
and the exact likelihood-ratio prefactor 1/2 available for binary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .constellation import OperatingRatios, PskConstellation
from .exponent import ControlDistribution, exponent_of


@dataclass(frozen=True)
class BaselineCurve:
    """A labeled sweep of (x, p_e) points."""

    label: str
    points: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        for _, p_e in self.points:
            if not 0.0 <= p_e <= 1.0:
                raise ValueError(f"p_e out of range in curve {self.label!r}")


def helstrom_binary(n_s: float) -> float:
    """Minimum error probability for |+alpha> vs |-alpha>, n_s = alpha**2."""
    if n_s < 0.0:
        raise ValueError(f"n_s must be nonnegative, got {n_s!r}")
    return 0.5 * (1.0 - math.sqrt(1.0 - math.exp(-4.0 * n_s)))


def homodyne_binary(n_s: float) -> float:
    """Shot-noise-limited homodyne error for the same binary alphabet."""
    if n_s < 0.0:
        raise ValueError(f"n_s must be nonnegative, got {n_s!r}")
    return 0.5 * math.erfc(math.sqrt(2.0 * n_s))


def theorem_bound(
    beta: float, n_s: float, num_states: int, binary_prefactor: bool = False
) -> float:
    """Error bound prefactor * exp(-n_s * beta), capped at 1.

    The generic prefactor is num_states - 1 (union bound over wrong
    hypotheses).  For binary discrimination the exact likelihood-ratio
    argument gives prefactor 1/2; requesting it for num_states != 2 is an
    error rather than a silent fallback.
    """
    if beta < 0.0:
        raise ValueError(f"beta must be nonnegative, got {beta!r}")
    if num_states < 2:
        raise ValueError(f"need at least two hypotheses, got {num_states!r}")
    if binary_prefactor and num_states != 2:
        raise ValueError("the 1/2 prefactor is only valid for two hypotheses")
    prefactor = 0.5 if binary_prefactor else float(num_states - 1)
    return min(1.0, prefactor * math.exp(-n_s * beta))


def fixed_displacement_exponent(
    v: complex, constellation: PskConstellation, ratios: OperatingRatios
) -> float:
    """Exponent of the constant-displacement policy Q = delta_v."""
    if abs(v) > ratios.r_ca + 1e-12:
        raise ValueError(f"|v| = {abs(v)!r} exceeds the disk radius")
    if abs(v) ** 2 > ratios.r_ce + 1e-9:
        raise ValueError(f"|v|**2 = {abs(v)**2!r} exceeds the energy budget")
    return exponent_of(
        ControlDistribution.point_mass(v), constellation, ratios
    )


def sweep_curve(
    label: str, xs: Sequence[float], p_es: Sequence[float]
) -> BaselineCurve:
    return BaselineCurve(label=label, points=tuple(zip(xs, p_es)))
