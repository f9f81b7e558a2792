"""Optimization of the open-loop error exponent over control distributions.

The achievable exponent of an open-loop displacement policy with type
(empirical distribution) Q is

    beta(Q) = min over hypothesis pairs (l, m) of
              max_{s in [0,1]}  E_{V~Q}[ C_s(Lambda_l(V), Lambda_m(V)) ],

and the best open-loop exponent is the supremum of beta(Q) over all
distributions Q supported on the control disk of radius ``r_ca`` with second
moment at most ``r_ce``.  This module optimizes that objective:

* ``optimize_binary`` solves the BPSK case essentially exactly.  By the
  phase symmetry of the binary constellation the support can be restricted
  to real displacements in [0, r_ca].  For each fixed tilt ``s`` the
  objective is linear in Q under a single moment constraint, so an optimal Q
  has at most two atoms; that inner problem is the upper concave envelope of
  the curve ``v**2 -> C_s(rates(v))`` evaluated at the energy budget, which
  is computed exactly on a grid and then polished continuously.

* ``optimize_general`` handles any PSK constellation by coordinate ascent on
  a discretized control grid, alternating per-pair tilt maximization with a
  linear program over the distribution.  Every iterate is feasible, so the
  result is always a certified achievability lower bound, but for more than
  two hypotheses no global optimality is claimed.

* ``convexity_margin`` and ``verify_claims`` check the structural facts
  behind the optimizer: convexity of the pairwise divergence in the control
  energy in the vanishing-dark-count regime (which makes time-sharing
  between 0 and the nulling displacement optimal), the (0, 1/2] range of the
  optimal tilt, and the failure of time-sharing at finite dark counts where
  an interior point mass is strictly better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from .constellation import (
    DISK_TOL,
    InfeasibleRatiosError,
    OperatingRatios,
    PskConstellation,
    bpsk,
    control_grid,
    normalized_rates,
)
from .divergence import (
    EQUAL_RATE_RTOL,
    chernoff_values,
    golden_section_max,
)

#: Moment-constraint slack allowed on a ControlDistribution.
ENERGY_TOL = 1e-9

#: Two candidate distributions within this beta gap are considered tied and
#: resolved toward the smaller second moment.
TIE_TOL = 1e-10


class PairValue(NamedTuple):
    """Maximizing tilt and value of one hypothesis pair's mixture exponent."""

    s_star: float
    value: float


@dataclass(frozen=True)
class ControlDistribution:
    """Finitely supported distribution of displacement ratios.

    Atoms are (point, weight) pairs with positive weights summing to one.
    Feasibility against a specific operating point (disk radius, energy
    budget) is checked by ``validate_feasible``.
    """

    atoms: tuple[tuple[complex, float], ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("a distribution needs at least one atom")
        total = 0.0
        for point, weight in self.atoms:
            if not weight > 0.0:
                raise ValueError(f"atom weights must be positive, got {weight!r}")
            total += weight
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"atom weights sum to {total!r}, expected 1")

    @classmethod
    def from_arrays(
        cls,
        points: Sequence[complex],
        weights: Sequence[float],
        drop_tol: float = 1e-12,
    ) -> "ControlDistribution":
        """Build from parallel arrays, merging duplicates and renormalizing.

        Weights at or below ``drop_tol`` are discarded (LP solutions carry
        that much dust); the remainder is renormalized to sum exactly to 1.
        """
        merged: dict[complex, float] = {}
        for point, weight in zip(points, weights):
            if weight > drop_tol:
                key = complex(point)
                merged[key] = merged.get(key, 0.0) + float(weight)
        if not merged:
            raise ValueError("all weights vanished; distribution is empty")
        total = sum(merged.values())
        ordered = sorted(merged.items(), key=lambda kv: (kv[0].real, kv[0].imag))
        return cls(atoms=tuple((p, w / total) for p, w in ordered))

    @classmethod
    def point_mass(cls, v: complex) -> "ControlDistribution":
        return cls(atoms=((complex(v), 1.0),))

    @classmethod
    def time_sharing(cls, r_ce: float) -> "ControlDistribution":
        """Budget-saturating mixture of the nulling point 1 and the origin."""
        if not 0.0 <= r_ce <= 1.0:
            raise ValueError(f"r_ce must lie in [0, 1], got {r_ce!r}")
        if r_ce == 0.0:
            return cls.point_mass(0.0)
        if r_ce == 1.0:
            return cls.point_mass(1.0)
        return cls(atoms=((0.0 + 0.0j, 1.0 - r_ce), (1.0 + 0.0j, r_ce)))

    @property
    def points(self) -> np.ndarray:
        return np.array([p for p, _ in self.atoms], dtype=complex)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    def second_moment(self) -> float:
        return float(np.dot(self.weights, np.abs(self.points) ** 2))

    def validate_feasible(self, ratios: OperatingRatios) -> None:
        """Raise unless every atom is in the disk and the energy budget holds."""
        if np.any(np.abs(self.points) > ratios.r_ca + DISK_TOL):
            raise ValueError("an atom lies outside the control disk")
        if self.second_moment() > ratios.r_ce + ENERGY_TOL:
            raise ValueError(
                f"second moment {self.second_moment()!r} exceeds budget {ratios.r_ce!r}"
            )

    def total_variation(
        self, other: "ControlDistribution", match_tol: float = 1e-4
    ) -> float:
        """Total variation distance, identifying atoms within ``match_tol``.

        Exact TV between finitely supported measures is discontinuous in
        atom locations (nearby but distinct atoms count as disjoint), which
        makes it useless for comparing numerically optimized supports.
        Atoms closer than ``match_tol`` (on the unit-normalized control
        scale) are therefore treated as one location.  The default absorbs
        float- and polish-level jitter while still separating genuinely
        distinct support points such as 0.949 vs 1.0.
        """
        entries = [(p, w, 0.0) for p, w in self.atoms]
        entries += [(p, 0.0, w) for p, w in other.atoms]
        entries.sort(key=lambda e: (e[0].real, e[0].imag))
        tv = 0.0
        group_self = group_other = 0.0
        anchor = entries[0][0]
        for point, w_self, w_other in entries:
            if abs(point - anchor) > match_tol:
                tv += abs(group_self - group_other)
                group_self = group_other = 0.0
                anchor = point
            group_self += w_self
            group_other += w_other
        tv += abs(group_self - group_other)
        return 0.5 * tv


@dataclass(frozen=True)
class ExponentSolution:
    """Result of an exponent optimization.

    ``beta`` always equals the minimum of the per-pair values and is a
    certified achievability lower bound whenever ``certified`` is set (the
    reported ``q_star`` is feasible and attains it).
    """

    beta: float
    q_star: ControlDistribution
    per_pair: tuple[tuple[tuple[int, int], float, float], ...]
    method: str
    certified: bool
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        values = [value for _, _, value in self.per_pair]
        if abs(self.beta - min(values)) > 1e-10:
            raise ValueError("beta must equal the minimum per-pair value")
        if self.beta < 0.0:
            raise ValueError("beta must be nonnegative")


def _pair_rate_arrays(
    q: ControlDistribution,
    pair: tuple[int, int],
    constellation: PskConstellation,
    ratios: OperatingRatios,
) -> tuple[np.ndarray, np.ndarray]:
    l, m = pair
    points = q.points
    return (
        normalized_rates(points, l, constellation, ratios),
        normalized_rates(points, m, constellation, ratios),
    )


def pair_exponent(
    q: ControlDistribution,
    pair: tuple[int, int],
    constellation: PskConstellation,
    ratios: OperatingRatios,
) -> PairValue:
    """Maximize s -> E_Q[C_s(Lambda_l(V), Lambda_m(V))] over s in [0, 1].

    The mixture is a weighted sum of functions strictly concave in ``s``
    (strictly, unless every atom produces identical rates under both
    hypotheses), so golden-section search is globally valid.  The degenerate
    all-equal-rates case returns (1/2, 0) by convention.
    """
    q.validate_feasible(ratios)
    rates_l, rates_m = _pair_rate_arrays(q, pair, constellation, ratios)
    scale = np.maximum(rates_l, rates_m)
    if np.all(np.abs(rates_l - rates_m) <= EQUAL_RATE_RTOL * scale):
        return PairValue(s_star=0.5, value=0.0)
    weights = q.weights

    def objective(s: float) -> float:
        return float(np.dot(weights, chernoff_values(rates_l, rates_m, s)))

    s_star, value = golden_section_max(objective, 0.0, 1.0)
    return PairValue(s_star=s_star, value=max(value, 0.0))


def exponent_of(
    q: ControlDistribution,
    constellation: PskConstellation,
    ratios: OperatingRatios,
) -> float:
    """Worst hypothesis pair's exponent: min over pairs of pair_exponent."""
    return min(
        pair_exponent(q, pair, constellation, ratios).value
        for pair in constellation.pairs()
    )


def _upper_hull_value(
    energies: np.ndarray, values: np.ndarray, budget: float
) -> tuple[float, list[tuple[int, float]]]:
    """Maximum of E_Q[values] over distributions on the grid with
    E_Q[energies] <= budget.

    ``energies`` must be strictly increasing.  The optimum lies on the upper
    concave envelope of the point set, evaluated at the budget (or at the
    envelope's peak when the budget is not binding).  Returns the value and
    the supporting atoms as (grid index, weight) pairs.
    """
    # Monotone-chain upper hull; hull[k] are indices into the grid.
    hull: list[int] = []
    for i in range(len(energies)):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (energies[a] - energies[o]) * (values[i] - values[o]) - (
                values[a] - values[o]
            ) * (energies[i] - energies[o])
            if cross >= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    hull_e = energies[hull]
    hull_v = values[hull]
    peak = int(np.argmax(hull_v))
    target = min(budget, float(hull_e[peak]))
    seg = int(np.searchsorted(hull_e, target, side="right")) - 1
    if seg >= len(hull) - 1 or hull_e[seg] == target:
        return float(hull_v[seg]), [(hull[seg], 1.0)]
    frac = (target - hull_e[seg]) / (hull_e[seg + 1] - hull_e[seg])
    value = float(hull_v[seg] + frac * (hull_v[seg + 1] - hull_v[seg]))
    return value, [(hull[seg], 1.0 - frac), (hull[seg + 1], float(frac))]


def _binary_candidate(
    points: Sequence[float], weights: Sequence[float]
) -> ControlDistribution:
    return ControlDistribution.from_arrays(
        [complex(p) for p in points], list(weights)
    )


def optimize_binary(
    ratios: OperatingRatios, resolution: float = 1e-3
) -> ExponentSolution:
    """Essentially exact BPSK exponent optimization.

    Searches real displacements v in [0, r_ca] (the binary phase symmetry
    makes this lossless).  Outer loop: grid over the tilt ``s`` with
    iterative refinement around the best value.  Inner problem at fixed
    ``s``: exact two-atom optimum from the upper concave envelope of
    ``v**2 -> C_s(rates(v))``.  The best grid candidate is then polished by
    continuous local refinement of (v1, v2, s), with the two-atom weight
    pinned to the active energy constraint throughout, and the final value
    re-maximized over ``s`` exactly.  Grid candidates are kept alongside
    their polished versions; a polished candidate must win by more than the
    tie tolerance to displace the exact grid solution.
    """
    constellation = bpsk()
    pair = (0, 1)
    r, ca, ce = ratios.r_sn, ratios.r_ca, ratios.r_ce

    def finish(q: ControlDistribution, diagnostics: dict) -> ExponentSolution:
        pv = pair_exponent(q, pair, constellation, ratios)
        return ExponentSolution(
            beta=pv.value,
            q_star=q,
            per_pair=((pair, pv.s_star, pv.value),),
            method="binary-exact-grid",
            certified=True,
            diagnostics=diagnostics,
        )

    if ce <= 0.0:
        return finish(ControlDistribution.point_mass(0.0), {"budget": "zero"})

    num_cells = max(2, int(round(ca / resolution)))
    vgrid = np.linspace(0.0, ca, num_cells + 1)
    rates0 = (vgrid - 1.0) ** 2 + r
    rates1 = (vgrid + 1.0) ** 2 + r
    energies = vgrid**2
    v_single_max = min(math.sqrt(ce), ca)

    def hull_at(s: float) -> tuple[float, list[tuple[int, float]]]:
        return _upper_hull_value(energies, chernoff_values(rates0, rates1, s), ce)

    # Outer tilt search: coarse grid, then shrinking windows around the best.
    s_grid = np.linspace(0.0, 1.0, 65)
    best_s = max(s_grid, key=lambda s: hull_at(s)[0])
    window = s_grid[1] - s_grid[0]
    while window > 1e-8:
        lo = max(0.0, best_s - window)
        hi = min(1.0, best_s + window)
        local = np.linspace(lo, hi, 17)
        best_s = max(local, key=lambda s: hull_at(s)[0])
        window = (hi - lo) / 8.0
    _, support = hull_at(best_s)

    def h_scalar(v: float, s: float) -> float:
        return float(
            chernoff_values(
                np.array([(v - 1.0) ** 2 + r]), np.array([(v + 1.0) ** 2 + r]), s
            )[0]
        )

    candidates: list[ControlDistribution] = []

    # Exact grid candidate from the hull support at the best tilt.
    grid_points = [float(vgrid[i]) for i, _ in support]
    grid_weights = [w for _, w in support]
    candidates.append(_binary_candidate(grid_points, grid_weights))

    sqrt_ce = math.sqrt(ce)
    if len(support) == 2 and sqrt_ce < ca - 1e-12:
        # Polish the two-atom candidate; the weight stays pinned to the
        # active energy constraint, so feasibility is structural.
        def two_point_objective(x: np.ndarray) -> float:
            v1, v2, s = x
            if v2 - v1 < 1e-14:
                return -h_scalar(v1, s)
            w2 = (ce - v1**2) / (v2**2 - v1**2)
            w2 = min(max(w2, 0.0), 1.0)
            return -((1.0 - w2) * h_scalar(v1, s) + w2 * h_scalar(v2, s))

        x0 = np.array(
            [min(grid_points[0], sqrt_ce), max(grid_points[1], sqrt_ce), best_s]
        )
        res = minimize(
            two_point_objective,
            x0,
            method="L-BFGS-B",
            bounds=[(0.0, sqrt_ce), (sqrt_ce, ca), (0.0, 1.0)],
        )
        v1, v2, _ = res.x
        if v2 - v1 > 1e-14:
            w2 = min(max((ce - v1**2) / (v2**2 - v1**2), 0.0), 1.0)
            if w2 <= 1e-12:
                candidates.append(_binary_candidate([v1], [1.0]))
            elif w2 >= 1.0 - 1e-12:
                candidates.append(_binary_candidate([v2], [1.0]))
            else:
                candidates.append(_binary_candidate([v1, v2], [1.0 - w2, w2]))

    # Single-atom candidate: best unconstrained-in-the-budget point.
    feasible = energies <= ce * (1.0 + 1e-15)
    h_best = chernoff_values(rates0[feasible], rates1[feasible], best_s)
    v_single = float(vgrid[feasible][int(np.argmax(h_best))])
    candidates.append(_binary_candidate([v_single], [1.0]))

    res = minimize(
        lambda x: -h_scalar(x[0], x[1]),
        np.array([v_single, best_s]),
        method="L-BFGS-B",
        bounds=[(0.0, v_single_max), (0.0, 1.0)],
    )
    candidates.append(_binary_candidate([float(res.x[0])], [1.0]))

    best_q = None
    best_beta = -math.inf
    for q in candidates:
        value = pair_exponent(q, pair, constellation, ratios).value
        if value > best_beta + TIE_TOL or (
            value > best_beta - TIE_TOL
            and best_q is not None
            and q.second_moment() < best_q.second_moment() - 1e-12
        ):
            best_q, best_beta = q, max(value, best_beta)
    assert best_q is not None
    return finish(
        best_q,
        {"tilt_grid_best": float(best_s), "candidates": len(candidates)},
    )


def optimize_general(
    constellation: PskConstellation,
    ratios: OperatingRatios,
    grid_k: int = 20,
    max_iterations: int = 50,
    improvement_tol: float = 1e-9,
) -> ExponentSolution:
    """Coordinate-ascent lower bound for any PSK constellation.

    Alternates (a) fixing each pair's tilt at its current maximizer with
    (b) a linear program maximizing the worst pair's fixed-tilt objective
    over distributions on the control grid under the energy constraint.
    Every iterate is feasible and the true objective is non-decreasing along
    the iteration, so the best iterate is a certified achievability bound.
    Not guaranteed globally optimal for more than two hypotheses.
    """
    grid = control_grid(grid_k, ratios)
    pairs = constellation.pairs()
    n = len(grid)
    grid_energy = np.abs(grid) ** 2
    rate_table = [
        normalized_rates(grid, m, constellation, ratios)
        for m in range(constellation.num_states)
    ]

    feasible = grid_energy <= ratios.r_ce + DISK_TOL
    q = ControlDistribution.from_arrays(
        grid[feasible], np.full(int(np.count_nonzero(feasible)), 1.0)
    )

    def evaluate(q: ControlDistribution) -> list[PairValue]:
        return [pair_exponent(q, pair, constellation, ratios) for pair in pairs]

    per_pair = evaluate(q)
    best_q, best_per_pair = q, per_pair
    best_beta = min(pv.value for pv in per_pair)
    beta_prev = best_beta
    converged = False
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        # LP over (Q, t): maximize t with E_Q[C_{s_pair}] >= t per pair.
        rows = []
        for (l, m), pv in zip(pairs, per_pair):
            coeffs = chernoff_values(rate_table[l], rate_table[m], pv.s_star)
            rows.append(np.concatenate([-coeffs, [1.0]]))
        rows.append(np.concatenate([grid_energy, [0.0]]))
        a_ub = np.vstack(rows)
        b_ub = np.concatenate([np.zeros(len(pairs)), [ratios.r_ce]])
        a_eq = np.concatenate([np.ones(n), [0.0]]).reshape(1, -1)
        cost = np.zeros(n + 1)
        cost[-1] = -1.0
        bounds = [(0.0, 1.0)] * n + [(0.0, ratios.rate_upper_bound())]
        lp = linprog(
            cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=bounds,
            method="highs",
        )
        if not lp.success:
            raise RuntimeError(f"control LP failed: {lp.message}")
        q = ControlDistribution.from_arrays(grid, np.maximum(lp.x[:n], 0.0))
        per_pair = evaluate(q)
        beta = min(pv.value for pv in per_pair)
        if beta > best_beta:
            best_q, best_beta, best_per_pair = q, beta, per_pair
        if beta - beta_prev < improvement_tol:
            converged = True
            break
        beta_prev = beta

    return ExponentSolution(
        beta=best_beta,
        q_star=best_q,
        per_pair=tuple(
            (pair, pv.s_star, pv.value) for pair, pv in zip(pairs, best_per_pair)
        ),
        method="general-coordinate-ascent",
        certified=True,
        diagnostics={"iterations": iterations, "converged": converged},
    )


def convexity_margin(s: float, r: float, v: float) -> float:
    """Margin whose sign certifies convexity of the pair divergence in energy.

    For BPSK with real displacement v and dark ratio r, let
    Lambda0 = (1-v)**2 + r and Lambda1 = (1+v)**2 + r and consider
    C_s as a function of the control energy E = E0*v**2.  The margin

        g_{s,r}(v) = 8s(1-s)v * (1 - r/Lambda0 * 4v**2/Lambda1)
                     - [(1-s)*Lambda0 + s*Lambda1 - Lambda0**(1-s)*Lambda1**s]

    tracks the sign of d^2 C_s / dE^2 for s strictly inside (0, 1/2); on the
    s = 1/2 boundary with r > 0 the margin can stay positive while the true
    curvature turns negative, so boundary conclusions must not rely on it.
    At r = 0 it reduces to the closed form
    4s(1-2s)v + (1-v)**(2(1-s)) * [(1+v)**(2s) - (1-v)**(2s)], which is
    strictly positive for s in (0, 1/2] and v in (0, 1): with vanishing dark
    counts the divergence is convex in the energy, making time-sharing
    between 0 and full displacement exponent-optimal.
    """
    if not 0.0 < s <= 0.5:
        raise ValueError(f"s must lie in (0, 1/2], got {s!r}")
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r!r}")
    if not 0.0 < v < 1.0:
        raise ValueError(f"v must lie in (0, 1), got {v!r}")
    if r == 0.0:
        return 4.0 * s * (1.0 - 2.0 * s) * v + (1.0 - v) ** (2.0 * (1.0 - s)) * (
            (1.0 + v) ** (2.0 * s) - (1.0 - v) ** (2.0 * s)
        )
    lam0 = (1.0 - v) ** 2 + r
    lam1 = (1.0 + v) ** 2 + r
    curvature_term = 8.0 * s * (1.0 - s) * v * (
        1.0 - (r / lam0) * (4.0 * v**2 / lam1)
    )
    divergence_term = (1.0 - s) * lam0 + s * lam1 - lam0 ** (1.0 - s) * lam1**s
    return curvature_term - divergence_term


@dataclass(frozen=True)
class ClaimCheck:
    """Outcome of one structural check, with numeric evidence."""

    name: str
    passed: bool
    details: dict

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "details": self.details}


@dataclass(frozen=True)
class ClaimReport:
    """Aggregate of the structural checks run by ``verify_claims``."""

    checks: tuple[ClaimCheck, ...]
    notes: tuple[str, ...]

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": [check.to_dict() for check in self.checks],
            "notes": list(self.notes),
        }


def verify_claims(
    ratios_high: OperatingRatios,
    ratios_low: OperatingRatios,
    expected_counterexample: float = 1.9822,
    expected_time_sharing: float = 1.9314,
    min_margin: float = 0.04,
) -> ClaimReport:
    """Run the structural checks behind the optimizer design.

    (1) the zero-dark convexity margin is positive on an (s, v) grid;
    (2) the optimal tilt always lies in (0, 1/2] — via the ratio closed form
        and via pair maximization for non-degenerate distributions;
    (3) at ``ratios_low`` the optimizer strictly beats time-sharing by at
        least ``min_margin`` and lands near ``expected_counterexample``;
    (4) at ``ratios_high`` (vanishing dark counts) the optimizer returns
        time-sharing for every budget on a 0.1-step grid.

    Failed checks are reported, never raised.
    """
    from .divergence import RatePair, max_chernoff, s_star_ratio

    checks: list[ClaimCheck] = []
    notes: list[str] = []

    # (1) zero-dark convexity margin positive on the standard grid.
    s_values = np.arange(0.05, 0.501, 0.05)
    v_values = np.arange(0.05, 0.951, 0.05)
    margins = np.array(
        [[convexity_margin(s, 0.0, v) for v in v_values] for s in s_values]
    )
    checks.append(
        ClaimCheck(
            name="energy-convexity-margin-positive",
            passed=bool(np.all(margins > 0.0)),
            details={
                "min_margin": float(margins.min()),
                "s_grid": [float(s) for s in s_values],
                "v_grid_span": [float(v_values[0]), float(v_values[-1])],
            },
        )
    )

    # (2) optimal tilt range (0, 1/2]; degenerate distributions excluded.
    ratio_grid = np.linspace(1e-6, 1.0 - 1e-6, 2001)
    tilt_values = np.array([s_star_ratio(x) for x in ratio_grid])
    constellation = bpsk()
    pair_tilts = []
    for v in np.linspace(0.05, 1.0, 20):
        q = ControlDistribution.point_mass(complex(min(v, math.sqrt(ratios_low.r_ce))))
        pair_tilts.append(
            pair_exponent(q, (0, 1), constellation, ratios_low).s_star
        )
    tilt_ok = (
        bool(np.all((tilt_values > 0.0) & (tilt_values < 0.5)))
        and bool(np.all(np.diff(tilt_values) > 0.0))
        and all(0.0 < s <= 0.5 for s in pair_tilts)
    )
    checks.append(
        ClaimCheck(
            name="optimal-tilt-in-left-half",
            passed=tilt_ok,
            details={
                "ratio_tilt_range": [float(tilt_values.min()), float(tilt_values.max())],
                "pair_tilt_range": [float(min(pair_tilts)), float(max(pair_tilts))],
            },
        )
    )

    # (3) finite-dark counterexample: interior mass beats time-sharing.
    solution = optimize_binary(ratios_low)
    ts = ControlDistribution.time_sharing(ratios_low.r_ce)
    ts_value = pair_exponent(ts, (0, 1), constellation, ratios_low).value
    margin = solution.beta - ts_value
    full_budget = RatePair(ratios_low.r_sn, (1.0 + 1.0) ** 2 + ratios_low.r_sn)
    kennedy = max_chernoff(full_budget)
    notes.append(
        "full-budget point exponent at r_sn="
        f"{ratios_low.r_sn:g} is {kennedy.value:.4f} by the stationarity "
        f"identity (the value 2.1359 sometimes quoted for r_sn=0.01 is "
        f"inconsistent: {ratios_low.r_ce:g} x {kennedy.value:.4f} = "
        f"{ratios_low.r_ce * kennedy.value:.4f} matches the time-sharing "
        "reference, 2.1359 does not)"
    )
    checks.append(
        ClaimCheck(
            name="interior-mass-beats-time-sharing",
            passed=(
                solution.beta >= expected_counterexample - 2e-3
                and abs(ts_value - expected_time_sharing) <= 2e-3
                and margin >= min_margin
            ),
            details={
                "beta": solution.beta,
                "time_sharing_value": ts_value,
                "margin": margin,
                "expected_counterexample": expected_counterexample,
                "expected_time_sharing": expected_time_sharing,
                "q_star": [
                    {"re": p.real, "im": p.imag, "weight": w}
                    for p, w in solution.q_star.atoms
                ],
            },
        )
    )

    # (4) vanishing dark counts: time-sharing is returned across budgets.
    worst_tv = 0.0
    for r_ce in np.arange(0.1, 1.001, 0.1):
        budget_ratios = OperatingRatios(
            r_sn=ratios_high.r_sn, r_ca=ratios_high.r_ca, r_ce=float(r_ce)
        )
        sol = optimize_binary(budget_ratios)
        tv = sol.q_star.total_variation(
            ControlDistribution.time_sharing(float(r_ce))
        )
        worst_tv = max(worst_tv, tv)
    checks.append(
        ClaimCheck(
            name="vanishing-dark-time-sharing",
            passed=worst_tv <= 1e-2,
            details={"worst_total_variation": worst_tv},
        )
    )

    return ClaimReport(checks=tuple(checks), notes=tuple(notes))
