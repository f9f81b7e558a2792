"""Tests for the control-distribution exponent optimizers and claim checks."""

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pskexp.constellation import OperatingRatios, bpsk, uniform_psk
from pskexp.divergence import RatePair, chernoff_s
from pskexp.exponent import (
    ControlDistribution,
    ExponentSolution,
    PairValue,
    convexity_margin,
    exponent_of,
    optimize_binary,
    optimize_general,
    pair_exponent,
    verify_claims,
)

BPSK = bpsk()
RATIOS_LOW = OperatingRatios(r_sn=0.01, r_ca=1.0, r_ce=0.9)
RATIOS_HIGH = OperatingRatios(r_sn=1e-6, r_ca=1.0, r_ce=0.9)

# Frozen oracle values, mpmath at 50 decimal digits.
FULL_POINT_VALUE = 2.14595769827296744  # point mass at v = 1, r_sn = 0.01
FULL_POINT_S_STAR = 0.299176001648163175
TIME_SHARING_09_VALUE = 1.9313619284456707  # 0.9 * FULL_POINT_VALUE
COUNTEREXAMPLE_VALUE = 1.98240722246624747  # point mass at v = sqrt(0.9)
COUNTEREXAMPLE_POINT = 0.9486832980505138  # sqrt(0.9)
HIGH_SNR_FULL_VALUE = 3.02079770393544019  # point mass at v = 1, r_sn = 1e-6


def bpsk_rates(v: float, r: float) -> RatePair:
    """Normalized BPSK rate pair at real displacement v and dark ratio r."""
    return RatePair((1.0 - v) ** 2 + r, (1.0 + v) ** 2 + r)


class TestControlDistribution:
    """Validate the finitely supported distribution container."""

    def test_rejects_empty(self):
        """At least one atom is required."""
        with pytest.raises(ValueError, match="at least one atom"):
            ControlDistribution(atoms=())

    def test_rejects_nonpositive_weights(self):
        """Weights must be strictly positive."""
        with pytest.raises(ValueError, match="positive"):
            ControlDistribution(atoms=((0.0 + 0.0j, 0.0), (1.0 + 0.0j, 1.0)))

    def test_rejects_unnormalized_weights(self):
        """Weights must sum to one."""
        with pytest.raises(ValueError, match="sum"):
            ControlDistribution(atoms=((0.0 + 0.0j, 0.6), (1.0 + 0.0j, 0.6)))

    def test_from_arrays_merges_and_renormalizes(self):
        """Duplicate points merge; weights renormalize; dust is dropped."""
        q = ControlDistribution.from_arrays(
            points=[0.5, 0.5, 0.0, 1.0],
            weights=[0.2, 0.2, 0.4, 1e-15],
        )
        assert len(q.atoms) == 2
        np.testing.assert_allclose(q.points, [0.0, 0.5])
        np.testing.assert_allclose(q.weights, [0.5, 0.5], rtol=1e-14)

    def test_from_arrays_rejects_all_dust(self):
        """An entirely sub-threshold weight vector is an error."""
        with pytest.raises(ValueError, match="vanished"):
            ControlDistribution.from_arrays(points=[0.5], weights=[1e-15])

    def test_from_arrays_deterministic_order(self):
        """Atoms come out sorted by (real, imaginary) part."""
        q = ControlDistribution.from_arrays(
            points=[1.0, -0.5 + 0.2j, -0.5 - 0.2j], weights=[0.4, 0.3, 0.3]
        )
        np.testing.assert_allclose(q.points, [-0.5 - 0.2j, -0.5 + 0.2j, 1.0])

    def test_point_mass_and_second_moment(self):
        """Point mass has unit weight and the squared modulus as energy."""
        q = ControlDistribution.point_mass(0.3 + 0.4j)
        assert q.atoms == ((0.3 + 0.4j, 1.0),)
        assert q.second_moment() == pytest.approx(0.25, rel=1e-14)

    def test_time_sharing_atoms(self):
        """Time sharing mixes the origin and the nulling point 1."""
        q = ControlDistribution.time_sharing(0.9)
        assert q.atoms == ((0.0 + 0.0j, pytest.approx(0.1)), (1.0 + 0.0j, pytest.approx(0.9)))
        assert q.second_moment() == pytest.approx(0.9, rel=1e-14)

    def test_time_sharing_degenerate_budgets(self):
        """Budgets 0 and 1 collapse to point masses; outside [0, 1] raises."""
        assert ControlDistribution.time_sharing(0.0) == ControlDistribution.point_mass(0.0)
        assert ControlDistribution.time_sharing(1.0) == ControlDistribution.point_mass(1.0)
        with pytest.raises(ValueError):
            ControlDistribution.time_sharing(1.1)

    def test_validate_feasible(self):
        """Disk and energy violations raise; compliant distributions pass."""
        ControlDistribution.time_sharing(0.9).validate_feasible(RATIOS_LOW)
        with pytest.raises(ValueError, match="disk"):
            ControlDistribution.point_mass(1.2).validate_feasible(RATIOS_LOW)
        with pytest.raises(ValueError, match="budget"):
            ControlDistribution.point_mass(1.0).validate_feasible(RATIOS_LOW)

    def test_total_variation_basic(self):
        """TV is 0 on identical, 1 on disjoint, additive on shared support."""
        ts = ControlDistribution.time_sharing(0.5)
        assert ts.total_variation(ts) == pytest.approx(0.0, abs=1e-15)
        a = ControlDistribution.point_mass(0.0)
        b = ControlDistribution.point_mass(1.0)
        assert a.total_variation(b) == pytest.approx(1.0, abs=1e-15)
        assert ts.total_variation(a) == pytest.approx(0.5, abs=1e-15)

    def test_total_variation_is_symmetric(self):
        """TV(P, Q) = TV(Q, P)."""
        p = ControlDistribution.from_arrays([0.0, 0.7], [0.3, 0.7])
        q = ControlDistribution.from_arrays([0.0, 1.0], [0.6, 0.4])
        assert p.total_variation(q) == pytest.approx(q.total_variation(p), abs=1e-15)

    def test_total_variation_match_tolerance(self):
        """Atoms within match_tol count as one location; beyond it, disjoint."""
        a = ControlDistribution.point_mass(1.0)
        b = ControlDistribution.point_mass(1.0 - 3e-5)
        assert a.total_variation(b) == pytest.approx(0.0, abs=1e-15)
        assert a.total_variation(b, match_tol=1e-9) == pytest.approx(1.0, abs=1e-15)
        c = ControlDistribution.point_mass(0.949)
        assert a.total_variation(c) == pytest.approx(1.0, abs=1e-15)


class TestExponentSolution:
    """Validate the optimizer result container."""

    def test_enforces_beta_consistency(self):
        """beta must equal the minimum per-pair value."""
        q = ControlDistribution.point_mass(0.5)
        with pytest.raises(ValueError, match="minimum"):
            ExponentSolution(
                beta=1.0,
                q_star=q,
                per_pair=(((0, 1), 0.3, 2.0),),
                method="test",
                certified=True,
            )

    def test_enforces_nonnegative_beta(self):
        """Negative exponents are rejected."""
        q = ControlDistribution.point_mass(0.5)
        with pytest.raises(ValueError, match="nonnegative"):
            ExponentSolution(
                beta=-1.0,
                q_star=q,
                per_pair=(((0, 1), 0.3, -1.0),),
                method="test",
                certified=True,
            )


class TestPairExponent:
    """Validate the per-pair mixture exponent."""

    def test_origin_point_mass_is_degenerate(self):
        """At v = 0 both hypotheses see the same rate; convention (1/2, 0)."""
        got = pair_exponent(
            ControlDistribution.point_mass(0.0), (0, 1), BPSK, RATIOS_LOW
        )
        assert got == PairValue(s_star=0.5, value=0.0)

    def test_full_displacement_point_mass(self):
        """Frozen optimum of the rate pair (0.01, 4.01)."""
        ratios = OperatingRatios(r_sn=0.01, r_ca=1.0, r_ce=1.0)
        got = pair_exponent(ControlDistribution.point_mass(1.0), (0, 1), BPSK, ratios)
        assert got.value == pytest.approx(FULL_POINT_VALUE, abs=1e-9)
        assert got.s_star == pytest.approx(FULL_POINT_S_STAR, abs=1e-6)

    def test_time_sharing_mixture_value(self):
        """Mixing with the origin scales the objective by the mass at 1."""
        got = pair_exponent(
            ControlDistribution.time_sharing(0.9), (0, 1), BPSK, RATIOS_LOW
        )
        assert got.value == pytest.approx(TIME_SHARING_09_VALUE, abs=1e-9)
        # The origin atom contributes zero at every s, so the maximizing
        # tilt coincides with the full-displacement one.
        assert got.s_star == pytest.approx(FULL_POINT_S_STAR, abs=1e-6)

    def test_mixture_value_is_weighted_chernoff(self):
        """At fixed s the mixture objective is the weighted sum of C_s."""
        q = ControlDistribution.from_arrays([0.2, 0.8], [0.5, 0.5])
        got = pair_exponent(q, (0, 1), BPSK, RATIOS_LOW)
        direct = 0.5 * chernoff_s(bpsk_rates(0.2, 0.01), got.s_star) + 0.5 * chernoff_s(
            bpsk_rates(0.8, 0.01), got.s_star
        )
        assert got.value == pytest.approx(direct, rel=1e-12)

    def test_infeasible_distribution_rejected(self):
        """The distribution must satisfy the operating constraints."""
        with pytest.raises(ValueError):
            pair_exponent(ControlDistribution.point_mass(1.0), (0, 1), BPSK, RATIOS_LOW)


class TestExponentOf:
    """Validate the worst-pair exponent."""

    def test_binary_reduces_to_single_pair(self):
        """With two hypotheses the minimum is the only pair's value."""
        q = ControlDistribution.time_sharing(0.9)
        got = exponent_of(q, BPSK, RATIOS_LOW)
        assert got == pytest.approx(TIME_SHARING_09_VALUE, abs=1e-9)

    def test_origin_gives_zero_for_any_constellation(self):
        """The passive policy cannot separate equal-amplitude hypotheses."""
        q = ControlDistribution.point_mass(0.0)
        assert exponent_of(q, uniform_psk(4), RATIOS_LOW) == pytest.approx(0.0, abs=1e-12)

    def test_rotation_invariance(self):
        """Rotating Q by the constellation symmetry angle permutes pairs only."""
        con = uniform_psk(4)
        ratios = OperatingRatios(r_sn=0.01, r_ca=1.0, r_ce=0.5)
        q = ControlDistribution.from_arrays([0.3 + 0.1j, 0.2j], [0.5, 0.5])
        rot = complex(np.exp(1j * math.pi / 2.0))
        q_rot = ControlDistribution.from_arrays([rot * p for p in q.points], q.weights)
        got = exponent_of(q, con, ratios)
        got_rot = exponent_of(q_rot, con, ratios)
        assert got_rot == pytest.approx(got, rel=1e-12, abs=1e-12)


class TestOptimizeBinary:
    """Validate the near-exact BPSK optimizer."""

    def test_low_snr_beats_time_sharing(self):
        """At r_sn = 0.01 an interior point mass beats time-sharing."""
        sol = optimize_binary(RATIOS_LOW)
        assert sol.beta >= COUNTEREXAMPLE_VALUE - 1e-3
        assert sol.beta > TIME_SHARING_09_VALUE + 0.04
        assert sol.certified
        # The optimum concentrates essentially at the budget-saturating
        # single point sqrt(0.9).
        near = ControlDistribution.point_mass(COUNTEREXAMPLE_POINT)
        assert sol.q_star.total_variation(near, match_tol=1e-2) <= 1e-6

    def test_high_snr_recovers_time_sharing(self):
        """At r_sn = 1e-6 the optimum is time-sharing, up to polish jitter."""
        ratios = OperatingRatios(r_sn=1e-6, r_ca=1.0, r_ce=0.5)
        sol = optimize_binary(ratios)
        ts = ControlDistribution.time_sharing(0.5)
        assert sol.q_star.total_variation(ts) <= 1e-2
        assert sol.beta >= exponent_of(ts, BPSK, ratios) - 1e-12

    def test_zero_budget(self):
        """r_ce = 0 forces the passive policy and a zero exponent."""
        sol = optimize_binary(OperatingRatios(r_sn=0.01, r_ca=1.0, r_ce=0.0))
        assert sol.beta == 0.0
        assert sol.q_star == ControlDistribution.point_mass(0.0)

    def test_solution_is_feasible_and_consistent(self):
        """q_star satisfies the constraints and attains the reported beta."""
        sol = optimize_binary(RATIOS_LOW)
        sol.q_star.validate_feasible(RATIOS_LOW)
        assert exponent_of(sol.q_star, BPSK, RATIOS_LOW) == pytest.approx(
            sol.beta, abs=1e-9
        )
        ((pair, s_star, value),) = sol.per_pair
        assert pair == (0, 1)
        assert 0.0 < s_star <= 0.5
        assert value == pytest.approx(sol.beta, abs=1e-12)

    def test_dominates_handcrafted_candidates(self):
        """No handcrafted feasible distribution beats the optimizer."""
        sol = optimize_binary(RATIOS_LOW)
        candidates = [
            ControlDistribution.time_sharing(0.9),
            ControlDistribution.point_mass(COUNTEREXAMPLE_POINT),
            ControlDistribution.point_mass(0.5),
            ControlDistribution.from_arrays([0.3, 1.0], [0.4, 0.6]),
            ControlDistribution.from_arrays([0.0, 0.6, 0.9], [0.2, 0.5, 0.3]),
        ]
        for q in candidates:
            q.validate_feasible(RATIOS_LOW)
            assert exponent_of(q, BPSK, RATIOS_LOW) <= sol.beta + 1e-9

    def test_value_bounded_by_rate_bound(self):
        """beta can never exceed the uniform rate upper bound."""
        sol = optimize_binary(RATIOS_LOW)
        assert sol.beta <= RATIOS_LOW.rate_upper_bound()

    @pytest.mark.slow
    def test_monotone_in_budgets(self):
        """beta is nondecreasing in r_ce and in r_ca."""
        r_cas = np.linspace(0.4, 1.3, 10)
        r_ces = np.linspace(0.05, 1.0, 10)
        values = np.zeros((len(r_cas), len(r_ces)))
        for i, ca in enumerate(r_cas):
            for j, ce in enumerate(r_ces):
                ratios = OperatingRatios(
                    r_sn=0.01, r_ca=float(ca), r_ce=float(min(ce, ca * ca))
                )
                values[i, j] = optimize_binary(ratios, resolution=4e-3).beta
        assert np.all(np.diff(values, axis=1) >= -1e-9)
        assert np.all(np.diff(values, axis=0) >= -1e-9)

    def test_full_budget_high_snr_value(self):
        """Unconstrained high-SNR optimum is the full nulling point mass."""
        ratios = OperatingRatios(r_sn=1e-6, r_ca=1.0, r_ce=1.0)
        sol = optimize_binary(ratios)
        assert sol.beta == pytest.approx(HIGH_SNR_FULL_VALUE, abs=1e-8)


class TestOptimizeGeneral:
    """Validate the grid coordinate-ascent optimizer."""

    def test_matches_binary_solver_on_bpsk(self):
        """On BPSK the general path lands within grid error of the exact one."""
        exact = optimize_binary(RATIOS_LOW)
        general = optimize_general(BPSK, RATIOS_LOW, grid_k=40)
        assert general.beta <= exact.beta + 1e-9
        assert general.beta == pytest.approx(exact.beta, abs=1e-3)
        assert general.certified

    def test_beats_uniform_feasible_start(self):
        """Coordinate ascent never ends below a trivial feasible mixture."""
        con = uniform_psk(4)
        ratios = OperatingRatios(r_sn=0.01, r_ca=1.0, r_ce=0.5)
        sol = optimize_general(con, ratios, grid_k=10)
        baseline = exponent_of(
            ControlDistribution.point_mass(complex(math.sqrt(0.5))), con, ratios
        )
        assert sol.beta >= baseline - 1e-9
        sol.q_star.validate_feasible(ratios)
        assert exponent_of(sol.q_star, con, ratios) == pytest.approx(sol.beta, abs=1e-9)

    def test_zero_budget_quaternary(self):
        """r_ce = 0 pins the policy at the origin with zero exponent."""
        ratios = OperatingRatios(r_sn=0.01, r_ca=1.0, r_ce=0.0)
        sol = optimize_general(uniform_psk(4), ratios, grid_k=8)
        assert sol.beta == pytest.approx(0.0, abs=1e-12)

    def test_reports_convergence_diagnostics(self):
        """Iteration count and convergence flag are exposed."""
        sol = optimize_general(BPSK, RATIOS_LOW, grid_k=10)
        assert sol.diagnostics["iterations"] >= 1
        assert isinstance(sol.diagnostics["converged"], bool)


class TestConvexityMargin:
    """Validate the energy-convexity margin."""

    def test_domain_validation(self):
        """s in (0, 1/2], r >= 0, v in (0, 1) are enforced."""
        with pytest.raises(ValueError, match="s"):
            convexity_margin(0.0, 0.0, 0.5)
        with pytest.raises(ValueError, match="s"):
            convexity_margin(0.6, 0.0, 0.5)
        with pytest.raises(ValueError, match="r"):
            convexity_margin(0.3, -1e-9, 0.5)
        with pytest.raises(ValueError, match="v"):
            convexity_margin(0.3, 0.0, 1.0)

    def test_symmetric_tilt_zero_dark_value(self):
        """g_{1/2,0}(1/2) = (1 - 1/2) * 2 * (1/2) = 1/2 exactly."""
        assert convexity_margin(0.5, 0.0, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_vanishing_at_small_displacement(self):
        """The margin vanishes as v -> 0 at any dark ratio."""
        assert convexity_margin(0.3, 0.0, 1e-9) == pytest.approx(0.0, abs=1e-7)
        assert convexity_margin(0.3, 0.01, 1e-9) == pytest.approx(0.0, abs=1e-7)

    def test_positive_at_zero_dark(self):
        """Zero-dark margin is strictly positive on the whole (s, v) grid."""
        for s in np.arange(0.05, 0.501, 0.05):
            for v in np.arange(0.05, 0.951, 0.05):
                assert convexity_margin(float(s), 0.0, float(v)) > 0.0

    def test_sign_matches_energy_curvature_off_boundary(self):
        """For s < 1/2 the margin sign equals the FD sign of d^2 C_s/dE^2."""
        r = 1e-4
        h = 1e-4
        for s in np.arange(0.05, 0.46, 0.05):
            for v in np.arange(0.1, 0.91, 0.1):
                energy = float(v) ** 2

                def c_of_e(e: float) -> float:
                    w = math.sqrt(e)
                    return chernoff_s(bpsk_rates(w, r), float(s))

                second = c_of_e(energy + h) - 2.0 * c_of_e(energy) + c_of_e(energy - h)
                margin = convexity_margin(float(s), r, float(v))
                assert margin * second > 0.0

    def test_negative_where_interior_mass_wins(self):
        """At the low-SNR optimum the divergence is concave in energy."""
        margin = convexity_margin(0.31, 0.01, COUNTEREXAMPLE_POINT)
        assert margin < 0.0


@pytest.fixture(scope="module")
def report():
    """Run the full default check battery once for the module."""
    return verify_claims(
        ratios_high=OperatingRatios(r_sn=1e-6, r_ca=1.0, r_ce=0.9),
        ratios_low=OperatingRatios(r_sn=1e-2, r_ca=1.0, r_ce=0.9),
    )


class TestVerifyClaims:
    """Validate the bundled structural claim checks."""

    def test_all_checks_pass(self, report):
        """Every structural check passes at the default operating points."""
        failed = [c.name for c in report.checks if not c.passed]
        assert report.all_passed, f"failed checks: {failed}"
        assert {c.name for c in report.checks} == {
            "energy-convexity-margin-positive",
            "optimal-tilt-in-left-half",
            "interior-mass-beats-time-sharing",
            "vanishing-dark-time-sharing",
        }

    def test_report_is_json_serializable(self, report):
        """to_dict produces a plain-JSON structure."""
        text = json.dumps(report.to_dict(), sort_keys=True)
        assert "energy-convexity-margin-positive" in text

    def test_notes_flag_inconsistent_quoted_value(self, report):
        """The notes document the 2.1460-vs-2.1359 bookkeeping discrepancy."""
        joined = " ".join(report.notes)
        assert "2.1460" in joined
        assert "2.1359" in joined

    def test_perturbed_expectation_fails(self):
        """An impossible expected counterexample value flips check 3 only."""
        report = verify_claims(
            ratios_high=OperatingRatios(r_sn=1e-6, r_ca=1.0, r_ce=0.9),
            ratios_low=OperatingRatios(r_sn=1e-2, r_ca=1.0, r_ce=0.9),
            expected_counterexample=2.5,
        )
        by_name = {c.name: c.passed for c in report.checks}
        assert not report.all_passed
        assert not by_name["interior-mass-beats-time-sharing"]
        assert by_name["energy-convexity-margin-positive"]
        assert by_name["vanishing-dark-time-sharing"]


class TestFeasibilityProperties:
    """Property tests tying distributions to the optimizer's feasible set."""

    @given(
        v1=st.floats(min_value=0.0, max_value=0.6),
        v2=st.floats(min_value=0.61, max_value=1.0),
        w=st.floats(min_value=0.01, max_value=0.99),
    )
    def test_two_atom_energy_interpolates(self, v1: float, v2: float, w: float):
        """Second moment of a two-atom mixture interpolates the energies."""
        q = ControlDistribution.from_arrays([v1, v2], [1.0 - w, w])
        want = (1.0 - w) * v1**2 + w * v2**2
        assert q.second_moment() == pytest.approx(want, rel=1e-12, abs=1e-12)

    @given(
        v=st.floats(min_value=0.05, max_value=0.94),
        s=st.floats(min_value=0.05, max_value=0.95),
    )
    def test_pair_value_dominates_fixed_tilt(self, v: float, s: float):
        """The maximized pair value is >= the objective at any fixed tilt."""
        # v stays below sqrt(0.9) so the point mass respects the budget.
        q = ControlDistribution.point_mass(v)
        got = pair_exponent(q, (0, 1), BPSK, RATIOS_LOW)
        assert got.value >= chernoff_s(bpsk_rates(v, 0.01), s) - 1e-10
