"""Command-line interface: exponents, figure sweeps, simulation, verification.

Commands
--------
exponent      optimal open-loop exponent for the configured operating point
sweep-photon  CSV of error-probability curves versus mean photon number
sweep-energy  CSV of exponent and bound versus the energy budget
simulate      Monte Carlo validation of the exponent bound for one policy
verify        structural checks (convexity margin, tilt range, optimizer
              vs time-sharing) with a machine-readable report

Exit codes: 0 success, 1 malformed arguments, 2 infeasible constraints,
3 verification failure.  Outputs are deterministic for a fixed seed; files
are written atomically (temp file + rename).  CSV is UTF-8 with LF line
endings and full-precision scientific notation; JSON documents carry a
schema_version field and sorted keys.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from typing import Optional, Sequence

import numpy as np

from .baselines import (
    fixed_displacement_exponent,
    helstrom_binary,
    homodyne_binary,
    theorem_bound,
)
from .constellation import (
    InfeasibleRatiosError,
    OperatingRatios,
    PskConstellation,
    SignalScale,
    bpsk,
    uniform_psk,
)
from .exponent import (
    ControlDistribution,
    ExponentSolution,
    exponent_of,
    optimize_binary,
    optimize_general,
    verify_claims,
)
from .receiver import monte_carlo, realize_policy

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAILED = 3


class _Parser(argparse.ArgumentParser):
    """argparse flavor whose usage errors exit with code 1, not 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _add_ratio_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--r-sn", type=float, help="dark-count rate ratio (dark rate / alpha^2)"
    )
    group.add_argument(
        "--snr", type=float, help="signal-to-noise ratio (reciprocal of --r-sn)"
    )
    parser.add_argument(
        "--r-ca", type=float, default=1.0, help="control disk radius (default 1)"
    )
    parser.add_argument(
        "--r-ce",
        type=float,
        default=1.0,
        help="mean control energy budget (default 1)",
    )


def _add_constellation_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--psk", type=int, metavar="M", help="uniform M-ary PSK (default 2)"
    )
    group.add_argument(
        "--phases",
        type=str,
        metavar="a,b,...",
        help="explicit phases in radians, comma-separated",
    )


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=str, default=None, help="output file path")
    parser.add_argument(
        "--format", choices=("csv", "json"), default=None, help="output format"
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="pskexp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_exp = sub.add_parser(
        "exponent", help="optimal constrained open-loop exponent"
    )
    _add_ratio_flags(p_exp)
    _add_constellation_flags(p_exp)
    p_exp.add_argument(
        "--grid-k", type=int, default=20, help="control grid fineness (default 20)"
    )
    _add_output_flags(p_exp)

    p_photon = sub.add_parser(
        "sweep-photon", help="error curves vs mean photon number (binary)"
    )
    _add_ratio_flags(p_photon)
    _add_constellation_flags(p_photon)
    _add_output_flags(p_photon)

    p_energy = sub.add_parser(
        "sweep-energy", help="exponent and bound vs energy budget (binary)"
    )
    _add_ratio_flags(p_energy)
    _add_constellation_flags(p_energy)
    p_energy.add_argument(
        "--alpha-sq", type=float, default=2.0, help="mean photon number (default 2)"
    )
    _add_output_flags(p_energy)

    p_sim = sub.add_parser(
        "simulate", help="Monte Carlo validation of the exponent bound"
    )
    _add_ratio_flags(p_sim)
    _add_constellation_flags(p_sim)
    p_sim.add_argument(
        "--alpha-sq", type=float, default=2.0, help="mean photon number (default 2)"
    )
    p_sim.add_argument(
        "--grid-k", type=int, default=20, help="control grid fineness (default 20)"
    )
    p_sim.add_argument(
        "--slices", type=int, default=200, help="time slices N (default 200)"
    )
    p_sim.add_argument(
        "--trials",
        type=int,
        default=100_000,
        help="Monte Carlo trials per hypothesis (default 100000)",
    )
    p_sim.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p_sim.add_argument(
        "--force-zero",
        action="store_true",
        help="simulate the all-zero-displacement policy instead of the optimizer",
    )
    _add_output_flags(p_sim)

    p_ver = sub.add_parser("verify", help="run the structural checks")
    p_ver.add_argument(
        "--expected-counterexample",
        type=float,
        default=1.9822,
        help="expected optimizer value at the finite-dark reference point",
    )
    p_ver.add_argument(
        "--expected-time-sharing",
        type=float,
        default=1.9314,
        help="expected time-sharing value at the reference point",
    )
    p_ver.add_argument(
        "--min-margin",
        type=float,
        default=0.04,
        help="required optimizer-over-time-sharing margin",
    )
    _add_output_flags(p_ver)

    return parser


def _ratios(args: argparse.Namespace) -> OperatingRatios:
    if args.snr is not None:
        return OperatingRatios.from_snr(args.snr, r_ca=args.r_ca, r_ce=args.r_ce)
    return OperatingRatios(r_sn=args.r_sn, r_ca=args.r_ca, r_ce=args.r_ce)


def _constellation(args: argparse.Namespace) -> PskConstellation:
    if args.phases is not None:
        try:
            phases = tuple(float(p) for p in args.phases.split(","))
        except ValueError as exc:
            raise ValueError(f"bad --phases value: {exc}") from exc
        return PskConstellation(phases=phases)
    m = args.psk if args.psk is not None else 2
    if m == 2:
        return bpsk()
    return uniform_psk(m)


def _is_binary(constellation: PskConstellation) -> bool:
    return constellation.phases == bpsk().phases


def _optimize(
    constellation: PskConstellation, ratios: OperatingRatios, grid_k: int
) -> ExponentSolution:
    if _is_binary(constellation):
        return optimize_binary(ratios)
    return optimize_general(constellation, ratios, grid_k=grid_k)


def _atoms_doc(q: ControlDistribution) -> list:
    return [
        {"re": p.real, "im": p.imag, "weight": w} for p, w in q.atoms
    ]


def _q_summary(q: ControlDistribution) -> str:
    return ";".join(
        f"{p.real:.17e}|{p.imag:.17e}|{w:.17e}" for p, w in q.atoms
    )


def _write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".pskexp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_doc(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _csv_doc(header: str, rows: list) -> str:
    return "\n".join([header] + rows) + "\n"


def cmd_exponent(args: argparse.Namespace) -> int:
    ratios = _ratios(args)
    constellation = _constellation(args)
    start = time.perf_counter()
    solution = _optimize(constellation, ratios, args.grid_k)
    wall = time.perf_counter() - start
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "exponent",
        "parameters": {
            "r_sn": ratios.r_sn,
            "r_ca": ratios.r_ca,
            "r_ce": ratios.r_ce,
            "phases": list(constellation.phases),
            "grid_k": args.grid_k,
        },
        "beta": solution.beta,
        "q_star": _atoms_doc(solution.q_star),
        "per_pair": [
            {"pair": list(pair), "s_star": s_star, "value": value}
            for pair, s_star, value in solution.per_pair
        ],
        "method": solution.method,
        "certified": solution.certified,
        "wall_time_s": wall,
    }
    _write_text(args.out, _json_doc(payload))
    return EXIT_OK


def cmd_sweep_photon(args: argparse.Namespace) -> int:
    ratios = _ratios(args)
    constellation = _constellation(args)
    if not _is_binary(constellation):
        raise ValueError("sweep-photon supports the binary constellation only")
    beta = optimize_binary(ratios).beta
    grid = np.linspace(0.25, 4.0, 16)
    rows = [
        ",".join(
            f"{x:.17e}"
            for x in (
                a,
                theorem_bound(beta, a, 2, binary_prefactor=True),
                helstrom_binary(a),
                homodyne_binary(a),
            )
        )
        for a in grid
    ]
    text = _csv_doc("alpha_sq,bound_ours,helstrom,homodyne", rows)
    if (args.format or "csv") != "csv":
        raise ValueError("sweep-photon emits CSV only")
    _write_text(args.out, text)
    return EXIT_OK


def cmd_sweep_energy(args: argparse.Namespace) -> int:
    ratios = _ratios(args)
    constellation = _constellation(args)
    if not _is_binary(constellation):
        raise ValueError("sweep-energy supports the binary constellation only")
    if (args.format or "csv") != "csv":
        raise ValueError("sweep-energy emits CSV only")
    grid = [
        float(r_ce)
        for r_ce in np.linspace(0.0, 1.0, 21)
        if r_ce <= ratios.r_ca**2 + 1e-12
    ]
    rows = []
    for r_ce in grid:
        point = OperatingRatios(r_sn=ratios.r_sn, r_ca=ratios.r_ca, r_ce=r_ce)
        solution = optimize_binary(point)
        bound = theorem_bound(
            solution.beta, args.alpha_sq, 2, binary_prefactor=True
        )
        rows.append(
            f"{r_ce:.17e},{solution.beta:.17e},{bound:.17e},"
            + _q_summary(solution.q_star)
        )
    _write_text(args.out, _csv_doc("r_ce,beta,bound_ours,q_star_summary", rows))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.trials < 100:
        raise ValueError("at least 100 trials per hypothesis required")
    ratios = _ratios(args)
    constellation = _constellation(args)
    scale = SignalScale(
        alpha_sq=args.alpha_sq, slices=args.slices, grid_k=args.grid_k
    )
    if args.force_zero:
        q = ControlDistribution.point_mass(0.0)
    else:
        q = _optimize(constellation, ratios, args.grid_k).q_star
    policy = realize_policy(q, scale, constellation, ratios)
    realized_type = policy.type_distribution()
    beta_realized = exponent_of(realized_type, constellation, ratios)
    report = monte_carlo(policy, args.trials, args.seed)
    bound = theorem_bound(
        beta_realized,
        args.alpha_sq,
        constellation.num_states,
        binary_prefactor=constellation.num_states == 2,
    )
    slack = 1.0 + 5.0 * (
        report.stderr / report.p_e if report.p_e > 0.0 else 0.0
    )
    passed = report.p_e <= bound * slack
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "parameters": {
            "r_sn": ratios.r_sn,
            "r_ca": ratios.r_ca,
            "r_ce": ratios.r_ce,
            "alpha_sq": args.alpha_sq,
            "slices": args.slices,
            "trials": args.trials,
            "seed": args.seed,
            "phases": list(constellation.phases),
            "force_zero": bool(args.force_zero),
        },
        "policy_type": _atoms_doc(realized_type),
        "mean_energy": policy.mean_energy(),
        "beta_realized": beta_realized,
        "bound": bound,
        "p_e": report.p_e,
        "stderr": report.stderr,
        "error_counts": list(report.error_counts),
        "bound_satisfied": bool(passed),
    }
    _write_text(args.out, _json_doc(payload))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    ratios_high = OperatingRatios(r_sn=1e-6, r_ca=1.0, r_ce=0.9)
    ratios_low = OperatingRatios(r_sn=1e-2, r_ca=1.0, r_ce=0.9)
    report = verify_claims(
        ratios_high,
        ratios_low,
        expected_counterexample=args.expected_counterexample,
        expected_time_sharing=args.expected_time_sharing,
        min_margin=args.min_margin,
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "parameters": {
            "expected_counterexample": args.expected_counterexample,
            "expected_time_sharing": args.expected_time_sharing,
            "min_margin": args.min_margin,
            "ratios_high": {"r_sn": 1e-6, "r_ca": 1.0, "r_ce": 0.9},
            "ratios_low": {"r_sn": 1e-2, "r_ca": 1.0, "r_ce": 0.9},
        },
        **report.to_dict(),
    }
    if args.format == "json":
        _write_text(args.out, _json_doc(payload))
    else:
        lines = []
        for check in report.checks:
            tag = "PASS" if check.passed else "FAIL"
            detail = ", ".join(f"{k}={v}" for k, v in check.details.items())
            lines.append(f"[{tag}] {check.name}: {detail}")
        for note in report.notes:
            lines.append(f"note: {note}")
        lines.append(
            "all checks passed"
            if report.all_passed
            else "one or more checks FAILED"
        )
        _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK if report.all_passed else EXIT_VERIFY_FAILED


_COMMANDS = {
    "exponent": cmd_exponent,
    "sweep-photon": cmd_sweep_photon,
    "sweep-energy": cmd_sweep_energy,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InfeasibleRatiosError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
