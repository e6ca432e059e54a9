"""
wcsched command line.

    wcsched check|simulate|polytope|compose|gain --scenario F [--out F] [--seed N]
                                                 [--oracle] [--plot-data F]

--scenario may also name a directory; every *.json file in it is processed
on a thread pool and the reports are printed as one JSON list.

Exit codes: 0 pass, 1 usage or input error, 2 guarantee violation,
3 not schedulable. A directory run exits with the worst code.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
import itertools
import json
import logging
from pathlib import Path
import sys
from typing import Any, Callable, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError
from tqdm import tqdm

from wcsched.algebra.dualcurve import DualCurveService, compose_chain
from wcsched.config import Config, load_config
from wcsched.errors import NotSchedulableError, UnsupportedServiceKindError, WcschedError
from wcsched.feasible.gains import multiplexing_gain
from wcsched.feasible.permutohedron import beta_mu, shapley_centroid, vertex
from wcsched.feasible.system import (
    SystemSpectra,
    baseline,
    check_spectra,
    feasible_mu_range,
    is_schedulable,
)
from wcsched.logging_config import LOGGER_NAME, log_latency, setup_logging
from wcsched.sched.policies import max_slack
from wcsched.sim.engine import SchedulingEngine
from wcsched.sim.scenario import Scenario, load_scenario
from wcsched.sim.verification import bounds_report, verify_guarantee

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2
EXIT_UNSCHEDULABLE = 3

Report = tuple[dict[str, Any], int]


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with the usage code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_partition(text: str | None) -> list[list[int]] | None:
    """'0,1;2' -> [[0, 1], [2]]."""
    if text is None:
        return None
    return [[int(k) for k in cls.split(",") if k.strip()] for cls in text.split(";")]


def _system_at(scenario: Scenario, config: Config, slot: int, seed: int | None) -> SystemSpectra:
    """Spectra of the given slot, reached by running the scenario's policy."""
    engine = SchedulingEngine.from_scenario(scenario, config, seed=seed)
    if slot:
        engine.run(slot)
    return engine.probe()


# -- subcommands ---------------------------------------------------------------


def cmd_check(scenario: Scenario, args: argparse.Namespace, config: Config) -> Report:
    """Schedulability verdict, first violating interval and the feasible mu range."""
    try:
        system = _system_at(scenario, config, args.slot, args.seed)
    except NotSchedulableError:
        pairs = scenario.build_services()
        verdict = check_spectra(
            [svc.spectrum(b).entries for svc, b in pairs], scenario.c, scenario.horizon
        )
        rejected = {
            "schedulable": False,
            "interval": list(verdict.interval) if verdict.interval else None,
            "min_slack": verdict.min_slack,
            "mu_range": None,
        }
        return rejected, EXIT_UNSCHEDULABLE

    verdict = is_schedulable(system)
    report: dict[str, Any] = {
        "schedulable": verdict.schedulable,
        "interval": list(verdict.interval) if verdict.interval else None,
        "min_slack": verdict.min_slack,
        "mu_range": None,
    }
    if not verdict:
        return report, EXIT_UNSCHEDULABLE

    beta = baseline(system, config.algebra.lazy_beta_threshold)
    report["mu_range"] = list(feasible_mu_range(beta, system.q, system.capacity))
    report["q"] = list(system.q)
    report["headroom"] = system.headroom() if system.n else None
    report["flow_headroom"] = system.flow_headroom()
    return report, EXIT_OK


def cmd_simulate(scenario: Scenario, args: argparse.Namespace, config: Config) -> Report:
    """Run the scenario, verify every flow's guarantee and report the bounds."""
    try:
        engine = SchedulingEngine.from_scenario(
            scenario,
            config,
            representation=args.representation,
            seed=args.seed,
            oracle=args.oracle,
        )
        log = engine.run()
    except NotSchedulableError as e:
        return {"error": str(e), "code": e.code, "interval": e.interval}, EXIT_UNSCHEDULABLE

    if args.out:
        log.write_jsonl(args.out)
    if args.plot_data:
        log.write_plot_csv(args.plot_data)

    guarantees = [verify_guarantee(log, k) for k in sorted(log.admissions())]
    violations = [{"slot": slot, **v.model_dump()} for slot, v in log.violations()]
    report = {
        "policy": scenario.policy.policy,
        "slots": len(log),
        "served": sum(r.mu for r in log),
        "violations": violations,
        "guarantees": [g.to_dict() for g in guarantees],
        "bounds": [b.to_dict() for b in bounds_report(log)],
        "rejections": [rej.model_dump() for r in log for rej in r.rejections],
    }
    failed = violations or not all(g.passed for g in guarantees)
    return report, EXIT_VIOLATION if failed else EXIT_OK


@log_latency("polytope report")
def cmd_polytope(scenario: Scenario, args: argparse.Namespace, config: Config) -> Report:
    """Baseline function, mu-slice vertices, centroid and max-slack point."""
    try:
        system = _system_at(scenario, config, args.slot, args.seed)
        beta = baseline(system, config.algebra.lazy_beta_threshold)
    except NotSchedulableError as e:
        return {"error": str(e), "code": e.code, "interval": e.interval}, EXIT_UNSCHEDULABLE

    lo, hi = feasible_mu_range(beta, system.q, system.capacity)
    mu = hi if args.mu is None else args.mu
    slice_ = beta_mu(beta, mu, system.q, system.capacity)
    centroid = shapley_centroid(slice_, system.q, system.capacity)

    report: dict[str, Any] = {
        "q": list(system.q),
        "beta": beta.to_dict(),
        "mu_range": [lo, hi],
        "mu": mu,
        "max_slack": list(max_slack(system, mu)),
        "centroid": {
            "exact": [_fraction(x) for x in centroid.exact],
            "rounded": list(centroid.rounded),
        },
        "vertices": None,
    }
    if system.n <= config.algebra.vertex_enumeration_max:
        points = {vertex(slice_, order) for order in itertools.permutations(range(system.n))}
        report["vertices"] = [list(p) for p in sorted(points)]
        report["supermodular"] = slice_.is_supermodular()
    return report, EXIT_OK


def cmd_compose(scenario: Scenario, args: argparse.Namespace, config: Config) -> Report:
    """Fold the scenario's flows, in order, into one end-to-end dual-curve service."""
    pairs = scenario.build_services()
    if not pairs:
        return {"error": "compose needs at least one flow"}, EXIT_USAGE
    if any(not isinstance(svc, DualCurveService) for svc, _ in pairs):
        raise UnsupportedServiceKindError("compose needs dual-curve services")
    svc, total = compose_chain([s for s, _ in pairs], [b for _, b in pairs])  # type: ignore[misc]
    return {"service": svc.to_json(), "b": total}, EXIT_OK


def cmd_gain(scenario: Scenario, args: argparse.Namespace, config: Config) -> Report:
    """Standalone capacity needs rho and the multiplexing gains."""
    try:
        system = _system_at(scenario, config, args.slot, args.seed)
    except NotSchedulableError as e:
        return {"error": str(e), "code": e.code, "interval": e.interval}, EXIT_UNSCHEDULABLE
    report = multiplexing_gain(
        system, _parse_partition(args.partition), config.algebra.lazy_beta_threshold
    )
    return report.to_dict(), EXIT_OK


COMMANDS: dict[str, Callable[[Scenario, argparse.Namespace, Config], Report]] = {
    "check": cmd_check,
    "simulate": cmd_simulate,
    "polytope": cmd_polytope,
    "compose": cmd_compose,
    "gain": cmd_gain,
}


# -- driver ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wcsched", description="State-based scheduling with worst-case service guarantees.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0])
        p.add_argument("--scenario", required=True, help="Scenario JSON file or directory of them.")
        p.add_argument("--out", help="Write the report (simulate: the JSON Lines run log) here.")
        p.add_argument("--seed", type=int, default=None, help="Seed for generated arrivals.")
        p.add_argument("--config", default=None, help="YAML configuration file.")
        p.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr.")
        if name in ("check", "polytope", "gain"):
            p.add_argument("--slot", type=int, default=0, help="Run the policy up to this slot first.")
        if name == "simulate":
            p.add_argument("--oracle", action="store_true", help="Cross-check every slot by brute force.")
            p.add_argument("--plot-data", help="Write per-slot CSV for plotting.")
            p.add_argument(
                "--representation",
                choices=["dual", "spectral"],
                default="dual",
                help="State representation used to advance services.",
            )
        if name == "polytope":
            p.add_argument("--mu", type=int, default=None, help="Total service (default: work-conserving).")
        if name == "gain":
            p.add_argument("--partition", default=None, help="Classes such as '0,1;2'.")
    return parser


def run_file(command: str, path: Path, args: argparse.Namespace, config: Config) -> Report:
    """Load one scenario and run a subcommand on it; errors become reports."""
    try:
        scenario = load_scenario(path, config)
        report, code = COMMANDS[command](scenario, args, config)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        report, code = {"error": str(e)}, EXIT_USAGE
    except NotSchedulableError as e:
        report, code = {"error": str(e), "code": e.code, "interval": e.interval}, EXIT_UNSCHEDULABLE
    except WcschedError as e:
        logger.error(f"{path}: {e}")
        report, code = {"error": str(e), "code": e.code}, EXIT_USAGE
    report = {"scenario": str(path), **report}
    return report, code


def _run_directory(command: str, directory: Path, args: argparse.Namespace, config: Config) -> Report:
    files = sorted(directory.glob("*.json"))
    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    def one(path: Path) -> Report:
        local = argparse.Namespace(**vars(args))
        if command == "simulate":
            local.out = str(out_dir / f"{path.stem}.jsonl") if out_dir else None
            local.plot_data = str(out_dir / f"{path.stem}.csv") if out_dir and args.plot_data else None
        return run_file(command, path, local, config)

    with ThreadPoolExecutor(max_workers=config.simulation.workers) as pool:
        results = list(tqdm(pool.map(one, files), total=len(files), desc=command, file=sys.stderr))
    reports = [r for r, _ in results]
    code = max((c for _, c in results), default=EXIT_OK)
    return {"results": reports}, code


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    config = load_config(args.config)
    setup_logging("DEBUG" if args.verbose else config.simulation.log_level)
    logging.getLogger(LOGGER_NAME).debug(f"command={args.command} scenario={args.scenario}")

    target = Path(args.scenario)
    if target.is_dir():
        report, code = _run_directory(args.command, target, args, config)
        if args.out and args.command != "simulate":
            Path(args.out, "report.json").write_text(json.dumps(report, indent=2))
    else:
        report, code = run_file(args.command, target, args, config)
        if args.out and args.command != "simulate":
            Path(args.out).write_text(json.dumps(report, indent=2))

    print(json.dumps(report, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
