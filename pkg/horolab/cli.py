"""
cli.py
Command line entry point

    horolab run <scenario.json>
    horolab reproduce <claim-id> [--seed N] [--out DIR]
    horolab render --domain UnitDisc --x 1 --R 1 [--flavor big] [--out FILE]
    horolab list-claims

Exit codes: 0 pass, 1 claim FAIL, 2 scenario/config error, 3 numerical failure.
"""

import argparse
import logging
import sys
from typing import List, Optional

from horolab.claims import list_claims, reproduce
from horolab.config import load_settings, use_settings
from horolab.domains import domain_from_dict
from horolab.errors import DomainError, HorolabError, NumericalError, ScenarioError
from horolab.metrics import backend_from_dict
from horolab.reports import ProbeReport, save_report
from horolab.rendering import render_horosphere_raster
from horolab.scenarios import load_scenario, parse_boundary_point, parse_complex, parse_point, run_scenario

logger = logging.getLogger("horolab")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="horolab", description="Horospheres in Kobayashi hyperbolic domains")
    parser.add_argument("--config", help="TOML settings file (default: config.toml or $HOROLAB_CONFIG)")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a JSON scenario")
    run.add_argument("scenario", help="path to the scenario file")

    rep = sub.add_parser("reproduce", help="reproduce a registered claim")
    rep.add_argument("claim_id")
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--out", default="out", help="artifact directory")

    render = sub.add_parser("render", help="rasterize a horosphere to SVG")
    render.add_argument("--domain", default="UnitDisc", help="domain kind, e.g. UnitDisc, SlitDisc, HalfDisc")
    render.add_argument("--backend", default=None, help="backend mode (default: natural mode of the domain)")
    render.add_argument("--h", type=float, default=None, help="grid resolution for the surrogate backend")
    render.add_argument("--x", required=True, help="boundary point, e.g. 1 or 0.5")
    render.add_argument("--side", choices=["above", "below"], default=None, help="side of a slit point")
    render.add_argument("--o", default="0", help="pole")
    render.add_argument("--R", type=float, required=True)
    render.add_argument("--flavor", choices=["small", "big"], default="big")
    render.add_argument("--resolution", type=int, default=200)
    render.add_argument("--out", default="horosphere.svg")

    sub.add_parser("list-claims", help="list registered claim ids")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")


def _write_diagnostic(out_dir: str, stem: str, error: Exception) -> None:
    report = ProbeReport(kind="failure", parameters={"stem": stem})
    report.data.update({"error": type(error).__name__, "message": str(error)})
    report.passed = False
    try:
        save_report(report, out_dir, f"{stem}_failure")
    except OSError as e:
        logger.error(f"Could not write diagnostic report: {e}")


def _summary(report: ProbeReport) -> int:
    status = "PASS" if report.passed else "FAIL" if report.passed is False else "DONE"
    label = report.claim_id or report.kind
    print(f"{label}: {status} (report {report.report_id})")
    return EXIT_FAIL if report.passed is False else EXIT_PASS


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    stem = scenario.output.get("stem", scenario.name)
    try:
        result = run_scenario(scenario)
    except NumericalError as e:
        logger.error(f"Numerical failure in {args.scenario}: {e}")
        _write_diagnostic(scenario.out_dir, stem, e)
        return EXIT_NUMERICAL
    for path in result.paths:
        logger.info(f"Wrote {path}")
    return _summary(result.report)


def _cmd_reproduce(args: argparse.Namespace) -> int:
    try:
        report = reproduce(args.claim_id, seed=args.seed, out_dir=args.out)
    except NumericalError as e:
        logger.error(f"Numerical failure reproducing {args.claim_id}: {e}")
        _write_diagnostic(args.out, args.claim_id, e)
        return EXIT_NUMERICAL
    return _summary(report)


def _cmd_render(args: argparse.Namespace) -> int:
    try:
        domain = domain_from_dict({"kind": args.domain})
        backend = backend_from_dict({"mode": args.backend, "h": args.h}, domain)
        x_value = parse_complex(args.x)
        x = parse_boundary_point(domain, {"at": x_value, "side": args.side}) if domain.planar else None
        if x is None:
            raise DomainError(f"Rasters need a planar domain, got {domain.label}")
        o = parse_point(domain, args.o)
    except DomainError as e:
        raise ScenarioError(str(e), issues=[str(e)])
    render_horosphere_raster(backend, o, x, args.R, args.flavor, args.resolution, out=args.out)
    print(f"Wrote {args.out}")
    return EXIT_PASS


def _cmd_list_claims(args: argparse.Namespace) -> int:
    for entry in list_claims():
        slow = "  [slow]" if entry.slow else ""
        print(f"{entry.claim_id:32s} {entry.title}{slow}")
    return EXIT_PASS


COMMANDS = {
    "run": _cmd_run,
    "reproduce": _cmd_reproduce,
    "render": _cmd_render,
    "list-claims": _cmd_list_claims,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    try:
        if args.config:
            use_settings(load_settings(args.config))
        return COMMANDS[args.command](args)
    except ScenarioError as e:
        logger.error(str(e))
        for issue in e.issues:
            print(f"  - {issue}", file=sys.stderr)
        return EXIT_CONFIG
    except HorolabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
