"""Command line interface.

Exit codes: 0 success, 2 validation failure, 3 I/O error, 4 configuration
error. Environment variables QBER_DATA_DIR and QBER_PORT provide defaults
for serving; explicit flags always win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .assessment import (
    EngineConfig,
    WhatIfDelta,
    assess,
    catalog_hash,
    report_from_json,
    report_to_json,
    whatif,
)
from .catalog import load_catalog_path, load_default_catalog
from .errors import INVALID_CONFIG, OUT_OF_RANGE, STALE_CATALOG, QberError
from .model import Money, load_profile, profile_from_json, validate_profile
from .report import render_report
from .simulation import SimulationConfig, losses_to_csv, simulate_losses, summary_json

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_CONFIG = 4

_CONFIG_CODES = {INVALID_CONFIG, OUT_OF_RANGE}


class _Parser(argparse.ArgumentParser):
    # Bad flags are configuration errors, not validation failures.
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _load_catalog(args):
    if getattr(args, "catalog", None):
        return load_catalog_path(args.catalog)
    return load_default_catalog()


def _emit(doc: dict, out_path: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _engine_config(args, profile) -> EngineConfig:
    budget = None
    if getattr(args, "budget", None) is not None:
        budget = Money.from_float(args.budget, profile.yearly_revenue.currency)
    simulation = None
    if getattr(args, "simulate", False):
        simulation = SimulationConfig(
            iterations=args.iterations, seed=args.seed,
            confidence_levels=_parse_confidence(args.confidence),
        )
    return EngineConfig(
        alpha=args.alpha,
        cost_rate=args.cost_rate,
        budget=budget,
        seed=args.seed,
        simulation=simulation,
    )


def _parse_confidence(raw: str) -> tuple[float, ...]:
    try:
        levels = tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise QberError(INVALID_CONFIG, f"cannot parse confidence levels from {raw!r}")
    if not levels:
        raise QberError(INVALID_CONFIG, "at least one confidence level is required")
    return tuple(sorted(levels))


def _load_report(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return report_from_json(json.load(handle))


def _check_catalog_matches(report, catalog) -> None:
    if report.catalog_digest != catalog_hash(catalog):
        raise QberError(
            STALE_CATALOG,
            "catalog does not match the one the report was computed with",
        )


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def cmd_assess(args) -> int:
    catalog = _load_catalog(args)
    profile = load_profile(args.profile)
    config = _engine_config(args, profile)
    report = assess(profile, catalog, config)
    _emit(report_to_json(report), args.out)
    return EXIT_OK


def cmd_whatif(args) -> int:
    catalog = _load_catalog(args)
    base = _load_report(args.report)
    with open(args.delta, "r", encoding="utf-8") as handle:
        delta = WhatIfDelta.from_json(json.load(handle))
    result = whatif(base, delta, catalog)
    _emit(report_to_json(result), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    catalog = _load_catalog(args)
    report = _load_report(args.report)
    _check_catalog_matches(report, catalog)
    cfg = SimulationConfig(
        iterations=args.iterations,
        seed=args.seed,
        confidence_levels=_parse_confidence(args.confidence),
        impact_spread=args.spread,
    )
    profile = profile_from_json(report.profile_snapshot)
    distribution = simulate_losses(
        profile, catalog, cfg, mapping=report.config.rating_mapping
    )
    if args.out_csv:
        with open(args.out_csv, "w", encoding="utf-8", newline="") as handle:
            losses_to_csv(distribution, handle)
    _emit(summary_json(distribution, cfg.confidence_levels), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    catalog = _load_catalog(args)
    profile = load_profile(args.profile)
    result = validate_profile(profile, catalog)
    if result.ok:
        print("profile is valid")
        return EXIT_OK
    for violation in result.violations:
        print(f"{violation.code}: {violation.message} ({violation.path})",
              file=sys.stderr)
    return EXIT_VALIDATION


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app
    from .store import FileDocumentStore

    data_dir = args.data or os.environ.get("QBER_DATA_DIR") or "./qber-data"
    port = args.port if args.port is not None else int(os.environ.get("QBER_PORT", "8000"))
    catalog = _load_catalog(args)
    app = create_app(FileDocumentStore(data_dir), catalog)
    uvicorn.run(app, host=args.host, port=port)
    return EXIT_OK


def cmd_report(args) -> int:
    report = _load_report(args.report)
    written = render_report(report, args.out_dir, losses_path=args.losses)
    for path in written:
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser wiring
# ---------------------------------------------------------------------------

def _add_catalog_flag(parser) -> None:
    parser.add_argument(
        "--catalog",
        help="catalog JSON file or directory (default: shipped catalog)",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="qber", description="Cyber risk quantification engine")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("assess", parents=[], help="run a full assessment")
    p.add_argument("--profile", required=True)
    _add_catalog_flag(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--cost-rate", type=float, default=1.0)
    p.add_argument("--budget", type=float, default=None,
                   help="yearly security budget (profile currency)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--simulate", action="store_true",
                   help="attach a loss simulation summary")
    p.add_argument("--iterations", type=int, default=10000)
    p.add_argument("--confidence", default="0.95,0.99")
    p.add_argument("--out", help="write the report JSON here instead of stdout")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("whatif", help="re-run an assessment with changes applied")
    p.add_argument("--report", required=True, help="base report JSON file")
    p.add_argument("--delta", required=True, help="delta JSON file")
    _add_catalog_flag(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_whatif)

    p = sub.add_parser("simulate", help="Monte Carlo loss simulation for a report")
    p.add_argument("--report", required=True)
    _add_catalog_flag(p)
    p.add_argument("--iterations", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--confidence", default="0.95,0.99")
    p.add_argument("--spread", type=float, default=0.0)
    p.add_argument("--out-csv", help="write one loss per line here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="validate a profile against a catalog")
    p.add_argument("--profile", required=True)
    _add_catalog_flag(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data", help="document store directory (or QBER_DATA_DIR)")
    _add_catalog_flag(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="render report.csv and charts for a report")
    p.add_argument("--report", required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--losses", help="loss sample CSV for the histogram")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QberError as exc:
        print(json.dumps(exc.to_envelope()), file=sys.stderr)
        if exc.code in _CONFIG_CODES:
            return EXIT_CONFIG
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
