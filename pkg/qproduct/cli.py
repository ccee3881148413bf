"""
Command-line interface: ``eval``, ``bench``, ``plot`` and ``validate``.

Results go to standard output (JSON) or to the CSV named by ``--out``; logs
and error payloads go to standard error. Exit codes: 0 success, 1 failed
validation, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel

from .bench import (
    BENCH_HEADER,
    METHODS,
    PLOT_FUNCTIONS,
    PLOT_HEADER,
    SHARPNESS_HEADER,
    evaluate_method,
    plot_rows,
    run_bench,
    run_jobs,
    sharpness_rows,
    write_csv,
)
from .config_store import load_environment, load_runtime_config
from .engine import context_for_evaluation, evaluate
from .errors import DomainError, QProductError
from .identities import IdentityReport, checks_for_point, sample_points
from .numeric import format_real


LOGGER = logging.getLogger("qproduct.cli")

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2


class EvalResponse(BaseModel):
    value_re: str
    value_im: str
    rel_error_bound: str
    terms_used: int
    working_digits: int
    method: str
    t_reduction_steps: int


class ErrorPayload(BaseModel):
    error: str
    message: str


def _emit_error(exc: BaseException) -> int:
    payload = ErrorPayload(error=type(exc).__name__, message=str(exc))
    print(json.dumps(payload.model_dump()), file=sys.stderr)
    return EXIT_USAGE


def _comma_list(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def build_parser(defaults: Dict[str, Any]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qprod",
        description="Certified evaluation of R(t,x) = prod_{n>=1} (1 - t x^n) for |x| < 1.",
    )
    parser.add_argument("--log-level", default="warning")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser(
        "eval",
        help="evaluate R(t,x)",
        description=(
            "Evaluate R(t,x). Complex literals: a+bi, a-bi, a, bi or polar m@theta. "
            "The certified bound targets K = (digits+2)*ln(10)."
        ),
    )
    p_eval.add_argument("--t", required=True)
    p_eval.add_argument("--x", required=True)
    p_eval.add_argument("--digits", type=int, default=defaults["default_digits"])
    p_eval.add_argument("--method", choices=METHODS, default="euler")
    p_eval.add_argument("--sigma", default=defaults["gatteschi_sigma"], help="Gatteschi parameter (default from settings)")
    p_eval.add_argument("--terms", type=int, default=None, help="force this many terms/factors/steps")
    p_eval.add_argument("--max-working-digits", type=int, default=None)

    p_bench = sub.add_parser(
        "bench",
        help="compare methods over a gamma sweep",
        description="CSV rows include wall_time_ns, so output is byte-identical across runs only with --deterministic.",
    )
    p_bench.add_argument("--gamma-list", required=True)
    p_bench.add_argument("--digits", type=int, default=defaults["default_digits"])
    p_bench.add_argument("--methods", default=",".join(METHODS))
    p_bench.add_argument("--t", default="1")
    p_bench.add_argument("--sigma", default=defaults["gatteschi_sigma"])
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--sharpness-out", default=None, help="also write gamma,N,bound,measured,ratio")
    p_bench.add_argument(
        "--deterministic", action="store_true", help="write wall_time_ns as 0 so identical flags give byte-identical CSV"
    )
    p_bench.add_argument("--workers", type=int, default=defaults["workers"])

    p_plot = sub.add_parser("plot", help="emit figure data as CSV")
    p_plot.add_argument("--function", choices=PLOT_FUNCTIONS, required=True)
    p_plot.add_argument("--z-min", type=float, required=True)
    p_plot.add_argument("--z-max", type=float, required=True)
    p_plot.add_argument("--points", type=int, default=50)
    p_plot.add_argument("--digits", type=int, default=defaults["default_digits"])
    p_plot.add_argument("--out", required=True)
    p_plot.add_argument("--workers", type=int, default=defaults["workers"])

    p_validate = sub.add_parser("validate", help="run the identity suite")
    p_validate.add_argument("--digits", type=int, default=25)
    p_validate.add_argument("--seed", type=int, default=0)
    p_validate.add_argument("--samples", type=int, default=defaults["validate_samples"])
    p_validate.add_argument("--quick", action="store_true", help="only |x| <= 0.8, fewer samples")
    p_validate.add_argument("--workers", type=int, default=defaults["workers"])
    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_eval(args: argparse.Namespace) -> int:
    if args.digits < 1:
        raise DomainError("digits must be >= 1")
    ctx = context_for_evaluation(args.x, args.digits, args.max_working_digits)
    if args.method == "euler":
        certificate = evaluate(args.t, args.x, ctx, terms=args.terms)
        value = certificate.value
        bound = format_real(certificate.rel_error_bound, 5)
        terms_used = certificate.terms_used
        steps = certificate.t_reduction_steps
    else:
        result = evaluate_method(args.method, args.t, args.x, ctx, sigma=args.sigma, terms=args.terms)
        value = result.value
        bound = "none"
        terms_used = result.terms
        steps = 0
    response = EvalResponse(
        value_re=format_real(getattr(value, "real", value), args.digits),
        value_im=format_real(getattr(value, "imag", 0), args.digits),
        rel_error_bound=bound,
        terms_used=terms_used,
        working_digits=ctx.working_digits,
        method=args.method,
        t_reduction_steps=steps,
    )
    print(json.dumps(response.model_dump()))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    methods = _comma_list(args.methods)
    if not methods:
        parser.error("--methods must name at least one method")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        parser.error(f"unknown method(s): {', '.join(unknown)}")
    gammas = _comma_list(args.gamma_list)
    if not gammas:
        parser.error("--gamma-list must name at least one gamma")
    records = run_bench(
        gammas,
        methods,
        t=args.t,
        digits=args.digits,
        sigma=args.sigma,
        deterministic=args.deterministic,
        workers=args.workers,
    )
    write_csv(Path(args.out), BENCH_HEADER, (record.row() for record in records))
    if args.sharpness_out:
        jobs = [(lambda g=gamma: sharpness_rows(args.t, g, args.digits)) for gamma in gammas]
        tables = run_jobs(jobs, args.workers)
        write_csv(Path(args.sharpness_out), SHARPNESS_HEADER, (row for table in tables for row in table))
    LOGGER.info("wrote %s bench records to %s", len(records), args.out)
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    rows = plot_rows(args.function, args.z_min, args.z_max, args.points, args.digits, args.workers)
    write_csv(Path(args.out), PLOT_HEADER, rows)
    LOGGER.info("wrote %s %s rows to %s", len(rows), args.function, args.out)
    return EXIT_OK


def _summarise(reports: Sequence[IdentityReport]) -> "OrderedDict[str, Dict[str, Any]]":
    summary: "OrderedDict[str, Dict[str, Any]]" = OrderedDict()
    for report in reports:
        entry = summary.setdefault(report.identity_id, {"checks": 0, "passed": 0, "worst": None})
        entry["checks"] += 1
        entry["passed"] += int(report.passed)
        if entry["worst"] is None or report.rel_discrepancy > entry["worst"]:
            entry["worst"] = report.rel_discrepancy
    return summary


def cmd_validate(args: argparse.Namespace) -> int:
    if args.digits <= 5:
        raise DomainError("validate needs --digits > 5")
    count = min(args.samples, 5) if args.quick else args.samples
    near_one_digits = min(args.digits, 20)
    points = sample_points(args.seed, count, args.digits, args.quick, near_one_digits)
    jobs = [job for point in points for job in checks_for_point(point)]
    LOGGER.info("validate: %s sample points, %s jobs", len(points), len(jobs))
    reports = [report for batch in run_jobs(jobs, args.workers) for report in batch]

    print(f"{'identity':<28} {'checks':>6} {'passed':>6}  max_rel_discrepancy")
    for identity_id, entry in _summarise(reports).items():
        status = "ok" if entry["passed"] == entry["checks"] else "FAIL"
        print(
            f"{identity_id:<28} {entry['checks']:>6} {entry['passed']:>6}  "
            f"{format_real(entry['worst'], 3)}  {status}"
        )
    failures = [report for report in reports if not report.passed]
    if failures:
        for report in failures:
            print(json.dumps(report.as_dict()), file=sys.stderr)
        return EXIT_VALIDATION_FAILED
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_environment()
    defaults = load_runtime_config()
    parser = build_parser(defaults)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=args.log_level.upper(), format="%(asctime)s %(levelname)s %(message)s")

    try:
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "bench":
            return cmd_bench(args, parser)
        if args.command == "plot":
            return cmd_plot(args)
        return cmd_validate(args)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except (QProductError, ValueError, OSError) as exc:
        LOGGER.debug("command failed", exc_info=True)
        return _emit_error(exc)


if __name__ == "__main__":
    sys.exit(main())
