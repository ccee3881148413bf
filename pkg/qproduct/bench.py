"""
Benchmark, figure-data and fan-out helpers behind the CLI's bench, plot and
validate commands.
"""

from __future__ import annotations

import asyncio
import csv
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np
from pydantic import BaseModel, Field

from .baselines import (
    BaselineResult,
    corrected_product,
    direct_product,
    gatteschi,
    lambert_log,
    slater_series,
    terms_for_tolerance,
)
from .bounds import apriori_abs
from .engine import evaluate, iterate_series
from .errors import DomainError
from .eta import R0_minus, R0_plus, R_at_gamma, eta_imag, f_of, g_of
from .numeric import PrecisionContext, format_real, plan_precision


LOGGER = logging.getLogger("qproduct.bench")

METHODS = ("euler", "product", "corrected", "log", "gatteschi", "slater")
BENCH_HEADER = ["method", "gamma", "terms", "wall_time_ns", "rel_err_vs_reference", "min_denominator_modulus"]
SHARPNESS_HEADER = ["gamma", "N", "bound", "measured", "ratio"]
PLOT_HEADER = ["z", "log_z", "value"]
PLOT_FUNCTIONS = ("f", "g", "R0ratio", "Rminus1ratio", "eta")
REFERENCE_EXTRA_DIGITS = 10
CSV_EXTRA_DIGITS = 5

T = TypeVar("T")


class BenchRecord(BaseModel):
    method: str
    gamma: str
    terms: int = Field(ge=0)
    wall_time_ns: int = Field(ge=0)
    rel_err_vs_reference: str
    min_denominator_modulus: str = ""

    def row(self) -> List[str]:
        return [
            self.method,
            self.gamma,
            str(self.terms),
            str(self.wall_time_ns),
            self.rel_err_vs_reference,
            self.min_denominator_modulus,
        ]


# ---------------------------------------------------------------------------
# Fan-out
# ---------------------------------------------------------------------------

async def _gather_in_order(jobs: Sequence[Callable[[], T]], workers: int) -> List[T]:
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [loop.run_in_executor(pool, job) for job in jobs]
        return list(await asyncio.gather(*futures))


def run_jobs(jobs: Sequence[Callable[[], T]], workers: int = 1) -> List[T]:
    """Run independent jobs; results come back in input order."""
    if workers <= 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    return asyncio.run(_gather_in_order(jobs, workers))


# ---------------------------------------------------------------------------
# Method dispatch
# ---------------------------------------------------------------------------

def evaluate_method(
    method: str,
    t: Any,
    x: Any,
    ctx: PrecisionContext,
    sigma: Any = 1,
    terms: Optional[int] = None,
) -> BaselineResult:
    """Evaluate R(t,x) with one of ``METHODS`` to ctx.requested_digits."""
    tol = ctx.mp.mpf(10) ** (-ctx.requested_digits)
    if method == "euler":
        certificate = evaluate(t, x, ctx, terms=terms)
        return BaselineResult("euler", certificate.value, certificate.terms_used)
    if method in ("product", "corrected", "gatteschi"):
        n = terms if terms is not None else terms_for_tolerance(method, ctx.convert(t), ctx.convert(x), float(tol), ctx.convert(sigma))
        if method == "product":
            return direct_product(t, x, n, ctx)
        if method == "corrected":
            return corrected_product(t, x, n, ctx)
        return gatteschi(t, x, n, sigma, ctx)
    if method == "log":
        return lambert_log(t, x, ctx, tol)
    if method == "slater":
        return slater_series(t, x, ctx, tol)
    raise DomainError(f"unknown method {method!r}")


def bench_point(
    method: str, t: str, gamma: str, digits: int, sigma: str = "1", deterministic: bool = False
) -> BenchRecord:
    ctx = plan_precision(digits, float(gamma))
    mp = ctx.mp
    x = mp.exp(-mp.mpf(gamma))
    reference = R_at_gamma_complex(t, gamma, digits + REFERENCE_EXTRA_DIGITS)

    start = time.perf_counter_ns()
    result = evaluate_method(method, t, x, ctx, sigma=sigma)
    elapsed = time.perf_counter_ns() - start

    rel_err = abs(result.value - reference) / abs(reference) if reference != 0 else abs(result.value)
    LOGGER.info("bench %s gamma=%s: %s terms, rel err %s", method, gamma, result.terms, mp.nstr(rel_err, 3))
    return BenchRecord(
        method=method,
        gamma=gamma,
        terms=result.terms,
        wall_time_ns=0 if deterministic else elapsed,
        rel_err_vs_reference=format_real(rel_err, 6),
        min_denominator_modulus=(
            format_real(result.min_denominator_modulus, digits + CSV_EXTRA_DIGITS)
            if result.min_denominator_modulus is not None
            else ""
        ),
    )


def R_at_gamma_complex(t: Any, gamma: str, digits: int) -> Any:
    """Euler-engine reference R(t, e^{-gamma}) for any complex t."""
    ctx = plan_precision(digits, float(gamma))
    x = ctx.mp.exp(-ctx.mp.mpf(gamma))
    return evaluate(t, x, ctx).value


def run_bench(
    gammas: Sequence[str],
    methods: Sequence[str],
    t: str,
    digits: int,
    sigma: str = "1",
    deterministic: bool = False,
    workers: int = 1,
) -> List[BenchRecord]:
    for method in methods:
        if method not in METHODS:
            raise DomainError(f"unknown method {method!r}")
    for gamma in gammas:
        if not float(gamma) > 0:
            raise DomainError("gamma must be positive")
    jobs = [
        (lambda m=method, g=gamma: bench_point(m, t, g, digits, sigma, deterministic))
        for gamma in gammas
        for method in methods
    ]
    return run_jobs(jobs, workers)


def sharpness_rows(t: str, gamma: str, digits: int) -> List[List[str]]:
    """Rows gamma,N,bound,measured,ratio comparing the a priori tail bound with the measured tail."""
    ctx = plan_precision(digits + REFERENCE_EXTRA_DIGITS, float(gamma))
    mp = ctx.mp
    x = mp.exp(-mp.mpf(gamma))
    t_val = ctx.convert(t)
    reference = evaluate(t_val, x, ctx).value
    floor = mp.mpf(10) ** (-digits)
    rows = []
    for state in iterate_series(t_val, x, ctx):
        N = state.n + 1
        report = apriori_abs(t_val, x, N, ctx)
        measured = abs(reference - state.S_n)
        if report.hypotheses_met:
            ratio = report.value / measured if measured != 0 else mp.inf
            rows.append(
                [
                    gamma,
                    str(N),
                    format_real(report.value, 6),
                    format_real(measured, 6),
                    format_real(ratio, 6) if mp.isfinite(ratio) else "inf",
                ]
            )
            if report.value < floor:
                break
    return rows


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


# ---------------------------------------------------------------------------
# Figure data
# ---------------------------------------------------------------------------

def plot_value(function: str, z: Any, ctx: PrecisionContext) -> Any:
    mp = ctx.mp
    if function == "f":
        return f_of(z, ctx)
    if function == "g":
        return g_of(z, ctx)
    if function == "eta":
        return eta_imag(z, ctx)
    x = mp.exp(-2 * mp.pi * z)
    if function == "R0ratio":
        return R_at_gamma(1, 2 * mp.pi * z, ctx) / R0_plus(x, ctx)
    if function == "Rminus1ratio":
        return R_at_gamma(-1, 2 * mp.pi * z, ctx) / R0_minus(x, ctx)
    raise DomainError(f"unknown function {function!r}")


def plot_grid(z_min: float, z_max: float, points: int) -> List[str]:
    if not z_min > 0:
        raise DomainError("z-min must be positive")
    if z_max < z_min:
        raise DomainError("z-max must not be below z-min")
    if points < 1:
        raise DomainError("points must be >= 1")
    if points == 1:
        return [repr(float(z_min))]
    return [repr(float(z)) for z in np.geomspace(z_min, z_max, points)]


def plot_rows(
    function: str, z_min: float, z_max: float, points: int, digits: int, workers: int = 1
) -> List[List[str]]:
    if function not in PLOT_FUNCTIONS:
        raise DomainError(f"unknown function {function!r}")
    grid = plot_grid(z_min, z_max, points)

    def row(z_text: str) -> List[str]:
        ctx = PrecisionContext(digits, digits + 10)
        z = ctx.mp.mpf(z_text)
        value = plot_value(function, z, ctx)
        width = digits + CSV_EXTRA_DIGITS
        return [z_text, format_real(ctx.mp.log(z), width), format_real(value, width)]

    LOGGER.info("plot %s on %s points", function, len(grid))
    return run_jobs([(lambda z=z: row(z)) for z in grid], workers)


__all__ = [
    "METHODS",
    "BENCH_HEADER",
    "SHARPNESS_HEADER",
    "PLOT_HEADER",
    "PLOT_FUNCTIONS",
    "BenchRecord",
    "run_jobs",
    "evaluate_method",
    "bench_point",
    "run_bench",
    "sharpness_rows",
    "write_csv",
    "plot_value",
    "plot_grid",
    "plot_rows",
]
