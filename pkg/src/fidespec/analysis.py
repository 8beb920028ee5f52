"""Error norms against exact solutions, convergence sweeps, and report export.

Errors are measured in the original variable x with unit weight: the L2
norm comes from a Gauss rule in x (interior nodes only, so exact solutions
with removable endpoint limits are safe), the sup norm from an equispaced
grid on (0, 1].  Sweep rows are independent; the report is assembled in
order of ascending N regardless of how the rows were produced.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .galerkin import Problem, SpectralSolution, eval_solution, solve
from .quadrature import legendre_gauss

__all__ = [
    "ConvergenceRow",
    "ConvergenceReport",
    "DecayFit",
    "DEFAULT_ERROR_QUAD_POINTS",
    "l2_error",
    "linf_error",
    "convergence_sweep",
    "fitted_decay_rate",
    "write_csv",
    "write_json",
    "write_plot_data",
]

DEFAULT_ERROR_QUAD_POINTS = 200

# Errors below this multiple of (1 + ||exact||_2) are reported as-is but
# flagged: they sit at the double-precision floor.
_MACHINE_FLOOR = 1e-15

_FIT_ERROR_CUTOFF = 1e-14

CSV_HEADER = "N,l2_error,linf_error,cond_estimate,elapsed_ms"


@dataclass(frozen=True)
class ConvergenceRow:
    order: int
    l2_error: float
    linf_error: float
    condition_estimate: float
    elapsed_ms: float
    at_floor: bool = False


@dataclass(frozen=True)
class ConvergenceReport:
    problem: str
    rows: tuple[ConvergenceRow, ...]
    error_quad_points: int


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of log10(error) against N over the reliable rows."""

    slope: float
    r_squared: Optional[float]
    non_convergent: bool


def l2_error(
    solution: SpectralSolution,
    exact: Callable[[float], float],
    points: int = DEFAULT_ERROR_QUAD_POINTS,
) -> float:
    """L2 norm of exact - numerical over [0, 1] by a points-point Gauss rule in x."""
    if points < 2:
        raise ValueError(f"error quadrature needs at least 2 points, got {points}")
    rule = legendre_gauss(points)
    total = 0.0
    for x, w in zip(rule.nodes.tolist(), rule.weights.tolist()):
        diff = exact(x) - eval_solution(solution, x)
        total += w * diff * diff
    return math.sqrt(total)


def linf_error(
    solution: SpectralSolution,
    exact: Callable[[float], float],
    grid: int = 400,
) -> float:
    """Max of |exact - numerical| over grid equispaced points in (0, 1]."""
    if grid < 2:
        raise ValueError(f"sup-norm grid needs at least 2 points, got {grid}")
    worst = 0.0
    for i in range(1, grid + 1):
        x = i / grid
        worst = max(worst, abs(exact(x) - eval_solution(solution, x)))
    return worst


def _exact_l2_norm(exact: Callable[[float], float], points: int) -> float:
    rule = legendre_gauss(points)
    total = 0.0
    for x, w in zip(rule.nodes.tolist(), rule.weights.tolist()):
        value = exact(x)
        total += w * value * value
    return math.sqrt(total)


def convergence_sweep(
    problem: Problem,
    orders: Sequence[int],
    error_points: int | None = None,
) -> ConvergenceReport:
    """Solve once per order and report errors, conditioning, and timing."""
    if problem.exact is None:
        raise ValueError(f"problem '{problem.name}' has no exact solution to sweep against")
    orders = sorted(int(n) for n in orders)
    if not orders:
        raise ValueError("at least one approximation order is required")
    if orders[0] < 1:
        raise ValueError(f"approximation orders must be at least 1, got {orders[0]}")
    points = DEFAULT_ERROR_QUAD_POINTS if error_points is None else int(error_points)
    floor = _MACHINE_FLOOR * (1.0 + _exact_l2_norm(problem.exact, points))
    rows = []
    for order in orders:
        start = time.perf_counter()
        try:
            sol = solve(problem, order)
        except Exception as err:
            raise RuntimeError(f"sweep failed at order N={order}: {err}") from err
        elapsed_ms = (time.perf_counter() - start) * 1e3
        l2 = l2_error(sol, problem.exact, points)
        linf = linf_error(sol, problem.exact)
        rows.append(
            ConvergenceRow(
                order=order,
                l2_error=l2,
                linf_error=linf,
                condition_estimate=sol.condition_estimate,
                elapsed_ms=elapsed_ms,
                at_floor=l2 < floor,
            )
        )
    return ConvergenceReport(problem=problem.name, rows=tuple(rows), error_quad_points=points)


def fitted_decay_rate(report: ConvergenceReport) -> DecayFit:
    """Slope of log10(l2_error) versus N over rows with error above 1e-14.

    A clean exponential decay shows up as a strongly linear semi-log trend
    (r_squared near 1) with a negative slope; constant errors yield slope 0
    with undefined r_squared and are flagged non-convergent.
    """
    usable = [(row.order, math.log10(row.l2_error)) for row in report.rows if row.l2_error > _FIT_ERROR_CUTOFF]
    if len(usable) < 3:
        raise ValueError(
            f"decay fit needs at least 3 rows with error above {_FIT_ERROR_CUTOFF:g}, got {len(usable)}"
        )
    x = np.array([n for n, _ in usable], dtype=float)
    y = np.array([v for _, v in usable])
    x_mean = x.mean()
    y_mean = y.mean()
    sxx = float(((x - x_mean) ** 2).sum())
    sst = float(((y - y_mean) ** 2).sum())
    if sst == 0.0:
        return DecayFit(slope=0.0, r_squared=None, non_convergent=True)
    slope = float(((x - x_mean) * (y - y_mean)).sum()) / sxx
    predicted = y_mean + slope * (x - x_mean)
    ssr = float(((y - predicted) ** 2).sum())
    r_squared = 1.0 - ssr / sst
    return DecayFit(slope=slope, r_squared=r_squared, non_convergent=slope >= 0.0)


def _num(value: float) -> str:
    return format(value, ".16g")


def write_csv(report: ConvergenceReport, path: str) -> None:
    """Delimited export: fixed header, 16 significant digits, newline-terminated."""
    lines = [CSV_HEADER]
    for row in report.rows:
        lines.append(
            f"{row.order},{_num(row.l2_error)},{_num(row.linf_error)},"
            f"{_num(row.condition_estimate)},{_num(row.elapsed_ms)}"
        )
    with open(path, "w", newline="") as handle:
        handle.write("\n".join(lines) + "\n")


def write_json(report: ConvergenceReport, path: str) -> None:
    """JSON export mirroring the report fields."""
    payload = {
        "problem": report.problem,
        "error_quad_points": report.error_quad_points,
        "rows": [asdict(row) for row in report.rows],
    }
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def write_plot_data(report: ConvergenceReport, path: str) -> None:
    """Two-column semi-log plot data: N and log10 of the L2 error."""
    lines = []
    for row in report.rows:
        value = math.log10(max(row.l2_error, 1e-300))
        lines.append(f"{row.order} {_num(value)}")
    with open(path, "w", newline="") as handle:
        handle.write("\n".join(lines) + "\n")
