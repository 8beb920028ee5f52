"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline.
"""

import csv
import math
import time

import numpy as np
import pytest

import support
from test_fracops import _csc_form_coefficients, _singular_integral_oracle

from fidespec.analysis import ConvergenceReport, ConvergenceRow, fitted_decay_rate, l2_error
from fidespec.cli import main
from fidespec.fracops import psi_eval, psi_table
from fidespec.galerkin import (
    Problem,
    assemble,
    eval_solution,
    lu_solve,
    reduce_nonhomogeneous,
    row_residuals,
    solve,
    transform_problem,
)
from fidespec.quadrature import integrate, legendre_gauss

SQRT_PI = math.sqrt(math.pi)

BENCHMARK_ORDERS = list(range(2, 17, 2))
BENCHMARK_BOUNDS = {
    2: 2e-2,
    4: 5e-4,
    6: 3e-5,
    8: 2e-7,
    10: 5e-9,
    12: 5e-11,
    14: 1e-12,
    16: 1e-12,
}


@pytest.fixture(scope="module")
def benchmark(tmp_path_factory):
    """The benchmark sweep, run through the converge CLI workflow."""
    out = tmp_path_factory.mktemp("acceptance") / "table.csv"
    start = time.perf_counter()
    code = main(
        ["converge", "--problem", str(support.SIN_SQRT), "--orders", "2:16:2", "--csv", str(out)]
    )
    elapsed = time.perf_counter() - start
    assert code == 0
    rows = []
    with open(out, newline="") as handle:
        for record in csv.DictReader(handle):
            rows.append(
                ConvergenceRow(
                    order=int(record["N"]),
                    l2_error=float(record["l2_error"]),
                    linf_error=float(record["linf_error"]),
                    condition_estimate=float(record["cond_estimate"]),
                    elapsed_ms=float(record["elapsed_ms"]),
                )
            )
    report = ConvergenceReport(problem="sin_sqrt", rows=tuple(rows), error_quad_points=200)
    return support.sin_sqrt_problem(), report, elapsed


def _emit(number: int, name: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} {name}: {status} ({detail})")


def test_criterion_1_benchmark_table(benchmark):
    _, report, elapsed = benchmark
    rows = {row.order: row.l2_error for row in report.rows}
    misses = [
        f"e({order})={rows[order]:.3e}>{bound:.0e}"
        for order, bound in BENCHMARK_BOUNDS.items()
        if rows[order] > bound
    ]
    detail = ", ".join(f"e({order})={rows[order]:.2e}" for order in BENCHMARK_ORDERS)
    ok = not misses and elapsed < 1.0
    _emit(1, "benchmark error table", ok, f"{detail}; sweep {elapsed * 1e3:.0f} ms")
    assert elapsed < 1.0, f"sweep took {elapsed:.2f}s"
    assert not misses, f"error bounds exceeded: {'; '.join(misses)}"


def test_criterion_2_exponential_decay(benchmark):
    _, report, _ = benchmark
    fit = fitted_decay_rate(report)
    ok = fit.slope <= -0.75 and fit.r_squared is not None and fit.r_squared >= 0.97
    _emit(2, "exponential decay", ok, f"slope={fit.slope:.3f}, R^2={fit.r_squared:.4f}")
    assert fit.slope <= -0.75
    assert fit.r_squared >= 0.97


def test_criterion_3_closed_form_solve():
    problem = Problem(
        name="half-derivative-of-one",
        q=0.5,
        lam=0.0,
        p=lambda x: 0.0,
        f=lambda x: 1.0,
        kernel=lambda x, t: 0.0,
    )
    system = assemble(transform_problem(problem), 1, psi_table(1, 0.5))
    sol = solve(problem, 1)
    worst = max(
        abs(eval_solution(sol, i / 100) - 2.0 * math.sqrt(i / 100) / SQRT_PI)
        for i in range(1, 101)
    )
    matrix_ok = abs(system.matrix[0, 0] - SQRT_PI) <= 1e-13 and system.rhs[0] == pytest.approx(1.0, abs=1e-15)
    ok = worst <= 1e-14 and matrix_ok
    _emit(3, "closed-form solve", ok, f"max err={worst:.2e}, A=[[{system.matrix[0, 0]:.12f}]]")
    assert matrix_ok
    assert worst <= 1e-14


def test_criterion_4_operator_image_oracles():
    worst_dual = 0.0
    for q in (0.1, 0.3, 0.5, 0.7, 0.9):
        table = psi_table(15, q)
        for j in range(1, 16):
            literal = _csc_form_coefficients(j, q)
            for ours, reference in zip(table.rows[j - 1].coeffs, literal):
                worst_dual = max(worst_dual, abs(ours - reference) / abs(reference))
    worst_quad = 0.0
    for q in (0.3, 0.5):
        table = psi_table(6, q)
        for j in range(1, 7):
            for v in (0.2, 0.5, 0.9):
                reference = _singular_integral_oracle(j, q, v)
                worst_quad = max(worst_quad, abs(psi_eval(table, j, v) - reference) / abs(reference))
    ok = worst_dual <= 1e-11 and worst_quad <= 1e-6
    _emit(4, "operator-image oracles", ok, f"dual rel={worst_dual:.2e}, quadrature rel={worst_quad:.2e}")
    assert worst_dual <= 1e-11
    assert worst_quad <= 1e-6


def test_criterion_5_quadrature_correctness():
    worst_monomial = 0.0
    for n in range(1, 21):
        rule = legendre_gauss(n)
        for m in range(0, 2 * n):
            worst_monomial = max(
                worst_monomial, abs(integrate(rule, lambda v, m=m: v**m) - 1.0 / (m + 1))
            )
    worst_sum = 0.0
    worst_symmetry = 0.0
    for n in range(1, 257):
        rule = legendre_gauss(n)
        worst_sum = max(worst_sum, abs(float(rule.weights.sum()) - 1.0))
        worst_symmetry = max(worst_symmetry, float(np.max(np.abs(rule.nodes + rule.nodes[::-1] - 1.0))))
    ok = worst_monomial <= 1e-13 and worst_sum <= 1e-14 and worst_symmetry <= 1e-14
    _emit(
        5,
        "quadrature correctness",
        ok,
        f"monomial={worst_monomial:.2e}, weight sum={worst_sum:.2e}, symmetry={worst_symmetry:.2e}",
    )
    assert worst_monomial <= 1e-13
    assert worst_sum <= 1e-14
    assert worst_symmetry <= 1e-14


def test_criterion_6_manufactured_superconvergence():
    worst = 0.0
    for q in (0.3, 0.5):
        for m in (1, 2, 3):
            problem = support.manufactured_problem(q, m)
            sol = solve(problem, max(m, 2))
            worst = max(worst, l2_error(sol, problem.exact))
    ok = worst <= 1e-12
    _emit(6, "manufactured superconvergence", ok, f"worst L2={worst:.2e}")
    assert worst <= 1e-12


def test_criterion_7_galerkin_residual(benchmark):
    problem, _, _ = benchmark
    cases = [(problem, order) for order in BENCHMARK_ORDERS]
    cases.append(
        (
            Problem(
                name="half-derivative-of-one",
                q=0.5,
                lam=0.0,
                p=lambda x: 0.0,
                f=lambda x: 1.0,
                kernel=lambda x, t: 0.0,
            ),
            1,
        )
    )
    for q in (0.3, 0.5):
        for m in (1, 2, 3):
            cases.append((support.manufactured_problem(q, m), max(m, 2)))
    worst = 0.0
    for case_problem, order in cases:
        reduced = reduce_nonhomogeneous(case_problem)
        tp = transform_problem(reduced)
        system = assemble(tp, order, psi_table(order, reduced.q))
        coefficients, _ = lu_solve(system)
        gaps = row_residuals(system, coefficients)
        for gap, rhs in zip(gaps, system.rhs):
            worst = max(worst, gap / (1.0 + abs(rhs)))
    ok = worst <= 1e-10
    _emit(7, "Galerkin row residuals", ok, f"worst relative residual={worst:.2e}")
    assert worst <= 1e-10
