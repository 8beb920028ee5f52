"""Command line front end: problem files, solving, convergence reports, rule inspection.

Exit codes: 0 on success, 1 for runtime or solve failures, 2 for argument
and usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import analysis, galerkin, quadrature
from . import expr as expr_mod
from .basis import compensated_horner, gjp_trial_eval, gjp_test_eval, gjp_trial_monomials
from .fracops import psi_table

__all__ = ["ProblemFileError", "load_problem", "main"]

ENV_ERROR_QUAD_POINTS = "FIDE_ERROR_QUAD_POINTS"

_REQUIRED_MEMBERS = ("name", "q", "lambda", "p", "f", "kernel")
_OPTIONAL_MEMBERS = ("d", "exact")


class ProblemFileError(ValueError):
    """A problem file failed schema or expression validation."""


def _require_number(doc: dict, member: str) -> float:
    value = doc[member]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemFileError(f"member '{member}' must be a number, got {value!r}")
    return float(value)


def _require_text(doc: dict, member: str) -> str:
    value = doc[member]
    if not isinstance(value, str):
        raise ProblemFileError(f"member '{member}' must be a string, got {value!r}")
    return value


def _parse_member(doc: dict, member: str, variables: set[str]) -> expr_mod.Expr:
    source = _require_text(doc, member)
    try:
        return expr_mod.parse(source, variables)
    except expr_mod.ExprError as err:
        raise ProblemFileError(f"member '{member}': {err}") from None


def _fn_of_x(tree: expr_mod.Expr):
    def fn(x: float) -> float:
        return expr_mod.eval_expr(tree, {"x": x})

    return fn


def _fn_of_xt(tree: expr_mod.Expr):
    def fn(x: float, t: float) -> float:
        return expr_mod.eval_expr(tree, {"x": x, "t": t})

    return fn


def load_problem(path: str) -> galerkin.Problem:
    """Read and validate a JSON problem file."""
    try:
        with open(path) as handle:
            text = handle.read()
    except OSError as err:
        raise ProblemFileError(f"cannot read problem file: {err}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ProblemFileError(f"invalid JSON in {path}: {err}") from None
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must hold a JSON object")
    unknown = sorted(set(doc) - set(_REQUIRED_MEMBERS) - set(_OPTIONAL_MEMBERS))
    if unknown:
        raise ProblemFileError(f"unknown member(s): {', '.join(unknown)}")
    missing = sorted(set(_REQUIRED_MEMBERS) - set(doc))
    if missing:
        raise ProblemFileError(f"missing member(s): {', '.join(missing)}")

    name = _require_text(doc, "name")
    q = _require_number(doc, "q")
    if not 0.0 < q < 1.0:
        raise ProblemFileError(f"member 'q' must lie in the open interval (0, 1), got {q:g}")
    lam = _require_number(doc, "lambda")
    d = _require_number(doc, "d") if "d" in doc else 0.0

    p_fn = _fn_of_x(_parse_member(doc, "p", {"x"}))
    f_fn = _fn_of_x(_parse_member(doc, "f", {"x"}))
    kernel_fn = _fn_of_xt(_parse_member(doc, "kernel", {"x", "t"}))
    exact_fn = _fn_of_x(_parse_member(doc, "exact", {"x"})) if "exact" in doc else None

    return galerkin.Problem(
        name=name, q=q, lam=lam, p=p_fn, f=f_fn, kernel=kernel_fn, d=d, exact=exact_fn
    )


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _orders_spec(text: str) -> list[int]:
    """Parse 'a:b:s' (inclusive range) or a comma-separated list of orders."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise argparse.ArgumentTypeError(f"order range must be start:stop:step, got {text!r}")
            start, stop, step = (int(p) for p in parts)
            if step < 1:
                raise argparse.ArgumentTypeError(f"order range step must be positive, got {step}")
            orders = list(range(start, stop + 1, step))
        else:
            orders = [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed orders spec {text!r}") from None
    if not orders:
        raise argparse.ArgumentTypeError(f"orders spec {text!r} yields an empty range")
    if min(orders) < 1:
        raise argparse.ArgumentTypeError("approximation orders must be at least 1")
    return orders


def _resolve_error_points() -> int:
    raw = os.environ.get(ENV_ERROR_QUAD_POINTS)
    if raw is None:
        return analysis.DEFAULT_ERROR_QUAD_POINTS
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        print(
            f"warning: ignoring invalid {ENV_ERROR_QUAD_POINTS}={raw!r}; "
            f"using {analysis.DEFAULT_ERROR_QUAD_POINTS}",
            file=sys.stderr,
        )
        return analysis.DEFAULT_ERROR_QUAD_POINTS
    return value


def _cmd_solve(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    solution = galerkin.solve(problem, args.order)
    print(
        f"N={args.order} residual={solution.residual:.6e} "
        f"cond={solution.condition_estimate:.6e}"
    )
    if args.output is not None:
        payload = {
            "name": problem.name,
            "q": problem.q,
            "lambda": problem.lam,
            "N": args.order,
            "coefficients": [float(c) for c in solution.coefficients],
            "residual": solution.residual,
            "condition_estimate": solution.condition_estimate,
        }
        if args.grid is not None:
            xs = [i / args.grid for i in range(1, args.grid + 1)]
            payload["x"] = xs
            payload["u"] = [galerkin.eval_solution(solution, x) for x in xs]
        with open(args.output, "w") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    return 0


def _cmd_converge(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    report = analysis.convergence_sweep(problem, args.orders, error_points=_resolve_error_points())
    print("   N  l2_error")
    for row in report.rows:
        print(f"{row.order:4d}  {row.l2_error:.2e}")
    if args.csv is not None:
        analysis.write_csv(report, args.csv)
    if args.json is not None:
        analysis.write_json(report, args.json)
    if args.plot is not None:
        analysis.write_plot_data(report, args.plot)
    if args.figure is not None:
        from . import plotting  # deferred: pulls in matplotlib

        plotting.render_convergence_figure(report, args.figure)
    return 0


def _cmd_rule(args: argparse.Namespace) -> int:
    rule = quadrature.legendre_gauss(args.points)
    for node, weight in zip(rule.nodes.tolist(), rule.weights.tolist()):
        print(f"{node:.16g} {weight:.16g}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    failures = 0

    def report(label: str, fn) -> None:
        nonlocal failures
        try:
            fn()
        except Exception as err:
            failures += 1
            print(f"FAIL {label}: {err}")
        else:
            print(f"PASS {label}")

    try:
        problem = load_problem(args.problem)
    except ProblemFileError as err:
        print(f"FAIL schema: {err}")
        return 1
    print(f"PASS schema: problem '{problem.name}' (q={problem.q:g}, lambda={problem.lam:g})")

    def basis_vanishing():
        for i in range(1, 65):
            if gjp_trial_eval(i, 0.0) != 0.0:
                raise AssertionError(f"trial function {i} does not vanish at v=0")

    def basis_duality():
        for k in range(1, 21):
            v = k / 21.0
            for i in (1, 2, 5, 9):
                got = gjp_trial_eval(i, v)
                want = 2.0 * v * gjp_test_eval(i, v)
                if got != want:
                    raise AssertionError(f"trial/test duality broken at i={i}, v={v:g}")

    def basis_monomial_consistency():
        for i in range(1, 11):
            mono = gjp_trial_monomials(i)
            for k in range(1, 20):
                v = k / 20.0
                direct = gjp_trial_eval(i, v)
                horner = compensated_horner(mono.coeffs, v)
                if abs(direct - horner) > 1e-10 * max(1.0, abs(direct)):
                    raise AssertionError(f"monomial form of trial {i} diverges at v={v:g}")

    def transform_finite():
        reduced = galerkin.reduce_nonhomogeneous(problem)
        tp = galerkin.transform_problem(reduced)
        for k in range(1, 8):
            v = k / 8.0
            values = [tp.pbar(v), tp.fbar(v), tp.ktilde(v, 0.5 * v)]
            if not all(math.isfinite(value) for value in values):
                raise AssertionError(f"non-finite transformed data at v={v:g}")

    def assembly_finite():
        reduced = galerkin.reduce_nonhomogeneous(problem)
        tp = galerkin.transform_problem(reduced)
        galerkin.assemble(tp, 2, psi_table(2, reduced.q))  # raises on non-finite entries

    def solve_small():
        solution = galerkin.solve(problem, 2)
        if not all(math.isfinite(c) for c in solution.coefficients):
            raise AssertionError("non-finite coefficients")

    report("basis: trial functions vanish at v=0 (i <= 64)", basis_vanishing)
    report("basis: trial/test duality at sample points", basis_duality)
    report("basis: monomial form matches recurrence (i <= 10)", basis_monomial_consistency)
    report("transform: data finite at sample points", transform_finite)
    report("assembly: N=2 system entries finite", assembly_finite)
    report("solve: N=2 solution finite", solve_small)
    return 1 if failures else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fidespec",
        description=(
            "Spectral Galerkin solver for initial-value fractional "
            "integro-differential equations on [0, 1]"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem at one approximation order")
    p_solve.add_argument("--problem", required=True, help="path to a JSON problem file")
    p_solve.add_argument("--order", required=True, type=_positive_int, help="approximation order N")
    p_solve.add_argument("--output", help="write the solution as JSON to this path")
    p_solve.add_argument(
        "--grid", type=_positive_int, help="sample the solution at this many equispaced points"
    )
    p_solve.set_defaults(handler=_cmd_solve)

    p_conv = sub.add_parser("converge", help="run a convergence sweep over orders")
    p_conv.add_argument("--problem", required=True, help="path to a JSON problem file")
    p_conv.add_argument(
        "--orders", required=True, type=_orders_spec, help="orders as a:b:s or a comma list"
    )
    p_conv.add_argument("--csv", help="write the report as CSV to this path")
    p_conv.add_argument("--json", help="write the report as JSON to this path")
    p_conv.add_argument("--plot", help="write two-column semi-log plot data to this path")
    p_conv.add_argument("--figure", help="render the semi-log convergence figure to this path")
    p_conv.set_defaults(handler=_cmd_converge)

    p_rule = sub.add_parser("rule", help="print quadrature nodes and weights")
    p_rule.add_argument("--points", required=True, type=_positive_int, help="number of points")
    p_rule.set_defaults(handler=_cmd_rule)

    p_check = sub.add_parser("check", help="validate a problem file and run self-tests")
    p_check.add_argument("--problem", required=True, help="path to a JSON problem file")
    p_check.set_defaults(handler=_cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ProblemFileError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # keep the exit-code contract for solver failures
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
