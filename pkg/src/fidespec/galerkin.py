"""Fractional integro-differential problems and their discrete Galerkin solution.

The pipeline: fold a nonzero initial value into the forcing term, change
variables x = v**(1/q) so the solution becomes smooth, build the
fractional-image table for the trial basis, assemble the linear system with
a shared Gauss rule, and solve it by dense LU with partial pivoting.

Problem data are plain callables; they are never evaluated at the origin
(every quadrature node is interior), so removable endpoint singularities in
the data need no special casing - this is a hard contract of the module.
All operations are pure with value semantics; solves for different orders
can run fully in parallel, sharing only the immutable quadrature-rule cache.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import gjp_trial_eval, jacobi_eval_all
from .fracops import PsiTable, psi_eval, psi_table
from .quadrature import QuadratureRule, legendre_gauss

__all__ = [
    "Problem",
    "TransformedProblem",
    "GalerkinSystem",
    "SpectralSolution",
    "SolveDiagnostics",
    "AssemblyError",
    "SingularMatrixError",
    "reduce_nonhomogeneous",
    "transform_problem",
    "kernel_action",
    "assemble",
    "lu_solve",
    "solve",
    "eval_transformed",
    "eval_solution",
    "row_residuals",
]

ScalarFn = Callable[[float], float]
KernelFn = Callable[[float, float], float]

# Rule used once to fold a nonzero initial value into the forcing term;
# independent of the approximation order.
_REDUCTION_RULE_POINTS = 64

# Minimum assembly rule size.  The polynomial terms are exact already at
# N+1 points, but the forcing and kernel products are not: at small N a bare
# (N+1)-point rule leaves data-quadrature errors around 1e-3 that dominate
# the solution error.  24 points resolve smooth data to machine precision.
DATA_RULE_FLOOR = 24

_PIVOT_FLOOR = 1e-300


class AssemblyError(RuntimeError):
    """A system entry came out non-finite."""


class SingularMatrixError(RuntimeError):
    """Elimination hit a pivot indistinguishable from zero."""


@dataclass(frozen=True)
class Problem:
    """One initial-value problem: D^q u = p u + f + lambda * int_0^x K u dt, u(0) = d."""

    name: str
    q: float
    lam: float
    p: ScalarFn
    f: ScalarFn
    kernel: KernelFn
    d: float = 0.0
    exact: Optional[ScalarFn] = None

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"fractional order q must lie in (0, 1), got {self.q!r}")


@dataclass(frozen=True)
class TransformedProblem:
    """Problem data composed with the regularizing substitution x = v**(1/q).

    Evaluation is only ever requested at interior points (v, w in (0, 1)).
    """

    q: float
    lam: float
    pbar: ScalarFn
    fbar: ScalarFn
    ktilde: KernelFn


@dataclass(frozen=True)
class GalerkinSystem:
    order: int
    matrix: np.ndarray
    rhs: np.ndarray
    q: float
    lam: float
    rule_points: int


@dataclass(frozen=True)
class SolveDiagnostics:
    residual: float
    condition_estimate: float


@dataclass(frozen=True)
class SpectralSolution:
    """Galerkin coefficients plus solve diagnostics.

    The transformed expansion vanishes at v = 0 by construction, so the
    initial condition holds exactly for every solution.
    """

    q: float
    order: int
    coefficients: np.ndarray
    residual: float
    condition_estimate: float


def reduce_nonhomogeneous(problem: Problem) -> Problem:
    """Fold a nonzero initial value d into the forcing term.

    Returns the problem unchanged when d = 0; otherwise shifts the unknown
    by -d, which adds d * (p(x) + lambda * int_0^x K(x, t) dt) to f.  The
    inner integral uses a fixed 64-point rule, far beyond what smooth
    kernels need.
    """
    if problem.d == 0.0:
        return problem
    d = problem.d
    lam = problem.lam
    p_fn = problem.p
    f_fn = problem.f
    kern = problem.kernel
    rule = legendre_gauss(_REDUCTION_RULE_POINTS)
    theta = rule.nodes.tolist()
    weights = rule.weights.tolist()

    def kernel_row_integral(x: float) -> float:
        return x * math.fsum(kern(x, x * t) * w for t, w in zip(theta, weights))

    def f_shifted(x: float) -> float:
        shift = p_fn(x)
        if lam != 0.0:
            shift += lam * kernel_row_integral(x)
        return f_fn(x) + d * shift

    exact_shifted = None
    if problem.exact is not None:
        exact_fn = problem.exact

        def exact_shifted(x: float) -> float:
            return exact_fn(x) - d

    return Problem(
        name=problem.name,
        q=problem.q,
        lam=lam,
        p=p_fn,
        f=f_shifted,
        kernel=kern,
        d=0.0,
        exact=exact_shifted,
    )


def transform_problem(problem: Problem) -> TransformedProblem:
    """Compose the data with x = v**(1/q); requires a homogeneous initial value."""
    if problem.d != 0.0:
        raise ValueError("transform requires d = 0; apply reduce_nonhomogeneous first")
    q = problem.q
    inv_q = 1.0 / q
    p_fn = problem.p
    f_fn = problem.f
    kern = problem.kernel

    def pbar(v: float) -> float:
        return p_fn(v**inv_q)

    def fbar(v: float) -> float:
        return f_fn(v**inv_q)

    def ktilde(v: float, w: float) -> float:
        return w ** (inv_q - 1.0) / q * kern(v**inv_q, w**inv_q)

    return TransformedProblem(q=q, lam=problem.lam, pbar=pbar, fbar=fbar, ktilde=ktilde)


def kernel_action(tp: TransformedProblem, rule: QuadratureRule, j: int, v: float) -> float:
    """Discrete Volterra image of trial function j at v.

    Scales the rule onto [0, v] through w = v * theta and sums
    K~(v, w_k) * G_j(w_k) * delta_k, times v.
    """
    if v == 0.0:
        return 0.0
    acc = 0.0
    for theta, w in zip(rule.nodes.tolist(), rule.weights.tolist()):
        wk = v * theta
        acc += tp.ktilde(v, wk) * gjp_trial_eval(j, wk) * w
    return v * acc


def assemble(
    tp: TransformedProblem,
    order: int,
    psi: PsiTable,
    rule_points: int | None = None,
) -> GalerkinSystem:
    """Build the order x order discrete Galerkin system.

    Every discrete product uses one shared Gauss rule of
    max(N+1, DATA_RULE_FLOOR) points (overridable through rule_points); the
    fractional-image term is integrated exactly either way since its degree
    stays below the rule's exactness.  The inner kernel loop dominates the
    O(N^3) assembly cost.
    """
    if order < 1:
        raise ValueError(f"system order must be at least 1, got {order}")
    if psi.size != order or psi.q != tp.q:
        raise ValueError(
            f"fractional-image table (size={psi.size}, q={psi.q!r}) does not match "
            f"the requested system (order={order}, q={tp.q!r})"
        )
    points = int(rule_points) if rule_points is not None else max(order + 1, DATA_RULE_FLOOR)
    rule = legendre_gauss(points)
    nodes = rule.nodes
    node_list = nodes.tolist()

    test_vals = jacobi_eval_all(order - 1, 0.0, 1.0, nodes)  # row i-1 holds T_i
    trial_vals = 2.0 * nodes * test_vals  # row j-1 holds G_j
    pbar_vals = np.array([tp.pbar(v) for v in node_list])
    fbar_vals = np.array([tp.fbar(v) for v in node_list])
    psi_vals = np.array([[psi_eval(psi, j, v) for v in node_list] for j in range(1, order + 1)])

    core = psi_vals - pbar_vals * trial_vals
    if tp.lam != 0.0:
        kernel_vals = np.array(
            [[kernel_action(tp, rule, j, v) for v in node_list] for j in range(1, order + 1)]
        )
        core = core - tp.lam * kernel_vals

    weighted_test = test_vals * rule.weights
    with np.errstate(invalid="ignore", over="ignore"):  # diagnosed explicitly below
        matrix = weighted_test @ core.T
        rhs = weighted_test @ fbar_vals

    if not np.all(np.isfinite(matrix)):
        i, j = np.argwhere(~np.isfinite(matrix))[0]
        raise AssemblyError(f"non-finite system entry at row i={i + 1}, column j={j + 1}")
    if not np.all(np.isfinite(rhs)):
        i = int(np.flatnonzero(~np.isfinite(rhs))[0])
        raise AssemblyError(f"non-finite right-hand side entry at row i={i + 1}")

    return GalerkinSystem(
        order=order, matrix=matrix, rhs=rhs, q=tp.q, lam=tp.lam, rule_points=points
    )


def _lu_factor(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lu = np.array(matrix, dtype=float, copy=True)
    n = lu.shape[0]
    perm = np.arange(n)
    for k in range(n):
        pivot = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[pivot, k]) < _PIVOT_FLOOR:
            raise SingularMatrixError(f"matrix is numerically singular (pivot {k + 1})")
        if pivot != k:
            lu[[k, pivot]] = lu[[pivot, k]]
            perm[[k, pivot]] = perm[[pivot, k]]
        lu[k + 1 :, k] /= lu[k, k]
        if k + 1 < n:
            lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, perm


def _lu_apply(lu: np.ndarray, perm: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.asarray(b, dtype=float)[perm].copy()
    n = lu.shape[0]
    for k in range(1, n):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1 :] @ x[k + 1 :]) / lu[k, k]
    return x


def _lu_apply_transpose(lu: np.ndarray, perm: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = lu.shape[0]
    z = np.asarray(b, dtype=float).copy()
    for k in range(n):
        z[k] = (z[k] - lu[:k, k] @ z[:k]) / lu[k, k]
    for k in range(n - 1, -1, -1):
        z[k] -= lu[k + 1 :, k] @ z[k + 1 :]
    y = np.empty_like(z)
    y[perm] = z
    return y


def _condition_estimate(matrix: np.ndarray, lu: np.ndarray, perm: np.ndarray) -> float:
    """1-norm condition estimate from the factors (Hager-style, 5 iterations)."""
    n = matrix.shape[0]
    anorm = float(np.max(np.abs(matrix).sum(axis=0)))
    x = np.full(n, 1.0 / n)
    inv_norm = 0.0
    for _ in range(5):
        y = _lu_apply(lu, perm, x)
        inv_norm = float(np.abs(y).sum())
        sign = np.where(y >= 0.0, 1.0, -1.0)
        z = _lu_apply_transpose(lu, perm, sign)
        j = int(np.argmax(np.abs(z)))
        if abs(z[j]) <= float(z @ x):
            break
        x = np.zeros(n)
        x[j] = 1.0
    return anorm * inv_norm


def lu_solve(system: GalerkinSystem) -> tuple[np.ndarray, SolveDiagnostics]:
    """Dense LU with partial pivoting; returns coefficients and diagnostics."""
    matrix = np.asarray(system.matrix, dtype=float)
    rhs = np.asarray(system.rhs, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"system matrix must be square, got shape {matrix.shape}")
    if rhs.shape != (matrix.shape[0],):
        raise ValueError("right-hand side length does not match the matrix")
    if not np.all(np.isfinite(matrix)) or not np.all(np.isfinite(rhs)):
        raise ValueError("system contains non-finite entries")
    lu, perm = _lu_factor(matrix)
    coefficients = _lu_apply(lu, perm, rhs)
    rnorm = float(np.linalg.norm(matrix @ coefficients - rhs))
    bnorm = float(np.linalg.norm(rhs))
    residual = rnorm / bnorm if bnorm > 0.0 else rnorm
    condition = _condition_estimate(matrix, lu, perm)
    return coefficients, SolveDiagnostics(residual=residual, condition_estimate=condition)


def solve(problem: Problem, order: int) -> SpectralSolution:
    """Run the full pipeline at the given approximation order."""
    if order < 1:
        raise ValueError(f"approximation order must be at least 1, got {order}")
    reduced = reduce_nonhomogeneous(problem)
    tp = transform_problem(reduced)
    table = psi_table(order, reduced.q)
    system = assemble(tp, order, table)
    coefficients, diagnostics = lu_solve(system)
    coefficients.setflags(write=False)
    return SpectralSolution(
        q=reduced.q,
        order=order,
        coefficients=coefficients,
        residual=diagnostics.residual,
        condition_estimate=diagnostics.condition_estimate,
    )


def eval_transformed(solution: SpectralSolution, v: float) -> float:
    """Value of the transformed-variable expansion at v; vanishes at v = 0."""
    v = float(v)
    vals = jacobi_eval_all(solution.order - 1, 0.0, 1.0, np.array([v]))
    return float(2.0 * v * (solution.coefficients @ vals[:, 0]))


def eval_solution(solution: SpectralSolution, x: float) -> float:
    """Value of the numerical solution at x in [0, 1]: the expansion at v = x**q."""
    return eval_transformed(solution, float(x) ** solution.q)


def row_residuals(system: GalerkinSystem, coefficients: np.ndarray) -> np.ndarray:
    """|A a - b| row by row, for residual-orthogonality checks."""
    return np.abs(system.matrix @ np.asarray(coefficients, dtype=float) - system.rhs)
