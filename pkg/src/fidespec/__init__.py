"""Spectral Galerkin solver for initial-value fractional integro-differential equations.

The library solves D^q u(x) = p(x) u(x) + f(x) + lambda * int_0^x K(x, t) u(t) dt
with u(0) = d on [0, 1] for 0 < q < 1 (Caputo derivative), by a Galerkin
scheme in the regularized variable v = x**q with a boundary-vanishing
Jacobi-type trial basis.  Smooth transformed solutions converge
exponentially in the approximation order.

Main entry points:

- :func:`fidespec.galerkin.solve` - solve one problem at a given order
- :func:`fidespec.analysis.convergence_sweep` - error table over orders
- :mod:`fidespec.cli` - the ``fidespec`` command line front end
"""

from .analysis import (
    ConvergenceReport,
    ConvergenceRow,
    DecayFit,
    convergence_sweep,
    fitted_decay_rate,
    l2_error,
    linf_error,
)
from .expr import eval_expr, free_vars, parse, to_source, tokenize
from .galerkin import (
    Problem,
    SpectralSolution,
    eval_solution,
    eval_transformed,
    solve,
)
from .quadrature import QuadratureRule, discrete_inner, integrate, legendre_gauss

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ConvergenceReport",
    "ConvergenceRow",
    "DecayFit",
    "Problem",
    "QuadratureRule",
    "SpectralSolution",
    "convergence_sweep",
    "discrete_inner",
    "eval_expr",
    "eval_solution",
    "eval_transformed",
    "fitted_decay_rate",
    "free_vars",
    "integrate",
    "l2_error",
    "legendre_gauss",
    "linf_error",
    "parse",
    "solve",
    "to_source",
    "tokenize",
]
