"""Closed-form images of the trial basis under the transformed fractional operator.

In the regularized variable, the fractional derivative maps the monomial
v**(k+1) to mu(k, q) * v**k with mu(k, q) = Gamma(q(k+1) + 1) / Gamma(qk + 1).
Scaling the exact monomial coefficients of each trial function by these
factors yields its polynomial image of degree one less, tabulated once per
(order, q) pair.  Tables are immutable after construction and every
operation is re-entrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .basis import MonomialCoeffs, compensated_horner, gjp_trial_monomials
from .specialfn import GAMMA_OVERFLOW, gamma, log_gamma

__all__ = ["PsiTable", "caputo_monomial_image", "psi_table", "psi_eval"]


@dataclass(frozen=True)
class PsiTable:
    """Fractional images of trial functions 1..size; row j has degree j-1."""

    q: float
    size: int
    rows: tuple[MonomialCoeffs, ...]
    conditioning_warning: bool = False


def _check_order(q: float) -> None:
    if not 0.0 < q < 1.0:
        raise ValueError(f"fractional order q must lie in (0, 1), got {q!r}")


def caputo_monomial_image(k: int, q: float) -> float:
    """The factor carrying v**(k+1) to its fractional image mu * v**k.

    Computed as the ratio Gamma(q(k+1) + 1) / Gamma(qk + 1); arguments beyond
    the finite range of gamma fall back to the log-gamma difference, which
    never overflows.
    """
    _check_order(q)
    if k < 0:
        raise ValueError(f"monomial degree offset must be non-negative, got k={k}")
    a = q * k + q + 1.0
    b = q * k + 1.0
    if a <= GAMMA_OVERFLOW:
        return gamma(a) / gamma(b)
    return math.exp(log_gamma(a) - log_gamma(b))


def psi_table(order: int, q: float) -> PsiTable:
    """Images of trial functions 1..order under the fractional operator."""
    _check_order(q)
    if order < 1:
        raise ValueError(f"table size must be at least 1, got {order}")
    factors = [caputo_monomial_image(k, q) for k in range(order)]
    rows = []
    warned = False
    for j in range(1, order + 1):
        trial = gjp_trial_monomials(j)
        coeffs = tuple(trial.coeffs[k + 1] * factors[k] for k in range(j))
        if not all(math.isfinite(c) for c in coeffs):
            raise OverflowError(f"fractional image of trial function {j} is not finite")
        warned = warned or trial.conditioning_warning
        rows.append(MonomialCoeffs(coeffs=coeffs, conditioning_warning=trial.conditioning_warning))
    return PsiTable(q=q, size=order, rows=tuple(rows), conditioning_warning=warned)


def psi_eval(table: PsiTable, j: int, v: float) -> float:
    """Row j of the table evaluated at v by compensated Horner."""
    if not 1 <= j <= table.size:
        raise IndexError(f"row index {j} outside 1..{table.size}")
    return compensated_horner(table.rows[j - 1].coeffs, v)
