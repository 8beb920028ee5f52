"""Shifted Jacobi polynomials on [0, 1] and the boundary-vanishing bases.

Trial functions are 2v * J_{i-1}(v) with indexes (0, 1), which vanish at the
origin and so satisfy the homogeneous initial condition by construction; the
test functions are the plain (0, 1) Jacobi polynomials.  Pointwise values
always come from the three-term recurrence.  The monomial form exists only
because the fractional-image table is assembled monomial by monomial: it is
exponentially ill-conditioned in the degree and must never be used for
ordinary evaluation.

All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MonomialCoeffs",
    "CONDITIONING_LIMIT",
    "jacobi_eval",
    "jacobi_eval_all",
    "gjp_trial_eval",
    "gjp_test_eval",
    "gjp_trial_monomials",
    "compensated_horner",
]

# Past this coefficient magnitude, downstream cancellation in doubles starts
# to eat the available precision; results are still produced but flagged.
CONDITIONING_LIMIT = 1e15


@dataclass(frozen=True)
class MonomialCoeffs:
    """Coefficients of sum_k coeffs[k] * v**k, trailing coefficient nonzero."""

    coeffs: tuple[float, ...]
    conditioning_warning: bool = False

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def _check_indexes(alpha: float, beta: float) -> None:
    if alpha <= -1.0 or beta <= -1.0:
        raise ValueError(f"Jacobi indexes must exceed -1, got alpha={alpha:g}, beta={beta:g}")


def jacobi_eval(n: int, alpha: float, beta: float, v: float) -> float:
    """Shifted Jacobi polynomial of degree n at v in [0, 1], by recurrence."""
    _check_indexes(alpha, beta)
    if n < 0:
        raise ValueError(f"polynomial degree must be non-negative, got n={n}")
    s = 2.0 * v - 1.0
    if n == 0:
        return 1.0
    p_prev = 1.0
    p = 0.5 * (alpha + beta + 2.0) * s + 0.5 * (alpha - beta)
    for k in range(2, n + 1):
        c1 = 2.0 * k * (k + alpha + beta) * (2.0 * k + alpha + beta - 2.0)
        c2 = (2.0 * k + alpha + beta - 1.0) * (alpha * alpha - beta * beta)
        c3 = (2.0 * k + alpha + beta - 2.0) * (2.0 * k + alpha + beta - 1.0) * (2.0 * k + alpha + beta)
        c4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + alpha + beta)
        p_prev, p = p, ((c2 + c3 * s) * p - c4 * p_prev) / c1
    return p


def jacobi_eval_all(n_max: int, alpha: float, beta: float, v: np.ndarray) -> np.ndarray:
    """All shifted Jacobi values of degree 0..n_max at the points v.

    Returns an array of shape (n_max + 1, len(v)); row n holds degree n.
    """
    _check_indexes(alpha, beta)
    if n_max < 0:
        raise ValueError(f"polynomial degree must be non-negative, got n={n_max}")
    v = np.asarray(v, dtype=float)
    s = 2.0 * v - 1.0
    out = np.empty((n_max + 1, s.size))
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 0.5 * (alpha + beta + 2.0) * s + 0.5 * (alpha - beta)
    for k in range(2, n_max + 1):
        c1 = 2.0 * k * (k + alpha + beta) * (2.0 * k + alpha + beta - 2.0)
        c2 = (2.0 * k + alpha + beta - 1.0) * (alpha * alpha - beta * beta)
        c3 = (2.0 * k + alpha + beta - 2.0) * (2.0 * k + alpha + beta - 1.0) * (2.0 * k + alpha + beta)
        c4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + alpha + beta)
        out[k] = ((c2 + c3 * s) * out[k - 1] - c4 * out[k - 2]) / c1
    return out


def gjp_trial_eval(i: int, v: float) -> float:
    """Trial basis function number i (i >= 1); vanishes at v = 0."""
    if i < 1:
        raise ValueError(f"trial index must be at least 1, got i={i}")
    return 2.0 * v * jacobi_eval(i - 1, 0.0, 1.0, v)


def gjp_test_eval(i: int, v: float) -> float:
    """Test function number i (i >= 1): the (0, 1) Jacobi polynomial of degree i-1."""
    if i < 1:
        raise ValueError(f"test index must be at least 1, got i={i}")
    return jacobi_eval(i - 1, 0.0, 1.0, v)


def gjp_trial_monomials(i: int) -> MonomialCoeffs:
    """Exact monomial coefficients of trial function i.

    The coefficient of v**(k+1) is 2 * (-1)**(i-1-k) * (i+k)! / ((k+1)! (i-1-k)! k!),
    an integer equal to 2 * C(i+k, k+1) * C(i-1, k); it is formed exactly in
    integer arithmetic and rounded once on conversion to float.
    """
    if i < 1:
        raise ValueError(f"trial index must be at least 1, got i={i}")
    coeffs = [0.0]
    largest = 0.0
    for k in range(i):
        magnitude = 2 * math.comb(i + k, k + 1) * math.comb(i - 1, k)
        try:
            value = float(magnitude)
        except OverflowError:
            raise OverflowError(
                f"monomial coefficient of trial function {i} exceeds double range"
            ) from None
        if (i - 1 - k) % 2:
            value = -value
        coeffs.append(value)
        largest = max(largest, abs(value))
    return MonomialCoeffs(coeffs=tuple(coeffs), conditioning_warning=largest > CONDITIONING_LIMIT)


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


_SPLITTER = 134217729.0  # 2**27 + 1


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def compensated_horner(coeffs: tuple[float, ...], v: float) -> float:
    """Evaluate sum_k coeffs[k] * v**k as if carried in twice the precision.

    Error-free transformations track the rounding residue of every product
    and sum, which tames the alternating-sign cancellation of high-degree
    monomial forms.
    """
    if not coeffs:
        return 0.0
    acc = coeffs[-1]
    err = 0.0
    for c in reversed(coeffs[:-1]):
        prod, perr = _two_prod(acc, v)
        acc, serr = _two_sum(prod, c)
        err = err * v + (perr + serr)
    return acc + err
