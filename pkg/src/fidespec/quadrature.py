"""Shifted Gauss-Legendre quadrature on [0, 1] and the discrete inner product.

Rules are built by Newton iteration on the Legendre three-term recurrence
and cached per point count for the life of the process.  Construction is
pure and cached rules are immutable, so they can be shared freely across
threads; the first construction for a given count is lock-protected.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["QuadratureRule", "legendre_gauss", "integrate", "discrete_inner"]

_NEWTON_TOL = 1e-15
_NEWTON_MAX_ITER = 50


@dataclass(frozen=True)
class QuadratureRule:
    """An n-point Gauss-Legendre rule mapped to [0, 1].

    Nodes are strictly increasing and interior, weights are positive and
    sum to 1 (the length of the interval); node[i] + node[n-1-i] = 1.
    """

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def points(self) -> int:
        return self.nodes.size


def _legendre_with_derivative(n: int, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_n and P_n' on [-1, 1] via the three-term recurrence, vectorised."""
    p_prev = np.ones_like(s)
    p = s.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * s * p - (k - 1) * p_prev) / k
    dp = n * (p_prev - s * p) / (1.0 - s * s)
    return p, dp


def _build_rule(n: int) -> QuadratureRule:
    i = np.arange(1, n + 1, dtype=float)
    s = np.cos(math.pi * (4.0 * i - 1.0) / (4.0 * n + 2.0))
    for _ in range(_NEWTON_MAX_ITER):
        p, dp = _legendre_with_derivative(n, s)
        step = p / dp
        s -= step
        if np.max(np.abs(step)) < _NEWTON_TOL:
            break
    else:
        raise RuntimeError(f"root search for the {n}-point Gauss rule did not converge")
    s = np.sort(s)
    s = 0.5 * (s - s[::-1])  # exact symmetry about the origin
    _, dp = _legendre_with_derivative(n, s)
    w = 2.0 / ((1.0 - s * s) * dp * dp)
    w = 0.5 * (w + w[::-1])
    nodes = 0.5 * (s + 1.0)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights)


_cache: dict[int, QuadratureRule] = {}
_cache_lock = threading.Lock()


def legendre_gauss(n: int) -> QuadratureRule:
    """The cached n-point rule on [0, 1]; exact for polynomials of degree 2n-1."""
    n = int(n)
    if n < 1:
        raise ValueError(f"a quadrature rule needs at least one point, got n={n}")
    rule = _cache.get(n)
    if rule is None:
        with _cache_lock:
            rule = _cache.get(n)
            if rule is None:
                rule = _build_rule(n)
                _cache[n] = rule
    return rule


def integrate(rule: QuadratureRule, f: Callable[[float], float]) -> float:
    """Sum of weight_k * f(node_k)."""
    values = np.array([f(x) for x in rule.nodes.tolist()], dtype=float)
    return float(np.dot(rule.weights, values))


def discrete_inner(
    rule: QuadratureRule,
    f: Callable[[float], float],
    g: Callable[[float], float],
) -> float:
    """Discrete inner product of f and g under the rule (unit weight)."""
    values = np.array([f(x) * g(x) for x in rule.nodes.tolist()], dtype=float)
    return float(np.dot(rule.weights, values))
