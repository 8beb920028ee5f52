"""Shared fixtures-in-plain-python for the test suite."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from fidespec.cli import load_problem
from fidespec.fracops import caputo_monomial_image
from fidespec.galerkin import Problem

PROBLEMS_DIR = Path(__file__).resolve().parent.parent / "problems"

# Headline benchmark: q=1/2, lambda=1/2, p=1, kernel sqrt(x t),
# exact solution sin(x)/sqrt(x).
SIN_SQRT = PROBLEMS_DIR / "sin_sqrt.json"
SQRT_IDENTITY = PROBLEMS_DIR / "sqrt_identity.json"
POLY_KERNEL = PROBLEMS_DIR / "poly_kernel.json"


def sin_sqrt_problem() -> Problem:
    return load_problem(str(SIN_SQRT))


def manufactured_problem(q: float, m: int, lam: float = 0.5) -> Problem:
    """Problem whose transformed exact solution is v**m with polynomial data.

    Constructed backwards from u(x) = x**(q m) with p = 1 and a kernel whose
    transformed image is identically 1, so the forcing in the transformed
    variable is mu * v**(m-1) - v**m - lam * v**(m+1) / (m+1).
    """
    mu = caputo_monomial_image(m - 1, q)

    def p_fn(x: float) -> float:
        return 1.0

    def kernel_fn(x: float, t: float, q=q) -> float:
        return q * t ** (q - 1.0)

    def f_fn(x: float, mu=mu, q=q, m=m, lam=lam) -> float:
        return mu * x ** (q * (m - 1)) - x ** (q * m) - lam * x ** (q * (m + 1)) / (m + 1)

    def exact_fn(x: float, q=q, m=m) -> float:
        return x ** (q * m)

    return Problem(
        name=f"manufactured-v{m}-q{q:g}",
        q=q,
        lam=lam,
        p=p_fn,
        f=f_fn,
        kernel=kernel_fn,
        exact=exact_fn,
    )


def random_polynomial_problem(rng: np.random.Generator) -> Problem:
    """Random smooth problem with polynomial data and d = 0 (no exact solution)."""
    q = float(rng.uniform(0.1, 0.9))
    lam = float(rng.uniform(-1.0, 1.0))
    pc = rng.uniform(-1.0, 1.0, size=3)
    fc = rng.uniform(-1.0, 1.0, size=3)
    kc = rng.uniform(-1.0, 1.0, size=2)

    def p_fn(x: float, pc=pc) -> float:
        return float(pc[0] + pc[1] * x + pc[2] * x * x)

    def f_fn(x: float, fc=fc) -> float:
        return float(fc[0] + fc[1] * x + fc[2] * x * x)

    def kernel_fn(x: float, t: float, kc=kc) -> float:
        return float(kc[0] + kc[1] * x * t)

    return Problem(name="random-poly", q=q, lam=lam, p=p_fn, f=f_fn, kernel=kernel_fn)
