"""Concrete first-order methods and a runner for any coefficient schedule.

Every schedule uses the same convention: momentum ``a_t - 1`` multiplies
``x_{t-1} - x_{t-2}`` and the (negative) step ``b_t`` multiplies the gradient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator

import numpy as np
from numpy.typing import NDArray

from .errors import DomainError, NumericalError
from .orthopoly import MethodCoefficients

if TYPE_CHECKING:
    from .experiments import QuadraticProblem

DIVERGENCE_FACTOR = 1e12


def polyak_rate(lower: float, upper: float) -> float:
    """Polyak momentum ``((sqrt L - sqrt l) / (sqrt L + sqrt l))**2``; also its asymptotic rate."""
    sl, su = math.sqrt(lower), math.sqrt(upper)
    return ((su - sl) / (su + sl)) ** 2


def polyak_coefficients(lower: float, upper: float, T: int) -> MethodCoefficients:
    """Heavy-ball schedule from the spectrum edges. ``lower == upper`` is allowed."""
    if lower <= 0:
        raise DomainError(f"lower edge must be positive, got {lower}")
    if upper < lower:
        raise DomainError("upper edge must not be below lower edge")
    sl, su = math.sqrt(lower), math.sqrt(upper)
    momentum = ((su - sl) / (su + sl)) ** 2
    step = -((2.0 / (su + sl)) ** 2)
    n = max(T - 1, 0)
    return MethodCoefficients(-2.0 / (upper + lower), np.full(n, 1.0 + momentum),
                              np.full(n, step), "polyak")


def mp_closed_form(sigma: float, r: float, T: int) -> MethodCoefficients:
    """Closed-form optimal schedule for the Marchenko-Pastur law.

    With ``rho = (1 + r) / sqrt(r)`` and ``delta_t = -1 / (rho + delta_{t-1})``,
    ``delta_0 = 0``, iteration t uses ``delta_t``: step ``delta_t / (sigma**2 sqrt r)``
    and momentum ``-(1 + rho delta_t)`` (which equals ``delta_t delta_{t-1}``).
    Iteration 1 has zero momentum and step ``-1 / ((1 + r) sigma**2)``.
    """
    if not (sigma > 0 and r > 0):
        raise DomainError("sigma and r must be positive")
    if r == 1:
        raise DomainError("r = 1 puts the lower edge at 0, which is not supported")
    rho = (1.0 + r) / math.sqrt(r)
    scale = sigma**2 * math.sqrt(r)
    delta = np.empty(T + 1)
    delta[0] = 0.0
    for t in range(1, T + 1):
        delta[t] = -1.0 / (rho + delta[t - 1])
    b1 = delta[1] / scale
    momentum = -(1.0 + rho * delta[2:])
    return MethodCoefficients(float(b1), 1.0 + momentum, delta[2:] / scale, "mp-closed")


def gradient_descent_coefficients(step: float, T: int) -> MethodCoefficients:
    if not step > 0:
        raise DomainError(f"step must be positive, got {step}")
    n = max(T - 1, 0)
    return MethodCoefficients(-step, np.ones(n), np.full(n, -step), "gd")


@dataclass
class IterationState:
    x_prev: NDArray
    x_curr: NDArray
    t: int


def iterate(problem: "QuadraticProblem", coeffs: MethodCoefficients, T: int) -> Iterator[IterationState]:
    """Yield the state after each of iterations 1..T."""
    coeffs.require(T)
    H, x_star = problem.hessian, problem.solution
    x0 = np.array(problem.start, dtype=float)
    if T < 1:
        return
    x1 = x0 + coeffs.b1 * (H @ (x0 - x_star))
    state = IterationState(x0, x1, 1)
    yield state
    for t in range(2, T + 1):
        a, b = coeffs.a[t - 2], coeffs.b[t - 2]
        x_prev, x = state.x_prev, state.x_curr
        x_new = x + (a - 1.0) * (x - x_prev) + b * (H @ (x - x_star))
        state = IterationState(x, x_new, t)
        yield state


def run_method(problem: "QuadraticProblem", coeffs: MethodCoefficients, T: int) -> NDArray:
    """Squared distances ``||x_t - x*||^2`` for t = 0..T.

    Raises :class:`NumericalError` once an iterate is non-finite or its error norm
    exceeds ``1e12`` times the initial one.
    """
    x_star = problem.solution
    err0 = np.asarray(problem.start, dtype=float) - x_star
    out = np.empty(T + 1)
    out[0] = err0 @ err0
    limit = (DIVERGENCE_FACTOR * math.sqrt(out[0])) ** 2
    for state in iterate(problem, coeffs, T):
        e = state.x_curr - x_star
        sq = e @ e
        if not np.isfinite(sq) or sq > limit:
            raise NumericalError(f"iterates diverged at t = {state.t} ({coeffs.label or 'schedule'})")
        out[state.t] = sq
    return out
