"""Orthonormal recurrences for the lambda-weighted measure and the optimal method schedule.

The weight ``lambda dmu(lambda)`` is pulled back to ``[-1, 1]`` by the decreasing
affine map ``m`` sending ``lower -> 1`` and ``upper -> -1``. Its orthonormal family
``Q_t`` satisfies

    alpha_t Q_t(xi) = (xi - beta_{t-1}) Q_{t-1}(xi) - alpha_{t-1} Q_{t-2}(xi)

and the residual polynomials ``P_t(lambda) = Q_t(m(lambda)) / Q_t(m0)`` define the
average-case optimal method. ``Q_t(m0)`` grows geometrically, so every quantity
is formed from consecutive ratios ``Q_t(m0) / Q_{t-1}(m0)`` instead.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError, NumericalError
from .spectrum import (DEFAULT_NODES, Quadrature, SpectralMeasure, build_quadrature, lambda_weighted,
                       moments)

NODES_PER_DEGREE = 10


@dataclass(frozen=True)
class OrthonormalRecurrence:
    """``alphas[k]`` holds alpha_{k+1}; ``betas[k]`` holds beta_k."""

    alphas: NDArray
    betas: NDArray
    map_lower: float
    map_upper: float
    mass: float = 1.0

    def __len__(self):
        return len(self.alphas)

    def alpha(self, t: int) -> float:
        return float(self.alphas[t - 1])

    def beta(self, t: int) -> float:
        return float(self.betas[t])

    @property
    def m0(self) -> float:
        return affine_map(self.map_lower, self.map_upper)[1]

    def perturbed(self, delta: float) -> "OrthonormalRecurrence":
        """Copy with every alpha shifted by ``delta``; used to check that validation notices."""
        return OrthonormalRecurrence(self.alphas + delta, self.betas, self.map_lower,
                                     self.map_upper, self.mass)


@dataclass(frozen=True)
class MethodCoefficients:
    """Schedule ``x_1 = x_0 + b1 grad``; ``x_t = x_{t-1} + (a_t - 1)(x_{t-1} - x_{t-2}) + b_t grad``.

    ``a[k]`` and ``b[k]`` hold ``a_{k+2}`` and ``b_{k+2}``.
    """

    b1: float
    a: NDArray
    b: NDArray
    label: str = ""

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise DomainError("a and b schedules must have equal length")

    @property
    def horizon(self) -> int:
        return len(self.a) + 1

    def a_t(self, t: int) -> float:
        if not 2 <= t <= self.horizon:
            raise DomainError(f"a_t defined for 2 <= t <= {self.horizon}, got {t}")
        return float(self.a[t - 2])

    def b_t(self, t: int) -> float:
        if t == 1:
            return float(self.b1)
        if not 2 <= t <= self.horizon:
            raise DomainError(f"b_t defined for 1 <= t <= {self.horizon}, got {t}")
        return float(self.b[t - 2])

    @property
    def momentum(self) -> NDArray:
        """``a_t - 1`` for t = 2..T."""
        return self.a - 1.0

    @property
    def steps(self) -> NDArray:
        """``b_t`` for t = 1..T, b1 first."""
        return np.concatenate([[self.b1], self.b])

    def require(self, T: int) -> None:
        if T > self.horizon:
            raise DomainError(f"schedule covers {self.horizon} iterations, {T} requested")


def affine_map(lower: float, upper: float) -> tuple[Callable[[ArrayLike], NDArray], float]:
    """Return ``(m, m0)`` with ``m(lower) = 1``, ``m(upper) = -1`` and ``m0 = m(0) > 1``."""
    if lower <= 0:
        raise DomainError(f"lower edge must be positive, got {lower}")
    if upper <= lower:
        raise DomainError("upper edge must exceed lower edge")
    width = upper - lower
    m0 = (upper + lower) / width

    def m(lam):
        return m0 - 2.0 * np.asarray(lam, dtype=float) / width

    return m, m0


def stieltjes_recurrence(weight: Quadrature, T: int, lower: Optional[float] = None,
                         upper: Optional[float] = None) -> OrthonormalRecurrence:
    """Discretized Stieltjes procedure on the mapped weight.

    ``weight`` is the quadrature of the (already lambda-weighted) measure. The map
    interval defaults to the quadrature's ``[lower, upper]``.
    """
    lower = weight.lower if lower is None else lower
    upper = weight.upper if upper is None else upper
    m, _ = affine_map(lower, upper)
    if T < 1:
        raise DomainError("need T >= 1")
    n_cont = len(weight.nodes)
    if n_cont:
        if n_cont < NODES_PER_DEGREE * T:
            raise DomainError(f"{n_cont} nodes support degree <= {n_cont // NODES_PER_DEGREE}, "
                              f"got T = {T}")
    else:
        support = int(np.count_nonzero(weight.atom_weights > 0))
        if T >= support:
            raise DomainError(f"purely atomic weight with {support} support points admits "
                              f"T < {support}, got T = {T}")

    alphas, betas, mass = stieltjes(m(weight.all_nodes), weight.all_weights, T)
    return OrthonormalRecurrence(alphas, betas, float(lower), float(upper), mass)


def stieltjes(xi: ArrayLike, weights: ArrayLike, T: int) -> tuple[NDArray, NDArray, float]:
    """Stieltjes procedure for the discrete measure ``sum_i weights[i] delta(xi[i])``.

    Returns ``(alphas, betas, mass)`` with ``alphas[k] = alpha_{k+1}`` and
    ``betas[k] = beta_k`` in ``alpha_{t+1} Q_{t+1} = (x - beta_t) Q_t - alpha_t Q_{t-1}``.
    No mapping is applied, so this works for any real support.
    """
    xi = np.asarray(xi, dtype=float)
    w = np.asarray(weights, dtype=float)
    mass = float(w.sum())
    if not mass > 0:
        raise NumericalError("weight has no mass")
    alphas = np.empty(T)
    betas = np.empty(T)
    q_prev = np.zeros_like(xi)
    q = np.full_like(xi, 1.0 / np.sqrt(mass))
    alpha_prev = 0.0
    for k in range(T):
        wq = w * q
        betas[k] = wq @ (xi * q)
        resid = (xi - betas[k]) * q - alpha_prev * q_prev
        alpha = np.sqrt(w @ (resid * resid))
        if not (np.isfinite(alpha) and alpha > 0):
            raise NumericalError(f"alpha_{k + 1} = {alpha}: quadrature too coarse or weight degenerate")
        alphas[k] = alpha
        q_prev, q = q, resid / alpha
        alpha_prev = alpha
    return alphas, betas, mass


def q_ratio_sequence(rec: OrthonormalRecurrence, xi: float, T: int) -> NDArray:
    """Ratios ``Q_t(xi) / Q_{t-1}(xi)`` for t = 1..T (entry ``k`` is t = k + 1)."""
    if not xi > 1:
        raise DomainError(f"evaluation point must lie right of the support, got {xi}")
    if T > len(rec):
        raise DomainError(f"recurrence has {len(rec)} terms, {T} requested")
    alphas, betas = rec.alphas, rec.betas
    rho = np.empty(T)
    rho[0] = (xi - betas[0]) / alphas[0]
    for k in range(1, T):
        rho[k] = ((xi - betas[k]) - alphas[k - 1] / rho[k - 1]) / alphas[k]
    if not np.all(np.isfinite(rho)) or np.any(rho == 0):
        raise NumericalError("ratio recurrence hit zero or non-finite values")
    return rho


def coefficients_from_recurrence(rec: OrthonormalRecurrence, T: int, b1: Optional[float] = None,
                                 label: str = "optimal") -> MethodCoefficients:
    """Convert an orthonormal recurrence into the residual schedule ``(a_t, b_t)``.

    ``b1`` defaults to the degree-one value implied by the recurrence itself.
    """
    if T < 2:
        raise DomainError("need T >= 2")
    _, m0 = affine_map(rec.map_lower, rec.map_upper)
    width = rec.map_upper - rec.map_lower
    rho = q_ratio_sequence(rec, m0, T)
    alpha = rec.alphas[:T]
    # entries below are t = 2..T
    one_minus_a = -(alpha[:-1] / alpha[1:]) / (rho[1:] * rho[:-1])
    b = -2.0 / (alpha[1:] * width) / rho[1:]
    if b1 is None:
        b1 = -2.0 / (alpha[0] * width) / rho[0]
    return MethodCoefficients(float(b1), 1.0 - one_minus_a, b, label)


def b1_from_moments(quad: Quadrature) -> float:
    """First step ``-m1/m2``: makes ``1 + b1 lambda`` orthogonal to constants under ``lambda dmu``."""
    m1, m2 = moments(quad, (1, 2))
    return -m1 / m2


def optimal_coefficients(measure: SpectralMeasure, T: int,
                         n_nodes: int = DEFAULT_NODES) -> MethodCoefficients:
    """Schedule of the average-case optimal method for ``measure`` up to iteration ``T``."""
    if T < 2:
        raise DomainError("need T >= 2")
    weight = build_quadrature(lambda_weighted(measure), n_nodes)
    rec = stieltjes_recurrence(weight, T, measure.lower, measure.upper)
    b1 = b1_from_moments(build_quadrature(measure, n_nodes))
    return coefficients_from_recurrence(rec, T, b1, label="optimal")


def eval_residual(coeffs: MethodCoefficients, lam: ArrayLike, T: int) -> NDArray:
    """``P_0(lam), ..., P_T(lam)`` by forward recurrence; shape ``(T + 1,) + shape(lam)``."""
    coeffs.require(T)
    lam = np.asarray(lam, dtype=float)
    out = np.empty((T + 1,) + lam.shape)
    out[0] = 1.0
    if T >= 1:
        out[1] = 1.0 + coeffs.b1 * lam
    for t in range(2, T + 1):
        a, b = coeffs.a[t - 2], coeffs.b[t - 2]
        out[t] = (a + b * lam) * out[t - 1] + (1.0 - a) * out[t - 2]
    return out
