"""Expected error of a schedule: the r_t recurrence, quadrature integrals and rate fits.

All series are normalized so that ``r_0 = 1``, i.e. they report
``E||x_t - x*||^2 / E||x_0 - x*||^2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from numpy.typing import NDArray

from .errors import DomainError, NumericalError
from .orthopoly import MethodCoefficients
from .spectrum import DEFAULT_NODES, Quadrature, SpectralMeasure, build_quadrature

MeasureLike = Union[SpectralMeasure, Quadrature]


@dataclass(frozen=True)
class ErrorSeries:
    """Normalized squared-error sequence r_0..r_T.

    ``log_values`` stays finite after ``values`` underflow to zero; rate fits use it.
    ``route`` records how the series was produced: ``"recurrence"``, ``"integral"``
    or ``"empirical"``.
    """

    values: NDArray
    log_values: NDArray
    route: str
    fitted_rate: Optional[float] = None

    @classmethod
    def from_values(cls, values, route: str) -> "ErrorSeries":
        values = np.asarray(values, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.log(values)
        return cls(values, logs, route)

    def __len__(self):
        return len(self.values)

    def with_rate(self, tail_fraction: float = 0.5) -> "ErrorSeries":
        return ErrorSeries(self.values, self.log_values, self.route,
                           asymptotic_rate(self, tail_fraction))


def _as_quadrature(measure: MeasureLike, n_nodes: int) -> Quadrature:
    if isinstance(measure, Quadrature):
        return measure
    return build_quadrature(measure, n_nodes)


def rate_recurrence(coeffs: MethodCoefficients, first_moment: float, T: int) -> ErrorSeries:
    """Forward ``r_t = a_t r_{t-1} + (1 - a_t) r_{t-2}`` from ``r_0 = 1``, ``r_1 = 1 + b1 m1``.

    Valid only for average-case optimal schedules. The decaying solution is the
    minimal one of this recurrence, so forward evaluation carries an absolute
    error of order machine epsilon; long-horizon rates should come from
    :func:`error_series` instead.
    """
    coeffs.require(T)
    r = np.empty(T + 1)
    r[0] = 1.0
    if T >= 1:
        r[1] = 1.0 + coeffs.b1 * first_moment
    for t in range(2, T + 1):
        a = coeffs.a[t - 2]
        r[t] = a * r[t - 1] + (1.0 - a) * r[t - 2]
    if not np.all(np.isfinite(r)):
        raise NumericalError("rate recurrence produced non-finite values")
    return ErrorSeries.from_values(r, "recurrence")


def _log_moment_series(quad: Quadrature, coeffs: MethodCoefficients, T: int,
                       power: int) -> tuple[NDArray, NDArray]:
    """Signed mantissas and log-scales of ``int P_t^power dmu`` for t = 0..T.

    Residual values at all nodes share one running scale factor, renormalized
    every step, so nothing underflows however small ``P_t`` gets.
    """
    coeffs.require(T)
    lam = quad.all_nodes
    w = quad.all_weights
    mant = np.empty(T + 1)
    logs = np.empty(T + 1)
    p_prev = np.ones_like(lam)
    p = 1.0 + coeffs.b1 * lam
    log_scale = 0.0
    mant[0], logs[0] = w.sum(), 0.0
    for t in range(1, T + 1):
        if t >= 2:
            a, b = coeffs.a[t - 2], coeffs.b[t - 2]
            p_new = (a + b * lam) * p + (1.0 - a) * p_prev
            p_prev, p = p, p_new
        c = np.max(np.abs(p)) if p.size else 1.0
        if not np.isfinite(c):
            raise NumericalError(f"residual polynomial overflowed at t = {t}")
        if c > 0:
            p = p / c
            p_prev = p_prev / c
            log_scale += np.log(c)
        mant[t] = w @ (p**power)
        logs[t] = power * log_scale
    return mant, logs


def error_series(measure: MeasureLike, coeffs: MethodCoefficients, T: int, power: int = 2,
                 n_nodes: int = DEFAULT_NODES) -> ErrorSeries:
    """``int P_t^power dmu`` for t = 0..T by quadrature; ``power=2`` is the expected error.

    Divided by the discretized total mass so that ``r_0 = 1`` exactly.
    """
    quad = _as_quadrature(measure, n_nodes)
    mant, logs = _log_moment_series(quad, coeffs, T, power)
    mant = mant / quad.total_mass
    with np.errstate(divide="ignore", invalid="ignore"):
        values = mant * np.exp(logs)
        log_values = np.where(mant > 0, np.log(np.abs(mant)) + logs, -np.inf)
    return ErrorSeries(values, log_values, "integral")


def expected_error_integral(measure: MeasureLike, coeffs: MethodCoefficients, t: int,
                            power: int = 2, n_nodes: int = DEFAULT_NODES) -> float:
    """``int P_t^2 dmu`` (or ``int P_t dmu`` with ``power=1``) at a single iteration."""
    return float(error_series(measure, coeffs, t, power, n_nodes).values[t])


def asymptotic_rate(series: ErrorSeries, tail_fraction: float = 0.5) -> float:
    """Least-squares slope of ``log r_t`` over the final ``tail_fraction`` of the series, exponentiated."""
    n = len(series)
    if n < 50:
        raise DomainError(f"need at least 50 terms to fit a rate, got {n}")
    if not 0 < tail_fraction <= 1:
        raise DomainError("tail_fraction must lie in (0, 1]")
    start = n - max(int(round(tail_fraction * n)), 2)
    t = np.arange(start, n)
    logs = series.log_values[start:]
    if not np.all(np.isfinite(logs)):
        raise DomainError("series reaches exactly zero on the tail: convergence in finitely many steps")
    slope = np.polyfit(t.astype(float), logs, 1)[0]
    return float(np.exp(slope))
