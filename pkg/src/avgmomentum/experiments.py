"""Random quadratic problems and Monte Carlo estimates of the expected error."""
from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError, NumericalError
from .methods import run_method
from .orthopoly import MethodCoefficients
from .spectrum import SpectralMeasure


@dataclass(frozen=True)
class QuadraticProblem:
    """``f(x) = 0.5 (x - x*)^T H (x - x*)`` together with a starting point."""

    hessian: NDArray
    solution: NDArray
    start: NDArray

    def __post_init__(self):
        H = self.hessian
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise DomainError("hessian must be square")
        if H.shape[0] != len(self.solution) or H.shape[0] != len(self.start):
            raise DomainError("dimension mismatch between hessian and vectors")
        if not np.allclose(H, H.T, rtol=0, atol=1e-12):
            raise DomainError("hessian must be symmetric")

    @property
    def dim(self) -> int:
        return len(self.solution)

    def gradient(self, x: NDArray) -> NDArray:
        return self.hessian @ (x - self.solution)

    def eigenvalues(self) -> NDArray:
        return np.linalg.eigvalsh(self.hessian)


def _offset_on_sphere(rng: np.random.Generator, d: int, radius: float) -> NDArray:
    u = rng.standard_normal(d)
    return radius * u / np.linalg.norm(u)


def sample_wishart_problem(d: int, n: int, sigma: float = 1.0, radius: float = 1.0,
                           seed: int = 0) -> QuadraticProblem:
    """``H = A^T A / n`` with ``A`` an ``n x d`` Gaussian matrix of entry std ``sigma``.

    ``x*`` is standard Gaussian and ``x0 - x*`` is uniform on the sphere of radius ``radius``.
    """
    if d < 1 or n < 1:
        raise DomainError("d and n must be positive")
    rng = np.random.default_rng(seed)
    A = rng.normal(0.0, sigma, size=(n, d))
    H = A.T @ A / n
    H = 0.5 * (H + H.T)
    x_star = rng.standard_normal(d)
    return QuadraticProblem(H, x_star, x_star + _offset_on_sphere(rng, d, radius))


def sample_diagonal_problem(eigenvalues: ArrayLike, radius: float = 1.0, seed: int = 0) -> QuadraticProblem:
    """Fixed spectrum on the diagonal; only ``x*`` and the start direction are random."""
    eigs = np.asarray(eigenvalues, dtype=float)
    if eigs.ndim != 1 or eigs.size == 0:
        raise DomainError("need a nonempty 1-d array of eigenvalues")
    rng = np.random.default_rng(seed)
    x_star = rng.standard_normal(eigs.size)
    return QuadraticProblem(np.diag(eigs), x_star, x_star + _offset_on_sphere(rng, eigs.size, radius))


def problem_sampler(measure: SpectralMeasure, d: int, n: Optional[int] = None, radius: float = 1.0,
                    eigenvalues: Optional[ArrayLike] = None) -> Callable[[int], QuadraticProblem]:
    """Seed -> problem factory matching ``measure``.

    Marchenko-Pastur draws Wishart matrices (``n`` defaults to ``d / ratio``); uniform
    uses an evenly spaced eigenvalue grid of size ``d``; empirical measures need the
    raw ``eigenvalues``.
    """
    params = dict(measure.params)
    if measure.name == "mp":
        if n is None:
            n = max(1, int(round(d / params["ratio"])))
        return functools.partial(sample_wishart_problem, d, n, params["sigma"], radius)
    if eigenvalues is None:
        if measure.name != "uniform":
            raise DomainError(f"no sampler for measure {measure.name!r} without explicit eigenvalues")
        eigenvalues = np.linspace(measure.lower, measure.upper, d)
    return functools.partial(sample_diagonal_problem, np.asarray(eigenvalues, dtype=float), radius)


@dataclass(frozen=True)
class MonteCarloReport:
    per_t_mean: NDArray
    per_t_stderr: NDArray
    trials: int
    d: int
    n: Optional[int]
    seed: int
    diverged: tuple[tuple[int, str], ...] = field(default=())

    @property
    def completed(self) -> int:
        return self.trials - len(self.diverged)


def _run_trial(sampler, coeffs, T, seed):
    problem = sampler(seed)
    try:
        errs = run_method(problem, coeffs, T)
    except NumericalError as exc:
        return None, str(exc)
    return errs / errs[0], ""


def monte_carlo(sampler: Callable[[int], QuadraticProblem], coeffs: MethodCoefficients, T: int,
                trials: int, master_seed: int = 0, workers: int = 1, d: Optional[int] = None,
                n: Optional[int] = None) -> MonteCarloReport:
    """Average normalized error curves over ``trials`` problems seeded ``master_seed + i``.

    Trials may run in ``workers`` processes; results are reduced in trial order, so
    the report does not depend on the degree of parallelism. Diverged trials are
    listed in ``report.diverged`` and left out of the mean. ``d`` and ``n`` are
    recorded as metadata only.
    """
    if trials < 1:
        raise DomainError("need at least one trial")
    coeffs.require(T)
    seeds = [master_seed + i for i in range(trials)]
    job = functools.partial(_run_trial, sampler, coeffs, T)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, seeds))
    else:
        results = [job(s) for s in seeds]

    curves, diverged = [], []
    for i, (curve, msg) in enumerate(results):
        if curve is None:
            diverged.append((i, msg))
        else:
            curves.append(curve)
    if not curves:
        raise NumericalError(f"all {trials} trials diverged: {diverged[0][1]}")
    stack = np.vstack(curves)
    mean = stack.mean(axis=0)
    if len(curves) > 1:
        stderr = stack.std(axis=0, ddof=1) / np.sqrt(len(curves))
    else:
        stderr = np.zeros(T + 1)
    if d is None:
        d = sampler(master_seed).dim
    return MonteCarloReport(mean, stderr, trials, d, n, master_seed, tuple(diverged))
