"""Expected spectral measures and quadrature against them.

A :class:`SpectralMeasure` is a probability measure on the nonnegative reals made
of a continuous density on ``[lower, upper]`` plus optional point masses. All
integrals used downstream go through a :class:`Quadrature`, which discretizes
the continuous part with Gauss-Legendre nodes and keeps atoms exact.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import roots_legendre

from .errors import DomainError, NumericalError

DEFAULT_NODES = 4000
MIN_NODES = 16


def _mp_density(lam, lower, upper, sigma, ratio):
    lam = np.asarray(lam, dtype=float)
    inside = np.clip((upper - lam) * (lam - lower), 0.0, None)
    return np.sqrt(inside) / (2.0 * np.pi * sigma**2 * ratio * lam)


def _constant_density(lam, value):
    return np.full(np.shape(lam), value, dtype=float)


def _times_lambda(lam, density):
    lam = np.asarray(lam, dtype=float)
    return lam * density(lam)


@dataclass(frozen=True)
class SpectralMeasure:
    """Density on ``[lower, upper]`` plus atoms ``(location, mass)``.

    ``density`` is ``None`` for purely atomic (empirical) measures. When
    ``probability`` is False the object is a positive weight rather than a
    probability measure, e.g. the output of :func:`lambda_weighted`.
    """

    lower: float
    upper: float
    density: Optional[Callable[[NDArray], NDArray]]
    atoms: tuple[tuple[float, float], ...] = ()
    name: str = "custom"
    params: tuple[tuple[str, float], ...] = ()
    probability: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise DomainError("support edges must be finite")
        if self.density is not None:
            if self.lower <= 0:
                raise DomainError(f"lower edge must be positive, got {self.lower}")
            if self.upper <= self.lower:
                raise DomainError("upper edge must exceed lower edge")
            for loc, _ in self.atoms:
                if self.lower < loc < self.upper:
                    raise DomainError(f"atom at {loc} lies inside the continuous support")
        elif self.upper < self.lower:
            raise DomainError("upper edge must not be below lower edge")
        for loc, mass in self.atoms:
            if loc < 0 or mass < 0:
                raise DomainError("atoms need nonnegative location and mass")

    @property
    def is_atomic(self) -> bool:
        return self.density is None

    @property
    def atom_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    def tag(self) -> str:
        """Short file-name friendly identifier, e.g. ``mp_sigma1-ratio0.5``."""
        if not self.params:
            return self.name
        return self.name + "_" + "-".join(f"{k}{v:g}" for k, v in self.params)


@dataclass(frozen=True)
class Quadrature:
    """Discretization of a measure: continuous nodes/weights plus exact atoms."""

    nodes: NDArray
    weights: NDArray
    atom_nodes: NDArray = field(default_factory=lambda: np.zeros(0))
    atom_weights: NDArray = field(default_factory=lambda: np.zeros(0))
    lower: float = 0.0
    upper: float = 0.0

    @property
    def all_nodes(self) -> NDArray:
        return np.concatenate([self.nodes, self.atom_nodes])

    @property
    def all_weights(self) -> NDArray:
        return np.concatenate([self.weights, self.atom_weights])

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum() + self.atom_weights.sum())

    def __len__(self):
        return len(self.nodes) + len(self.atom_nodes)


def marchenko_pastur(sigma: float = 1.0, r: float = 0.5) -> SpectralMeasure:
    """Marchenko-Pastur law of ``A^T A / n`` with entry variance ``sigma**2`` and ``d/n -> r``.

    For ``r > 1`` a Dirac mass of weight ``1 - 1/r`` sits at zero.
    """
    if not (sigma > 0 and r > 0):
        raise DomainError("sigma and r must be positive")
    if r == 1:
        raise DomainError("r = 1 puts the lower edge at 0, which is not supported")
    lower = sigma**2 * (1 - math.sqrt(r)) ** 2
    upper = sigma**2 * (1 + math.sqrt(r)) ** 2
    atoms = ((0.0, 1.0 - 1.0 / r),) if r > 1 else ()
    density = functools.partial(_mp_density, lower=lower, upper=upper, sigma=sigma, ratio=r)
    return SpectralMeasure(lower, upper, density, atoms, "mp", (("sigma", sigma), ("ratio", r)))


def uniform_measure(lower: float, upper: float) -> SpectralMeasure:
    if lower <= 0:
        raise DomainError(f"lower edge must be positive, got {lower}")
    if upper <= lower:
        raise DomainError("upper edge must exceed lower edge")
    density = functools.partial(_constant_density, value=1.0 / (upper - lower))
    return SpectralMeasure(lower, upper, density, (), "uniform", (("lmin", lower), ("lmax", upper)))


def empirical_measure(eigenvalues: ArrayLike) -> SpectralMeasure:
    """Purely atomic measure putting mass ``multiplicity / d`` on each distinct eigenvalue."""
    eigs = np.asarray(eigenvalues, dtype=float).ravel()
    if eigs.size == 0:
        raise DomainError("need at least one eigenvalue")
    if not np.all(np.isfinite(eigs)):
        raise DomainError("eigenvalues must be finite")
    if np.any(eigs < 0):
        raise DomainError("eigenvalues must be nonnegative")
    positive = eigs[eigs > 0]
    if positive.size == 0:
        raise DomainError("need at least one positive eigenvalue")
    values, counts = np.unique(eigs, return_counts=True)
    atoms = tuple((float(v), c / eigs.size) for v, c in zip(values, counts))
    return SpectralMeasure(float(positive.min()), float(positive.max()), None, atoms, "empirical",
                           (("d", eigs.size),))


def read_eigenvalues(path) -> NDArray:
    """Read one eigenvalue per line; blank lines and ``#`` comments are skipped."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise DomainError(f"{path}:{lineno}: not a number: {line!r}") from None
    return np.asarray(values)


def lambda_weighted(measure: SpectralMeasure) -> SpectralMeasure:
    """The unnormalized weight ``lambda * dmu``; atoms at zero drop out exactly."""
    density = None
    if measure.density is not None:
        density = functools.partial(_times_lambda, density=measure.density)
    atoms = tuple((loc, loc * mass) for loc, mass in measure.atoms if loc * mass > 0)
    return SpectralMeasure(measure.lower, measure.upper, density, atoms,
                           measure.name + "*lambda", measure.params, probability=False)


@functools.lru_cache(maxsize=16)
def gauss_legendre(n: int) -> tuple[NDArray, NDArray]:
    """Read-only Gauss-Legendre nodes and weights on [-1, 1], cached by size."""
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def build_quadrature(measure: SpectralMeasure, n_nodes: int = DEFAULT_NODES) -> Quadrature:
    """Gauss-Legendre on ``[lower, upper]`` with density-scaled weights, atoms appended.

    Square-root edges (Marchenko-Pastur) make the continuous part converge only
    algebraically in ``n_nodes``; plan on thousands of nodes there.
    """
    if n_nodes < MIN_NODES:
        raise DomainError(f"need at least {MIN_NODES} quadrature nodes, got {n_nodes}")
    if measure.density is None:
        nodes = np.zeros(0)
        weights = np.zeros(0)
    else:
        x, w = gauss_legendre(int(n_nodes))
        half = 0.5 * (measure.upper - measure.lower)
        nodes = measure.lower + half * (x + 1.0)
        weights = half * w * measure.density(nodes)
    atom_nodes = np.array([loc for loc, _ in measure.atoms], dtype=float)
    atom_weights = np.array([m for _, m in measure.atoms], dtype=float)
    return Quadrature(nodes, weights, atom_nodes, atom_weights, measure.lower, measure.upper)


def integrate(quad: Quadrature, f: Callable[[NDArray], ArrayLike]) -> float:
    """Sum of ``w_i f(x_i)`` over continuous nodes and atoms. ``f`` must be vectorized."""
    vals = np.broadcast_to(np.asarray(f(quad.nodes), dtype=float), quad.nodes.shape)
    atom_vals = np.broadcast_to(np.asarray(f(quad.atom_nodes), dtype=float), quad.atom_nodes.shape)
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(atom_vals))):
        raise NumericalError("integrand is not finite on the quadrature nodes")
    return float(quad.weights @ vals + quad.atom_weights @ atom_vals)


def moments(quad: Quadrature, orders: Sequence[int]) -> list[float]:
    return [integrate(quad, lambda x, k=k: x**k) for k in orders]
