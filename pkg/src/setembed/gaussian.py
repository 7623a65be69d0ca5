"""Diagonal Gaussians: density, entropy, closed-form KL and pairwise interpolations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DiagGaussian",
    "log_density",
    "kl_gaussian",
    "entropy",
    "m_centroid",
    "e_centroid",
    "mixture_density",
]

LOG_2PI = float(np.log(2 * np.pi))


@dataclass(frozen=True, eq=False)
class DiagGaussian:
    """Gaussian with mean ``mean`` and per-axis standard deviations ``sigma``."""

    mean: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=float))
        if mean.ndim != 1 or mean.shape != sigma.shape:
            raise ValueError(f"mean {mean.shape} and sigma {sigma.shape} must be equal-length vectors")
        if not np.all(np.isfinite(mean)):
            raise ValueError("mean must be finite")
        if not (np.all(sigma > 0) and np.all(np.isfinite(sigma))):
            raise ValueError("sigma entries must be positive and finite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def variance(self) -> np.ndarray:
        return self.sigma**2

    def __eq__(self, other):
        if not isinstance(other, DiagGaussian):
            return NotImplemented
        return np.array_equal(self.mean, other.mean) and np.array_equal(self.sigma, other.sigma)

    def __repr__(self):
        return f"DiagGaussian(mean={self.mean.tolist()}, sigma={self.sigma.tolist()})"


def _same_dim(g1: DiagGaussian, g2: DiagGaussian):
    if g1.dim != g2.dim:
        raise ValueError(f"dimension mismatch: {g1.dim} vs {g2.dim}")


def log_density(g: DiagGaussian, x) -> float | np.ndarray:
    """Log-density at ``x``; ``x`` may be a single point or an ``(n, d)`` batch."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (g.dim,):
        raise ValueError(f"point dimension {x.shape[-1:]} does not match {g.dim}")
    u = (x - g.mean) / g.sigma
    out = -np.sum(np.log(g.sigma)) - 0.5 * np.sum(u * u, axis=-1) - 0.5 * g.dim * LOG_2PI
    return float(out) if np.ndim(out) == 0 else out


def kl_gaussian(g1: DiagGaussian, g2: DiagGaussian) -> float:
    """KL(g1 : g2) in closed form."""
    _same_dim(g1, g2)
    s1, s2 = g1.sigma, g2.sigma
    dm = g1.mean - g2.mean
    val = np.sum(np.log(s2) - np.log(s1) + 0.5 * (s1**2 + dm**2) / s2**2) - 0.5 * g1.dim
    return float(val)


def entropy(g: DiagGaussian) -> float:
    return float(np.sum(np.log(g.sigma)) + 0.5 * g.dim * (LOG_2PI + 1.0))


def m_centroid(g1: DiagGaussian, g2: DiagGaussian) -> DiagGaussian:
    """Average of the expectation parameters (mu, mu^2 + sigma^2), per axis.

    Tends to cover the union of the two supports.
    """
    _same_dim(g1, g2)
    mean = 0.5 * (g1.mean + g2.mean)
    # avg second moment minus mean^2, rearranged to avoid cancellation
    var = 0.5 * (g1.variance + g2.variance) + 0.25 * (g1.mean - g2.mean) ** 2
    return DiagGaussian(mean, np.sqrt(var))


def e_centroid(g1: DiagGaussian, g2: DiagGaussian) -> DiagGaussian:
    """Average of the natural parameters (mu / sigma^2, -1 / (2 sigma^2)), per axis.

    The precision is the mean precision; concentrates on the overlap.
    """
    _same_dim(g1, g2)
    p1, p2 = 1.0 / g1.variance, 1.0 / g2.variance
    precision = 0.5 * (p1 + p2)
    mean = 0.5 * (g1.mean * p1 + g2.mean * p2) / precision
    return DiagGaussian(mean, np.sqrt(1.0 / precision))


def mixture_density(g1: DiagGaussian, g2: DiagGaussian, x) -> float | np.ndarray:
    """Density of the equal-weight mixture (g1 + g2) / 2 at ``x``."""
    _same_dim(g1, g2)
    out = np.exp(np.logaddexp(log_density(g1, x), log_density(g2, x)) - np.log(2.0))
    return float(out) if np.ndim(out) == 0 else out
