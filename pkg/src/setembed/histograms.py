"""Uniform distributions of sets as histograms over atoms, and discrete divergences.

All logarithms are natural, so the Jensen-Shannon divergence lies in [0, ln 2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sets import AtomicPartition, GroundUniverse, SubsetRef

__all__ = [
    "AtomHistogram",
    "uniform_histogram",
    "histogram_entropy",
    "damped_kl",
    "extended_kl",
    "discrete_js",
    "DEFAULT_EPSILON",
]

DEFAULT_EPSILON = 1e-3


class PartitionMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AtomHistogram:
    partition: AtomicPartition
    weights: np.ndarray
    density: np.ndarray


def uniform_histogram(x: SubsetRef, p: AtomicPartition, u: GroundUniverse) -> AtomHistogram:
    """U_X as atom weights V(A_i)/V(X) for atoms inside X, zero elsewhere."""
    if not x.members:
        raise ValueError(f"set {x.name!r} is empty")
    inside = np.zeros(len(p.atoms), dtype=bool)
    covered = set()
    for i, atom in enumerate(p.atoms):
        if atom <= x.members:
            inside[i] = True
            covered |= atom
        elif atom & x.members:
            raise ValueError(f"set {x.name!r} splits an atom; partition is stale")
    if covered != x.members:
        raise ValueError(f"set {x.name!r} is not a union of atoms; partition is stale")
    vol = p.volumes(u)
    weights = np.where(inside, vol, 0.0)
    weights = weights / weights.sum()
    return AtomHistogram(p, weights, weights / vol)


def histogram_entropy(h: AtomHistogram) -> float:
    """Entropy relative to the base measure, -sum_i w_i log(density_i).

    Equals log |X| under unit volumes.
    """
    w = h.weights
    nz = w > 0
    return float(0.0 - np.sum(w[nz] * np.log(h.density[nz])))


def _check_same(p: AtomHistogram, q: AtomHistogram):
    if p.partition is q.partition:
        return
    if p.partition.atoms != q.partition.atoms:
        raise PartitionMismatchError("histograms are over different partitions")


def damped_kl(p: AtomHistogram, q: AtomHistogram, epsilon: float = DEFAULT_EPSILON) -> float:
    """max(sum_i p_i [log p_i' - log(q_i' + eps)], 0) with p', q' per-atom densities.

    Densities are constant on atoms, so the integral reduces to a sum over atoms
    weighted by their mass under p.
    """
    _check_same(p, q)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    nz = p.weights > 0
    val = np.sum(p.weights[nz] * (np.log(p.density[nz]) - np.log(q.density[nz] + epsilon)))
    return max(float(val), 0.0)


def extended_kl(p, q) -> float:
    """KL between positive measures: sum p log(p/q) + sum q - sum p.

    Uses 0 log 0 = 0; infinite when p puts mass where q has none.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("weight vectors differ in length")
    nz = p > 0
    if np.any(q[nz] == 0):
        return float("inf")
    return float(np.sum(p[nz] * np.log(p[nz] / q[nz])) + q.sum() - p.sum())


def discrete_js(p: AtomHistogram, q: AtomHistogram) -> float:
    _check_same(p, q)
    m = 0.5 * (p.weights + q.weights)

    def half(w):
        nz = w > 0
        return np.sum(w[nz] * np.log(w[nz] / m[nz]))

    # sum in a fixed order of the two halves so JS(p, q) == JS(q, p) bit-for-bit
    a, b = half(p.weights), half(q.weights)
    lo, hi = sorted((a, b))
    return float(min(max(0.5 * lo + 0.5 * hi, 0.0), np.log(2.0)))
