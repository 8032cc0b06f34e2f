"""Deterministic sampling helpers.

Open-set assertions in the verifiers probe interior points whose barycentric
coefficients come from a fixed additive low-discrepancy sequence, so runs are
reproducible for a given seed value.  Random cluster-cyclic matrices for the
test suites are generated from a numpy Generator.
"""

from __future__ import annotations

import math

import numpy as np

from .matrices import ExchangeMatrix, validate

# Inverse powers of the plastic constant: the standard R^d Kronecker vector.
_PLASTIC = 1.324717957244746


def kronecker_sequence(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """count points of the R^d additive recurrence, in (0, 1)^dim."""
    alphas = np.array([_PLASTIC ** -(k + 1) for k in range(dim)])
    n = np.arange(1, count + 1)[:, None] + seed
    return np.mod(0.5 + n * alphas[None, :], 1.0)


def interior_points(gens: np.ndarray, count: int, seed: int = 0) -> np.ndarray:
    """Strictly positive combinations of the generator columns, (count, 3)."""
    coeffs = 0.05 + 0.95 * kronecker_sequence(gens.shape[1], count, seed)
    return coeffs @ gens.T


def random_p_triple(rng: np.random.Generator, p_max: float = 3.0):
    """A triple p12, p23, p31 >= 2 with Markov constant <= 4."""
    p12 = rng.uniform(2.0, p_max)
    p23 = rng.uniform(2.0, p_max)
    disc = math.sqrt(max((p12 * p12 - 4.0) * (p23 * p23 - 4.0), 0.0))
    lo = max(2.0, 0.5 * (p12 * p23 - disc))
    hi = 0.5 * (p12 * p23 + disc)
    p31 = rng.uniform(lo, hi) if hi > lo else lo
    return p12, p23, p31


def random_cluster_cyclic(
    rng: np.random.Generator,
    p_max: float = 3.0,
    skew_symmetric: bool = False,
) -> ExchangeMatrix:
    """A random cluster-cyclic exchange matrix, optionally skew-symmetric."""
    p12, p23, p31 = random_p_triple(rng, p_max)
    sk = np.array([[0.0, p12, -p31], [-p12, 0.0, p23], [p31, -p23, 0.0]])
    if rng.random() < 0.5:
        sk = -sk
    if skew_symmetric:
        return validate(sk)
    d = rng.uniform(0.5, 3.0, size=3)
    d = d / d.min()
    root = np.sqrt(d)
    b = sk * (root[None, :] / root[:, None])
    return validate(b, d)
