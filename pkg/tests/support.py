"""Seeded random generators shared across the test modules."""
from __future__ import annotations

import numpy as np

from pplab import DensityMatrix, Projector, qubit_projector

Array = np.ndarray


def ginibre_density(rng: np.random.Generator, dim: int) -> DensityMatrix:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m))


def haar_vector(rng: np.random.Generator, dim: int) -> Array:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def haar_projector(rng: np.random.Generator, dim: int, rank: int = 1) -> Projector:
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    q, _ = np.linalg.qr(g)
    return Projector(q @ q.conj().T)


def random_unit_vector(rng: np.random.Generator) -> Array:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_bloch_vector(rng: np.random.Generator) -> Array:
    # uniform direction, radius biased toward the interior
    return random_unit_vector(rng) * rng.uniform(0.0, 1.0)


def separable_two_qubit(rng: np.random.Generator, max_terms: int = 4) -> DensityMatrix:
    k = int(rng.integers(1, max_terms + 1))
    weights = rng.dirichlet(np.ones(k))
    m = sum(
        w * np.kron(ginibre_density(rng, 2).matrix, ginibre_density(rng, 2).matrix)
        for w in weights
    )
    return DensityMatrix(m)


def zero_discord_state(rng: np.random.Generator) -> DensityMatrix:
    """Classical-quantum state: orthogonal flags on side A, anything on side B."""
    axis = random_unit_vector(rng)
    p = float(rng.uniform(0.05, 0.95))
    m = p * np.kron(qubit_projector(axis, +1).matrix, ginibre_density(rng, 2).matrix)
    m = m + (1 - p) * np.kron(qubit_projector(axis, -1).matrix, ginibre_density(rng, 2).matrix)
    return DensityMatrix(m)


def noncommuting_projector_pair(
    rng: np.random.Generator, dim: int, floor: float = 1e-6
) -> tuple[Projector, Projector]:
    while True:
        a = haar_projector(rng, dim)
        b = haar_projector(rng, dim)
        if np.linalg.norm(a.matrix @ b.matrix - b.matrix @ a.matrix) > floor:
            return a, b
