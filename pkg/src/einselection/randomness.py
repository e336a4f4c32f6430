"""Seeded random states, unitaries and density matrices for tests and sweeps.

All generators take a :class:`numpy.random.Generator`; :func:`make_rng` builds
one from a single integer seed on the counter-based Philox bit generator.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .qstate import DensityMatrix, PureState, SubsystemLayout


def make_rng(seed: int | None = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.ones((1, 1), complex)


def random_pure_state(layout: SubsystemLayout, rng: np.random.Generator) -> PureState:
    v = rng.normal(size=layout.size) + 1j * rng.normal(size=layout.size)
    return PureState(v / np.linalg.norm(v), layout)


def random_density_matrix(layout: SubsystemLayout, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random mixed state from the induced (Ginibre) measure with the given rank."""
    d = layout.size
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return DensityMatrix(0.5 * (m + m.conj().T), layout)


def random_probabilities(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.dirichlet(np.ones(n))
