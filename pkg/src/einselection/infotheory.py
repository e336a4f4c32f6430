"""Von Neumann entropy, mutual information, and the action price of records.

Entropies are in bits unless ``base=math.e`` is passed. Actions are
dimensionless radians (units of hbar).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._optimize import multistart_minimize, quasi_random_starts, unit_vector_from_params
from .qstate import DensityMatrix, PureState, clipped_eigenvalues, partial_trace
from .randomness import make_rng

__all__ = [
    "entropy",
    "entropy_of_eigenvalues",
    "mutual_information",
    "action_cost",
    "min_action_bound",
    "minimize_action",
    "ActionMinimum",
    "PerBitCost",
    "per_bit_cost",
]


def entropy_of_eigenvalues(p, base: float = 2.0) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0.0]
    h = -float(np.sum(p * np.log(p))) / math.log(base)
    return max(h, 0.0)


def entropy(rho: DensityMatrix, base: float = 2.0) -> float:
    """``-Tr rho log rho`` with ``0 log 0 = 0``."""
    return entropy_of_eigenvalues(clipped_eigenvalues(rho.matrix), base)


def _split(rho: DensityMatrix, bipartition) -> tuple[list[str], list[str]]:
    labels = rho.layout.labels
    if bipartition is None:
        if len(labels) != 2:
            raise ValueError("bipartition is required for layouts with more than two subsystems")
        return [labels[0]], [labels[1]]
    first, second = ([p] if isinstance(p, str) else list(p) for p in bipartition)
    if set(first) & set(second):
        raise ValueError(f"bipartition parts overlap: {first} and {second}")
    if set(first) | set(second) != set(labels) or len(first) + len(second) != len(labels):
        raise ValueError(f"bipartition {first}|{second} does not cover layout {labels}")
    return first, second


def mutual_information(rho: DensityMatrix, bipartition=None, base: float = 2.0) -> float:
    """``H(X) + H(Y) - H(XY)`` for the split ``bipartition = (X labels, Y labels)``."""
    first, second = _split(rho, bipartition)
    hx = entropy(partial_trace(rho, first), base)
    hy = entropy(partial_trace(rho, second), base)
    return hx + hy - entropy(rho, base)


def _overlaps(ready: np.ndarray, outcomes: np.ndarray) -> np.ndarray:
    return np.clip(np.abs(outcomes.conj() @ ready), 0.0, 1.0)


def _as_vectors(states) -> np.ndarray:
    return np.array([s.amplitudes if isinstance(s, PureState) else np.asarray(s, complex) for s in states])


def action_cost(weights: Sequence[float], ready, outcomes) -> float:
    """Least action of moving ``ready`` onto each outcome, averaged with ``weights``.

    Each transition costs the angle ``arccos |<ready|outcome_j>|``.
    """
    weights = np.asarray(weights, dtype=float)
    vecs = _as_vectors(outcomes)
    if weights.size != len(vecs):
        raise ValueError(f"{weights.size} weights for {len(vecs)} outcomes")
    if abs(weights.sum() - 1.0) > 1e-9 or np.any(weights < 0):
        raise ValueError("weights must be a probability vector")
    r = ready.amplitudes if isinstance(ready, PureState) else np.asarray(ready, complex)
    for v in [r, *vecs]:
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValueError("ready and outcome states must be normalized")
    return float(np.dot(weights, np.arccos(_overlaps(r, vecs))))


def min_action_bound(N: int) -> float:
    """``arcsin sqrt(1 - 1/N)``: least action of a complete ``N``-outcome entangling transition."""
    if N < 2:
        raise ValueError("N must be >= 2")
    return math.asin(math.sqrt(1.0 - 1.0 / N))


@dataclass(frozen=True)
class ActionMinimum:
    cost: float
    ready: np.ndarray
    converged: bool
    start_costs: tuple[float, ...]


def minimize_action(weights: Sequence[float], outcomes, starts: int = 64,
                    seed: int = 0, xtol: float = 1e-8) -> ActionMinimum:
    """Search the ready state that minimizes :func:`action_cost`.

    Powell (coordinate-direction) refinement from ``starts`` quasi-random
    unit vectors; each outcome vector is also tried as a ready state. The
    returned cost never exceeds any sampled starting cost.
    """
    weights = np.asarray(weights, dtype=float)
    vecs = _as_vectors(outcomes)
    if weights.size != len(vecs):
        raise ValueError(f"{weights.size} weights for {len(vecs)} outcomes")
    N = vecs.shape[1]

    def cost(x):
        r = unit_vector_from_params(x)
        if r is None:
            return math.pi
        return float(np.dot(weights, np.arccos(_overlaps(r, vecs))))

    rng = make_rng(seed)
    x0 = quasi_random_starts(starts, 2 * N, rng, -1.0, 1.0)
    x0 = np.vstack([x0, np.hstack([vecs.real, vecs.imag])])
    res = multistart_minimize(cost, x0, method="Powell", xatol=xtol, fatol=1e-14)
    return ActionMinimum(
        cost=res.fun,
        ready=unit_vector_from_params(res.x),
        converged=res.converged,
        start_costs=tuple(f for _, f in res.starts),
    )


@dataclass(frozen=True)
class PerBitCost:
    approximate: float   # (pi/2) / log2 N
    exact: float         # arcsin sqrt(1 - 1/N) / log2 N


def per_bit_cost(N: int) -> PerBitCost:
    if N < 2:
        raise ValueError("N must be >= 2")
    bits = math.log2(N)
    return PerBitCost(approximate=(math.pi / 2) / bits, exact=min_action_bound(N) / bits)
