"""Numerical tolerances shared by every module.

Functions read :data:`TOLERANCES` at call time, so the values can be changed
globally or temporarily with :func:`override_tolerances`.
"""

from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass
from typing import Iterator


@dataclass
class Tolerances:
    norm: float = 1e-10
    hermitian: float = 1e-10
    trace: float = 1e-10
    eigenvalue_floor: float = -1e-9
    unitary: float = 1e-10
    orthogonality: float = 1e-10
    zero_probability: float = 1e-12
    zero_entropy: float = 1e-12
    max_dimension: int = 2**14


TOLERANCES = Tolerances()


@contextlib.contextmanager
def override_tolerances(**changes: float) -> Iterator[Tolerances]:
    """Temporarily replace selected tolerance values.

    >>> with override_tolerances(max_dimension=64):
    ...     pass
    """
    global TOLERANCES
    saved = TOLERANCES
    TOLERANCES = dataclasses.replace(saved, **changes)
    try:
        yield TOLERANCES
    finally:
        TOLERANCES = saved


def tol() -> Tolerances:
    return TOLERANCES
