import itertools

import numpy as np
import pytest

from einselection.qstate import PureState, SubsystemLayout, to_density
from einselection.randomness import make_rng


@pytest.fixture
def rng():
    return make_rng(20001)


@pytest.fixture
def bell():
    return to_density(PureState.normalized([1, 0, 0, 1], SubsystemLayout.of(S=2, A=2)))


def loop_partial_trace(matrix, dims, keep):
    """Reduced matrix by explicit summation over multi-indices (test oracle)."""
    dims = list(dims)
    keep = sorted(keep)
    rest = [i for i in range(len(dims)) if i not in keep]
    kdims = [dims[i] for i in keep]
    dk = int(np.prod(kdims))
    out = np.zeros((dk, dk), dtype=complex)
    strides = [int(np.prod(dims[i + 1:])) for i in range(len(dims))]
    for ki in itertools.product(*[range(d) for d in kdims]):
        for kj in itertools.product(*[range(d) for d in kdims]):
            total = 0.0
            for r in itertools.product(*[range(dims[i]) for i in rest]):
                row = col = 0
                for pos, ax in enumerate(keep):
                    row += ki[pos] * strides[ax]
                    col += kj[pos] * strides[ax]
                for pos, ax in enumerate(rest):
                    row += r[pos] * strides[ax]
                    col += r[pos] * strides[ax]
                total += matrix[row, col]
            a = int(np.ravel_multi_index(ki, kdims))
            b = int(np.ravel_multi_index(kj, kdims))
            out[a, b] = total
    return out


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
