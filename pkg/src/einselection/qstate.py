"""Exact pure states and density matrices on small composite Hilbert spaces.

Index convention: the leftmost subsystem label is the slowest-varying tensor
index (row-major flattening), so a ket written ``|s>|A>`` has flat index
``s * dim(A) + a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import config
from .errors import DimensionCapError, InvariantViolation

__all__ = [
    "SubsystemLayout",
    "PureState",
    "DensityMatrix",
    "MeasurementBasis",
    "Conditional",
    "basis_state",
    "compose",
    "to_density",
    "apply_unitary",
    "partial_trace",
    "reduced_density",
    "spectrum",
    "condition",
    "is_unitary",
]


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered subsystem dimensions with unique labels."""

    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        labels = tuple(str(l) for l in self.labels)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)
        if len(dims) != len(labels):
            raise InvariantViolation(
                f"{len(dims)} dims but {len(labels)} labels in layout"
            )
        if not dims:
            raise InvariantViolation("layout needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise InvariantViolation(f"every subsystem dimension must be >= 2, got {dims}")
        if len(set(labels)) != len(labels):
            raise InvariantViolation(f"duplicate subsystem labels {labels}")
        if self.size > config.TOLERANCES.max_dimension:
            raise DimensionCapError(
                f"total dimension {self.size} exceeds cap {config.TOLERANCES.max_dimension}"
            )

    @classmethod
    def of(cls, **dims: int) -> "SubsystemLayout":
        """Build a layout from keyword arguments, e.g. ``SubsystemLayout.of(S=2, A=4)``."""
        return cls(tuple(dims.values()), tuple(dims.keys()))

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown subsystem label {label!r}; layout has {self.labels}") from None

    def dim(self, label: str) -> int:
        return self.dims[self.index(label)]

    def sub(self, labels: Iterable[str]) -> "SubsystemLayout":
        """Layout restricted to ``labels``, kept in this layout's order."""
        wanted = set(labels)
        for l in wanted:
            self.index(l)
        pos = [i for i, l in enumerate(self.labels) if l in wanted]
        return SubsystemLayout(tuple(self.dims[i] for i in pos), tuple(self.labels[i] for i in pos))

    def __add__(self, other: "SubsystemLayout") -> "SubsystemLayout":
        return SubsystemLayout(self.dims + other.dims, self.labels + other.labels)


def _as_layout(layout, size: int) -> SubsystemLayout:
    if layout is None:
        return SubsystemLayout((size,), ("S",))
    if not isinstance(layout, SubsystemLayout):
        layout = SubsystemLayout(*layout)
    return layout


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    layout: SubsystemLayout = None

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        layout = _as_layout(self.layout, amps.size)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "layout", layout)
        if amps.size != layout.size:
            raise InvariantViolation(
                f"vector of length {amps.size} does not match layout size {layout.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > config.TOLERANCES.norm:
            raise InvariantViolation(f"state norm {norm!r} differs from 1")

    @classmethod
    def normalized(cls, amplitudes, layout=None) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps), layout)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    def fidelity(self, other: "PureState") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    layout: SubsystemLayout = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvariantViolation(f"density matrix must be square, got shape {m.shape}")
        m.setflags(write=False)
        layout = _as_layout(self.layout, m.shape[0])
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "layout", layout)
        tol = config.TOLERANCES
        if m.shape[0] != layout.size:
            raise InvariantViolation(
                f"matrix side {m.shape[0]} does not match layout size {layout.size}"
            )
        if np.max(np.abs(m - m.conj().T)) > tol.hermitian:
            raise InvariantViolation("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > tol.trace:
            raise InvariantViolation(f"density matrix trace {tr!r} differs from 1")
        low = np.linalg.eigvalsh(m).min()
        if low < tol.eigenvalue_floor:
            raise InvariantViolation(f"density matrix has eigenvalue {low!r} below floor")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def tensor(self) -> np.ndarray:
        d = self.layout.dims
        return self.matrix.reshape(d + d)


@dataclass(frozen=True)
class MeasurementBasis:
    """Complete set of rank-1 orthogonal projectors ``|C_j><C_j|`` on one subsystem.

    ``vectors`` is stored as a matrix whose column ``j`` is ``|C_j>``.
    """

    target: str
    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InvariantViolation(
                f"basis needs dim-many vectors of length dim, got shape {v.shape}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        gram = v.conj().T @ v
        if np.max(np.abs(gram - np.eye(v.shape[0]))) > config.TOLERANCES.orthogonality:
            raise InvariantViolation("basis vectors are not orthonormal")

    @classmethod
    def computational(cls, target: str, dim: int) -> "MeasurementBasis":
        return cls(target, np.eye(dim))

    @classmethod
    def from_vectors(cls, target: str, vectors: Sequence[Sequence[complex]]) -> "MeasurementBasis":
        """Build from a list of kets (one per outcome)."""
        return cls(target, np.array(vectors, dtype=complex).T)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def vector(self, j: int) -> np.ndarray:
        return self.vectors[:, j]

    def projector(self, j: int) -> np.ndarray:
        c = self.vectors[:, j]
        return np.outer(c, c.conj())

    def permuted(self, order: Sequence[int]) -> "MeasurementBasis":
        return MeasurementBasis(self.target, self.vectors[:, list(order)])


@dataclass(frozen=True)
class Conditional:
    """Outcome of conditioning on one projector.

    ``state`` is ``None`` (and ``defined`` false) when the outcome has
    probability below the zero-probability tolerance.
    """

    probability: float
    state: DensityMatrix | None

    @property
    def defined(self) -> bool:
        return self.state is not None


def basis_state(index: int, dim: int, label: str = "S") -> PureState:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return PureState(v, SubsystemLayout((dim,), (label,)))


def compose(states: Sequence[PureState]) -> PureState:
    """Kronecker product of ``states`` in the given order."""
    if not states:
        raise ValueError("compose needs at least one state")
    layout = states[0].layout
    amps = states[0].amplitudes
    for s in states[1:]:
        layout = layout + s.layout
        amps = np.kron(amps, s.amplitudes)
    return PureState(amps, layout)


def to_density(state: PureState) -> DensityMatrix:
    a = state.amplitudes
    return DensityMatrix(np.outer(a, a.conj()), state.layout)


def is_unitary(u: np.ndarray, atol: float | None = None) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    atol = config.TOLERANCES.unitary if atol is None else atol
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= atol)


def _target_axes(layout: SubsystemLayout, targets: Sequence[str]) -> list[int]:
    axes = [layout.index(t) for t in targets]
    if len(set(axes)) != len(axes):
        raise ValueError(f"repeated target labels {list(targets)}")
    return axes


def apply_unitary(state: PureState, u: np.ndarray, targets: Sequence[str]) -> PureState:
    """Apply ``u`` to the subsystems ``targets`` (in that order) and identity elsewhere."""
    u = np.asarray(u, dtype=complex)
    layout = state.layout
    axes = _target_axes(layout, targets)
    dt = int(np.prod([layout.dims[i] for i in axes]))
    if u.shape != (dt, dt):
        raise ValueError(f"unitary of shape {u.shape} does not act on targets of dimension {dt}")
    if not is_unitary(u):
        raise InvariantViolation("matrix is not unitary")
    rest = [i for i in range(len(layout.dims)) if i not in axes]
    perm = axes + rest
    psi = state.tensor().transpose(perm).reshape(dt, -1)
    psi = (u @ psi).reshape([layout.dims[i] for i in perm])
    psi = psi.transpose(np.argsort(perm))
    return PureState(psi.reshape(-1), layout)


def _ordered_keep(layout: SubsystemLayout, keep: Iterable[str]) -> list[int]:
    keep = list(keep)
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    return sorted(_target_axes(layout, keep))


def _partial_trace_matrix(matrix: np.ndarray, dims: Sequence[int], keep_axes: Sequence[int]) -> np.ndarray:
    n = len(dims)
    rest = [i for i in range(n) if i not in keep_axes]
    dk = int(np.prod([dims[i] for i in keep_axes]))
    dr = int(np.prod([dims[i] for i in rest])) if rest else 1
    t = np.asarray(matrix).reshape(tuple(dims) * 2)
    perm = list(keep_axes) + rest
    t = t.transpose(perm + [n + i for i in perm]).reshape(dk, dr, dk, dr)
    return np.einsum("ajbj->ab", t)


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Trace out every subsystem not in ``keep``; kept subsystems retain their order."""
    axes = _ordered_keep(rho.layout, keep)
    reduced = _partial_trace_matrix(rho.matrix, rho.layout.dims, axes)
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityMatrix(reduced, rho.layout.sub(rho.layout.labels[i] for i in axes))


def reduced_density(state: PureState, keep: Iterable[str]) -> DensityMatrix:
    """Reduced density matrix of a pure state, without forming the full projector."""
    layout = state.layout
    axes = _ordered_keep(layout, keep)
    rest = [i for i in range(len(layout.dims)) if i not in axes]
    dk = int(np.prod([layout.dims[i] for i in axes]))
    psi = state.tensor().transpose(axes + rest).reshape(dk, -1)
    m = psi @ psi.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m, layout.sub(layout.labels[i] for i in axes))


def clipped_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, descending, with tiny negatives set to zero."""
    w = np.linalg.eigvalsh(matrix)[::-1]
    floor = config.TOLERANCES.eigenvalue_floor
    if w.size and w[-1] < floor:
        raise InvariantViolation(f"eigenvalue {w[-1]!r} below floor {floor}")
    return np.where(w < 0.0, 0.0, w)


def spectrum(rho: DensityMatrix) -> np.ndarray:
    return clipped_eigenvalues(rho.matrix)


def _check_bipartite_target(rho: DensityMatrix, basis: MeasurementBasis) -> int:
    axis = rho.layout.index(basis.target)
    if rho.layout.dims[axis] != basis.dim:
        raise ValueError(
            f"basis of dimension {basis.dim} does not fit subsystem "
            f"{basis.target!r} of dimension {rho.layout.dims[axis]}"
        )
    if len(rho.layout.dims) < 2:
        raise ValueError("conditioning needs at least two subsystems")
    return axis


def _conditional_blocks(matrix: np.ndarray, dims: Sequence[int], axis: int, vectors: np.ndarray) -> np.ndarray:
    """Unnormalized conditional matrices ``<C_j| rho |C_j>`` for every column of ``vectors``.

    Returns an array of shape ``(n_outcomes, d_rest, d_rest)``.
    """
    n = len(dims)
    rest = [i for i in range(n) if i != axis]
    d = dims[axis]
    dr = int(np.prod([dims[i] for i in rest]))
    t = np.asarray(matrix).reshape(tuple(dims) * 2)
    perm = [axis] + rest
    t = t.transpose(perm + [n + i for i in perm]).reshape(d, dr, d, dr)
    return np.einsum("aj,bj,axby->jxy", vectors.conj(), vectors, t)


def condition(rho: DensityMatrix, basis: MeasurementBasis, outcome: int) -> Conditional:
    """Probability and normalized state of the rest after projecting ``basis.target`` onto outcome ``j``."""
    axis = _check_bipartite_target(rho, basis)
    if not 0 <= outcome < basis.dim:
        raise IndexError(f"outcome {outcome} out of range for basis of dimension {basis.dim}")
    block = _conditional_blocks(rho.matrix, rho.layout.dims, axis, basis.vectors[:, [outcome]])[0]
    p = float(np.trace(block).real)
    if p < config.TOLERANCES.zero_probability:
        return Conditional(0.0, None)
    block = block / p
    block = 0.5 * (block + block.conj().T)
    rest_labels = [l for l in rho.layout.labels if l != basis.target]
    return Conditional(p, DensityMatrix(block, rho.layout.sub(rest_labels)))
