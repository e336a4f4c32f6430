"""Environment as witness: branching states, redundancy ratios and their growth.

A :class:`BranchingScenario` couples a system ``S`` to environment
subsystems ``E0, E1, ...`` through controlled shifts, or passes records
between environment subsystems. The global state stays pure; all mixedness
comes from partial traces when the redundancy is analysed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from . import config
from ._optimize import multistart_minimize, quasi_random_starts, unitary_from_params
from .discord import _conditional_entropy_raw
from .dynamics import CShiftSpec, interaction_unitary
from .errors import DimensionCapError, InvariantViolation
from .infotheory import entropy_of_eigenvalues
from .qstate import (
    MeasurementBasis,
    PureState,
    SubsystemLayout,
    apply_unitary,
    clipped_eigenvalues,
    reduced_density,
)
from .randomness import make_rng

__all__ = [
    "Event",
    "BranchingScenario",
    "RedundancyReport",
    "env_label",
    "initial_state",
    "evolve",
    "redundancy",
    "redundancy_I",
    "redundancy_J",
    "maximize_redundancy_J",
    "redundancy_rate",
    "partition",
    "record_count",
]


def env_label(k: int) -> str:
    return f"E{k}"


@dataclass(frozen=True)
class Event:
    """One interaction: ``source`` controls a shift of ``target``.

    ``fraction`` scales the action relative to a perfect shift
    (``fraction * gain * 2 pi / N``); 1 writes a full record.
    """

    source: str
    target: str
    time: float
    gain: int = 1
    fraction: float = 1.0

    @property
    def kind(self) -> str:
        return "couple" if self.source == "S" else "transfer"


@dataclass(frozen=True)
class BranchingScenario:
    system_amplitudes: tuple[complex, ...]
    env_dims: tuple[int, ...]
    schedule: tuple[Event, ...] = ()
    start_time: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.system_amplitudes, dtype=complex)
        object.__setattr__(self, "system_amplitudes", tuple(amps))
        object.__setattr__(self, "env_dims", tuple(int(d) for d in self.env_dims))
        object.__setattr__(self, "schedule", tuple(self.schedule))
        if abs(np.linalg.norm(amps) - 1.0) > config.TOLERANCES.norm:
            raise InvariantViolation("system amplitudes must be normalized")
        total = amps.size * int(np.prod(self.env_dims)) if self.env_dims else amps.size
        if total > config.TOLERANCES.max_dimension:
            raise DimensionCapError(
                f"total dimension {total} exceeds cap {config.TOLERANCES.max_dimension}"
            )
        labels = set(self.layout.labels)
        last = self.start_time
        for ev in self.schedule:
            if ev.source not in labels or ev.target not in labels:
                raise ValueError(f"event {ev} names an unknown subsystem")
            if ev.source == ev.target or ev.target == "S":
                raise ValueError(f"event {ev} must target an environment subsystem other than its source")
            if not 0.0 <= ev.fraction <= 1.0:
                raise ValueError(f"event fraction {ev.fraction} outside [0, 1]")
            if ev.time < last:
                raise InvariantViolation("event timestamps must be non-decreasing")
            last = ev.time

    @property
    def system_dim(self) -> int:
        return len(self.system_amplitudes)

    @property
    def layout(self) -> SubsystemLayout:
        dims = (self.system_dim,) + self.env_dims
        return SubsystemLayout(dims, ("S",) + tuple(env_label(k) for k in range(len(self.env_dims))))

    def collisions(self) -> list[Event]:
        """Full-record events whose target dial is too short for ``source_dim * gain`` records."""
        layout = self.layout
        return [
            ev for ev in self.schedule
            if ev.fraction == 1.0 and layout.dim(ev.source) * ev.gain > layout.dim(ev.target)
        ]


def initial_state(scenario: BranchingScenario) -> PureState:
    layout = scenario.layout
    psi = np.zeros(layout.size, dtype=complex)
    stride = layout.size // scenario.system_dim
    psi[::stride] = scenario.system_amplitudes
    return PureState(psi, layout)


def evolve(scenario: BranchingScenario) -> list[tuple[float, PureState]]:
    """Global state at the start time and after every event."""
    state = initial_state(scenario)
    layout = scenario.layout
    out = [(scenario.start_time, state)]
    for ev in scenario.schedule:
        n, N = layout.dim(ev.source), layout.dim(ev.target)
        spec = CShiftSpec(n, N, ev.gain, action=ev.fraction * ev.gain * 2 * math.pi / N)
        state = apply_unitary(state, interaction_unitary(spec), [ev.source, ev.target])
        out.append((ev.time, state))
    return out


@dataclass(frozen=True)
class RedundancyReport:
    """Redundancy of the system's records across environment fragments.

    ``R_I`` sums the mutual information of every fragment with ``S`` and
    divides by ``H_S``. When ``H_S`` vanishes the ratio is 0/0; it is then
    reported as 0 and ``undefined`` carries the reason. ``pure_split`` is
    set when a single fragment holds the whole environment of a pure global
    state, where ``I(S:E) = 2 H_S`` and ``R_I = 2``.
    """

    R_I: float
    H_S: float
    mutual_informations: tuple[float, ...]
    fragments: tuple[tuple[str, ...], ...]
    R_J: float | None = None
    J: tuple[float, ...] | None = None
    basis: MeasurementBasis | None = None
    timestamp: float | None = None
    undefined: str | None = None
    pure_split: bool = False
    converged: bool = True
    records: int = 0


def _fragments(state: PureState, system: str, grouping) -> list[tuple[str, ...]]:
    env = [l for l in state.layout.labels if l != system]
    if grouping is None:
        return [(l,) for l in env]
    groups = [tuple(g) for g in grouping]
    flat = [l for g in groups for l in g]
    if len(flat) != len(set(flat)):
        raise ValueError("environment groups overlap")
    if set(flat) != set(env):
        raise ValueError(f"grouping {groups} does not cover environment {env}")
    if any(not g for g in groups):
        raise ValueError("empty environment group")
    return groups


def _pair_states(state: PureState, system: str, fragments) -> list[np.ndarray]:
    return [_system_first(state, system, frag) for frag in fragments]


def _system_first(state: PureState, system: str, frag) -> np.ndarray:
    """Reduced matrix on ``system`` plus ``frag`` with the system as the leading factor."""
    rho = reduced_density(state, [system, *frag])
    labels = rho.layout.labels
    dims = rho.layout.dims
    order = [labels.index(system)] + [i for i, l in enumerate(labels) if l != system]
    n = len(dims)
    t = rho.matrix.reshape(tuple(dims) * 2).transpose(order + [n + i for i in order])
    return t.reshape(rho.dim, rho.dim)


def _entropy_matrix(m: np.ndarray, base: float) -> float:
    return entropy_of_eigenvalues(clipped_eigenvalues(m), base)


def record_count(report: RedundancyReport, threshold: float = 0.1) -> int:
    """Fragments whose mutual information with ``S`` exceeds ``threshold * H_S``."""
    cut = threshold * report.H_S
    return sum(1 for i in report.mutual_informations if i > cut and i > 1e-12)


def redundancy(state: PureState, system: str = "S", basis: MeasurementBasis | None = None,
               grouping=None, timestamp: float | None = None, base: float = 2.0,
               record_threshold: float = 0.1) -> RedundancyReport:
    """Mutual-information redundancy, plus the measurement-based one when ``basis`` is given.

    With ``basis`` on ``S``, each fragment contributes
    ``J_k = H(E_k) - H(E_k | S measured in basis)``.
    """
    fragments = _fragments(state, system, grouping)
    n = state.layout.dim(system)
    rho_s = reduced_density(state, [system]).matrix
    h_s = _entropy_matrix(rho_s, base)
    pairs = _pair_states(state, system, fragments)
    infos, js = [], []
    for frag, m in zip(fragments, pairs):
        d_e = m.shape[0] // n
        t = m.reshape(n, d_e, n, d_e)
        rho_e = np.einsum("iaib->ab", t)
        h_e = _entropy_matrix(rho_e, base)
        infos.append(h_s + h_e - _entropy_matrix(m, base))
        if basis is not None:
            h_cond = _conditional_entropy_raw(m, (n, d_e), 0, basis.vectors, base)
            js.append(h_e - h_cond)
    undefined = None
    if h_s <= config.TOLERANCES.zero_entropy:
        undefined = "H(S) = 0: the system is pure, so the redundancy ratio is 0/0"
        r_i = 0.0
        r_j = 0.0 if basis is not None else None
    else:
        r_i = sum(infos) / h_s
        r_j = sum(js) / h_s if basis is not None else None
    pure_split = len(fragments) == 1 and len(fragments[0]) == len(state.layout.labels) - 1
    report = RedundancyReport(
        R_I=float(r_i), H_S=float(h_s), mutual_informations=tuple(float(i) for i in infos),
        fragments=tuple(fragments), R_J=None if r_j is None else float(r_j),
        J=tuple(float(j) for j in js) if basis is not None else None, basis=basis,
        timestamp=timestamp, undefined=undefined, pure_split=pure_split,
    )
    return _with_records(report, record_threshold)


def _with_records(report: RedundancyReport, threshold: float) -> RedundancyReport:
    return replace(report, records=record_count(report, threshold))


def redundancy_I(state: PureState, system: str = "S", **kwargs) -> RedundancyReport:
    return redundancy(state, system, None, **kwargs)


def redundancy_J(state: PureState, system: str = "S", basis: MeasurementBasis | None = None,
                 **kwargs) -> RedundancyReport:
    if basis is None:
        basis = MeasurementBasis.computational(system, state.layout.dim(system))
    if basis.target != system:
        raise ValueError(f"basis measures {basis.target!r}, expected the system {system!r}")
    return redundancy(state, system, basis, **kwargs)


def maximize_redundancy_J(state: PureState, system: str = "S", starts: int = 64,
                          polish: int | None = 8, seed: int = 0, xatol: float = 1e-8,
                          grouping=None, base: float = 2.0) -> RedundancyReport:
    """Search the system basis that maximizes the measurement-based redundancy.

    Fragment states are computed once; the search then only re-conditions
    the small ``S E_k`` matrices. Bases are parametrized as for discord.
    """
    fragments = _fragments(state, system, grouping)
    n = state.layout.dim(system)
    pairs = _pair_states(state, system, fragments)
    h_es = []
    for m in pairs:
        d_e = m.shape[0] // n
        h_es.append(_entropy_matrix(np.einsum("iaib->ab", m.reshape(n, d_e, n, d_e)), base))

    def negative_total_j(x):
        u = unitary_from_params(x, n)
        total = 0.0
        for m, h_e in zip(pairs, h_es):
            total += h_e - _conditional_entropy_raw(m, (n, m.shape[0] // n), 0, u, base)
        return -total

    rng = make_rng(seed)
    x0 = quasi_random_starts(starts, n * n, rng)
    res = multistart_minimize(negative_total_j, x0, xatol=xatol, polish=polish)
    q, r = np.linalg.qr(unitary_from_params(res.x, n))
    basis = MeasurementBasis(system, q * (np.diag(r) / np.abs(np.diag(r))))
    report = redundancy(state, system, basis, grouping=grouping, base=base)
    return replace(report, converged=res.converged)


def redundancy_rate(trajectory: Sequence[tuple[float, PureState]], system: str = "S",
                    basis: MeasurementBasis | None = None) -> list[tuple[float, float]]:
    """Time derivative of ``R_I`` (or of ``R_J`` in a fixed ``basis``) along a trajectory.

    Central differences inside, one-sided at the ends.
    """
    if len(trajectory) < 2:
        raise ValueError("need at least two trajectory points")
    times = np.array([t for t, _ in trajectory], dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("trajectory timestamps must be strictly increasing")
    if basis is None:
        values = [redundancy(s, system).R_I for _, s in trajectory]
    else:
        values = [redundancy(s, system, basis).R_J for _, s in trajectory]
    rate = np.gradient(np.asarray(values), times)
    return [(float(t), float(r)) for t, r in zip(times, rate)]


def partition(state: PureState, grouping: Iterable[Iterable[str]], system: str = "S",
              basis: MeasurementBasis | None = None) -> RedundancyReport:
    """Redundancy with each group of environment subsystems treated as a single fragment."""
    return redundancy(state, system, basis, grouping=[tuple(g) for g in grouping])
