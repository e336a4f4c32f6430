"""Unitaries and Hamiltonians for conditional (controlled-shift) dynamics.

Actions are dimensionless, ``I = g t / hbar`` in radians. The coupling ``g``
and duration ``t`` only ever enter through their product, so every
constructor takes that single number.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import InvariantViolation
from .qstate import PureState, SubsystemLayout

__all__ = [
    "CShiftSpec",
    "Observable",
    "GainOverflowWarning",
    "cnot",
    "negation",
    "hadamard_states",
    "hft",
    "inverse_hft",
    "coefficients_hft",
    "pointer_observable",
    "complementary_observable",
    "system_observable",
    "interaction_hamiltonian",
    "cshift_unitary",
    "interaction_unitary",
    "premeasure",
    "saturating_hamiltonian",
    "saturating_unitary",
    "spectral_exponential",
    "energy_spread",
    "minimal_correlating_action",
]


class GainOverflowWarning(UserWarning):
    """Records wrap around the apparatus dial and collide (``n * G > N``)."""


@dataclass(frozen=True)
class CShiftSpec:
    """Controlled shift of an ``N``-state apparatus by a ``n``-state system with gain ``G``.

    ``action`` defaults to ``G * 2 pi / N``, the value at which the
    interaction realizes a perfect shift.
    """

    n: int
    N: int
    G: int = 1
    action: float | None = None

    def __post_init__(self):
        if self.n < 2 or self.N < 2:
            raise ValueError(f"dimensions must be >= 2, got n={self.n}, N={self.N}")
        if int(self.G) != self.G or self.G < 1:
            raise ValueError(f"gain must be an integer >= 1, got {self.G}")
        if self.action is None:
            object.__setattr__(self, "action", self.G * 2 * math.pi / self.N)

    @property
    def shift_action(self) -> float:
        return self.G * 2 * math.pi / self.N

    @property
    def amplifies(self) -> bool:
        """True when ``n * G <= N``: records fit on the dial without colliding."""
        return self.n * self.G <= self.N

    @property
    def amplifies_strict(self) -> bool:
        return self.n * self.G < self.N


@dataclass(frozen=True)
class Observable:
    matrix: np.ndarray
    label: str

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if np.max(np.abs(m - m.conj().T)) > config.TOLERANCES.hermitian:
            raise InvariantViolation(f"observable on {self.label!r} is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def negation() -> np.ndarray:
    """Swap of the two basis states of a qubit."""
    return np.array([[0, 1], [1, 0]], dtype=complex)


def cnot() -> np.ndarray:
    """Controlled negation, control first: ``|1>|x> -> |1>|not x>``."""
    u = np.eye(4, dtype=complex)
    u[2:, 2:] = negation()
    return u


def hadamard_states() -> tuple[np.ndarray, np.ndarray]:
    """The pair ``(|+>, |->)``."""
    s = 1 / math.sqrt(2)
    return np.array([s, s], dtype=complex), np.array([s, -s], dtype=complex)


def hft(N: int) -> np.ndarray:
    """Hadamard-Fourier transform; column ``k`` is ``|B_k>`` expanded in ``{|A_l>}``.

    Entry ``(l, k)`` is ``exp(2 pi i k l / N) / sqrt(N)``.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    k = np.arange(N)
    return np.exp(2j * np.pi * np.outer(k, k) / N) / math.sqrt(N)


def inverse_hft(N: int) -> np.ndarray:
    return hft(N).conj().T


def coefficients_hft(alpha) -> np.ndarray:
    """Coefficients ``beta_k = <B_k|psi>`` of a state given as ``alpha_n`` in the pointer basis."""
    alpha = np.asarray(alpha, dtype=complex)
    return inverse_hft(alpha.size) @ alpha


def pointer_observable(N: int) -> Observable:
    return Observable(np.diag(np.arange(N, dtype=float)), "A")


def complementary_observable(N: int) -> Observable:
    f = hft(N)
    return Observable(f @ np.diag(np.arange(N, dtype=float)) @ f.conj().T, "A")


def system_observable(n: int) -> Observable:
    return Observable(np.diag(np.arange(n, dtype=float)), "S")


def interaction_hamiltonian(n: int, N: int) -> np.ndarray:
    """``s (x) B`` per unit coupling, on the ``n*N`` joint space (system first)."""
    return np.kron(system_observable(n).matrix, complementary_observable(N).matrix)


def _shift_permutation(n: int, N: int, G: int) -> np.ndarray:
    u = np.zeros((n * N, n * N), dtype=complex)
    for j in range(n):
        for k in range(N):
            u[j * N + (k + G * j) % N, j * N + k] = 1.0
    return u


def cshift_unitary(spec: CShiftSpec) -> np.ndarray:
    """Permutation ``|s_j>|A_k> -> |s_j>|A_{(k + G j) mod N}>``."""
    return _shift_permutation(spec.n, spec.N, spec.G)


def interaction_unitary(spec: CShiftSpec) -> np.ndarray:
    """``exp(-i I s (x) B)`` evaluated in the joint eigenbasis ``{|s_j>|B_l>}``."""
    n, N = spec.n, spec.N
    phases = np.exp(-1j * spec.action * np.outer(np.arange(n), np.arange(N)).reshape(-1))
    f = np.kron(np.eye(n), hft(N))
    return (f * phases) @ f.conj().T


def premeasure(system: PureState, N: int, G: int = 1, label: str = "A") -> PureState:
    """Correlate an apparatus prepared in ``|A_0>`` with ``system`` via a perfect c-shift.

    Returns ``sum_i a_i |s_i>|A_{G i mod N}>``. Warns with
    :class:`GainOverflowWarning` when ``n * G > N``.
    """
    n = system.dim
    spec = CShiftSpec(n, N, G)
    if not spec.amplifies:
        warnings.warn(
            f"n*G = {n * G} exceeds N = {N}: apparatus records wrap and collide",
            GainOverflowWarning,
            stacklevel=2,
        )
    out = np.zeros((n, N), dtype=complex)
    for i, a in enumerate(system.amplitudes):
        out[i, (G * i) % N] += a
    sys_label = system.layout.labels[0] if len(system.layout.labels) == 1 else "S"
    return PureState(out.reshape(-1), SubsystemLayout((n, N), (sys_label, label)))


def saturating_hamiltonian(N: int) -> np.ndarray:
    """``i sum_k |s_k><s_k| (x) sum_l (|A_k><A_l| - |A_l><A_k|)`` per unit coupling.

    The system and apparatus both have dimension ``N``.
    """
    h = np.zeros((N * N, N * N), dtype=complex)
    for k in range(N):
        gen = np.zeros((N, N), dtype=complex)
        gen[k, :] += 1.0
        gen[:, k] -= 1.0
        h[k * N:(k + 1) * N, k * N:(k + 1) * N] = 1j * gen
    return h


def spectral_exponential(h: np.ndarray, action: float) -> np.ndarray:
    """``exp(-i action h)`` for Hermitian ``h`` via its eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * action * w)) @ v.conj().T


def saturating_unitary(N: int, action: float) -> np.ndarray:
    return spectral_exponential(saturating_hamiltonian(N), action)


def energy_spread(h: np.ndarray, psi: np.ndarray) -> float:
    """Standard deviation of ``h`` in the pure state ``psi``."""
    hp = h @ psi
    mean = np.vdot(psi, hp).real
    second = np.vdot(hp, hp).real
    return math.sqrt(max(second - mean**2, 0.0))


def minimal_correlating_action(N: int, ready=None, grid: int = 2001) -> dict:
    """Shortest evolution under the saturating Hamiltonian that writes perfect records.

    Every system state ``|s_k>`` starts with the apparatus in ``ready``
    (default: the uniform superposition, which is the optimal ready state).
    The coupling time ``gt`` is located numerically by maximizing the mean
    record fidelity ``|<A_k| U |s_k, ready>|^2``; the action spent is the
    time-integrated energy spread ``gt * Delta H`` averaged over the sectors.
    Returns ``gt``, ``action``, the worst sector ``fidelity`` reached, and
    the ``bound`` ``arcsin sqrt(1 - 1/N)`` for comparison.
    """
    from scipy.optimize import minimize_scalar

    h = saturating_hamiltonian(N)
    ready = np.full(N, 1 / math.sqrt(N), dtype=complex) if ready is None else np.asarray(ready, complex)
    inits = [np.kron(np.eye(N)[k], ready) for k in range(N)]
    targets = [np.kron(np.eye(N)[k], np.eye(N)[k]) for k in range(N)]
    w, v = np.linalg.eigh(h)
    coeffs = [v.conj().T @ p for p in inits]
    tv = [t @ v for t in targets]

    def infidelity(gt):
        ph = np.exp(-1j * gt * w)
        return 1.0 - np.mean([abs(np.dot(t, ph * c)) ** 2 for t, c in zip(tv, coeffs)])

    # the dynamics is periodic, so take the first sampled dip close to the best one
    ts = np.linspace(0.0, math.pi, grid)
    vals = np.array([infidelity(t) for t in ts])
    dips = [i for i in range(1, grid - 1) if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]]
    best = vals.min()
    i = next((i for i in dips if vals[i] <= best + 1e-3), int(np.argmin(vals)))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, grid - 1)]
    res = minimize_scalar(infidelity, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    gt = float(res.x)
    spreads = [energy_spread(h, p) for p in inits]
    u = spectral_exponential(h, gt)
    fid = min(abs(np.vdot(t, u @ p)) ** 2 for t, p in zip(targets, inits))
    return {
        "gt": gt,
        "action": gt * float(np.mean(spreads)),
        "fidelity": float(fid),
        "bound": math.asin(math.sqrt(1 - 1 / N)),
    }
