"""Measurement-based mutual information, discord, and pointer-basis dephasing.

By default the subsystem named in the measurement basis (normally the
apparatus ``A``) is measured and the entropy of the other one is
conditioned on the outcome. Passing a basis on ``S`` gives the role-swapped
quantity used for environment records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config
from ._optimize import multistart_minimize, quasi_random_starts, unitary_from_params
from .infotheory import entropy, entropy_of_eigenvalues, mutual_information
from .qstate import (
    DensityMatrix,
    MeasurementBasis,
    _check_bipartite_target,
    _conditional_blocks,
    partial_trace,
)
from .randomness import make_rng

__all__ = [
    "DiscordReport",
    "DiscordSearch",
    "DephasingSpec",
    "ClassicalityResult",
    "conditional_entropy",
    "mutual_information_J",
    "discord",
    "minimize_discord",
    "grid_discord_qubit",
    "bloch_basis",
    "basis_angle_degrees",
    "dephase",
    "has_product_eigenbasis",
    "classicality_test",
]


def _other_label(rho: DensityMatrix, measured: str) -> str:
    labels = [l for l in rho.layout.labels if l != measured]
    if len(labels) != 1:
        raise ValueError(f"expected a bipartite state, got layout {rho.layout.labels}")
    return labels[0]


def _conditional_entropy_raw(matrix, dims, axis, vectors, base=2.0) -> float:
    blocks = _conditional_blocks(matrix, dims, axis, vectors)
    probs = np.einsum("jxx->j", blocks).real
    total = 0.0
    zero = config.TOLERANCES.zero_probability
    for p, b in zip(probs, blocks):
        if p < zero:
            continue
        w = np.linalg.eigvalsh(b / p)
        total += p * entropy_of_eigenvalues(np.where(w < 0, 0.0, w), base)
    return total


def conditional_entropy(rho: DensityMatrix, basis: MeasurementBasis, base: float = 2.0) -> float:
    """Average entropy left in the unmeasured subsystem after measuring ``basis.target``.

    Outcomes with probability below the zero-probability tolerance contribute nothing.
    """
    axis = _check_bipartite_target(rho, basis)
    _other_label(rho, basis.target)
    return _conditional_entropy_raw(rho.matrix, rho.layout.dims, axis, basis.vectors, base)


def mutual_information_J(rho: DensityMatrix, basis: MeasurementBasis, base: float = 2.0) -> float:
    """``H(X) - H(X | measured)`` where ``X`` is the subsystem not measured."""
    other = _other_label(rho, basis.target)
    return entropy(partial_trace(rho, [other]), base) - conditional_entropy(rho, basis, base)


@dataclass(frozen=True)
class DiscordReport:
    symmetric_I: float
    asymmetric_J: float
    discord: float
    basis: MeasurementBasis
    minimized: bool = False
    converged: bool = True
    trivial: bool = False
    alternatives: tuple[MeasurementBasis, ...] = ()
    oracle_discord: float | None = None


def discord(rho: DensityMatrix, basis: MeasurementBasis, base: float = 2.0) -> DiscordReport:
    i = mutual_information(rho, base=base)
    j = mutual_information_J(rho, basis, base)
    return DiscordReport(i, j, i - j, basis, minimized=False)


@dataclass
class DiscordSearch:
    """Settings for :func:`minimize_discord`.

    ``grid_step_deg`` enables the Bloch-sphere grid cross-check when the
    measured subsystem is a qubit; ``None`` disables it.
    """

    measured: str | None = None
    starts: int = 128
    polish: int | None = 16
    seed: int = 0
    xatol: float = 1e-7
    grid_step_deg: float | None = 1.0
    alternative_tol: float = 1e-6
    trivial_tol: float = 1e-9


def bloch_basis(theta: float, phi: float) -> np.ndarray:
    """Columns ``|n>``, ``|-n>`` for the Bloch direction ``(theta, phi)``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, -s * e.conjugate()], [s * e, c]], dtype=complex)


def _bloch_grid(step_deg: float) -> tuple[np.ndarray, np.ndarray]:
    # n and -n give the same basis, so the upper hemisphere suffices
    thetas = np.deg2rad(np.arange(0.0, 90.0 + 1e-9, step_deg))
    phis = np.deg2rad(np.arange(0.0, 360.0, step_deg))
    t, p = np.meshgrid(thetas, phis, indexing="ij")
    return t.reshape(-1), p.reshape(-1)


def grid_discord_qubit(rho: DensityMatrix, measured: str, step_deg: float = 1.0,
                       base: float = 2.0) -> tuple[float, float, float]:
    """Brute-force minimum discord over Bloch directions on a ``step_deg`` grid.

    Returns ``(discord, theta, phi)`` of the best grid point.
    """
    axis = rho.layout.index(measured)
    if rho.layout.dims[axis] != 2:
        raise ValueError("grid oracle needs a qubit measured subsystem")
    other = _other_label(rho, measured)
    i_sym = mutual_information(rho, base=base)
    h_other = entropy(partial_trace(rho, [other]), base)
    thetas, phis = _bloch_grid(step_deg)
    c = np.cos(thetas / 2)
    s = np.sin(thetas / 2) * np.exp(1j * phis)
    # |n> = (c, s), |-n> = (-s*, c)
    up = np.stack([c, s], axis=1)
    down = np.stack([-s.conj(), c + 0j], axis=1)
    dims = rho.layout.dims
    n = len(dims)
    rest = [k for k in range(n) if k != axis]
    dr = int(np.prod([dims[k] for k in rest]))
    t = rho.matrix.reshape(tuple(dims) * 2)
    perm = [axis] + rest
    t = t.transpose(perm + [n + k for k in perm]).reshape(2, dr, 2, dr)
    h_cond = np.zeros(thetas.size)
    for vec in (up, down):
        blocks = np.einsum("ga,gb,axby->gxy", vec.conj(), vec, t)
        probs = np.einsum("gxx->g", blocks).real
        w = np.linalg.eigvalsh(blocks)
        w = np.where(w < 0, 0.0, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(probs[:, None] > 1e-15, w / probs[:, None], 0.0)
            terms = np.where(q > 0, q * np.log(q), 0.0)
        h_cond += probs * (-terms.sum(axis=1) / math.log(base))
    d = i_sym - (h_other - h_cond)
    k = int(np.argmin(d))
    return float(d[k]), float(thetas[k]), float(phis[k])


def _measured_label(rho: DensityMatrix, measured: str | None) -> str:
    if measured is not None:
        rho.layout.index(measured)
        return measured
    if len(rho.layout.labels) != 2:
        raise ValueError("expected a bipartite state")
    return rho.layout.labels[1]


def minimize_discord(rho: DensityMatrix, search: DiscordSearch | None = None,
                     base: float = 2.0) -> DiscordReport:
    """Minimize discord over complete rank-1 projective measurements of one subsystem.

    Bases are the columns of ``exp(i H)`` with ``H`` Hermitian (``d**2`` real
    parameters). Nelder-Mead refines the best of ``search.starts`` Sobol
    starting points. For a qubit the dense Bloch-sphere grid minimum is
    reported alongside as ``oracle_discord``; it never feeds the optimizer.
    """
    search = search or DiscordSearch()
    measured = _measured_label(rho, search.measured)
    axis = rho.layout.index(measured)
    other = _other_label(rho, measured)
    d = rho.layout.dims[axis]
    dims = rho.layout.dims
    i_sym = mutual_information(rho, base=base)
    h_other = entropy(partial_trace(rho, [other]), base)
    matrix = rho.matrix

    def objective(x):
        u = unitary_from_params(x, d)
        return i_sym - (h_other - _conditional_entropy_raw(matrix, dims, axis, u, base))

    rng = make_rng(search.seed)
    starts = quasi_random_starts(search.starts, d * d, rng)
    res = multistart_minimize(objective, starts, xatol=search.xatol, polish=search.polish)
    best_u = unitary_from_params(res.x, d)
    best = res.fun

    oracle = None
    if d == 2 and search.grid_step_deg is not None:
        oracle = grid_discord_qubit(rho, measured, search.grid_step_deg, base)[0]

    basis = MeasurementBasis(measured, _orthonormalize(best_u))
    alternatives = []
    for x, f, _ in res.locals:
        if f - best <= search.alternative_tol:
            u = _orthonormalize(unitary_from_params(x, d))
            if all(basis_angle_degrees(u, a.vectors) > 1.0 for a in [basis, *alternatives]):
                alternatives.append(MeasurementBasis(measured, u))
    return DiscordReport(
        symmetric_I=i_sym,
        asymmetric_J=i_sym - best,
        discord=best,
        basis=basis,
        minimized=True,
        converged=res.converged,
        trivial=i_sym < search.trivial_tol,
        alternatives=tuple(alternatives),
        oracle_discord=oracle,
    )


def _orthonormalize(u: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(u)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def basis_angle_degrees(u: np.ndarray, v: np.ndarray) -> float:
    """Largest angle between matched vectors of two bases, ignoring order and phases.

    Vectors are matched greedily by overlap; the angle of a pair is
    ``arccos |<u_j|v_k>|``. For qubits this is half the Bloch-sphere angle
    between the measurement axes.
    """
    ov = np.abs(np.asarray(u).conj().T @ np.asarray(v))
    from scipy.optimize import linear_sum_assignment

    rows, cols = linear_sum_assignment(-ov)
    return float(np.degrees(np.max(np.arccos(np.clip(ov[rows, cols], 0.0, 1.0)))))


@dataclass(frozen=True)
class DephasingSpec:
    """Dephasing in the product of two pointer bases with strength ``strength`` in [0, 1].

    Intermediate strengths interpolate linearly between no dephasing and
    complete loss of the off-diagonal terms.
    """

    pointer_basis_S: MeasurementBasis
    pointer_basis_A: MeasurementBasis
    strength: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError(f"dephasing strength must lie in [0, 1], got {self.strength}")


def dephase(rho: DensityMatrix, spec: DephasingSpec) -> DensityMatrix:
    """Scale every off-diagonal element in the pointer product basis by ``1 - strength``."""
    labels = rho.layout.labels
    bs, ba = spec.pointer_basis_S, spec.pointer_basis_A
    if (bs.target, ba.target) != tuple(labels):
        raise ValueError(f"pointer bases on {(bs.target, ba.target)} do not match layout {labels}")
    w = np.kron(bs.vectors, ba.vectors)
    m = w.conj().T @ rho.matrix @ w
    diag = np.diag(np.diag(m))
    m = (1.0 - spec.strength) * m + spec.strength * diag
    out = w @ m @ w.conj().T
    return DensityMatrix(0.5 * (out + out.conj().T), rho.layout)


def has_product_eigenbasis(rho: DensityMatrix, basis: MeasurementBasis, atol: float = 1e-6) -> bool:
    """True when ``rho`` is block diagonal in ``basis``, so its eigenvectors can be taken as products."""
    axis = _check_bipartite_target(rho, basis)
    dims = rho.layout.dims
    n = len(dims)
    rest = [k for k in range(n) if k != axis]
    d = dims[axis]
    dr = int(np.prod([dims[k] for k in rest]))
    t = rho.matrix.reshape(tuple(dims) * 2)
    perm = [axis] + rest
    t = t.transpose(perm + [n + k for k in perm]).reshape(d, dr, d, dr)
    v = basis.vectors
    blocks = np.einsum("aj,bk,axby->jxky", v.conj(), v, t)
    off = blocks.copy()
    for j in range(d):
        off[j, :, j, :] = 0.0
    return bool(np.max(np.abs(off)) <= atol)


@dataclass(frozen=True)
class ClassicalityResult:
    classical: bool
    basis: MeasurementBasis | None
    trivial: bool
    product_eigenbasis: bool
    report: DiscordReport


def classicality_test(rho: DensityMatrix, tolerance: float = 1e-6,
                      search: DiscordSearch | None = None) -> ClassicalityResult:
    """Zero-discord test with a witnessing measurement basis.

    ``trivial`` marks states with no correlation at all; there every basis
    witnesses zero discord.
    """
    report = minimize_discord(rho, search)
    ok = report.discord < tolerance
    basis = report.basis if ok else None
    product = has_product_eigenbasis(rho, report.basis, atol=max(math.sqrt(tolerance), 1e-9)) if ok else False
    return ClassicalityResult(ok, basis, report.trivial, product, report)
