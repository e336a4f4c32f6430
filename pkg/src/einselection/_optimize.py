"""Multi-start gradient-free minimization and unitary parametrizations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize
from scipy.stats import qmc


@dataclass
class MultiStartResult:
    x: np.ndarray
    fun: float
    converged: bool
    starts: list          # (x0, f(x0)) per start
    locals: list          # (x, f(x), success) per local run


def quasi_random_starts(n_starts: int, n_params: int, rng: np.random.Generator,
                        low: float = -np.pi, high: float = np.pi) -> np.ndarray:
    sampler = qmc.Sobol(d=n_params, scramble=True, seed=rng)
    m = int(np.ceil(np.log2(max(n_starts, 1))))
    pts = sampler.random_base2(m)[:n_starts]
    return qmc.scale(pts, [low] * n_params, [high] * n_params)


def multistart_minimize(fun, starts: np.ndarray, method: str = "Nelder-Mead",
                        xatol: float = 1e-8, fatol: float = 1e-12, maxiter: int | None = None,
                        polish: int | None = None) -> MultiStartResult:
    """Minimize ``fun`` from every row of ``starts``.

    ``polish`` limits local refinement to the best ``polish`` starting points;
    ``None`` refines all of them.
    """
    starts = np.atleast_2d(starts)
    fstart = np.array([fun(x) for x in starts])
    order = np.argsort(fstart, kind="stable")
    if polish is not None:
        order = order[:polish]
    n = starts.shape[1]
    maxiter = maxiter or 400 * n
    runs = []
    for i in order:
        if method == "Nelder-Mead":
            opts = {"xatol": xatol, "fatol": fatol, "maxiter": maxiter, "maxfev": 2 * maxiter}
            res = minimize(fun, starts[i], method=method, options=opts)
            # restart once from the optimum to escape a collapsed simplex
            res2 = minimize(fun, res.x, method=method, options=opts)
            if res2.fun <= res.fun:
                res = res2
        else:
            res = minimize(fun, starts[i], method=method,
                           options={"xtol": xatol, "ftol": fatol, "maxiter": maxiter})
        runs.append((res.x, float(res.fun), bool(res.success)))
    candidates = [(x, f, ok) for x, f, ok in runs]
    candidates += [(starts[i], float(fstart[i]), False) for i in range(len(starts))]
    best = min(candidates, key=lambda c: c[1])
    converged = any(ok for _, _, ok in runs)
    return MultiStartResult(
        x=np.asarray(best[0]), fun=best[1], converged=converged,
        starts=[(starts[i], float(fstart[i])) for i in range(len(starts))], locals=runs,
    )


def hermitian_from_params(params: np.ndarray, d: int) -> np.ndarray:
    """Hermitian ``d x d`` matrix from ``d**2`` reals (diagonal, then real/imag upper parts)."""
    params = np.asarray(params, dtype=float)
    h = np.diag(params[:d]).astype(complex)
    iu = np.triu_indices(d, 1)
    m = len(iu[0])
    h[iu] = params[d:d + m] + 1j * params[d + m:d + 2 * m]
    h[(iu[1], iu[0])] = np.conj(h[iu])
    return h


def unitary_from_params(params: np.ndarray, d: int) -> np.ndarray:
    """``exp(i H(params))``; columns give an orthonormal basis. Over-parametrized by phases."""
    return expm(1j * hermitian_from_params(params, d))


def unit_vector_from_params(params: np.ndarray) -> np.ndarray | None:
    params = np.asarray(params, dtype=float)
    n = params.size // 2
    v = params[:n] + 1j * params[n:]
    norm = np.linalg.norm(v)
    if norm < 1e-300:
        return None
    return v / norm
