"""Random-restart derivative-free search over unit vectors and unitaries.

Each restart draws its starting point from a stream seeded by
``(seed, restart_index)``, so the reduced result does not depend on how
many worker threads ran the restarts or in which order they finished.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_iters: int = 400
    seed: int = 0
    tolerance: float = 1e-10
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1 or self.threads < 1:
            raise ValueError("restarts, max_iters and threads must be positive")


@dataclass
class SearchResult:
    value: float
    point: np.ndarray
    restart: int
    converged: bool
    history: list = field(default_factory=list)  # best value per restart, in restart order
    evaluations: int = 0


def restart_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def _to_vector(x: np.ndarray) -> np.ndarray:
    n = x.size // 2
    v = x[:n] + 1j * x[n:]
    nrm = np.linalg.norm(v)
    if nrm < 1e-300:
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
        return v
    return v / nrm


def _to_reals(v: np.ndarray) -> np.ndarray:
    return np.concatenate([v.real, v.imag])


def hermitian_from_reals(x: np.ndarray, n: int) -> np.ndarray:
    H = np.zeros((n, n), dtype=complex)
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    H[np.diag_indices(n)] = x[:n]
    H[iu] = x[n : n + m] + 1j * x[n + m :]
    return H + np.triu(H, 1).conj().T


def unitary_from_reals(x: np.ndarray, n: int) -> np.ndarray:
    return expm(1j * hermitian_from_reals(x, n))


def _run_restarts(one, cfg: OptimizerConfig, stop_value):
    """Run ``one(index)`` for every restart and reduce by (value, index)."""
    results = []
    if cfg.threads == 1:
        for i in range(cfg.restarts):
            results.append(one(i))
            if stop_value is not None and results[-1][0] <= stop_value:
                break
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(one, range(cfg.restarts)))
        if stop_value is not None:
            # same truncation as the serial loop so both schedules agree
            for i, r in enumerate(results):
                if r[0] <= stop_value:
                    results = results[: i + 1]
                    break
    best = min(range(len(results)), key=lambda i: (results[i][0], i))
    val, point, ok, nfev = results[best]
    return SearchResult(
        value=val,
        point=point,
        restart=best,
        converged=ok,
        history=[r[0] for r in results],
        evaluations=sum(r[3] for r in results),
    )


def minimize_over_states(objective, dim: int, cfg: OptimizerConfig, seeds=(), stop_value=None) -> SearchResult:
    """Minimise ``objective(psi)`` over unit vectors ``psi`` in C^dim.

    ``seeds`` are mandatory starting vectors used for the first restarts;
    remaining restarts start from Haar-random vectors. Nelder-Mead runs on
    the 2*dim real coordinates, normalised inside the objective.
    """
    seeds = [np.asarray(s, dtype=complex) / np.linalg.norm(s) for s in seeds]

    def f(x):
        val = objective(_to_vector(x))
        return val if math.isfinite(val) else -1e300 if val < 0 else 1e300

    def one(i):
        if i < len(seeds):
            x0 = _to_reals(seeds[i])
        else:
            rng = restart_rng(cfg.seed, i)
            x0 = rng.normal(size=2 * dim)
        v0 = _to_vector(x0)
        f0 = objective(v0)
        if stop_value is not None and f0 <= stop_value:
            return f0, v0, True, 1
        res = minimize(
            f,
            x0,
            method="Nelder-Mead",
            options={"maxfev": cfg.max_iters, "xatol": 1e-8, "fatol": cfg.tolerance, "adaptive": True},
        )
        v = _to_vector(res.x)
        val = objective(v)
        if f0 < val:
            return f0, v0, bool(res.success), res.nfev + 2
        return val, v, bool(res.success), res.nfev + 2

    return _run_restarts(one, cfg, stop_value)


def minimize_over_unitaries(objective, n: int, cfg: OptimizerConfig) -> SearchResult:
    """Minimise ``objective(U)`` over n x n unitaries ``U = exp(iH)``.

    Restart 0 starts at the identity.
    """

    def one(i):
        if i == 0:
            x0 = np.zeros(n * n)
        else:
            x0 = restart_rng(cfg.seed, i).normal(scale=math.pi / 2, size=n * n)
        res = minimize(
            lambda x: objective(unitary_from_reals(x, n)),
            x0,
            method="Nelder-Mead",
            options={"maxfev": cfg.max_iters, "xatol": 1e-8, "fatol": cfg.tolerance, "adaptive": True},
        )
        f0 = objective(unitary_from_reals(x0, n))
        if f0 <= res.fun:
            return f0, unitary_from_reals(x0, n), bool(res.success), res.nfev + 1
        return float(res.fun), unitary_from_reals(res.x, n), bool(res.success), res.nfev + 1

    return _run_restarts(one, cfg, None)
