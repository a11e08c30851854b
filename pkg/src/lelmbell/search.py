"""Numerical search for detector modes satisfying the pairwise orthogonality
criteria of a Bell-state set.

A found instance is evidence only; infeasibility is never certified here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .detectors import gram_condition
from .fock import BOSON, DetectorMode, DomainError, bell_state, exchange_sign
from .symmetry import BellSet, enumerate_sets

INSTANCE_FOUND = "instance-found"
NO_INSTANCE_FOUND = "no-instance-found"
EXACT_INFEASIBLE = "exact-infeasible"

NO_INSTANCE_THRESHOLD = 1e-6


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 200
    max_iterations: int = 500
    accept_tolerance: float = 1e-16
    seed: int = 0
    statistics: str = BOSON

    def __post_init__(self):
        if self.restarts < 1:
            raise DomainError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        if not self.accept_tolerance > 0:
            raise DomainError("accept_tolerance must be positive")
        exchange_sign(self.statistics)


@dataclass(frozen=True)
class FeasibilityReport:
    set: BellSet
    status: str
    best_residual: float
    witness: DetectorMode | None
    restarts_used: int
    history: tuple[float, ...] = field(default=(), repr=False)  # running best per restart


def residual(s: BellSet, mode: DetectorMode, statistics: str) -> float:
    """Sum over unordered pairs of ``|<Psi_k|c^dagger c|Psi_l>|^2``."""
    if not mode.is_unit:
        raise DomainError("residual is defined for unit-norm modes")
    return float(
        sum(abs(gram_condition(k, l, mode, statistics)) ** 2 for k, l in itertools.combinations(s.labels, 2))
    )


def annihilation_maps(s: BellSet, statistics: str) -> np.ndarray:
    """Stack of matrices ``M_k`` with ``annihilate(nu, Psi_k) = M_k @ nu``."""
    return np.array([np.sqrt(2) * bell_state(x, statistics).amp.T for x in s.labels])


class OverlapProblem:
    """Minimize ``sum_{k<l} |<M_k v, M_l v>|^2`` over unit vectors ``v``.

    Real parameters are ``x = (Re v, Im v)``.
    """

    def __init__(self, maps: np.ndarray):
        maps = np.asarray(maps, dtype=complex)
        self.n = maps.shape[2]
        pairs = list(itertools.combinations(range(len(maps)), 2))
        self.pairs = pairs
        if pairs:
            self.Q = np.array([maps[k].conj().T @ maps[l] for k, l in pairs])
        else:
            self.Q = np.zeros((0, self.n, self.n), dtype=complex)
        self.QT = np.transpose(self.Q, (0, 2, 1))

    def to_complex(self, X: np.ndarray) -> np.ndarray:
        return X[..., : self.n] + 1j * X[..., self.n :]

    def grams(self, V: np.ndarray) -> np.ndarray:
        """Pairwise overlaps for a batch ``V`` of shape (R, n): returns (R, P)."""
        QV = np.einsum("pij,rj->rpi", self.Q, V)
        return np.einsum("ri,rpi->rp", V.conj(), QV)

    def residual(self, v: np.ndarray) -> float:
        return float(np.sum(np.abs(self.grams(np.atleast_2d(v))) ** 2))

    def residuals_and_jacobian(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        V = self.to_complex(X)
        QV = np.einsum("pij,rj->rpi", self.Q, V)
        QTc = np.einsum("pij,rj->rpi", self.QT, V.conj())
        G = np.einsum("ri,rpi->rp", V.conj(), QV)
        dA = QV + QTc  # dG/d(Re v)
        dB = -1j * QV + 1j * QTc  # dG/d(Im v)
        Jc = np.concatenate([dA, dB], axis=2)  # (R, P, 2n)
        f = np.concatenate([G.real, G.imag], axis=1)
        J = np.concatenate([Jc.real, Jc.imag], axis=1)
        return f, J

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Gradient of the residual with respect to the real parameters."""
        f, J = self.residuals_and_jacobian(np.atleast_2d(x))
        return 2 * np.einsum("rpk,rp->rk", J, f)[0]


@dataclass(frozen=True)
class MinimizeResult:
    best_x: np.ndarray
    best_residual: float
    residuals: np.ndarray  # final residual of each restart, in restart order
    history: tuple[float, ...]
    restarts_used: int


def random_unit_start(rng: np.random.Generator, restarts: int, n: int) -> np.ndarray:
    """Standard complex Gaussian draws projected to the unit sphere, as real (R, 2n)."""
    V = rng.standard_normal((restarts, n)) + 1j * rng.standard_normal((restarts, n))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    return np.concatenate([V.real, V.imag], axis=1)


def minimize_overlaps(
    problem: OverlapProblem,
    rng: np.random.Generator,
    restarts: int,
    max_iterations: int,
    accept_tolerance: float,
) -> MinimizeResult:
    """Damped least squares on the sphere, all restarts advanced together.

    Steps are taken in the tangent space of the current point and the result
    is projected back to unit norm. Damping shrinks on accepted steps and
    grows on rejected ones.
    """
    X = random_unit_start(rng, restarts, problem.n)
    if not problem.pairs:
        zeros = np.zeros(restarts)
        return MinimizeResult(X[0], 0.0, zeros, (0.0,), 1)

    f, J = problem.residuals_and_jacobian(X)
    cost = np.sum(f**2, axis=1)
    lam = np.full(restarts, 1e-3)
    active = cost > accept_tolerance
    eye = np.eye(2 * problem.n)

    for _ in range(max_iterations):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        x, fa, Ja = X[idx], f[idx], J[idx]
        Jt = Ja - np.einsum("rpk,rk->rp", Ja, x)[:, :, None] * x[:, None, :]
        A = np.einsum("rpk,rpl->rkl", Jt, Jt) + lam[idx, None, None] * eye
        g = np.einsum("rpk,rp->rk", Jt, fa)
        step = -np.linalg.solve(A, g[..., None])[..., 0]
        trial = x + step
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        ft, Jtr = problem.residuals_and_jacobian(trial)
        ct = np.sum(ft**2, axis=1)

        better = ct < cost[idx]
        acc = idx[better]
        X[acc], f[acc], J[acc], cost[acc] = trial[better], ft[better], Jtr[better], ct[better]
        lam[acc] = np.maximum(lam[acc] / 3.0, 1e-12)
        rej = idx[~better]
        lam[rej] *= 4.0

        step_norm = np.linalg.norm(step, axis=1)
        stalled = (lam[idx] > 1e10) | ((step_norm < 1e-13) & better)
        active[idx[stalled]] = False
        active &= cost > accept_tolerance

    hits = np.flatnonzero(cost <= accept_tolerance)
    used = int(hits[0]) + 1 if hits.size else restarts
    running = np.minimum.accumulate(cost[:used])
    best = int(np.argmin(cost[:used]))
    return MinimizeResult(X[best].copy(), float(cost[best]), cost.copy(), tuple(float(v) for v in running), used)


def set_seed_key(s: BellSet) -> int:
    """Bitmask of member positions; a stable per-set stream key."""
    return sum(1 << x.index for x in s.labels)


def set_rng(seed: int, s: BellSet) -> np.random.Generator:
    return np.random.default_rng([seed % 2**64, set_seed_key(s)])


def search_instance(s: BellSet, cfg: SearchConfig = SearchConfig()) -> FeasibilityReport:
    problem = OverlapProblem(annihilation_maps(s, cfg.statistics))
    res = minimize_overlaps(problem, set_rng(cfg.seed, s), cfg.restarts, cfg.max_iterations, cfg.accept_tolerance)
    v = problem.to_complex(res.best_x)
    if res.best_residual <= cfg.accept_tolerance:
        status, witness = INSTANCE_FOUND, DetectorMode(s.d, v / np.linalg.norm(v))
    else:
        status, witness = NO_INSTANCE_FOUND, None
    return FeasibilityReport(s, status, res.best_residual, witness, res.restarts_used, res.history)


def batch_classify(k: int, d: int, cfg: SearchConfig = SearchConfig(), sets: Sequence[BellSet] | None = None) -> list[FeasibilityReport]:
    """One report per ``k``-subset of the ``d**2`` Bell states, canonical order."""
    if sets is None:
        sets = enumerate_sets(k, d)
    return [search_instance(s, cfg) for s in sets]
