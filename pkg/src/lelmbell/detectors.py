"""Necessary distinguishability criteria for detector modes and Bell-basis
bookkeeping of detection signatures."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .fock import (
    ZERO_TOL,
    BellLabel,
    DetectorMode,
    DomainError,
    TwoParticleState,
    all_labels,
    annihilate,
    bell_state,
)

# Bell coefficients above this are structural, not solver noise
BELL_TOL = 1e-6


def gram_condition(k: BellLabel, l: BellLabel, mode: DetectorMode, statistics: str) -> complex:
    """``<Psi_k| c^dagger c |Psi_l>`` for the mode's annihilation operator."""
    if not k.d == l.d == mode.d:
        raise DomainError(f"dimension mismatch: {k.d}, {l.d}, mode {mode.d}")
    rk = annihilate(mode, bell_state(k, statistics))
    rl = annihilate(mode, bell_state(l, statistics))
    return complex(np.vdot(rk, rl))


def bell_decompose(sig: TwoParticleState) -> np.ndarray:
    """Coefficients ``beta[x] = <Psi_x|sig>`` in canonical (c-major) label order."""
    if not sig.in_lr_sector():
        raise DomainError("signature has amplitude outside the one-L/one-R sector")
    return bell_rows(sig.d, sig.statistics).conj() @ sig.amp.ravel()


@lru_cache(maxsize=None)
def bell_rows(d: int, statistics: str) -> np.ndarray:
    rows = np.array([bell_state(x, statistics).amp.ravel() for x in all_labels(d)])
    rows.setflags(write=False)
    return rows


def bell_recompose(beta: np.ndarray, d: int, statistics: str) -> TwoParticleState:
    grid = sum(b * bell_state(x, statistics).amp for b, x in zip(beta, all_labels(d)))
    return TwoParticleState(d, statistics, grid)


@dataclass(frozen=True)
class SignatureCensus:
    """Per-correlation-class joint-ket counts and Bell coefficients."""

    d: int
    joint_ket_counts: tuple[int, ...]
    coefficients: np.ndarray  # (d, d): row c, column p
    tol: float = BELL_TOL

    @property
    def bell_counts(self) -> tuple[int, ...]:
        return tuple(int(n) for n in np.sum(np.abs(self.coefficients) > self.tol, axis=1))

    @property
    def total_nonzero(self) -> int:
        return int(sum(self.bell_counts))

    def present(self) -> list[BellLabel]:
        return [
            BellLabel(self.d, c, p)
            for c in range(self.d)
            for p in range(self.d)
            if abs(self.coefficients[c, p]) > self.tol
        ]


def correlation_census(sig: TwoParticleState, tol: float = BELL_TOL) -> SignatureCensus:
    d = sig.d
    beta = bell_decompose(sig).reshape(d, d)
    J = sig.joint_kets()
    counts = tuple(
        int(sum(abs(J[a, (a + c) % d]) > ZERO_TOL for a in range(d))) for c in range(d)
    )
    return SignatureCensus(d, counts, beta, tol)


def signature_conflicts(sig: TwoParticleState, target: Iterable[BellLabel], tol: float = BELL_TOL) -> bool:
    """True when at least two members of ``target`` appear in ``sig``."""
    if sig.is_null:
        return False
    beta = bell_decompose(sig)
    hits = 0
    for x in target:
        if x.d != sig.d:
            raise DomainError(f"label {x} does not match d={sig.d}")
        if abs(beta[x.index]) > tol:
            hits += 1
    return hits >= 2
