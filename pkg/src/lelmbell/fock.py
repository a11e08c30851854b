"""Single-particle modes, symmetrized two-particle states and qudit Bell states.

Single-particle basis ordering: ``phi_{2s} = |s,L>`` and ``phi_{2s+1} = |s,R>``.
Two-particle states are stored as full ``(2d, 2d)`` first-quantized amplitude
grids, ``amp[m, n]`` being the amplitude of ``|phi_m>_1 |phi_n>_2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

BOSON = "boson"
FERMION = "fermion"
STATISTICS = (BOSON, FERMION)

L = "L"
R = "R"

# |nu_m| above this counts as a ket present in a mode
ZERO_TOL = 1e-9
NORM_TOL = 1e-12


class DomainError(ValueError):
    """Raised when an argument lies outside an operation's domain."""


def exchange_sign(statistics: str) -> int:
    if statistics == BOSON:
        return 1
    if statistics == FERMION:
        return -1
    raise DomainError(f"unknown statistics {statistics!r}; expected one of {STATISTICS}")


def _check_d(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise DomainError(f"d must be an integer >= 2, got {d!r}")


def mode_index(value: int, channel: str, d: int) -> int:
    """Index m of ``|value, channel>`` in the single-particle basis."""
    _check_d(d)
    if not 0 <= value < d:
        raise DomainError(f"value {value} out of range for d={d}")
    if channel == L:
        return 2 * value
    if channel == R:
        return 2 * value + 1
    raise DomainError(f"channel must be 'L' or 'R', got {channel!r}")


def mode_value(m: int, d: int) -> tuple[int, str]:
    """Inverse of :func:`mode_index`: ``m -> (value, channel)``."""
    _check_d(d)
    if not 0 <= m < 2 * d:
        raise DomainError(f"mode index {m} out of range for d={d}")
    return m // 2, (L if m % 2 == 0 else R)


@dataclass(frozen=True, order=True)
class BellLabel:
    """Index triple of the Bell state ``|Psi_c^p>`` of a qudit pair."""

    d: int
    c: int
    p: int

    def __post_init__(self):
        _check_d(self.d)
        if not (0 <= self.c < self.d and 0 <= self.p < self.d):
            raise DomainError(f"label (c={self.c}, p={self.p}) out of range for d={self.d}")

    def __str__(self) -> str:
        return f"Psi_{self.c}^{self.p}"

    @property
    def index(self) -> int:
        """Position in the canonical c-major order."""
        return self.c * self.d + self.p


def all_labels(d: int) -> list[BellLabel]:
    return [BellLabel(d, c, p) for c in range(d) for p in range(d)]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TwoParticleState:
    d: int
    statistics: str
    amp: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_d(self.d)
        exchange_sign(self.statistics)
        amp = _frozen(self.amp)
        if amp.shape != (2 * self.d, 2 * self.d):
            raise DomainError(f"amplitude grid must be {(2 * self.d,) * 2}, got {amp.shape}")
        object.__setattr__(self, "amp", amp)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    @property
    def is_null(self) -> bool:
        return self.norm < NORM_TOL

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm**2 - 1.0) < NORM_TOL

    def exchange_error(self) -> float:
        """Largest entrywise violation of ``A[m,n] = +-A[n,m]``."""
        s = exchange_sign(self.statistics)
        return float(np.max(np.abs(self.amp - s * self.amp.T)))

    def in_lr_sector(self, tol: float = 1e-10) -> bool:
        """True when every amplitude has one particle in L and one in R."""
        mask = _same_channel_mask(self.d)
        return float(np.max(np.abs(self.amp[mask]), initial=0.0)) < tol

    def joint_kets(self) -> np.ndarray:
        """Coefficients ``J[a, b]`` of the joint-particle kets ``|a,L>|b,R>``.

        Scaled so that ``joint_ket_state(J)`` reproduces the state.
        """
        return np.sqrt(2) * self.amp[0::2, 1::2]


def _same_channel_mask(d: int) -> np.ndarray:
    ch = np.arange(2 * d) % 2
    return ch[:, None] == ch[None, :]


def symmetrize(grid: np.ndarray, statistics: str) -> np.ndarray:
    s = exchange_sign(statistics)
    return (grid + s * grid.T) / np.sqrt(2)


def joint_ket_state(coeffs, d: int, statistics: str) -> TwoParticleState:
    """Symmetrized state ``sum_ab J[a,b] |a,L>|b,R>``.

    ``coeffs`` is a ``(d, d)`` array or a mapping ``{(a, b): amplitude}``.
    No normalization is applied.
    """
    if isinstance(coeffs, Mapping):
        J = np.zeros((d, d), dtype=complex)
        for (a, b), v in coeffs.items():
            J[a, b] += v
    else:
        J = np.asarray(coeffs, dtype=complex)
    grid = np.zeros((2 * d, 2 * d), dtype=complex)
    grid[0::2, 1::2] = J
    return TwoParticleState(d, statistics, symmetrize(grid, statistics))


def bell_state(label: BellLabel, statistics: str) -> TwoParticleState:
    """Symmetrized (bosons) or antisymmetrized (fermions) Bell state."""
    d, c, p = label.d, label.c, label.p
    J = np.zeros((d, d), dtype=complex)
    for j in range(d):
        J[j, (j + c) % d] = np.exp(2j * np.pi * p * j / d) / np.sqrt(d)
    return joint_ket_state(J, d, statistics)


def bell_basis(d: int, statistics: str) -> list[TwoParticleState]:
    return [bell_state(x, statistics) for x in all_labels(d)]


def _check_compatible(a: TwoParticleState, b: TwoParticleState) -> None:
    if a.d != b.d:
        raise DomainError(f"dimension mismatch: d={a.d} vs d={b.d}")
    if a.statistics != b.statistics:
        raise DomainError(f"statistics mismatch: {a.statistics} vs {b.statistics}")


def inner_product(a: TwoParticleState, b: TwoParticleState) -> complex:
    _check_compatible(a, b)
    return complex(np.vdot(a.amp, b.amp))


def overlap_up_to_phase(a: TwoParticleState, b: TwoParticleState) -> float:
    """``|<a|b>|``; equals 1 for normalized states equal up to global phase."""
    return abs(inner_product(a, b))


@dataclass(frozen=True)
class DetectorMode:
    """Detection mode with annihilation operator ``c = sum_m nu[m] a_m``.

    The mode ket itself is ``sum_m conj(nu[m]) |phi_m>``; see :attr:`ket`.
    """

    d: int
    nu: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_d(self.d)
        nu = _frozen(self.nu)
        if nu.shape != (2 * self.d,):
            raise DomainError(f"nu must have length {2 * self.d}, got shape {nu.shape}")
        object.__setattr__(self, "nu", nu)

    @classmethod
    def from_ket(cls, ket, d: int | None = None) -> "DetectorMode":
        ket = np.asarray(ket, dtype=complex)
        return cls(d if d is not None else ket.size // 2, ket.conj())

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, str], complex], d: int) -> "DetectorMode":
        """Mode ket built from ``{(value, channel): coefficient}``."""
        ket = np.zeros(2 * d, dtype=complex)
        for (v, ch), coef in terms.items():
            ket[mode_index(v, ch, d)] += coef
        return cls.from_ket(ket, d)

    @classmethod
    def basis(cls, m: int, d: int) -> "DetectorMode":
        nu = np.zeros(2 * d, dtype=complex)
        nu[m] = 1.0
        return cls(d, nu)

    @property
    def ket(self) -> np.ndarray:
        return self.nu.conj()

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.nu))

    @property
    def is_unit(self) -> bool:
        return abs(self.norm**2 - 1.0) < NORM_TOL

    def normalized(self) -> "DetectorMode":
        n = self.norm
        if n < NORM_TOL:
            raise DomainError("cannot normalize a zero mode")
        return DetectorMode(self.d, self.nu / n)

    def support(self, tol: float = ZERO_TOL) -> list[int]:
        return [int(m) for m in np.flatnonzero(np.abs(self.nu) > tol)]

    @property
    def ket_count(self) -> int:
        return len(self.support())

    def channel_profile(self, tol: float = ZERO_TOL) -> tuple[int, int]:
        """Number of kets present in the L and R channels."""
        sup = self.support(tol)
        n_left = sum(1 for m in sup if m % 2 == 0)
        return n_left, len(sup) - n_left


def annihilate(mode: DetectorMode, state: TwoParticleState) -> np.ndarray:
    """Single-particle remainder ``c|Psi>`` in the phi basis (unnormalized).

    Second-quantized ladder algebra on a normalized (anti)symmetric state
    gives ``a_k|Psi> = sqrt(2) sum_n A[k, n] |phi_n>`` for either statistics.
    """
    if mode.d != state.d:
        raise DomainError(f"dimension mismatch: mode d={mode.d}, state d={state.d}")
    return np.sqrt(2) * (mode.nu @ state.amp)


def detection_signature(i: DetectorMode, j: DetectorMode, statistics: str) -> TwoParticleState:
    """Normalized two-click signature ``P_LR |i> (x) |j>``, (anti)symmetrized.

    A null projection yields an all-zero state (``is_null`` is True).
    """
    if i.d != j.d:
        raise DomainError(f"dimension mismatch: d={i.d} vs d={j.d}")
    d = i.d
    grid = np.outer(i.ket, j.ket)
    grid[_same_channel_mask(d)] = 0.0
    grid = symmetrize(grid, statistics)
    n = np.linalg.norm(grid)
    if n < NORM_TOL:
        return TwoParticleState(d, statistics, np.zeros_like(grid))
    return TwoParticleState(d, statistics, grid / n)


def random_state_in_sector(rng: np.random.Generator, d: int, statistics: str) -> TwoParticleState:
    """Random normalized one-L/one-R state (complex Gaussian joint-ket coefficients)."""
    J = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    st = joint_ket_state(J, d, statistics)
    return TwoParticleState(d, statistics, st.amp / st.norm)


def random_mode(rng: np.random.Generator, d: int, support: Iterable[int] | None = None) -> DetectorMode:
    """Unit mode with complex Gaussian coefficients on ``support`` (default: all kets)."""
    ket = np.zeros(2 * d, dtype=complex)
    idx = np.arange(2 * d) if support is None else np.fromiter(support, dtype=int)
    ket[idx] = rng.standard_normal(idx.size) + 1j * rng.standard_normal(idx.size)
    return DetectorMode.from_ket(ket / np.linalg.norm(ket), d)


def iter_mode_pairs(d: int) -> Iterator[tuple[int, int]]:
    """Unordered basis-mode index pairs ``m <= n``."""
    for m in range(2 * d):
        for n in range(m, 2 * d):
            yield m, n
