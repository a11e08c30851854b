"""Channel-local equivalence transformations of qutrit Bell states,
tic-tac-toe diagrams and orbit computations over Bell-state subsets."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .fock import BellLabel, DetectorMode, DomainError, TwoParticleState, all_labels

QUTRIT = 3
OMEGA = np.exp(2j * np.pi / 3)


@dataclass(frozen=True)
class BellSet:
    """Sorted, duplicate-free collection of Bell labels sharing one ``d``."""

    d: int
    labels: tuple[BellLabel, ...]

    def __post_init__(self):
        labels = tuple(sorted(set(self.labels)))
        for x in labels:
            if x.d != self.d:
                raise DomainError(f"label {x} does not match d={self.d}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, d: int, pairs: Iterable[tuple[int, int]]) -> "BellSet":
        return cls(d, tuple(BellLabel(d, c, p) for c, p in pairs))

    @classmethod
    def parse(cls, text: str, d: int = QUTRIT) -> "BellSet":
        """``"00,01,21"`` -> {Psi_0^0, Psi_0^1, Psi_2^1} (digits are c then p)."""
        pairs = []
        for tok in text.replace(" ", "").split(","):
            if len(tok) != 2 or not tok.isdigit():
                raise DomainError(f"cannot parse Bell label {tok!r}")
            pairs.append((int(tok[0]), int(tok[1])))
        return cls.of(d, pairs)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, x) -> bool:
        return x in self.labels

    def __str__(self) -> str:
        return "{" + ", ".join(str(x) for x in self.labels) + "}"

    @property
    def key(self) -> str:
        return ",".join(f"{x.c}{x.p}" for x in self.labels)

    def complement(self) -> "BellSet":
        return BellSet(self.d, tuple(x for x in all_labels(self.d) if x not in self.labels))

    def issuperset(self, other: "BellSet") -> bool:
        return set(other.labels) <= set(self.labels)


@dataclass(frozen=True)
class TicTacToeDiagram:
    grid: tuple[tuple[bool, ...], ...]  # rows c, columns p

    @classmethod
    def from_set(cls, s: BellSet) -> "TicTacToeDiagram":
        return cls(tuple(tuple(BellLabel(s.d, c, p) in s for p in range(s.d)) for c in range(s.d)))

    @property
    def count(self) -> int:
        return sum(sum(row) for row in self.grid)

    def render(self) -> str:
        return "\n".join(" ".join("X" if v else "." for v in row) for row in self.grid)


@dataclass(frozen=True, eq=False)
class IndexTransform:
    """Affine label action ``x -> M x + offset (mod d)`` on ``x = (c, p)``,
    paired with the single-particle unitaries realizing it channel by channel.
    """

    name: str
    d: int
    matrix: tuple[tuple[int, int], tuple[int, int]]
    offset: tuple[int, int]
    mode_left: np.ndarray = field(repr=False)
    mode_right: np.ndarray = field(repr=False)

    @property
    def action_key(self) -> tuple:
        return (self.matrix, self.offset)

    def label_map(self, c: int, p: int) -> tuple[int, int]:
        (a, b), (f, g) = self.matrix
        e, h = self.offset
        return (a * c + b * p + e) % self.d, (f * c + g * p + h) % self.d

    def single_particle_unitary(self) -> np.ndarray:
        d = self.d
        U = np.zeros((2 * d, 2 * d), dtype=complex)
        U[0::2, 0::2] = self.mode_left
        U[1::2, 1::2] = self.mode_right
        return U

    def then(self, other: "IndexTransform") -> "IndexTransform":
        """Apply ``self`` first, then ``other``."""
        if other.d != self.d:
            raise DomainError("cannot compose transforms of different d")
        M1, M2 = np.array(self.matrix), np.array(other.matrix)
        M = (M2 @ M1) % self.d
        o = (M2 @ np.array(self.offset) + np.array(other.offset)) % self.d
        names = [n for n in (self.name, other.name) if n != "I"]
        return IndexTransform(
            " ".join(names) if names else "I",
            self.d,
            tuple(tuple(int(v) for v in row) for row in M),
            tuple(int(v) for v in o),
            other.mode_left @ self.mode_left,
            other.mode_right @ self.mode_right,
        )

    def is_bijection(self) -> bool:
        images = {self.label_map(c, p) for c in range(self.d) for p in range(self.d)}
        return len(images) == self.d**2


def _t4_matrix() -> np.ndarray:
    a, b = np.exp(1j * np.pi / 6), np.exp(5j * np.pi / 6)
    return np.array([[a, b, b], [b, a, b], [b, b, a]]) / np.sqrt(3)


@lru_cache(maxsize=None)
def generators() -> tuple[IndexTransform, ...]:
    """The four qutrit equivalence transformations T1..T4."""
    I = np.eye(3, dtype=complex)
    shift = np.roll(I, 1, axis=0)  # |s> -> |s+1>
    t4 = _t4_matrix()
    return (
        IndexTransform("T1", 3, ((1, 0), (0, 1)), (1, 0), I, shift),
        IndexTransform("T2", 3, ((1, 0), (0, 1)), (0, 1), np.diag([1, OMEGA, OMEGA**2]), I),
        # phases on the value-0 kets; this assignment realizes p -> p + c
        IndexTransform("T3", 3, ((1, 0), (1, 1)), (0, 0), np.diag([OMEGA**2, 1, 1]), np.diag([OMEGA, 1, 1])),
        IndexTransform("T4", 3, ((1, 1), (0, 1)), (0, 0), t4, t4.conj()),
    )


def generator(name: str) -> IndexTransform:
    for t in generators():
        if t.name == name:
            return t
    raise DomainError(f"unknown transform {name!r}")


def identity(d: int = QUTRIT) -> IndexTransform:
    I = np.eye(d, dtype=complex)
    return IndexTransform("I", d, ((1, 0), (0, 1)), (0, 0), I, I)


def _require_qutrit(d: int) -> None:
    if d != QUTRIT:
        raise DomainError(f"equivalence transforms are defined for d=3 only, got d={d}")


def transform_label(t: IndexTransform, x: BellLabel) -> BellLabel:
    if x.d != t.d:
        raise DomainError(f"d mismatch: transform d={t.d}, label d={x.d}")
    return BellLabel(x.d, *t.label_map(x.c, x.p))


def transform_set(t: IndexTransform, s: BellSet) -> BellSet:
    _require_qutrit(s.d)
    return BellSet(s.d, tuple(transform_label(t, x) for x in s))


def transform_mode(t: IndexTransform, mode: DetectorMode) -> DetectorMode:
    """Apply the channel unitaries to the mode ket."""
    _require_qutrit(mode.d)
    return DetectorMode.from_ket(t.single_particle_unitary() @ mode.ket, mode.d)


def transform_state(t: IndexTransform, state: TwoParticleState) -> TwoParticleState:
    _require_qutrit(state.d)
    U = t.single_particle_unitary()
    return TwoParticleState(state.d, state.statistics, U @ state.amp @ U.T)


@lru_cache(maxsize=None)
def winning_patterns(d: int = QUTRIT) -> tuple[frozenset, ...]:
    """Three-cell patterns that win at tic-tac-toe with column permutation
    or wrap-around: full rows, full columns and transversals."""
    _require_qutrit(d)
    wins = []
    for cells in itertools.combinations([(c, p) for c in range(3) for p in range(3)], 3):
        rows = {c for c, _ in cells}
        cols = {p for _, p in cells}
        if len(rows) == 1 or len(cols) == 1 or (len(rows) == 3 and len(cols) == 3):
            wins.append(frozenset(BellLabel(d, c, p) for c, p in cells))
    return tuple(wins)


def is_winning(s: BellSet) -> bool:
    """True when ``s`` contains a winning three-cell pattern."""
    members = set(s.labels)
    return any(w <= members for w in winning_patterns(s.d))


WINNER, LOSER = "winner", "loser"
ANTI_WINNER, ANTI_LOSER = "anti-winner", "anti-loser"


def classify_tictactoe(s: BellSet) -> str:
    _require_qutrit(s.d)
    if len(s) == 4:
        return WINNER if is_winning(s) else LOSER
    if len(s) == 6:
        return ANTI_WINNER if is_winning(s.complement()) else ANTI_LOSER
    raise DomainError(f"tic-tac-toe classes are defined for 4- and 6-sets, got size {len(s)}")


def enumerate_sets(k: int, d: int) -> list[BellSet]:
    if not 1 <= k <= d * d:
        raise DomainError(f"set size k={k} out of range for d={d}")
    return [BellSet(d, combo) for combo in itertools.combinations(all_labels(d), k)]


@lru_cache(maxsize=None)
def transform_group() -> tuple[IndexTransform, ...]:
    """All group elements generated by T1..T4, one per distinct label action.

    Breadth-first, so each element carries a shortest generator word.
    """
    start = identity()
    seen = {start.action_key: start}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for t in generators():
            h = g.then(t)
            if h.action_key not in seen:
                seen[h.action_key] = h
                queue.append(h)
    return tuple(seen.values())


def orbit(s: BellSet) -> list[BellSet]:
    _require_qutrit(s.d)
    seen = {s}
    queue = deque([s])
    while queue:
        cur = queue.popleft()
        for t in generators():
            nxt = transform_set(t, cur)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return sorted(seen, key=lambda b: [x.index for x in b.labels])


def orbits(sets: Sequence[BellSet]) -> list[list[BellSet]]:
    """Partition ``sets`` into orbits, in order of first appearance."""
    remaining = dict.fromkeys(sets)
    out = []
    for s in sets:
        if s not in remaining:
            continue
        orb = orbit(s)
        for member in orb:
            remaining.pop(member, None)
        out.append(orb)
    return out


def find_transform(a: BellSet, b: BellSet) -> IndexTransform | None:
    """A group element mapping ``a`` onto ``b``, or None if they lie in different orbits."""
    if len(a) != len(b):
        raise DomainError("sets of different size are never equivalent")
    _require_qutrit(a.d)
    for g in transform_group():
        if transform_set(g, a) == b:
            return g
    return None


def find_covering_transform(s: BellSet, core: BellSet) -> IndexTransform | None:
    """A group element ``g`` with ``g(s)`` containing every member of ``core``."""
    _require_qutrit(s.d)
    for g in transform_group():
        if transform_set(g, s).issuperset(core):
            return g
    return None
