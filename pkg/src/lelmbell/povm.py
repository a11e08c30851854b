"""Generalized (POVM) LELM measurements: rank-1 Kraus operators, residual
second-particle states after a first click, and the qubit / qutrit
infeasibility certificates.

Residual second-particle states are always derived from the Kraus action on
the symmetrized Bell grids, never transcribed by hand.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import exact
from .fock import BOSON, FERMION, BellLabel, DomainError, bell_state
from .search import EXACT_INFEASIBLE, OverlapProblem, minimize_overlaps
from .symmetry import (
    BellSet,
    classify_tictactoe,
    enumerate_sets,
    find_covering_transform,
    transform_set,
)

SCHMIDT_TOL = 1e-10
VERIFICATION_FAILED = "verification-failed"

# fatal five-set shared by both six-set class representatives
FATAL_FIVE = BellSet.of(3, [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)])


@dataclass(frozen=True)
class Rank1Kraus:
    """Kraus operator ``E[i, j] = alpha[j] * n[i]``."""

    d: int
    alpha: np.ndarray = field(repr=False)
    n: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("alpha", "n"):
            v = np.asarray(getattr(self, name), dtype=complex)
            if v.shape != (2 * self.d,):
                raise DomainError(f"{name} must have length {2 * self.d}")
            object.__setattr__(self, name, v)

    @property
    def matrix(self) -> np.ndarray:
        return np.outer(self.n, self.alpha)


@dataclass(frozen=True)
class PovmElement:
    kraus: np.ndarray = field(repr=False)

    @property
    def element(self) -> np.ndarray:
        E = np.asarray(self.kraus, dtype=complex)
        return E.conj().T @ E

    def is_psd(self, tol: float = 1e-12) -> bool:
        return bool(np.min(np.linalg.eigvalsh(self.element)) >= -tol)


def is_complete(elements, tol: float = 1e-10) -> bool:
    total = sum(e.element for e in elements)
    return bool(np.allclose(total, np.eye(total.shape[0]), atol=tol))


def povm_transform_probability(e: PovmElement, psi: np.ndarray) -> tuple[np.ndarray | None, float]:
    """Post-measurement state and outcome probability ``<psi|E^dag E|psi>``.

    A null outcome returns ``(None, 0.0)``.
    """
    psi = np.asarray(psi, dtype=complex)
    E = np.asarray(e.kraus, dtype=complex)
    if E.shape[1] != psi.shape[0]:
        raise DomainError("Kraus operator and state dimensions differ")
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise DomainError("psi must be unit-norm")
    out = E @ psi
    prob = float(np.real(np.vdot(out, out)))
    if prob < 1e-24:
        return None, 0.0
    return out / np.sqrt(prob), prob


@dataclass(frozen=True)
class FirstClick:
    separable: bool
    particle2: np.ndarray | None  # None for a null outcome
    schmidt_ratio: float

    @property
    def is_null(self) -> bool:
        return self.separable and self.particle2 is None


def apply_first_click(k, label: BellLabel, statistics: str) -> FirstClick:
    """Apply a Kraus operator to particle 1 of a symmetrized Bell state.

    ``k`` is a :class:`Rank1Kraus` or a general square matrix. For a rank-1
    operator the second-particle factor is ``|n| * sum_m alpha[m] A[m, :]``,
    with the particle-1 factor normalized to ``n/|n|``.
    """
    A = bell_state(label, statistics).amp
    E = k.matrix if isinstance(k, Rank1Kraus) else np.asarray(k, dtype=complex)
    if E.shape != A.shape:
        raise DomainError(f"Kraus operator shape {E.shape} does not match d={label.d}")
    grid = E @ A
    sv = np.linalg.svd(grid, compute_uv=False)
    if sv[0] < 1e-14:
        return FirstClick(True, None, 0.0)
    ratio = float(sv[1] / sv[0])
    separable = ratio < SCHMIDT_TOL
    if not separable:
        return FirstClick(False, None, ratio)
    if isinstance(k, Rank1Kraus):
        p2 = np.linalg.norm(k.n) * (k.alpha @ A)
    else:
        _, s, vh = np.linalg.svd(grid)
        p2 = s[0] * vh[0]
    return FirstClick(True, p2, ratio)


def particle2_maps(s: BellSet, statistics: str) -> np.ndarray:
    """Matrices ``M_x`` with residual second-particle vector ``M_x @ alpha`` (unit ``n``)."""
    return np.array([bell_state(x, statistics).amp.T for x in s.labels])


def residual_gram(s: BellSet, alpha, statistics: str) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=complex)
    n = np.zeros_like(alpha)
    n[0] = 1.0
    kraus = Rank1Kraus(s.d, alpha, n)
    vecs = []
    for x in s.labels:
        fc = apply_first_click(kraus, x, statistics)
        vecs.append(np.zeros(2 * s.d, dtype=complex) if fc.is_null else fc.particle2)
    V = np.array(vecs)
    return V.conj() @ V.T


def offdiagonal_norm(gram: np.ndarray) -> float:
    off = gram - np.diag(np.diag(gram))
    return float(np.linalg.norm(off))


@dataclass
class Certificate:
    name: str
    statistics: str
    status: str
    steps: list
    conclusion: str
    numeric: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.status == EXACT_INFEASIBLE

    def to_dict(self) -> dict:
        return {
            "kind": "certificate",
            "name": self.name,
            "statistics": self.statistics,
            "status": self.status,
            "conclusion": self.conclusion,
            "numeric": self.numeric,
            "steps": self.steps,
        }


def _alpha_symbols(d: int):
    return exact.complex_symbols([f"alpha{k}" for k in range(1, 2 * d + 1)])


def _exact_residuals(d: int, labels, statistics: str, z):
    return {(x.c, x.p): exact.contract_first(exact.exact_bell_grid(d, x.c, x.p, statistics), z) for x in labels}


def numeric_min_overlap(s: BellSet, statistics: str, restarts: int, seed: int, max_iterations: int = 500) -> dict:
    """Smallest pairwise-overlap residual over unit ``alpha`` found by restarts."""
    problem = OverlapProblem(particle2_maps(s, statistics))
    rng = np.random.default_rng([seed % 2**64, 0x504F564D])
    res = minimize_overlaps(problem, rng, restarts, max_iterations, 1e-16)
    v = problem.to_complex(res.best_x)
    return {
        "restarts": restarts,
        "seed": seed,
        "min_residual": res.best_residual,
        "min_offdiagonal_gram_norm": offdiagonal_norm(residual_gram(s, v, statistics)),
    }


def _label(c, p):
    return f"Psi_{c}^{p}"


def qubit_povm_nogo(statistics: str, restarts: int = 200, seed: int = 0, numeric: bool = True) -> Certificate:
    """Exact chain showing the four qubit residual states are orthogonal only for ``alpha = 0``."""
    z, zc = _alpha_symbols(2)
    labels = [BellLabel(2, c, p) for c in range(2) for p in range(2)]
    r = _exact_residuals(2, labels, statistics, z)
    D = exact.Derivation(z, zc)
    names = []
    for x, y in itertools.combinations(sorted(r), 2):
        nm = f"<{_label(*x)}|{_label(*y)}>"
        D.assume(nm, exact.hermitian_inner(r[x], r[y], z, zc), "residual states must be orthogonal")
        D.conjugate(nm + "*", nm)
        names += [nm, nm + "*"]
    m = lambda k: z[k - 1] * zc[k - 1]
    a = lambda k: z[k - 1]
    ac = lambda k: zc[k - 1]
    status, conclusion = EXACT_INFEASIBLE, "only alpha = 0 (a null Kraus operator) keeps all four residual states orthogonal"
    try:
        D.linear("balance-1", m(1) + m(2) - m(3) - m(4), names, "moduli balance from the Phi+/Phi- condition")
        D.linear("balance-2", m(1) + m(4) - m(2) - m(3), names, "moduli balance from the Psi+/Psi- condition")
        D.linear("cross-24", ac(2) * a(4), names, "the four cross-class conditions force conj(alpha2)*alpha4 = 0")
        D.linear("cross-13", ac(1) * a(3), names, "the four cross-class conditions force conj(alpha1)*alpha3 = 0")
        D.linear("equal-24", m(2) - m(4), ["balance-1", "balance-2"], "|alpha2| = |alpha4|")
        D.linear("equal-13", m(1) - m(3), ["balance-1", "balance-2"], "|alpha1| = |alpha3|")
        D.combine("product-24", m(2) * m(4), [(a(2) * ac(4), "cross-24")], "|alpha2|^2 |alpha4|^2 = 0")
        D.combine("product-13", m(1) * m(3), [(a(1) * ac(3), "cross-13")], "|alpha1|^2 |alpha3|^2 = 0")
        for k, eq, prod, sign in ((2, "equal-24", "product-24", 1), (4, "equal-24", "product-24", -1),
                                  (1, "equal-13", "product-13", 1), (3, "equal-13", "product-13", -1)):
            D.combine(f"quartic-{k}", m(k) ** 2, [(sign * m(k), eq), (1, prod)], f"|alpha{k}|^4 = 0")
            D.vanishing_modulus(f"alpha{k}=0", f"quartic-{k}", k - 1, f"alpha{k} = 0")
    except exact.VerificationFailure as exc:
        status, conclusion = VERIFICATION_FAILED, str(exc)
    cert = Certificate("povm-qubit", statistics, status, D.to_list(), conclusion)
    if numeric:
        cert.numeric = numeric_min_overlap(BellSet(2, tuple(labels)), statistics, restarts, seed)
    return cert


def qutrit_subset_nogo(statistics: str, restarts: int = 200, seed: int = 0, numeric: bool = True) -> Certificate:
    """Exact chain for the five-set {Psi_0^0, Psi_0^1, Psi_0^2, Psi_1^0, Psi_1^1}."""
    z, zc = _alpha_symbols(3)
    r = _exact_residuals(3, FATAL_FIVE.labels, statistics, z)
    D = exact.Derivation(z, zc)
    m = lambda k: z[k - 1] * zc[k - 1]
    a = lambda k: z[k - 1]
    ac = lambda k: zc[k - 1]

    def cond(x, y):
        nm = f"<{_label(*x)}|{_label(*y)}>"
        D.assume(nm, exact.hermitian_inner(r[x], r[y], z, zc), "residual states must be orthogonal")
        D.conjugate(nm + "*", nm)
        return [nm, nm + "*"]

    status = EXACT_INFEASIBLE
    conclusion = "only alpha = 0 (a null detection channel) keeps the five residual states orthogonal"
    try:
        phase = cond((0, 0), (0, 1)) + cond((1, 0), (1, 1))
        D.linear("|a1|=|a3|", m(1) - m(3), phase, "phase-class conditions equalize the odd moduli")
        D.linear("|a3|=|a5|", m(3) - m(5), phase, "phase-class conditions equalize the odd moduli")
        D.linear("|a2|=|a4|", m(2) - m(4), phase, "phase-class conditions equalize the even moduli")
        D.linear("|a4|=|a6|", m(4) - m(6), phase, "phase-class conditions equalize the even moduli")
        cross = cond((0, 0), (1, 0)) + cond((0, 1), (1, 0)) + cond((0, 2), (1, 0))
        rel = [
            ("a2a4*=-a1a5*", a(2) * ac(4), a(1) * ac(5)),
            ("a4a6*=-a3a1*", a(4) * ac(6), a(3) * ac(1)),
            ("a6a2*=-a5a3*", a(6) * ac(2), a(5) * ac(3)),
        ]
        for nm, u, v in rel:
            D.linear(nm, u + v, cross, "cross-class conditions combine into a pair relation")
        (n1, u1, v1), (n2, u2, v2), (n3, u3, v3) = rel
        D.combine(
            "product",
            m(2) * m(4) * m(6) + m(1) * m(3) * m(5),
            [(u2 * u3, n1), (-v1 * u3, n2), (v1 * v2, n3)],
            "multiplying the relations: |a2 a4 a6|^2 = -|a1 a3 a5|^2",
        )
        prods = D.split_nonnegative("zero-product-", "product", "a vanishing sum of nonnegative terms")
        odd = next(p for p in prods if p.endswith("135"))
        even = next(p for p in prods if p.endswith("246"))
        for k in range(1, 7):
            prem = [odd, "|a1|=|a3|", "|a3|=|a5|"] if k % 2 else [even, "|a2|=|a4|", "|a4|=|a6|"]
            D.ideal(f"|a{k}|^6", m(k) ** 3, prem, f"equal moduli and a zero product force |alpha{k}|^6 = 0")
            D.vanishing_modulus(f"alpha{k}=0", f"|a{k}|^6", k - 1, f"alpha{k} = 0")
    except exact.VerificationFailure as exc:
        status, conclusion = VERIFICATION_FAILED, str(exc)
    cert = Certificate("povm-qutrit-subset", statistics, status, D.to_list(), conclusion)
    if numeric:
        cert.numeric = numeric_min_overlap(FATAL_FIVE, statistics, restarts, seed)
    return cert


@dataclass(frozen=True)
class CoverageRow:
    set: BellSet
    tictactoe: str
    transform: str | None
    image: BellSet | None


def six_set_coverage() -> list[CoverageRow]:
    """For every qutrit 6-set, a group element whose image contains the fatal five-set."""
    rows = []
    for s in enumerate_sets(6, 3):
        g = find_covering_transform(s, FATAL_FIVE)
        rows.append(CoverageRow(s, classify_tictactoe(s), None if g is None else g.name,
                                None if g is None else transform_set(g, s)))
    return rows


def distinguishability_upper_bound(d: int) -> int:
    """At most ``2d`` Bell states: residual states live in a ``2d``-dimensional space."""
    if d < 2:
        raise DomainError("d must be >= 2")
    return 2 * d


def has_nonorthogonal_pair(vectors, tol: float = 1e-9) -> bool:
    """True when some pair of the (nonzero) vectors has a nonzero overlap."""
    V = np.asarray(vectors, dtype=complex)
    return offdiagonal_norm(V.conj() @ V.T) > tol


def pigeonhole_holds(vectors, tol: float = 1e-9) -> bool:
    """Checks the dimension bound on one candidate list.

    More nonzero vectors than the dimension can never be pairwise orthogonal.
    """
    V = np.asarray(vectors, dtype=complex)
    if V.shape[0] <= V.shape[1]:
        return True
    return has_nonorthogonal_pair(V, tol)


def povm_bounds() -> dict:
    """Both POVM statements at once: qubit (3 of 4) and qutrit (at most 5 of 9)."""
    return {"qubit": distinguishability_upper_bound(2) - 1, "qutrit": distinguishability_upper_bound(3) - 1}


STATISTICS_BOTH = (BOSON, FERMION)
