"""Elimination chain showing that no projective LELM apparatus distinguishes a
tic-tac-toe-winner 4-set of bosonic qutrit Bell states.

Each step checks the structural claims about detector modes on random
coefficient draws (complex Gaussian, nonzero by construction) and, where the
joint-ket census alone decides a claim, on the census counts directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from . import exact
from .detectors import bell_rows, correlation_census, signature_conflicts
from .fock import (
    BOSON,
    L,
    R,
    BellLabel,
    DetectorMode,
    DomainError,
    bell_state,
    detection_signature,
    mode_index,
)
from .search import NO_INSTANCE_FOUND, SearchConfig, annihilation_maps, search_instance
from .symmetry import BellSet, classify_tictactoe, generators, orbit, transform_mode, LOSER

ELIMINATED = "eliminated"
SURVIVED = "survived"

SET_A = BellSet.of(3, [(0, 0), (0, 1), (1, 1), (2, 2)])
SET_B = BellSet.of(3, [(0, 0), (0, 1), (0, 2), (1, 0)])
LOSER_REPRESENTATIVE = BellSet.of(3, [(0, 0), (0, 1), (2, 1), (2, 2)])

D3 = 3


@dataclass
class EliminationStep:
    name: str
    target_set: BellSet
    verdict: str
    evidence: list = field(default_factory=list)
    samples: int = 0
    certificate: list = field(default_factory=list)

    @property
    def eliminated(self) -> bool:
        return self.verdict == ELIMINATED

    def to_dict(self) -> dict:
        return {
            "kind": "elimination-step",
            "name": self.name,
            "target_set": self.target_set.key,
            "verdict": self.verdict,
            "samples": self.samples,
            "evidence": self.evidence,
            "certificate": self.certificate,
        }


class _Tally:
    """Pass counts per named check."""

    def __init__(self):
        self.rows: dict[str, list[int]] = {}

    def record(self, check: str, ok) -> None:
        row = self.rows.setdefault(check, [0, 0])
        row[0] += 1
        row[1] += int(bool(ok))

    def record_many(self, check: str, oks: np.ndarray) -> None:
        row = self.rows.setdefault(check, [0, 0])
        row[0] += int(oks.size)
        row[1] += int(np.count_nonzero(oks))

    @property
    def ok(self) -> bool:
        return bool(self.rows) and all(n == p for n, p in self.rows.values())

    def evidence(self) -> list[dict]:
        return [{"check": k, "samples": n, "passed": p} for k, (n, p) in self.rows.items()]

    def step(self, name: str, target: BellSet, samples: int, certificate=None) -> EliminationStep:
        return EliminationStep(name, target, ELIMINATED if self.ok else SURVIVED, self.evidence(), samples, certificate or [])


def _require_boson(statistics: str) -> None:
    if statistics != BOSON:
        raise DomainError("the projective qutrit elimination chain is established for bosons only")


def _nonzero(rng: np.random.Generator, size: int) -> np.ndarray:
    v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    small = np.abs(v) < 1e-3
    while small.any():
        v[small] = rng.standard_normal(small.sum()) + 1j * rng.standard_normal(small.sum())
        small = np.abs(v) < 1e-3
    return v


def _mode(terms: dict, d: int = D3) -> DetectorMode:
    return DetectorMode.from_terms(terms, d).normalized()


def _cyclic(a: int) -> tuple[int, int, int]:
    return a, (a + 1) % 3, (a + 2) % 3


def _swap_channels(mode: DetectorMode) -> DetectorMode:
    ket = mode.ket.reshape(D3, 2)[:, ::-1].ravel()
    return DetectorMode.from_ket(ket, D3)


def _random_completion(rng: np.random.Generator, mode: DetectorMode) -> list[DetectorMode]:
    """A random orthonormal apparatus whose first detector mode is ``mode``."""
    n = 2 * mode.d
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    M[:, 0] = mode.ket
    Q, _ = np.linalg.qr(M)
    Q[:, 0] = mode.ket / np.linalg.norm(mode.ket)
    return [DetectorMode.from_ket(Q[:, k], mode.d) for k in range(n)]


def _partner(rng, a, b, c, stratum: int, left_part: bool = True) -> tuple[DetectorMode | None, np.ndarray]:
    """Arbitrary mode ``x|a,R> + y|b,R> + z|c,R> + |L>``; bit k of ``stratum`` zeroes coefficient k."""
    xyz = _nonzero(rng, 3)
    for k in range(3):
        if stratum >> k & 1:
            xyz[k] = 0
    terms = {(a, R): xyz[0], (b, R): xyz[1], (c, R): xyz[2]}
    if left_part:
        for v, coef in zip(range(3), rng.standard_normal(3) + 1j * rng.standard_normal(3)):
            terms[(v, L)] = coef
    ket = np.zeros(6, dtype=complex)
    for (v, ch), coef in terms.items():
        ket[mode_index(v, ch, D3)] += coef
    if np.linalg.norm(ket) < 1e-12:
        return None, xyz
    return DetectorMode.from_ket(ket / np.linalg.norm(ket), D3), xyz


def single_channel_elimination(samples: int = 1000, seed: int = 0, statistics: str = BOSON) -> list[EliminationStep]:
    """1-, 2- and 3-ket single-channel modes cannot serve Set A; one step per form."""
    _require_boson(statistics)
    rng = np.random.default_rng([seed % 2**64, 1])
    t1, t2, t3 = _Tally(), _Tally(), _Tally()
    for i in range(samples):
        a, b, c = _cyclic(i % 3)
        stratum = (i // 3) % 8

        rows = bell_rows(D3, BOSON)
        # 1-ket mode |a,L>
        s1 = _mode({(a, L): 1.0})
        partner, xyz = _partner(rng, a, b, c, stratum)
        sig = detection_signature(s1, partner, BOSON)
        J = sig.joint_kets()
        expected = np.zeros((3, 3), dtype=complex)
        expected[a, a], expected[a, b], expected[a, c] = xyz
        if sig.is_null:
            t1.record("S1: null signature only when x=y=z=0", not np.any(xyz))
        else:
            e = expected / np.linalg.norm(expected)
            t1.record("S1: signature is x|aa> + y|ab> + z|ac>", abs(abs(np.vdot(e, J / np.linalg.norm(J))) - 1) < 1e-9)
        if xyz[0] != 0:
            cen = correlation_census(sig)
            t1.record("S1: x != 0 gives one c=0 joint ket", cen.joint_ket_counts[0] == 1)
            t1.record("S1: x != 0 puts all three c=0 Bell states in the signature", cen.bell_counts[0] == 3)
            t1.record("S1: x != 0 conflates members of Set A", signature_conflicts(sig, SET_A))
        completion = _random_completion(rng, s1)
        t1.record(
            "S1: some other apparatus mode has x != 0",
            any(abs(m.ket[mode_index(a, R, D3)]) > 1e-9 for m in completion[1:]),
        )

        # 2-ket mode alpha|a,L> + beta|b,L>
        al, be = _nonzero(rng, 2)
        s2 = _mode({(a, L): al, (b, L): be})
        partner, xyz = _partner(rng, a, b, c, stratum)
        zeros = int(np.sum(xyz == 0))
        sig = detection_signature(s2, partner, BOSON)
        if zeros == 3:
            t2.record("S2: x=y=z=0 gives no signature", sig.is_null)
        else:
            cen = correlation_census(sig)
            if zeros in (1, 2):
                singles = sum(1 for n in cen.joint_ket_counts if n == 1)
                t2.record("S2: one or two of x,y,z zero leaves two classes with a single joint ket", singles >= 2)
                t2.record("S2: ... so at least six Bell states are present", cen.total_nonzero >= 6)
                t2.record("S2: ... which conflates members of Set A", signature_conflicts(sig, SET_A))
            else:
                t2.record("S2: x,y,z all nonzero gives two joint kets per class", cen.joint_ket_counts == (2, 2, 2))
                t2.record("S2: ... so at least two Bell states per class", min(cen.bell_counts) >= 2)
                present = set(cen.present())
                t2.record(
                    "S2: ... so Psi_0^0 or Psi_0^1 is present",
                    bool(present & {BellLabel(3, 0, 0), BellLabel(3, 0, 1)}),
                )
                if present & {BellLabel(3, 1, 1), BellLabel(3, 2, 2)}:
                    t2.record("S2: a signature holding Psi_1^1 or Psi_2^2 conflates Set A", signature_conflicts(sig, SET_A))
        apparatus = _random_completion(rng, s2)
        overlaps = np.array([rows.conj() @ detection_signature(s2, m, BOSON).amp.ravel() for m in apparatus])
        t2.record(
            "S2: every Bell state overlaps some signature that involves S2",
            bool(np.all(np.max(np.abs(overlaps), axis=0) > 1e-9)),
        )

        # 3-ket mode alpha|a,L> + beta|b,L> + gamma|c,L>
        coef = _nonzero(rng, 3)
        s3 = _mode({(a, L): coef[0], (b, L): coef[1], (c, L): coef[2]})
        ket_l = s3.ket[0::2]
        omega = np.exp(2j * np.pi / 3)
        # c=0 content x*al_a |aa> + ... must be orthogonal to Psi_0^0 and Psi_0^1
        C = np.array([[omega ** (-p * v) * ket_l[v] for v in (a, b, c)] for p in (0, 1)])
        t3.record("S3: demanding Psi_0^2 alone in c=0 has rank 2 (x,y,z fixed up to scale)", np.linalg.matrix_rank(C, tol=1e-9) == 2)
        xyz = np.linalg.svd(C)[2][-1].conj()
        sigs = []
        for _ in range(2):
            scale = _nonzero(rng, 1)[0]
            terms = {(a, R): scale * xyz[0], (b, R): scale * xyz[1], (c, R): scale * xyz[2]}
            for v in range(3):
                terms[(v, L)] = complex(rng.standard_normal(), rng.standard_normal())
            sigs.append(detection_signature(s3, _mode(terms), BOSON))
        cen = correlation_census(sigs[0])
        t3.record(
            "S3: the fixed partner leaves Psi_0^2 as the only c=0 Bell state",
            [x for x in cen.present() if x.c == 0] == [BellLabel(3, 0, 2)],
        )
        t3.record(
            "S3: any two admissible partners give the same signature",
            abs(abs(np.vdot(sigs[0].amp, sigs[1].amp)) - 1) < 1e-9,
        )

    # channel profile is preserved by every equivalence generator
    for g in generators():
        for k in range(50):
            sup = rng.choice(3, size=1 + k % 3, replace=False)
            m = _mode({(int(v), L): complex(*rng.standard_normal(2)) for v in sup})
            n_left, n_right = transform_mode(g, m).channel_profile()
            t1.record("transforms keep single-channel modes single-channel", n_left > 0 and n_right == 0)
    return [
        t1.step("single-channel-1ket", SET_A, samples),
        t2.step("single-channel-2ket", SET_A, samples),
        t3.step("single-channel-3ket", SET_A, samples),
    ]


def four_ket_elimination(samples: int = 1000, seed: int = 0, statistics: str = BOSON) -> EliminationStep:
    """Two clicks in any 4-ket mode produce at least eight Bell states."""
    _require_boson(statistics)
    rng = np.random.default_rng([seed % 2**64, 2])
    t = _Tally()
    for i in range(samples):
        a, b, c = _cyclic(i % 3)
        swap = (i // 3) % 2 == 1
        co = _nonzero(rng, 4)
        cases = {
            "1+3": {(a, L): co[0], (a, R): co[1], (b, R): co[2], (c, R): co[3]},
            "2+2 same values": {(a, L): co[0], (b, L): co[1], (a, R): co[2], (b, R): co[3]},
            "2+2 one shared value": {(a, L): co[0], (b, L): co[1], (a, R): co[2], (c, R): co[3]},
        }
        for case, terms in cases.items():
            mode = _mode(terms)
            if swap:
                mode = _swap_channels(mode)
            t.record(f"{case}: mode has 4 kets", mode.ket_count == 4)
            sig = detection_signature(mode, mode, BOSON)
            cen = correlation_census(sig)
            need = 9 if case == "1+3" else 8
            t.record(f"{case}: self-signature holds >= {need} Bell states", cen.total_nonzero >= need)
            t.record(f"{case}: conflates Set A and Set B", signature_conflicts(sig, SET_A) and signature_conflicts(sig, SET_B))
    return t.step("4ket", SET_A, samples)


def setB_structure_elimination(samples: int = 1000, seed: int = 0, statistics: str = BOSON) -> list[EliminationStep]:
    """5-ket, 2-ket and 3-ket-only apparatuses cannot serve Set B."""
    _require_boson(statistics)
    rng = np.random.default_rng([seed % 2**64, 3])
    five, two, three = _Tally(), _Tally(), _Tally()
    c0 = {BellLabel(3, 0, p) for p in range(3)}
    for i in range(samples):
        a, b, c = _cyclic(i % 3)

        # 5-ket: one of the six kets missing
        missing = i % 6
        ket = _nonzero(rng, 6)
        ket[missing] = 0
        mode = DetectorMode.from_ket(ket / np.linalg.norm(ket), D3)
        cen = correlation_census(detection_signature(mode, mode, BOSON))
        five.record("5-ket self-signature has exactly two c=0 joint kets", cen.joint_ket_counts[0] == 2)
        five.record("... so it holds at least two c=0 Bell states of Set B", len(set(cen.present()) & c0) >= 2)

        # 2-ket, same value
        al, be = _nonzero(rng, 2)
        m1 = _mode({(a, L): al, (a, R): be})
        sig = detection_signature(m1, m1, BOSON)
        cen = correlation_census(sig)
        two.record("same-value 2-ket self-signature is the single joint ket |aa>", cen.joint_ket_counts == (1, 0, 0))
        two.record("... which conflates Set B", signature_conflicts(sig, SET_B))

        # 2-ket, different values, against a mode holding |a,R>
        m2 = _mode({(a, L): al, (b, R): be})
        completion = _random_completion(rng, m2)
        two.record(
            "some other apparatus mode contains |a,R>",
            any(abs(m.ket[mode_index(a, R, D3)]) > 1e-9 for m in completion[1:]),
        )
        v, w, x, eta, y, z = _nonzero(rng, 6)
        stratum = i % 32
        v, w, x, y, z = [coef * (0 if stratum >> k & 1 else 1) for k, coef in enumerate((v, w, x, y, z))]
        partner = _mode({(a, L): v, (b, L): w, (c, L): x, (a, R): eta, (b, R): y, (c, R): z})
        sig = detection_signature(m2, partner, BOSON)
        cen = correlation_census(sig)
        expected = 1 if w == 0 else 2
        two.record("different-value 2-ket with an |a,R> partner: c=0 joint kets are 1 (w=0) or 2", cen.joint_ket_counts[0] == expected)
        two.record("... which conflates Set B", signature_conflicts(sig, SET_B))

        # multi-channel 3-ket modes alpha|a,L> + beta|b,L> + gamma|d,R>
        al, be, ga = _nonzero(rng, 3)
        for dval in (a, b, c):
            m = _mode({(a, L): al, (b, L): be, (dval, R): ga})
            if i % 2:
                m = _swap_channels(m)
            sig = detection_signature(m, m, BOSON)
            cen = correlation_census(sig)
            if dval == c:
                three.record("3-ket1 with d=c has no c=0 joint ket (allowed)", cen.joint_ket_counts[0] == 0)
            else:
                three.record("3-ket1 with d in {a,b} has one c=0 joint ket (forbidden)", cen.joint_ket_counts[0] == 1)
                three.record("... which conflates Set B", signature_conflicts(sig, SET_B))
        m1 = _mode({(a, L): al, (b, L): be, (c, R): ga})

        # a partner holding a nonempty proper subset of {|a,R>, |b,R>, |c,L>}
        needed = [(a, R), (b, R), (c, L)]
        subset = [needed[k] for k in range(3) if (1 + i % 6) >> k & 1]
        others = [k for k in [(a, L), (b, L), (c, R)]]
        extra = others[: 3 - len(subset)]
        coefs = _nonzero(rng, 3)
        partner = _mode(dict(zip(subset + extra, coefs)))
        sig = detection_signature(m1, partner, BOSON)
        cen = correlation_census(sig)
        three.record("partial partner gives 1 or 2 c=0 joint kets", cen.joint_ket_counts[0] in (1, 2))
        three.record("... which conflates Set B", signature_conflicts(sig, SET_B))

        de, ep, et = _nonzero(rng, 3)
        m2 = _mode({(c, L): de, (a, R): ep, (b, R): et})
        sig = detection_signature(m1, m2, BOSON)
        cen = correlation_census(sig)
        three.record("3-ket1 x 3-ket2 has all three c=0 joint kets and one in each other class", cen.joint_ket_counts == (3, 1, 1))
        three.record("... so at least seven Bell states", cen.total_nonzero >= 7)
        three.record("... which conflates Set B", signature_conflicts(sig, SET_B))
    return [
        five.step("5ket", SET_B, samples),
        two.step("2ket", SET_B, samples),
        three.step("3ket-only", SET_B, samples),
    ]


def _nu_symbols():
    names = [f"nu_{v}{ch}" for v in range(3) for ch in (L, R)]  # phi ordering
    return exact.complex_symbols(names)


def six_ket_contradiction(samples: int = 100_000, seed: int = 0, statistics: str = BOSON) -> EliminationStep:
    """No 6-ket mode satisfies the three Set B cross-class criteria."""
    _require_boson(statistics)
    z, zc = _nu_symbols()
    nu = {(v, ch): z[mode_index(v, ch, D3)] for v in range(3) for ch in (L, R)}
    nuc = {(v, ch): zc[mode_index(v, ch, D3)] for v in range(3) for ch in (L, R)}
    D = exact.Derivation(z, zc)
    rems = {p: exact.contract_first(exact.exact_bell_grid(3, c, p, BOSON), z, sp.sqrt(2))
            for c, p in [(0, 0), (0, 1), (0, 2)]}
    rem10 = exact.contract_first(exact.exact_bell_grid(3, 1, 0, BOSON), z, sp.sqrt(2))
    names = []
    verified = True
    try:
        for p in range(3):
            nm = f"<Psi_0^{p}|c^dag c|Psi_1^0>"
            D.assume(nm, exact.hermitian_inner(rems[p], rem10, z, zc), "necessary orthogonality criterion")
            D.conjugate(nm + "*", nm)
            names += [nm, nm + "*"]
        rels = [
            ("pair-0", nu[1, R] * nuc[0, R], nu[2, L] * nuc[0, L]),
            ("pair-1", nu[2, R] * nuc[1, R], nu[0, L] * nuc[1, L]),
            ("pair-2", nu[0, R] * nuc[2, R], nu[1, L] * nuc[2, L]),
        ]
        for nm, v, u in rels:
            D.linear(nm, v + u, names, "linear combinations of the three criteria isolate a pair sum")
        (n1, v1, u1), (n2, v2, u2), (n3, v3, u3) = rels
        D.combine(
            "product",
            u1 * u2 * u3 + v1 * v2 * v3,
            [(u2 * u3, n1), (-v1 * u3, n2), (v1 * v2, n3)],
            "multiplying the pair relations: |nu_0L nu_1L nu_2L|^2 = -|nu_0R nu_1R nu_2R|^2",
        )
        prods = D.split_nonnegative("zero-product-", "product", "a vanishing sum of nonnegative terms")
        # every zero product is a product of moduli of distinct 6-ket coefficients
        ok = all(len(p) > len("zero-product-") for p in prods)
        D.steps.append(exact.Step(
            "contradiction", "a 6-ket mode has all six coefficients nonzero, so neither product can vanish",
            "contradiction", tuple(prods), "False", "", ok))
        verified = ok
    except exact.VerificationFailure:
        verified = False

    t = _Tally()
    t.record("exact criteria chain closes in a contradiction", verified)
    rng = np.random.default_rng([seed % 2**64, 6])
    batch = 10_000
    Lidx = [mode_index(v, L, D3) for v in range(3)]
    Ridx = [mode_index(v, R, D3) for v in range(3)]
    Q = _setB_forms()
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        V = _nonzero(rng, n * 6).reshape(n, 6)
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        l, r = V[:, Lidx], V[:, Ridx]
        rel = np.stack([
            r[:, 1] * r[:, 0].conj() + l[:, 2] * l[:, 0].conj(),
            r[:, 2] * r[:, 1].conj() + l[:, 0] * l[:, 1].conj(),
            r[:, 0] * r[:, 2].conj() + l[:, 1] * l[:, 2].conj(),
        ], axis=1)
        grams = np.einsum("ri,pij,rj->rp", V.conj(), Q, V)
        t.record_many("random all-nonzero nu never satisfies the three pair relations below 1e-8", np.max(np.abs(rel), axis=1) >= 1e-8)
        t.record_many("random all-nonzero unit nu violates a criterion by more than 1e-6", np.max(np.abs(grams), axis=1) > 1e-6)
        done += n
    return t.step("6ket-contradiction", SET_B, samples, D.to_list())


def _setB_forms() -> np.ndarray:
    """Quadratic forms ``Q`` with ``<Psi_0^p|c^dag c|Psi_1^0> = nu^dag Q nu``."""
    M = annihilation_maps(SET_B, BOSON)  # rows follow SET_B order: 00, 01, 02, 10
    return np.array([M[p].conj().T @ M[3] for p in range(3)])


def identity_apparatus_demo(d: int, labels=None, tol: float = 1e-9) -> dict:
    """Standard-basis apparatus: signature sets of one-per-class Bell states are disjoint."""
    if d < 2:
        raise DomainError("d must be >= 2")
    if labels is None:
        labels = [BellLabel(d, c, 0) for c in range(d)]
    modes = [DetectorMode.basis(m, d) for m in range(2 * d)]
    fired = {}
    for x in labels:
        psi = bell_state(x, BOSON)
        hits = set()
        for m, n in itertools.combinations_with_replacement(range(2 * d), 2):
            sig = detection_signature(modes[m], modes[n], BOSON)
            if not sig.is_null and abs(np.vdot(sig.amp, psi.amp)) > tol:
                hits.add((m, n))
        fired[str(x)] = sorted(hits)
    disjoint = all(not set(fired[str(x)]) & set(fired[str(y)]) for x, y in itertools.combinations(labels, 2))
    return {
        "kind": "identity-apparatus",
        "d": d,
        "labels": [str(x) for x in labels],
        "signatures": {k: [list(p) for p in v] for k, v in fired.items()},
        "disjoint": disjoint,
    }


def loser_class_check(cfg: SearchConfig) -> dict:
    """Numerical evidence for one loser, carried to its whole orbit by equivalence."""
    rep = search_instance(LOSER_REPRESENTATIVE, cfg)
    orb = orbit(LOSER_REPRESENTATIVE)
    return {
        "kind": "loser-class",
        "representative": LOSER_REPRESENTATIVE.key,
        "class": classify_tictactoe(LOSER_REPRESENTATIVE),
        "orbit_size": len(orb),
        "orbit_all_losers": all(classify_tictactoe(s) == LOSER for s in orb),
        "status": rep.status,
        "best_residual": rep.best_residual,
        "ok": rep.status == NO_INSTANCE_FOUND and len(orb) == 54,
    }


def projective_qutrit_chain(samples: int = 1000, seed: int = 0, cfg: SearchConfig | None = None) -> dict:
    """Run the full elimination chain plus the lower-bound demo; returns steps and the bound."""
    steps = single_channel_elimination(samples, seed)
    steps.append(four_ket_elimination(samples, seed))
    steps += setB_structure_elimination(samples, seed)
    steps.append(six_ket_contradiction(max(100 * samples, 1000), seed))
    demo = identity_apparatus_demo(3)
    losers = loser_class_check(cfg or SearchConfig(seed=seed))
    ok = all(s.eliminated for s in steps) and demo["disjoint"] and losers["ok"]
    return {
        "steps": steps,
        "identity": demo,
        "losers": losers,
        "verified": ok,
        "bound": {"d": 3, "statistics": BOSON, "max_distinguishable": 3 if ok else None, "of": 9},
    }
