import numpy as np
import pytest

from lelmbell.fock import BOSON, FERMION, L, R, BellLabel, DomainError, all_labels, mode_index
from lelmbell.povm import (
    FATAL_FIVE,
    PovmElement,
    Rank1Kraus,
    apply_first_click,
    distinguishability_upper_bound,
    has_nonorthogonal_pair,
    is_complete,
    offdiagonal_norm,
    pigeonhole_holds,
    povm_transform_probability,
    qubit_povm_nogo,
    qutrit_subset_nogo,
    residual_gram,
    six_set_coverage,
)
from lelmbell.search import EXACT_INFEASIBLE
from lelmbell.symmetry import ANTI_LOSER, ANTI_WINNER, BellSet


def _cvec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_identity_element():
    psi = np.ones(4) / 2
    out, p = povm_transform_probability(PovmElement(np.eye(4)), psi)
    assert np.allclose(out, psi) and np.isclose(p, 1)


def test_rank1_probability_quarter():
    e = np.zeros(4)
    e[0] = 1
    out, p = povm_transform_probability(PovmElement(Rank1Kraus(2, e, e).matrix), np.ones(4) / 2)
    assert np.isclose(p, 0.25)
    assert np.allclose(out, e)


def test_null_outcome():
    e = np.zeros(4)
    e[0] = 1
    psi = np.zeros(4)
    psi[1] = 1
    assert povm_transform_probability(PovmElement(Rank1Kraus(2, e, e).matrix), psi) == (None, 0.0)


def test_complete_collection_probabilities():
    rng = np.random.default_rng(0)
    Q, _ = np.linalg.qr(_cvec(rng, 16).reshape(4, 4))
    elements = [PovmElement(np.outer(np.eye(4)[k], Q[:, k].conj())) for k in range(4)]
    assert is_complete(elements)
    assert all(e.is_psd() for e in elements)
    psi = _cvec(rng, 4)
    psi /= np.linalg.norm(psi)
    assert np.isclose(sum(povm_transform_probability(e, psi)[1] for e in elements), 1)


def test_rank1_is_rank_one():
    rng = np.random.default_rng(1)
    K = Rank1Kraus(3, _cvec(rng, 6), _cvec(rng, 6))
    s = np.linalg.svd(K.matrix, compute_uv=False)
    assert s[1] / s[0] < 1e-12


def test_rank1_length_checked():
    with pytest.raises(DomainError):
        Rank1Kraus(3, np.ones(4), np.ones(6))


@pytest.mark.parametrize("statistics,sign", [(BOSON, 1), (FERMION, -1)])
def test_first_click_phi_plus(statistics, sign):
    alpha = np.array([1, 2, 3, 4], dtype=complex)
    fc = apply_first_click(Rank1Kraus(2, alpha, np.eye(4)[0]), BellLabel(2, 0, 0), statistics)
    assert fc.separable
    expected = np.zeros(4, dtype=complex)
    # +-a2|0,L> + a1|0,R> +- a4|1,L> + a3|1,R>
    expected[mode_index(0, L, 2)] = sign * alpha[1]
    expected[mode_index(0, R, 2)] = alpha[0]
    expected[mode_index(1, L, 2)] = sign * alpha[3]
    expected[mode_index(1, R, 2)] = alpha[2]
    assert np.allclose(fc.particle2, expected / 2)


def test_first_click_qutrit_psi00():
    alpha = np.arange(1, 7).astype(complex)
    fc = apply_first_click(Rank1Kraus(3, alpha, np.eye(6)[0]), BellLabel(3, 0, 0), BOSON)
    expected = np.array([alpha[1], alpha[0], alpha[3], alpha[2], alpha[5], alpha[4]]) / np.sqrt(6)
    assert np.allclose(fc.particle2, expected)


def test_rank1_always_separable():
    rng = np.random.default_rng(2)
    for k in range(1000):
        K = Rank1Kraus(3, _cvec(rng, 6), _cvec(rng, 6))
        st = (BOSON, FERMION)[k % 2]
        for x in all_labels(3):
            assert apply_first_click(K, x, st).separable


def test_full_rank_never_separable():
    rng = np.random.default_rng(3)
    for _ in range(200):
        E = _cvec(rng, 36).reshape(6, 6)
        for x in all_labels(3):
            fc = apply_first_click(E, x, BOSON)
            assert not fc.separable
            assert not fc.is_null


def test_rank2_generically_entangling():
    rng = np.random.default_rng(4)
    E = np.outer(_cvec(rng, 6), _cvec(rng, 6)) + np.outer(_cvec(rng, 6), _cvec(rng, 6))
    assert not apply_first_click(E, BellLabel(3, 0, 0), BOSON).separable


def test_residual_gram_examples():
    all4 = BellSet(2, tuple(all_labels(2)))
    assert np.allclose(residual_gram(all4, np.zeros(4), BOSON), 0)
    G = residual_gram(all4, np.array([1, 0, 0, 0]), BOSON)
    assert offdiagonal_norm(G) > 0.1
    rng = np.random.default_rng(5)
    G = residual_gram(FATAL_FIVE, _cvec(rng, 6), FERMION)
    assert np.allclose(np.diag(G).imag, 0) and np.all(np.diag(G).real >= 0)


def test_gram_scales_with_n():
    rng = np.random.default_rng(6)
    alpha, n = _cvec(rng, 6), _cvec(rng, 6)
    lam = 0.7 - 1.3j

    def gram(nv):
        K = Rank1Kraus(3, alpha, nv)
        V = np.array([apply_first_click(K, x, BOSON).particle2 for x in FATAL_FIVE])
        return V.conj() @ V.T

    assert np.allclose(gram(lam * n), abs(lam) ** 2 * gram(n))


@pytest.mark.parametrize("statistics", [BOSON, FERMION])
def test_qubit_certificate(statistics):
    cert = qubit_povm_nogo(statistics, restarts=50)
    assert cert.status == EXACT_INFEASIBLE
    assert all(s["verified"] for s in cert.steps)
    assert cert.numeric["min_offdiagonal_gram_norm"] > 1e-3
    assert {f"alpha{k}=0" for k in range(1, 5)} <= {s["name"] for s in cert.steps}


@pytest.mark.parametrize("statistics", [BOSON, FERMION])
def test_qutrit_certificate(statistics):
    cert = qutrit_subset_nogo(statistics, restarts=50)
    assert cert.status == EXACT_INFEASIBLE
    assert {f"alpha{k}=0" for k in range(1, 7)} <= {s["name"] for s in cert.steps}
    assert cert.numeric["min_offdiagonal_gram_norm"] > 0


def test_product_identity_on_relations():
    # |a2 a4 a6|^2 + |a1 a3 a5|^2 is a polynomial combination of the three pair relations
    rng = np.random.default_rng(8)
    for _ in range(200):
        a1, a2, a3, a4, a5, a6 = _cvec(rng, 6)
        u1, v1 = a2 * a4.conjugate(), a1 * a5.conjugate()
        u2, v2 = a4 * a6.conjugate(), a3 * a1.conjugate()
        u3, v3 = a6 * a2.conjugate(), a5 * a3.conjugate()
        combo = u2 * u3 * (u1 + v1) - v1 * u3 * (u2 + v2) + v1 * v2 * (u3 + v3)
        assert np.isclose(combo, abs(a2 * a4 * a6) ** 2 + abs(a1 * a3 * a5) ** 2)


def test_coverage():
    rows = six_set_coverage()
    assert len(rows) == 84
    assert all(r.transform is not None and r.image.issuperset(FATAL_FIVE) for r in rows)
    by_key = {r.set.key: r for r in rows}
    assert by_key["00,01,02,10,11,12"].tictactoe == ANTI_WINNER
    assert by_key["00,01,02,10,11,12"].transform == "I"
    assert by_key["00,01,02,10,11,20"].tictactoe == ANTI_LOSER
    assert by_key["00,01,02,10,11,20"].transform == "I"


@pytest.mark.parametrize("d,bound", [(2, 4), (3, 6), (5, 10)])
def test_upper_bound(d, bound):
    assert distinguishability_upper_bound(d) == bound


def test_pigeonhole():
    rng = np.random.default_rng(9)
    for d in (2, 3):
        V = _cvec(rng, (2 * d + 1) * 2 * d).reshape(2 * d + 1, 2 * d)
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        assert has_nonorthogonal_pair(V)
        assert pigeonhole_holds(V)
    assert not has_nonorthogonal_pair(np.eye(4))
