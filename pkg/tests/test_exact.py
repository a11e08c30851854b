import pytest
import sympy as sp

from lelmbell import exact
from lelmbell.fock import BOSON, FERMION, BellLabel, bell_state


@pytest.mark.parametrize("statistics", [BOSON, FERMION])
def test_exact_grid_matches_numeric(statistics):
    for c in range(3):
        for p in range(3):
            G = exact.exact_bell_grid(3, c, p, statistics)
            num = bell_state(BellLabel(3, c, p), statistics).amp
            assert max(abs(complex(G[m, n]) - num[m, n]) for m in range(6) for n in range(6)) < 1e-14


def test_conjugation_pairs():
    z, zc = exact.complex_symbols(["a", "b"])
    expr = sp.I * z[0] * zc[1] + 2
    assert sp.expand(exact.conj(expr, z, zc) - (-sp.I * zc[0] * z[1] + 2)) == 0


def test_linear_combination_found():
    z, zc = exact.complex_symbols(["a", "b"])
    p1, p2 = z[0] + z[1], z[0] - z[1]
    coeffs = exact.find_linear_combination(z[0], [p1, p2], z + zc)
    assert coeffs == [sp.Rational(1, 2), sp.Rational(1, 2)]


def test_moduli_products():
    z, zc = exact.complex_symbols(["a", "b"])
    assert exact.is_sum_of_moduli_products(z[0] * zc[0] * z[1] * zc[1] + 3 * z[1] * zc[1], z, zc)
    assert not exact.is_sum_of_moduli_products(z[0] * zc[1], z, zc)
    assert not exact.is_sum_of_moduli_products(z[0] * zc[0] - z[1] * zc[1], z, zc)


def test_derivation_chain():
    z, zc = exact.complex_symbols(["a", "b"])
    D = exact.Derivation(z, zc)
    D.assume("f", z[0] * zc[0] + z[1] * zc[1], "sum of moduli vanishes")
    names = D.split_nonnegative("t-", "f", "nonnegative terms")
    assert sorted(names) == ["t-1", "t-2"]
    D.vanishing_modulus("a=0", "t-1", 0, "a = 0")
    assert all(s["verified"] for s in D.to_list())


def test_negative_control_linear():
    # a false claim must be rejected
    z, zc = exact.complex_symbols(["a", "b"])
    D = exact.Derivation(z, zc)
    D.assume("f", z[0] + z[1], "given")
    with pytest.raises(exact.VerificationFailure):
        D.linear("bad", z[0], ["f"], "a = 0 does not follow")
    assert D.steps[-1].verified is False


def test_negative_control_split():
    z, zc = exact.complex_symbols(["a", "b"])
    D = exact.Derivation(z, zc)
    D.assume("f", z[0] * zc[0] - z[1] * zc[1], "equal moduli")
    with pytest.raises(exact.VerificationFailure):
        D.split_nonnegative("t-", "f", "not a nonnegative sum")


def test_negative_control_ideal():
    z, zc = exact.complex_symbols(["a", "b"])
    D = exact.Derivation(z, zc)
    D.assume("f", z[0] * z[1], "product vanishes")
    with pytest.raises(exact.VerificationFailure):
        D.ideal("bad", z[0], ["f"], "a factor of a vanishing product need not vanish")


def test_combine_checks_multipliers():
    z, zc = exact.complex_symbols(["a"])
    D = exact.Derivation(z, zc)
    D.assume("f", z[0] - 1, "a = 1")
    D.combine("g", z[0] ** 2 - z[0], [(z[0], "f")], "a^2 = a")
    with pytest.raises(exact.VerificationFailure):
        D.combine("h", z[0] ** 2 - 1, [(z[0], "f")], "wrong multiplier")
