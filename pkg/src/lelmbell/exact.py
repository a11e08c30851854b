"""Exact (symbolic) derivations used by the no-go certificates.

Complex unknowns are represented by independent symbol pairs ``(z, zc)``
standing for a variable and its conjugate, so every orthogonality condition
is a polynomial with exact algebraic coefficients. A :class:`Derivation`
records facts (polynomials known to vanish) and only admits a new fact when
the claimed rewriting is checked by expansion, Groebner-basis membership or
a structural positivity test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import sympy as sp

from .fock import exchange_sign


class VerificationFailure(RuntimeError):
    """A claimed derivation step did not check out."""


def complex_symbols(names: Sequence[str]) -> tuple[list[sp.Symbol], list[sp.Symbol]]:
    z = [sp.Symbol(n) for n in names]
    zc = [sp.Symbol(n + "*") for n in names]
    return z, zc


def conj(expr, z, zc):
    """Conjugate of ``expr`` under the pairing ``z[k] <-> zc[k]``."""
    swap = {}
    for a, b in zip(z, zc):
        swap[sp.conjugate(a)] = b
        swap[sp.conjugate(b)] = a
    return sp.expand(sp.conjugate(expr).xreplace(swap))


def modulus_sq(k: int, z, zc):
    return z[k] * zc[k]


def root_of_unity(k: int, d: int):
    return sp.expand_complex(sp.exp(2 * sp.pi * sp.I * sp.Rational(k % d, d)))


def exact_bell_grid(d: int, c: int, p: int, statistics: str) -> sp.Matrix:
    """Exact amplitude grid of the (anti)symmetrized Bell state ``Psi_c^p``."""
    s = exchange_sign(statistics)
    A = sp.zeros(2 * d, 2 * d)
    for j in range(d):
        m, n = 2 * j, 2 * ((j + c) % d) + 1
        amp = root_of_unity(p * j, d) / sp.sqrt(2 * d)
        A[m, n] += amp
        A[n, m] += s * amp
    return A


def contract_first(grid: sp.Matrix, coeffs, scale=1) -> list:
    """``r[n] = scale * sum_m coeffs[m] * grid[m, n]``."""
    size = grid.shape[0]
    return [sp.expand(scale * sum(coeffs[m] * grid[m, n] for m in range(size))) for n in range(size)]


def hermitian_inner(u, v, z, zc):
    return sp.expand(sum(conj(a, z, zc) * b for a, b in zip(u, v)))


def find_linear_combination(target, premises, variables):
    """Constants ``c`` with ``target == sum c_i premises_i``, or None."""
    cs = sp.symbols(f"lc0:{len(premises)}")
    residual = sp.expand(target - sum(c * p for c, p in zip(cs, premises)))
    if residual == 0:
        return [sp.Integer(0)] * len(premises)
    eqs = sp.Poly(residual, *variables).coeffs()
    sol = sp.linsolve(eqs, cs)
    if not sol:
        return None
    values = list(next(iter(sol)))
    free = set().union(*(sp.sympify(v).free_symbols for v in values)) & set(cs)
    return [sp.nsimplify(sp.expand(v.subs({f: 0 for f in free}))) for v in values]


def is_sum_of_moduli_products(expr, z, zc) -> bool:
    """Every monomial is ``coef * prod |z_k|^(2e_k)`` with ``coef > 0``."""
    expr = sp.expand(expr)
    if expr == 0:
        return False
    poly = sp.Poly(expr, *z, *zc)
    n = len(z)
    for monom, coef in poly.terms():
        if monom[:n] != monom[n:]:
            return False
        if not (coef.is_real and coef > 0):
            return False
    return True


def moduli_factors(term, z, zc) -> list[int]:
    """Indices ``k`` whose modulus appears in a pure moduli monomial."""
    poly = sp.Poly(term, *z, *zc)
    (monom,) = poly.monoms()
    return [k for k in range(len(z)) if monom[k] > 0]


@dataclass
class Step:
    name: str
    claim: str
    method: str
    premises: tuple[str, ...]
    relation: str
    detail: str = ""
    verified: bool = True

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "claim": self.claim,
            "method": self.method,
            "premises": list(self.premises),
            "relation": self.relation,
            "detail": self.detail,
            "verified": self.verified,
        }


@dataclass
class Derivation:
    """Checked chain of facts of the form ``expr == 0``."""

    z: list
    zc: list
    facts: dict = field(default_factory=dict)
    steps: list = field(default_factory=list)

    @property
    def variables(self):
        return list(self.z) + list(self.zc)

    def _record(self, name, expr, claim, method, premises, detail="", verified=True):
        self.facts[name] = sp.expand(expr)
        self.steps.append(Step(name, claim, method, tuple(premises), f"{sp.sstr(sp.expand(expr))} = 0", detail, verified))
        if not verified:
            raise VerificationFailure(f"step {name!r} failed: {claim}")

    def assume(self, name: str, expr, claim: str) -> None:
        self._record(name, expr, claim, "condition", ())

    def conjugate(self, name: str, of: str) -> None:
        self._record(name, conj(self.facts[of], self.z, self.zc), f"complex conjugate of {of}", "conjugation", (of,))

    def linear(self, name: str, target, premises: Sequence[str], claim: str) -> None:
        exprs = [self.facts[p] for p in premises]
        coeffs = find_linear_combination(sp.expand(target), exprs, self.variables)
        ok = coeffs is not None and sp.expand(target - sum(c * e for c, e in zip(coeffs, exprs))) == 0
        detail = "" if coeffs is None else " + ".join(f"({sp.sstr(c)})*[{p}]" for c, p in zip(coeffs, premises) if c != 0)
        self._record(name, target, claim, "linear-combination", premises, detail, ok)

    def combine(self, name: str, target, terms: Sequence[tuple], claim: str) -> None:
        """``target == sum multiplier * fact`` with explicit polynomial multipliers."""
        total = sum(mult * self.facts[p] for mult, p in terms)
        ok = sp.expand(target - total) == 0
        detail = " + ".join(f"({sp.sstr(m)})*[{p}]" for m, p in terms)
        self._record(name, target, claim, "polynomial-combination", [p for _, p in terms], detail, ok)

    def split_nonnegative(self, prefix: str, of: str, claim: str) -> list[str]:
        """From ``sum_i t_i == 0`` with every ``t_i`` a positive multiple of a
        product of moduli, conclude ``t_i == 0`` for each term.

        Returns the names of the new facts, ``prefix`` followed by the
        1-based indices of the moduli in each term.
        """
        expr = self.facts[of]
        ok = is_sum_of_moduli_products(expr, self.z, self.zc)
        if not ok:
            self._record(prefix, expr, claim, "nonnegative-sum", (of,), "not a sum of moduli products", False)
        names = []
        for t in sp.Add.make_args(expr):
            nm = prefix + "".join(str(k + 1) for k in moduli_factors(t, self.z, self.zc))
            self._record(nm, t, claim, "nonnegative-sum", (of,), "each term is a positive product of squared moduli")
            names.append(nm)
        return names

    def ideal(self, name: str, target, premises: Sequence[str], claim: str) -> None:
        """Groebner-basis membership of ``target`` in the ideal of the premises."""
        exprs = [self.facts[p] for p in premises]
        used = sorted(set().union(*(e.free_symbols for e in exprs)) | target.free_symbols, key=str)
        G = sp.groebner(exprs, *used, order="grevlex")
        ok = bool(G.contains(sp.expand(target)))
        self._record(name, target, claim, "ideal-membership", premises, "Groebner basis reduction to zero", ok)

    def vanishing_modulus(self, name: str, of: str, k: int, claim: str) -> None:
        """``|z_k|^(2e) == 0`` implies ``z_k == 0``."""
        expr = self.facts[of]
        poly = sp.Poly(expr, *self.z, *self.zc)
        n = len(self.z)
        ok = len(poly.terms()) == 1
        if ok:
            monom, coef = poly.terms()[0]
            ok = coef != 0 and monom[k] > 0 and monom[k] == monom[n + k] and sum(monom) == 2 * monom[k]
        self._record(name, self.z[k], claim, "vanishing-modulus", (of,), "", ok)

    def to_list(self) -> list[dict]:
        return [s.to_dict() for s in self.steps]
