import itertools

import pytest
from gmpy2 import mpq

from diracalg import fixtures
from diracalg.exactlin import ONE
from diracalg.uenv import (
    FiltrationOverflow, SymAlgebra, UEnvelope, UnsupportedDegree, casimir,
    casimir_sym, duflo, duflo_inverse, invariants_basis, rewrite_word,
    sym_invariants_basis, symmetrize, unsymmetrize,
)

H, E, F = 0, 1, 2
HALF = mpq(1, 2)


@pytest.fixture(scope="module")
def sl2():
    return fixtures.pair("sl2_cartan")


@pytest.fixture(scope="module")
def U(sl2):
    return UEnvelope(sl2.g, 4)


@pytest.fixture(scope="module")
def S(sl2):
    return SymAlgebra(sl2.g.labels, sl2.g)


def test_defining_relation(U):
    h, e, f = U.gen(H), U.gen(E), U.gen(F)
    assert e * f - f * e == h
    assert h * e - e * h == e * 2
    assert e * U.one() == e == U.one() * e


def test_overflow_is_loud(sl2):
    U2 = UEnvelope(sl2.g, 2)
    e, f = U2.gen(E), U2.gen(F)
    with pytest.raises(FiltrationOverflow):
        (e * f) * e


def test_against_rewriting_oracle(U, sl2):
    for word in itertools.product(range(3), repeat=3):
        assert U.word(word) == rewrite_word(sl2.g, word)
    for word in itertools.product(range(3), repeat=4):
        assert U.word(word) == rewrite_word(sl2.g, word)


@pytest.mark.parametrize("name", ["sl2_cartan", "so4_so3"])
def test_rewriting_oracle_bigger(name):
    pair = fixtures.pair(name)
    U = UEnvelope(pair.g, 3)
    for word in itertools.product(range(pair.g.dim), repeat=3):
        assert U.word(word) == rewrite_word(pair.g, word)


def test_associativity_exhaustive(sl2):
    U = UEnvelope(sl2.g, 3)
    monos = [U.element({m: ONE}) for m in U.monomials(3)]
    for a, b, c in itertools.product(monos, repeat=3):
        if a.degree() + b.degree() + c.degree() <= 3:
            assert (a * b) * c == a * (b * c)


def test_adjoint_examples(U, S, sl2):
    h, e, f = U.gen(H), U.gen(E), U.gen(F)
    assert U.adjoint({H: ONE}, e * f).is_zero()
    assert U.adjoint({E: ONE}, U.one()).is_zero()
    om = casimir(U, sl2.g_basis, sl2.g_dual)
    for a in range(3):
        assert U.adjoint({a: ONE}, om).is_zero()
    x = e * f * h
    assert U.adjoint({E: ONE}, x) == U.gen(E) * x - x * U.gen(E)


def test_adjoint_is_lie_action(U, sl2):
    monos = [U.element({m: ONE}) for m in U.monomials(3)]
    for a, b in itertools.combinations(range(3), 2):
        ab = sl2.g.bracket({a: ONE}, {b: ONE})
        for u in monos:
            lhs = U.adjoint(ab, u)
            rhs = U.adjoint({a: ONE}, U.adjoint({b: ONE}, u)) - U.adjoint({b: ONE}, U.adjoint({a: ONE}, u))
            assert lhs == rhs


def test_symmetrize(U, S):
    assert symmetrize(S.gen(H) + 3, U) == U.gen(H) + 3
    e, f, h = U.gen(E), U.gen(F), U.gen(H)
    assert symmetrize(S.gen(E) * S.gen(F), U) == (e * f + f * e).scale(HALF)
    perms = [e * f * h, e * h * f, f * e * h, f * h * e, h * e * f, h * f * e]
    total = U.zero()
    for p in perms:
        total = total + p
    assert symmetrize(S.gen(H) * S.gen(E) * S.gen(F), U) == total.scale(mpq(1, 6))
    s = S.gen(E) ** 2 * S.gen(H) - S.gen(F)
    assert unsymmetrize(symmetrize(s, U), S) == s


def test_symmetrize_equivariant(U, S):
    for m in S.monomials(3):
        s = S.element({m: ONE})
        for a in range(3):
            assert symmetrize(S.adjoint({a: ONE}, s), U) == U.adjoint({a: ONE}, symmetrize(s, U))


def test_casimir(U, S, sl2):
    e, f, h = U.gen(E), U.gen(F), U.gen(H)
    om = casimir(U, sl2.g_basis, sl2.g_dual)
    assert om == (h * h).scale(HALF) + e * f + f * e
    ab = fixtures.pair("abelian2")
    Ua = UEnvelope(ab.g, 2)
    assert casimir(Ua, ab.g_basis, ab.g_dual) == Ua.gen(0) * Ua.gen(0) + Ua.gen(1) * Ua.gen(1)
    d = fixtures.pair("sl2x2_diagonal")
    Ud = UEnvelope(d.g, 2)
    om_d = casimir(Ud, d.g_basis, d.g_dual)
    # Omega_1 + Omega_2 with X_1 = (X+ + X-)/2, X_2 = (X+ - X-)/2
    def factor(sign):
        hx = (Ud.gen(0) + Ud.gen(3).scale(sign)).scale(HALF)
        ex = (Ud.gen(1) + Ud.gen(4).scale(sign)).scale(HALF)
        fx = (Ud.gen(2) + Ud.gen(5).scale(sign)).scale(HALF)
        return (hx * hx).scale(HALF) + ex * fx + fx * ex
    assert om_d == factor(1) + factor(-1)


def test_duflo(U, S, sl2):
    assert duflo(S.gen(E) + 2, U) == symmetrize(S.gen(E) + 2, U)
    om_s = casimir_sym(S, sl2.g_basis, sl2.g_dual)
    om = casimir(U, sl2.g_basis, sl2.g_dual)
    # 1/48 * (K_hh * 1 + 2 * K_ef * 2) = (8 + 16)/48
    assert duflo(om_s, U) == om + HALF
    assert duflo_inverse(om, S) == om_s - HALF
    with pytest.raises(UnsupportedDegree):
        duflo(S.gen(E) ** 4, U)
    ab = fixtures.pair("abelian2")
    Sa = SymAlgebra(ab.g.labels, ab.g)
    Ua = UEnvelope(ab.g, 3)
    s = Sa.gen(0) ** 2 * Sa.gen(1)
    assert duflo(s, Ua) == symmetrize(s, Ua)


def test_duflo_lower_order_and_multiplicative():
    gl2 = fixtures.pair("gl2_cartan")
    U = UEnvelope(gl2.g, 3)
    S = SymAlgebra(gl2.g.labels, gl2.g)
    inv = sym_invariants_basis(S, gl2.g_basis, 2)
    assert len(inv) == 4  # 1, c, c^2, Omega
    for s in S.monomials(3):
        x = S.element({s: ONE})
        diff = duflo(x, U) - symmetrize(x, U)
        assert diff.degree() < max(x.degree(), 1)
    c = S.gen(0)
    om = casimir_sym(S, gl2.g_basis, gl2.g_dual)
    for s1, s2 in [(c, om), (c, c ** 2), (c, c)]:
        assert duflo(s1 * s2, U) == duflo(s1, U) * duflo(s2, U)


def test_invariants(sl2):
    U = UEnvelope(sl2.g, 2)
    z = invariants_basis(U, sl2.g_basis)
    assert len(z) == 2
    om = casimir(U, sl2.g_basis, sl2.g_dual)
    from diracalg.uenv import pbw_coordinates
    from diracalg.exactlin import Subspace
    monos = U.monomials()
    span = Subspace(len(monos), [pbw_coordinates(x, monos) for x in z])
    assert span == Subspace(len(monos), [pbw_coordinates(U.one(), monos), pbw_coordinates(om, monos)])
    assert len(invariants_basis(U, sl2.g_basis, cap=1)) == 1
    Ur = UEnvelope(sl2.r_algebra, 2)
    assert len(invariants_basis(Ur, [{0: ONE}])) == 3
