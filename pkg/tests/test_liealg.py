import pytest
from gmpy2 import mpq

from diracalg import fixtures
from diracalg.documents import parse_pair
from diracalg.exactlin import ONE, SparseMatrix, Subspace
from diracalg.liealg import (
    DegenerateForm, DegenerateRestriction, InvariantForm, JacobiViolation,
    LieAlgebra, NotInvariant, NotSubalgebra, validate_pair,
)

H, E, F = 0, 1, 2


@pytest.fixture(scope="module")
def sl2():
    return fixtures.pair("sl2_cartan")


def test_sl2_pair_valid(sl2):
    assert sl2.r_indices == (H,)
    assert Subspace(3, sl2.p_basis) == Subspace(3, [{E: ONE}, {F: ONE}])
    assert sl2.p_labels == ("e", "f")


def test_isotropic_r_rejected():
    with pytest.raises(DegenerateRestriction):
        parse_pair(fixtures.document("isotropic_r"))


def test_broken_jacobi_names_triple():
    with pytest.raises(JacobiViolation) as err:
        parse_pair(fixtures.document("broken_jacobi"))
    assert err.value.triple == (0, 1, 2)
    assert "('h', 'e', 'f')" in str(err.value)


def test_noninvariant_form():
    with pytest.raises(NotInvariant):
        parse_pair(fixtures.document("noninvariant_form"))


def test_degenerate_form():
    g = LieAlgebra(["x", "y"])
    with pytest.raises(DegenerateForm):
        validate_pair(g, InvariantForm.from_dense([[1, 1], [1, 1]]), [])


def test_not_subalgebra():
    p = fixtures.pair("sl2_cartan")
    with pytest.raises(NotSubalgebra):
        validate_pair(p.g, p.form, [E, F])


def test_diagonal_pair(sl2):
    d = fixtures.pair("sl2x2_diagonal")
    assert d.p_labels == ("H-", "E-", "F-")
    assert d.is_symmetric()
    assert not fixtures.pair("sl2x2_cartanline").is_symmetric()


def test_dual_bases(sl2):
    assert sl2.g_dual == [{H: mpq(1, 2)}, {F: ONE}, {E: ONE}]
    assert sl2.p_dual == [{F: ONE}, {E: ONE}]
    g = LieAlgebra(["x", "y"])
    ortho = validate_pair(g, InvariantForm.from_dense([[1, 0], [0, 1]]), [])
    assert ortho.g_dual == ortho.g_basis


@pytest.mark.parametrize("name", fixtures.VALID)
def test_reconstruction_and_orthogonality(name):
    pair = fixtures.pair(name)
    b = pair.form
    for i in range(pair.g.dim):
        x = {i: ONE}
        acc = {}
        for a, bk in zip(pair.g_basis, pair.g_dual):
            c = b(x, bk)
            for k, v in a.items():
                acc[k] = acc.get(k, 0) + c * v
        assert {k: v for k, v in acc.items() if v} == x
    for r in pair.r_basis:
        for p in pair.p_basis:
            assert b(r, p) == 0
    assert pair.dim_r + pair.dim_p == pair.g.dim


def test_adjoint_matrices(sl2):
    adh = sl2.g.ad({H: ONE})
    assert adh == SparseMatrix(3, 3, {(E, E): mpq(2), (F, F): mpq(-2)})
    assert LieAlgebra(["x", "y"]).ad({0: ONE}).is_zero()
    assert sl2.g.killing[H, H] == 8
    assert sl2.g.killing[E, F] == 4


def test_r_subalgebra_structure():
    p = fixtures.pair("sl2x2_diagonal")
    r = p.r_algebra
    assert r.labels == ("H+", "E+", "F+")
    assert r.bracket_basis(1, 2) == {0: ONE}


def test_antisymmetry_conflict():
    from diracalg.liealg import StructureError
    with pytest.raises(StructureError):
        LieAlgebra(["a", "b"], {(0, 1): {0: ONE}, (1, 0): {0: ONE}})
