import pytest
from gmpy2 import mpq

from diracalg import fixtures
from diracalg.dirac import DiracAlgebra
from diracalg.exactlin import ONE, Field, FieldExtensionRequired, SparseMatrix
from diracalg.specrep import (
    DiracMatrix, GModule, ModuleError, NoCentralCharacter, dirac_cohomology, direct_sum,
    spinor_from_gram, spinor_module, verify_central_character,
)

GRAMS = {
    "dim0": ([], "Q"),
    "dim1": ([[2]], "Q"),
    "dim2_hyperbolic": ([[0, 1], [1, 0]], "Q"),
    "dim2_euclidean": ([[1, 0], [0, 1]], "Qi"),
    "dim3": ([[2, 0, 0], [0, 0, 1], [0, 1, 0]], "Q"),
    "dim4": ([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 2, 0], [0, 0, 0, -2]], "Q"),
    "dim4_diagonal": ([[1, 0, 0, 0], [0, 3, 0, 0], [0, 0, -1, 0], [0, 0, 0, -3]], "Q"),
}


def _gram(rows):
    return SparseMatrix.from_dense(rows) if rows else SparseMatrix.zero(0, 0)


@pytest.mark.parametrize("name", sorted(GRAMS))
def test_spinor_relations(name):
    rows, field = GRAMS[name]
    S = spinor_from_gram(_gram(rows), "auto")
    assert S.field == Field.parse(field)
    assert S.dim == 2 ** (len(rows) // 2)
    assert S.check_relations()
    if len(rows) % 2 == 0:
        assert S.image_dimension() == 2 ** len(rows)


def test_euclidean_plane_needs_gaussian_rationals():
    with pytest.raises(FieldExtensionRequired) as err:
        spinor_from_gram(_gram([[1, 0], [0, 1]]), "Q")
    assert err.value.d == -1
    assert spinor_from_gram(_gram([[1, 0], [0, 1]]), "Qi").check_relations()


def test_odd_line_over_q():
    # a leftover line with value 1 needs sqrt(1/2)
    with pytest.raises(FieldExtensionRequired):
        spinor_from_gram(_gram([[1]]), "Q")
    S = spinor_from_gram(_gram([[1]]), "Q(sqrt2)")
    assert S.check_relations()


@pytest.mark.parametrize("name,field", [
    ("sl2_cartan", "Q"), ("sl2_zero", "Q"), ("gl2_cartan", "Q"),
    ("sl2x2_diagonal", "Q(sqrt2)"), ("sl2x2_cartanline", "Q(sqrt2)"),
    ("so4_so3", "Qi"), ("abelian2", "Qi"),
])
def test_fixture_spinors(name, field):
    S = spinor_module(fixtures.pair(name), "auto")
    assert S.field == Field.parse(field)
    assert S.check_relations()


@pytest.mark.parametrize("name", ["sl2_cartan", "sl2x2_diagonal", "sl2x2_cartanline", "so4_so3", "gl2_cartan"])
def test_dirac_matrix_commutes_with_xi(name):
    p = fixtures.pair(name)
    S = spinor_module(p, "auto")
    for V in fixtures.modules(name).values():
        assert DiracMatrix(p, V, S).commutes_with_xi()


@pytest.fixture(scope="module")
def sl2():
    return fixtures.pair("sl2_cartan")


@pytest.fixture(scope="module")
def sl2_modules():
    return fixtures.modules("sl2_cartan")


@pytest.mark.parametrize("n", range(5))
def test_sl2_cohomology_battery(sl2, sl2_modules, n):
    S = spinor_module(sl2, "Q")
    D = DiracMatrix(sl2, sl2_modules[f"V{n}"], S)
    H = dirac_cohomology(D)
    assert H.dim == 2
    assert H.weights == [(mpq(-(n + 1)),), (mpq(n + 1),)]
    om = DiracAlgebra(sl2, 2).casimir()
    rep = verify_central_character(D, om)
    assert rep.chi == mpq(n * n, 2) + n
    assert rep.holds


def test_chirality_does_not_change_cohomology():
    p = fixtures.pair("sl2_zero")
    mods = fixtures.modules("sl2_zero")
    for V in mods.values():
        dims = {dirac_cohomology(DiracMatrix(p, V, spinor_module(p, "auto", s))).dim for s in (1, -1)}
        assert len(dims) == 1


def test_reducible_module_has_no_central_character(sl2, sl2_modules):
    V = sl2_modules["V0+V1"]
    D = DiracMatrix(sl2, V, spinor_module(sl2, "Q"))
    assert dirac_cohomology(D).dim == 4
    with pytest.raises(NoCentralCharacter):
        verify_central_character(D, DiracAlgebra(sl2, 2).casimir())


def test_invertible_dirac_operator_has_no_cohomology():
    p = fixtures.pair("abelian_invertible")
    mods = fixtures.modules("abelian_invertible")
    S = spinor_module(p, "auto")
    assert dirac_cohomology(DiracMatrix(p, mods["chi1"], S)).dim == 0
    assert dirac_cohomology(DiracMatrix(p, mods["trivial"], S)).dim == 1


def test_module_validation(sl2):
    I2 = SparseMatrix.identity(2)
    with pytest.raises(ModuleError):
        GModule(sl2.g, [I2, I2, I2])
    with pytest.raises(ModuleError):
        GModule(sl2.g, [I2, I2])


def test_direct_sum(sl2, sl2_modules):
    V = direct_sum(sl2_modules["V0"], sl2_modules["V1"])
    assert V.dim == 3
    V.check()


def test_rho_of_casimir(sl2, sl2_modules):
    om = DiracAlgebra(sl2, 2).casimir()
    V2 = sl2_modules["V2"]
    assert V2.rho(om) == SparseMatrix.identity(3, 4 * ONE)
