import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from diracalg.exactlin import (
    QQ, QQ_I, Field, FieldExtensionRequired, NoSolution, DimensionMismatch,
    QuadExt, SparseMatrix, Subspace, kernel, solve, rank, parse_scalar,
    format_scalar, intersect, is_direct_sum, quotient_basis, subspace_sum,
)


def M(rows):
    return SparseMatrix.from_dense(rows)


def test_kernel_of_zero_is_everything():
    assert kernel(SparseMatrix.zero(2, 2)) == Subspace.full(2)


def test_kernel_of_identity_is_zero():
    assert kernel(SparseMatrix.identity(3)).dim == 0


def test_kernel_rank_one():
    k = kernel(M([[1, 2], [2, 4]]))
    assert k == Subspace(2, [{0: mpq(2), 1: mpq(-1)}])
    assert k.basis == [{0: mpq(1), 1: mpq(-1, 2)}]


def test_solve_identity():
    assert solve(SparseMatrix.identity(3), [1, 0, 5]) == {0: 1, 2: 5}


def test_solve_inconsistent():
    with pytest.raises(NoSolution):
        solve(M([[1, 0], [0, 0]]), [0, 1])


def test_solve_particular():
    x = solve(M([[1, 2], [2, 4]]), [1, 2])
    assert x.get(0, 0) + 2 * x.get(1, 0) == 1


def test_solve_length_mismatch():
    with pytest.raises(DimensionMismatch):
        solve(SparseMatrix.identity(2), [1, 2, 3])


def test_subspace_lattice_basics():
    a = Subspace(2, [{0: 1}])
    b = Subspace(2, [{1: 1}])
    assert is_direct_sum(a, b)
    assert subspace_sum(a, b) == Subspace.full(2)
    assert intersect(a, a) == a
    assert not is_direct_sum(a, a)
    zero = Subspace(2)
    assert is_direct_sum(zero, zero)


def test_overlap_three_and_two_in_four():
    # common vector (1,1,1,1)
    a = Subspace(4, [{0: 1, 1: 1, 2: 1, 3: 1}, {0: 1}, {1: 1}])
    b = Subspace(4, [{0: 1, 1: 1, 2: 1, 3: 1}, {3: 1}])
    assert (a.dim, b.dim) == (3, 2)
    assert subspace_sum(a, b).dim == 4
    i = intersect(a, b)
    assert i == Subspace(4, [{0: 2, 1: 2, 2: 2, 3: 2}])


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Subspace(2).sum(Subspace(3))


def test_quotient_basis_completes():
    b = Subspace(4, [{0: 1, 1: 1}, {2: 1}, {3: 1, 0: 1}])
    a = Subspace(4, [{0: 1, 1: 1, 2: 1}])
    q = quotient_basis(a, b)
    assert len(q) == b.dim - a.dim
    assert Subspace(4, q + a.basis) == b


small = st.integers(-3, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_rank_nullity(r, c, data):
    rows = [[data.draw(small) for _ in range(c)] for _ in range(r)]
    m = M(rows)
    k = kernel(m)
    assert k.dim + rank(m) == c
    for v in k.basis:
        assert m.apply(v) == {}


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_intersection_is_contained(data):
    def draw_space():
        n = data.draw(st.integers(0, 4))
        return Subspace(4, [{j: mpq(data.draw(small)) for j in range(4)} for _ in range(n)])
    a, b = draw_space(), draw_space()
    i = a & b
    assert i.is_subspace_of(a) and i.is_subspace_of(b)
    assert a.dim + b.dim == (a + b).dim + i.dim


def test_matrix_ops():
    a = M([[1, 2], [3, 4]])
    assert (a @ SparseMatrix.identity(2)) == a
    assert (a - a).is_zero()
    assert a.T[0, 1] == 3
    k = SparseMatrix.identity(2).kron(a)
    assert k.shape == (4, 4) and k[3, 3] == 4 and k[0, 2] == 0


def test_gaussian_arithmetic():
    i = QQ_I.sqrt(-1)
    assert i * i == -1
    assert isinstance(i * i, type(mpq(1)))
    z = 1 + i
    assert z / z == 1
    assert (z * (1 - i)) == 2
    assert hash(QuadExt.make(3, 0, -1)) == hash(mpq(3))


def test_field_sqrt_extension_needed():
    assert QQ.sqrt(mpq(9, 4)) == mpq(3, 2)
    with pytest.raises(FieldExtensionRequired) as err:
        QQ.sqrt(-1)
    assert err.value.d == -1
    with pytest.raises(FieldExtensionRequired) as err:
        QQ.sqrt(8)
    assert err.value.d == 2
    r = Field(2).sqrt(8)
    assert r * r == 8


def test_kernel_over_gaussian():
    i = QQ_I.sqrt(-1)
    m = SparseMatrix.from_rows([{0: mpq(1), 1: i}], 2)
    (v,) = kernel(m).basis
    assert m.apply(v) == {}


@pytest.mark.parametrize("text", ["1/2", "-3", "1/2+3/4 i", "-i", "2*i", "1-sqrt(2)", "1/3*sqrt(-3)"])
def test_scalar_roundtrip(text):
    x = parse_scalar(text)
    assert parse_scalar(format_scalar(x)) == x


def test_scalar_parse_errors():
    with pytest.raises(ValueError):
        parse_scalar("0.5")
    with pytest.raises(TypeError):
        parse_scalar(0.5)


def test_field_parse():
    assert Field.parse("Q") == QQ
    assert Field.parse("Qi") == QQ_I
    assert Field.parse("Q(sqrt2)").d == 2
    with pytest.raises(ValueError):
        Field.parse("R")


def test_inverse_and_determinant():
    from diracalg.exactlin import inverse, determinant
    a = M([[2, 1], [1, 1]])
    assert inverse(a) @ a == SparseMatrix.identity(2)
    assert determinant(a) == 1
    assert determinant(M([[0, 1], [1, 0]])) == -1
    with pytest.raises(NoSolution):
        inverse(M([[1, 2], [2, 4]]))
