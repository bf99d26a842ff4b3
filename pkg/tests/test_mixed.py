import itertools

import pytest

from diracalg import fixtures
from diracalg.cliff import pair_space
from diracalg.exactlin import ONE
from diracalg.mixed import MixedAlgebra, MixedElement
from diracalg.uenv import FiltrationOverflow, UEnvelope


@pytest.fixture(scope="module")
def A():
    p = fixtures.pair("sl2_cartan")
    return MixedAlgebra(UEnvelope(p.g, 3), pair_space(p, "p"))


def test_tensor_and_parity(A):
    ue = A.u({1: ONE})
    cf = A.c({1: ONE})
    x = ue * cf
    assert str(x) == "u_e⊗c_f"
    assert x.parity == 1
    assert (x + A.one()).parity is None
    assert x.u_degree() == 1


def test_odd_parts_anticommute(A):
    ce, cf = A.c({0: ONE}), A.c({1: ONE})
    # c_e c_f + c_f c_e = <e, f>
    assert ce * cf + cf * ce == A.scalar(1)
    assert A.supercommutator(ce, cf) == A.scalar(1)
    assert A.supercommutator(ce, ce).is_zero()


def test_u_and_c_commute(A):
    uh, ce = A.u({0: ONE}), A.c({0: ONE})
    assert uh * ce == ce * uh
    assert A.supercommutator(uh, ce).is_zero()


def test_enveloping_relation(A):
    uh, ue = A.u({0: ONE}), A.u({1: ONE})
    assert uh * ue - ue * uh == 2 * ue


def test_associativity_on_basis(A):
    keys = A.basis(1)
    els = [MixedElement(A, {k: ONE}) for k in keys]
    for x, y, z in itertools.product(els, repeat=3):
        assert (x * y) * z == x * (y * z)


def test_cap_is_enforced(A):
    ue = A.u({1: ONE})
    with pytest.raises(FiltrationOverflow):
        ue * ue * ue * ue


def test_basis_parity_filter(A):
    odd = A.basis(1, parity=1)
    even = A.basis(1, parity=0)
    assert len(odd) + len(even) == len(A.basis(1)) == 4 * 4
