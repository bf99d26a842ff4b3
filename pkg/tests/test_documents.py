import copy
import json

import pytest

from diracalg import fixtures
from diracalg.documents import DocumentError, parse_document, serialize_pair
from diracalg.liealg import DegenerateRestriction, JacobiViolation, NotInvariant


@pytest.mark.parametrize("name", sorted(fixtures.BUILDERS))
def test_shipped_data_matches_builder(name):
    assert fixtures.load_shipped(name) == fixtures.document(name)
    text = fixtures.data_path(name).read_text(encoding="utf-8")
    assert text == json.dumps(fixtures.document(name), indent=2, ensure_ascii=False) + "\n"


@pytest.mark.parametrize("name", fixtures.VALID)
def test_round_trip(name):
    doc = fixtures.document(name)
    parsed = parse_document(doc)
    again = serialize_pair(parsed.pair, parsed.modules, parsed.settings)
    assert again == doc
    assert serialize_pair(*_unpack(parse_document(again))) == again


def _unpack(p):
    return p.pair, p.modules, p.settings


@pytest.mark.parametrize("name,err", [
    ("broken_jacobi", JacobiViolation),
    ("isotropic_r", DegenerateRestriction),
    ("noninvariant_form", NotInvariant),
])
def test_negative_fixtures(name, err):
    with pytest.raises(err):
        parse_document(fixtures.document(name))


def test_jacobi_message_names_triple():
    with pytest.raises(JacobiViolation) as e:
        parse_document(fixtures.document("broken_jacobi"))
    assert "('h', 'e', 'f')" in str(e.value)


def _doc():
    return copy.deepcopy(fixtures.document("sl2_cartan"))


@pytest.mark.parametrize("mutate,path", [
    (lambda d: d.pop("basis"), "$.basis"),
    (lambda d: d.__setitem__("basis", ["h", "h", "f"]), "$.basis"),
    (lambda d: d["brackets"][0].__setitem__(0, "x"), "$.brackets[0][0]"),
    (lambda d: d["brackets"][0][2].__setitem__("e", "1/0"), "$.brackets[0][2].e"),
    (lambda d: d["form"][0].__setitem__(1, "1"), "$.form"),
    (lambda d: d["form"].pop(), "$.form"),
    (lambda d: d.__setitem__("r", ["q"]), "$.r[0]"),
    (lambda d: d.__setitem__("r", [7]), "$.r[0]"),
    (lambda d: d.__setitem__("settings", []), "$.settings"),
])
def test_positioned_diagnostics(mutate, path):
    d = _doc()
    mutate(d)
    with pytest.raises(DocumentError) as e:
        parse_document(d)
    assert e.value.path.startswith(path)


def test_bad_module_is_a_document_error():
    d = _doc()
    d["modules"][0]["action"]["h"][0][0] = "5"
    d["modules"][0]["action"]["e"][0][0] = "1"
    with pytest.raises(DocumentError):
        parse_document(d)


def test_gaussian_scalars_parse():
    d = _doc()
    d["modules"] = []
    d["brackets"][0][2] = {"e": "2+0i"}
    assert parse_document(d).pair.g.dim == 3
