"""Curated quadratic pairs and modules, built as pair documents.

Every fixture is produced as a plain JSON-able document (the same format the
command line reads) so that the shipped ``data/*.json`` files and the
in-memory fixtures cannot drift apart.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources


def _s(x) -> str:
    return str(Fraction(x))


def _mat(rows) -> list[list[str]]:
    return [[_s(x) for x in r] for r in rows]


def _zero(n):
    return [[0] * n for _ in range(n)]


def sl2_irrep(n: int) -> dict[str, list[list[int]]]:
    """Matrices of h, e, f on the irreducible module of highest weight n."""
    d = n + 1
    h, e, f = _zero(d), _zero(d), _zero(d)
    for k in range(d):
        h[k][k] = n - 2 * k
        if k + 1 < d:
            f[k + 1][k] = 1
        if k > 0:
            e[k - 1][k] = k * (n - k + 1)
    return {"h": h, "e": e, "f": f}


def _kron(a, b):
    return [[a[i][j] * b[k][l] for j in range(len(a[0])) for l in range(len(b[0]))]
            for i in range(len(a)) for k in range(len(b))]


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _add(a, b, c=1):
    return [[x + c * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _direct_sum(a, b):
    n, m = len(a), len(b)
    out = _zero(n + m)
    for i in range(n):
        for j in range(n):
            out[i][j] = a[i][j]
    for i in range(m):
        for j in range(m):
            out[n + i][n + j] = b[i][j]
    return out


def _module(name, action, label=None):
    dim = len(next(iter(action.values())))
    doc = {"name": name, "dim": dim, "action": {k: _mat(v) for k, v in action.items()}}
    if label is not None:
        doc["highest_weight"] = label
    return doc


SL2_BRACKETS = [["h", "e", {"e": "2"}], ["h", "f", {"f": "-2"}], ["e", "f", {"h": "1"}]]
SL2_FORM = [[2, 0, 0], [0, 0, 1], [0, 1, 0]]


def sl2_cartan() -> dict:
    mods = [_module(f"V{n}", sl2_irrep(n), n) for n in range(5)]
    v0, v1 = sl2_irrep(0), sl2_irrep(1)
    mods.append(_module("V0+V1", {k: _direct_sum(v0[k], v1[k]) for k in "hef"}))
    return {
        "name": "sl2_cartan",
        "basis": ["h", "e", "f"],
        "brackets": SL2_BRACKETS,
        "form": _mat(SL2_FORM),
        "r": ["h"],
        "modules": mods,
        "settings": {"cap": 3, "field": "Q"},
    }


def sl2_zero() -> dict:
    """sl2 with r = 0, so p = g and the cubic term is the full Cartan element."""
    return {
        "name": "sl2_zero",
        "basis": ["h", "e", "f"],
        "brackets": SL2_BRACKETS,
        "form": _mat(SL2_FORM),
        "r": [],
        "modules": [_module(f"V{n}", sl2_irrep(n), n) for n in range(3)],
        "settings": {"cap": 3, "field": "Q"},
    }


def sl2_full() -> dict:
    """r = g, so p = 0."""
    return {
        "name": "sl2_full",
        "basis": ["h", "e", "f"],
        "brackets": SL2_BRACKETS,
        "form": _mat(SL2_FORM),
        "r": ["h", "e", "f"],
        "modules": [_module("V1", sl2_irrep(1), 1)],
        "settings": {"cap": 3, "field": "Q"},
    }


def _sl2x2_pm_action(m: int, n: int) -> dict:
    """X+ = X1 + X2 and X- = X1 - X2 acting on V(m) tensor V(n)."""
    a, b = sl2_irrep(m), sl2_irrep(n)
    ia, ib = _eye(m + 1), _eye(n + 1)
    out = {}
    for x in "hef":
        left, right = _kron(a[x], ib), _kron(ia, b[x])
        out[x.upper() + "+"] = _add(left, right)
        out[x.upper() + "-"] = _add(left, right, -1)
    return out


def _canonical_brackets(basis, br):
    """Brackets [x_i, x_j] with i < j in basis order, as the serializer writes them."""
    index = {b: i for i, b in enumerate(basis)}
    out = {}
    for x, y, v in br:
        i, j = index[x], index[y]
        if i > j:
            i, j, v = j, i, {k: _s(-Fraction(c)) for k, c in v.items()}
        out[(i, j)] = dict(sorted(v.items(), key=lambda kv: index[kv[0]]))
    return [[basis[i], basis[j], out[(i, j)]] for i, j in sorted(out)]


BASIS_PM = ["H+", "E+", "F+", "H-", "E-", "F-"]


def sl2x2_diagonal() -> dict:
    """sl2+sl2 with the diagonal copy as r, in the basis X+ = X1+X2, X- = X1-X2."""
    br = []
    for (x, y, v) in SL2_BRACKETS:
        (z, c), = v.items()
        X, Y, Z = x.upper(), y.upper(), z.upper()
        br.append([X + "+", Y + "+", {Z + "+": c}])
        br.append([X + "+", Y + "-", {Z + "-": c}])
        br.append([X + "-", Y + "+", {Z + "-": c}])
        br.append([X + "-", Y + "-", {Z + "+": c}])
    form = _zero(6)
    for blk in (0, 3):
        for i in range(3):
            for j in range(3):
                form[blk + i][blk + j] = 2 * SL2_FORM[i][j]
    mods = [
        _module("V0xV0", _sl2x2_pm_action(0, 0)),
        _module("V1xV0", _sl2x2_pm_action(1, 0)),
        _module("V1xV1", _sl2x2_pm_action(1, 1)),
    ]
    return {
        "name": "sl2x2_diagonal",
        "basis": BASIS_PM,
        "brackets": _canonical_brackets(BASIS_PM, br),
        "form": _mat(form),
        "r": ["H+", "E+", "F+"],
        "modules": mods,
        "settings": {"cap": 3, "field": "auto"},
    }


def sl2x2_cartanline() -> dict:
    """sl2+sl2 with r spanned by h1+h2: a non-symmetric pair (nonzero cubic term).

    Basis K = h1+h2, J = h1-h2, e1, f1, e2, f2.
    """
    br = [
        ["K", "e1", {"e1": "2"}], ["K", "f1", {"f1": "-2"}],
        ["K", "e2", {"e2": "2"}], ["K", "f2", {"f2": "-2"}],
        ["J", "e1", {"e1": "2"}], ["J", "f1", {"f1": "-2"}],
        ["J", "e2", {"e2": "-2"}], ["J", "f2", {"f2": "2"}],
        ["e1", "f1", {"K": "1/2", "J": "1/2"}],
        ["e2", "f2", {"K": "1/2", "J": "-1/2"}],
    ]
    form = _zero(6)
    form[0][0] = form[1][1] = 4
    form[2][3] = form[3][2] = form[4][5] = form[5][4] = 1
    a, b = sl2_irrep(1), sl2_irrep(0)
    ia, ib = _eye(2), _eye(1)
    act = {
        "K": _add(_kron(a["h"], ib), _kron(ia, b["h"])),
        "J": _add(_kron(a["h"], ib), _kron(ia, b["h"]), -1),
        "e1": _kron(a["e"], ib), "f1": _kron(a["f"], ib),
        "e2": _kron(ia, b["e"]), "f2": _kron(ia, b["f"]),
    }
    triv = {k: [[0]] for k in act}
    return {
        "name": "sl2x2_cartanline",
        "basis": ["K", "J", "e1", "f1", "e2", "f2"],
        "brackets": br,
        "form": _mat(form),
        "r": ["K"],
        "modules": [_module("trivial", triv), _module("V1xV0", act)],
        "settings": {"cap": 3, "field": "auto"},
    }


def so4_so3() -> dict:
    """so(4) with r = so(3), B the trace form of the defining representation."""
    labels = ["L12", "L13", "L14", "L23", "L24", "L34"]

    def L(i, j):
        m = _zero(4)
        m[i - 1][j - 1] = 1
        m[j - 1][i - 1] = -1
        return m

    mats = {lab: L(int(lab[1]), int(lab[2])) for lab in labels}

    def mul(a, b):
        return [[sum(a[i][k] * b[k][j] for k in range(4)) for j in range(4)] for i in range(4)]

    def coords(m):
        return {lab: m[int(lab[1]) - 1][int(lab[2]) - 1] for lab in labels if m[int(lab[1]) - 1][int(lab[2]) - 1]}

    br = []
    for a in range(6):
        for b in range(a + 1, 6):
            x, y = mats[labels[a]], mats[labels[b]]
            c = _add(mul(x, y), mul(y, x), -1)
            v = coords(c)
            if v:
                br.append([labels[a], labels[b], {k: _s(c) for k, c in v.items()}])
    form = [[sum(mul(mats[a], mats[b])[i][i] for i in range(4)) for b in labels] for a in labels]
    return {
        "name": "so4_so3",
        "basis": labels,
        "brackets": br,
        "form": _mat(form),
        "r": ["L12", "L13", "L23"],
        "modules": [
            _module("trivial", {k: [[0]] for k in labels}),
            _module("defining", mats),
        ],
        "settings": {"cap": 3, "field": "Qi"},
    }


def gl2_cartan() -> dict:
    """gl2 = centre + sl2 with the trace form; r = span(c, h)."""
    br = [["h", "e", {"e": "2"}], ["h", "f", {"f": "-2"}], ["e", "f", {"h": "1"}]]
    form = [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
    return {
        "name": "gl2_cartan",
        "basis": ["c", "h", "e", "f"],
        "brackets": br,
        "form": _mat(form),
        "r": ["c", "h"],
        "modules": [],
        "settings": {"cap": 3, "field": "Q"},
    }


def abelian_orthonormal() -> dict:
    return {
        "name": "abelian2",
        "basis": ["x", "y"],
        "brackets": [],
        "form": _mat(_eye(2)),
        "r": [],
        "modules": [_module("trivial", {"x": [[0]], "y": [[0]]})],
        "settings": {"cap": 3, "field": "auto"},
    }


def abelian_invertible() -> dict:
    """One-dimensional abelian g with <x,x> = 2 and a character where D is invertible."""
    return {
        "name": "abelian_invertible",
        "basis": ["x"],
        "brackets": [],
        "form": _mat([[2]]),
        "r": [],
        "modules": [_module("chi1", {"x": [[1]]}), _module("trivial", {"x": [[0]]})],
        "settings": {"cap": 3, "field": "Q"},
    }


def broken_jacobi() -> dict:
    doc = sl2_cartan()
    doc["name"] = "broken_jacobi"
    doc["brackets"] = [["h", "e", {"e": "3"}], ["h", "f", {"f": "-2"}], ["e", "f", {"h": "1"}]]
    doc["modules"] = []
    return doc


def isotropic_r() -> dict:
    doc = sl2_cartan()
    doc["name"] = "isotropic_r"
    doc["r"] = ["e"]
    doc["modules"] = []
    return doc


def noninvariant_form() -> dict:
    doc = sl2_cartan()
    doc["name"] = "noninvariant_form"
    doc["form"] = _mat(_eye(3))
    doc["modules"] = []
    return doc


BUILDERS = {
    "sl2_cartan": sl2_cartan,
    "sl2_zero": sl2_zero,
    "sl2_full": sl2_full,
    "sl2x2_diagonal": sl2x2_diagonal,
    "sl2x2_cartanline": sl2x2_cartanline,
    "so4_so3": so4_so3,
    "gl2_cartan": gl2_cartan,
    "abelian2": abelian_orthonormal,
    "abelian_invertible": abelian_invertible,
    "broken_jacobi": broken_jacobi,
    "isotropic_r": isotropic_r,
    "noninvariant_form": noninvariant_form,
}

VALID = ["sl2_cartan", "sl2_zero", "sl2_full", "sl2x2_diagonal", "sl2x2_cartanline",
         "so4_so3", "gl2_cartan", "abelian2", "abelian_invertible"]
NEGATIVE = ["broken_jacobi", "isotropic_r", "noninvariant_form"]


def document(name: str) -> dict:
    return BUILDERS[name]()


def data_path(name: str):
    return resources.files("diracalg") / "data" / f"{name}.json"


def load_shipped(name: str) -> dict:
    return json.loads(data_path(name).read_text(encoding="utf-8"))


def pair(name: str):
    from .documents import parse_pair
    return parse_pair(document(name))


def modules(name: str):
    from .documents import parse_document
    return parse_document(document(name)).modules
