"""JSON pair documents: parsing with positioned diagnostics, and serialization.

A document looks like::

    {
      "name": "sl2_cartan",
      "basis": ["h", "e", "f"],
      "brackets": [["h", "e", {"e": "2"}], ...],
      "form": [["2", "0", "0"], ...],
      "r": ["h"],
      "modules": [{"name": "V1", "dim": 2, "action": {"h": [["1", "0"], ...]}}],
      "settings": {"cap": 3, "field": "Q"}
    }

All scalars are strings (``"p/q"``, ``"a+b i"`` or ``"a+b*sqrt(d)"``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exactlin import SparseMatrix, format_scalar, parse_scalar
from .liealg import InvariantForm, LieAlgebra, QuadraticPair, validate_pair


class DocumentError(ValueError):
    """Malformed input document; ``path`` locates the offending entry."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class ParsedDocument:
    pair: QuadraticPair
    modules: dict = field(default_factory=dict)
    settings: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict)


def _scalar(x, path):
    try:
        return parse_scalar(x)
    except (ValueError, TypeError, ZeroDivisionError) as err:
        raise DocumentError(path, str(err)) from None


def _matrix(rows, n, m, path) -> SparseMatrix:
    if not isinstance(rows, list) or len(rows) != n:
        raise DocumentError(path, f"expected {n} rows")
    ent = {}
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != m:
            raise DocumentError(f"{path}[{i}]", f"expected {m} entries")
        for j, x in enumerate(row):
            v = _scalar(x, f"{path}[{i}][{j}]")
            if v:
                ent[(i, j)] = v
    return SparseMatrix(n, m, ent)


def _require(doc, key, kind, path="$"):
    if key not in doc:
        raise DocumentError(f"{path}.{key}", "missing")
    v = doc[key]
    if not isinstance(v, kind):
        raise DocumentError(f"{path}.{key}", f"expected {kind.__name__}")
    return v


def parse_lie(doc: dict) -> LieAlgebra:
    basis = _require(doc, "basis", list)
    if not all(isinstance(b, str) for b in basis):
        raise DocumentError("$.basis", "labels must be strings")
    if len(set(basis)) != len(basis):
        raise DocumentError("$.basis", "labels must be distinct")
    index = {b: i for i, b in enumerate(basis)}

    def lookup(label, path):
        if label not in index:
            raise DocumentError(path, f"unknown basis label {label!r}")
        return index[label]

    brackets = {}
    for t, entry in enumerate(doc.get("brackets", [])):
        path = f"$.brackets[{t}]"
        if not (isinstance(entry, list) and len(entry) == 3 and isinstance(entry[2], dict)):
            raise DocumentError(path, "expected [x, y, {z: coefficient}]")
        i, j = lookup(entry[0], path + "[0]"), lookup(entry[1], path + "[1]")
        v = {lookup(k, f"{path}[2].{k}"): _scalar(c, f"{path}[2].{k}") for k, c in entry[2].items()}
        if (i, j) in brackets or (j, i) in brackets:
            raise DocumentError(path, "bracket given twice")
        brackets[(i, j)] = {k: c for k, c in v.items() if c}
    return LieAlgebra(basis, brackets)


def parse_pair(doc: dict) -> QuadraticPair:
    """Parse and validate; structural failures raise the specific PairError."""
    if not isinstance(doc, dict):
        raise DocumentError("$", "document must be a JSON object")
    g = parse_lie(doc)
    n = g.dim
    gram = _matrix(_require(doc, "form", list), n, n, "$.form")
    if gram != gram.T:
        raise DocumentError("$.form", "Gram matrix is not symmetric")
    r = doc.get("r", [])
    if not isinstance(r, list):
        raise DocumentError("$.r", "expected a list")
    r_idx = []
    for t, x in enumerate(r):
        if isinstance(x, int) and not isinstance(x, bool):
            if not 0 <= x < n:
                raise DocumentError(f"$.r[{t}]", f"index {x} out of range")
            r_idx.append(x)
        elif isinstance(x, str) and x in g.labels:
            r_idx.append(g.index(x))
        else:
            raise DocumentError(f"$.r[{t}]", f"unknown basis element {x!r}")
    return validate_pair(g, InvariantForm(gram), r_idx, name=doc.get("name", "pair"))


def parse_modules(doc: dict, g: LieAlgebra) -> dict:
    from .specrep import GModule, ModuleError

    out = {}
    for t, m in enumerate(doc.get("modules", [])):
        path = f"$.modules[{t}]"
        if not isinstance(m, dict):
            raise DocumentError(path, "expected an object")
        name = _require(m, "name", str, path)
        dim = _require(m, "dim", int, path)
        action = _require(m, "action", dict, path)
        mats = []
        for lab in g.labels:
            if lab not in action:
                raise DocumentError(f"{path}.action.{lab}", "missing action matrix")
            mats.append(_matrix(action[lab], dim, dim, f"{path}.action.{lab}"))
        extra = set(action) - set(g.labels)
        if extra:
            raise DocumentError(f"{path}.action", f"unknown basis labels {sorted(extra)}")
        if name in out:
            raise DocumentError(f"{path}.name", f"duplicate module name {name!r}")
        try:
            out[name] = GModule(g, mats, name=name, highest_weight=m.get("highest_weight"))
        except ModuleError as err:
            raise DocumentError(path, str(err)) from None
    return out


def parse_document(doc: dict) -> ParsedDocument:
    pair = parse_pair(doc)
    modules = parse_modules(doc, pair.g)
    settings = doc.get("settings", {})
    if not isinstance(settings, dict):
        raise DocumentError("$.settings", "expected an object")
    return ParsedDocument(pair, modules, dict(settings), doc)


def serialize_pair(pair: QuadraticPair, modules: dict | None = None,
                   settings: dict | None = None) -> dict:
    """Canonical document for a pair (inverse of :func:`parse_document`)."""
    g = pair.g
    brackets = []
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            v = g.bracket_basis(i, j)
            if v:
                brackets.append([g.labels[i], g.labels[j],
                                 {g.labels[k]: format_scalar(c) for k, c in sorted(v.items())}])
    doc = {
        "name": pair.name,
        "basis": list(g.labels),
        "brackets": brackets,
        "form": [[format_scalar(x) for x in row] for row in pair.form.gram.to_dense()],
        "r": [g.labels[i] for i in pair.r_indices],
        "modules": [],
        "settings": dict(settings or {}),
    }
    for name, mod in (modules or {}).items():
        entry = {
            "name": name,
            "dim": mod.dim,
            "action": {lab: [[format_scalar(x) for x in row] for row in mod.matrices[i].to_dense()]
                       for i, lab in enumerate(g.labels)},
        }
        if mod.highest_weight is not None:
            entry["highest_weight"] = mod.highest_weight
        doc["modules"].append(entry)
    return doc
