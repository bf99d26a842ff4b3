"""Exact scalars and sparse exact linear algebra.

Scalars are ``gmpy2.mpq`` rationals.  When a computation needs a square root
that is not rational (spinor normalisation), elements of a quadratic
extension Q(sqrt d) are represented by :class:`QuadExt`; ``d = -1`` gives the
Gaussian rationals.  Every routine here only uses ``+ - * /`` and truth
testing, so it works unchanged over either field.

Vectors are plain ``dict`` objects mapping a column index to a nonzero
scalar.  Matrices are :class:`SparseMatrix`.  Subspaces are stored through a
canonical reduced row echelon basis, so two subspaces compare equal exactly
when they are equal.
"""

from __future__ import annotations

import re
from typing import Callable, Hashable, Iterable, Sequence

from gmpy2 import mpq

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)


class NoSolution(Exception):
    """Right-hand side is outside the column space."""


class DimensionMismatch(ValueError):
    pass


class FieldExtensionRequired(Exception):
    """A square root outside the working field was requested."""

    def __init__(self, radicand, d: int):
        self.radicand = radicand
        self.d = d
        super().__init__(
            f"sqrt({format_scalar(radicand)}) needs the extension Q(sqrt({d}))"
        )


# ---------------------------------------------------------------------------
# scalars


def _squarefree_part(n: int) -> tuple[int, int]:
    """Return (s, k) with n = s * k**2 and s squarefree (sign kept in s)."""
    if n == 0:
        return 0, 0
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, k = 1, 1
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            k *= p
        if n % p == 0:
            n //= p
            s *= p
        p += 1
    return sign * s * n, k


class QuadExt:
    """Element re + im*sqrt(d) of Q(sqrt d).

    Arithmetic results whose irrational part vanishes are returned as plain
    ``mpq`` so that rational values have a single representation.
    """

    __slots__ = ("re", "im", "d")

    def __init__(self, re, im, d: int):
        self.re = mpq(re)
        self.im = mpq(im)
        self.d = int(d)

    @staticmethod
    def make(re, im, d):
        if not im:
            return mpq(re)
        return QuadExt(re, im, d)

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise TypeError(f"mixing Q(sqrt {self.d}) with Q(sqrt {other.d})")
            return other.re, other.im
        if isinstance(other, (int, type(ONE))):
            return mpq(other), ZERO
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt.make(self.re + o[0], self.im + o[1], self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt.make(self.re - o[0], self.im - o[1], self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt.make(o[0] - self.re, o[1] - self.im, self.d)

    def __neg__(self):
        return QuadExt(-self.re, -self.im, self.d)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.re, self.im
        c, e = o
        return QuadExt.make(a * c + self.d * b * e, a * e + b * c, self.d)

    __rmul__ = __mul__

    def _inverse(self):
        norm = self.re * self.re - self.d * self.im * self.im
        return QuadExt.make(self.re / norm, -self.im / norm, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if isinstance(other, QuadExt):
            return self * other._inverse()
        return QuadExt.make(self.re / o[0], self.im / o[0], self.d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._inverse() * o[0]

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return (self.re, self.im, self.d) == (other.re, other.im, other.d)
        if isinstance(other, (int, type(ONE))):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im, self.d))

    def __repr__(self):
        return f"QuadExt({format_scalar(self)})"

    __str__ = lambda self: format_scalar(self)


class Field:
    """Working field: Q, or Q(sqrt d) for a squarefree integer d."""

    def __init__(self, d: int | None = None):
        if d is not None:
            s, _ = _squarefree_part(int(d))
            if s != d or d in (0, 1):
                raise ValueError(f"extension parameter must be squarefree and not 0, 1: {d}")
        self.d = d

    @property
    def name(self) -> str:
        if self.d is None:
            return "Q"
        if self.d == -1:
            return "Qi"
        return f"Q(sqrt{self.d})"

    @classmethod
    def parse(cls, text: str) -> "Field":
        t = text.strip().replace(" ", "")
        if t in ("Q", "QQ"):
            return cls()
        if t in ("Qi", "Q(i)", "Q(sqrt-1)"):
            return cls(-1)
        m = re.fullmatch(r"Q\(sqrt\(?(-?\d+)\)?\)", t)
        if m:
            return cls(int(m.group(1)))
        raise ValueError(f"unknown field {text!r}; expected Q, Qi or Q(sqrtD)")

    def sqrt(self, x):
        """Exact square root of a rational ``x`` inside this field."""
        x = mpq(x)
        if x == 0:
            return ZERO
        num, den = int(x.numerator), int(x.denominator)
        s, k = _squarefree_part(num * den)
        root = mpq(k, den)  # sqrt(x) = k/den * sqrt(s)
        if s == 1:
            return root
        if self.d == s:
            return QuadExt(0, root, s)
        raise FieldExtensionRequired(x, s)

    def __eq__(self, other):
        return isinstance(other, Field) and other.d == self.d

    def __hash__(self):
        return hash(("Field", self.d))

    def __repr__(self):
        return f"Field({self.name})"


QQ = Field()
QQ_I = Field(-1)


_RAT = r"[+-]?\d+(?:/\d+)?"


def parse_scalar(text) -> object:
    """Parse ``"p/q"``, ``"a/b+c/d i"`` (Gaussian) or ``"a+b*sqrt(d)"``."""
    if isinstance(text, (int, type(ONE))):
        return mpq(text)
    if not isinstance(text, str):
        raise TypeError(f"scalars must be given as strings, got {type(text).__name__}")
    t = text.replace(" ", "")
    if re.fullmatch(_RAT, t):
        return mpq(t.lstrip("+"))
    m = re.fullmatch(rf"({_RAT})?(?:([+-]?(?:\d+(?:/\d+)?)?)\*?i)", t)
    if m:
        re_part = mpq(m.group(1).lstrip("+")) if m.group(1) else ZERO
        im_txt = m.group(2)
        im_part = mpq(1) if im_txt in ("", "+") else mpq(-1) if im_txt == "-" else mpq(im_txt.lstrip("+"))
        return QuadExt.make(re_part, im_part, -1)
    m = re.fullmatch(rf"({_RAT})?(?:([+-]?(?:\d+(?:/\d+)?)?)\*?sqrt\((-?\d+)\))", t)
    if m:
        re_part = mpq(m.group(1).lstrip("+")) if m.group(1) else ZERO
        im_txt = m.group(2)
        im_part = mpq(1) if im_txt in ("", "+") else mpq(-1) if im_txt == "-" else mpq(im_txt.lstrip("+"))
        return QuadExt.make(re_part, im_part, int(m.group(3)))
    raise ValueError(f"cannot parse exact scalar {text!r}")


def format_scalar(x) -> str:
    if isinstance(x, QuadExt):
        unit = "i" if x.d == -1 else f"sqrt({x.d})"
        im = str(x.im)
        if im == "1":
            tail = unit
        elif im == "-1":
            tail = "-" + unit
        else:
            tail = f"{im}*{unit}"
        if not x.re:
            return tail
        sep = "" if tail.startswith("-") else "+"
        return f"{x.re}{sep}{tail}"
    return str(mpq(x))


# ---------------------------------------------------------------------------
# vectors


def vec_add(u: dict, v: dict, c=ONE) -> dict:
    """Return u + c*v."""
    out = dict(u)
    for k, x in v.items():
        y = out.get(k, ZERO) + c * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def vec_scale(v: dict, c) -> dict:
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_iadd(acc: dict, v: dict, c=ONE) -> None:
    for k, x in v.items():
        y = acc.get(k, ZERO) + c * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)


def clean(v: dict) -> dict:
    return {k: x for k, x in v.items() if x}


# ---------------------------------------------------------------------------
# matrices


class SparseMatrix:
    """Immutable sparse matrix; ``entries`` maps (row, col) to a nonzero scalar."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, entries: dict | None = None):
        self.nrows = nrows
        self.ncols = ncols
        rows: dict[int, dict] = {}
        for (i, j), x in (entries or {}).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError(f"entry {(i, j)} outside {nrows}x{ncols}")
            if x:
                rows.setdefault(i, {})[j] = x
        self._rows = rows

    @classmethod
    def from_rows(cls, rows: Sequence[dict], ncols: int) -> "SparseMatrix":
        m = cls(len(rows), ncols)
        for i, r in enumerate(rows):
            r = clean(r)
            for j in r:
                if not 0 <= j < ncols:
                    raise IndexError(f"column {j} outside width {ncols}")
            if r:
                m._rows[i] = r
        return m

    @classmethod
    def from_columns(cls, cols: Sequence[dict], nrows: int) -> "SparseMatrix":
        m = cls(nrows, len(cols))
        for j, c in enumerate(cols):
            for i, x in c.items():
                if not 0 <= i < nrows:
                    raise IndexError(f"row {i} outside height {nrows}")
                if x:
                    m._rows.setdefault(i, {})[j] = x
        return m

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        ncols = len(rows[0]) if rows else 0
        return cls.from_rows([{j: mpq(x) if isinstance(x, int) else x for j, x in enumerate(r) if x} for r in rows], ncols)

    @classmethod
    def identity(cls, n: int, c=ONE) -> "SparseMatrix":
        return cls(n, n, {(i, i): c for i in range(n)})

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def entries(self) -> dict:
        return {(i, j): x for i, r in self._rows.items() for j, x in r.items()}

    def row(self, i: int) -> dict:
        return dict(self._rows.get(i, {}))

    def rows(self) -> list[dict]:
        return [self.row(i) for i in range(self.nrows)]

    def columns(self) -> list[dict]:
        cols: list[dict] = [{} for _ in range(self.ncols)]
        for i, r in self._rows.items():
            for j, x in r.items():
                cols[j][i] = x
        return cols

    def __getitem__(self, ij):
        i, j = ij
        return self._rows.get(i, {}).get(j, ZERO)

    def to_dense(self) -> list[list]:
        return [[self[i, j] for j in range(self.ncols)] for i in range(self.nrows)]

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.ncols, self.nrows, {(j, i): x for (i, j), x in self.entries.items()})

    T = property(transpose)

    def apply(self, v: dict) -> dict:
        """Matrix times column vector."""
        out = {}
        for i, r in self._rows.items():
            s = ZERO
            for j, x in r.items():
                y = v.get(j)
                if y:
                    s += x * y
            if s:
                out[i] = s
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        out = SparseMatrix(self.nrows, other.ncols)
        for i, r in self._rows.items():
            acc: dict = {}
            for k, x in r.items():
                orow = other._rows.get(k)
                if orow:
                    vec_iadd(acc, orow, x)
            if acc:
                out._rows[i] = acc
        return out

    def _combine(self, other: "SparseMatrix", c) -> "SparseMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")
        out = SparseMatrix(self.nrows, self.ncols)
        out._rows = {i: dict(r) for i, r in self._rows.items()}
        for i, r in other._rows.items():
            acc = out._rows.setdefault(i, {})
            vec_iadd(acc, r, c)
            if not acc:
                del out._rows[i]
        return out

    def __add__(self, other):
        return self._combine(other, ONE)

    def __sub__(self, other):
        return self._combine(other, -ONE)

    def scale(self, c) -> "SparseMatrix":
        out = SparseMatrix(self.nrows, self.ncols)
        if c:
            out._rows = {i: {j: c * x for j, x in r.items()} for i, r in self._rows.items()}
        return out

    def __neg__(self):
        return self.scale(-ONE)

    def __rmul__(self, c):
        return self.scale(c)

    def kron(self, other: "SparseMatrix") -> "SparseMatrix":
        n2, m2 = other.shape
        ent = {}
        for (i, j), x in self.entries.items():
            for (k, l), y in other.entries.items():
                ent[(i * n2 + k, j * m2 + l)] = x * y
        return SparseMatrix(self.nrows * n2, self.ncols * m2, ent)

    def is_zero(self) -> bool:
        return not self._rows

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, frozenset(self.entries.items())))

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def stack(mats: Iterable[SparseMatrix], ncols: int | None = None) -> SparseMatrix:
    """Vertical concatenation."""
    rows: list[dict] = []
    width = ncols
    for m in mats:
        if width is None:
            width = m.ncols
        elif m.ncols != width:
            raise DimensionMismatch("stacked matrices need equal column counts")
        rows.extend(m.rows())
    return SparseMatrix.from_rows(rows, width or 0)


# ---------------------------------------------------------------------------
# elimination


def _echelon(rows: Iterable[dict]) -> dict[int, dict]:
    """Forward elimination; returns pivot column -> normalized row (pivot 1)."""
    pivots: dict[int, dict] = {}
    for row in rows:
        row = clean(row)
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                inv = ONE / row[c]
                pivots[c] = {k: x * inv for k, x in row.items()}
                break
            f = row[c]
            for k, x in prow.items():
                y = row.get(k, ZERO) - f * x
                if y:
                    row[k] = y
                else:
                    row.pop(k, None)
    return pivots


def _reduce(pivots: dict[int, dict]) -> list[tuple[int, dict]]:
    """Back substitution to reduced row echelon form, sorted by pivot column."""
    cols = sorted(pivots)
    done: dict[int, dict] = {}
    for c in reversed(cols):
        row = dict(pivots[c])
        for k in [k for k in row if k != c and k in done]:
            f = row.get(k)
            if f:
                vec_iadd(row, done[k], -f)
        done[c] = row
    return [(c, done[c]) for c in cols]


def rref(m: SparseMatrix) -> list[tuple[int, dict]]:
    """Reduced row echelon form as a list of (pivot column, row)."""
    return _reduce(_echelon(m.rows()))


def rank(m: SparseMatrix) -> int:
    return len(_echelon(m.rows()))


def kernel(m: SparseMatrix) -> "Subspace":
    """Exact null space of ``m`` (column vectors x with m x = 0)."""
    red = rref(m)
    pivot_cols = {c for c, _ in red}
    basis = []
    for f in range(m.ncols):
        if f in pivot_cols:
            continue
        v = {f: ONE}
        for c, row in red:
            x = row.get(f)
            if x:
                v[c] = -x
        basis.append(v)
    return Subspace(m.ncols, basis)


def solve(m: SparseMatrix, b: dict | Sequence):
    """A particular solution x of m x = b; raises :class:`NoSolution`."""
    if not isinstance(b, dict):
        if len(b) != m.nrows:
            raise DimensionMismatch(f"rhs length {len(b)} != {m.nrows} rows")
        b = {i: x for i, x in enumerate(b) if x}
    n = m.ncols
    aug = m.rows()
    for i, x in b.items():
        if not 0 <= i < m.nrows:
            raise DimensionMismatch(f"rhs index {i} outside {m.nrows} rows")
        aug[i] = dict(aug[i])
        aug[i][n] = x
    red = _reduce(_echelon(aug))
    x: dict = {}
    for c, row in red:
        if c == n:
            raise NoSolution("inconsistent system")
        val = row.get(n)
        if val:
            x[c] = val
    return x


def inverse(m: SparseMatrix) -> SparseMatrix:
    """Exact inverse of a square matrix; raises NoSolution when singular."""
    n = m.nrows
    if m.ncols != n:
        raise DimensionMismatch(f"inverse of non-square {m.shape}")
    aug = [dict(r) for r in m.rows()]
    for i in range(n):
        aug[i][n + i] = ONE
    red = _reduce(_echelon(aug))
    if len(red) != n or (n and red[-1][0] >= n):
        raise NoSolution("singular matrix")
    ent = {}
    for c, row in red:
        for k, x in row.items():
            if k >= n:
                ent[(c, k - n)] = x
    return SparseMatrix(n, n, ent)


def determinant(m: SparseMatrix):
    """Exact determinant by fraction-exact elimination."""
    n = m.nrows
    if m.ncols != n:
        raise DimensionMismatch(f"determinant of non-square {m.shape}")
    rows = [dict(r) for r in m.rows()]
    det = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i].get(c)), None)
        if piv is None:
            return ZERO
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        p = rows[c][c]
        det *= p
        for i in range(c + 1, n):
            f = rows[i].get(c)
            if f:
                vec_iadd(rows[i], rows[c], -f / p)
    return det


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """Subspace of K^n with a canonical reduced row echelon basis."""

    __slots__ = ("ambient", "_rows", "_pivots")

    def __init__(self, ambient: int, vectors: Iterable[dict] = ()):
        self.ambient = ambient
        vectors = list(vectors)
        for v in vectors:
            for k in v:
                if not 0 <= k < ambient:
                    raise DimensionMismatch(f"index {k} outside ambient dimension {ambient}")
        red = _reduce(_echelon(vectors))
        self._pivots = tuple(c for c, _ in red)
        self._rows = tuple(r for _, r in red)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, ({i: ONE} for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def basis(self) -> list[dict]:
        return [dict(r) for r in self._rows]

    @property
    def pivots(self) -> tuple[int, ...]:
        return self._pivots

    def matrix(self) -> SparseMatrix:
        return SparseMatrix.from_rows(self.basis, self.ambient)

    def _check(self, other: "Subspace"):
        if self.ambient != other.ambient:
            raise DimensionMismatch(f"ambient {self.ambient} vs {other.ambient}")

    def reduce(self, v: dict) -> dict:
        """Residual of v after eliminating the pivot columns of this subspace."""
        v = dict(v)
        for c, row in zip(self._pivots, self._rows):
            f = v.get(c)
            if f:
                vec_iadd(v, row, -f)
        return v

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    __contains__ = contains

    def coordinates(self, v: dict) -> list:
        """Coefficients of v in the canonical basis; raises NoSolution if v is outside."""
        if self.reduce(v):
            raise NoSolution("vector not in subspace")
        return [v.get(c, ZERO) for c in self._pivots]

    def is_subspace_of(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(r) for r in self._rows)

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace(self.ambient, list(self._rows) + list(other._rows))

    __add__ = sum

    def annihilator(self) -> "Subspace":
        """{x : <v, x> = 0 for every v in self} under the standard pairing."""
        return kernel(self.matrix())

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check(other)
        ann = self.annihilator().sum(other.annihilator())
        return ann.annihilator()

    __and__ = intersect

    def quotient_basis(self, sub: "Subspace") -> list[dict]:
        """Vectors of this subspace completing a basis of ``sub`` (requires sub <= self)."""
        self._check(sub)
        if not sub.is_subspace_of(self):
            raise ValueError("quotient_basis needs sub to lie inside the subspace")
        pivots = _echelon(sub._rows)
        out = []
        for r in self._rows:
            before = len(pivots)
            row = dict(r)
            while row:
                c = min(row)
                prow = pivots.get(c)
                if prow is None:
                    inv = ONE / row[c]
                    pivots[c] = {k: x * inv for k, x in row.items()}
                    break
                vec_iadd(row, prow, -row[c])
            if len(pivots) > before:
                out.append(dict(r))
        return out

    def is_direct_sum(self, other: "Subspace") -> bool:
        return self.dim + other.dim == self.sum(other).dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self._rows == other._rows

    def __hash__(self):
        return hash((self.ambient, self._pivots))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    return a.sum(b)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return a.intersect(b)


def quotient_basis(a: Subspace, b: Subspace) -> list[dict]:
    """Basis of a complement of ``a`` inside ``b``."""
    return b.quotient_basis(a)


def is_direct_sum(a: Subspace, b: Subspace) -> bool:
    a._check(b)
    return a.is_direct_sum(b)


# ---------------------------------------------------------------------------
# keyed coordinates


class Coordinates:
    """Growable bijection between hashable keys and column indices."""

    def __init__(self, keys: Iterable[Hashable] = ()):
        self.keys: list = []
        self.index: dict = {}
        for k in keys:
            self.add(k)

    def add(self, key) -> int:
        i = self.index.get(key)
        if i is None:
            i = len(self.keys)
            self.index[key] = i
            self.keys.append(key)
        return i

    def __len__(self):
        return len(self.keys)

    def vector(self, terms: dict, grow: bool = False) -> dict:
        out = {}
        for k, x in terms.items():
            if not x:
                continue
            i = self.add(k) if grow else self.index[k]
            out[i] = x
        return out

    def terms(self, v: dict) -> dict:
        return {self.keys[i]: x for i, x in v.items() if x}


def operator_matrix(domain: Sequence[dict], apply: Callable[[dict], dict],
                    codomain: Coordinates | None = None) -> tuple[SparseMatrix, Coordinates]:
    """Matrix of a linear map given by its action on keyed elements.

    ``domain`` is a list of term dicts (the columns); ``apply`` maps a term
    dict to a term dict.  Codomain keys are collected into ``codomain``.
    """
    codomain = codomain if codomain is not None else Coordinates()
    cols = [codomain.vector(apply(t), grow=True) for t in domain]
    return SparseMatrix.from_columns(cols, len(codomain)), codomain
