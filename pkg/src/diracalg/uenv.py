"""Enveloping algebra U(g) truncated at an explicit filtration cap, the
symmetric algebra S(g), symmetrization and the low-degree Duflo map.

PBW monomials are exponent tuples ``(k_0, ..., k_{n-1})`` standing for the
ordered product ``x_0^k_0 ... x_{n-1}^k_{n-1}``.  A product whose degree would
exceed the cap raises :class:`FiltrationOverflow`; nothing is ever silently
truncated.
"""

from __future__ import annotations

from itertools import combinations_with_replacement, permutations
from math import factorial
from typing import Iterable, Sequence

from .cliff import format_terms
from .exactlin import (
    ONE, ZERO, SparseMatrix, kernel, mpq,
    vec_iadd,
)
from .liealg import LieAlgebra


class FiltrationOverflow(ArithmeticError):
    """A result would leave the filtration window; raise the cap."""


class UnsupportedDegree(ValueError):
    """Degree outside the window where the truncated Duflo series is exact."""


DUFLO_WINDOW = 3


def _add_e(m: tuple, i: int, c: int = 1) -> tuple:
    return m[:i] + (m[i] + c,) + m[i + 1:]


def mono_degree(m: tuple) -> int:
    return sum(m)


def mono_word(m: tuple) -> list[int]:
    out = []
    for i, k in enumerate(m):
        out.extend([i] * k)
    return out


def monomials_upto(n: int, cap: int) -> list[tuple]:
    """All exponent tuples of total degree <= cap, ordered by degree then lexicographically."""
    out = []
    for d in range(cap + 1):
        for combo in combinations_with_replacement(range(n), d):
            m = [0] * n
            for i in combo:
                m[i] += 1
            out.append(tuple(m))
    return out


def format_mono(labels, m: tuple, sep: str = "*") -> str:
    parts = []
    for i, k in enumerate(m):
        if k == 1:
            parts.append(labels[i])
        elif k > 1:
            parts.append(f"{labels[i]}^{k}")
    return sep.join(parts) if parts else "1"


def _mono_key(m: tuple):
    return (sum(m), tuple(-k for k in m))


class UEnvelope:
    """U(g) with PBW normal ordering, memoized on monomial-generator products."""

    def __init__(self, lie: LieAlgebra, cap: int, name: str = "U"):
        if cap < 0:
            raise ValueError("filtration cap must be nonnegative")
        self.lie = lie
        self.cap = cap
        self.n = lie.dim
        self.name = name
        self._zero_mono = (0,) * self.n
        self._mg: dict = {}
        self._mm: dict = {}
        self._ad: dict = {}

    # -- construction ------------------------------------------------------

    def element(self, terms: dict) -> "PBWElement":
        for m in terms:
            if sum(m) > self.cap:
                raise FiltrationOverflow(f"degree {sum(m)} exceeds cap {self.cap}")
        return PBWElement(self, terms)

    def one(self) -> "PBWElement":
        return PBWElement(self, {self._zero_mono: ONE})

    def scalar(self, c) -> "PBWElement":
        return PBWElement(self, {self._zero_mono: c} if c else {})

    def zero(self) -> "PBWElement":
        return PBWElement(self, {})

    def gen(self, i: int) -> "PBWElement":
        if self.cap < 1:
            raise FiltrationOverflow("cap 0 holds no generators")
        return PBWElement(self, {_add_e(self._zero_mono, i): ONE})

    def vec(self, coords: dict) -> "PBWElement":
        """Image of a Lie algebra element (coordinate dict)."""
        if self.cap < 1 and coords:
            raise FiltrationOverflow("cap 0 holds no generators")
        return PBWElement(self, {_add_e(self._zero_mono, i): c for i, c in coords.items() if c})

    def monomials(self, cap: int | None = None) -> list[tuple]:
        return monomials_upto(self.n, self.cap if cap is None else cap)

    # -- normal ordering ---------------------------------------------------

    def mono_gen(self, m: tuple, i: int) -> dict:
        """PBW expansion of m * x_i (no cap check; degree grows by one)."""
        key = (m, i)
        hit = self._mg.get(key)
        if hit is not None:
            return hit
        j = -1
        for t in range(self.n - 1, -1, -1):
            if m[t]:
                j = t
                break
        if j <= i:
            out = {_add_e(m, i): ONE}
        else:
            # m = m' x_j with j > i:  m' x_j x_i = (m' x_i) x_j + m' [x_j, x_i]
            mp = _add_e(m, j, -1)
            out: dict = {}
            for t, c in self.mono_gen(mp, i).items():
                vec_iadd(out, self.mono_gen(t, j), c)
            for k, c in self.lie.bracket_basis(j, i).items():
                vec_iadd(out, self.mono_gen(mp, k), c)
        self._mg[key] = out
        return out

    def word(self, letters: Iterable[int], start: tuple | None = None) -> dict:
        cur = {start if start is not None else self._zero_mono: ONE}
        for i in letters:
            nxt: dict = {}
            for t, c in cur.items():
                vec_iadd(nxt, self.mono_gen(t, i), c)
            cur = nxt
        return cur

    def mono_mono(self, a: tuple, b: tuple) -> dict:
        key = (a, b)
        hit = self._mm.get(key)
        if hit is None:
            hit = self.word(mono_word(b), start=a)
            self._mm[key] = hit
        return hit

    def mul(self, x: "PBWElement", y: "PBWElement") -> "PBWElement":
        if x.terms and y.terms and x.degree() + y.degree() > self.cap:
            raise FiltrationOverflow(
                f"product of degrees {x.degree()} + {y.degree()} exceeds cap {self.cap}")
        out: dict = {}
        for a, c in x.terms.items():
            for b, d in y.terms.items():
                vec_iadd(out, self.mono_mono(a, b), c * d)
        return PBWElement(self, out)

    # -- adjoint action ----------------------------------------------------

    def ad_basis_mono(self, a: int, m: tuple) -> dict:
        """[x_a, m] as a derivation; degree never exceeds deg m."""
        key = (a, m)
        hit = self._ad.get(key)
        if hit is not None:
            return hit
        w = mono_word(m)
        out: dict = {}
        for s, letter in enumerate(w):
            br = self.lie.bracket_basis(a, letter)
            if not br:
                continue
            for k, c in br.items():
                cur = self.word(w[:s] + [k] + w[s + 1:])
                vec_iadd(out, cur, c)
        self._ad[key] = out
        return out

    def adjoint(self, a: dict, u: "PBWElement") -> "PBWElement":
        out: dict = {}
        for i, ca in a.items():
            for m, c in u.terms.items():
                vec_iadd(out, self.ad_basis_mono(i, m), ca * c)
        return PBWElement(self, out)

    def ad_matrix(self, a: dict, cap: int | None = None) -> tuple[SparseMatrix, list[tuple]]:
        monos = self.monomials(cap)
        idx = {m: k for k, m in enumerate(monos)}
        cols = []
        for m in monos:
            img = self.adjoint(a, PBWElement(self, {m: ONE})).terms
            cols.append({idx[t]: c for t, c in img.items()})
        return SparseMatrix.from_columns(cols, len(monos)), monos

    def __repr__(self):
        return f"UEnvelope({self.lie!r}, cap={self.cap})"


class PBWElement:
    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: UEnvelope, terms: dict):
        self.algebra = algebra
        self.terms = {m: c for m, c in terms.items() if c}

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree_part(self, d: int) -> "PBWElement":
        return PBWElement(self.algebra, {m: c for m, c in self.terms.items() if sum(m) == d})

    def _coerce(self, other):
        if isinstance(other, PBWElement):
            if other.algebra is not self.algebra:
                raise ValueError("elements of different enveloping algebras")
            return other
        return self.algebra.scalar(other)

    def __add__(self, other):
        o = self._coerce(other)
        t = dict(self.terms)
        vec_iadd(t, o.terms)
        return PBWElement(self.algebra, t)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        t = dict(self.terms)
        vec_iadd(t, o.terms, -ONE)
        return PBWElement(self.algebra, t)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return PBWElement(self.algebra, {m: -c for m, c in self.terms.items()})

    def scale(self, c) -> "PBWElement":
        return PBWElement(self.algebra, {m: c * x for m, x in self.terms.items()} if c else {})

    def __mul__(self, other):
        if isinstance(other, PBWElement):
            return self.algebra.mul(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if isinstance(other, PBWElement):
            return self.algebra is other.algebra and self.terms == other.terms
        return self.terms == self.algebra.scalar(other).terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self):
        return format_pbw(self)

    def __repr__(self):
        return f"PBWElement({format_pbw(self)})"


def format_pbw(x, labels=None) -> str:
    labels = labels or x.algebra.lie.labels
    pieces = [(format_mono(labels, m), x.terms[m]) for m in sorted(x.terms, key=_mono_key)]
    return format_terms(pieces)


# ---------------------------------------------------------------------------
# symmetric algebra


class SymAlgebra:
    """S(V) on a basis with labels; elements are exponent-tuple polynomials."""

    def __init__(self, labels: Sequence[str], lie: LieAlgebra | None = None):
        self.labels = tuple(labels)
        self.n = len(self.labels)
        self.lie = lie

    def element(self, terms: dict) -> "SymElement":
        return SymElement(self, terms)

    def one(self) -> "SymElement":
        return SymElement(self, {(0,) * self.n: ONE})

    def scalar(self, c) -> "SymElement":
        return SymElement(self, {(0,) * self.n: c} if c else {})

    def zero(self) -> "SymElement":
        return SymElement(self, {})

    def gen(self, i: int) -> "SymElement":
        return SymElement(self, {_add_e((0,) * self.n, i): ONE})

    def vec(self, coords: dict) -> "SymElement":
        z = (0,) * self.n
        return SymElement(self, {_add_e(z, i): c for i, c in coords.items() if c})

    def monomials(self, cap: int) -> list[tuple]:
        return monomials_upto(self.n, cap)

    def adjoint(self, a: dict, s: "SymElement") -> "SymElement":
        """Derivation extending ad a (requires ``lie``)."""
        out = self.zero()
        for i in range(self.n):
            di = s.partial(i)
            if not di:
                continue
            img = self.lie.bracket(a, {i: ONE})
            if img:
                out = out + di * self.vec(img)
        return out


class SymElement:
    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: SymAlgebra, terms: dict):
        self.algebra = algebra
        self.terms = {m: c for m, c in terms.items() if c}

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree_part(self, d: int) -> "SymElement":
        return SymElement(self.algebra, {m: c for m, c in self.terms.items() if sum(m) == d})

    def _coerce(self, other):
        if isinstance(other, SymElement):
            return other
        return self.algebra.scalar(other)

    def __add__(self, other):
        t = dict(self.terms)
        vec_iadd(t, self._coerce(other).terms)
        return SymElement(self.algebra, t)

    __radd__ = __add__

    def __sub__(self, other):
        t = dict(self.terms)
        vec_iadd(t, self._coerce(other).terms, -ONE)
        return SymElement(self.algebra, t)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.scale(-ONE)

    def scale(self, c) -> "SymElement":
        return SymElement(self.algebra, {m: c * x for m, x in self.terms.items()} if c else {})

    def __mul__(self, other):
        if not isinstance(other, SymElement):
            return self.scale(other)
        out: dict = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                k = tuple(i + j for i, j in zip(a, b))
                v = out.get(k, ZERO) + x * y
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return SymElement(self.algebra, out)

    def __rmul__(self, c):
        return self.scale(c)

    def __pow__(self, k: int):
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def partial(self, i: int) -> "SymElement":
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                out[_add_e(m, i, -1)] = c * m[i]
        return SymElement(self.algebra, out)

    def __eq__(self, other):
        if isinstance(other, SymElement):
            return self.terms == other.terms
        return self.terms == self.algebra.scalar(other).terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self):
        pieces = [(format_mono(self.algebra.labels, m), self.terms[m])
                  for m in sorted(self.terms, key=_mono_key)]
        return format_terms(pieces)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# symmetrization and Duflo


def symmetrize_mono(U: UEnvelope, m: tuple) -> dict:
    w = mono_word(m)
    p = len(w)
    if p > U.cap:
        raise FiltrationOverflow(f"degree {p} exceeds cap {U.cap}")
    if p <= 1:
        return {m: ONE}
    distinct = set(permutations(w))
    weight = mpq(factorial(p) // len(distinct), factorial(p))
    out: dict = {}
    for perm in sorted(distinct):
        vec_iadd(out, U.word(perm), weight)
    return out


def symmetrize(s: SymElement, U: UEnvelope) -> PBWElement:
    """(1/p!) sum over orderings of each monomial's letters."""
    if s.degree() > U.cap:
        raise FiltrationOverflow(f"degree {s.degree()} exceeds cap {U.cap}")
    out: dict = {}
    for m, c in s.terms.items():
        vec_iadd(out, symmetrize_mono(U, m), c)
    return PBWElement(U, out)


def unsymmetrize(u: PBWElement, S: SymAlgebra) -> SymElement:
    """Inverse of the symmetrization map (recursion on the top degree)."""
    U = u.algebra
    rest = u
    out = S.zero()
    while rest:
        d = rest.degree()
        top = SymElement(S, dict(rest.degree_part(d).terms))
        out = out + top
        rest = rest - symmetrize(top, U)
        if rest and rest.degree() >= d:
            raise AssertionError("symmetrization inverse failed to reduce degree")
    return out


def _killing_laplacian(s: SymElement, lie: LieAlgebra) -> SymElement:
    """sum_ij K_ij d_i d_j s with K the Killing form."""
    K = lie.killing
    out = s.algebra.zero()
    for (i, j), k in K.entries.items():
        out = out + s.partial(i).partial(j).scale(k)
    return out


def duflo(s: SymElement, U: UEnvelope) -> PBWElement:
    """D(s) = Sym(s + (1/48) sum_ij K_ij d_i d_j s), exact for degree <= 3."""
    if s.degree() > DUFLO_WINDOW:
        raise UnsupportedDegree(
            f"degree {s.degree()} is outside the supported Duflo window (<= {DUFLO_WINDOW})")
    corr = _killing_laplacian(s, U.lie).scale(mpq(1, 48))
    return symmetrize(s + corr, U)


def duflo_inverse(u: PBWElement, S: SymAlgebra) -> SymElement:
    if u.degree() > DUFLO_WINDOW:
        raise UnsupportedDegree(
            f"degree {u.degree()} is outside the supported Duflo window (<= {DUFLO_WINDOW})")
    t = unsymmetrize(u, S)
    # (1 + L/48)^{-1} = 1 - L/48 in this window, since L^2 lowers degree by 4
    return t - _killing_laplacian(t, u.algebra.lie).scale(mpq(1, 48))


# ---------------------------------------------------------------------------
# Casimir and invariants


def casimir(U: UEnvelope, basis: Sequence[dict], dual: Sequence[dict]) -> PBWElement:
    """sum_k u_{a_k} u_{b_k}."""
    out = U.zero()
    for a, b in zip(basis, dual):
        out = out + U.vec(a) * U.vec(b)
    return out


def casimir_sym(S: SymAlgebra, basis: Sequence[dict], dual: Sequence[dict]) -> SymElement:
    out = S.zero()
    for a, b in zip(basis, dual):
        out = out + S.vec(a) * S.vec(b)
    return out


def invariants_basis(U: UEnvelope, acting: Sequence[dict], cap: int | None = None) -> list[PBWElement]:
    """Basis of the degree <= cap slice of U^acting (kernel of stacked ad matrices)."""
    cap = U.cap if cap is None else cap
    monos = U.monomials(cap)
    blocks = []
    for a in acting:
        m, _ = U.ad_matrix(a, cap)
        blocks.append(m)
    if not blocks:
        return [PBWElement(U, {m: ONE}) for m in monos]
    stacked = SparseMatrix.from_rows([r for b in blocks for r in b.rows()], len(monos))
    ker = kernel(stacked)
    return [PBWElement(U, {monos[k]: c for k, c in v.items()}) for v in ker.basis]


def sym_invariants_basis(S: SymAlgebra, acting: Sequence[dict], cap: int) -> list[SymElement]:
    monos = S.monomials(cap)
    idx = {m: k for k, m in enumerate(monos)}
    rows: list[dict] = []
    for a in acting:
        cols = [{idx[t]: c for t, c in S.adjoint(a, SymElement(S, {m: ONE})).terms.items()} for m in monos]
        rows.extend(SparseMatrix.from_columns(cols, len(monos)).rows())
    if not acting:
        return [SymElement(S, {m: ONE}) for m in monos]
    ker = kernel(SparseMatrix.from_rows(rows, len(monos)))
    return [SymElement(S, {monos[k]: c for k, c in v.items()}) for v in ker.basis]


def pbw_coordinates(u: PBWElement, monos: Sequence[tuple]) -> dict:
    idx = {m: k for k, m in enumerate(monos)}
    return {idx[m]: c for m, c in u.terms.items()}


# ---------------------------------------------------------------------------
# independent oracle: free-algebra rewriting


def rewrite_word(lie: LieAlgebra, word: Sequence[int]) -> dict:
    """Normal-order a word by repeatedly swapping the first descent.

    Deliberately naive (no memo, no recursion on monomials) so it can serve
    as an oracle for :meth:`UEnvelope.mono_gen`.
    """
    n = lie.dim
    pending = {tuple(word): ONE}
    done: dict = {}
    while pending:
        w, c = pending.popitem()
        pos = next((k for k in range(len(w) - 1) if w[k] > w[k + 1]), None)
        if pos is None:
            m = [0] * n
            for i in w:
                m[i] += 1
            vec_iadd(done, {tuple(m): c})
            continue
        a, b = w[pos], w[pos + 1]
        swapped = w[:pos] + (b, a) + w[pos + 2:]
        vec_iadd(pending, {swapped: c})
        for k, v in lie.bracket_basis(a, b).items():
            vec_iadd(pending, {w[:pos] + (k,) + w[pos + 2:]: c * v})
    return done
