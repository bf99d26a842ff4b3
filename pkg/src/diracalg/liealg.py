"""Lie algebras from structure constants, invariant forms and quadratic pairs.

Elements of a Lie algebra are coordinate dicts ``{basis index: scalar}``.
A :class:`QuadraticPair` bundles a Lie algebra g, a nondegenerate invariant
symmetric form, a subalgebra r spanned by a subset of the basis, and its
orthogonal complement p, together with dual bases for g, r and p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

from .exactlin import (
    ONE, ZERO, SparseMatrix, Subspace, determinant, inverse, kernel, mpq,
    vec_iadd,
)


class PairError(ValueError):
    """Base class for invalid Lie algebra / pair data."""


class StructureError(PairError):
    pass


class JacobiViolation(PairError):
    def __init__(self, triple, labels):
        self.triple = triple
        names = tuple(labels[i] for i in triple)
        super().__init__(f"Jacobi identity fails on {names}")


class NotInvariant(PairError):
    def __init__(self, triple, labels):
        self.triple = triple
        names = tuple(labels[i] for i in triple)
        super().__init__(f"form is not ad-invariant on {names}")


class DegenerateForm(PairError):
    pass


class DegenerateRestriction(PairError):
    pass


class NotSubalgebra(PairError):
    pass


def _as_vec(x) -> dict:
    return {k: v for k, v in x.items() if v}


class LieAlgebra:
    """Finite-dimensional Lie algebra with ``[x_i, x_j] = sum_k c[i,j][k] x_k``.

    ``brackets`` maps pairs ``(i, j)`` to coordinate dicts; missing pairs are
    zero and the antisymmetric partner is filled in.  A pair supplied in both
    orders must be antisymmetric.
    """

    def __init__(self, labels: Sequence[str], brackets: dict | None = None,
                 validate: bool = True):
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise StructureError("basis labels must be distinct")
        n = len(self.labels)
        table: dict[tuple[int, int], dict] = {}
        for (i, j), v in (brackets or {}).items():
            if not (0 <= i < n and 0 <= j < n):
                raise StructureError(f"bracket index {(i, j)} out of range")
            v = {k: mpq(c) if isinstance(c, int) else c for k, c in v.items() if c}
            for k in v:
                if not 0 <= k < n:
                    raise StructureError(f"structure constant index {k} out of range")
            if i == j:
                if v:
                    raise StructureError(f"[{self.labels[i]}, {self.labels[i]}] must vanish")
                continue
            neg = {k: -c for k, c in v.items()}
            if (i, j) in table and table[(i, j)] != v:
                raise StructureError(
                    f"antisymmetry fails for ({self.labels[i]}, {self.labels[j]})")
            table[(i, j)] = v
            table[(j, i)] = neg
        self._table = table
        if validate:
            self.check_jacobi()

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def bracket_basis(self, i: int, j: int) -> dict:
        return self._table.get((i, j), {})

    def bracket(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                v = self._table.get((i, j))
                if v:
                    vec_iadd(out, v, a * b)
        return out

    def check_jacobi(self) -> None:
        n = self.dim
        for i, j, k in combinations(range(n), 3):
            ei, ej, ek = {i: ONE}, {j: ONE}, {k: ONE}
            total = self.bracket(ei, self.bracket(ej, ek))
            vec_iadd(total, self.bracket(ej, self.bracket(ek, ei)))
            vec_iadd(total, self.bracket(ek, self.bracket(ei, ej)))
            if total:
                raise JacobiViolation((i, j, k), self.labels)

    def ad(self, x: dict) -> SparseMatrix:
        """Matrix of ``ad x`` (columns are images of basis vectors)."""
        cols = [self.bracket(x, {j: ONE}) for j in range(self.dim)]
        return SparseMatrix.from_columns(cols, self.dim)

    adjoint_matrix = ad

    @cached_property
    def killing(self) -> SparseMatrix:
        ads = [self.ad({i: ONE}) for i in range(self.dim)]
        ent = {}
        for i in range(self.dim):
            for j in range(i, self.dim):
                prod = ads[i] @ ads[j]
                t = sum((prod[k, k] for k in range(self.dim)), ZERO)
                if t:
                    ent[(i, j)] = t
                    ent[(j, i)] = t
        return SparseMatrix(self.dim, self.dim, ent)

    def is_abelian(self) -> bool:
        return not any(self._table.values())

    def subalgebra(self, vectors: Sequence[dict], labels: Sequence[str]) -> "LieAlgebra":
        """Lie algebra structure on span(vectors); raises NotSubalgebra if not closed."""
        space = Subspace(self.dim, vectors)
        if space.dim != len(vectors):
            raise NotSubalgebra("spanning vectors are dependent")
        # coordinates relative to `vectors`
        basis_m = SparseMatrix.from_columns(list(vectors), self.dim)
        from .exactlin import solve, NoSolution
        brackets = {}
        for i, j in combinations(range(len(vectors)), 2):
            v = self.bracket(vectors[i], vectors[j])
            if not v:
                continue
            try:
                coords = solve(basis_m, v)
            except NoSolution:
                raise NotSubalgebra(f"[{labels[i]}, {labels[j]}] leaves the subspace") from None
            brackets[(i, j)] = coords
        return LieAlgebra(labels, brackets, validate=False)

    def __repr__(self):
        return f"LieAlgebra({', '.join(self.labels)})"


class InvariantForm:
    """Symmetric bilinear form given by its Gram matrix in the basis of g."""

    def __init__(self, gram: SparseMatrix):
        if gram.nrows != gram.ncols:
            raise DegenerateForm("Gram matrix must be square")
        if gram != gram.T:
            raise PairError("Gram matrix is not symmetric")
        self.gram = gram

    @classmethod
    def from_dense(cls, rows) -> "InvariantForm":
        return cls(SparseMatrix.from_dense(rows))

    def __call__(self, x: dict, y: dict):
        s = ZERO
        g = self.gram
        for i, a in x.items():
            row = g._rows.get(i)
            if not row:
                continue
            for j, b in y.items():
                c = row.get(j)
                if c:
                    s += a * c * b
        return s

    pair = __call__

    def check_nondegenerate(self) -> None:
        if not determinant(self.gram):
            raise DegenerateForm("form is degenerate")

    def check_invariant(self, lie: LieAlgebra) -> None:
        n = lie.dim
        if self.gram.nrows != n:
            raise PairError(f"Gram matrix is {self.gram.nrows}x{self.gram.nrows}, algebra has dimension {n}")
        for i in range(n):
            for j in range(n):
                bij = lie.bracket_basis(i, j)
                for k in range(j, n):
                    # <[x_i, x_j], x_k> + <x_j, [x_i, x_k]>
                    v = self(bij, {k: ONE}) + self({j: ONE}, lie.bracket_basis(i, k))
                    if v:
                        raise NotInvariant((i, j, k), lie.labels)


def dual_basis(form: InvariantForm, vectors: Sequence[dict]) -> list[dict]:
    """Vectors w_k in span(vectors) with <vectors[k], w_l> = delta_kl."""
    m = len(vectors)
    gram = SparseMatrix(m, m, {(k, l): form(vectors[k], vectors[l])
                               for k in range(m) for l in range(m)})
    from .exactlin import NoSolution
    try:
        ginv = inverse(gram)
    except NoSolution:
        raise DegenerateRestriction("form restricted to the subspace is degenerate") from None
    out = []
    for k in range(m):
        w: dict = {}
        for l in range(m):
            c = ginv[l, k]
            if c:
                vec_iadd(w, vectors[l], c)
        out.append(w)
    return out


def gram_of(form: InvariantForm, vectors: Sequence[dict]) -> SparseMatrix:
    m = len(vectors)
    return SparseMatrix(m, m, {(k, l): form(vectors[k], vectors[l])
                               for k in range(m) for l in range(m)})


@dataclass(frozen=True, eq=False)
class QuadraticPair:
    """A validated pair (g, r) with g = r + p, p = r-perp.

    Dual bases: ``g_basis[k]``/``g_dual[k]`` satisfy <a_k, b_l> = delta;
    likewise ``r_basis``/``r_dual`` and ``p_basis``/``p_dual``.  All vectors
    are coordinate dicts in the basis of g.
    """

    g: LieAlgebra
    form: InvariantForm
    r_indices: tuple[int, ...]
    p_basis: tuple[dict, ...]
    name: str = "pair"
    p_labels: tuple[str, ...] = field(default=())

    @cached_property
    def g_basis(self) -> list[dict]:
        return [{i: ONE} for i in range(self.g.dim)]

    @cached_property
    def g_dual(self) -> list[dict]:
        return dual_basis(self.form, self.g_basis)

    @cached_property
    def r_basis(self) -> list[dict]:
        return [{i: ONE} for i in self.r_indices]

    @cached_property
    def r_dual(self) -> list[dict]:
        return dual_basis(self.form, self.r_basis)

    @cached_property
    def p_dual(self) -> list[dict]:
        return dual_basis(self.form, list(self.p_basis))

    @cached_property
    def r_labels(self) -> tuple[str, ...]:
        return tuple(self.g.labels[i] for i in self.r_indices)

    @cached_property
    def r_algebra(self) -> LieAlgebra:
        return self.g.subalgebra(self.r_basis, self.r_labels)

    @property
    def dim_r(self) -> int:
        return len(self.r_indices)

    @property
    def dim_p(self) -> int:
        return len(self.p_basis)

    def basis_of(self, which: str) -> tuple[list[dict], list[dict]]:
        """(basis, dual basis) for ``which`` in {"g", "r", "p"}."""
        if which == "g":
            return self.g_basis, self.g_dual
        if which == "r":
            return self.r_basis, self.r_dual
        if which == "p":
            return list(self.p_basis), self.p_dual
        raise ValueError(f"unknown subspace {which!r}")

    def labels_of(self, which: str) -> tuple[str, ...]:
        return {"g": self.g.labels, "r": self.r_labels, "p": self.p_labels}[which]

    def coords(self, which: str, x: dict) -> dict:
        """Coordinates of the orthogonal projection of x onto ``which``."""
        basis, dual = self.basis_of(which)
        out = {}
        for k, w in enumerate(dual):
            c = self.form(x, w)
            if c:
                out[k] = c
        return out

    def embed(self, which: str, coords: dict) -> dict:
        basis, _ = self.basis_of(which)
        out: dict = {}
        for k, c in coords.items():
            vec_iadd(out, basis[k], c)
        return out

    def gram(self, which: str) -> SparseMatrix:
        return gram_of(self.form, self.basis_of(which)[0])

    def ad_r_on_p(self, m: int) -> SparseMatrix:
        """Matrix of ad(r_m) restricted to p, in p-coordinates."""
        x = self.r_basis[m]
        cols = [self.coords("p", self.g.bracket(x, y)) for y in self.p_basis]
        return SparseMatrix.from_columns(cols, self.dim_p)

    def is_symmetric(self) -> bool:
        """True when [p, p] lies in r."""
        return all(not self.coords("p", self.g.bracket(x, y))
                   for x, y in combinations(self.p_basis, 2))


def _p_labels(g: LieAlgebra, p_basis: Sequence[dict]) -> tuple[str, ...]:
    out = []
    for v in p_basis:
        if len(v) == 1 and next(iter(v.values())) == 1:
            out.append(g.labels[next(iter(v))])
        else:
            out.append("(" + "+".join(
                (g.labels[k] if c == 1 else f"{c}*{g.labels[k]}") for k, c in sorted(v.items())
            ) + ")")
    return tuple(out)


def validate_pair(g: LieAlgebra, form: InvariantForm, r_indices: Sequence[int],
                  name: str = "pair") -> QuadraticPair:
    """Check every structural requirement and compute p and the dual bases."""
    r_indices = tuple(r_indices)
    if len(set(r_indices)) != len(r_indices) or any(not 0 <= i < g.dim for i in r_indices):
        raise PairError(f"invalid r index list {list(r_indices)}")
    g.check_jacobi()
    if form.gram.nrows != g.dim:
        raise PairError(f"Gram matrix is {form.gram.nrows}x{form.gram.nrows}, algebra has dimension {g.dim}")
    form.check_nondegenerate()
    form.check_invariant(g)
    r_basis = [{i: ONE} for i in r_indices]
    for a, b in combinations(r_indices, 2):
        v = g.bracket_basis(a, b)
        if any(k not in r_indices for k in v):
            raise NotSubalgebra(f"[{g.labels[a]}, {g.labels[b]}] is not in r")
    if r_basis:
        rg = gram_of(form, r_basis)
        if not determinant(rg):
            raise DegenerateRestriction(
                "form restricted to r = span(" + ", ".join(g.labels[i] for i in r_indices) + ") is degenerate")
    # p = r-perp: kernel of the rows <x_i, .> for i in r
    rows = SparseMatrix.from_rows([form.gram.row(i) for i in r_indices], g.dim)
    p_space = kernel(rows)
    p_basis = tuple(_prefer_basis_vectors(p_space, g.dim))
    pair = QuadraticPair(g, form, r_indices, p_basis, name=name,
                         p_labels=_p_labels(g, p_basis))
    for x in r_basis:
        for y in p_basis:
            v = g.bracket(x, y)
            if not p_space.contains(v):
                raise PairError("p is not stable under ad r")
    # sanity on the dual bases
    for which in ("g", "r", "p"):
        basis, dual = pair.basis_of(which)
        for k, a in enumerate(basis):
            for l, b in enumerate(dual):
                if form(a, b) != (ONE if k == l else ZERO):
                    raise PairError(f"dual basis construction failed on {which}")
    return pair


def _prefer_basis_vectors(space: Subspace, n: int) -> list[dict]:
    """Basis of ``space`` using standard basis vectors where possible."""
    chosen: list[dict] = []
    for i in range(n):
        e = {i: ONE}
        if space.contains(e):
            if Subspace(n, chosen + [e]).dim > len(chosen):
                chosen.append(e)
    if len(chosen) < space.dim:
        for v in space.basis:
            if Subspace(n, chosen + [v]).dim > len(chosen):
                chosen.append(v)
    return chosen
