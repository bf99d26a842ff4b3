"""Finite-dimensional modules, spinors, the Dirac matrix on V (x) S and
Dirac cohomology with its r-action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .cliff import CliffordSpace, ExteriorElement, mask_indices, pair_space, popcount
from .exactlin import (
    ONE, ZERO, Field, FieldExtensionRequired, NoSolution, QQ, SparseMatrix, Subspace,
    _squarefree_part, kernel, mpq, solve, vec_iadd,
)
from .liealg import LieAlgebra, QuadraticPair
from .mixed import MixedElement
from .uenv import PBWElement, mono_word


class ModuleError(ValueError):
    pass


class NoCentralCharacter(ValueError):
    """rho(z) is not a scalar matrix."""


class GModule:
    """Representation of a Lie algebra by exact matrices, one per basis vector."""

    def __init__(self, g: LieAlgebra, mats: Sequence[SparseMatrix], name: str = "V",
                 highest_weight=None, validate: bool = True):
        if len(mats) != g.dim:
            raise ModuleError(f"module {name}: {len(mats)} matrices for a {g.dim}-dimensional algebra")
        dims = {m.shape for m in mats}
        if len(dims) > 1 or any(a != b for a, b in dims):
            raise ModuleError(f"module {name}: matrices must be square of one size")
        self.g = g
        self.matrices = list(mats)
        self.dim = mats[0].nrows if mats else 0
        self.name = name
        self.highest_weight = highest_weight
        if validate:
            self.check()

    def check(self) -> None:
        g, M = self.g, self.matrices
        for a, b in combinations(range(g.dim), 2):
            lhs = self.act(g.bracket_basis(a, b))
            rhs = M[a] @ M[b] - M[b] @ M[a]
            if lhs != rhs:
                raise ModuleError(
                    f"module {self.name}: rho([{g.labels[a]}, {g.labels[b]}]) != [rho({g.labels[a]}), rho({g.labels[b]})]")

    def act(self, x: dict) -> SparseMatrix:
        out = SparseMatrix.zero(self.dim, self.dim)
        for i, c in x.items():
            out = out + self.matrices[i].scale(c)
        return out

    def rho(self, u: PBWElement) -> SparseMatrix:
        """Matrix of an element of U(g)."""
        out = SparseMatrix.zero(self.dim, self.dim)
        cache: dict = {}
        for mono, c in u.terms.items():
            m = cache.get(mono)
            if m is None:
                m = SparseMatrix.identity(self.dim)
                for i in mono_word(mono):
                    m = m @ self.matrices[i]
                cache[mono] = m
            out = out + m.scale(c)
        return out

    def __repr__(self):
        return f"GModule({self.name}, dim={self.dim})"


def direct_sum(a: GModule, b: GModule, name: str | None = None) -> GModule:
    n, m = a.dim, b.dim
    mats = []
    for x, y in zip(a.matrices, b.matrices):
        ent = dict(x.entries)
        for (i, j), c in y.entries.items():
            ent[(n + i, n + j)] = c
        mats.append(SparseMatrix(n + m, n + m, ent))
    return GModule(a.g, mats, name=name or f"{a.name}+{b.name}")


# ---------------------------------------------------------------------------
# spinors


@dataclass
class SpinorModule:
    """Matrices sigma(c_i) for the basis vectors of a quadratic space."""

    space: CliffordSpace
    gens: list
    field: Field
    dim: int
    chirality_sign: int = 1

    def sigma(self, w: ExteriorElement) -> SparseMatrix:
        """Clifford action of an exterior element (symbol-map coordinates)."""
        out = SparseMatrix.zero(self.dim, self.dim)
        for m, c in w.terms.items():
            out = out + self._mono(m).scale(c)
        return out

    def _mono(self, m: int) -> SparseMatrix:
        cache = self.__dict__.setdefault("_cache", {})
        hit = cache.get(m)
        if hit is not None:
            return hit
        if m == 0:
            hit = SparseMatrix.identity(self.dim)
        else:
            # sigma(e_i ^ r) = sigma(e_i) sigma(r) - 1/2 sigma(i_{e_i} r)
            i = mask_indices(m)[0]
            rest = m & ~(1 << i)
            hit = self.gens[i] @ self._mono(rest)
            for k, c in self.space._contract_mono({i: ONE}, rest).items():
                hit = hit - self._mono(k).scale(c / 2)
        cache[m] = hit
        return hit

    def check_relations(self) -> bool:
        n = len(self.gens)
        G = self.space.gram
        for a in range(n):
            for b in range(a, n):
                anti = self.gens[a] @ self.gens[b] + self.gens[b] @ self.gens[a]
                if anti != SparseMatrix.identity(self.dim, G[a, b]):
                    return False
        return True

    def image_dimension(self) -> int:
        """Dimension of the span of sigma(Lambda), i.e. of the represented Clifford algebra."""
        vecs = []
        for m in self.space.basis_masks():
            mat = self._mono(m)
            vecs.append({i * self.dim + j: x for (i, j), x in mat.entries.items()})
        return Subspace(self.dim * self.dim, vecs).dim


def _diagonalize(gram: SparseMatrix) -> tuple[list[dict], list]:
    """Orthogonal basis (as coordinate vectors) and the diagonal values, over Q."""
    n = gram.nrows

    def form(u, v):
        s = ZERO
        for i, a in u.items():
            for j, b in v.items():
                g = gram[i, j]
                if g:
                    s += a * b * g
        return s

    rest = [{i: ONE} for i in range(n)]
    basis, values = [], []
    while rest:
        pick = next((k for k, v in enumerate(rest) if form(v, v)), None)
        if pick is None:
            pair = next(((a, b) for a, b in combinations(range(len(rest)), 2)
                         if form(rest[a], rest[b])), None)
            if pair is None:
                raise ValueError("degenerate form")
            a, b = pair
            v = dict(rest[a])
            vec_iadd(v, rest[b])
            rest[a] = v
            pick = a
        v = rest.pop(pick)
        q = form(v, v)
        new = []
        for w in rest:
            c = form(w, v) / q
            w = dict(w)
            vec_iadd(w, v, -c)
            new.append(w)
        rest = new
        basis.append(v)
        values.append(q)
    return basis, values


def _square_class(x) -> int:
    num, den = int(mpq(x).numerator), int(mpq(x).denominator)
    return _squarefree_part(num * den)[0]


def _plan(values: list) -> tuple[list[tuple[int, int]], int | None, set]:
    """Pair up diagonal entries to minimise the square roots needed.

    Returns (pairs, leftover, classes) where classes are the squarefree
    radicands (other than 1) that the normalisation will need.
    """
    idx = list(range(len(values)))
    best = None

    def need(pairs, left):
        cls = {_square_class(-values[a] / values[b]) for a, b in pairs}
        if left is not None:
            cls.add(_square_class(values[left] / 2))
        cls.discard(1)
        return cls

    def matchings(items):
        if not items:
            yield []
            return
        a = items[0]
        for k in range(1, len(items)):
            b = items[k]
            for rest in matchings(items[1:k] + items[k + 1:]):
                yield [(a, b)] + rest

    lefts = [None] if len(idx) % 2 == 0 else idx
    budget = 2000
    for left in lefts:
        items = [i for i in idx if i != left]
        for pairs in matchings(items):
            cls = need(pairs, left)
            if best is None or len(cls) < len(best[2]):
                best = (pairs, left, cls)
            budget -= 1
            if not cls or budget <= 0:
                break
        if (best and not best[2]) or budget <= 0:
            break
    return best


def spinor_from_gram(gram: SparseMatrix, field: Field | str | None = QQ,
                     labels: Sequence[str] | None = None, chirality_sign: int = 1) -> SpinorModule:
    """Fock-space spinors for Cl(W, gram).

    The form is diagonalised over Q, diagonal entries are paired into
    hyperbolic planes, and an odd leftover line acts through the chirality
    operator.  ``field="auto"`` adjoins the one square root needed, if any.
    """
    space = CliffordSpace(gram, labels)
    n = gram.nrows
    if n == 0:
        return SpinorModule(space, [], field if isinstance(field, Field) else QQ, 1, chirality_sign)
    basis, values = _diagonalize(gram)
    pairs, left, classes = _plan(values)
    if field == "auto" or field is None:
        if len(classes) > 1:
            c = sorted(classes)
            raise FieldExtensionRequired(mpq(c[1]), c[1])
        field = Field(classes.pop()) if classes else QQ
    elif isinstance(field, str):
        field = Field.parse(field)

    def form(u, v):
        s = ZERO
        for i, a in u.items():
            for j, b in v.items():
                g = gram[i, j]
                if g:
                    s = s + a * b * g
        return s

    hyper = []  # (e, f) with <e,f> = 1, isotropic
    for a, b in pairs:
        v1, v2, a1, a2 = basis[a], basis[b], values[a], values[b]
        t = field.sqrt(-a1 / a2)
        e = dict(v1)
        vec_iadd(e, v2, t)
        f = {k: x / (2 * a1) for k, x in v1.items()}
        vec_iadd(f, v2, -t / (2 * a1))
        hyper.append((e, f))
    k = len(hyper)
    dim = 1 << k
    create, annih = [], []
    for i in range(k):
        c_ent, a_ent = {}, {}
        for s in range(dim):
            sign = -ONE if popcount(s & ((1 << i) - 1)) % 2 else ONE
            if s >> i & 1:
                a_ent[(s & ~(1 << i), s)] = sign
            else:
                c_ent[(s | (1 << i), s)] = sign
        create.append(SparseMatrix(dim, dim, c_ent))
        annih.append(SparseMatrix(dim, dim, a_ent))
    odd = None
    if left is not None:
        u = basis[left]
        s = field.sqrt(values[left] / 2) * chirality_sign
        chir = SparseMatrix(dim, dim, {(t, t): (-ONE if popcount(t) % 2 else ONE) for t in range(dim)})
        odd = (u, values[left], chir.scale(s))
    gens = []
    for j in range(n):
        v = {j: ONE}
        m = SparseMatrix.zero(dim, dim)
        for i, (e, f) in enumerate(hyper):
            # v = sum <v,f_i> e_i + <v,e_i> f_i + (<v,u>/<u,u>) u
            ce, cf = form(v, f), form(v, e)
            if ce:
                m = m + create[i].scale(ce)
            if cf:
                m = m + annih[i].scale(cf)
        if odd is not None:
            cu = form(v, odd[0]) / odd[1]
            if cu:
                m = m + odd[2].scale(cu)
        gens.append(m)
    return SpinorModule(space, gens, field, dim, chirality_sign)


def spinor_module(pair: QuadraticPair, field: Field | str | None = "auto",
                  chirality_sign: int = 1) -> SpinorModule:
    sp = pair_space(pair, "p")
    return spinor_from_gram(sp.gram, field, sp.labels, chirality_sign)


# ---------------------------------------------------------------------------
# Dirac matrix and cohomology


def mixed_matrix(x: MixedElement, V: GModule, S: SpinorModule) -> SparseMatrix:
    """Action of an element of U(g) (x) Cl(p) on V (x) S."""
    out = SparseMatrix.zero(V.dim * S.dim, V.dim * S.dim)
    U = x.algebra.U
    for (mono, k), c in x.terms.items():
        out = out + V.rho(PBWElement(U, {mono: ONE})).kron(S._mono(k)).scale(c)
    return out


class DiracMatrix:
    def __init__(self, pair: QuadraticPair, V: GModule, S: SpinorModule):
        from .dirac import DiracAlgebra

        self.pair, self.V, self.S = pair, V, S
        self.alg = DiracAlgebra(pair, 2)
        n = V.dim * S.dim
        self.size = n
        sp = S.space
        D = SparseMatrix.zero(n, n)
        for v, q in zip(pair.p_basis, sp.dual_basis()):
            D = D + V.act(v).kron(S.sigma(sp.vector(q)))
        D = D - SparseMatrix.identity(V.dim).kron(S.sigma(self.alg.gamma_p))
        self.matrix = D
        self.kernel = kernel(D)
        self.image = Subspace(n, D.columns())

    def xi_matrix(self, m: int) -> SparseMatrix:
        """x acts as rho(x) (x) 1 + 1 (x) sigma(alpha(x))."""
        V, S = self.V, self.S
        return (V.act(self.pair.r_basis[m]).kron(SparseMatrix.identity(S.dim))
                + SparseMatrix.identity(V.dim).kron(S.sigma(self.alg.alpha({m: ONE}))))

    def commutes_with_xi(self) -> bool:
        return all((self.matrix @ X) == (X @ self.matrix)
                   for X in (self.xi_matrix(m) for m in range(self.pair.dim_r)))

    def element_matrix(self, x: MixedElement) -> SparseMatrix:
        return mixed_matrix(x, self.V, self.S)


@dataclass
class DiracCohomology:
    dim: int
    basis: list
    kernel: Subspace
    boundary: Subspace
    r_action: list  # matrices on the quotient basis, one per r-basis vector
    weights: list | None = None


def _quotient_action(M: SparseMatrix, basis: list[dict], sub: Subspace) -> SparseMatrix:
    """Matrix of M on span(basis) modulo sub, assuming span(basis) + sub is M-stable."""
    k = sub.dim
    A = SparseMatrix.from_columns(sub.basis + list(basis), sub.ambient)
    cols = []
    for v in basis:
        try:
            sol = solve(A, M.apply(v))
        except NoSolution:
            raise ValueError("subspace is not stable under the operator") from None
        cols.append({i - k: c for i, c in sol.items() if i >= k})
    return SparseMatrix.from_columns(cols, len(basis))


def dirac_cohomology(D: DiracMatrix) -> DiracCohomology:
    K = D.kernel
    B = K & D.image
    basis = K.quotient_basis(B)
    action = [_quotient_action(D.xi_matrix(m), basis, B) for m in range(D.pair.dim_r)]
    weights = _weights(D, K, B)
    return DiracCohomology(len(basis), basis, K, B, action, weights)


def _weights(D: DiracMatrix, K: Subspace, B: Subspace) -> list | None:
    """Multiset of r-weights on H_D when the xi-matrices are diagonal in the
    product basis (Cartan-type r); None otherwise."""
    if D.pair.dim_r == 0:
        return [()] * (K.dim - B.dim)
    X = [D.xi_matrix(m) for m in range(D.pair.dim_r)]
    for M in X:
        if any(i != j for (i, j) in M.entries):
            return None
    n = D.size
    blocks: dict = {}
    for t in range(n):
        blocks.setdefault(tuple(M[t, t] for M in X), []).append(t)
    out = []
    for w, idx in sorted(blocks.items(), key=lambda kv: tuple(str(x) for x in kv[0])):
        coord = Subspace(n, [{t: ONE} for t in idx])
        mult = (K & coord).dim - (B & coord).dim
        out.extend([w] * mult)
    return sorted(out, key=lambda w: tuple(mpq(x) if not hasattr(x, "im") else x.re for x in w))


@dataclass
class CentralCharacterReport:
    chi: object
    eta: PBWElement
    dim_H: int
    holds: bool
    action: SparseMatrix | None = None
    notes: dict = field(default_factory=dict)


def verify_central_character(D: DiracMatrix, z: PBWElement) -> CentralCharacterReport:
    """chi(z) on H_D versus the action of xi(eta_R(z))."""
    V = D.V
    rz = V.rho(z)
    chi = rz[0, 0] if V.dim else ZERO
    if rz != SparseMatrix.identity(V.dim, chi):
        raise NoCentralCharacter(f"module {V.name}: rho(z) is not a scalar matrix")
    from .dirac import DiracAlgebra

    alg = DiracAlgebra(D.pair, max(z.degree(), 1))
    eta = alg.eta_R(z)
    X = D.element_matrix(alg.xi(eta))
    H = dirac_cohomology(D)
    action = _quotient_action(X, H.basis, H.boundary) if H.dim else SparseMatrix.zero(0, 0)
    holds = action == SparseMatrix.identity(H.dim, chi)
    return CentralCharacterReport(chi, eta, H.dim, holds, action)
