"""Classical and noncommutative Weil algebras, Cartan-model differentials,
basic subspaces and the maps F, F-script between r- and g-level algebras.

Starred objects are transported through the invariant form: S(g*) is stored
as S(g), Lambda(g*) as Lambda(g), and the dual-basis element a*_k becomes
b_k.  Contractions therefore read ``i_a e_j = <a, e_j>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

from .cliff import (
    CliffordSpace, ExteriorElement, cartan_element, format_monomial,
    format_terms, iota, mask_indices, pair_space, popcount, remove_sign, wedge_sign,
)
from .exactlin import (
    ONE, Coordinates, SparseMatrix, Subspace, kernel, mpq, vec_iadd,
)
from .liealg import QuadraticPair
from .mixed import MixedAlgebra, MixedElement
from .uenv import (
    FiltrationOverflow, PBWElement, SymAlgebra, UEnvelope, _add_e, format_mono,
    monomials_upto,
)

HALF = mpq(1, 2)
QUARTER = mpq(1, 4)


# ---------------------------------------------------------------------------
# classical Weil algebra  S(g) (x) Lambda(g)


class WeilAlgebra:
    """W(g) = S(g*) (x) Lambda(g*) with the Weil differential.

    ``cap`` bounds the polynomial degree.  The grading puts S^k in degree 2k.
    """

    def __init__(self, lie, space: CliffordSpace, cap: int, name: str = "W"):
        self.lie = lie
        self.space = space
        self.cap = cap
        self.n = lie.dim
        self.S = SymAlgebra(lie.labels, lie)
        self.name = name
        self._zero = (0,) * self.n
        self._dgen_s: dict = {}

    @classmethod
    def of_pair(cls, pair: QuadraticPair, which: str = "g", cap: int = 3) -> "WeilAlgebra":
        lie = pair.g if which == "g" else pair.r_algebra
        return cls(lie, pair_space(pair, which), cap, name=f"W({which})")

    def element(self, terms: dict) -> "WeilElement":
        return WeilElement(self, terms)

    def zero(self):
        return WeilElement(self, {})

    def one(self):
        return WeilElement(self, {(self._zero, 0): ONE})

    def e(self, coords: dict) -> "WeilElement":
        """1 (x) e_x (odd generator)."""
        return WeilElement(self, {(self._zero, 1 << i): c for i, c in coords.items() if c})

    def s(self, coords: dict) -> "WeilElement":
        """s_x (x) 1 (even generator of degree 2)."""
        return WeilElement(self, {(_add_e(self._zero, i), 0): c for i, c in coords.items() if c})

    def ext(self, w: ExteriorElement) -> "WeilElement":
        return WeilElement(self, {(self._zero, k): c for k, c in w.terms.items()})

    def basis(self, cap: int | None = None) -> list[tuple]:
        cap = self.cap if cap is None else cap
        return [(m, k) for m in monomials_upto(self.n, cap) for k in self.space.basis_masks()]

    def mul(self, x: "WeilElement", y: "WeilElement") -> "WeilElement":
        out: dict = {}
        for (m1, k1), a in x.terms.items():
            for (m2, k2), b in y.terms.items():
                s = wedge_sign(k1, k2)
                if not s:
                    continue
                m = tuple(i + j for i, j in zip(m1, m2))
                if sum(m) > self.cap:
                    raise FiltrationOverflow(f"polynomial degree {sum(m)} exceeds cap {self.cap}")
                vec_iadd(out, {(m, k1 | k2): a * b * s})
        return WeilElement(self, out)

    # -- differential ------------------------------------------------------

    def _kappa(self, k: int) -> dict:
        """Derivation Lambda -> S^1 (x) Lambda sending e_i to s_i."""
        out: dict = {}
        for i in mask_indices(k):
            out[(_add_e(self._zero, i), k & ~(1 << i))] = mpq(remove_sign(k, i))
        return out

    def _d_ext(self, k: int) -> dict:
        out = {(self._zero, kk): c for kk, c in self.space.koszul_mono(k).items()}
        vec_iadd(out, self._kappa(k))
        return out

    def _d_sgen(self, f: int) -> dict:
        """d(s_f) = -kappa(d_wedge e_f)."""
        hit = self._dgen_s.get(f)
        if hit is None:
            hit = {}
            for k, c in self.space.koszul_mono(1 << f).items():
                vec_iadd(hit, self._kappa(k), -c)
            self._dgen_s[f] = hit
        return hit

    def d(self, x: "WeilElement") -> "WeilElement":
        if x.terms and x.poly_degree() + 1 > self.cap:
            raise FiltrationOverflow(f"d raises polynomial degree past cap {self.cap}")
        out: dict = {}
        for (m, k), c in x.terms.items():
            # d(s^m) (x) w: s^m is even, d(s_f) has exterior degree 1
            for f, e in enumerate(m):
                if not e:
                    continue
                rest = _add_e(m, f, -1)
                for (m2, k2), c2 in self._d_sgen(f).items():
                    s = wedge_sign(k2, k)
                    if s:
                        mm = tuple(a + b for a, b in zip(rest, m2))
                        vec_iadd(out, {(mm, k2 | k): c * e * c2 * s})
            for (m2, k2), c2 in self._d_ext(k).items():
                mm = tuple(a + b for a, b in zip(m, m2))
                vec_iadd(out, {(mm, k2): c * c2})
        return WeilElement(self, out)

    def i(self, a: dict, x: "WeilElement") -> "WeilElement":
        out: dict = {}
        for (m, k), c in x.terms.items():
            for k2, c2 in self.space._contract_mono(a, k).items():
                vec_iadd(out, {(m, k2): c * c2})
        return WeilElement(self, out)

    def L(self, a: dict, x: "WeilElement") -> "WeilElement":
        ad = self.lie.ad(a)
        out: dict = {}
        for (m, k), c in x.terms.items():
            s_el = self.S.element({m: ONE})
            for m2, c2 in self.S.adjoint(a, s_el).terms.items():
                vec_iadd(out, {(m2, k): c * c2})
            w = ExteriorElement(self.space, {k: ONE}).derivation(ad)
            for k2, c2 in w.terms.items():
                vec_iadd(out, {(m, k2): c * c2})
        return WeilElement(self, out)


class WeilElement:
    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: WeilAlgebra, terms: dict):
        self.algebra = algebra
        self.terms = {k: c for k, c in terms.items() if c}

    def poly_degree(self) -> int:
        return max((sum(m) for m, _ in self.terms), default=-1)

    def degrees(self) -> set[int]:
        return {2 * sum(m) + popcount(k) for m, k in self.terms}

    def __add__(self, other):
        t = dict(self.terms)
        vec_iadd(t, other.terms)
        return WeilElement(self.algebra, t)

    def __sub__(self, other):
        t = dict(self.terms)
        vec_iadd(t, other.terms, -ONE)
        return WeilElement(self.algebra, t)

    def __neg__(self):
        return self.scale(-ONE)

    def scale(self, c):
        return WeilElement(self.algebra, {k: c * x for k, x in self.terms.items()} if c else {})

    def __mul__(self, other):
        if isinstance(other, WeilElement):
            return self.algebra.mul(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other):
        if isinstance(other, WeilElement):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __str__(self):
        A = self.algebra
        pieces = []
        for (m, k) in sorted(self.terms, key=lambda t: (2 * sum(t[0]) + popcount(t[1]), t)):
            parts = []
            if any(m):
                parts.append(format_mono(["s_" + l for l in A.lie.labels], m))
            if k:
                parts.append(format_monomial(["e_" + l for l in A.lie.labels], k))
            pieces.append(("*".join(parts) if parts else "1", self.terms[(m, k)]))
        return format_terms(pieces)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# noncommutative Weil algebra  U(g) (x) Cl(g)


class NCWeil:
    """The noncommutative Weil algebra of a quadratic Lie algebra, with
    contraction, Lie derivative, the element D and d = ad D."""

    def __init__(self, pair: QuadraticPair, cap: int, which: str = "g",
                 space: CliffordSpace | None = None):
        self.pair = pair
        self.which = which
        self.lie = pair.g if which == "g" else pair.r_algebra
        self.space = space or pair_space(pair, which)
        self.U = UEnvelope(self.lie, cap, name=f"U({which})")
        self.A = MixedAlgebra(self.U, self.space, name=f"W_nc({which})")
        self.cap = cap
        self.basis_vectors = [{i: ONE} for i in range(self.lie.dim)]
        self.dual_vectors = self.space.dual_basis()
        self.gamma = self._gamma()
        self._D = None

    def _gamma(self) -> ExteriorElement:
        if self.which == "g":
            return cartan_element(self.pair, "g", self.space)
        # Cartan element of r computed inside r
        sp, lie = self.space, self.lie
        dual = self.dual_vectors
        terms = {}
        for i, j, k in combinations(range(lie.dim), 3):
            c = sp.pair(dual[i], lie.bracket(dual[j], dual[k]))
            if c:
                terms[(1 << i) | (1 << j) | (1 << k)] = c
        return ExteriorElement(sp, terms)

    @property
    def D(self) -> MixedElement:
        """sum_k u_{a_k} (x) c_{b_k} - 1 (x) gamma."""
        if self._D is None:
            A = self.A
            out = A.zero()
            for a, b in zip(self.basis_vectors, self.dual_vectors):
                out = out + A.u(a) * A.c(b)
            self._D = out - A.c(self.gamma)
        return self._D

    def d(self, x: MixedElement) -> MixedElement:
        if x.terms and x.u_degree() + 1 > self.cap:
            raise FiltrationOverflow(f"ad D needs U-degree <= {self.cap - 1}, got {x.u_degree()}")
        return self.A.supercommutator(self.D, x)

    def d_explicit(self, x: MixedElement, printed_signs: bool = False) -> MixedElement:
        """sum_k [u_{a_k}, x] (x) c_{b_k}^w + 1/2 (u_{a_k} x + x u_{a_k}) (x) i_{b_k} w
        + x (x) d_wedge w - 1/4 x (x) i_gamma w, applied termwise.

        i_gamma is the contraction extended as an algebra map.  With
        ``printed_signs`` the first two terms and the last one take the
        opposite signs (-, -, +, +1/4); that pattern does not agree with
        ad D under these conventions and is kept for comparison.
        """
        if x.terms and x.u_degree() + 1 > self.cap:
            raise FiltrationOverflow(f"explicit d needs U-degree <= {self.cap - 1}")
        A, U, sp = self.A, self.U, self.space
        s1 = -ONE if printed_signs else ONE
        out = A.zero()
        for (m, k), c in x.terms.items():
            u = PBWElement(U, {m: c})
            w = ExteriorElement(sp, {k: ONE})
            for a, b in zip(self.basis_vectors, self.dual_vectors):
                ua = U.vec(a)
                comm = U.adjoint(a, u)
                if comm:
                    out = out + A.tensor(comm, sp.vector(b).wedge(w)).scale(s1)
                iw = w.contract(b)
                if iw:
                    out = out + A.tensor(ua * u + u * ua, iw).scale(s1 * HALF)
            out = out + A.tensor(u, w.koszul())
            out = out + A.tensor(u, iota(self.gamma, w)).scale(-QUARTER if not printed_signs else QUARTER)
        return out

    def i(self, a: dict, x: MixedElement) -> MixedElement:
        return self.A.contract(a, x)

    def L(self, a: dict, x: MixedElement) -> MixedElement:
        return self.A.lie_derivative(a, self.lie.ad(a), x)

    def element(self, u: PBWElement | None, w: ExteriorElement | None) -> MixedElement:
        return self.A.tensor(u, w)


# ---------------------------------------------------------------------------
# B-data: finite-dimensional g-differential algebras given by matrices


class InconsistentBDatum(ValueError):
    pass


@dataclass
class BDatum:
    """A finite-dimensional g-differential algebra.

    ``i_ops[k]`` and ``L_ops[k]`` are the operators of the k-th basis vector
    of g; ``mult[(p, q)]`` is the product of basis vectors p and q as a
    coordinate dict; ``unit`` is the index of the unit.
    """

    dim: int
    d: SparseMatrix
    i_ops: list
    L_ops: list
    parity: list
    mult: dict
    unit: int = 0
    labels: list = field(default_factory=list)
    name: str = "B"

    def i_vec(self, a: dict) -> SparseMatrix:
        out = SparseMatrix.zero(self.dim, self.dim)
        for k, c in a.items():
            out = out + self.i_ops[k].scale(c)
        return out

    def L_vec(self, a: dict) -> SparseMatrix:
        out = SparseMatrix.zero(self.dim, self.dim)
        for k, c in a.items():
            out = out + self.L_ops[k].scale(c)
        return out

    def product(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for p, a in x.items():
            for q, b in y.items():
                v = self.mult.get((p, q))
                if v:
                    vec_iadd(out, v, a * b)
        return out

    def validate(self, lie) -> None:
        """Check the g-hat* relations on the matrices."""
        n = lie.dim
        Z = SparseMatrix.zero(self.dim, self.dim)

        def anti(a, b):
            return a @ b + b @ a

        def comm(a, b):
            return a @ b - b @ a

        if not (self.d @ self.d).is_zero():
            raise InconsistentBDatum("d^2 != 0")
        for a in range(n):
            if anti(self.i_ops[a], self.d) != self.L_ops[a]:
                raise InconsistentBDatum(f"[i_{lie.labels[a]}, d] != L_{lie.labels[a]}")
            if comm(self.L_ops[a], self.d) != Z:
                raise InconsistentBDatum(f"[L_{lie.labels[a]}, d] != 0")
            for b in range(n):
                ab = lie.bracket_basis(a, b)
                if comm(self.L_ops[a], self.i_ops[b]) != self.i_vec(ab):
                    raise InconsistentBDatum(
                        f"[L_{lie.labels[a]}, i_{lie.labels[b]}] != i_[{lie.labels[a]},{lie.labels[b]}]")
                if comm(self.L_ops[a], self.L_ops[b]) != self.L_vec(ab):
                    raise InconsistentBDatum(
                        f"[L_{lie.labels[a]}, L_{lie.labels[b]}] != L_[{lie.labels[a]},{lie.labels[b]}]")
                if anti(self.i_ops[a], self.i_ops[b]) != Z:
                    raise InconsistentBDatum("contractions do not anticommute")


def trivial_bdatum(lie) -> BDatum:
    z = SparseMatrix.zero(1, 1)
    return BDatum(1, z, [z] * lie.dim, [z] * lie.dim, [0], {(0, 0): {0: ONE}},
                  unit=0, labels=["1"], name="C")


def koszul_bdatum(pair: QuadraticPair) -> BDatum:
    """Lambda(g*) with the Koszul differential, contractions and coadjoint action."""
    sp = pair_space(pair, "g")
    n = pair.g.dim
    N = 1 << n
    masks = list(range(N))

    def op(f: Callable[[int], dict]) -> SparseMatrix:
        return SparseMatrix.from_columns([f(m) for m in masks], N)

    d = op(lambda m: sp.koszul_mono(m))
    i_ops = [op(lambda m, a=a: sp._contract_mono({a: ONE}, m)) for a in range(n)]
    L_ops = []
    for a in range(n):
        ad = pair.g.ad({a: ONE})
        L_ops.append(op(lambda m, ad=ad: ExteriorElement(sp, {m: ONE}).derivation(ad).terms))
    mult = {}
    for p in masks:
        for q in masks:
            s = wedge_sign(p, q)
            if s:
                mult[(p, q)] = {p | q: mpq(s)}
    labels = [format_monomial(sp.labels, m) for m in masks]
    return BDatum(N, d, i_ops, L_ops, [popcount(m) % 2 for m in masks], mult,
                  unit=0, labels=labels, name="Lambda(g*)")


class CartanModel:
    """S(g) (x) B or U(g) (x) B with the two Cartan-model differentials.

    Elements are coordinate dicts keyed by (monomial, B-index).
    """

    def __init__(self, pair: QuadraticPair, B: BDatum, cap: int, validate: bool = True):
        if validate:
            B.validate(pair.g)
        self.pair = pair
        self.B = B
        self.cap = cap
        self.n = pair.g.dim
        self.S = SymAlgebra(pair.g.labels, pair.g)
        self.U = UEnvelope(pair.g, cap)
        self._Bcols_d = B.d.columns()
        self._Bcols_i = [m.columns() for m in B.i_ops]
        self._Bcols_L = [m.columns() for m in B.L_ops]
        sp = pair_space(pair, "g")
        gam = cartan_element(pair, "g", sp)
        self._gamma_terms = [(mask_indices(m), c) for m, c in gam.terms.items()]

    # -- helpers -----------------------------------------------------------

    def keys(self, cap: int | None = None) -> list[tuple]:
        cap = self.cap if cap is None else cap
        return [(m, b) for m in monomials_upto(self.n, cap) for b in range(self.B.dim)]

    def _apply_B(self, cols, x: dict) -> dict:
        out: dict = {}
        for (m, b), c in x.items():
            for b2, c2 in cols[b].items():
                vec_iadd(out, {(m, b2): c * c2})
        return out

    def _i_vec(self, a: dict, x: dict) -> dict:
        out: dict = {}
        for k, ca in a.items():
            vec_iadd(out, self._apply_B(self._Bcols_i[k], x), ca)
        return out

    def L(self, a: dict, x: dict, poly: str = "S") -> dict:
        out: dict = {}
        for k, ca in a.items():
            vec_iadd(out, self._apply_B(self._Bcols_L[k], x), ca)
        for (m, b), c in x.items():
            if poly == "S":
                img = self.S.adjoint(a, self.S.element({m: ONE})).terms
            else:
                img = self.U.adjoint(a, PBWElement(self.U, {m: ONE})).terms
            for m2, c2 in img.items():
                vec_iadd(out, {(m2, b): c * c2})
        return out

    def invariant_keys_basis(self, cap: int, poly: str = "S") -> list[dict]:
        keys = self.keys(cap)
        coords = Coordinates(keys)
        rows = []
        for a in range(self.n):
            cols = [coords.vector(self.L({a: ONE}, {k: ONE}, poly)) for k in keys]
            rows.extend(SparseMatrix.from_columns(cols, len(keys)).rows())
        ker = kernel(SparseMatrix.from_rows(rows, len(keys)))
        return [coords.terms(v) for v in ker.basis]

    # -- commutative model -------------------------------------------------

    def d_commutative(self, x: dict) -> dict:
        """I (x) d - sum_k s_{b_k} (x) i_{a_k}."""
        out = self._apply_B(self._Bcols_d, x)
        dual = self.pair.g_dual
        for k in range(self.n):
            ix = self._apply_B(self._Bcols_i[k], x)
            for (m, b), c in ix.items():
                for j, cj in dual[k].items():
                    m2 = _add_e(m, j)
                    if sum(m2) > self.cap:
                        raise FiltrationOverflow(f"polynomial degree exceeds cap {self.cap}")
                    vec_iadd(out, {(m2, b): -c * cj})
        return out

    # -- noncommutative model ---------------------------------------------

    def d_noncommutative(self, x: dict, coefficients=(-HALF, QUARTER)) -> dict:
        """I (x) d - 1/2 sum_k (u^L_{a_k} + u^R_{a_k}) (x) i_{b_k} + 1/4 I (x) i_gamma."""
        c_sym, c_gam = coefficients
        U = self.U
        out = self._apply_B(self._Bcols_d, x)
        dual = self.pair.g_dual
        for k in range(self.n):
            ib = self._i_vec(dual[k], x)
            for (m, b), c in ib.items():
                if sum(m) + 1 > self.cap:
                    raise FiltrationOverflow(f"U-degree exceeds cap {self.cap}")
                gen = _add_e((0,) * self.n, k)
                for prod in (U.mono_mono(gen, m), U.mono_mono(m, gen)):
                    for m2, c2 in prod.items():
                        vec_iadd(out, {(m2, b): c * c2 * c_sym})
        out_g = self.i_gamma(x)
        vec_iadd(out, out_g, c_gam)
        return out

    def i_gamma(self, x: dict) -> dict:
        """sum_{i<j<k} c_ijk i_i i_j i_k (i_k applied first)."""
        out: dict = {}
        for idx, c in self._gamma_terms:
            y = x
            for t in reversed(idx):
                y = self._apply_B(self._Bcols_i[t], y)
                if not y:
                    break
            if y:
                vec_iadd(out, y, c)
        return out

    def odot(self, x: dict, y: dict, coefficient=-HALF) -> dict:
        """(x (x) b1)(.)(y (x) b2) = xy (x) mu(Exp(c sum_k i1_{a_k} i2_{b_k})(b1 (x) b2))."""
        U = self.U
        dual = self.pair.g_dual
        out: dict = {}
        for (m1, b1), c1 in x.items():
            for (m2, b2), c2 in y.items():
                if sum(m1) + sum(m2) > self.cap:
                    raise FiltrationOverflow(f"U-degree exceeds cap {self.cap}")
                uprod = U.mono_mono(m1, m2)
                bprod = self._b_odot(b1, b2, dual, coefficient)
                for mu, cu in uprod.items():
                    for bb, cb in bprod.items():
                        vec_iadd(out, {(mu, bb): c1 * c2 * cu * cb})
        return out

    def _b_odot(self, b1: int, b2: int, dual, coefficient) -> dict:
        cache = self.__dict__.setdefault("_bodot", {})
        key = (b1, b2, coefficient)
        if key in cache:
            return cache[key]
        B = self.B
        term = {(b1, b2): ONE}
        out: dict = {}
        n = 0
        fact = ONE
        while term:
            w = coefficient ** n / fact
            for (p, q), c in term.items():
                vec_iadd(out, B.product({p: ONE}, {q: ONE}), c * w)
            nxt: dict = {}
            for (p, q), c in term.items():
                sgn = -1 if B.parity[p] else 1
                for k in range(self.n):
                    ip = self._Bcols_i[k][p]
                    if not ip:
                        continue
                    iq: dict = {}
                    for j, cj in dual[k].items():
                        vec_iadd(iq, self._Bcols_i[j][q], cj)
                    for p2, a in ip.items():
                        for q2, bq in iq.items():
                            vec_iadd(nxt, {(p2, q2): c * a * bq * sgn})
            term = nxt
            n += 1
            fact *= n
            if n > 2 * B.dim + 2:
                raise InconsistentBDatum("contraction operator is not nilpotent")
        cache[key] = out
        return out


# ---------------------------------------------------------------------------
# basic subspaces


def basic_subspace(ncw: NCWeil, r_vectors: Sequence[dict], cap: int) -> tuple[Subspace, list[tuple]]:
    """Kernel of the stacked i_x and L_x (x in r) on the U-filtration <= cap slice."""
    keys = ncw.A.basis(cap)
    coords = Coordinates(keys)
    rows: list[dict] = []
    for x in r_vectors:
        xs = ncw.pair.coords("g", x) if ncw.which == "g" else x
        for op in (ncw.i, ncw.L):
            cols = [coords.vector(op(xs, MixedElement(ncw.A, {k: ONE})).terms) for k in keys]
            rows.extend(SparseMatrix.from_columns(cols, len(keys)).rows())
    if not rows:
        return Subspace.full(len(keys)), keys
    return kernel(SparseMatrix.from_rows(rows, len(keys))), keys


def embed_exterior(src: CliffordSpace, dst: CliffordSpace, images: Sequence[dict],
                   w: ExteriorElement) -> ExteriorElement:
    """Algebra map Lambda(src) -> Lambda(dst) sending e_i to images[i]."""
    out = dst.zero()
    for m, c in w.terms.items():
        y = dst.one()
        for i in mask_indices(m):
            y = y.wedge(dst.vector(images[i]))
        out = out + y.scale(c)
    return out


# ---------------------------------------------------------------------------
# the tensor square of Lambda(g) and the flip


class ExteriorSquare:
    """Lambda(W) (x) Lambda(W) as a super tensor product of algebras."""

    def __init__(self, space: CliffordSpace):
        self.space = space
        self.N = 1 << space.dim

    def keys(self):
        return [(a, b) for a in range(self.N) for b in range(self.N)]

    def mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for (a1, b1), c1 in x.items():
            for (a2, b2), c2 in y.items():
                s1 = wedge_sign(a1, a2)
                s2 = wedge_sign(b1, b2)
                if not (s1 and s2):
                    continue
                s = s1 * s2 * (-1 if (popcount(b1) * popcount(a2)) % 2 else 1)
                vec_iadd(out, {(a1 | a2, b1 | b2): c1 * c2 * s})
        return out

    def i(self, v: dict, x: dict) -> dict:
        """i_v (x) 1 + (-1)^{|w|} (x) i_v."""
        sp = self.space
        out: dict = {}
        for (a, b), c in x.items():
            for a2, ca in sp._contract_mono(v, a).items():
                vec_iadd(out, {(a2, b): c * ca})
            sg = -1 if popcount(a) % 2 else 1
            for b2, cb in sp._contract_mono(v, b).items():
                vec_iadd(out, {(a, b2): c * cb * sg})
        return out

    def flip(self, x: dict) -> dict:
        out = {}
        for (a, b), c in x.items():
            s = -1 if (popcount(a) * popcount(b)) % 2 else 1
            out[(b, a)] = c * s
        return out

    def horizontal(self) -> tuple[Subspace, Coordinates]:
        keys = self.keys()
        coords = Coordinates(keys)
        rows: list[dict] = []
        for a in range(self.space.dim):
            cols = [coords.vector(self.i({a: ONE}, {k: ONE})) for k in keys]
            rows.extend(SparseMatrix.from_columns(cols, len(keys)).rows())
        return kernel(SparseMatrix.from_rows(rows, len(keys))), coords

    def generated_by_differences(self) -> tuple[Subspace, Coordinates]:
        """Subalgebra generated by e_i (x) 1 - 1 (x) e_i."""
        keys = self.keys()
        coords = Coordinates(keys)
        gens = [{(1 << i, 0): ONE, (0, 1 << i): -ONE} for i in range(self.space.dim)]
        span = [{(0, 0): ONE}]
        frontier = [{(0, 0): ONE}]
        while frontier:
            new = []
            for x in frontier:
                for gtr in gens:
                    y = self.mul(x, gtr)
                    if y:
                        new.append(y)
            span.extend(new)
            frontier = new
        return Subspace(len(keys), [coords.vector(v) for v in span]), coords


# ---------------------------------------------------------------------------
# maps between the r- and g-level algebras


def delta(pair: QuadraticPair, x: dict) -> ExteriorElement:
    """delta(x) in Lambda^2(p) (p coordinates): <delta(x), y^z> = <x, [y, z]> on p."""
    sp = pair_space(pair, "p")
    q = pair.p_dual
    terms = {}
    for i, j in combinations(range(pair.dim_p), 2):
        c = pair.form(x, pair.g.bracket(q[i], q[j]))
        if c:
            terms[(1 << i) | (1 << j)] = c
    return ExteriorElement(sp, terms)


def p_to_g(pair: QuadraticPair, w: ExteriorElement) -> ExteriorElement:
    return embed_exterior(pair_space(pair, "p"), pair_space(pair, "g"), list(pair.p_basis), w)


def r_to_g(pair: QuadraticPair, w: ExteriorElement) -> ExteriorElement:
    return embed_exterior(pair_space(pair, "r"), pair_space(pair, "g"), pair.r_basis, w)


class WeilMapF:
    """F : W(r) -> W(g), F(e_x) = e_x, F(s_x) = s_x - delta(x), multiplicative."""

    def __init__(self, pair: QuadraticPair, cap: int):
        self.pair = pair
        self.Wr = WeilAlgebra.of_pair(pair, "r", cap)
        self.Wg = WeilAlgebra.of_pair(pair, "g", cap)

    def on_s(self, m: int) -> WeilElement:
        x = self.pair.r_basis[m]
        return self.Wg.s(x) - self.Wg.ext(p_to_g(self.pair, delta(self.pair, x)))

    def __call__(self, y: WeilElement) -> WeilElement:
        Wg = self.Wg
        out = Wg.zero()
        for (mono, k), c in y.terms.items():
            t = Wg.one()
            for i, e in enumerate(mono):
                for _ in range(e):
                    t = t * self.on_s(i)
            t = t * Wg.ext(r_to_g(self.pair, ExteriorElement(self.Wr.space, {k: ONE})))
            out = out + t.scale(c)
        return out


class NCWeilMap:
    """F-script : W_nc(r) -> W_nc(g), u_x -> u_x + alpha(x), c_x -> c_x, multiplicative."""

    def __init__(self, pair: QuadraticPair, cap: int):
        from .dirac import DiracAlgebra

        self.pair = pair
        self.Wr = NCWeil(pair, cap, which="r")
        self.Wg = NCWeil(pair, cap, which="g")
        self.dirac = DiracAlgebra(pair, cap)
        self._gens = []
        Ag = self.Wg.A
        for m in range(pair.dim_r):
            a = p_to_g(pair, self.dirac.alpha({m: ONE}))
            self._gens.append(Ag.u(pair.r_basis[m]) + Ag.c(a))

    def on_u(self, m: int) -> MixedElement:
        return self._gens[m]

    def __call__(self, y: MixedElement) -> MixedElement:
        Ag = self.Wg.A
        sp_r = self.Wr.space
        out = Ag.zero()
        for (mono, k), c in y.terms.items():
            t = Ag.one()
            for i, e in enumerate(mono):
                for _ in range(e):
                    t = t * self._gens[i]
            if k:
                t = t * Ag.c(r_to_g(self.pair, ExteriorElement(sp_r, {k: ONE})))
            out = out + t.scale(c)
        return out

    def xi_image(self, u: PBWElement) -> MixedElement:
        """xi(u) transported into W_nc(g) through Lambda(p) -> Lambda(g)."""
        x = self.dirac.xi(u)
        Ag = self.Wg.A
        out = Ag.zero()
        for (mono, k), c in x.terms.items():
            w = p_to_g(self.pair, ExteriorElement(self.dirac.space, {k: ONE}))
            out = out + Ag.tensor(PBWElement(self.Wg.U, {mono: c}), w)
        return out
