"""U(g) tensor Lambda(W) with the product (x(x)w)(y(x)n) = xy (x) w(.)n.

U(g) is purely even, so no Koszul sign enters the product; the Z/2 grading
comes from the exterior factor alone.  This single algebra carries both the
noncommutative Weil algebra (W = g) and the Dirac algebra (W = p).
"""

from __future__ import annotations


from .cliff import (
    CliffordSpace, ExteriorElement, format_monomial, format_terms, mask_indices,
    popcount, remove_sign, wedge_sign,
)
from .exactlin import ONE, ZERO, Coordinates, SparseMatrix, vec_iadd
from .uenv import FiltrationOverflow, PBWElement, UEnvelope, format_mono


class MixedAlgebra:
    def __init__(self, U: UEnvelope, space: CliffordSpace, name: str = "A"):
        self.U = U
        self.space = space
        self.name = name
        self._zero_mono = (0,) * U.n

    # -- construction ------------------------------------------------------

    def element(self, terms: dict) -> "MixedElement":
        return MixedElement(self, terms)

    def zero(self) -> "MixedElement":
        return MixedElement(self, {})

    def one(self) -> "MixedElement":
        return MixedElement(self, {(self._zero_mono, 0): ONE})

    def scalar(self, c) -> "MixedElement":
        return MixedElement(self, {(self._zero_mono, 0): c} if c else {})

    def tensor(self, u: PBWElement | None, w: ExteriorElement | None) -> "MixedElement":
        ut = u.terms if u is not None else {self._zero_mono: ONE}
        wt = w.terms if w is not None else {0: ONE}
        out = {}
        for m, a in ut.items():
            for k, b in wt.items():
                out[(m, k)] = a * b
        return MixedElement(self, out)

    def u(self, x: PBWElement | dict) -> "MixedElement":
        if isinstance(x, dict):
            x = self.U.vec(x)
        return self.tensor(x, None)

    def c(self, w: ExteriorElement | dict) -> "MixedElement":
        if isinstance(w, dict):
            w = self.space.vector(w)
        return self.tensor(None, w)

    def basis(self, cap: int, parity: int | None = None) -> list[tuple]:
        """Keys (mono, mask) of the U-filtration <= cap slice."""
        keys = []
        for m in self.U.monomials(cap):
            for k in self.space.basis_masks():
                if parity is None or popcount(k) % 2 == parity:
                    keys.append((m, k))
        return keys

    # -- product -----------------------------------------------------------

    def mul(self, x: "MixedElement", y: "MixedElement") -> "MixedElement":
        if x.terms and y.terms and x.u_degree() + y.u_degree() > self.U.cap:
            raise FiltrationOverflow(
                f"product of U-degrees {x.u_degree()} + {y.u_degree()} exceeds cap {self.U.cap}")
        U, sp = self.U, self.space
        out: dict = {}
        # group by U-monomial pairs to reuse PBW products
        for (m1, k1), a in x.terms.items():
            for (m2, k2), b in y.terms.items():
                uprod = U.mono_mono(m1, m2)
                cprod = sp.odot_mono(k1, k2)
                ab = a * b
                for mu, cu in uprod.items():
                    for kc, cc in cprod.items():
                        key = (mu, kc)
                        v = out.get(key, ZERO) + ab * cu * cc
                        if v:
                            out[key] = v
                        else:
                            out.pop(key, None)
        return MixedElement(self, out)

    def supercommutator(self, x: "MixedElement", y: "MixedElement") -> "MixedElement":
        out = self.zero()
        for px in (0, 1):
            xp = x.parity_part(px)
            if not xp:
                continue
            for py in (0, 1):
                yp = y.parity_part(py)
                if not yp:
                    continue
                if px and py:
                    out = out + xp * yp + yp * xp
                else:
                    out = out + xp * yp - yp * xp
        return out

    # -- operators ---------------------------------------------------------

    def contract(self, v: dict, x: "MixedElement") -> "MixedElement":
        """I (x) i_v for v in W coordinates."""
        sp = self.space
        out: dict = {}
        for (m, k), c in x.terms.items():
            for k2, c2 in sp._contract_mono(v, k).items():
                vec_iadd(out, {(m, k2): c * c2})
        return MixedElement(self, out)

    def lie_derivative(self, a: dict, w_matrix: SparseMatrix, x: "MixedElement") -> "MixedElement":
        """ad a on U plus the derivation of Lambda(W) given by w_matrix (ad a on W)."""
        U = self.U
        cols = w_matrix.columns()
        out: dict = {}
        for (m, k), c in x.terms.items():
            for i, ca in a.items():
                for m2, c2 in U.ad_basis_mono(i, m).items():
                    vec_iadd(out, {(m2, k): c * ca * c2})
            if k:
                for i in mask_indices(k):
                    rest = k & ~(1 << i)
                    s0 = remove_sign(k, i)
                    for j, aa in cols[i].items():
                        s = wedge_sign(1 << j, rest)
                        if s:
                            vec_iadd(out, {(m, (1 << j) | rest): c * aa * s * s0})
        return MixedElement(self, out)

    def coordinates(self, x: "MixedElement", coords: Coordinates, grow: bool = False) -> dict:
        return coords.vector(x.terms, grow=grow)


class MixedElement:
    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: MixedAlgebra, terms: dict):
        self.algebra = algebra
        self.terms = {k: c for k, c in terms.items() if c}

    def u_degree(self) -> int:
        return max((sum(m) for m, _ in self.terms), default=-1)

    def parity_part(self, p: int) -> "MixedElement":
        return MixedElement(self.algebra, {(m, k): c for (m, k), c in self.terms.items()
                                           if popcount(k) % 2 == p})

    @property
    def parity(self) -> int | None:
        ps = {popcount(k) % 2 for _, k in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def _coerce(self, other):
        if isinstance(other, MixedElement):
            if other.algebra is not self.algebra:
                raise ValueError("elements of different mixed algebras")
            return other
        return self.algebra.scalar(other)

    def __add__(self, other):
        t = dict(self.terms)
        vec_iadd(t, self._coerce(other).terms)
        return MixedElement(self.algebra, t)

    __radd__ = __add__

    def __sub__(self, other):
        t = dict(self.terms)
        vec_iadd(t, self._coerce(other).terms, -ONE)
        return MixedElement(self.algebra, t)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.scale(-ONE)

    def scale(self, c) -> "MixedElement":
        return MixedElement(self.algebra, {k: c * x for k, x in self.terms.items()} if c else {})

    def __mul__(self, other):
        if isinstance(other, MixedElement):
            return self.algebra.mul(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if isinstance(other, MixedElement):
            return self.algebra is other.algebra and self.terms == other.terms
        return self.terms == self.algebra.scalar(other).terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self):
        return format_mixed(self)

    def __repr__(self):
        return f"MixedElement({format_mixed(self)})"


def format_mixed(x: MixedElement) -> str:
    A = x.algebra
    ulabels = A.U.lie.labels
    clabels = A.space.labels

    def key(item):
        (m, k) = item
        return (sum(m) + popcount(k), sum(m), tuple(-e for e in m), popcount(k), mask_indices(k))

    pieces = []
    for (m, k) in sorted(x.terms, key=key):
        parts = []
        if any(m):
            parts.append(format_mono(["u_" + l for l in ulabels], m))
        if k:
            parts.append(format_monomial(["c_" + l for l in clabels], k))
        name = "(x)".join(parts) if parts else "1"
        pieces.append((name, x.terms[(m, k)]))
    return format_terms(pieces).replace("(x)", "⊗")
