"""Exterior algebra of a quadratic space, carrying both the wedge and the
Clifford product.

Monomials are bitmasks over the chosen basis of W; bit ``i`` set means the
factor ``e_i`` is present, factors are kept in increasing index order.  The
Clifford algebra is identified with the exterior algebra through the symbol
map, so a single element type carries ``wedge`` and ``odot``.

The Clifford product is computed from the exponential-of-contractions formula

    w (.) n = mu( Exp(c * T)(w (x) n) ),   T = sum_ij <e_i, e_j> d_i (x) d_j,

with ``c = -1/2`` and the Koszul sign ``(d_i (x) d_j)(x (x) y) =
(-1)^|x| d_i x (x) d_j y``.  Here ``d_i`` removes ``e_i`` from a monomial with
the sign of its position.  This reproduces ``x (.) y + y (.) x = <x, y>``.
"""

from __future__ import annotations

from itertools import combinations
from math import factorial
from typing import Iterable, Sequence

from .exactlin import ONE, ZERO, SparseMatrix, mpq, vec_iadd


class AmbientMismatch(ValueError):
    pass


def popcount(m: int) -> int:
    return bin(m).count("1")


def mask_indices(m: int) -> list[int]:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return out


def wedge_sign(a: int, b: int) -> int:
    """Sign of e_A ^ e_B after sorting (0 when A and B overlap)."""
    if a & b:
        return 0
    # count pairs (i in A, j in B) with i > j
    inv = 0
    bb = b
    while bb:
        low = bb & -bb
        inv += popcount(a & ~((low << 1) - 1))
        bb ^= low
    return -1 if inv & 1 else 1


def remove_sign(m: int, i: int) -> int:
    """Sign (-1)^(position of e_i in m): the number of set bits below i."""
    return -1 if popcount(m & ((1 << i) - 1)) & 1 else 1


class CliffordSpace:
    """A quadratic space W with Gram matrix ``gram`` in a fixed basis.

    ``lie`` (optional) is a Lie algebra structure on the same basis; it is
    needed for the Koszul differential.  ``exp_coefficient`` is the constant
    in the exponential formula for the Clifford product; anything other than
    -1/2 gives a deliberately wrong product used by negative controls.
    """

    def __init__(self, gram: SparseMatrix, labels: Sequence[str] | None = None,
                 lie=None, exp_coefficient=mpq(-1, 2), name: str = "W"):
        if gram.nrows != gram.ncols:
            raise ValueError("Gram matrix must be square")
        self.gram = gram
        self.dim = gram.nrows
        self.labels = tuple(labels) if labels is not None else tuple(f"w{i}" for i in range(self.dim))
        self.lie = lie
        self.exp_coefficient = mpq(exp_coefficient) if isinstance(exp_coefficient, (int, str)) else exp_coefficient
        self.name = name
        self._odot: dict = {}
        self._koszul: dict = {}
        self._gram_rows = {i: dict(r) for i, r in gram._rows.items()}

    # -- constructors ------------------------------------------------------

    def one(self) -> "ExteriorElement":
        return ExteriorElement(self, {0: ONE})

    def zero(self) -> "ExteriorElement":
        return ExteriorElement(self, {})

    def scalar(self, c) -> "ExteriorElement":
        return ExteriorElement(self, {0: c} if c else {})

    def gen(self, i: int) -> "ExteriorElement":
        return ExteriorElement(self, {1 << i: ONE})

    def vector(self, coords: dict) -> "ExteriorElement":
        return ExteriorElement(self, {1 << i: c for i, c in coords.items() if c})

    def monomial(self, indices: Iterable[int]) -> "ExteriorElement":
        out = self.one()
        for i in indices:
            out = out.wedge(self.gen(i))
        return out

    def basis_masks(self) -> range:
        return range(1 << self.dim)

    def pair(self, u: dict, v: dict):
        s = ZERO
        for i, a in u.items():
            row = self._gram_rows.get(i)
            if row:
                for j, b in v.items():
                    c = row.get(j)
                    if c:
                        s += a * b * c
        return s

    # -- monomial kernels --------------------------------------------------

    def _contract_mono(self, v: dict, m: int) -> dict:
        """i_v applied to the monomial m."""
        out: dict = {}
        sign = 1
        for i in mask_indices(m):
            c = ZERO
            for k, a in v.items():
                g = self._gram_rows.get(k, {}).get(i)
                if g:
                    c += a * g
            if c:
                key = m & ~(1 << i)
                y = out.get(key, ZERO) + (c if sign > 0 else -c)
                if y:
                    out[key] = y
                else:
                    out.pop(key, None)
            sign = -sign
        return out

    def _t_step(self, tensor: dict) -> dict:
        """Apply T = sum_ij G_ij d_i (x) d_j with the Koszul sign."""
        out: dict = {}
        for (a, b), coef in tensor.items():
            s0 = -1 if popcount(a) & 1 else 1
            ia = mask_indices(a)
            ib = mask_indices(b)
            for i in ia:
                row = self._gram_rows.get(i)
                if not row:
                    continue
                si = remove_sign(a, i)
                for j in ib:
                    g = row.get(j)
                    if not g:
                        continue
                    sj = remove_sign(b, j)
                    key = (a & ~(1 << i), b & ~(1 << j))
                    y = out.get(key, ZERO) + coef * g * (s0 * si * sj)
                    if y:
                        out[key] = y
                    else:
                        out.pop(key, None)
        return out

    def odot_mono(self, a: int, b: int) -> dict:
        key = (a, b)
        hit = self._odot.get(key)
        if hit is not None:
            return hit
        out: dict = {}
        term = {(a, b): ONE}
        n = 0
        c = self.exp_coefficient
        while term:
            w = c ** n / factorial(n) if n else ONE
            for (x, y), coef in term.items():
                s = wedge_sign(x, y)
                if s:
                    k = x | y
                    v = out.get(k, ZERO) + coef * w * s
                    if v:
                        out[k] = v
                    else:
                        out.pop(k, None)
            term = self._t_step(term)
            n += 1
        self._odot[key] = out
        return out

    def koszul_mono(self, m: int) -> dict:
        """d_wedge of a monomial (needs ``lie``)."""
        hit = self._koszul.get(m)
        if hit is not None:
            return hit
        if self.lie is None:
            raise ValueError(f"space {self.name} carries no bracket; Koszul differential undefined")
        if m == 0:
            out = {}
        else:
            i = mask_indices(m)[0]
            rest = m & ~(1 << i)
            di = self._koszul_gen(i)
            out = {}
            # d(e_i ^ rest) = d(e_i) ^ rest - e_i ^ d(rest)
            for k, c in di.items():
                s = wedge_sign(k, rest)
                if s:
                    vec_iadd(out, {k | rest: c * s})
            for k, c in self.koszul_mono(rest).items():
                s = wedge_sign(1 << i, k)
                if s:
                    vec_iadd(out, {(1 << i) | k: -c * s})
        self._koszul[m] = out
        return out

    def _koszul_gen(self, i: int) -> dict:
        # d(e_i) = 1/2 sum_k e^k ^ [e_k, e_i]
        dual = self.dual_basis()
        out: dict = {}
        for k in range(self.dim):
            br = self.lie.bracket_basis(k, i)
            if not br:
                continue
            for a, ca in dual[k].items():
                for b, cb in br.items():
                    s = wedge_sign(1 << a, 1 << b)
                    if s:
                        vec_iadd(out, {(1 << a) | (1 << b): ca * cb * s / 2})
        return out

    def dual_basis(self) -> list[dict]:
        if not hasattr(self, "_dual"):
            from .exactlin import inverse
            inv = inverse(self.gram)
            self._dual = [{l: inv[l, k] for l in range(self.dim) if inv[l, k]} for k in range(self.dim)]
        return self._dual

    def __repr__(self):
        return f"CliffordSpace({self.name}, dim={self.dim})"


class ExteriorElement:
    """Element of the exterior algebra of a :class:`CliffordSpace`."""

    __slots__ = ("space", "terms")

    def __init__(self, space: CliffordSpace, terms: dict):
        self.space = space
        self.terms = {m: c for m, c in terms.items() if c}

    def _same(self, other: "ExteriorElement"):
        if other.space is not self.space:
            raise AmbientMismatch(f"{self.space.name} vs {other.space.name}")

    # -- linear structure --------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ExteriorElement):
            other = self.space.scalar(other)
        self._same(other)
        t = dict(self.terms)
        vec_iadd(t, other.terms)
        return ExteriorElement(self.space, t)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, ExteriorElement):
            other = self.space.scalar(other)
        self._same(other)
        t = dict(self.terms)
        vec_iadd(t, other.terms, -ONE)
        return ExteriorElement(self.space, t)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return ExteriorElement(self.space, {m: -c for m, c in self.terms.items()})

    def scale(self, c) -> "ExteriorElement":
        if not c:
            return self.space.zero()
        return ExteriorElement(self.space, {m: c * x for m, x in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, ExteriorElement):
            return self.odot(other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __xor__(self, other):
        return self.wedge(other)

    def __eq__(self, other):
        if isinstance(other, ExteriorElement):
            return self.space is other.space and self.terms == other.terms
        if not other:
            return not self.terms
        return self.terms == {0: other}

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- products ----------------------------------------------------------

    def wedge(self, other: "ExteriorElement") -> "ExteriorElement":
        self._same(other)
        out: dict = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                s = wedge_sign(a, b)
                if s:
                    k = a | b
                    v = out.get(k, ZERO) + (x * y if s > 0 else -(x * y))
                    if v:
                        out[k] = v
                    else:
                        out.pop(k, None)
        return ExteriorElement(self.space, out)

    def odot(self, other: "ExteriorElement") -> "ExteriorElement":
        self._same(other)
        sp = self.space
        out: dict = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                vec_iadd(out, sp.odot_mono(a, b), x * y)
        return ExteriorElement(sp, out)

    def supercommutator(self, other: "ExteriorElement") -> "ExteriorElement":
        """[x, y] = x(.)y - (-1)^{|x||y|} y(.)x, extended bilinearly over parity parts."""
        out = self.space.zero()
        for px in (0, 1):
            x = self.parity_part(px)
            if not x:
                continue
            for py in (0, 1):
                y = other.parity_part(py)
                if not y:
                    continue
                out = out + x.odot(y) - (y.odot(x) if not (px and py) else -y.odot(x))
        return out

    def contract(self, v: dict) -> "ExteriorElement":
        """Contraction i_v by a vector v (W coordinates)."""
        out: dict = {}
        sp = self.space
        for m, c in self.terms.items():
            vec_iadd(out, sp._contract_mono(v, m), c)
        return ExteriorElement(sp, out)

    def koszul(self) -> "ExteriorElement":
        out: dict = {}
        for m, c in self.terms.items():
            vec_iadd(out, self.space.koszul_mono(m), c)
        return ExteriorElement(self.space, out)

    def derivation(self, mat: SparseMatrix) -> "ExteriorElement":
        """Even derivation extending the linear map ``mat`` on W (columns = images)."""
        sp = self.space
        cols = mat.columns()
        out: dict = {}
        for m, c in self.terms.items():
            for i in mask_indices(m):
                rest = m & ~(1 << i)
                s0 = remove_sign(m, i)
                for j, a in cols[i].items():
                    # e_..^ (a e_j in slot i) ^ ..: move e_j to the front, then into place
                    s = wedge_sign(1 << j, rest)
                    if s:
                        vec_iadd(out, {(1 << j) | rest: c * a * s * s0})
        return ExteriorElement(sp, out)

    # -- grading -----------------------------------------------------------

    def degree_part(self, k: int) -> "ExteriorElement":
        return ExteriorElement(self.space, {m: c for m, c in self.terms.items() if popcount(m) == k})

    def parity_part(self, p: int) -> "ExteriorElement":
        return ExteriorElement(self.space, {m: c for m, c in self.terms.items() if popcount(m) % 2 == p})

    @property
    def degrees(self) -> set[int]:
        return {popcount(m) for m in self.terms}

    @property
    def parity(self) -> int | None:
        ps = {d % 2 for d in self.degrees}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def max_degree(self) -> int:
        return max(self.degrees, default=-1)

    def scalar_part(self):
        return self.terms.get(0, ZERO)

    def __repr__(self):
        return f"ExteriorElement({format_exterior(self)})"

    def __str__(self):
        return format_exterior(self)


def format_monomial(labels, m: int, sep: str = "^") -> str:
    if m == 0:
        return "1"
    return sep.join(labels[i] for i in mask_indices(m))


def format_terms(pieces: list[tuple[str, object]]) -> str:
    from .exactlin import format_scalar
    if not pieces:
        return "0"
    out = []
    for name, c in pieces:
        cs = format_scalar(c)
        if name == "1":
            body = cs
        elif cs == "1":
            body = name
        elif cs == "-1":
            body = "-" + name
        else:
            body = f"({cs})*{name}" if ("+" in cs[1:] or "-" in cs[1:]) else f"{cs}*{name}"
        out.append(body)
    text = out[0]
    for b in out[1:]:
        text += (" - " + b[1:]) if b.startswith("-") else (" + " + b)
    return text


def _mono_order(m: int):
    return (popcount(m), mask_indices(m))


def format_exterior(x: ExteriorElement, prefix: str = "") -> str:
    labels = [prefix + l for l in x.space.labels]
    pieces = [(format_monomial(labels, m), x.terms[m]) for m in sorted(x.terms, key=_mono_order)]
    return format_terms(pieces)


# ---------------------------------------------------------------------------
# pair-derived spaces


def pair_space(pair, which: str) -> CliffordSpace:
    """Cached Clifford space for the g-, r- or p-slot of a quadratic pair."""
    cache = pair.__dict__.setdefault("_clifford_spaces", {})
    sp = cache.get(which)
    if sp is None:
        lie = None
        if which == "g":
            lie = pair.g
        elif which == "r":
            lie = pair.r_algebra
        sp = CliffordSpace(pair.gram(which), pair.labels_of(which), lie=lie,
                           name=f"{pair.name}:{which}")
        cache[which] = sp
    return sp


def cartan_element(pair, which: str = "g", space: CliffordSpace | None = None) -> ExteriorElement:
    """gamma_W in Lambda^3(W): coefficient <e^i, [e^j, e^k]> on e_i^e_j^e_k (i<j<k)."""
    sp = space or pair_space(pair, which)
    basis, dual = pair.basis_of(which)
    n = len(basis)
    form, g = pair.form, pair.g
    terms = {}
    for i, j, k in combinations(range(n), 3):
        c = form(dual[i], g.bracket(dual[j], dual[k]))
        if c:
            terms[(1 << i) | (1 << j) | (1 << k)] = c
    return ExteriorElement(sp, terms)


def contract_by(x: ExteriorElement, omega: ExteriorElement) -> ExteriorElement:
    """Contraction i_x for a homogeneous x of any degree.

    For a monomial e_{i1}^...^e_{ik} this is i_{e_ik} o ... o i_{e_i1}
    (i_{e_i1} applied first): the adjoint of left wedge multiplication under
    the determinant pairing.
    """
    x._same(omega)
    out = x.space.zero()
    for m, c in x.terms.items():
        y = omega
        for i in mask_indices(m):
            y = y.contract({i: ONE})
        out = out + y.scale(c)
    return out


def iota(x: ExteriorElement, omega: ExteriorElement) -> ExteriorElement:
    """The algebra-homomorphism extension of contraction: i_{x^y} = i_x o i_y.

    On a monomial e_{i1}^...^e_{ik} the last factor acts first, so this
    differs from :func:`contract_by` by the reversal sign (-1)^{k(k-1)/2}.
    """
    x._same(omega)
    out = x.space.zero()
    for m, c in x.terms.items():
        y = omega
        for i in reversed(mask_indices(m)):
            y = y.contract({i: ONE})
        out = out + y.scale(c)
    return out


def vector_of(x: ExteriorElement) -> dict:
    """Coordinates of a degree-1 element."""
    out = {}
    for m, c in x.terms.items():
        if popcount(m) != 1:
            raise ValueError("not a degree-1 element")
        out[m.bit_length() - 1] = c
    return out
