"""The algebra (U(g) (x) Cl(p))^r with the cubic Dirac element, the maps
alpha, xi and eta_R, the homotopy solver, and the kernel decomposition check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

from .cliff import ExteriorElement, cartan_element, pair_space
from .exactlin import (
    ONE, Coordinates, NoSolution, SparseMatrix, Subspace, kernel, solve, vec_iadd,
)
from .liealg import QuadraticPair
from .mixed import MixedAlgebra, MixedElement
from .uenv import (
    DUFLO_WINDOW, FiltrationOverflow, PBWElement, SymAlgebra, UEnvelope, UnsupportedDegree,
    casimir, duflo, duflo_inverse, invariants_basis,
)


class DiracAlgebra:
    """U(g) (x) Lambda(p) with Clifford product, filtration cap ``cap``."""

    def __init__(self, pair: QuadraticPair, cap: int):
        self.pair = pair
        self.cap = cap
        self.U = UEnvelope(pair.g, cap, name="U(g)")
        self.Ur = UEnvelope(pair.r_algebra, cap, name="U(r)")
        self.space = pair_space(pair, "p")
        self.A = MixedAlgebra(self.U, self.space, name="U(g)(x)Cl(p)")
        self._xi_mono: dict = {}
        self._inv: dict = {}

    # -- the cubic Dirac element -------------------------------------------

    @cached_property
    def gamma_p(self) -> ExteriorElement:
        return cartan_element(self.pair, "p", self.space)

    @cached_property
    def D(self) -> MixedElement:
        """sum_l u_{p_l} (x) c_{q_l} - 1 (x) gamma_p."""
        A = self.A
        out = A.zero()
        for v, q in zip(self.pair.p_basis, self.space.dual_basis()):
            out = out + A.u(v) * A.c(q)
        return out - A.c(self.gamma_p)

    def d(self, x: MixedElement) -> MixedElement:
        """ad D^p (super-commutator)."""
        if x.terms and x.u_degree() + 1 > self.cap:
            raise FiltrationOverflow(f"ad D^p needs U-degree <= {self.cap - 1}, got {x.u_degree()}")
        return self.A.supercommutator(self.D, x)

    # -- r-action ----------------------------------------------------------

    def L(self, m: int, x: MixedElement) -> MixedElement:
        """Action of the m-th r-basis vector: ad on U(g), derivation on Lambda(p)."""
        return self.A.lie_derivative(self.pair.r_basis[m], self.pair.ad_r_on_p(m), x)

    def is_r_invariant(self, x: MixedElement) -> bool:
        return all(self.L(m, x).is_zero() for m in range(self.pair.dim_r))

    def invariant_slice(self, cap: int, parity: int | None = None) -> tuple[list[MixedElement], list[tuple]]:
        """Basis of (U(g)_{<=cap} (x) Lambda(p))^r, optionally of one parity."""
        key = (cap, parity)
        if key in self._inv:
            return self._inv[key]
        keys = self.A.basis(cap, parity)
        coords = Coordinates(keys)
        rows: list[dict] = []
        for m in range(self.pair.dim_r):
            cols = [coords.vector(self.L(m, MixedElement(self.A, {k: ONE})).terms) for k in keys]
            rows.extend(SparseMatrix.from_columns(cols, len(keys)).rows())
        if rows:
            basis = kernel(SparseMatrix.from_rows(rows, len(keys))).basis
        else:
            basis = [{i: ONE} for i in range(len(keys))]
        out = ([MixedElement(self.A, coords.terms(v)) for v in basis], keys)
        self._inv[key] = out
        return out

    # -- alpha and xi --------------------------------------------------------

    @cached_property
    def _alpha_table(self) -> list[ExteriorElement]:
        return [self._solve_alpha(m) for m in range(self.pair.dim_r)]

    def _solve_alpha(self, m: int) -> ExteriorElement:
        sp, pair = self.space, self.pair
        n = pair.dim_p
        unknowns = [(1 << i) | (1 << j) for i, j in combinations(range(n), 2)]
        x = pair.r_basis[m]
        rhs: list = []
        # [w, c_y] = c_{[x, y]} for each p-basis y; rows indexed by (y, output mask)
        out_keys = Coordinates([])
        columns: list[dict] = [{} for _ in unknowns]
        for y in range(n):
            cy = sp.gen(y)
            for u, mask in enumerate(unknowns):
                w = ExteriorElement(sp, {mask: ONE})
                comm = w * cy - cy * w
                for k, c in comm.terms.items():
                    columns[u][out_keys.add((y, k))] = c
            target = sp.vector(pair.coords("p", pair.g.bracket(x, pair.p_basis[y])))
            for k, c in target.terms.items():
                rhs.append((out_keys.add((y, k)), c))
        nrows = len(out_keys.keys)
        b = {i: c for i, c in rhs}
        if not unknowns:
            if b:
                raise NoSolution("alpha: no solution")
            return sp.zero()
        mat = SparseMatrix.from_columns(columns, nrows)
        sol = solve(mat, b)
        return ExteriorElement(sp, {unknowns[i]: c for i, c in sol.items()})

    def alpha(self, x: dict) -> ExteriorElement:
        """alpha(x) in Lambda^2(p) for x in r coordinates."""
        out = self.space.zero()
        for m, c in x.items():
            out = out + self._alpha_table[m].scale(c)
        return out

    def xi_gen(self, m: int) -> MixedElement:
        return self.A.u(self.pair.r_basis[m]) + self.A.c(self._alpha_table[m])

    def _xi_of_mono(self, mono: tuple) -> MixedElement:
        hit = self._xi_mono.get(mono)
        if hit is None:
            out = self.A.one()
            for m, e in enumerate(mono):
                for _ in range(e):
                    out = out * self.xi_gen(m)
            hit = self._xi_mono[mono] = out
        return hit

    def xi(self, u: PBWElement) -> MixedElement:
        """Algebra map U(r) -> U(g) (x) Cl(p), x -> x (x) 1 + 1 (x) alpha(x)."""
        if u.terms and u.degree() > self.cap:
            raise FiltrationOverflow(f"xi argument of degree {u.degree()} exceeds cap {self.cap}")
        out = self.A.zero()
        for mono, c in u.terms.items():
            out = out + self._xi_of_mono(mono).scale(c)
        return out

    # -- Casimirs and eta_R --------------------------------------------------

    def casimir(self) -> PBWElement:
        return casimir(self.U, self.pair.g_basis, self.pair.g_dual)

    def z_tensor_one(self, z: PBWElement) -> MixedElement:
        return self.A.tensor(z, None)

    def eta_R(self, z: PBWElement) -> PBWElement:
        """D_r o beta o D_g^{-1}, beta the algebra map induced by orthogonal projection g -> r."""
        if z.terms and z.degree() > DUFLO_WINDOW:
            raise UnsupportedDegree(f"eta_R implemented up to degree {DUFLO_WINDOW}")
        pair = self.pair
        Sg = SymAlgebra(pair.g.labels, pair.g)
        Sr = SymAlgebra(pair.r_algebra.labels, pair.r_algebra)
        s = duflo_inverse(z, Sg)
        return duflo(restrict_sym(pair, s, Sr), self.Ur)

    # -- homotopy ------------------------------------------------------------

    def solve_homotopy(self, z: PBWElement, max_cap: int, eta: PBWElement | None = None) -> "Homotopy":
        """Find odd r-invariant a with D a + a D = z (x) 1 - xi(z_r).

        With ``eta`` given, z_r = eta.  Otherwise z_r is an unknown in Z(r)
        up to degree deg z and is solved for jointly with a; the report says
        whether the z_r component is uniquely determined.
        """
        if max_cap + 1 > self.cap:
            raise FiltrationOverflow(f"homotopy search cap {max_cap} needs algebra cap {max_cap + 1}")
        odd, _ = self.invariant_slice(max_cap, parity=1)
        images = [self.d(a) for a in odd]
        lhs = self.z_tensor_one(z)
        if eta is not None:
            zr_basis = []
            lhs = lhs - self.xi(eta)
        else:
            zr_basis = invariants_basis(self.Ur, [{i: ONE} for i in range(self.pair.dim_r)],
                                        cap=max(z.degree(), 0))
        xis = [self.xi(w) for w in zr_basis]
        keys = self.A.basis(self.cap)
        coords = Coordinates(keys)
        cols = [coords.vector(y.terms) for y in images] + [coords.vector(y.terms) for y in xis]
        mat = SparseMatrix.from_columns(cols, len(keys))
        try:
            sol = solve(mat, coords.vector(lhs.terms))
        except NoSolution:
            raise NoSolution(f"no homotopy within U-filtration {max_cap}") from None
        a = self.A.zero()
        for i, c in sol.items():
            if i < len(odd):
                a = a + odd[i].scale(c)
        zr = self.Ur.zero() if eta is None else eta
        for i, c in sol.items():
            if i >= len(odd):
                zr = zr + zr_basis[i - len(odd)].scale(c)
        unique = True
        if zr_basis:
            ker = kernel(mat)
            unique = all(not any(i >= len(odd) for i in v) for v in ker.basis)
        residual = self.D * a + a * self.D - (lhs - self.xi(zr) if eta is None else lhs)
        return Homotopy(a=a, z_r=zr, unique=unique, residual=residual)

    # -- theorem-level checks ---------------------------------------------

    def verify_kernel_decomposition(self, N: int) -> "KernelReport":
        """Ker d = xi(Z(r)) + Im d on the filtration-N slice, windowed."""
        if N + 2 > self.cap:
            raise FiltrationOverflow(f"decomposition at N={N} needs cap {N + 2}")
        keys = self.A.basis(N + 2)
        coords = Coordinates(keys)
        dim = len(keys)

        def kernel_of(elements):
            cols = [coords.vector(self.d(x).terms) for x in elements]
            if not elements:
                return Subspace(dim, [])
            ker = kernel(SparseMatrix.from_columns(cols, dim))
            vecs = []
            for v in ker.basis:
                y: dict = {}
                for i, c in v.items():
                    vec_iadd(y, coords.vector(elements[i].terms), c)
                vecs.append(y)
            return Subspace(dim, vecs)

        inv_N, _ = self.invariant_slice(N)
        inv_N1, _ = self.invariant_slice(N + 1)
        inv_win, _ = self.invariant_slice(N - 1) if N >= 1 else ([], None)
        K = kernel_of(inv_N)
        K_win = kernel_of(inv_win)
        slice_N = Subspace(dim, [coords.vector({k: ONE}) for k in self.A.basis(N)])
        I = Subspace(dim, [coords.vector(self.d(x).terms) for x in inv_N1]) & slice_N
        zr = invariants_basis(self.Ur, [{i: ONE} for i in range(self.pair.dim_r)], cap=N)
        X = Subspace(dim, [coords.vector(self.xi(w).terms) for w in zr])
        return KernelReport(
            N=N,
            dim_K=K.dim, dim_I=I.dim, dim_X=X.dim, dim_K_window=K_win.dim,
            xi_in_kernel=X.is_subspace_of(K),
            xi_meets_image_trivially=(X & I).dim == 0,
            window_spanned=K_win.is_subspace_of(X + I),
            xi_injective=X.dim == len(zr),
        )


def restrict_sym(pair: QuadraticPair, s, Sr: SymAlgebra):
    """Algebra map S(g) -> S(r) induced by orthogonal projection g -> r."""
    images = [Sr.vec(pair.coords("r", {i: ONE})) for i in range(pair.g.dim)]
    out = Sr.zero()
    for mono, c in s.terms.items():
        t = Sr.one()
        for i, e in enumerate(mono):
            for _ in range(e):
                t = t * images[i]
        out = out + t.scale(c)
    return out


@dataclass
class Homotopy:
    a: MixedElement
    z_r: PBWElement
    unique: bool
    residual: MixedElement

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()

    @property
    def filtration(self) -> int:
        return self.a.u_degree()


@dataclass
class KernelReport:
    N: int
    dim_K: int
    dim_I: int
    dim_X: int
    dim_K_window: int
    xi_in_kernel: bool
    xi_meets_image_trivially: bool
    window_spanned: bool
    xi_injective: bool

    @property
    def ok(self) -> bool:
        return (self.xi_in_kernel and self.xi_meets_image_trivially
                and self.window_spanned and self.xi_injective)


@dataclass
class DiagramReport:
    """Checks that H_r(eta_R(z)) = beta(H_g(z)) on span{1, z}, where H is the
    inverse Duflo map, and that H_r is injective there (so eta_R is forced)."""

    commutes: bool
    forced: bool
    multiplicative: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.commutes and self.forced and self.multiplicative


def check_diagram(alg: DiracAlgebra, zs: list[PBWElement]) -> DiagramReport:
    pair = alg.pair
    Sg = SymAlgebra(pair.g.labels, pair.g)
    Sr = SymAlgebra(pair.r_algebra.labels, pair.r_algebra)
    commutes = True
    wit = {}
    for z in zs:
        eta = alg.eta_R(z)
        lhs = duflo_inverse(eta, Sr)
        rhs = restrict_sym(pair, duflo_inverse(z, Sg), Sr)
        commutes &= lhs == rhs
        wit[str(z)] = str(eta)
    # H_r is injective on U(r)^r up to the window: duflo is its two-sided inverse
    zr = invariants_basis(alg.Ur, [{i: ONE} for i in range(pair.dim_r)],
                          cap=min(DUFLO_WINDOW, alg.cap))
    monos = Coordinates(alg.Ur.monomials())
    images = [monos.vector(duflo_inverse(w, Sr).terms) for w in zr]
    forced = Subspace(len(monos.keys), images).dim == len(zr)
    multiplicative = True
    for z1 in zs:
        for z2 in zs:
            if z1.degree() + z2.degree() <= DUFLO_WINDOW and z1.degree() + z2.degree() <= alg.cap:
                multiplicative &= alg.eta_R(z1 * z2) == alg.eta_R(z1) * alg.eta_R(z2)
    return DiagramReport(commutes, forced, multiplicative, wit)
