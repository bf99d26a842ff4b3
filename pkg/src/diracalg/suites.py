"""Verification suites shared by the command line and the test-suite.

Each check returns a :class:`Check` record whose witnesses are exact strings,
so a report can be re-verified by substitution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .cliff import CliffordSpace, ExteriorElement, pair_space
from .dirac import DiracAlgebra, check_diagram
from .exactlin import ONE, Coordinates, NoSolution, Subspace, format_scalar
from .liealg import QuadraticPair
from .mixed import MixedElement
from .ncweil import (
    CartanModel, ExteriorSquare, NCWeil, NCWeilMap, PBWElement, WeilAlgebra, WeilMapF,
    basic_subspace, koszul_bdatum, p_to_g, popcount,
)
from .specrep import (
    DiracMatrix, NoCentralCharacter, spinor_module, verify_central_character,
)

SUITES = ("weil", "dirac", "theorem33", "theorem34")


@dataclass
class Check:
    name: str
    status: str
    witness: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status,
                "witness": {k: self.witness[k] for k in sorted(self.witness)}}


def _check(name: str, ok: bool, **witness) -> Check:
    return Check(name, "pass" if ok else "fail", {k: str(v) for k, v in witness.items()})


def _skip(name: str, reason: str) -> Check:
    return Check(name, "skipped", {"reason": reason})


# ---------------------------------------------------------------------------
# Clifford algebra


def clifford_checks(space: CliffordSpace, name: str) -> list[Check]:
    """x y + y x = <x, y> on generators and associativity on all monomial triples."""
    n = space.dim
    bad = None
    for a in range(n):
        for b in range(a, n):
            x, y = space.gen(a), space.gen(b)
            lhs = x * y + y * x
            if lhs != space.scalar(space.gram[a, b]):
                bad = bad or (space.labels[a], space.labels[b], str(lhs))
    out = [_check(f"clifford.relation.{name}", bad is None,
                  generators=n, counterexample=bad or "none")]
    bad = None
    masks = list(space.basis_masks())
    for a, b, c in itertools.product(masks, repeat=3):
        ab = space.odot_mono(a, b)
        lhs: dict = {}
        for k, x in ab.items():
            for k2, y in space.odot_mono(k, c).items():
                lhs[k2] = lhs.get(k2, 0) + x * y
        bc = space.odot_mono(b, c)
        rhs: dict = {}
        for k, x in bc.items():
            for k2, y in space.odot_mono(a, k).items():
                rhs[k2] = rhs.get(k2, 0) + x * y
        if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
            bad = (a, b, c)
            break
    out.append(_check(f"clifford.associativity.{name}", bad is None,
                      triples=len(masks) ** 3, counterexample=bad or "none"))
    return out


# ---------------------------------------------------------------------------
# Weil algebras


def gstar_checks_classical(pair: QuadraticPair, cap: int) -> list[Check]:
    W = WeilAlgebra.of_pair(pair, "g", cap)
    n = pair.g.dim
    lie = pair.g
    fails = {"L_i": None, "L_L": None, "i_d": None, "d2": None}
    for k in W.basis(cap - 1):
        x = W.element({k: ONE})
        dx = W.d(x)
        if sum(k[0]) <= cap - 2 and not W.d(dx).is_zero():
            fails["d2"] = fails["d2"] or str(x)
        Lx = [W.L({a: ONE}, x) for a in range(n)]
        ix = [W.i({a: ONE}, x) for a in range(n)]
        for a in range(n):
            if W.i({a: ONE}, dx) + W.d(ix[a]) != Lx[a]:
                fails["i_d"] = fails["i_d"] or f"a={lie.labels[a]}, x={x}"
            for b in range(n):
                ab = lie.bracket_basis(a, b)
                lhs = W.L({a: ONE}, ix[b]) - W.i({b: ONE}, Lx[a])
                if lhs != W.i(ab, x):
                    fails["L_i"] = fails["L_i"] or f"a={lie.labels[a]}, b={lie.labels[b]}, x={x}"
                if b <= a:
                    continue
                lhs = W.L({a: ONE}, Lx[b]) - W.L({b: ONE}, Lx[a])
                if lhs != W.L(ab, x):
                    fails["L_L"] = fails["L_L"] or f"a={lie.labels[a]}, b={lie.labels[b]}, x={x}"
    size = len(W.basis(cap - 1))
    return [
        _check("weil.classical.L_i", fails["L_i"] is None, spanning_set=size, counterexample=fails["L_i"] or "none"),
        _check("weil.classical.L_L", fails["L_L"] is None, spanning_set=size, counterexample=fails["L_L"] or "none"),
        _check("weil.classical.i_d", fails["i_d"] is None, spanning_set=size, counterexample=fails["i_d"] or "none"),
        _check("weil.classical.d_squared", fails["d2"] is None, counterexample=fails["d2"] or "none"),
    ]


def gstar_checks_nc(pair: QuadraticPair, cap: int) -> list[Check]:
    W = NCWeil(pair, cap)
    n = pair.g.dim
    lie = pair.g
    fails = {"L_i": None, "L_L": None, "i_d": None}
    keys = W.A.basis(cap - 1)
    for k in keys:
        x = MixedElement(W.A, {k: ONE})
        dx = W.d(x)
        Lx = [W.L({a: ONE}, x) for a in range(n)]
        ix = [W.i({a: ONE}, x) for a in range(n)]
        for a in range(n):
            if W.i({a: ONE}, dx) + W.d(ix[a]) != Lx[a]:
                fails["i_d"] = fails["i_d"] or f"a={lie.labels[a]}, x={x}"
            for b in range(n):
                ab = lie.bracket_basis(a, b)
                lhs = W.L({a: ONE}, ix[b]) - W.i({b: ONE}, Lx[a])
                if lhs != W.i(ab, x):
                    fails["L_i"] = fails["L_i"] or f"a={lie.labels[a]}, b={lie.labels[b]}, x={x}"
                if b <= a:
                    continue
                lhs = W.L({a: ONE}, Lx[b]) - W.L({b: ONE}, Lx[a])
                if lhs != W.L(ab, x):
                    fails["L_L"] = fails["L_L"] or f"a={lie.labels[a]}, b={lie.labels[b]}, x={x}"
    return [
        _check("weil.nc.L_i", fails["L_i"] is None, spanning_set=len(keys), counterexample=fails["L_i"] or "none"),
        _check("weil.nc.L_L", fails["L_L"] is None, spanning_set=len(keys), counterexample=fails["L_L"] or "none"),
        _check("weil.nc.i_d", fails["i_d"] is None, spanning_set=len(keys), counterexample=fails["i_d"] or "none"),
    ]


def differential_checks(pair: QuadraticPair, explicit_cap: int, square_cap: int,
                        space: CliffordSpace | None = None) -> list[Check]:
    """ad D against the four-term formula, and d^2 = 0 with headroom."""
    W = NCWeil(pair, explicit_cap + 1, space=space)
    keys = W.A.basis(explicit_cap)
    bad = None
    for k in keys:
        x = MixedElement(W.A, {k: ONE})
        if W.d(x) != W.d_explicit(x):
            bad = str(x)
            break
    out = [_check("weil.nc.explicit_formula", bad is None, spanning_set=len(keys),
                  D=W.D, counterexample=bad or "none")]
    W2 = NCWeil(pair, square_cap, space=space)
    bad = None
    keys2 = W2.A.basis(square_cap - 2)
    for k in keys2:
        x = MixedElement(W2.A, {k: ONE})
        if not W2.d(W2.d(x)).is_zero():
            bad = str(x)
            break
    out.append(_check("weil.nc.d_squared", bad is None, spanning_set=len(keys2),
                      cap=square_cap, counterexample=bad or "none"))
    inv = all(W.L({a: ONE}, W.D).is_zero() for a in range(pair.g.dim))
    out.append(_check("weil.nc.D_invariant", inv, D=W.D))
    return out


def cartan_model_checks(pair: QuadraticPair, cap: int) -> list[Check]:
    B = koszul_bdatum(pair)
    M = CartanModel(pair, B, cap + 2)
    out = []
    inv_s = M.invariant_keys_basis(cap, "S")
    ok = all(not M.d_commutative(M.d_commutative(x)) for x in inv_s)
    out.append(_check("weil.cartan.commutative_d_squared", ok, invariants=len(inv_s)))
    inv_u = M.invariant_keys_basis(cap, "U")
    ok = all(not M.d_noncommutative(M.d_noncommutative(x)) for x in inv_u)
    out.append(_check("weil.cartan.nc_d_squared", ok, invariants=len(inv_u)))
    # d_G is an odd derivation of the odot product on invariants
    hom = []
    for x in inv_u:
        for p in (0, 1):
            y = {k: c for k, c in x.items() if B.parity[k[1]] == p}
            if y:
                hom.append((y, p))
    bad = None
    for (x, px), (y, _) in itertools.product(hom, repeat=2):
        dx = max(sum(m) for m, _ in x)
        dy = max(sum(m) for m, _ in y)
        if dx + dy + 1 > cap + 2:
            continue
        lhs = M.d_noncommutative(M.odot(x, y))
        rhs = M.odot(M.d_noncommutative(x), y)
        for k, c in M.odot(x, M.d_noncommutative(y)).items():
            rhs[k] = rhs.get(k, 0) + (-c if px else c)
        if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
            bad = (str(x), str(y))
            break
    out.append(_check("weil.cartan.nc_derivation", bad is None, counterexample=bad or "none"))
    return out


def map_checks(pair: QuadraticPair, cap: int = 3) -> list[Check]:
    out = []
    F = WeilMapF(pair, cap)
    Wr, Wg = F.Wr, F.Wg
    gens = [Wr.e({m: ONE}) for m in range(pair.dim_r)] + [Wr.s({m: ONE}) for m in range(pair.dim_r)]
    ok = all(F(Wr.d(y)) == Wg.d(F(y)) for y in gens)
    ok &= all(F(Wr.i({a: ONE}, y)) == Wg.i(pair.r_basis[a], F(y)) for y in gens for a in range(pair.dim_r))
    ok &= all(F(Wr.L({a: ONE}, y)) == Wg.L(pair.r_basis[a], F(y)) for y in gens for a in range(pair.dim_r))
    out.append(_check("weil.map_F", ok, generators=len(gens)))
    G = NCWeilMap(pair, cap)
    Ar = G.Wr.A
    gens = [Ar.u({m: ONE}) for m in range(pair.dim_r)] + [Ar.c({m: ONE}) for m in range(pair.dim_r)]
    ok = all(G(G.Wr.d(y)) == G.Wg.d(G(y)) for y in gens)
    ok &= all(G(G.Wr.i({a: ONE}, y)) == G.Wg.i(pair.r_basis[a], G(y)) for y in gens for a in range(pair.dim_r))
    ok &= all(G(G.Wr.L({a: ONE}, y)) == G.Wg.L(pair.r_basis[a], G(y)) for y in gens for a in range(pair.dim_r))
    out.append(_check("weil.map_F_nc", ok, generators=len(gens)))
    Ur = G.dirac.Ur
    ok = all(G(Ar.tensor(Ur.element({m: ONE}), None)) == G.xi_image(Ur.element({m: ONE}))
             for m in Ur.monomials(min(2, cap)))
    out.append(_check("weil.map_F_nc_restricts_to_xi", ok))
    return out


def basic_subspace_check(pair: QuadraticPair, cap: int) -> Check:
    W = NCWeil(pair, cap + 1)
    B, keys = basic_subspace(W, pair.r_basis, cap)
    coords = Coordinates(keys)
    dalg = DiracAlgebra(pair, cap + 1)
    inv, _ = dalg.invariant_slice(cap)
    vecs = []
    for x in inv:
        y = W.A.zero()
        for (m, k), c in x.terms.items():
            y = y + W.A.tensor(PBWElement(W.U, {m: c}),
                               p_to_g(pair, ExteriorElement(dalg.space, {k: ONE})))
        vecs.append(coords.vector(y.terms))
    S = Subspace(len(keys), vecs)
    return _check("weil.basic_subspace", B == S, dim_basic=B.dim, dim_invariant_slice=S.dim)


def flip_checks(pair: QuadraticPair) -> list[Check]:
    X = ExteriorSquare(pair_space(pair, "g"))
    hor, coords = X.horizontal()
    gen, _ = X.generated_by_differences()
    bad = None
    # hor is graded, so test the flip on every homogeneous component of a basis
    for v in hor.basis:
        x = coords.terms(v)
        for n in {popcount(a) + popcount(b) for a, b in x}:
            xn = {k: c for k, c in x.items() if popcount(k[0]) + popcount(k[1]) == n}
            want = {k: (c if n % 2 == 0 else -c) for k, c in xn.items()}
            if X.flip(xn) != want:
                bad = n
    return [
        _check("weil.flip_sign", bad is None, dim_horizontal=hor.dim, counterexample=bad or "none"),
        _check("weil.horizontal_generated", hor == gen, dim_horizontal=hor.dim, dim_generated=gen.dim),
    ]


def weil_suite(pair: QuadraticPair, cap: int) -> list[Check]:
    out = clifford_checks(pair_space(pair, "g"), "g") + clifford_checks(pair_space(pair, "p"), "p")
    out += gstar_checks_classical(pair, cap)
    out += gstar_checks_nc(pair, cap)
    out += differential_checks(pair, max(cap - 1, 1), cap + 1)
    out += cartan_model_checks(pair, min(cap, 2))
    if pair.dim_r:
        out += map_checks(pair, cap)
    out.append(basic_subspace_check(pair, min(cap, 2)))
    if pair.g.dim <= 4:
        out += flip_checks(pair)
    else:
        out.append(_skip("weil.flip_sign", "exhaustive check limited to dim g <= 4"))
    return out


# ---------------------------------------------------------------------------
# Dirac algebra and spinors


def dirac_algebra_checks(pair: QuadraticPair, cap: int) -> list[Check]:
    alg = DiracAlgebra(pair, max(cap, 2))
    A, sp = alg.A, alg.space
    out = [_check("dirac.D_invariant", alg.is_r_invariant(alg.D), D=alg.D, gamma_p=alg.gamma_p)]
    # defining property of alpha and the homomorphism law
    bad = None
    for m in range(pair.dim_r):
        a = alg.alpha({m: ONE})
        for y in range(pair.dim_p):
            cy = sp.gen(y)
            target = sp.vector(pair.coords("p", pair.g.bracket(pair.r_basis[m], pair.p_basis[y])))
            if a * cy - cy * a != target:
                bad = (pair.r_labels[m], pair.p_labels[y])
    out.append(_check("dirac.alpha_defining", bad is None,
                      alpha={pair.r_labels[m]: str(alg.alpha({m: ONE})) for m in range(pair.dim_r)},
                      counterexample=bad or "none"))
    bad = None
    for m1, m2 in itertools.product(range(pair.dim_r), repeat=2):
        br = pair.coords("r", pair.g.bracket(pair.r_basis[m1], pair.r_basis[m2]))
        lhs = alg.alpha(br)
        rhs = alg.alpha({m2: ONE}).derivation(pair.ad_r_on_p(m1))
        if lhs != rhs:
            bad = (pair.r_labels[m1], pair.r_labels[m2])
    out.append(_check("dirac.alpha_homomorphism", bad is None, counterexample=bad or "none"))
    # xi multiplicative on degree-2 monomials, injective on the slice
    Ur = alg.Ur
    bad = None
    for a, b in itertools.product(range(pair.dim_r), repeat=2):
        ua, ub = Ur.gen(a), Ur.gen(b)
        if alg.xi(ua * ub) != alg.xi(ua) * alg.xi(ub):
            bad = (pair.r_labels[a], pair.r_labels[b])
    out.append(_check("dirac.xi_multiplicative", bad is None, counterexample=bad or "none"))
    monos = Ur.monomials(2)
    keys = Coordinates(A.basis(2))
    img = Subspace(len(keys), [keys.vector(alg.xi(Ur.element({m: ONE})).terms) for m in monos])
    out.append(_check("dirac.xi_injective", img.dim == len(monos), slice=len(monos), rank=img.dim))
    # d^2 = 0, d xi = 0, d(Omega) = 0, and x.a = [xi(x), a]
    # (D^p)^2 is not central, but it commutes with the r-invariants
    bad = None
    inv, _ = alg.invariant_slice(alg.cap - 2)
    for x in inv:
        if not alg.d(alg.d(x)).is_zero():
            bad = str(x)
            break
    out.append(_check("dirac.d_squared", bad is None, invariants=len(inv), counterexample=bad or "none"))
    ok = all(alg.d(alg.xi(Ur.element({m: ONE}))).is_zero() for m in Ur.monomials(alg.cap - 1))
    out.append(_check("dirac.d_kills_xi", ok))
    om = alg.casimir()
    out.append(_check("dirac.d_kills_center", alg.d(alg.z_tensor_one(om)).is_zero(), Omega=om))
    bad = None
    for m in range(pair.dim_r):
        X = alg.xi_gen(m)
        for k in A.basis(alg.cap - 1):
            x = MixedElement(A, {k: ONE})
            if alg.L(m, x) != X * x - x * X:
                bad = (pair.r_labels[m], str(x))
                break
    out.append(_check("dirac.xi_implements_action", bad is None, counterexample=bad or "none"))
    return out


def spinor_checks(pair: QuadraticPair, modules: dict, field) -> list[Check]:
    out = []
    S = spinor_module(pair, field)
    out.append(_check("dirac.spinor_relations", S.check_relations(), dim=S.dim, field=S.field.name))
    full = 1 << pair.dim_p
    if pair.dim_p % 2 == 0:
        out.append(_check("dirac.spinor_simple", S.image_dimension() == full == S.dim ** 2,
                          image=S.image_dimension()))
    for name in sorted(modules):
        D = DiracMatrix(pair, modules[name], S)
        out.append(_check(f"dirac.matrix_commutes_xi.{name}", D.commutes_with_xi(), size=D.size))
    return out


def dirac_suite(pair: QuadraticPair, modules: dict, cap: int, field) -> list[Check]:
    return dirac_algebra_checks(pair, cap) + spinor_checks(pair, modules, field)


# ---------------------------------------------------------------------------
# theorem-level checks


def theorem33_suite(pair: QuadraticPair, N: int) -> list[Check]:
    alg = DiracAlgebra(pair, N + 2)
    r = alg.verify_kernel_decomposition(N)
    w = dict(N=N, dim_kernel=r.dim_K, dim_image=r.dim_I, dim_xi=r.dim_X, dim_kernel_window=r.dim_K_window)
    return [
        _check("theorem33.xi_in_kernel", r.xi_in_kernel, **w),
        _check("theorem33.xi_meets_image_trivially", r.xi_meets_image_trivially, **w),
        _check("theorem33.window_spanned", r.window_spanned, **w),
        _check("theorem33.xi_injective", r.xi_injective, **w),
    ]


def theorem34_suite(pair: QuadraticPair, modules: dict, max_filtration: int, field) -> list[Check]:
    alg = DiracAlgebra(pair, max(max_filtration + 1, 2))
    om = alg.casimir()
    eta = alg.eta_R(om)
    out = []
    try:
        h = alg.solve_homotopy(om, max_filtration)
        out.append(_check("theorem34.homotopy_agrees", h.ok and h.unique and h.z_r == eta,
                          eta_duflo=eta, eta_homotopy=h.z_r, unique=h.unique,
                          a_z=h.a, filtration=h.filtration, residual=h.residual))
    except NoSolution as err:
        out.append(_check("theorem34.homotopy_agrees", False, eta_duflo=eta, error=err))
    diag = check_diagram(alg, [alg.U.one(), om])
    out.append(_check("theorem34.diagram_commutes", diag.commutes, **diag.witnesses))
    out.append(_check("theorem34.eta_forced", diag.forced))
    out.append(_check("theorem34.eta_multiplicative", diag.multiplicative))
    if modules:
        S = spinor_module(pair, field)
        for name in sorted(modules):
            D = DiracMatrix(pair, modules[name], S)
            try:
                rep = verify_central_character(D, om)
            except NoCentralCharacter as err:
                out.append(_skip(f"theorem34.central_character.{name}", str(err)))
                continue
            out.append(_check(f"theorem34.central_character.{name}", rep.holds,
                              chi=format_scalar(rep.chi), dim_H=rep.dim_H, eta=rep.eta))
    return out


def run_suites(pair: QuadraticPair, modules: dict, suite: str, cap: int, field) -> list[Check]:
    names = SUITES if suite == "all" else (suite,)
    out: list[Check] = []
    for s in names:
        if s == "weil":
            out += weil_suite(pair, cap)
        elif s == "dirac":
            out += dirac_suite(pair, modules, cap, field)
        elif s == "theorem33":
            out += theorem33_suite(pair, max(cap - 1, 1))
        elif s == "theorem34":
            out += theorem34_suite(pair, modules, 2, field)
        else:
            raise ValueError(f"unknown suite {s!r}")
    return sorted(out, key=lambda c: c.name)
