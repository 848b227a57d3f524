"""pp formulas, pp-pairs and the approximations rho, sigma, mu, nu.

A pp-n-formula is the data (h_free, h_bound) with

    phi(M) = { x in M^n : exists y in M^m, h_free x + h_bound y = 0 }.

Its free realisation is C = R^(n+m) modulo the rows of [h_free | h_bound],
with c the images of the first n generators; Hom(C, M) -> M^n, f -> f(c),
has image phi(M).  Every lattice and functor operation below is computed
from that module, so no set-level enumeration is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from . import fpfun, fpmod
from .errors import ConsistencyError, InputError, UnsupportedRingError
from .fpfun import FpFunctor
from .fpmod import FpModule, ModuleElement, ModuleMorphism
from .linalg import Matrix, Ring

SIDES = ("left", "right")


@dataclass(frozen=True)
class PpFormula:
    ring: Ring
    side: str
    n: int
    m: int
    h_free: Matrix
    h_bound: Matrix

    def __post_init__(self):
        if self.side not in SIDES:
            raise InputError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.n < 1:
            raise InputError("a pp formula needs at least one free variable")
        if self.m < 0:
            raise InputError("negative number of bound variables")
        hf, hb = self.h_free, self.h_bound
        if hf.ring != self.ring or hb.ring != self.ring:
            raise InputError("formula matrices over the wrong ring")
        if hf.cols != self.n or hb.cols != self.m or hf.rows != hb.rows:
            raise InputError(f"matrix shapes {hf.rows}x{hf.cols}, {hb.rows}x{hb.cols} "
                             f"do not fit n={self.n}, m={self.m}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_rows(cls, ring: Ring, n: int, m: int, rows: Sequence[Sequence[int]],
                  side: str = "left") -> PpFormula:
        """Each row lists the coefficients of x1..xn then y1..ym."""
        for r in rows:
            if len(r) != n + m:
                raise InputError(f"equation has {len(r)} coefficients, expected {n + m}")
        hf = Matrix(ring, len(rows), n, [list(r[:n]) for r in rows])
        hb = Matrix(ring, len(rows), m, [list(r[n:]) for r in rows])
        return cls(ring, side, n, m, hf, hb)

    @classmethod
    def top(cls, ring: Ring, n: int = 1, side: str = "left") -> PpFormula:
        """x = x: no equations."""
        return cls.from_rows(ring, n, 0, [], side)

    @classmethod
    def bottom(cls, ring: Ring, n: int = 1, side: str = "left") -> PpFormula:
        """x = 0."""
        return cls.from_rows(ring, n, 0, [[int(i == j) for j in range(n)] for i in range(n)], side)

    @classmethod
    def divisible(cls, ring: Ring, d: int, side: str = "left") -> PpFormula:
        """d | x, that is exists y (x - d y = 0)."""
        return cls.from_rows(ring, 1, 1, [[1, -d]], side)

    @classmethod
    def torsion(cls, ring: Ring, d: int, side: str = "left") -> PpFormula:
        """d x = 0."""
        return cls.from_rows(ring, 1, 0, [[d]], side)

    # -- shape --------------------------------------------------------------

    @property
    def l(self) -> int:
        return self.h_free.rows

    @property
    def matrix(self) -> Matrix:
        """[h_free | h_bound]."""
        return self.h_free.hstack(self.h_bound)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.matrix.entries]

    def normalized(self) -> PpFormula:
        """Drop equations that are identically zero and bound variables never used."""
        rows = [r for r in self.rows() if any(r)]
        used = [j for j in range(self.m) if any(r[self.n + j] for r in rows)]
        rows = [r[: self.n] + [r[self.n + j] for j in used] for r in rows]
        return PpFormula.from_rows(self.ring, self.n, len(used), rows, self.side)

    def with_side(self, side: str) -> PpFormula:
        return PpFormula(self.ring, side, self.n, self.m, self.h_free, self.h_bound)

    def __str__(self):
        from .dsl import format_pp
        return format_pp(self)

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "side": self.side, "n": self.n, "m": self.m,
                "h_free": self.h_free.to_json(), "h_bound": self.h_bound.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> PpFormula:
        try:
            ring = Ring.from_json(data["ring"])
            hf, hb = Matrix.from_json(data["h_free"]), Matrix.from_json(data["h_bound"])
            return cls(ring, data.get("side", "left"), int(data["n"]), int(data["m"]), hf, hb)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad formula JSON: {exc}") from None


@dataclass(frozen=True)
class FreeRealisation:
    c_module: FpModule
    c_tuple: tuple[ModuleElement, ...]


@dataclass(frozen=True)
class PpPair:
    """phi / psi with psi <= phi."""

    top: PpFormula
    bottom: PpFormula

    def __post_init__(self):
        if not leq(self.bottom, self.top):
            raise InputError("the bottom formula does not imply the top formula")

    @property
    def ring(self) -> Ring:
        return self.top.ring

    @property
    def n(self) -> int:
        return self.top.n

    def to_json(self) -> dict:
        return {"top": self.top.to_json(), "bottom": self.bottom.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> PpPair:
        try:
            return cls(PpFormula.from_json(data["top"]), PpFormula.from_json(data["bottom"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad pair JSON: {exc}") from None


def _compatible(phi: PpFormula, psi: PpFormula):
    if phi.ring != psi.ring:
        raise InputError("formulas over different rings")
    if phi.side != psi.side:
        raise InputError("formulas for modules on different sides")
    if phi.n != psi.n:
        raise InputError(f"arity mismatch: {phi.n} and {psi.n}")


# ---------------------------------------------------------------------------
# semantics


@lru_cache(maxsize=4096)
def power(M: FpModule, k: int) -> FpModule:
    """M^k, with the coordinates of the i-th copy at positions i*g .. i*g+g-1."""
    return fpmod.direct_sum([M] * k, M.ring)[0]


def _kron(H: Matrix, g: int) -> Matrix:
    """H tensor I_g: the action of H on tuples of elements of a g-generated module."""
    rows = []
    for r in H.entries:
        for a in range(g):
            rows.append([r[j] if a == b else 0 for j in range(H.cols) for b in range(g)])
    return Matrix(H.ring, H.rows * g, H.cols * g, rows)


def _equations(phi: PpFormula, M: FpModule) -> ModuleMorphism:
    """M^(n+m) -> M^l, (x, y) -> h_free x + h_bound y."""
    return ModuleMorphism(power(M, phi.n + phi.m), power(M, phi.l),
                          _kron(phi.matrix, M.gens), check=False)


def solution_set(phi: PpFormula, M: FpModule) -> tuple[FpModule, ModuleMorphism]:
    """phi(M) with its inclusion into M^n."""
    if M.ring != phi.ring:
        raise InputError("ring mismatch in evaluation")
    K, k = fpmod.kernel(_equations(phi, M))
    g = M.gens
    P = power(M, phi.n + phi.m)
    proj = ModuleMorphism(P, power(M, phi.n),
                          Matrix(phi.ring, phi.n * g, P.gens,
                                 [[int(i == j) for j in range(P.gens)] for i in range(phi.n * g)]),
                          check=False)
    return fpmod.image(proj @ k)


def witness(phi: PpFormula, M: FpModule, x: Sequence[int]) -> list[int] | None:
    """Coordinates of some y in M^m with h_free x + h_bound y = 0, or None.

    x is a vector of M^n coordinates (n blocks of M.gens entries).
    """
    g = M.gens
    if len(x) != phi.n * g:
        raise InputError(f"tuple has {len(x)} coordinates, expected {phi.n * g}")
    hb = ModuleMorphism(power(M, phi.m), power(M, phi.l), _kron(phi.h_bound, g), check=False)
    t = [-v for v in _apply(_kron(phi.h_free, g), x)]
    return hb.preimage(t)


def _apply(A: Matrix, x: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) for row in A.entries]


def satisfies(phi: PpFormula, M: FpModule, xs: Sequence[ModuleElement]) -> bool:
    """Whether the tuple xs lies in phi(M)."""
    if len(xs) != phi.n:
        raise InputError(f"tuple of length {len(xs)} for a {phi.n}-formula")
    vec = [c for e in xs for c in e.coords]
    return witness(phi, M, vec) is not None


def solution_elements(phi: PpFormula, M: FpModule) -> set[tuple[int, ...]]:
    """phi(M) as a set of canonical M^n coordinate vectors (finite M only)."""
    S, incl = solution_set(phi, M)
    Mn = power(M, phi.n)
    return {Mn.canonical(incl.apply_vec(e.coords)) for e in S.elements()}


@lru_cache(maxsize=4096)
def free_realisation(phi: PpFormula) -> FreeRealisation:
    C = FpModule.from_relations(phi.ring, phi.n + phi.m, phi.rows())
    return FreeRealisation(C, tuple(C.generator(i) for i in range(phi.n)))


def subfunctor_to_pp(E: FpModule, e: Sequence[ModuleElement], side: str = "left") -> PpFormula:
    """The formula freely realised by (E, e).

    Bound variables are the generators of E; the equations say that they
    satisfy the relations of E and that x_i is the coordinate expression of e_i.
    """
    n, g = len(e), E.gens
    for x in e:
        if x.module != E:
            raise InputError("tuple element not in the module")
    rows = [[int(i == j) for j in range(n)] + [-c for c in e[i].coords] for i in range(n)]
    rows += [[0] * n + list(r) for r in E.relations.column_list()]
    return PpFormula.from_rows(E.ring, n, g, rows, side)


def leq(phi: PpFormula, psi: PpFormula) -> bool:
    """phi <= psi: the realising tuple of phi satisfies psi."""
    _compatible(phi, psi)
    real = free_realisation(phi)
    return satisfies(psi, real.c_module, real.c_tuple)


def equivalent(phi: PpFormula, psi: PpFormula) -> bool:
    return leq(phi, psi) and leq(psi, phi)


def meet(phi: PpFormula, psi: PpFormula) -> PpFormula:
    """Conjunction with disjoint bound variables."""
    _compatible(phi, psi)
    hf = phi.h_free.vstack(psi.h_free)
    hb = phi.h_bound.block_diag(psi.h_bound)
    return PpFormula(phi.ring, phi.side, phi.n, phi.m + psi.m, hf, hb)


def join(phi: PpFormula, psi: PpFormula) -> PpFormula:
    """Sum: x = x' + x'' with x' in phi and x'' in psi.

    Bound variables are (x', y_phi, y_psi); x'' is eliminated as x - x'.
    """
    _compatible(phi, psi)
    ring, n = phi.ring, phi.n
    zf = Matrix.zero(ring, phi.l, n)
    hf = zf.vstack(psi.h_free)
    upper = phi.h_free.hstack(phi.h_bound, Matrix.zero(ring, phi.l, psi.m))
    lower = (-psi.h_free).hstack(Matrix.zero(ring, psi.l, phi.m), psi.h_bound)
    return PpFormula(ring, phi.side, n, n + phi.m + psi.m, hf, upper.vstack(lower))


def dual(phi: PpFormula) -> PpFormula:
    """Elementary dual: a = h_free^T z and h_bound^T z = 0 for some z.

    With (C, c) the free realisation, this is the set of a with a (x) c = 0.
    """
    ring, n, l = phi.ring, phi.n, phi.l
    hf = Matrix.identity(ring, n).vstack(Matrix.zero(ring, phi.m, n))
    hb = (-phi.h_free.transpose()).vstack(phi.h_bound.transpose())
    other = "right" if phi.side == "left" else "left"
    return PpFormula(ring, other, n, l, hf, hb)


# ---------------------------------------------------------------------------
# functors


def pp_to_functor(phi: PpFormula) -> FpFunctor:
    """phi as the covariant functor presented by C -> C/<c>."""
    real = free_realisation(phi)
    _, q = fpmod.cokernel(fpmod.tuple_map(real.c_module, real.c_tuple))
    return FpFunctor("co", q)


def connecting_map(p: PpPair) -> ModuleMorphism:
    """u: C -> D with u(c) = d for realisations (C, c) of phi and (D, d) of psi."""
    phi, psi = p.top, p.bottom
    C, D = free_realisation(phi).c_module, free_realisation(psi).c_module
    g = D.gens
    # d_i is the i-th generator of D, in block i of D^n
    d = [int(k % g == k // g) for k in range(phi.n * g)]
    y = witness(phi, D, d)
    if y is None:
        raise ConsistencyError("psi <= phi but no connecting map exists")
    cols = [[int(a == i) for a in range(g)] for i in range(phi.n)]
    cols += [y[j * g:(j + 1) * g] for j in range(phi.m)]
    return ModuleMorphism(C, D, Matrix.from_columns(phi.ring, cols, g))


def pair_to_functor(p: PpPair) -> FpFunctor:
    """phi/psi as the covariant functor presented by (u, q): C -> D (+) C/<c>."""
    real = free_realisation(p.top)
    C = real.c_module
    u = connecting_map(p)
    Q, q = fpmod.cokernel(fpmod.tuple_map(C, real.c_tuple))
    S, _, _ = fpmod.direct_sum([u.target, Q], p.ring)
    return FpFunctor("co", ModuleMorphism(C, S, u.matrix.vstack(q.matrix)))


def _quotient_of_submodules(small: ModuleMorphism, big: ModuleMorphism) -> FpModule:
    """big / small for two inclusions into the same module with im small within im big."""
    j = fpmod.factor_through(small, big)
    if j is None:
        raise ConsistencyError("submodules are not nested")
    return fpmod.cokernel(j)[0]


DEFECT_METHODS = ("functor", "duality", "ann", "elements")


def defect_pair(p: PpPair, method: str = "all") -> FpModule:
    """w(phi/psi) by one of four independent routes, or all of them compared."""
    if method == "all":
        values = {m: defect_pair(p, m) for m in DEFECT_METHODS}
        first = values["functor"]
        for m, v in values.items():
            if not v.is_isomorphic(first):
                raise ConsistencyError(
                    f"defect routes disagree: functor gives {first}, {m} gives {v}")
        return first
    phi, psi = p.top, p.bottom
    R = FpModule.free(p.ring, 1)
    if method == "functor":
        return fpfun.defect(pair_to_functor(p))
    if method == "duality":
        # (D psi)R / (D phi)R
        return _quotient_of_submodules(solution_set(dual(phi), R)[1], solution_set(dual(psi), R)[1])
    rc, rd = free_realisation(phi), free_realisation(psi)
    # A map C -> D sending c to d carries Ann(C, c) into Ann(D, d).
    ann_c = fpmod.ann(rc.c_module, rc.c_tuple)[1]
    ann_d = fpmod.ann(rd.c_module, rd.c_tuple)[1]
    if method == "ann":
        return _quotient_of_submodules(ann_c, ann_d)
    if method == "elements":
        # { r.c : r.d = 0 } inside C
        return fpmod.image(fpmod.tuple_map(rc.c_module, rc.c_tuple) @ ann_d)[0]
    raise InputError(f"unknown defect method {method!r}; choose from {DEFECT_METHODS + ('all',)}")


def agj_dual_pair(p: PpPair) -> PpPair:
    """(D psi) / (D phi)."""
    return PpPair(dual(p.bottom), dual(p.top))


def _realised_join(p: PpPair, gamma: ModuleMorphism) -> PpFormula:
    """psi + the formula realised by (target of gamma, gamma(c))."""
    real = free_realisation(p.top)
    chi = subfunctor_to_pp(gamma.target, [gamma(c) for c in real.c_tuple], p.top.side)
    return join(chi, p.bottom)


def sigma(p: PpPair) -> PpFormula:
    """Largest sigma between psi and phi agreeing with psi on injectives.

    sigma/psi is the subfunctor F_0 of F = phi/psi.
    """
    F = pair_to_functor(p)
    _, incl = fpfun.sub0(F)
    return _realised_join(p, incl.gamma)


def _require_artin(ring: Ring):
    if ring.modulus == 0:
        raise UnsupportedRingError("this operation needs finitely presented injective envelopes, "
                                   "which exist only over Z/n")


def rho(p: PpPair) -> PpFormula:
    """Smallest rho between psi and phi agreeing with phi on injectives.

    phi/rho is the quotient F^0 of F = phi/psi, so rho/psi is the image of
    the counit L_0(Y)(wF) -> F.
    """
    _require_artin(p.ring)
    F = pair_to_functor(p)
    return _realised_join(p, fpfun.counit(F).gamma)


def mu(p: PpPair) -> PpFormula:
    """Largest mu between psi and phi with mu(R) = psi(R)."""
    _require_artin(p.ring)
    return dual(rho(agj_dual_pair(p)))


def nu(p: PpPair) -> PpFormula:
    """Smallest nu between psi and phi with nu(R) = phi(R)."""
    return dual(sigma(agj_dual_pair(p)))


def _same_order(a: PpFormula, b: PpFormula, M: FpModule) -> bool:
    """For b <= a over a finite module: a(M) = b(M)."""
    return solution_set(a, M)[0].order() == solution_set(b, M)[0].order()


def calculus_check(p: PpPair) -> bool:
    """phi(R) = psi(R), decided both directly and through the duals on injectives."""
    _require_artin(p.ring)
    R = FpModule.free(p.ring, 1)
    direct = _same_order(p.top, p.bottom, R)
    dphi, dpsi = dual(p.top), dual(p.bottom)
    via_dual = all(_same_order(dpsi, dphi, I) for I in fpmod.indecomposable_injectives(p.ring))
    if direct != via_dual:
        raise ConsistencyError(f"phi(R) = psi(R) is {direct} but the dual test gives {via_dual}")
    return direct


def agrees_on_injectives(a: PpFormula, b: PpFormula) -> bool:
    """For b <= a over Z/n: a(I) = b(I) for every indecomposable injective I."""
    _require_artin(a.ring)
    return all(_same_order(a, b, I) for I in fpmod.indecomposable_injectives(a.ring))
