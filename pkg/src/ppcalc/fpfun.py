"""Finitely presented functors and the defect recollement.

A functor is given by one morphism ``pres: bottom -> top`` of its category
(mod-R for the contravariant flavour, (R-mod)^op for the covariant one) and
is the cokernel of Hom(-, bottom) -> Hom(-, top).  So

    F(M) = Hom(M, top) / pres . Hom(M, bottom)

in the category's own terms.  For a covariant functor with module map
f: A -> B this reads F(M) = Hom_R(A, M) / Hom_R(B, M) f.

Everything is decided at the presenting objects: by Yoneda, a natural
transformation out of F is zero iff its value on the class of id_top is
zero, which is one linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import fpmod
from .category import ModCategory, category_for
from .errors import ConsistencyError, DomainError, InputError
from .fpmod import FpModule, HomQuotient, ModuleElement, ModuleMorphism
from .linalg import Matrix, Ring


class FunctorValue:
    """F(M) as a module, with representatives in Hom(M, top)."""

    def __init__(self, quotient: HomQuotient):
        self._q = quotient
        self.group = quotient.module

    def cls(self, u) -> ModuleElement:
        return self._q.cls(u)

    def rep(self, coords) -> ModuleMorphism:
        return self._q.rep(coords)

    @property
    def generators(self):
        return self._q.generators


class FpFunctor:
    def __init__(self, variance: str, pres: ModuleMorphism):
        self.variance = variance
        self.pres = pres
        self.cat: ModCategory = category_for(variance, pres.ring)
        self._cache: dict = {}

    @property
    def ring(self) -> Ring:
        return self.pres.ring

    @property
    def top(self) -> FpModule:
        return self.cat.dst(self.pres)

    @property
    def bottom(self) -> FpModule:
        return self.cat.src(self.pres)

    def key(self):
        return (self.variance, self.pres.source, self.pres.target, self.pres.matrix)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, M: FpModule) -> FunctorValue:
        if M.ring != self.ring:
            raise InputError("ring mismatch in evaluation")
        hit = self._cache.get(M)
        if hit is None:
            cat = self.cat
            sub = [cat.compose(self.pres, h) for h in cat.hom(M, self.bottom).generators]
            hit = FunctorValue(HomQuotient(cat.hom(M, self.top), sub))
            self._cache[M] = hit
        return hit

    def __call__(self, M: FpModule) -> FpModule:
        return self.evaluate(M).group

    def induced_map(self, s) -> ModuleMorphism:
        """F(s): F(Y) -> F(X) for a morphism s: X -> Y of the category."""
        cat = self.cat
        FY, FX = self.evaluate(cat.dst(s)), self.evaluate(cat.src(s))
        cols = [FX.cls(cat.compose(u, s)).coords for u in FY.generators]
        return ModuleMorphism(FY.group, FX.group, Matrix.from_columns(self.ring, cols, FX.group.gens),
                              check=False)

    def at_module(self, s: ModuleMorphism) -> ModuleMorphism:
        """The map on values induced by a module map s (direction follows the variance)."""
        return self.induced_map(s)

    # -- simple invariants ----------------------------------------------------

    def is_zero(self) -> bool:
        # F = 0 iff the class of id_top vanishes in F(top), i.e. pres is split
        # epi (contravariant) or split mono (covariant).
        return self.cat.lift(self.cat.identity(self.top), self.pres) is not None

    def to_json(self) -> dict:
        return {"variance": self.variance, "pres": self.pres.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> FpFunctor:
        try:
            return cls(data["variance"], ModuleMorphism.from_json(data["pres"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad functor JSON: {exc}") from None

    def __repr__(self):
        return f"FpFunctor({self.variance}, {self.pres!r})"


class NatTrans:
    """A natural transformation F -> G given by gamma: top_F -> top_G.

    beta: bottom_F -> bottom_G with pres_G beta = gamma pres_F is found by a
    lift; its existence is exactly naturality.
    """

    def __init__(self, source: FpFunctor, target: FpFunctor, gamma, beta=None):
        if source.variance != target.variance or source.ring != target.ring:
            raise InputError("natural transformation between different functor kinds")
        cat = source.cat
        if cat.src(gamma) != source.top or cat.dst(gamma) != target.top:
            raise InputError("gamma does not connect the presenting objects")
        if beta is None:
            beta = cat.lift(cat.compose(gamma, source.pres), target.pres)
            if beta is None:
                raise InputError("gamma does not induce a natural transformation")
        elif not cat.compose(target.pres, beta).equals(cat.compose(gamma, source.pres)):
            raise InputError("square does not commute")
        self.source, self.target, self.gamma, self.beta = source, target, gamma, beta
        self.cat = cat

    def at(self, M: FpModule) -> ModuleMorphism:
        FM, GM = self.source.evaluate(M), self.target.evaluate(M)
        cols = [GM.cls(self.cat.compose(self.gamma, u)).coords for u in FM.generators]
        return ModuleMorphism(FM.group, GM.group, Matrix.from_columns(FM.group.ring, cols, GM.group.gens),
                              check=False)

    def is_zero(self) -> bool:
        return self.cat.lift(self.gamma, self.target.pres) is not None

    def after(self, other: NatTrans) -> NatTrans:
        """self . other"""
        return NatTrans(other.source, self.target, self.cat.compose(self.gamma, other.gamma))

    def is_iso(self) -> bool:
        return kernel_nat(self)[0].is_zero() and cokernel_nat(self)[0].is_zero()

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "gamma": self.gamma.to_json(), "beta": self.beta.to_json()}


def identity_nat(F: FpFunctor) -> NatTrans:
    return NatTrans(F, F, F.cat.identity(F.top), F.cat.identity(F.bottom))


# ---------------------------------------------------------------------------
# kernels, cokernels, images of natural transformations


class _Pullback:
    """a pa = b pb for a: X -> Z, b: Y -> Z, built as a kernel in X (+) Y."""

    def __init__(self, cat: ModCategory, a, b):
        self.cat = cat
        S, self.inj, proj = cat.direct_sum([cat.src(a), cat.src(b)])
        m = cat.sub(cat.compose(a, proj[0]), cat.compose(b, proj[1]))
        self.obj, self.k = cat.kernel(m)
        self.pa = cat.compose(proj[0], self.k)
        self.pb = cat.compose(proj[1], self.k)

    def factor(self, x, y):
        """The map into the pullback with components x and y."""
        cat = self.cat
        t = cat.add(cat.compose(self.inj[0], x), cat.compose(self.inj[1], y))
        u = cat.lift(t, self.k)
        if u is None:
            raise ConsistencyError("components do not agree on the pullback base")
        return u


def kernel_nat(alpha: NatTrans) -> tuple[FpFunctor, NatTrans]:
    F, G, cat = alpha.source, alpha.target, alpha.cat
    P = _Pullback(cat, alpha.gamma, G.pres)
    Q = _Pullback(cat, P.pa, F.pres)
    K = FpFunctor(F.variance, Q.pa)
    K._pullback = P
    return K, NatTrans(K, F, P.pa, Q.pb)


def cokernel_nat(alpha: NatTrans) -> tuple[FpFunctor, NatTrans]:
    G, cat = alpha.target, alpha.cat
    _, _, _, row = cat.row([G.pres, alpha.gamma], G.top)
    Q = FpFunctor(G.variance, row)
    return Q, NatTrans(G, Q, cat.identity(G.top))


def image_nat(alpha: NatTrans) -> tuple[FpFunctor, NatTrans, NatTrans]:
    F, G, cat = alpha.source, alpha.target, alpha.cat
    P = _Pullback(cat, alpha.gamma, G.pres)
    image = FpFunctor(F.variance, P.pa)
    return image, NatTrans(F, image, cat.identity(F.top)), NatTrans(image, G, alpha.gamma)


def factor_into_kernel(alpha: NatTrans, beta: NatTrans) -> tuple[FpFunctor, NatTrans, NatTrans]:
    """For beta alpha = 0: (ker beta, its inclusion, the factorisation of alpha)."""
    cat = alpha.cat
    K, incl = kernel_nat(beta)
    H = beta.target
    b = cat.lift(cat.compose(beta.gamma, alpha.gamma), H.pres)
    if b is None:
        raise InputError("composite of natural transformations is not zero")
    u = K._pullback.factor(alpha.gamma, b)
    return K, incl, NatTrans(alpha.source, K, u)


def homology_nat(alpha: NatTrans, beta: NatTrans) -> FpFunctor:
    """ker beta / im alpha."""
    _, _, lam = factor_into_kernel(alpha, beta)
    return cokernel_nat(lam)[0]


# ---------------------------------------------------------------------------
# the recollement


def representable(W: FpModule, variance: str) -> FpFunctor:
    """Y(W): Hom(-, W) on the functor's category."""
    cat = category_for(variance, W.ring)
    return FpFunctor(variance, cat.zero_map(cat.zero_object(), W))


def defect(F: FpFunctor) -> FpModule:
    """w F: coker(pres) contravariantly, ker(pres) covariantly."""
    return F.cat.cokernel(F.pres)[0]


def defect_map(alpha: NatTrans):
    """w(alpha): wF -> wG, the map induced on cokernels of the presentations."""
    cat = alpha.cat
    _, qF = cat.cokernel(alpha.source.pres)
    _, qG = cat.cokernel(alpha.target.pres)
    u = cat.colift(cat.compose(qG, alpha.gamma), qF)
    if u is None:
        raise ConsistencyError("natural transformation does not descend to defects")
    return u


def unit(F: FpFunctor) -> NatTrans:
    """F -> Y(wF)."""
    W, q = F.cat.cokernel(F.pres)
    return NatTrans(F, representable(W, F.variance), q)


def _l0y_data(W: FpModule, variance: str):
    cat = category_for(variance, W.ring)
    p0 = cat.cover(W)
    _, k = cat.kernel(p0)
    p1 = cat.cover(cat.src(k))
    return FpFunctor(variance, cat.compose(k, p1)), p0


def l0y(W: FpModule, variance: str = "contra") -> FpFunctor:
    """L_0(Y)(W), presented by a projective presentation of W in the category."""
    return _l0y_data(W, variance)[0]


def counit(F: FpFunctor) -> NatTrans:
    """L_0(Y)(wF) -> F."""
    cat = F.cat
    W, q = cat.cokernel(F.pres)
    L, p0 = _l0y_data(W, F.variance)
    gamma = cat.lift(p0, q)
    if gamma is None:
        raise ConsistencyError("cover does not lift through the defect projection")
    return NatTrans(L, F, gamma)


def sub0(F: FpFunctor) -> tuple[FpFunctor, NatTrans]:
    """F_0 = ker(F -> Y(wF)) with its inclusion."""
    return kernel_nat(unit(F))


def quot0(F: FpFunctor) -> tuple[FpFunctor, NatTrans]:
    """F^0 = coker(L_0(Y)(wF) -> F) with the projection."""
    return cokernel_nat(counit(F))


def norm_at(W: FpModule, variance: str = "contra") -> NatTrans:
    """The norm L_0(Y)(W) -> Y(W), the identity on projectives."""
    L, p0 = _l0y_data(W, variance)
    return NatTrans(L, representable(W, variance), p0)


def norm_image(W: FpModule, variance: str = "contra") -> FpFunctor:
    """Image of the norm: the functor of maps into W through projectives."""
    return image_nat(norm_at(W, variance))[0]


def stable_functor(X: FpModule, variance: str = "contra") -> FpFunctor:
    """Hom(-, X) modulo maps through projectives, presented by a cover of X."""
    cat = category_for(variance, X.ring)
    return FpFunctor(variance, cat.cover(X))


def stable_nat(f, variance: str = "contra") -> NatTrans:
    cat = category_for(variance, f.ring)
    return NatTrans(stable_functor(cat.src(f), variance), stable_functor(cat.dst(f), variance), f)


def completed(F: FpFunctor):
    """(A, f) with f: A -> bottom the kernel of pres in the category."""
    return F.cat.kernel(F.pres)


# ---------------------------------------------------------------------------
# membership tests


def in_fp0(F: FpFunctor) -> bool:
    return defect(F).is_zero()


def stably_split(F: FpFunctor) -> bool:
    """Whether pres is a split epimorphism modulo maps through projectives."""
    cat = F.cat
    C = F.top
    st = cat.stable_hom(C, C)
    images = [st.cls(cat.compose(F.pres, h)) for h in cat.hom(C, F.bottom).generators]
    inc = ModuleMorphism(FpModule.free(F.ring, len(images)), st.module,
                         Matrix.from_columns(F.ring, [e.coords for e in images], st.module.gens), check=False)
    return inc.preimage(st.cls(cat.identity(C)).coords) is not None


def derived_quot0(F: FpFunctor, i: int) -> FpFunctor:
    """L_i((-)^0)(F) as a functor, from the stable images of its resolution."""
    if i not in (0, 1, 2):
        raise InputError("derived degree must be 0, 1 or 2")
    _, f = completed(F)
    sf = stable_nat(f, F.variance)
    sg = stable_nat(F.pres, F.variance)
    if i == 0:
        return cokernel_nat(sg)[0]
    if i == 1:
        return homology_nat(sf, sg)
    return kernel_nat(sf)[0]


def derived_quot0_eval(F: FpFunctor, i: int, M: FpModule) -> FpModule:
    """L_i((-)^0)(F) at M, computed from stable Hom groups directly."""
    if i not in (0, 1, 2):
        raise InputError("derived degree must be 0, 1 or 2")
    cat = F.cat
    A, f = completed(F)
    g = F.pres
    B, C = F.bottom, F.top
    sA, sB, sC = cat.stable_hom(M, A), cat.stable_hom(M, B), cat.stable_hom(M, C)

    def post(s, src, dst):
        cols = [dst.cls(cat.compose(s, u)).coords for u in src.generators]
        return ModuleMorphism(src.module, dst.module, Matrix.from_columns(F.ring, cols, dst.module.gens),
                              check=False)

    mf, mg = post(f, sA, sB), post(g, sB, sC)
    if i == 0:
        return fpmod.cokernel(mg)[0]
    if i == 1:
        return fpmod.module_homology(mf, mg)
    return fpmod.kernel(mf)[0]


def in_fp_bang(F: FpFunctor) -> bool:
    """F^0 = 0 (pres stably split) and L_1((-)^0)(F) = 0 (stable weak kernel)."""
    return stably_split(F) and derived_quot0(F, 1).is_zero()


def counit_is_iso(F: FpFunctor) -> bool:
    """Whether F is of the form L_0(Y)(A), tested through its counit."""
    return counit(F).is_iso()


def in_fp_bangstar(F: FpFunctor) -> bool:
    return sub0(F)[0].is_zero() and quot0(F)[0].is_zero()


# ---------------------------------------------------------------------------
# Hom and Ext between functors


def hom_functors(F: FpFunctor, G: FpFunctor) -> FpModule:
    _check_pair(F, G)
    return fpmod.kernel(G.induced_map(F.pres))[0]


def ext_functors(i: int, F: FpFunctor, G: FpFunctor) -> FpModule:
    """Ext^i(F, G) from 0 -> Y(A) -> Y(B) -> Y(C) -> F -> 0."""
    _check_pair(F, G)
    if i not in (0, 1, 2):
        raise InputError("Ext degree must be 0, 1 or 2")
    _, f = completed(F)
    Gg, Gf = G.induced_map(F.pres), G.induced_map(f)
    if i == 0:
        return fpmod.kernel(Gg)[0]
    if i == 1:
        return fpmod.module_homology(Gg, Gf)
    return fpmod.cokernel(Gf)[0]


def _check_pair(F: FpFunctor, G: FpFunctor):
    if F.variance != G.variance or F.ring != G.ring:
        raise InputError("functors of different kinds")


# ---------------------------------------------------------------------------
# duality on fp_0 and the adjunction isomorphism


def w_dual_fp0(F: FpFunctor) -> FpFunctor:
    """Swap variance of a defect-zero functor along its completed exact sequence."""
    if not in_fp0(F):
        raise DomainError("functor has nonzero defect")
    _, k = completed(F)
    return FpFunctor("co" if F.variance == "contra" else "contra", k)


@dataclass
class AdjunctionIso:
    """(F, Y X) = {u: top -> X with u pres = 0}  ~  Hom(wF, X)."""

    forward: list   # Hom(wF, X) generators -> maps top -> X
    backward: list  # kernel generators -> Hom(wF, X)
    hom_module: FpModule
    nat_module: FpModule


def leftdef_iso(F: FpFunctor, X: FpModule) -> AdjunctionIso:
    """Mutually inverse maps between (F, Y X) and Hom(wF, X), checked on generators."""
    cat = F.cat
    W, q = cat.cokernel(F.pres)
    H = cat.hom(W, X)
    YX = representable(X, F.variance)
    K, k = fpmod.kernel(YX.induced_map(F.pres))
    val = YX.evaluate(F.top)
    fwd = [cat.compose(v, q) for v in H.generators]
    bwd = []
    for j in range(K.gens):
        u = val.rep(k.matrix.column(j))
        v = cat.colift(u, q)
        if v is None:
            raise ConsistencyError("element of (F, YX) does not factor through the defect")
        bwd.append(v)
    for v, u in zip(H.generators, fwd):
        back = cat.colift(u, q)
        if back is None or not back.equals(v):
            raise ConsistencyError("adjunction maps are not inverse")
        if not cat.compose(u, F.pres).is_zero():
            raise ConsistencyError("image does not kill the presentation")
    for j, v in enumerate(bwd):
        u = val.rep(k.matrix.column(j))
        if not cat.compose(v, q).equals(u):
            raise ConsistencyError("adjunction maps are not inverse")
    if not K.is_isomorphic(H.module):
        raise ConsistencyError("adjunction groups differ")
    return AdjunctionIso(fwd, bwd, H.module, K)


# ---------------------------------------------------------------------------
# the subfunctor F_0 evaluated through a cover, and the map into (P(-,A), F)


@dataclass
class PinCheck:
    quotient_order: int | None    # |F(A) / F_0(A)|
    hom_order: int | None         # |(P(-,A), F)|
    injective: bool               # the map F(A)/F_0(A) -> (P(-,A), F) is mono
    exact_hypothesis: bool        # F(A) -> F(P) -> F(Omega A) exact at F(P)


def pin_check(F: FpFunctor, A: FpModule) -> PinCheck:
    cat = F.cat
    p = cat.cover(A)
    _, k = cat.kernel(p)
    Fp, Fk = F.induced_map(p), F.induced_map(k)
    F0, incl = sub0(F)
    sub_image = fpmod.image(incl.at(A))[1]
    kernel_Fp = fpmod.kernel(Fp)[1]
    # F_0(A) must be exactly the kernel of F(p)
    same = _same_submodule(sub_image, kernel_Fp)
    if not same:
        raise ConsistencyError("F_0(A) differs from the kernel of F(cover)")
    I = norm_image(A, F.variance)
    if cat.dst(I.pres) != cat.src(p):
        raise ConsistencyError("norm image is not presented on the cover")
    # x -> F(p) x lands in (I, F) = ker F(pres_I) inside F(P)
    restrict = F.induced_map(I.pres)
    lands = (restrict @ Fp).is_zero()
    quotient = fpmod.cokernel(sub_image)[0]
    hom = hom_functors(I, F)
    exact = fpmod.module_homology(Fp, Fk).is_zero() if (Fk @ Fp).is_zero() else False
    return PinCheck(quotient.order(), hom.order(), lands, exact)


def _same_submodule(a: ModuleMorphism, b: ModuleMorphism) -> bool:
    """Whether two inclusions into one module have the same image."""
    if a.target != b.target:
        raise InputError("different ambient modules")
    for x, y in ((a, b), (b, a)):
        for j in range(x.source.gens):
            if y.preimage(x.matrix.column(j)) is None:
                return False
    return True


# ---------------------------------------------------------------------------
# projective replacement of a left exact sequence


@dataclass
class Replacement:
    """Chain maps and homotopies between A -> B -> C and K -> P1 -> P0."""

    projective: tuple        # (k, d) with k: K -> P1, d: P1 -> P0
    original: tuple          # (f, g)
    to_original: tuple       # (alpha, beta, gamma)  K->A, P1->B, P0->C
    from_original: tuple     # (alpha', beta', gamma')
    homotopy_projective: tuple  # (h0: P0->P1, h1: P1->K)
    homotopy_original: tuple    # (h0: C->B, h1: B->A)


def _inverse_nat(alpha: NatTrans) -> NatTrans:
    F, G, cat = alpha.source, alpha.target, alpha.cat
    _, _, proj, row = cat.row([alpha.gamma, G.pres], G.top)
    t = cat.lift(cat.identity(G.top), row)
    if t is None:
        raise DomainError("natural transformation is not invertible")
    return NatTrans(G, F, cat.compose(proj[0], t))


def projective_replacement(F: FpFunctor) -> Replacement:
    """For F in fp_!, relate its completed sequence to L_0(Y)(wF) up to homotopy."""
    cat = F.cat
    eps = counit(F)
    if not eps.is_iso():
        raise DomainError("functor is not of the form L_0(Y)(A)")
    inv = _inverse_nat(eps)
    L = eps.source
    d = L.pres
    K, k = completed(L)
    A, f = completed(F)
    g = F.pres
    gam, bet = eps.gamma, eps.beta
    alp = cat.lift(cat.compose(bet, k), f)
    gam2, bet2 = inv.gamma, inv.beta
    alp2 = cat.lift(cat.compose(bet2, f), k)
    if alp is None or alp2 is None:
        raise ConsistencyError("chain maps do not restrict to kernels")

    def htpy(top_obj, mid_obj, low_obj, pres, kin, c_top, c_mid, c_low):
        # homotopy from the identity to the given endomorphism of low -> mid -> top
        e0 = cat.sub(cat.identity(top_obj), c_top)
        h0 = cat.lift(e0, pres)
        if h0 is None:
            raise ConsistencyError("top component is not null-homotopic")
        e1 = cat.sub(cat.sub(cat.identity(mid_obj), c_mid), cat.compose(h0, pres))
        h1 = cat.lift(e1, kin)
        if h1 is None:
            raise ConsistencyError("middle component does not factor through the kernel")
        e2 = cat.sub(cat.identity(low_obj), c_low)
        if not e2.equals(cat.compose(h1, kin)):
            raise ConsistencyError("bottom homotopy identity fails")
        if not e0.equals(cat.compose(pres, h0)):
            raise ConsistencyError("top homotopy identity fails")
        return h0, h1

    hp = htpy(L.top, L.bottom, K, d, k, cat.compose(gam2, gam), cat.compose(bet2, bet), cat.compose(alp2, alp))
    ho = htpy(F.top, F.bottom, A, g, f, cat.compose(gam, gam2), cat.compose(bet, bet2), cat.compose(alp, alp2))
    # chain map checks
    for left, right in ((cat.compose(g, bet), cat.compose(gam, d)), (cat.compose(f, alp), cat.compose(bet, k)),
                        (cat.compose(d, bet2), cat.compose(gam2, g)), (cat.compose(k, alp2), cat.compose(bet2, f))):
        if not left.equals(right):
            raise ConsistencyError("chain map square does not commute")
    return Replacement((k, d), (f, g), (alp, bet, gam), (alp2, bet2, gam2), hp, ho)
