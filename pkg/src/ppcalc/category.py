"""The two module categories functors live on.

Contravariant functors are modelled on mod-R, covariant functors on
(R-mod)^op.  Both categories expose the same small interface so that every
functor construction is written once.  A morphism of the opposite category
is stored as the underlying module map pointing the other way.
"""

from __future__ import annotations


from . import fpmod
from .errors import InputError
from .fpmod import FpModule, HomQuotient, ModuleMorphism
from .linalg import Ring


class ModCategory:
    """Finitely presented R-modules with their usual maps."""

    opposite = False

    def __init__(self, ring: Ring):
        self.ring = ring

    def __eq__(self, other):
        return type(self) is type(other) and self.ring == other.ring

    def __hash__(self):
        return hash((type(self).__name__, self.ring))

    # shape
    def src(self, f: ModuleMorphism) -> FpModule:
        return f.source

    def dst(self, f: ModuleMorphism) -> FpModule:
        return f.target

    def compose(self, g: ModuleMorphism, f: ModuleMorphism) -> ModuleMorphism:
        """g after f."""
        return g @ f

    def identity(self, X: FpModule) -> ModuleMorphism:
        return X.identity()

    def zero_map(self, X: FpModule, Y: FpModule) -> ModuleMorphism:
        return ModuleMorphism.zero(X, Y)

    def zero_object(self) -> FpModule:
        return FpModule.zero(self.ring)

    def hom(self, X: FpModule, Y: FpModule) -> fpmod.HomGroup:
        return fpmod.hom_group(X, Y)

    # limits
    def kernel(self, f):
        return fpmod.kernel(f)

    def cokernel(self, f):
        return fpmod.cokernel(f)

    def direct_sum(self, objs):
        return fpmod.direct_sum(objs, self.ring)

    def cover(self, X: FpModule) -> ModuleMorphism:
        """An epimorphism onto X from a projective object."""
        return X.free_cover()

    # factorisation
    def lift(self, t, s):
        """u with s u = t, or None."""
        return fpmod.factor_through(t, s)

    def colift(self, t, s):
        """u with u s = t, or None."""
        return fpmod.cofactor_through(t, s)

    # derived helpers
    def add(self, f, g):
        return f + g

    def sub(self, f, g):
        return f - g

    def pullback(self, a, b):
        """(P, pa, pb) with a pa = b pb universal, for a: X -> Z and b: Y -> Z."""
        X, Y = self.src(a), self.src(b)
        S, _, proj = self.direct_sum([X, Y])
        m = self.sub(self.compose(a, proj[0]), self.compose(b, proj[1]))
        P, k = self.kernel(m)
        return P, self.compose(proj[0], k), self.compose(proj[1], k)

    def row(self, maps, target):
        """The map from a direct sum with the given components into target."""
        S, inj, proj = self.direct_sum([self.src(m) for m in maps])
        total = self.zero_map(S, target)
        for m, p in zip(maps, proj):
            total = self.add(total, self.compose(m, p))
        return S, inj, proj, total

    def is_projective(self, X: FpModule) -> bool:
        return fpmod.is_projective(X)

    def stable_hom(self, X: FpModule, Y: FpModule) -> HomQuotient:
        """Hom(X, Y) modulo maps factoring through a projective object."""
        return _stable_hom(self, X, Y)


class OppositeCategory(ModCategory):
    """(R-mod)^op: a morphism X -> Y here is a module map Y -> X."""

    opposite = True

    def src(self, f):
        return f.target

    def dst(self, f):
        return f.source

    def compose(self, g, f):
        return f @ g

    def zero_map(self, X, Y):
        return ModuleMorphism.zero(Y, X)

    def hom(self, X, Y):
        return fpmod.hom_group(Y, X)

    def kernel(self, f):
        return fpmod.cokernel(f)

    def cokernel(self, f):
        return fpmod.kernel(f)

    def direct_sum(self, objs):
        S, inj, proj = fpmod.direct_sum(objs, self.ring)
        return S, proj, inj

    def cover(self, X):
        """The injective envelope, read backwards."""
        return fpmod.injective_envelope(X)[1]

    def lift(self, t, s):
        return fpmod.cofactor_through(t, s)

    def colift(self, t, s):
        return fpmod.factor_through(t, s)

    def is_projective(self, X):
        return fpmod.is_injective(X)


_STABLE_CACHE: dict = {}


def _stable_hom(cat: ModCategory, X: FpModule, Y: FpModule) -> HomQuotient:
    key = (cat, X, Y)
    hit = _STABLE_CACHE.get(key)
    if hit is None:
        p = cat.cover(Y)
        through = [cat.compose(p, h) for h in cat.hom(X, cat.src(p)).generators]
        hit = HomQuotient(cat.hom(X, Y), through)
        if len(_STABLE_CACHE) > 8192:
            _STABLE_CACHE.clear()
        _STABLE_CACHE[key] = hit
    return hit


def category_for(variance: str, ring: Ring) -> ModCategory:
    if variance == "contra":
        return ModCategory(ring)
    if variance == "co":
        return OppositeCategory(ring)
    raise InputError(f"variance must be 'contra' or 'co', got {variance!r}")
