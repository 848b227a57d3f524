"""Seeded random inputs for the verification suites.

Every generator takes a ``random.Random`` so a case is reproducible from the
seed that created it.
"""

from __future__ import annotations

import random

from . import fpmod
from .fpfun import FpFunctor
from .fpmod import FpModule, ModuleMorphism
from .linalg import Matrix, Ring
from .pp import PpFormula, PpPair, join, leq, meet

Z = Ring.integers()
Z4 = Ring.zmod(4)
F2 = Ring.fp(2)
F5 = Ring.fp(5)


def random_matrix(rng: random.Random, ring: Ring, rows: int, cols: int, bound: int = 4) -> Matrix:
    return Matrix(ring, rows, cols, [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)])


def random_formula(rng: random.Random, ring: Ring, n: int | None = None, max_n: int = 3,
                   max_m: int = 3, max_l: int = 3, bound: int = 4, side: str = "left") -> PpFormula:
    n = n if n is not None else rng.randint(1, max_n)
    m = rng.randint(0, max_m)
    l = rng.randint(0, max_l)
    rows = [[rng.randint(-bound, bound) for _ in range(n + m)] for _ in range(l)]
    return PpFormula.from_rows(ring, n, m, rows, side)


def random_pair(rng: random.Random, ring: Ring, n: int | None = None, tries: int = 4, **kw) -> PpPair:
    """(phi, phi and chi), which is ordered by construction.

    Up to ``tries`` draws are made to avoid the trivial pair phi/phi, which
    random equations produce often.
    """
    for _ in range(tries):
        phi = random_formula(rng, ring, n=n, **kw)
        chi = random_formula(rng, ring, n=phi.n, **kw)
        p = PpPair(phi, meet(phi, chi))
        if not leq(p.top, p.bottom):
            return p
    return p


def between(rng: random.Random, p: PpPair, **kw) -> PpFormula:
    """A formula sigma' with psi <= sigma' <= phi: psi + (phi and chi)."""
    chi = random_formula(rng, p.ring, n=p.n, side=p.top.side, **kw)
    return join(p.bottom, meet(p.top, chi))


def _cyclic_orders(ring: Ring) -> list[int]:
    if ring.modulus == 0:
        return [0, 0, 2, 3, 4, 6]
    n = ring.modulus
    return [d for d in range(1, n + 1) if n % d == 0 and d > 1]


def random_module(rng: random.Random, ring: Ring, max_gens: int = 3) -> FpModule:
    """Either a direct sum of cyclics or a random presentation."""
    g = rng.randint(0, max_gens)
    if rng.random() < 0.5:
        return FpModule.diagonal(ring, [rng.choice(_cyclic_orders(ring)) for _ in range(g)])
    r = rng.randint(0, max_gens)
    rel = [[rng.randint(-3, 3) for _ in range(g)] for _ in range(r)]
    return FpModule.from_relations(ring, g, rel)


def random_nonzero_module(rng: random.Random, ring: Ring, max_gens: int = 3) -> FpModule:
    for _ in range(20):
        M = random_module(rng, ring, max_gens)
        if not M.is_zero():
            return M
    return FpModule.free(ring, 1)


def random_morphism(rng: random.Random, M: FpModule, N: FpModule, bound: int = 3) -> ModuleMorphism:
    """A random integer combination of the Hom(M, N) generators."""
    H = fpmod.hom_group(M, N)
    return H.to_morphism([rng.randint(-bound, bound) for _ in H.generators])


def random_epi(rng: random.Random, C: FpModule, max_extra: int = 2) -> ModuleMorphism:
    """An epimorphism onto C: (cover, random map) from R^g + X."""
    X = random_module(rng, C.ring, max_extra)
    cover = C.free_cover()
    S, _, proj = fpmod.direct_sum([cover.source, X], C.ring)
    return cover @ proj[0] + random_morphism(rng, X, C) @ proj[1]


def random_functor(rng: random.Random, ring: Ring, variance: str = "contra", max_gens: int = 3) -> FpFunctor:
    """pres: B -> C (contravariant) or A -> B (covariant) between random modules."""
    M, N = random_module(rng, ring, max_gens), random_nonzero_module(rng, ring, max_gens)
    kind = rng.random()
    if variance == "contra" and kind < 0.2:
        return FpFunctor(variance, random_epi(rng, N))
    if kind < 0.35:
        M = FpModule.free(ring, rng.randint(0, 2))
    return FpFunctor(variance, random_morphism(rng, M, N))


def random_fp0_functor(rng: random.Random, ring: Ring, max_gens: int = 3) -> FpFunctor:
    """A contravariant functor with epimorphic presentation, so zero defect."""
    return FpFunctor("contra", random_epi(rng, random_module(rng, ring, max_gens)))


def module_family(ring: Ring) -> list[FpModule]:
    """Direct sums of at most two cyclic modules (a finite list)."""
    orders = sorted(set(_cyclic_orders(ring)) | ({0} if ring.modulus == 0 else set()))
    out = [FpModule.zero(ring)]
    for i, a in enumerate(orders):
        out.append(FpModule.diagonal(ring, [a]))
        for b in orders[i:]:
            out.append(FpModule.diagonal(ring, [a, b]))
    return out
