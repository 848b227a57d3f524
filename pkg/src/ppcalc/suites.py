"""Named property suites.

A suite is a list of components; a component runs a case function over a
list of rings.  Each case draws from its own ``random.Random`` seeded by
(seed, suite, component, ring, index), so any failure can be replayed alone
from its record.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Callable

from sympy import factorint

from . import fpfun, fpmod, pp
from .dsl import PpSyntaxError, format_pp, parse_pp
from .errors import InputError, PpcalcError
from .fpfun import FpFunctor, NatTrans
from .fpmod import FpModule, ModuleMorphism
from .linalg import Matrix, Ring, kernel_basis, snf, solve
from .pp import PpFormula, PpPair
from . import samples as S

Z, Z4, F2, F5 = Ring.integers(), Ring.zmod(4), Ring.fp(2), Ring.fp(5)
Z6, Z8 = Ring.zmod(6), Ring.zmod(8)


class CheckFailure(AssertionError):
    pass


def check(cond: bool, message: str):
    if not cond:
        raise CheckFailure(message)


@dataclass
class Case:
    """What a case function sees: its rng, ring and a record for replay data."""

    rng: random.Random
    ring: Ring
    seed: int
    record: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Component:
    name: str
    rings: tuple[Ring, ...]
    cases: int
    run: Callable[[Case], None]
    pinned: bool = False  # runs exactly once per ring


@dataclass
class SuiteReport:
    suite: str
    seed: int
    cases: int
    failures: list[dict]
    wall_time: float
    counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "cases": self.cases,
                "failures": self.failures, "counts": self.counts, "ok": self.ok}

    def summary(self) -> str:
        status = "ok" if self.ok else f"{len(self.failures)} failure(s)"
        return f"{self.suite}: {self.cases} cases, {status} ({self.wall_time:.2f}s)"


def _case_rng(seed: int, suite: str, component: str, ring: Ring, index: int) -> random.Random:
    return random.Random(f"{seed}/{suite}/{component}/{ring.spec()}/{index}")


def _run_one(suite: str, comp: Component, ring: Ring, index: int, seed: int) -> dict | None:
    case = Case(_case_rng(seed, suite, comp.name, ring, index), ring, seed)
    try:
        comp.run(case)
    except Exception as exc:  # any crash is a failed case, reported with its inputs
        return {"suite": suite, "component": comp.name, "ring": ring.spec(), "index": index,
                "seed": seed, "error": f"{type(exc).__name__}: {exc}", "inputs": case.record,
                "replay": f"ppcalc --seed {seed} check {suite} --replay {comp.name}/{ring.spec()}/{index}"}
    return None


def run_suite(name: str, seed: int = 0, cases: int | None = None,
              components: list[str] | None = None) -> SuiteReport:
    """Run a suite; ``cases`` overrides the per-ring case count of sampled components."""
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; available: {', '.join(SUITES)}")
    comps = SUITES[name]
    if components is not None:
        unknown = set(components) - {c.name for c in comps}
        if unknown:
            raise InputError(f"unknown component(s) {sorted(unknown)} in suite {name}")
        comps = [c for c in comps if c.name in components]
    start = time.perf_counter()
    failures, total, counts = [], 0, {}
    for comp in comps:
        n = 1 if comp.pinned else (comp.cases if cases is None else cases)
        for ring in comp.rings:
            for i in range(n):
                total += 1
                fail = _run_one(name, comp, ring, i, seed)
                if fail is not None:
                    failures.append(fail)
        counts[comp.name] = n * len(comp.rings)
    return SuiteReport(name, seed, total, failures, time.perf_counter() - start, counts)


def replay(name: str, seed: int, component: str, ring: Ring, index: int) -> dict | None:
    """Re-run one case from a failure record; returns the failure or None."""
    comps = {c.name: c for c in SUITES.get(name, [])}
    if component not in comps:
        raise InputError(f"unknown component {component!r} in suite {name!r}")
    return _run_one(name, comps[component], ring, index, seed)


# ---------------------------------------------------------------------------
# small independent oracles


def _det(a: list[list[int]]) -> int:
    """Determinant by cofactor expansion (matrices here are at most 4x4)."""
    k = len(a)
    if k == 0:
        return 1
    if k == 1:
        return a[0][0]
    return sum((-1) ** j * a[0][j] * _det([row[:j] + row[j + 1:] for row in a[1:]])
               for j in range(k) if a[0][j])


def determinantal_invariants(a: list[list[int]], r: int, c: int) -> list[int]:
    """Invariant factors as ratios of gcds of k x k minors."""
    out, prev = [], 1
    for k in range(1, min(r, c) + 1):
        g = 0
        for rows in itertools.combinations(range(r), k):
            for cols in itertools.combinations(range(c), k):
                g = gcd(g, _det([[a[i][j] for j in cols] for i in rows]))
        out.append(g // prev if prev else 0)
        prev = g
    return out


def _vectors(ring: Ring, k: int):
    return itertools.product(range(ring.modulus), repeat=k)


def _span(ring: Ring, cols: list[tuple[int, ...]], k: int) -> set[tuple[int, ...]]:
    span = {(0,) * k}
    n = ring.modulus
    for col in cols:
        span = {tuple((s[i] + r * col[i]) % n for i in range(k)) for s in span for r in range(n)}
    return span


def _elements_of(M: FpModule) -> list[tuple[int, ...]]:
    return [e.coords for e in M.elements()]


def _brute_hom_count(M: FpModule, N: FpModule) -> int:
    elems = _elements_of(N)
    count = 0
    for images in itertools.product(elems, repeat=M.gens):
        ok = True
        for rel in M.relations.column_list():
            v = [sum(rel[i] * images[i][t] for i in range(M.gens)) for t in range(N.gens)]
            if not N.vec_is_zero(v):
                ok = False
                break
        count += ok
    return count


def _baer_injective(I: FpModule) -> bool:
    """Baer's criterion over Z/n: every map dR -> I extends to R."""
    n = I.ring.modulus
    elems = [I.element(e) for e in _elements_of(I)]
    for d in range(1, n + 1):
        if n % d:
            continue
        multiples = {(d * x).coords for x in elems}
        for x in elems:
            if ((n // d) * x).is_zero() and x.coords not in multiples:
                return False
    return True


def _order(M: FpModule) -> int | None:
    return M.order()


def _submodule_module(H: fpmod.HomGroup, maps: list[ModuleMorphism]) -> FpModule:
    return fpmod.submodule(H.module, [H.to_coords(f) for f in maps])[0]


def _wrap(M: FpModule, F: FpFunctor | None = None, **extra) -> dict:
    out = {"module": M.to_json()}
    if F is not None:
        out["functor"] = F.to_json()
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# snf-core


def _snf_reconstruction(case: Case):
    rng, ring = case.rng, case.ring
    r, c = rng.randint(0, 4), rng.randint(0, 4)
    m = S.random_matrix(rng, ring, r, c, 5)
    case.record["matrix"] = m.to_json()
    s = snf(m)
    check(s.u @ m @ s.v == s.d, "u m v != d")
    check(s.u @ s.u_inv == Matrix.identity(ring, r), "u has wrong inverse")
    check(s.v @ s.v_inv == Matrix.identity(ring, c), "v has wrong inverse")
    check(len(s.invariants) == min(r, c), "wrong number of invariants")
    for i in range(r):
        for j in range(c):
            check(s.d[i, j] == (s.invariants[i] if i == j else 0), "d is not diagonal")
    if ring.modulus == 0:
        inv = s.invariants
        check(all(x >= 0 for x in inv), "negative invariant")
        for a, b in zip(inv, inv[1:]):
            check(b == 0 if a == 0 else b % a == 0, f"divisibility chain broken: {inv}")


def _snf_determinantal(case: Case):
    rng = case.rng
    r, c = rng.randint(1, 4), rng.randint(1, 4)
    m = S.random_matrix(rng, Z, r, c, 5)
    case.record["matrix"] = m.to_json()
    expected = determinantal_invariants(m.lift(), r, c)
    check(list(snf(m).invariants) == expected, f"invariants {snf(m).invariants} != minors {expected}")


def _solve_witness(case: Case):
    rng, ring = case.rng, case.ring
    r, c, k = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 2)
    a = S.random_matrix(rng, ring, r, c, 5)
    solvable = rng.random() < 0.5
    b = a @ S.random_matrix(rng, ring, c, k, 5) if solvable else S.random_matrix(rng, ring, r, k, 5)
    case.record.update(a=a.to_json(), b=b.to_json())
    x = solve(a, b)
    if x is not None:
        check(a @ x == b, "solve returned a non-solution")
        return
    check(not solvable, "solve missed a constructed solution")
    if ring.modulus and ring.modulus ** (c * k) <= 256:
        for flat in _vectors(ring, c * k):
            X = Matrix(ring, c, k, [list(flat[i * k:(i + 1) * k]) for i in range(c)])
            check(a @ X != b, "exhaustive search found a solution")


def _kernel_exhaustive(case: Case):
    rng, ring = case.rng, case.ring
    r, c = rng.randint(0, 3), rng.randint(1, 4)
    a = S.random_matrix(rng, ring, r, c, 5)
    case.record["matrix"] = a.to_json()
    K = kernel_basis(a)
    check((a @ K).is_zero(), "kernel basis is not in the kernel")
    if ring.modulus == 0:
        for x in itertools.product(range(-2, 3), repeat=c):
            v = Matrix(ring, c, 1, [[t] for t in x])
            if (a @ v).is_zero():
                check(solve(K, v) is not None, f"kernel vector {x} not in the span")
        return
    n = ring.modulus
    if n ** c > 4096:
        return
    brute = {x for x in _vectors(ring, c)
             if all(sum(row[j] * x[j] for j in range(c)) % n == 0 for row in a.entries)}
    check(_span(ring, K.column_list(), c) == brute, "kernel span differs from brute force")


# ---------------------------------------------------------------------------
# module-homology


def _small_module(rng: random.Random, ring: Ring, limit: int = 64) -> FpModule:
    for _ in range(50):
        M = S.random_module(rng, ring, 2)
        if M.order() is not None and M.order() <= limit:
            return M
    return FpModule.zero(ring)


def _kernel_cokernel(case: Case):
    rng, ring = case.rng, case.ring
    M, N = _small_module(rng, ring), _small_module(rng, ring)
    f = S.random_morphism(rng, M, N)
    case.record["morphism"] = f.to_json()
    K, k = fpmod.kernel(f)
    check((f @ k).is_zero(), "kernel composite is not zero")
    check(k.is_mono(), "kernel inclusion not mono")
    brute = {M.canonical(x) for x in _elements_of(M) if f(M.element(x)).is_zero()}
    got = {M.canonical(k.apply_vec(e.coords)) for e in K.elements()}
    check(brute == got, "kernel differs from brute force")
    Q, q = fpmod.cokernel(f)
    check((q @ f).is_zero() and q.is_epi(), "cokernel map wrong")
    image_size = len({N.canonical(f.apply_vec(x)) for x in _elements_of(M)})
    check(Q.order() * image_size == N.order(), "cokernel has wrong order")


def _unimodular(rng: random.Random, ring: Ring, g: int) -> list[list[int]]:
    P = [[int(i == j) for j in range(g)] for i in range(g)]
    for _ in range(3 * g):
        i, j = rng.randrange(g), rng.randrange(g)
        if i != j:
            c = rng.randint(-2, 2)
            P[i] = [P[i][t] + c * P[j][t] for t in range(g)]
    return P


def _iso_soundness(case: Case):
    rng, ring = case.rng, case.ring
    M = S.random_module(rng, ring, 3)
    if M.gens == 0:
        return
    P = Matrix(ring, M.gens, M.gens, _unimodular(rng, ring, M.gens))
    M2 = FpModule(ring, M.gens, P @ M.relations)
    case.record.update(a=M.to_json(), b=M2.to_json())
    check(M.is_isomorphic(M2), "invariant factors changed under a change of basis")
    f, g = fpmod.isomorphism(M, M2), fpmod.isomorphism(M2, M)
    check((g @ f).equals(M.identity()) and (f @ g).equals(M2.identity()),
          "constructed isomorphisms are not mutually inverse")


def _hom_brute(case: Case):
    rng, ring = case.rng, case.ring
    M, N = _small_module(rng, ring, 16), _small_module(rng, ring, 16)
    case.record.update(source=M.to_json(), target=N.to_json())
    H = fpmod.hom_group(M, N)
    check(H.module.order() == _brute_hom_count(M, N), "Hom order differs from brute force")
    for f in H.generators:
        check(H.to_morphism(H.to_coords(f)).equals(f), "Hom coordinates do not round-trip")


def _free_vanishing(case: Case):
    rng, ring = case.rng, case.ring
    N = S.random_module(rng, ring, 3)
    P = FpModule.free(ring, rng.randint(0, 2))
    case.record["module"] = N.to_json()
    check(fpmod.stable_hom(P, N).is_zero(), "stable Hom from a free module is nonzero")
    check(fpmod.stable_hom(N, P).is_zero(), "stable Hom into a free module is nonzero")
    check(fpmod.ext(1, P, N).is_zero(), "Ext^1 from a free module is nonzero")


def _envelope(case: Case):
    rng, ring = case.rng, case.ring
    M = _small_module(rng, ring, 64)
    case.record["module"] = M.to_json()
    I, e = fpmod.injective_envelope(M)
    check(e.is_mono(), "envelope map is not mono")
    check(fpmod.is_injective(I) and _baer_injective(I), "envelope is not injective")
    check(fpmod.is_injective(M) == _baer_injective(M), "injectivity test disagrees with Baer")
    full = factorint(ring.modulus)
    forced = []
    for d in M.invariant_factors:
        E = 1
        for p, k in full.items():
            if d % p == 0:
                E *= p ** k
        forced.append(E)
    check(sorted(I.invariant_factors) == sorted(forced), "envelope is not minimal")


def _ann_brute(case: Case):
    rng, ring = case.rng, case.ring
    C = _small_module(rng, ring, 64)
    n = rng.randint(0, 2)
    elems = _elements_of(C)
    c = [C.element(rng.choice(elems)) for _ in range(n)]
    case.record.update(module=C.to_json(), tuple=[x.to_json() for x in c])
    K, k = fpmod.ann(C, c)
    brute = {r for r in _vectors(ring, n)
             if (sum((ri * x for ri, x in zip(r, c)), C.zero_element())).is_zero()}
    got = {tuple(v % ring.modulus for v in k.apply_vec(e.coords)) for e in K.elements()}
    check(brute == got, "Ann differs from brute force")


def _tensor_order(case: Case):
    rng, ring = case.rng, case.ring
    M, N = S.random_module(rng, ring, 2), S.random_module(rng, ring, 2)
    case.record.update(a=M.to_json(), b=N.to_json())
    T = fpmod.tensor(M, N)
    n = ring.modulus
    expected = []
    for a in M.moduli:
        for b in N.moduli:
            expected.append(gcd(a, b) if n == 0 else gcd(gcd(a, b), n))
    check(T.is_isomorphic(FpModule.diagonal(ring, expected)), "tensor product has wrong invariants")


# ---------------------------------------------------------------------------
# fp0-equivalences


def _contra_functor(case: Case) -> FpFunctor:
    rng = case.rng
    F = S.random_fp0_functor(rng, case.ring) if rng.random() < 0.3 else S.random_functor(rng, case.ring)
    case.record["functor"] = F.to_json()
    return F


def _fp0_contra(case: Case):
    rng, ring = case.rng, case.ring
    F = _contra_functor(case)
    W = fpfun.defect(F)
    R = FpModule.free(ring, 1)
    tests = {
        "pres epi": F.pres.is_epi(),
        "defect zero": W.is_zero(),
        "vanishes at R": F(R).is_zero(),
        "vanishes at R^2": F(FpModule.free(ring, 2)).is_zero(),
        "no maps to representables": all(
            fpfun.hom_functors(F, fpfun.representable(X, "contra")).is_zero()
            for X in [W] + [S.random_module(rng, ring) for _ in range(3)]),
    }
    check(len(set(tests.values())) == 1, f"fp0 characterisations disagree: {tests}")


def _wproj_exactness(case: Case):
    """w is exact: exactness at R of F -> G -> H matches exactness of the defects."""
    rng, ring = case.rng, case.ring
    G = S.random_functor(rng, ring)
    A, A2 = S.random_module(rng, ring, 2), S.random_module(rng, ring, 2)
    gamma = S.random_morphism(rng, A, G.top)
    alpha = NatTrans(fpfun.representable(A, "contra"), G, gamma)
    AA, _, proj = fpmod.direct_sum([A, A2], ring)
    gamma2 = gamma @ proj[0] + S.random_morphism(rng, A2, G.top) @ proj[1]
    alpha2 = NatTrans(fpfun.representable(AA, "contra"), G, gamma2)
    _, beta = fpfun.cokernel_nat(alpha2)
    case.record.update(functor=G.to_json(), gamma=gamma.to_json(), gamma2=gamma2.to_json())
    check(beta.after(alpha).is_zero(), "composite is not zero")
    R = FpModule.free(ring, 1)
    at_R = fpmod.module_homology(alpha.at(R), beta.at(R)).is_zero()
    on_w = fpmod.module_homology(fpfun.defect_map(alpha), fpfun.defect_map(beta)).is_zero()
    check(at_R == on_w, f"exactness at R is {at_R} but on defects is {on_w}")
    check(alpha.at(R).is_epi() == fpfun.defect_map(alpha).is_epi(), "epimorphism tests disagree")


def _fp0_covariant(case: Case):
    rng, ring = case.rng, case.ring
    F = S.random_functor(rng, ring, "co")
    case.record["functor"] = F.to_json()
    inj = fpmod.indecomposable_injectives(ring)
    sums = inj + [fpmod.direct_sum([a, b], ring)[0] for a in inj for b in inj]
    on_injectives = all(F(I).is_zero() for I in sums)
    check(fpfun.in_fp0(F) == on_injectives == F.pres.is_mono(),
          "covariant fp0 membership disagrees with vanishing on injectives")


# ---------------------------------------------------------------------------
# recollement-identities


def _p_module(M: FpModule, A: FpModule) -> FpModule:
    return _submodule_module(fpmod.hom_group(M, A), fpmod.p_subgroup(M, A))


def _identities(case: Case, variance: str):
    rng, ring = case.rng, case.ring
    A = S.random_module(rng, ring)
    case.record.update(module=A.to_json(), variance=variance)
    Y = fpfun.representable(A, variance)
    L = fpfun.l0y(A, variance)
    check(fpfun.defect(Y).is_isomorphic(A), "w(YA) is not A")
    check(fpfun.defect(L).is_isomorphic(A), "w(L0Y A) is not A")
    check(fpfun.sub0(Y)[0].is_zero(), "(YA)_0 is not zero")
    check(fpfun.quot0(L)[0].is_zero(), "(L0Y A)^0 is not zero")
    if variance == "contra":
        N = fpfun.norm_image(A)
        for M in S.module_family(ring)[:8]:
            check(N(M).is_isomorphic(_p_module(M, A)), f"norm image at {M} is not P(M, A)")


def _identities_contra(case: Case):
    _identities(case, "contra")


def _identities_co(case: Case):
    _identities(case, "co")


def _leftdef(case: Case):
    rng, ring = case.rng, case.ring
    F = S.random_functor(rng, ring)
    X = S.random_module(rng, ring)
    case.record.update(functor=F.to_json(), module=X.to_json())
    iso = fpfun.leftdef_iso(F, X)
    direct = fpfun.hom_functors(F, fpfun.representable(X, "contra"))
    check(direct.is_isomorphic(fpmod.hom_group(fpfun.defect(F), X).module),
          "(F, YX) and Hom(wF, X) differ")
    check(iso.nat_module.is_isomorphic(direct), "two computations of (F, YX) differ")


def _pinfp1(case: Case):
    rng, ring = case.rng, case.ring
    F = S.random_functor(rng, ring)
    A = S.random_nonzero_module(rng, ring)
    case.record.update(functor=F.to_json(), module=A.to_json())
    r = fpfun.pin_check(F, A)
    check(r.injective, "F(A)/F_0(A) does not map into (P(-,A), F)")
    if r.exact_hypothesis:
        check(r.quotient_order == r.hom_order,
              f"|FA/F0A| = {r.quotient_order} but |(P(-,A), F)| = {r.hom_order}")
    else:
        check(r.quotient_order <= r.hom_order, "monomorphism impossible by counting")


# ---------------------------------------------------------------------------
# hereditary-Z and nonhereditary-Z4


def _l1_vanishes(case: Case):
    rng, ring = case.rng, case.ring
    F = _contra_functor(case)
    M = S.random_module(rng, ring)
    case.record["module"] = M.to_json()
    check(fpfun.derived_quot0_eval(F, 1, M).is_zero(), "L1 of (-)^0 is nonzero (module route)")
    check(fpfun.derived_quot0(F, 1)(M).is_zero(), "L1 of (-)^0 is nonzero (functor route)")


def _hercor(case: Case):
    F = _contra_functor(case)
    check(fpfun.in_fp_bang(F) == fpfun.quot0(F)[0].is_zero(),
          "fp_! membership differs from vanishing of F^0")


def _syzygy_projective(case: Case):
    A = S.random_module(case.rng, case.ring)
    case.record["module"] = A.to_json()
    Om = fpmod.syzygy(A)[0]
    check(fpmod.is_projective(Om), "a first syzygy is not projective")
    check(fpfun.stable_functor(Om).is_zero(), "stable Hom into a syzygy is nonzero")


def _nonhereditary_witness(case: Case):
    ring = case.ring
    A = FpModule.cyclic(ring, 2)
    St = fpfun.stable_functor(A)
    module_route = fpfun.derived_quot0_eval(St, 2, A)
    functor_route = fpfun.derived_quot0(St, 2)(A)
    Om = fpmod.syzygy(A)[0]
    expected = fpmod.stable_hom(A, Om)
    case.record.update(module_route=module_route.label(), functor_route=functor_route.label())
    for value in (module_route, functor_route):
        check(value.is_isomorphic(FpModule.cyclic(ring, 2)), f"witness is {value}, expected Z/2")
        check(value.is_isomorphic(expected), "witness differs from stable Hom into the syzygy")
    check(not fpmod.is_projective(Om), "syzygy of Z/2 is projective")


def _one_hom(case: Case):
    rng, ring = case.rng, case.ring
    A, M = S.random_module(rng, ring), S.random_module(rng, ring)
    case.record.update(a=A.to_json(), m=M.to_json())
    St = fpfun.stable_functor(A)
    Om = fpmod.syzygy(A)[0]
    expected = fpmod.stable_hom(M, Om)
    check(fpfun.derived_quot0_eval(St, 2, M).is_isomorphic(expected), "L2 differs (module route)")
    check(fpfun.derived_quot0(St, 2)(M).is_isomorphic(expected), "L2 differs (functor route)")


def _zero_hom(case: Case):
    rng, ring = case.rng, case.ring
    A, M = S.random_module(rng, ring), S.random_module(rng, ring)
    case.record.update(a=A.to_json(), m=M.to_json())
    Q = fpfun.quot0(fpfun.representable(A, "contra"))[0]
    check(Q(M).is_isomorphic(fpmod.stable_hom(M, A)), "(YA)^0 differs from stable Hom")
    check(fpfun.derived_quot0_eval(fpfun.representable(A, "contra"), 0, M).is_isomorphic(Q(M)),
          "L0 differs from (-)^0")


# ---------------------------------------------------------------------------
# fpbang-membership and perpendicular-pairs


@lru_cache(maxsize=64)
def _fp0_witnesses(seed: int, ring: Ring, count: int = 20) -> tuple[FpFunctor, ...]:
    rng = random.Random(f"{seed}/fp0-witnesses/{ring.spec()}")
    return tuple(S.random_fp0_functor(rng, ring) for _ in range(count))


def _orthogonal(F: FpFunctor, G: FpFunctor) -> bool:
    return fpfun.hom_functors(F, G).is_zero() and fpfun.ext_functors(1, F, G).is_zero()


def _fpbang(case: Case):
    F = _contra_functor(case)
    member = fpfun.in_fp_bang(F)
    bangchar = fpfun.counit_is_iso(F)
    eps = fpfun.counit(F)
    canonical = [fpfun.cokernel_nat(eps)[0], fpfun.kernel_nat(eps)[0]]
    for G in canonical:
        check(fpfun.in_fp0(G), "canonical witness has nonzero defect")
    witnesses = canonical + list(_fp0_witnesses(case.seed, case.ring))
    orth = all(_orthogonal(F, G) for G in witnesses)
    check(member == bangchar == orth,
          f"fp_! tests disagree: stable test {member}, counit iso {bangchar}, orthogonality {orth}")
    if member:
        fpfun.projective_replacement(F)


def _perpendicular(case: Case):
    rng, ring = case.rng, case.ring
    A = S.random_module(rng, ring)
    F = fpfun.l0y(A) if rng.random() < 0.7 else fpfun.representable(FpModule.free(ring, 1), "contra")
    G = S.random_fp0_functor(rng, ring)
    case.record.update(f=F.to_json(), g=G.to_json())
    check(fpfun.in_fp_bang(F), "L0Y A is not in fp_!")
    check(fpfun.in_fp0(G), "witness has nonzero defect")
    check(fpfun.hom_functors(F, G).is_zero(), "Hom(F, G) is nonzero")
    check(fpfun.ext_functors(1, F, G).is_zero(), "Ext^1(F, G) is nonzero")


# ---------------------------------------------------------------------------
# duality-involution


def _involution(case: Case):
    rng, ring = case.rng, case.ring
    phi = S.random_formula(rng, ring)
    psi = S.random_formula(rng, ring, n=phi.n)
    case.record.update(phi=phi.to_json(), psi=psi.to_json())
    dd = pp.dual(pp.dual(phi))
    check(dd.side == phi.side, "double dual changed the side")
    check(pp.equivalent(dd, phi), "D(D phi) is not equivalent to phi")
    for a, b in ((phi, psi), (pp.meet(phi, psi), phi), (phi, pp.join(phi, psi))):
        check(pp.leq(a, b) == pp.leq(pp.dual(b), pp.dual(a)), "duality is not order-reversing")


def _tensor_oracle(case: Case):
    rng, ring = case.rng, case.ring
    phi = S.random_formula(rng, ring, max_n=2)
    case.record["phi"] = phi.to_json()
    real = pp.free_realisation(phi)
    D = pp.dual(phi)
    for M in S.module_family(ring):
        Mn = pp.power(M, phi.n)
        elems = [M.element(x) for x in _elements_of(M)]
        oracle = set()
        for tup in itertools.product(elems, repeat=phi.n):
            if fpmod.tensor_elem_is_zero(list(tup), list(real.c_tuple)):
                oracle.add(Mn.canonical([c for x in tup for c in x.coords]))
        check(pp.solution_elements(D, M) == oracle, f"dual formula differs from tensor condition at {M}")


def _jambags(case: Case):
    rng, ring = case.rng, case.ring
    phi = S.random_formula(rng, ring)
    case.record["phi"] = phi.to_json()
    real = pp.free_realisation(phi)
    R = FpModule.free(ring, 1)
    _, dual_incl = pp.solution_set(pp.dual(phi), R)
    _, ann_incl = fpmod.ann(real.c_module, real.c_tuple)
    check(fpfun._same_submodule(dual_incl, ann_incl), "(D phi)R differs from Ann(C, c)")


# ---------------------------------------------------------------------------
# defect-fourway


def _fourway_pinned(case: Case):
    ring = case.ring
    R = FpModule.free(ring, 1)
    P = PpFormula
    cases = [(PpPair(P.top(ring), P.bottom(ring)), R)]
    if ring == Z:
        cases.append((PpPair(P.divisible(ring, 2), P.divisible(ring, 4)), FpModule.zero(ring)))
    if ring == Z4:
        cases.append((PpPair(P.top(ring), P.divisible(ring, 2)), FpModule.cyclic(ring, 2)))
    for p, expected in cases:
        got = pp.defect_pair(p, "all")
        check(got.is_isomorphic(expected), f"defect of {format_pp(p.top)} / {format_pp(p.bottom)} is {got}")


def _fourway(case: Case):
    p = S.random_pair(case.rng, case.ring)
    case.record["pair"] = p.to_json()
    pp.defect_pair(p, "all")


def _wrath(case: Case):
    rng, ring = case.rng, case.ring
    p = S.random_pair(rng, ring)
    case.record["pair"] = p.to_json()
    d = pp.agj_dual_pair(p)
    R = FpModule.free(ring, 1)
    value = pp.pair_to_functor(d)(R)
    check(value.is_isomorphic(pp.defect_pair(p, "functor")), "(dF)R differs from wF")
    dd = pp.agj_dual_pair(d)
    check(pp.equivalent(dd.top, p.top) and pp.equivalent(dd.bottom, p.bottom), "d(dF) differs from F")


# ---------------------------------------------------------------------------
# sigma-rho-universal


def _between(p: PpPair, chi: PpFormula) -> bool:
    return pp.leq(p.bottom, chi) and pp.leq(chi, p.top)


def _same_at(a: PpFormula, b: PpFormula, M: FpModule) -> bool:
    return fpfun._same_submodule(pp.solution_set(a, M)[1], pp.solution_set(b, M)[1])


def _w_zero(top: PpFormula, bottom: PpFormula) -> bool:
    return pp.defect_pair(PpPair(top, bottom), "functor").is_zero()


def _sigma_rho_pinned(case: Case):
    P = PpFormula
    ring = case.ring
    if ring == Z:
        p = PpPair(P.divisible(Z, 2), P.divisible(Z, 4))
        check(pp.equivalent(pp.sigma(p), p.top), "sigma((2|x)/(4|x)) is not 2|x")
        p = PpPair(P.top(Z), P.torsion(Z, 2))
        check(pp.equivalent(pp.sigma(p), p.bottom), "sigma((x=x)/(2x=0)) is not 2x=0")
        # (x=x)/(2x=0) is the formula 2|x via x -> 2x; (2|x)/(4|x) is no formula.
        F, G = pp.pair_to_functor(p), pp.pp_to_functor(P.divisible(Z, 2))
        gamma = ModuleMorphism(G.top, F.top, Matrix(Z, F.top.gens, G.top.gens, [[2, 1]]))
        check(NatTrans(F, G, gamma).is_iso(), "x -> 2x is not an isomorphism onto 2|x")
        H = pp.pair_to_functor(PpPair(P.divisible(Z, 2), P.divisible(Z, 4)))
        check(not H.is_zero() and fpfun.sub0(H)[1].is_iso(), "(2|x)/(4|x) is not its own F_0")
    if ring == Z4:
        p = PpPair(P.torsion(Z4, 2), P.bottom(Z4))
        r = pp.rho(p)
        check(pp.equivalent(r, P.divisible(Z4, 2)), "rho((2x=0)/(x=0)) is not 2|x")
        check(_same_at(r, p.top, FpModule.free(Z4, 1)), "rho differs from phi at Z/4")
        check(not _same_at(r, p.top, FpModule.cyclic(Z4, 2)), "rho agrees with phi at Z/2")
        top = PpPair(P.top(Z4), P.bottom(Z4))
        check(pp.equivalent(pp.rho(top), P.top(Z4)), "rho((x=x)/(x=0)) is not x=x")
    phi = S.random_formula(case.rng, ring)
    same = PpPair(phi, phi)
    check(pp.equivalent(pp.sigma(same), phi), "sigma(phi/phi) is not phi")
    if ring.modulus:
        check(pp.equivalent(pp.rho(same), phi), "rho(phi/phi) is not phi")


CANDIDATES = 30


def _sigma_case(case: Case):
    rng, ring = case.rng, case.ring
    p = S.random_pair(rng, ring)
    case.record["pair"] = p.to_json()
    s = pp.sigma(p)
    check(_between(p, s), "sigma is not between psi and phi")
    check(_w_zero(s, p.bottom), "sigma/psi has nonzero defect")
    for _ in range(CANDIDATES):
        c = S.between(rng, p)
        if _w_zero(c, p.bottom):
            check(pp.leq(c, s), "a candidate with zero defect is not below sigma")
    check(fpfun.sub0(pp.pp_to_functor(p.top))[0].is_zero(), "a pp formula has nonzero F_0")


def _nu_case(case: Case):
    rng, ring = case.rng, case.ring
    p = S.random_pair(rng, ring)
    case.record["pair"] = p.to_json()
    R = FpModule.free(ring, 1)
    v = pp.nu(p)
    check(_between(p, v), "nu is not between psi and phi")
    check(_same_at(v, p.top, R), "nu(R) differs from phi(R)")
    for _ in range(CANDIDATES):
        c = S.between(rng, p)
        if _same_at(c, p.top, R):
            check(pp.leq(v, c), "a candidate agreeing with phi at R is not above nu")


def _rho_case(case: Case):
    rng, ring = case.rng, case.ring
    p = S.random_pair(rng, ring)
    case.record["pair"] = p.to_json()
    r = pp.rho(p)
    check(_between(p, r), "rho is not between psi and phi")
    check(pp.agrees_on_injectives(p.top, r), "rho differs from phi on injectives")
    for _ in range(CANDIDATES):
        c = S.between(rng, p)
        if pp.agrees_on_injectives(p.top, c):
            check(pp.leq(r, c), "a candidate agreeing with phi on injectives is not above rho")


def _mu_case(case: Case):
    rng, ring = case.rng, case.ring
    p = S.random_pair(rng, ring)
    case.record["pair"] = p.to_json()
    R = FpModule.free(ring, 1)
    u = pp.mu(p)
    check(_between(p, u), "mu is not between psi and phi")
    check(_same_at(u, p.bottom, R), "mu(R) differs from psi(R)")
    for _ in range(CANDIDATES):
        c = S.between(rng, p)
        if _same_at(c, p.bottom, R):
            check(pp.leq(c, u), "a candidate agreeing with psi at R is not below mu")


def all_formulas(ring: Ring, max_l: int, max_m: int) -> list[PpFormula]:
    """Every 1-formula over a finite ring with at most max_l equations and max_m bound variables."""
    out = []
    for l in range(max_l + 1):
        for m in range(max_m + 1):
            for flat in _vectors(ring, l * (1 + m)):
                rows = [list(flat[i * (1 + m):(i + 1) * (1 + m)]) for i in range(l)]
                out.append(PpFormula.from_rows(ring, 1, m, rows))
    return out


def _exhaustive_f2(case: Case):
    ring = case.ring
    small = all_formulas(ring, 1, 1)
    candidates = all_formulas(ring, 2, 2)
    R = FpModule.free(ring, 1)
    injectives = fpmod.indecomposable_injectives(ring)
    for phi in small:
        for psi in small:
            if not pp.leq(psi, phi):
                continue
            p = PpPair(phi, psi)
            inside = [c for c in candidates if _between(p, c)]
            s, r, v, u = pp.sigma(p), pp.rho(p), pp.nu(p), pp.mu(p)
            for c in inside:
                if all(_same_at(c, psi, I) for I in injectives):
                    check(pp.leq(c, s), "sigma is not largest")
                if all(_same_at(c, phi, I) for I in injectives):
                    check(pp.leq(r, c), "rho is not smallest")
                if _same_at(c, phi, R):
                    check(pp.leq(v, c), "nu is not smallest")
                if _same_at(c, psi, R):
                    check(pp.leq(c, u), "mu is not largest")


# ---------------------------------------------------------------------------
# calculus-biconditional


def _calculus_pinned(case: Case):
    ring = case.ring
    P = PpFormula
    phi = S.random_formula(case.rng, ring)
    check(pp.calculus_check(PpPair(phi, phi)), "phi/phi fails the calculus check")
    if ring == Z4:
        check(not pp.calculus_check(PpPair(P.top(ring), P.divisible(ring, 2))),
              "(x=x)/(2|x) passes the calculus check")
        two = P.divisible(ring, 2)
        check(pp.calculus_check(PpPair(two, pp.meet(two, P.torsion(ring, 2)))),
              "(2|x)/(2|x & 2x=0) fails the calculus check")


def _calculus(case: Case):
    p = S.random_pair(case.rng, case.ring)
    case.record["pair"] = p.to_json()
    pp.calculus_check(p)


# ---------------------------------------------------------------------------
# parser-roundtrip

CORPUS = [
    "x1 = x1", "x1 = 0", "2*x1 = 0", "E y . x1 - 2*y = 0", "E y . x1 = 2*y",
    "E y1 y2 . x1 = 3*y1 & x2 - y2 = -x1", "x1 + x2 = 0", "x1 = x2", "3*x1 - 2*x2 + x3 = 0",
    "exists y1 . x1 = y1 & 2*y1 = 0", "E y1, y2 . x1 - y1 - y2 = 0 & 4*y1 = 0 & 6*y2 = 0",
    "x2 = x2", "0 = x1", "-x1 = 0", "x1 - x1 = 0", "E y . 0 = x1 - 4*y",
    "E y . x1 = y & x2 = y", "2*x1 = 0 & 3*x1 = 0", "E y1 y2 y3 . x1 = y1 + y2 + y3",
    "x3 = 0", "∃ y . x1 = 5*y",
]

ERRORS = [
    ("x1 = 1", 5), ("E y . x1 = z", 11), ("x1 = y", 5), ("x1 + = 0", 5), ("E . x1 = 0", 2),
    ("y1 = 0", 0), ("x1 = x1 &", 9), ("x1 == 0", 4), ("x1 = 0 x2", 7), ("E y y . x1 = y", 4),
    ("E x1 . x1 = 0", 2), ("2 * = 0", 4), ("x0 = 0", 0), ("x1 = 0 $", 7), ("", 0),
]


def _corpus(ring: Ring, rng: random.Random) -> list[str]:
    generated = [format_pp(S.random_formula(rng, ring)) for _ in range(50 - len(CORPUS))]
    return CORPUS + generated


def _roundtrip(case: Case):
    ring = case.ring
    for text in _corpus(ring, case.rng):
        case.record["text"] = text
        phi = parse_pp(text, ring)
        printed = format_pp(phi)
        check(parse_pp(printed, ring) == phi, f"print/parse is not a fixpoint for {text!r}")
        check(format_pp(parse_pp(printed, ring)) == printed, f"printing is unstable for {text!r}")
    for _ in range(20):
        phi = S.random_formula(case.rng, ring)
        check(parse_pp(format_pp(phi), ring) == phi.normalized(), "parse(print(phi)) is not normalised phi")


def _syntax_errors(case: Case):
    for text, pos in ERRORS:
        case.record["text"] = text
        try:
            parse_pp(text, case.ring)
        except PpSyntaxError as exc:
            check(exc.pos == pos, f"error for {text!r} at column {exc.pos + 1}, expected {pos + 1}")
            continue
        except InputError:
            check(False, f"error for {text!r} carries no position")
        check(False, f"{text!r} was accepted")


def _exit_codes(case: Case):
    from .cli import main
    sink = io.StringIO()
    with contextlib.redirect_stdout(sink), contextlib.redirect_stderr(sink):
        codes = {
            "ok": main(["pp", "parse", "E y . x1 = 2*y"]),
            "syntax": main(["pp", "parse", "x1 = 1"]),
            "usage": main(["pp", "frobnicate"]),
        }
    check(codes == {"ok": 0, "syntax": 2, "usage": 2}, f"exit codes {codes}")


# ---------------------------------------------------------------------------
# registry

MAIN = (Z, Z4, F5)

SUITES: dict[str, list[Component]] = {
    "snf-core": [
        Component("reconstruction", (Z, Z4, Z6, F5), 100, _snf_reconstruction),
        Component("determinantal", (Z,), 500, _snf_determinantal),
        Component("solve", (Z, Z4, Z6, F5), 100, _solve_witness),
        Component("kernel", (Z, Z4, Z6, F2, F5), 60, _kernel_exhaustive),
    ],
    "module-homology": [
        Component("kernel-cokernel", (Z4, Z6, F2), 40, _kernel_cokernel),
        Component("isomorphism", (Z, Z4, Z6, F5), 40, _iso_soundness),
        Component("hom", (Z4, Z6, F2), 30, _hom_brute),
        Component("free-vanishing", (Z, Z4, Z8), 30, _free_vanishing),
        Component("envelope", (Z4, Z6, Z8, Ring.zmod(12)), 30, _envelope),
        Component("ann", (Z4, Z6, F2), 30, _ann_brute),
        Component("tensor", (Z, Z4, Z6), 30, _tensor_order),
    ],
    "fp0-equivalences": [
        Component("contravariant", MAIN, 100, _fp0_contra),
        Component("defect-exact", MAIN, 30, _wproj_exactness),
        Component("covariant-injectives", (Z4,), 100, _fp0_covariant),
    ],
    "recollement-identities": [
        Component("identities", MAIN, 50, _identities_contra),
        Component("identities-covariant", (Z4,), 50, _identities_co),
        Component("leftdef", (Z4,), 50, _leftdef),
        Component("pinfp1", (Z4,), 30, _pinfp1),
    ],
    "hereditary-Z": [
        Component("l1-vanishes", (Z,), 100, _l1_vanishes),
        Component("fpbang-is-kernel", (Z,), 100, _hercor),
        Component("syzygies-projective", (Z,), 30, _syzygy_projective),
    ],
    "nonhereditary-Z4": [
        Component("witness", (Z4,), 1, _nonhereditary_witness, pinned=True),
        Component("l2-stable", (Z4,), 20, _one_hom),
        Component("l0-stable", (Z4,), 20, _zero_hom),
    ],
    "fpbang-membership": [
        Component("equivalences", MAIN, 50, _fpbang),
    ],
    "perpendicular-pairs": [
        Component("orthogonality", MAIN, 20, _perpendicular),
    ],
    "duality-involution": [
        Component("involution", MAIN, 200, _involution),
        Component("tensor-oracle", (Z4, F2), 50, _tensor_oracle),
        Component("annihilator", MAIN, 50, _jambags),
    ],
    "defect-fourway": [
        Component("pinned", MAIN, 1, _fourway_pinned, pinned=True),
        Component("random", MAIN, 100, _fourway),
        Component("agj-duality", (Z4,), 50, _wrath),
    ],
    "sigma-rho-universal": [
        Component("pinned", (Z, Z4), 1, _sigma_rho_pinned, pinned=True),
        Component("sigma", (Z, Z4), 10, _sigma_case),
        Component("nu", (Z, Z4), 10, _nu_case),
        Component("rho", (Z4, Z8), 10, _rho_case),
        Component("mu", (Z4, Z8), 10, _mu_case),
        Component("exhaustive-F2", (F2,), 1, _exhaustive_f2, pinned=True),
    ],
    "calculus-biconditional": [
        Component("pinned", (Z4,), 1, _calculus_pinned, pinned=True),
        Component("random", (Z4, Z6, Z8, F2), 50, _calculus),
    ],
    "parser-roundtrip": [
        Component("corpus", (Z, Z4), 1, _roundtrip, pinned=True),
        Component("errors", (Z,), 1, _syntax_errors, pinned=True),
        Component("exit-codes", (Z,), 1, _exit_codes, pinned=True),
    ],
}
