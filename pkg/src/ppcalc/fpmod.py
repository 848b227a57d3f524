"""Finitely presented modules over Z, Z/n and F_p.

A module is the cokernel of its relation matrix (relations are columns).
Over Z/n it is also the abelian group Z^g / (relations + n Z^g), so every
construction here is reduced to integer lattices: one Smith form of the
lifted relations gives canonical coordinates, and kernels, images, Hom
groups and quotients are all read off from such Smith forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce
from math import gcd
from typing import Iterator, Sequence

from .errors import ConsistencyError, InputError, UnsupportedRingError
from .linalg import Matrix, Ring, identity, kernel_basis, mat_mul, mat_vec, zkernel, zsnf, zsolve

# ---------------------------------------------------------------------------
# modules


@dataclass(frozen=True)
class FpModule:
    """coker(R^r -> R^g) for the g x r matrix ``relations``."""

    ring: Ring
    gens: int
    relations: Matrix

    def __post_init__(self):
        if self.relations.ring != self.ring:
            raise InputError("relation matrix is over a different ring")
        if self.relations.rows != self.gens:
            raise InputError(f"relations have {self.relations.rows} rows for {self.gens} generators")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_relations(cls, ring: Ring, gens: int, cols: Sequence[Sequence[int]]) -> FpModule:
        return cls(ring, gens, Matrix.from_columns(ring, [list(c) for c in cols], gens))

    @classmethod
    def free(cls, ring: Ring, k: int) -> FpModule:
        return cls(ring, k, Matrix(ring, k, 0))

    @classmethod
    def zero(cls, ring: Ring) -> FpModule:
        return cls.free(ring, 0)

    @classmethod
    def cyclic(cls, ring: Ring, d: int) -> FpModule:
        """R/dR."""
        return cls(ring, 1, Matrix(ring, 1, 1, [[d]]))

    @classmethod
    def diagonal(cls, ring: Ring, moduli: Sequence[int]) -> FpModule:
        """The direct sum of the cyclic modules R/d for d in ``moduli``."""
        k = len(moduli)
        cols = []
        for i, d in enumerate(moduli):
            if ring.reduce(d):
                cols.append([d if j == i else 0 for j in range(k)])
        return cls.from_relations(ring, k, cols)

    # -- cached normal form -------------------------------------------------

    @cached_property
    def zrel(self) -> list[list[int]]:
        """Integer generators of the relation lattice in Z^g."""
        n = self.ring.modulus
        rows = self.relations.lift()
        if n:
            rows = [r + [n if i == j else 0 for j in range(self.gens)] for i, r in enumerate(rows)]
        return rows

    @property
    def zrel_cols(self) -> int:
        return self.relations.cols + (self.gens if self.ring.modulus else 0)

    @cached_property
    def _smith(self):
        return zsnf(self.zrel, self.gens, self.zrel_cols)

    @cached_property
    def moduli(self) -> tuple[int, ...]:
        """Per SNF coordinate: the order of that cyclic summand (0 = infinite)."""
        d = self._smith.diag
        return tuple(d[i] if i < len(d) else 0 for i in range(self.gens))

    @cached_property
    def invariant_factors(self) -> tuple[int, ...]:
        """Non-unit invariant factors in divisibility order, 0 for free Z summands."""
        return tuple(e for e in self.moduli if e != 1)

    def is_zero(self) -> bool:
        return not self.invariant_factors

    def is_finite(self) -> bool:
        return 0 not in self.invariant_factors

    def order(self) -> int | None:
        if not self.is_finite():
            return None
        return reduce(lambda a, b: a * b, self.invariant_factors, 1)

    def is_isomorphic(self, other: FpModule) -> bool:
        return self.ring == other.ring and self.invariant_factors == other.invariant_factors

    def nf(self, x: Sequence[int]) -> tuple[int, ...]:
        """Canonical SNF coordinates of the class of x."""
        y = mat_vec(self._smith.u, x)
        return tuple(v % e if e else v for v, e in zip(y, self.moduli))

    def vec_is_zero(self, x: Sequence[int]) -> bool:
        y = mat_vec(self._smith.u, x)
        return all((v % e == 0) if e else v == 0 for v, e in zip(y, self.moduli))

    def canonical(self, x: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative of the class of x in generator coordinates."""
        y = self.nf(x)
        return tuple(self.ring.reduce(v) for v in mat_vec(self._smith.u_inv, y))

    # -- elements -----------------------------------------------------------

    def element(self, coords: Sequence[int]) -> ModuleElement:
        if len(coords) != self.gens:
            raise InputError(f"element needs {self.gens} coordinates, got {len(coords)}")
        return ModuleElement(self, self.canonical([int(c) for c in coords]))

    def zero_element(self) -> ModuleElement:
        return ModuleElement(self, (0,) * self.gens)

    def generator(self, i: int) -> ModuleElement:
        return self.element([int(i == j) for j in range(self.gens)])

    def elements(self) -> Iterator[ModuleElement]:
        """Every element of a finite module (brute-force helper)."""
        if not self.is_finite():
            raise InputError("module is infinite")
        idx = [i for i, e in enumerate(self.moduli) if e != 1]
        ui = self._smith.u_inv
        for vals in itertools.product(*(range(self.moduli[i]) for i in idx)):
            y = [0] * self.gens
            for i, v in zip(idx, vals):
                y[i] = v
            yield ModuleElement(self, tuple(self.ring.reduce(t) for t in mat_vec(ui, y)))

    # -- structure ----------------------------------------------------------

    @cached_property
    def simplified(self) -> tuple[FpModule, ModuleMorphism, ModuleMorphism]:
        """(D, D -> self, self -> D) with D a direct sum of non-trivial cyclics."""
        kept = [i for i, e in enumerate(self.moduli) if e != 1]
        D = FpModule.diagonal(self.ring, [self.moduli[i] for i in kept])
        s = self._smith
        to_old = [[s.u_inv[r][i] for i in kept] for r in range(self.gens)]
        from_old = [list(s.u[i]) for i in kept]
        return (D, ModuleMorphism(D, self, Matrix(self.ring, self.gens, len(kept), to_old), check=False),
                ModuleMorphism(self, D, Matrix(self.ring, len(kept), self.gens, from_old), check=False))

    def free_cover(self) -> ModuleMorphism:
        return ModuleMorphism(FpModule.free(self.ring, self.gens), self,
                              Matrix.identity(self.ring, self.gens), check=False)

    def identity(self) -> ModuleMorphism:
        return ModuleMorphism(self, self, Matrix.identity(self.ring, self.gens), check=False)

    def label(self) -> str:
        parts = []
        for e in self.invariant_factors:
            if e == 0:
                parts.append("Z")
            elif self.ring.kind == "Fp":
                parts.append(f"F{e}")
            else:
                parts.append(f"Z/{e}")
        return " ⊕ ".join(parts) if parts else "0"

    def __str__(self):
        return self.label()

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "gens": self.gens, "relations": self.relations.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> FpModule:
        try:
            ring = Ring.from_json(data["ring"])
            rel = Matrix.from_json(data["relations"])
            return cls(ring, int(data["gens"]), rel)
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad module JSON: {exc}") from None


@dataclass(frozen=True)
class ModuleElement:
    module: FpModule
    coords: tuple[int, ...]

    def _other(self, other: ModuleElement):
        if other.module != self.module:
            raise InputError("elements of different modules")

    def __add__(self, other: ModuleElement) -> ModuleElement:
        self._other(other)
        return self.module.element([a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: ModuleElement) -> ModuleElement:
        self._other(other)
        return self.module.element([a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> ModuleElement:
        return self.module.element([-a for a in self.coords])

    def __rmul__(self, r: int) -> ModuleElement:
        return self.module.element([r * a for a in self.coords])

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_json(self) -> dict:
        d = self.module.to_json()
        d["coords"] = list(self.coords)
        return d

    @classmethod
    def from_json(cls, data: dict) -> ModuleElement:
        m = FpModule.from_json(data)
        return m.element([int(c) for c in data["coords"]])


# ---------------------------------------------------------------------------
# morphisms


class ModuleMorphism:
    """A module map given by its matrix on generators (target.gens x source.gens)."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: FpModule, target: FpModule, matrix: Matrix, check: bool = True):
        if source.ring != target.ring or matrix.ring != source.ring:
            raise InputError("ring mismatch in morphism")
        if (matrix.rows, matrix.cols) != (target.gens, source.gens):
            raise InputError(f"morphism matrix must be {target.gens}x{source.gens}, "
                             f"got {matrix.rows}x{matrix.cols}")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            image = matrix @ source.relations
            for j in range(image.cols):
                if not target.vec_is_zero(image.column(j)):
                    raise InputError("matrix does not respect the source relations")

    @property
    def ring(self) -> Ring:
        return self.source.ring

    @classmethod
    def zero(cls, source: FpModule, target: FpModule) -> ModuleMorphism:
        return cls(source, target, Matrix(source.ring, target.gens, source.gens), check=False)

    def __call__(self, x: ModuleElement) -> ModuleElement:
        if x.module != self.source:
            raise InputError("element is not in the source")
        return self.target.element(mat_vec(self.matrix.entries, x.coords))

    def apply_vec(self, x: Sequence[int]) -> list[int]:
        return mat_vec(self.matrix.entries, x)

    def __matmul__(self, other: ModuleMorphism) -> ModuleMorphism:
        if other.target != self.source:
            raise InputError("morphisms are not composable")
        return ModuleMorphism(other.source, self.target, self.matrix @ other.matrix, check=False)

    def _same_shape(self, other: ModuleMorphism):
        if other.source != self.source or other.target != self.target:
            raise InputError("morphisms have different source or target")

    def __add__(self, other: ModuleMorphism) -> ModuleMorphism:
        self._same_shape(other)
        return ModuleMorphism(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other: ModuleMorphism) -> ModuleMorphism:
        self._same_shape(other)
        return ModuleMorphism(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self) -> ModuleMorphism:
        return ModuleMorphism(self.source, self.target, -self.matrix, check=False)

    def scale(self, c: int) -> ModuleMorphism:
        return ModuleMorphism(self.source, self.target, self.matrix.scale(c), check=False)

    def is_zero(self) -> bool:
        return all(self.target.vec_is_zero(self.matrix.column(j)) for j in range(self.source.gens))

    def equals(self, other: ModuleMorphism) -> bool:
        self._same_shape(other)
        return (self - other).is_zero()

    def is_mono(self) -> bool:
        return kernel(self)[0].is_zero()

    def is_epi(self) -> bool:
        return cokernel(self)[0].is_zero()

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def preimage(self, y: Sequence[int]) -> list[int] | None:
        """Some x with self(x) = y in the target, or None."""
        T = self.target
        big = [list(r) + list(z) for r, z in zip(self.matrix.entries, T.zrel)]
        x = zsolve(big, list(y), T.gens, self.source.gens + T.zrel_cols)
        if x is None:
            return None
        return [self.ring.reduce(v) for v in x[: self.source.gens]]

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "source": self.source.to_json(),
                "target": self.target.to_json(), "matrix": self.matrix.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> ModuleMorphism:
        try:
            return cls(FpModule.from_json(data["source"]), FpModule.from_json(data["target"]),
                       Matrix.from_json(data["matrix"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad morphism JSON: {exc}") from None

    def __repr__(self):
        return f"ModuleMorphism({self.source} -> {self.target}, {list(map(list, self.matrix.entries))})"


def morphism(source: FpModule, target: FpModule, rows: Sequence[Sequence[int]]) -> ModuleMorphism:
    return ModuleMorphism(source, target, Matrix(source.ring, target.gens, source.gens, rows))


# ---------------------------------------------------------------------------
# lattice helpers


def preimage_lattice(G: Sequence[Sequence[int]], k: int, X: FpModule) -> list[list[int]]:
    """Integer generators of {y in Z^k : G y = 0 in X}; G is X.gens x k."""
    s = X._smith
    e = X.moduli
    UG = mat_mul(s.u, G, X.gens, k) if X.gens else []
    keep = [i for i in range(X.gens) if e[i] != 1]
    finite = [i for i in keep if e[i] != 0]
    rows = []
    for i in keep:
        rows.append(list(UG[i]) + [e[i] if i == j else 0 for j in finite])
    return [v[:k] for v in zkernel(rows, len(rows), k + len(finite))]


def _restrict(ring: Ring, G: Sequence[Sequence[int]], k: int, X: FpModule):
    """The submodule of X generated by the k columns of G, with its inclusion."""
    rel = preimage_lattice(G, k, X)
    rel = [c for c in rel if any(ring.reduce(v) for v in c)]
    S = FpModule.from_relations(ring, k, rel)
    D, to_S, _ = S.simplified
    incl = Matrix(ring, X.gens, k, G) @ to_S.matrix
    return D, ModuleMorphism(D, X, incl, check=False)


def submodule(X: FpModule, gens: Sequence[Sequence[int]]) -> tuple[FpModule, ModuleMorphism]:
    """Submodule of X generated by the given coordinate vectors."""
    k = len(gens)
    G = [[g[i] for g in gens] for i in range(X.gens)]
    return _restrict(X.ring, G, k, X)


def kernel(f: ModuleMorphism) -> tuple[FpModule, ModuleMorphism]:
    M = f.source
    gens = preimage_lattice(f.matrix.entries, M.gens, f.target)
    return submodule(M, gens)


def cokernel(f: ModuleMorphism) -> tuple[FpModule, ModuleMorphism]:
    Q, proj, _ = cokernel_with_section(f)
    return Q, proj


def cokernel_with_section(f: ModuleMorphism):
    """(Q, N -> Q, generator lifts) where the lifts send Q-generators to N-coordinates."""
    N = f.target
    raw = FpModule(N.ring, N.gens, N.relations.hstack(f.matrix))
    D, to_raw, from_raw = raw.simplified
    proj = ModuleMorphism(N, D, from_raw.matrix, check=False)
    return D, proj, to_raw.matrix


def image(f: ModuleMorphism) -> tuple[FpModule, ModuleMorphism]:
    return _restrict(f.ring, f.matrix.entries, f.source.gens, f.target)


def module_homology(f: ModuleMorphism, g: ModuleMorphism) -> FpModule:
    """ker g / im f for composable f, g with g f = 0."""
    if not (g @ f).is_zero():
        raise InputError("composite is not zero")
    K, k = kernel(g)
    _, q = cokernel(f)
    return image(q @ k)[0]


def direct_sum(mods: Sequence[FpModule], ring: Ring | None = None):
    """(S, injections, projections) for the direct sum of ``mods``."""
    if ring is None:
        if not mods:
            raise InputError("empty direct sum needs a ring")
        ring = mods[0].ring
    g = sum(m.gens for m in mods)
    cols = []
    offset = 0
    for m in mods:
        for c in m.relations.column_list():
            cols.append([0] * offset + list(c) + [0] * (g - offset - m.gens))
        offset += m.gens
    S = FpModule.from_relations(ring, g, cols)
    inj, proj = [], []
    offset = 0
    for m in mods:
        e = [[int(i == j + offset) for j in range(m.gens)] for i in range(g)]
        inj.append(ModuleMorphism(m, S, Matrix(ring, g, m.gens, e), check=False))
        p = [[int(j == i + offset) for j in range(g)] for i in range(m.gens)]
        proj.append(ModuleMorphism(S, m, Matrix(ring, m.gens, g, p), check=False))
        offset += m.gens
    return S, inj, proj


def isomorphism(M: FpModule, N: FpModule) -> ModuleMorphism:
    """An explicit isomorphism M -> N, or InputError if none exists."""
    if not M.is_isomorphic(N):
        raise InputError(f"{M} and {N} are not isomorphic")
    _, _, from_M = M.simplified
    _, to_N, _ = N.simplified
    return ModuleMorphism(M, N, to_N.matrix @ from_M.matrix, check=False)


# ---------------------------------------------------------------------------
# Hom


class HomGroup:
    """Hom(M, N) as a direct sum of cyclic groups.

    In SNF coordinates M = (+) R/d_j and N = (+) R/e_i, and
    Hom(R/d, R/e) is cyclic of order gcd(d, e) generated by 1 -> e/gcd(d, e)
    (with the conventions for 0 = infinite order).
    """

    def __init__(self, M: FpModule, N: FpModule):
        if M.ring != N.ring:
            raise InputError("ring mismatch in Hom")
        self.source, self.target, self.ring = M, N, M.ring
        self._slots = []
        for i, e in enumerate(N.moduli):
            if e == 1:
                continue
            for j, d in enumerate(M.moduli):
                if d == 1 or (e == 0 and d != 0):
                    continue
                g = gcd(d, e)
                if g == 1:
                    continue
                self._slots.append((i, j, e // g if e else 1, g))
        self.module = FpModule.diagonal(self.ring, [s[3] for s in self._slots])

    @cached_property
    def generators(self) -> list[ModuleMorphism]:
        M, N = self.source, self.target
        uiN, uM = N._smith.u_inv, M._smith.u
        out = []
        for i, j, t, _ in self._slots:
            rows = [[t * uiN[r][i] * uM[j][c] for c in range(M.gens)] for r in range(N.gens)]
            out.append(ModuleMorphism(M, N, Matrix(self.ring, N.gens, M.gens, rows), check=False))
        return out

    def to_coords(self, f: ModuleMorphism) -> tuple[int, ...]:
        if f.source != self.source or f.target != self.target:
            raise InputError("morphism is not in this Hom group")
        M, N = self.source, self.target
        if not self._slots:
            return ()
        F = mat_mul(N._smith.u, f.matrix.entries, N.gens, M.gens) if N.gens else []
        uiM = M._smith.u_inv
        out = []
        for i, j, t, g in self._slots:
            v = sum(F[i][c] * uiM[c][j] for c in range(M.gens))
            e = N.moduli[i]
            if e:
                v %= e
            q, r = divmod(v, t)
            if r:
                raise ConsistencyError("matrix is not a module map")
            out.append(q % g if g else q)
        return tuple(out)

    def to_morphism(self, coords: Sequence[int]) -> ModuleMorphism:
        M, N = self.source, self.target
        total = [[0] * M.gens for _ in range(N.gens)]
        for c, gen in zip(coords, self.generators):
            if c:
                for r in range(N.gens):
                    row = gen.matrix.entries[r]
                    for s in range(M.gens):
                        total[r][s] += c * row[s]
        return ModuleMorphism(M, N, Matrix(self.ring, N.gens, M.gens, total), check=False)

    def coords_matrix(self, maps: Sequence[ModuleMorphism]) -> Matrix:
        cols = [self.to_coords(f) for f in maps]
        return Matrix.from_columns(self.ring, cols, self.module.gens)


@lru_cache(maxsize=4096)
def hom_group(M: FpModule, N: FpModule) -> HomGroup:
    return HomGroup(M, N)


class HomQuotient:
    """A quotient of a Hom group by the subgroup spanned by some morphisms."""

    def __init__(self, hom: HomGroup, sub: Sequence[ModuleMorphism]):
        self.hom = hom
        k = len(sub)
        inc = ModuleMorphism(FpModule.free(hom.ring, k), hom.module, hom.coords_matrix(sub), check=False)
        self.module, self.proj, self._section = cokernel_with_section(inc)

    def cls(self, f: ModuleMorphism) -> ModuleElement:
        return self.proj(self.hom.module.element(self.hom.to_coords(f)))

    def is_zero_class(self, f: ModuleMorphism) -> bool:
        return self.cls(f).is_zero()

    def rep(self, q: Sequence[int]) -> ModuleMorphism:
        return self.hom.to_morphism(mat_vec(self._section.entries, q))

    @cached_property
    def generators(self) -> list[ModuleMorphism]:
        return [self.rep([int(i == j) for j in range(self.module.gens)]) for i in range(self.module.gens)]


def p_subgroup(a: FpModule, b: FpModule) -> list[ModuleMorphism]:
    """Generators of the maps a -> b factoring through a projective."""
    cover = b.free_cover()
    return [cover @ h for h in hom_group(a, cover.source).generators]


@lru_cache(maxsize=4096)
def stable_hom_quotient(a: FpModule, b: FpModule) -> HomQuotient:
    return HomQuotient(hom_group(a, b), p_subgroup(a, b))


def stable_hom(a: FpModule, b: FpModule) -> FpModule:
    return stable_hom_quotient(a, b).module


def factors_through_projective(f: ModuleMorphism) -> bool:
    return stable_hom_quotient(f.source, f.target).is_zero_class(f)


def post_map(s: ModuleMorphism, Y: FpModule) -> ModuleMorphism:
    """s_* : Hom(Y, X) -> Hom(Y, Z) for s: X -> Z, in Hom coordinates."""
    H1, H2 = hom_group(Y, s.source), hom_group(Y, s.target)
    return ModuleMorphism(H1.module, H2.module, H2.coords_matrix([s @ h for h in H1.generators]), check=False)


def pre_map(s: ModuleMorphism, Z: FpModule) -> ModuleMorphism:
    """s^* : Hom(X, Z) -> Hom(Y, Z) for s: Y -> X, in Hom coordinates."""
    H1, H2 = hom_group(s.target, Z), hom_group(s.source, Z)
    return ModuleMorphism(H1.module, H2.module, H2.coords_matrix([h @ s for h in H1.generators]), check=False)


def factor_through(t: ModuleMorphism, s: ModuleMorphism) -> ModuleMorphism | None:
    """Some u with s u = t (t: Y -> Z, s: X -> Z), or None."""
    if t.target != s.target:
        raise InputError("factor_through needs a common target")
    Y = t.source
    H = hom_group(Y, s.source)
    x = post_map(s, Y).preimage(hom_group(Y, s.target).to_coords(t))
    return None if x is None else H.to_morphism(x)


def cofactor_through(t: ModuleMorphism, s: ModuleMorphism) -> ModuleMorphism | None:
    """Some u with u s = t (s: X -> Y, t: X -> Z), or None."""
    if t.source != s.source:
        raise InputError("cofactor_through needs a common source")
    Z = t.target
    H = hom_group(s.target, Z)
    x = pre_map(s, Z).preimage(hom_group(s.source, Z).to_coords(t))
    return None if x is None else H.to_morphism(x)


# ---------------------------------------------------------------------------
# homological toolkit


def syzygy(M: FpModule) -> tuple[FpModule, ModuleMorphism]:
    """Kernel of the canonical free cover, with its inclusion."""
    return kernel(M.free_cover())


def _prime_parts(d: int, ring: Ring) -> list[tuple[int, int]]:
    """(p, valuation of d at p) for the primes p dividing the modulus and d."""
    return [(p, _valuation(d, p)) for p in ring.prime_powers() if d % p == 0]


def _valuation(d: int, p: int) -> int:
    k = 0
    while d % p == 0:
        d //= p
        k += 1
    return k


def stable_invariants(M: FpModule) -> tuple:
    """Invariants of M modulo projective summands."""
    ring = M.ring
    if ring.modulus == 0:
        return tuple(e for e in M.invariant_factors if e != 0)
    full = ring.prime_powers()
    out = []
    for e in M.invariant_factors:
        for p, a in _prime_parts(e, ring):
            if a != full[p]:
                out.append((p, a))
    return tuple(sorted(out))


def is_projective(M: FpModule) -> bool:
    return not stable_invariants(M)


def stably_isomorphic(M: FpModule, N: FpModule) -> bool:
    return stable_invariants(M) == stable_invariants(N)


def is_injective(M: FpModule) -> bool:
    """Over Z/n injective = projective (self-injective ring); over Z only 0 is."""
    if M.ring.modulus == 0:
        return M.is_zero()
    return is_projective(M)


def injective_envelope(M: FpModule) -> tuple[FpModule, ModuleMorphism]:
    ring = M.ring
    if ring.modulus == 0:
        raise UnsupportedRingError("finitely presented injective envelopes do not exist over Z")
    full = ring.prime_powers()
    D, _, from_M = M.simplified
    big, scale = [], []
    for e in D.invariant_factors:
        E = 1
        for p in full:
            if e % p == 0:
                E *= p ** full[p]
        big.append(E)
        scale.append(E // e)
    I = FpModule.diagonal(ring, big)
    k = len(big)
    emb = Matrix(ring, k, k, [[scale[i] if i == j else 0 for j in range(k)] for i in range(k)])
    return I, ModuleMorphism(M, I, emb @ from_M.matrix, check=False)


def indecomposable_injectives(ring: Ring) -> list[FpModule]:
    if ring.modulus == 0:
        raise UnsupportedRingError("no finitely presented injectives over Z")
    return [FpModule.cyclic(ring, p ** k) for p, k in sorted(ring.prime_powers().items())]


def _hom_free_map(d: Matrix, N: FpModule) -> ModuleMorphism:
    """Hom(d, N): N^b -> N^a for d: R^a -> R^b (b x a), phi -> phi d."""
    ring, g = N.ring, N.gens
    a, b = d.cols, d.rows
    src = direct_sum([N] * b, ring)[0]
    tgt = direct_sum([N] * a, ring)[0]
    rows = [[0] * (b * g) for _ in range(a * g)]
    for i in range(b):
        for j in range(a):
            c = d[i, j]
            if c:
                for t in range(g):
                    rows[j * g + t][i * g + t] = c
    return ModuleMorphism(src, tgt, Matrix(ring, a * g, b * g, rows), check=False)


def free_resolution(M: FpModule, length: int = 3) -> list[Matrix]:
    """Differentials d1, d2, ... of the canonical free resolution of M."""
    ds = [M.relations]
    while len(ds) < length:
        ds.append(kernel_basis(ds[-1]))
    return ds


def ext(i: int, M: FpModule, N: FpModule) -> FpModule:
    if i not in (0, 1, 2):
        raise InputError("Ext degree must be 0, 1 or 2")
    if M.ring != N.ring:
        raise InputError("ring mismatch in Ext")
    ds = free_resolution(M, i + 1)
    ring = M.ring
    hom_maps = [_hom_free_map(d, N) for d in ds]
    if i == 0:
        before = ModuleMorphism.zero(FpModule.zero(ring), hom_maps[0].source)
        return module_homology(before, hom_maps[0])
    return module_homology(hom_maps[i - 1], hom_maps[i])


def tensor(M: FpModule, N: FpModule) -> FpModule:
    """M (x) N on generators e_i (x) f_j (index i * N.gens + j)."""
    if M.ring != N.ring:
        raise InputError("ring mismatch in tensor")
    gm, gn = M.gens, N.gens
    cols = []
    for r in M.relations.column_list():
        for j in range(gn):
            v = [0] * (gm * gn)
            for i in range(gm):
                v[i * gn + j] = r[i]
            cols.append(v)
    for s in N.relations.column_list():
        for i in range(gm):
            v = [0] * (gm * gn)
            for j in range(gn):
                v[i * gn + j] = s[j]
            cols.append(v)
    return FpModule.from_relations(M.ring, gm * gn, cols)


def tensor_elem_is_zero(a: Sequence[ModuleElement], b: Sequence[ModuleElement]) -> bool:
    """Whether sum_i a_i (x) b_i vanishes."""
    if len(a) != len(b):
        raise InputError("tuples of different lengths")
    if not a:
        return True
    M, N = a[0].module, b[0].module
    T = tensor(M, N)
    v = [0] * T.gens
    for x, y in zip(a, b):
        for i, xi in enumerate(x.coords):
            if xi:
                for j, yj in enumerate(y.coords):
                    v[i * N.gens + j] += xi * yj
    return T.vec_is_zero(v)


def tuple_map(C: FpModule, c: Sequence[ModuleElement]) -> ModuleMorphism:
    """R^n -> C sending e_i to c_i."""
    for x in c:
        if x.module != C:
            raise InputError("tuple element not in the module")
    cols = [list(x.coords) for x in c]
    return ModuleMorphism(FpModule.free(C.ring, len(c)), C,
                          Matrix.from_columns(C.ring, cols, C.gens), check=False)


def ann(C: FpModule, c: Sequence[ModuleElement]) -> tuple[FpModule, ModuleMorphism]:
    """{r in R^n : sum r_i c_i = 0} with its inclusion into R^n."""
    return kernel(tuple_map(C, c))
