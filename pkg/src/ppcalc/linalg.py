"""Exact matrices over Z, Z/n and F_p, Smith normal form, solving and kernels.

Every supported ring is handled as a quotient of the integers: a ring is
described by its modulus (0 for Z), and all heavy lifting is done over Z
with arbitrary-precision Python integers.  For Z/n the matrix is lifted,
decomposed over Z, and the transforms are reduced mod n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from sympy import factorint, isprime

from .errors import InputError

# JSON integers beyond this magnitude are written as decimal strings.
_JSON_SAFE = 2**53


@dataclass(frozen=True)
class Ring:
    """One of Z, Z/n (n >= 2) or F_p."""

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind == "Z":
            if self.n != 0:
                raise InputError("Z takes no modulus")
        elif self.kind == "Zmod":
            if self.n < 2:
                raise InputError(f"Z/n needs n >= 2, got {self.n}")
        elif self.kind == "Fp":
            if not isprime(self.n):
                raise InputError(f"F_p needs a prime, got {self.n}")
        else:
            raise InputError(f"unknown ring kind {self.kind!r}")

    @classmethod
    def integers(cls) -> Ring:
        return cls("Z")

    @classmethod
    def zmod(cls, n: int) -> Ring:
        return cls("Zmod", n)

    @classmethod
    def fp(cls, p: int) -> Ring:
        return cls("Fp", p)

    @classmethod
    def parse(cls, text: str) -> Ring:
        """Parse ``z``, ``zmod:<n>`` or ``fp:<p>``."""
        t = text.strip().lower()
        if t in ("z", "zz", "integers"):
            return cls.integers()
        kind, _, num = t.partition(":")
        try:
            value = int(num)
        except ValueError:
            raise InputError(f"bad ring {text!r}") from None
        if kind == "zmod":
            return cls.zmod(value)
        if kind == "fp":
            return cls.fp(value)
        raise InputError(f"bad ring {text!r}")

    @property
    def modulus(self) -> int:
        return self.n

    @property
    def is_finite(self) -> bool:
        return self.n != 0

    def reduce(self, x: int) -> int:
        return x % self.n if self.n else x

    def is_unit(self, x: int) -> bool:
        if self.n == 0:
            return x in (1, -1)
        return gcd(x, self.n) == 1

    def prime_powers(self) -> dict[int, int]:
        """Factorisation {p: k} of the modulus (empty for Z)."""
        return dict(factorint(self.n)) if self.n else {}

    def elements(self) -> range:
        if not self.n:
            raise InputError("Z is infinite")
        return range(self.n)

    def label(self) -> str:
        if self.kind == "Z":
            return "Z"
        if self.kind == "Fp":
            return f"F{self.n}"
        return f"Z/{self.n}"

    def spec(self) -> str:
        return {"Z": "z", "Zmod": f"zmod:{self.n}", "Fp": f"fp:{self.n}"}[self.kind]

    def to_json(self) -> dict:
        if self.kind == "Z":
            return {"kind": "Z"}
        return {"kind": self.kind, "n": self.n}

    @classmethod
    def from_json(cls, data: dict) -> Ring:
        kind = data.get("kind")
        if kind == "Z":
            return cls.integers()
        if kind in ("Zmod", "Fp"):
            return cls(kind, int(data["n"]))
        raise InputError(f"bad ring JSON {data!r}")

    def __str__(self):
        return self.label()


# ---------------------------------------------------------------------------
# plain integer list-of-lists helpers (the computational substrate)


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> list[list[int]]:
    return [[0] * c for _ in range(r)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], inner: int | None = None,
            cols: int | None = None) -> list[list[int]]:
    if inner is None:
        inner = len(b)
    if cols is None:
        cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        acc[j] += x * bk[j]
        out.append(acc)
    return out


def mat_vec(a: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    return [[row[j] for row in a] for j in range(ncols)]


def columns(a: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    return transpose(a, ncols)


def from_columns(cols: Sequence[Sequence[int]], nrows: int) -> list[list[int]]:
    return [[c[i] for c in cols] for i in range(nrows)]


def hstack(nrows: int, *blocks: Sequence[Sequence[int]]) -> list[list[int]]:
    return [sum((list(b[i]) for b in blocks), []) for i in range(nrows)]


def reduce_mod(a: Iterable[Iterable[int]], n: int) -> list[list[int]]:
    if not n:
        return [list(r) for r in a]
    return [[x % n for x in r] for r in a]


@dataclass
class _ZSmith:
    """Integer Smith form ``u @ a @ v == d`` with explicit inverses."""

    u: list[list[int]]
    u_inv: list[list[int]]
    v: list[list[int]]
    v_inv: list[list[int]]
    diag: list[int]
    rank: int


def zsnf(a: Sequence[Sequence[int]], m: int, n: int, inverses: bool = True) -> _ZSmith:
    """Smith normal form of an m x n integer matrix.

    Diagonal entries are non-negative, the nonzero ones come first and each
    divides the next.  With ``inverses=False`` the fields u_inv and v_inv
    are left empty.
    """
    A = [list(r) for r in a]
    U, V = identity(m), identity(n)
    Ui, Vi = (identity(m), identity(n)) if inverses else ([], [0] * n)

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def row_add(i, j, c):  # row_i += c * row_j
        Ai, Aj = A[i], A[j]
        for k in range(n):
            if Aj[k]:
                Ai[k] += c * Aj[k]
        Uis, Ujs = U[i], U[j]
        for k in range(m):
            if Ujs[k]:
                Uis[k] += c * Ujs[k]
        for r in Ui:
            if r[i]:
                r[j] -= c * r[i]

    def row_neg(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    def col_swap(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        if inverses:
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def col_add(i, j, c):  # col_i += c * col_j
        for r in A:
            if r[j]:
                r[i] += c * r[j]
        for r in V:
            if r[j]:
                r[i] += c * r[j]
        if inverses:
            Vis, Vjs = Vi[i], Vi[j]
            for k in range(n):
                if Vis[k]:
                    Vjs[k] -= c * Vis[k]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                x = Ai[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_add(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    col_add(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        dirty = True
            if dirty:
                # move the smallest entry of row/column t to the pivot
                best = (abs(p), t, t)
                for i in range(t + 1, m):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                _, bi, bj = best
                if bi != t:
                    row_swap(t, bi)
                if bj != t:
                    col_swap(t, bj)
                continue
            bad = None
            for i in range(t + 1, m):
                Ai = A[i]
                for j in range(t + 1, n):
                    if Ai[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if A[t][t] < 0:
            row_neg(t)
        t += 1
    diag = [A[i][i] for i in range(min(m, n))]
    rank = sum(1 for x in diag if x)
    return _ZSmith(U, Ui, V, Vi if inverses else [], diag, rank)


@lru_cache(maxsize=4096)
def _zsnf_light(key: tuple, m: int, n: int) -> _ZSmith:
    # shared result: callers must not mutate it
    return zsnf(key, m, n, inverses=False)


def zsolve(a: Sequence[Sequence[int]], b: Sequence[int], m: int, n: int) -> list[int] | None:
    """Some integer x with a @ x == b, or None."""
    if m == 0:
        return [0] * n
    s = _zsnf_light(zsnf_cached_key(a), m, n)
    c = mat_vec(s.u, b)
    y = [0] * n
    for i in range(m):
        d = s.diag[i] if i < len(s.diag) else 0
        if d:
            q, r = divmod(c[i], d)
            if r:
                return None
            y[i] = q
        elif c[i]:
            return None
    return mat_vec(s.v, y)


def zkernel(a: Sequence[Sequence[int]], m: int, n: int) -> list[list[int]]:
    """Basis (list of column vectors) of the integer kernel of a."""
    if n == 0:
        return []
    s = _zsnf_light(zsnf_cached_key(a), m, n)
    return [[s.v[i][j] for i in range(n)] for j in range(s.rank, n)]


def zsnf_cached_key(a: Sequence[Sequence[int]]) -> tuple:
    return tuple(tuple(r) for r in a)


# ---------------------------------------------------------------------------
# public Matrix type


def _canon_entries(ring: Ring, rows: int, cols: int, entries) -> tuple[tuple[int, ...], ...]:
    out = []
    grid = list(entries)
    if len(grid) != rows:
        raise InputError(f"expected {rows} rows, got {len(grid)}")
    n = ring.modulus
    for r in grid:
        r = tuple(map(int, r))
        if len(r) != cols:
            raise InputError(f"expected {cols} columns, got {len(r)}")
        out.append(tuple(x % n for x in r) if n else r)
    return tuple(out)


@dataclass(frozen=True)
class Matrix:
    ring: Ring
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...] = field(repr=False)

    def __init__(self, ring: Ring, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise InputError("negative matrix dimension")
        if entries is None:
            entries = zeros(rows, cols)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", _canon_entries(ring, rows, cols, entries))

    @classmethod
    def from_rows(cls, ring: Ring, rows: Sequence[Sequence[int]], cols: int | None = None) -> Matrix:
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise InputError("cannot infer column count of an empty row list")
            cols = len(rows[0])
        return cls(ring, len(rows), cols, rows)

    @classmethod
    def from_columns(cls, ring: Ring, cols: Sequence[Sequence[int]], nrows: int) -> Matrix:
        return cls(ring, nrows, len(cols), from_columns(cols, nrows))

    @classmethod
    def identity(cls, ring: Ring, n: int) -> Matrix:
        return cls(ring, n, n, identity(n))

    @classmethod
    def zero(cls, ring: Ring, rows: int, cols: int) -> Matrix:
        return cls(ring, rows, cols)

    @classmethod
    def diagonal(cls, ring: Ring, values: Sequence[int]) -> Matrix:
        k = len(values)
        return cls(ring, k, k, [[values[i] if i == j else 0 for j in range(k)] for i in range(k)])

    def lift(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def column_list(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def _check(self, other: Matrix):
        if self.ring != other.ring:
            raise InputError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.cols != other.rows:
            raise InputError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        prod = mat_mul(self.entries, other.entries, self.cols, other.cols)
        return Matrix(self.ring, self.rows, other.cols, prod)

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InputError("shape mismatch in addition")
        return Matrix(self.ring, self.rows, self.cols,
                      [[x + y for x, y in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self) -> Matrix:
        return Matrix(self.ring, self.rows, self.cols, [[-x for x in r] for r in self.entries])

    def __sub__(self, other: Matrix) -> Matrix:
        return self + (-other)

    def scale(self, c: int) -> Matrix:
        return Matrix(self.ring, self.rows, self.cols, [[c * x for x in r] for r in self.entries])

    def transpose(self) -> Matrix:
        return Matrix(self.ring, self.cols, self.rows, transpose(self.entries, self.cols))

    @property
    def T(self) -> Matrix:
        return self.transpose()

    def hstack(self, *others: Matrix) -> Matrix:
        for o in others:
            self._check(o)
            if o.rows != self.rows:
                raise InputError("row mismatch in hstack")
        return Matrix(self.ring, self.rows, self.cols + sum(o.cols for o in others),
                      hstack(self.rows, self.entries, *(o.entries for o in others)))

    def vstack(self, *others: Matrix) -> Matrix:
        for o in others:
            self._check(o)
            if o.cols != self.cols:
                raise InputError("column mismatch in vstack")
        rows = list(self.entries) + [r for o in others for r in o.entries]
        return Matrix(self.ring, len(rows), self.cols, rows)

    def block_diag(self, other: Matrix) -> Matrix:
        self._check(other)
        top = [list(r) + [0] * other.cols for r in self.entries]
        bottom = [[0] * self.cols + list(r) for r in other.entries]
        return Matrix(self.ring, self.rows + other.rows, self.cols + other.cols, top + bottom)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix(self.ring, len(rows), len(cols), [[self.entries[i][j] for j in cols] for i in rows])

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def to_json(self) -> dict:
        def enc(x):
            return x if abs(x) < _JSON_SAFE else str(x)

        return {"ring": self.ring.to_json(), "rows": self.rows, "cols": self.cols,
                "entries": [[enc(x) for x in r] for r in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> Matrix:
        try:
            ring = Ring.from_json(data["ring"])
            rows, cols = int(data["rows"]), int(data["cols"])
            entries = [[int(x) for x in r] for r in data["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad matrix JSON: {exc}") from None
        return cls(ring, rows, cols, entries)

    def __str__(self):
        if not self.rows or not self.cols:
            return f"[{self.rows}x{self.cols} empty]"
        return "\n".join("[" + " ".join(str(x) for x in r) + "]" for r in self.entries)


@dataclass(frozen=True)
class SmithDecomposition:
    u: Matrix
    d: Matrix
    v: Matrix
    u_inv: Matrix
    v_inv: Matrix
    invariants: tuple[int, ...]


def _unit_for(d: int, n: int) -> tuple[int, int]:
    """A unit w mod n with w*d = gcd(d, n) (mod n), and its inverse."""
    g = gcd(d, n)
    if g == n:
        return 1, 1
    m = n // g
    w0 = pow((d // g) % m, -1, m)
    for k in range(g + 1):
        w = w0 + k * m
        if gcd(w, n) == 1:
            return w % n, pow(w, -1, n)
    raise AssertionError("no unit found")  # unreachable: Dirichlet-style argument


def snf(m: Matrix) -> SmithDecomposition:
    """Smith normal form ``u @ m @ v == d`` with stored inverses.

    Over Z/n (and F_p) the matrix is lifted to Z, decomposed and reduced; the
    diagonal is then normalised by units to divisors of n.
    """
    ring = m.ring
    r, c = m.rows, m.cols
    s = zsnf(m.entries, r, c)
    diag = list(s.diag)
    u, ui = s.u, s.u_inv
    n = ring.modulus
    if n:
        u = [list(row) for row in u]
        ui = [list(row) for row in ui]
        for i, d in enumerate(diag):
            w, winv = _unit_for(d % n, n)
            if w != 1:
                u[i] = [w * x for x in u[i]]
                for row in ui:
                    row[i] *= winv
            diag[i] = gcd(d, n) % n
    k = min(r, c)
    d_entries = [[diag[i] if i == j and i < k else 0 for j in range(c)] for i in range(r)]
    dec = SmithDecomposition(
        u=Matrix(ring, r, r, u), d=Matrix(ring, r, c, d_entries), v=Matrix(ring, c, c, s.v),
        u_inv=Matrix(ring, r, r, ui), v_inv=Matrix(ring, c, c, s.v_inv),
        invariants=tuple(ring.reduce(x) for x in diag[:k]))
    if (dec.u @ m @ dec.v) != dec.d:
        raise AssertionError("Smith decomposition failed to reconstruct")
    if dec.u @ dec.u_inv != Matrix.identity(ring, r) or dec.v @ dec.v_inv != Matrix.identity(ring, c):
        raise AssertionError("Smith transform inverse check failed")
    return dec


def _lift_with_modulus(a: Matrix) -> list[list[int]]:
    """Rows of [a | n*I] over Z (just a when the ring is Z)."""
    n = a.ring.modulus
    rows = a.lift()
    if n:
        rows = [r + [n if i == j else 0 for j in range(a.rows)] for i, r in enumerate(rows)]
    return rows


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Some X with a @ X == b, or None when no solution exists."""
    if a.ring != b.ring:
        raise InputError(f"ring mismatch: {a.ring} vs {b.ring}")
    if a.rows != b.rows:
        raise InputError(f"row mismatch: a is {a.rows}x{a.cols}, b is {b.rows}x{b.cols}")
    n = a.ring.modulus
    big = _lift_with_modulus(a)
    width = a.cols + (a.rows if n else 0)
    cols = []
    for j in range(b.cols):
        x = zsolve(big, list(b.column(j)), a.rows, width)
        if x is None:
            return None
        cols.append(x[: a.cols])
    return Matrix(a.ring, a.cols, b.cols, from_columns(cols, a.cols) if cols else zeros(a.cols, 0))


def kernel_basis(a: Matrix) -> Matrix:
    """Columns generating {x : a @ x == 0} (as a module over Z/n)."""
    n = a.ring.modulus
    big = _lift_with_modulus(a)
    width = a.cols + (a.rows if n else 0)
    gens = []
    seen = set()
    for v in zkernel(big, a.rows, width):
        x = tuple(a.ring.reduce(t) for t in v[: a.cols])
        if any(x) and x not in seen:
            seen.add(x)
            gens.append(x)
    return Matrix.from_columns(a.ring, gens, a.cols)
