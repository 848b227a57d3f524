import itertools
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from ppcalc.errors import InputError
from ppcalc.linalg import Matrix, Ring, kernel_basis, snf, solve

Z = Ring.integers()
Z4 = Ring.zmod(4)
Z6 = Ring.zmod(6)
F5 = Ring.fp(5)


def det(a):
    if not a:
        return 1
    return sum((-1) ** j * a[0][j] * det([r[:j] + r[j + 1:] for r in a[1:]])
               for j in range(len(a)) if a[0][j])


def determinantal_invariants(rows, r, c):
    """Invariant factors as ratios of gcds of k x k minors."""
    divisors = [1]
    for k in range(1, min(r, c) + 1):
        g = 0
        for ri in itertools.combinations(range(r), k):
            for ci in itertools.combinations(range(c), k):
                g = gcd(g, det([[rows[i][j] for j in ci] for i in ri]))
        divisors.append(g)
    out = []
    for k in range(1, len(divisors)):
        out.append(0 if divisors[k] == 0 else divisors[k] // divisors[k - 1])
    return tuple(out)


def matrices(ring, max_dim=4, bound=5):
    return st.integers(0, max_dim).flatmap(lambda r: st.integers(0, max_dim).flatmap(
        lambda c: st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c),
                           min_size=r, max_size=r).map(lambda rows: Matrix(ring, r, c, rows))))


# --- worked examples ---------------------------------------------------------


def test_snf_diag_2_3_over_z():
    assert snf(Matrix.diagonal(Z, [2, 3])).invariants == (1, 6)


def test_snf_zero_matrix():
    assert snf(Matrix.zero(Z, 2, 3)).invariants == (0, 0)


def test_snf_already_diagonal_over_z4():
    assert snf(Matrix(Z4, 1, 1, [[2]])).invariants == (2,)


def test_solve_examples():
    a = Matrix(Z, 1, 1, [[2]])
    assert solve(a, Matrix(Z, 1, 1, [[4]])) == Matrix(Z, 1, 1, [[2]])
    assert solve(a, Matrix(Z, 1, 1, [[1]])) is None
    x = solve(Matrix(Z4, 1, 1, [[2]]), Matrix(Z4, 1, 1, [[2]]))
    assert x is not None and x[0, 0] in (1, 3)


def test_solve_rejects_mismatches():
    with pytest.raises(InputError):
        solve(Matrix(Z, 1, 1, [[2]]), Matrix(Z4, 1, 1, [[2]]))
    with pytest.raises(InputError):
        solve(Matrix(Z, 1, 1, [[2]]), Matrix(Z, 2, 1, [[2], [0]]))


def test_kernel_examples():
    k = kernel_basis(Matrix(Z4, 1, 1, [[2]]))
    span = {(a * k[0, j]) % 4 for j in range(k.cols) for a in range(4)} | {0}
    assert span == {0, 2}
    assert kernel_basis(Matrix.identity(Z, 3)).cols == 0
    k = kernel_basis(Matrix(Z, 1, 2, [[2, -4]]))
    assert k.cols == 1 and k.column(0) in ((2, 1), (-2, -1))


def test_empty_matrices():
    e = Matrix(Z, 0, 3)
    assert snf(e).invariants == ()
    assert kernel_basis(e).cols == 3
    assert solve(Matrix(Z, 2, 0), Matrix(Z, 2, 1, [[0], [0]])) is not None
    assert solve(Matrix(Z, 2, 0), Matrix(Z, 2, 1, [[1], [0]])) is None


def test_ring_parsing_and_json():
    assert Ring.parse("zmod:4") == Z4 and Ring.parse("fp:5") == F5 and Ring.parse("z") == Z
    for ring in (Z, Z4, F5):
        assert Ring.from_json(ring.to_json()) == ring
        m = Matrix(ring, 2, 2, [[1, 2], [3, 4]])
        assert Matrix.from_json(m.to_json()) == m
    with pytest.raises(InputError):
        Ring.fp(4)
    with pytest.raises(InputError):
        Ring.parse("q")


# --- properties --------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([Z, Z4, Z6, F5]).flatmap(matrices))
def test_snf_reconstructs(m):
    s = snf(m)
    assert s.u @ m @ s.v == s.d
    assert s.u @ s.u_inv == Matrix.identity(m.ring, m.rows)
    assert s.v @ s.v_inv == Matrix.identity(m.ring, m.cols)
    assert len(s.invariants) == min(m.rows, m.cols)


@settings(max_examples=150, deadline=None)
@given(matrices(Z))
def test_snf_matches_determinantal_divisors(m):
    assert snf(m).invariants == determinantal_invariants(m.lift(), m.rows, m.cols)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([Z4, Z6, F5]).flatmap(lambda r: matrices(r, max_dim=2)),
       st.data())
def test_solve_is_exact_and_complete_over_finite_rings(a, data):
    n = a.ring.modulus
    b = Matrix(a.ring, a.rows, 1, [[data.draw(st.integers(0, n - 1))] for _ in range(a.rows)])
    x = solve(a, b)
    if x is not None:
        assert a @ x == b
    else:
        for cand in itertools.product(range(n), repeat=a.cols):
            assert a @ Matrix(a.ring, a.cols, 1, [[v] for v in cand]) != b


@settings(max_examples=100, deadline=None)
@given(matrices(Z, max_dim=3), st.lists(st.integers(-6, 6), min_size=3, max_size=3))
def test_solve_over_z_finds_constructed_solutions(a, x0):
    x = Matrix(Z, a.cols, 1, [[v] for v in x0[: a.cols]])
    b = a @ x
    sol = solve(a, b)
    assert sol is not None and a @ sol == b


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([Z4, Z6, F5]).flatmap(lambda r: matrices(r, max_dim=3)))
def test_kernel_equals_exhaustive_enumeration(a):
    n = a.ring.modulus
    k = kernel_basis(a)
    assert (a @ k).is_zero()
    brute = {v for v in itertools.product(range(n), repeat=a.cols)
             if (a @ Matrix(a.ring, a.cols, 1, [[t] for t in v])).is_zero()}
    span = {tuple([0] * a.cols)}
    frontier = list(span)
    while frontier:  # closure of the span under adding generators
        v = frontier.pop()
        for j in range(k.cols):
            w = tuple((v[i] + k[i, j]) % n for i in range(a.cols))
            if w not in span:
                span.add(w)
                frontier.append(w)
    assert span == brute
