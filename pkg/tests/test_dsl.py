import random

import pytest
from hypothesis import given, settings, strategies as st

from ppcalc import samples as S
from ppcalc.dsl import PpSyntaxError, format_pp, parse_ast, parse_module, parse_pp
from ppcalc.errors import InputError
from ppcalc.linalg import Ring

Z = Ring.integers()
Z4 = Ring.zmod(4)


def test_parse_examples():
    phi = parse_pp("E y . x1 - 2*y = 0", Z)
    assert (phi.n, phi.m) == (1, 1)
    assert phi.h_free.entries == ((1,),) and phi.h_bound.entries == ((-2,),)
    phi = parse_pp("2*x1 = 0", Z4)
    assert phi.h_free.entries == ((2,),) and phi.m == 0
    phi = parse_pp("x1 = x1", Z)
    assert (phi.n, phi.l) == (1, 0)


def test_quantifier_spellings_and_commas():
    a = parse_pp("exists y1, y2 . x1 = y1 + y2 & 2*y1 = 0", Z)
    b = parse_pp("∃ y1 y2 . x1 = y1 + y2 & 2*y1 = 0", Z)
    assert a == b


def test_right_hand_side_moves_across():
    assert parse_pp("x1 = 2*x2", Z) == parse_pp("x1 - 2*x2 = 0", Z)


def test_arity_override():
    assert parse_pp("x1 = 0", Z, arity=3).n == 3
    with pytest.raises(InputError):
        parse_pp("x2 = 0", Z, arity=1)


@pytest.mark.parametrize("text,pos", [
    ("x1 = 1", 5),
    ("E y . x1 = z", 11),
    ("x1 = y", 5),
    ("x1 + = 0", 5),
    ("E . x1 = 0", 2),
    ("y1 = 0", 0),
    ("x1 = x1 &", 9),
    ("x1 == 0", 4),
    ("x1 = 0 x2", 7),
    ("E y y . x1 = y", 4),
    ("E x1 . x1 = 0", 2),
    ("2 * = 0", 4),
    ("x0 = 0", 0),
    ("x1 = 0 $", 7),
    ("", 0),
])
def test_syntax_errors_report_positions(text, pos):
    with pytest.raises(PpSyntaxError) as info:
        parse_ast(text)
    assert info.value.pos == pos
    assert f"column {pos + 1}" in str(info.value)


def test_zero_arity_is_rejected():
    with pytest.raises(InputError):
        parse_pp("E y . y = 0", Z)


def test_format_mentions_last_variable():
    phi = parse_pp("x1 = 0", Z, arity=2)
    assert parse_pp(format_pp(phi), Z) == phi


def test_parse_module():
    assert parse_module("Z/2 + Z/4", Z).invariant_factors == (2, 4)
    assert parse_module("R^2 ⊕ Z/3", Z).invariant_factors == (3, 0, 0)
    assert parse_module("0", Z4).is_zero()
    with pytest.raises(PpSyntaxError) as info:
        parse_module("Z/2 + Q", Z)
    assert info.value.pos == 6


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([Z, Z4, Ring.fp(5), Ring.zmod(6)]))
def test_print_parse_fixpoint(seed, ring):
    phi = S.random_formula(random.Random(seed), ring).normalized()
    text = format_pp(phi)
    again = parse_pp(text, ring)
    assert again == phi
    assert format_pp(again) == text
