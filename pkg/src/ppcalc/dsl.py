"""Text syntax for pp formulas and small modules.

Formulas::

    formula  := [("E" | "exists" | "∃") var+ "."] equation ("&" equation)*
    equation := term "=" term
    term     := ["+" | "-"] mono (("+" | "-") mono)*
    mono     := int "*" var | var | "0"

Free variables are x1, x2, ... (arity = largest index used); bound
variables start with ``y`` and must be quantified.  Constants other than 0
are rejected, since pp formulas are homogeneous.

Modules are direct sums such as ``Z/2 + Z/4``, ``R^2`` or ``0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InputError
from .fpmod import FpModule
from .linalg import Ring
from .pp import PpFormula


class PpSyntaxError(InputError):
    """A parse error carrying the 0-based column of the offending token."""

    def __init__(self, message: str, pos: int, text: str):
        self.pos = pos
        self.text = text
        caret = " " * pos + "^"
        super().__init__(f"column {pos + 1}: {message}\n  {text}\n  {caret}")


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>∃|[-+*=&.,]))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "name", "sym", "end"
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, i = [], 0
    while True:
        while i < len(text) and text[i].isspace():
            i += 1
        if i == len(text):
            toks.append(_Tok("end", "", i))
            return toks
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            raise PpSyntaxError(f"unexpected character {text[i]!r}", i, text)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        i = m.end()


@dataclass
class PpAst:
    """Quantified variables in order and equations as {variable: coefficient}."""

    bound: list[str]
    equations: list[dict[str, int]]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise PpSyntaxError(message, tok.pos, self.text)

    def eat(self, value: str):
        if self.tok.value != value or self.tok.kind not in ("sym", "name"):
            shown = self.tok.value or "end of input"
            self.error(f"expected {value!r}, found {shown!r}")
        self.i += 1

    def parse(self) -> PpAst:
        bound: list[str] = []
        if self.tok.value in ("E", "exists", "∃"):
            self.i += 1
            while self.tok.kind == "name":
                name = self.tok.value
                if not re.fullmatch(r"y\d*", name):
                    self.error(f"quantified variable {name!r} must be named y or y<k>")
                if name in bound:
                    self.error(f"variable {name!r} quantified twice")
                bound.append(name)
                self.i += 1
                if self.tok.value == ",":
                    self.i += 1
            if not bound:
                self.error("expected a variable after the quantifier")
            self.eat(".")
        eqs = [self.equation(bound)]
        while self.tok.value == "&":
            self.i += 1
            eqs.append(self.equation(bound))
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.value!r}")
        return PpAst(bound, eqs)

    def equation(self, bound: list[str]) -> dict[str, int]:
        lhs = self.term(bound)
        self.eat("=")
        rhs = self.term(bound)
        for v, c in rhs.items():
            lhs[v] = lhs.get(v, 0) - c
        return lhs

    def term(self, bound: list[str]) -> dict[str, int]:
        out: dict[str, int] = {}
        sign = 1
        if self.tok.value in ("+", "-"):
            sign = -1 if self.tok.value == "-" else 1
            self.i += 1
        while True:
            var, coef = self.mono(bound)
            if var is not None:
                out[var] = out.get(var, 0) + sign * coef
            if self.tok.value in ("+", "-"):
                sign = -1 if self.tok.value == "-" else 1
                self.i += 1
            else:
                return out

    def mono(self, bound: list[str]):
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            if self.tok.value == "*":
                self.i += 1
                return self.var(bound), int(tok.value)
            if int(tok.value) != 0:
                self.error("constants are not allowed in pp formulas", tok)
            return None, 0
        if tok.kind == "name":
            return self.var(bound), 1
        self.error(f"expected a term, found {tok.value or 'end of input'!r}")

    def var(self, bound: list[str]) -> str:
        tok = self.tok
        if tok.kind != "name":
            self.error(f"expected a variable, found {tok.value or 'end of input'!r}")
        name = tok.value
        if re.fullmatch(r"x[1-9]\d*", name):
            self.i += 1
            return name
        if re.fullmatch(r"y\d*", name):
            if name not in bound:
                self.error(f"variable {name!r} is not quantified")
            self.i += 1
            return name
        self.error(f"unknown variable {name!r}; use x1, x2, ... or quantified y variables")


def parse_ast(text: str) -> PpAst:
    return _Parser(text).parse()


def parse_pp(text: str, ring: Ring, side: str = "left", arity: int | None = None) -> PpFormula:
    """Parse a formula; zero equations are dropped and unused bound variables removed."""
    ast = parse_ast(text)
    used = [int(v[1:]) for eq in ast.equations for v in eq if v.startswith("x")]
    n = max(used, default=0)
    if arity is not None:
        if arity < n:
            raise InputError(f"formula mentions x{n} but arity {arity} was requested")
        n = arity
    if n == 0:
        raise InputError("a pp formula needs at least one free variable x1")
    m = len(ast.bound)
    index = {name: n + j for j, name in enumerate(ast.bound)}
    rows = []
    for eq in ast.equations:
        row = [0] * (n + m)
        for v, c in eq.items():
            row[int(v[1:]) - 1 if v.startswith("x") else index[v]] += c
        rows.append(row)
    return PpFormula.from_rows(ring, n, m, rows, side).normalized()


def _signed(ring: Ring, v: int) -> int:
    """The representative of v of least absolute value."""
    n = ring.modulus
    v = ring.reduce(v)
    return v - n if n and v > n // 2 else v


def _format_sum(terms: list[tuple[int, str]]) -> str:
    parts = []
    for c, name in terms:
        mag = abs(c)
        mono = name if mag == 1 else f"{mag}*{name}"
        if not parts:
            parts.append(mono if c > 0 else f"-{mono}")
        else:
            parts.append(f"+ {mono}" if c > 0 else f"- {mono}")
    return " ".join(parts) if parts else "0"


def format_pp(phi: PpFormula) -> str:
    """Inverse of parse_pp up to normalisation."""
    ring, n, m = phi.ring, phi.n, phi.m
    names = [f"x{i + 1}" for i in range(n)] + [f"y{j + 1}" for j in range(m)]
    eqs = []
    mentioned = set()
    for row in phi.rows():
        terms = [(_signed(ring, c), names[k]) for k, c in enumerate(row) if _signed(ring, c)]
        mentioned.update(k for k, c in enumerate(row) if _signed(ring, c))
        eqs.append(f"{_format_sum(terms)} = 0")
    if n - 1 not in mentioned:
        eqs.append(f"x{n} = x{n}")
    body = " & ".join(eqs)
    if m:
        return f"E {' '.join(names[n:])} . {body}"
    return body


_SUMMAND = re.compile(r"^(?:(?P<zero>0)|(?P<free>R|Z)(?:\^(?P<k>\d+))?|(?:Z|R)/(?P<d>\d+)(?:\^(?P<k2>\d+))?)$")


def parse_module(text: str, ring: Ring) -> FpModule:
    """A direct sum of cyclic modules: ``R``, ``R^2``, ``Z/4``, ``Z/2 + Z/4``, ``0``.

    ``Z`` and ``R`` both denote the free module of rank one.
    """
    moduli: list[int] = []
    pos = 0
    for part in re.split(r"(\+|⊕)", text):
        if part in ("+", "⊕"):
            pos += len(part)
            continue
        s = part.strip()
        m = _SUMMAND.match(s)
        if m is None:
            offset = pos + len(part) - len(part.lstrip())
            raise PpSyntaxError(f"bad module summand {s!r}", offset, text)
        if m.group("zero"):
            pass
        elif m.group("free"):
            moduli += [0] * int(m.group("k") or 1)
        else:
            d = int(m.group("d"))
            if d == 0:
                raise PpSyntaxError("use Z or R for the free module", pos, text)
            moduli += [d] * int(m.group("k2") or 1)
        pos += len(part)
    return FpModule.diagonal(ring, moduli)
