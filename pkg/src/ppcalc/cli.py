"""Command line interface: ``ppcalc <group> <command> ...``.

Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import fpfun, fpmod, pp, suites
from .dsl import parse_module, parse_pp, format_pp
from .errors import ConsistencyError, PpcalcError
from .fpfun import FpFunctor
from .fpmod import FpModule, ModuleMorphism
from .linalg import Matrix, Ring, snf
from .pp import PpPair


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument decoding


def _load_json(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def _matrix_rows(text: str) -> list[list[int]]:
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad matrix {text!r}: {exc}") from None
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise UsageError(f"matrix must be a list of rows, got {text!r}")
    return rows


def _module(text: str, ring: Ring) -> FpModule:
    if text.lstrip().startswith(("{", "@")):
        return FpModule.from_json(_load_json(text))
    return parse_module(text, ring)


def _morphism(text: str, ring: Ring) -> ModuleMorphism:
    """``SOURCE->TARGET:[[rows]]`` or morphism JSON."""
    if text.lstrip().startswith(("{", "@")):
        return ModuleMorphism.from_json(_load_json(text))
    head, sep, rows = text.partition(":")
    src, arrow, dst = head.partition("->")
    if not sep or not arrow:
        raise UsageError(f"morphism must look like 'Z->Z/2:[[1]]', got {text!r}")
    M, N = _module(src, ring), _module(dst, ring)
    return ModuleMorphism(M, N, Matrix(ring, N.gens, M.gens, _matrix_rows(rows)))


def _formula(text: str, ring: Ring) -> pp.PpFormula:
    if text.lstrip().startswith(("{", "@")):
        return pp.PpFormula.from_json(_load_json(text))
    return parse_pp(text, ring)


def _functor(text: str, ring: Ring) -> FpFunctor:
    """Functor shorthands.

    contra:MORPH, co:MORPH   presented by a module map
    rep:M, corep:M           Hom(-, M) contravariantly or covariantly
    stable:M                 stable Hom(-, M)
    l0y:M                    L_0(Y)(M), contravariant
    pp:FORMULA               a pp formula as a covariant functor
    pair:TOP / BOTTOM        a pp-pair
    or functor JSON.
    """
    if text.lstrip().startswith(("{", "@")):
        return FpFunctor.from_json(_load_json(text))
    kind, sep, rest = text.partition(":")
    if not sep:
        raise UsageError(f"functor must be KIND:ARGS or JSON, got {text!r}")
    if kind in ("contra", "co"):
        return FpFunctor(kind, _morphism(rest, ring))
    if kind == "rep":
        return fpfun.representable(_module(rest, ring), "contra")
    if kind == "corep":
        return fpfun.representable(_module(rest, ring), "co")
    if kind == "stable":
        return fpfun.stable_functor(_module(rest, ring))
    if kind == "l0y":
        return fpfun.l0y(_module(rest, ring))
    if kind == "pp":
        return pp.pp_to_functor(_formula(rest, ring))
    if kind == "pair":
        top, slash, bottom = rest.partition("/")
        if not slash:
            raise UsageError("pair functor needs TOP / BOTTOM")
        return pp.pair_to_functor(PpPair(_formula(top, ring), _formula(bottom, ring)))
    raise UsageError(f"unknown functor kind {kind!r}")


# ---------------------------------------------------------------------------
# output


class Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, text: str, data):
        if self.as_json:
            print(json.dumps(data, sort_keys=True, ensure_ascii=False))
        else:
            print(text)


def _mod_data(M: FpModule) -> dict:
    return {"label": M.label(), "invariant_factors": list(M.invariant_factors), "module": M.to_json()}


def _formula_data(phi: pp.PpFormula) -> dict:
    return {"text": format_pp(phi), "formula": phi.to_json()}


# ---------------------------------------------------------------------------
# command handlers


def cmd_pp(args, ring: Ring, out: Out) -> int:
    c = args.command
    if c == "parse":
        phi = parse_pp(args.formula, ring, side=args.side)
        out.emit(f"{format_pp(phi)}\nn={phi.n} m={phi.m}\nh_free={list(map(list, phi.h_free.entries))}"
                 f"\nh_bound={list(map(list, phi.h_bound.entries))}", _formula_data(phi))
    elif c == "print":
        phi = pp.PpFormula.from_json(_load_json(args.formula))
        out.emit(format_pp(phi), _formula_data(phi))
    elif c == "eval":
        phi, M = _formula(args.formula, ring), _module(args.at, ring)
        S, incl = pp.solution_set(phi, M)
        out.emit(S.label(), {**_mod_data(S), "inclusion": incl.to_json()})
    elif c == "dual":
        d = pp.dual(_formula(args.formula, ring))
        out.emit(format_pp(d), _formula_data(d))
    elif c == "leq":
        v = pp.leq(_formula(args.a, ring), _formula(args.b, ring))
        out.emit(str(v).lower(), {"leq": v})
    elif c in ("meet", "join"):
        f = getattr(pp, c)(_formula(args.a, ring), _formula(args.b, ring))
        out.emit(format_pp(f), _formula_data(f))
    elif c == "freereal":
        real = pp.free_realisation(_formula(args.formula, ring))
        D, _, from_C = real.c_module.simplified
        tup = [from_C(x) for x in real.c_tuple]
        out.emit(f"C = {D.label()}\nc = {[list(x.coords) for x in tup]}",
                 {**_mod_data(D), "tuple": [x.to_json() for x in tup]})
    elif c == "ann":
        real = pp.free_realisation(_formula(args.formula, ring))
        K, k = fpmod.ann(real.c_module, real.c_tuple)
        out.emit(f"{K.label()}\ngenerators={[list(col) for col in k.matrix.column_list()]}",
                 {**_mod_data(K), "inclusion": k.to_json()})
    return 0


def cmd_pair(args, ring: Ring, out: Out) -> int:
    p = PpPair(_formula(args.top, ring), _formula(args.bottom, ring))
    c = args.command
    if c == "defect":
        W = pp.defect_pair(p, args.method)
        out.emit(W.label(), {**_mod_data(W), "method": args.method})
    elif c in ("sigma", "rho", "mu", "nu"):
        f = getattr(pp, c)(p)
        out.emit(format_pp(f), _formula_data(f))
    elif c == "dual":
        d = pp.agj_dual_pair(p)
        out.emit(f"{format_pp(d.top)}  /  {format_pp(d.bottom)}",
                 {"top": _formula_data(d.top), "bottom": _formula_data(d.bottom)})
    elif c == "calculus":
        v = pp.calculus_check(p)
        out.emit(str(v).lower(), {"equal_at_R": v})
    return 0


def _fun_data(F: FpFunctor) -> dict:
    return {"functor": F.to_json(), "defect": fpfun.defect(F).label()}


def _fun_text(F: FpFunctor, at: FpModule | None) -> str:
    text = f"{F.variance} functor presented by {F.pres.source.label()} -> {F.pres.target.label()} " \
           f"{[list(r) for r in F.pres.matrix.entries]}"
    if at is not None:
        text += f"\nvalue at {at.label()}: {F(at).label()}"
    return text


def cmd_fun(args, ring: Ring, out: Out) -> int:
    c = args.command
    at = _module(args.at, ring) if getattr(args, "at", None) else None
    if c == "l0y":
        F = fpfun.l0y(_module(args.module, ring), args.variance)
    elif c == "norm":
        F = fpfun.norm_image(_module(args.module, ring))
    else:
        F = _functor(args.functor, ring)
    if c == "eval":
        V = F(at)
        out.emit(V.label(), _mod_data(V))
        return 0
    if c == "defect":
        W = fpfun.defect(F)
        out.emit(W.label(), _mod_data(W))
        return 0
    if c in ("sub0", "quot0"):
        F = getattr(fpfun, c)(F)[0]
    if c in ("sub0", "quot0", "l0y", "norm"):
        data = _fun_data(F)
        if at is not None:
            data["value"] = F(at).label()
        out.emit(_fun_text(F, at), data)
        return 0
    if c in ("in-fp0", "in-fpbang", "in-fpbangstar"):
        test = {"in-fp0": fpfun.in_fp0, "in-fpbang": fpfun.in_fp_bang,
                "in-fpbangstar": fpfun.in_fp_bangstar}[c]
        v = test(F)
        out.emit(str(v).lower(), {c: v})
        return 0
    if c in ("hom", "ext"):
        G = _functor(args.other, ring)
        V = fpfun.hom_functors(F, G) if c == "hom" else fpfun.ext_functors(args.degree, F, G)
        out.emit(V.label(), _mod_data(V))
        return 0
    if c == "derived":
        if at is None:
            raise UsageError("derived needs --at")
        V = fpfun.derived_quot0_eval(F, args.degree, at)
        out.emit(V.label(), _mod_data(V))
        return 0
    raise UsageError(f"unknown command {c}")


def cmd_mod(args, ring: Ring, out: Out) -> int:
    c = args.command
    if c == "snf":
        rows = _matrix_rows(args.matrix)
        m = Matrix.from_rows(ring, rows, len(rows[0]) if rows else 0)
        s = snf(m)
        data = {"invariants": list(s.invariants), "u": s.u.to_json(), "d": s.d.to_json(), "v": s.v.to_json()}
        out.emit(f"invariants: {list(s.invariants)}", data)
        return 0
    if c in ("ker", "coker"):
        f = _morphism(args.morphism, ring)
        K, k = fpmod.kernel(f) if c == "ker" else fpmod.cokernel(f)
        out.emit(K.label(), {**_mod_data(K), "map": k.to_json()})
        return 0
    M = _module(args.module, ring)
    if c in ("hom", "stablehom", "tensor", "ext"):
        N = _module(args.other, ring)
        if c == "hom":
            H = fpmod.hom_group(M, N)
            V = H.module
            extra = {"generators": [g.to_json() for g in H.generators]}
        elif c == "stablehom":
            V, extra = fpmod.stable_hom(M, N), {}
        elif c == "tensor":
            V, extra = fpmod.tensor(M, N), {}
        else:
            V, extra = fpmod.ext(args.degree, M, N), {}
        out.emit(V.label(), {**_mod_data(V), **extra})
    elif c == "syzygy":
        V, k = fpmod.syzygy(M)
        out.emit(V.label(), {**_mod_data(V), "inclusion": k.to_json()})
    elif c == "env":
        V, e = fpmod.injective_envelope(M)
        out.emit(f"{V.label()}\nembedding={[list(r) for r in e.matrix.entries]}",
                 {**_mod_data(V), "embedding": e.to_json()})
    return 0


def cmd_check(args, ring: Ring, out: Out) -> int:
    if args.suite == "list":
        out.emit("\n".join(suites.SUITES), {"suites": list(suites.SUITES)})
        return 0
    if args.replay:
        try:
            parts = args.replay.split("/")
            comp, ring_spec, index = parts[0], parts[1], int(parts[2])
        except (ValueError, IndexError):
            raise UsageError("--replay expects COMPONENT/RING/INDEX, e.g. random/zmod:4/17") from None
        fail = suites.replay(args.suite, args.seed, comp, Ring.parse(ring_spec), index)
        out.emit("ok" if fail is None else json.dumps(fail, sort_keys=True),
                 {"ok": fail is None, "failure": fail})
        return 0 if fail is None else 1
    report = suites.run_suite(args.suite, args.seed, args.cases)
    if out.as_json:
        data = report.to_json()
        print(json.dumps(data, sort_keys=True, ensure_ascii=False))
    else:
        print(report.summary())
        for f in report.failures:
            print(json.dumps(f, sort_keys=True, ensure_ascii=False))
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# parser


def _default_seed() -> int:
    try:
        return int(os.environ.get("PPCALC_SEED", "0"))
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--ring", help="z, zmod:<n> or fp:<p> (default z)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, help="seed for suites (default $PPCALC_SEED or 0)")
    common.add_argument("--cases", type=int, help="cases per ring for sampled suite components")

    parser = _Parser(prog="ppcalc", parents=[common],
                     description="Defects, pp formulas and their approximations over Z, Z/n and F_p.")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sub(group, name, help_text):
        return group.add_parser(name, parents=[common], help=help_text)

    g = sub(groups, "pp", "pp formulas").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub(g, "parse", "parse and normalise a formula")
    p.add_argument("formula")
    p.add_argument("--side", choices=pp.SIDES, default="left")
    sub(g, "print", "print formula JSON as text").add_argument("formula")
    p = sub(g, "eval", "solution set phi(M)")
    p.add_argument("formula")
    p.add_argument("--at", required=True, help="module, e.g. Z/4 or 'Z/2 + Z/2'")
    sub(g, "dual", "elementary dual").add_argument("formula")
    for name in ("leq", "meet", "join"):
        p = sub(g, name, f"{name} of two formulas")
        p.add_argument("a")
        p.add_argument("b")
    sub(g, "freereal", "free realisation (C, c)").add_argument("formula")
    sub(g, "ann", "Ann(C, c) of the free realisation").add_argument("formula")

    g = sub(groups, "pair", "pp-pairs TOP / BOTTOM").add_subparsers(dest="command", required=True,
                                                                    parser_class=_Parser)
    for name in ("defect", "sigma", "rho", "mu", "nu", "dual", "calculus"):
        p = sub(g, name, f"{name} of a pp-pair")
        p.add_argument("top")
        p.add_argument("bottom")
        if name == "defect":
            p.add_argument("--method", choices=pp.DEFECT_METHODS + ("all",), default="all")

    g = sub(groups, "fun", "finitely presented functors").add_subparsers(dest="command", required=True,
                                                                         parser_class=_Parser)
    for name in ("eval", "defect", "sub0", "quot0", "in-fp0", "in-fpbang", "in-fpbangstar",
                 "hom", "ext", "derived"):
        p = sub(g, name, f"{name} of a functor")
        p.add_argument("functor", help="e.g. contra:Z->Z/2:[[1]], rep:Z/2, stable:Z/2, pair:x1=x1/x1=0")
        if name in ("hom", "ext"):
            p.add_argument("other")
        if name in ("ext", "derived"):
            p.add_argument("--degree", type=int, choices=(0, 1, 2), default=1)
        if name in ("eval", "derived"):
            p.add_argument("--at", required=name == "eval")
        elif name in ("sub0", "quot0"):
            p.add_argument("--at")
    for name in ("l0y", "norm"):
        p = sub(g, name, "L_0(Y)(M)" if name == "l0y" else "image of the norm at M")
        p.add_argument("module")
        p.add_argument("--at")
        if name == "l0y":
            p.add_argument("--variance", choices=("contra", "co"), default="contra")

    g = sub(groups, "mod", "modules").add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub(g, "snf", "Smith normal form of a matrix like [[2,0],[0,3]]").add_argument("matrix")
    for name in ("ker", "coker"):
        sub(g, name, f"{name} of SOURCE->TARGET:[[rows]]").add_argument("morphism")
    for name in ("hom", "stablehom", "tensor", "ext"):
        p = sub(g, name, name)
        p.add_argument("module")
        p.add_argument("other")
        if name == "ext":
            p.add_argument("--degree", type=int, choices=(0, 1, 2), default=1)
    sub(g, "syzygy", "first syzygy").add_argument("module")
    sub(g, "env", "injective envelope over Z/n").add_argument("module")

    p = sub(groups, "check", "run a verification suite ('list' to list them)")
    p.add_argument("suite", choices=list(suites.SUITES) + ["list"])
    p.add_argument("--replay", help="re-run one case: COMPONENT/RING/INDEX from a failure record")
    return parser


HANDLERS = {"pp": cmd_pp, "pair": cmd_pair, "fun": cmd_fun, "mod": cmd_mod, "check": cmd_check}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.seed = getattr(args, "seed", _default_seed())
        args.cases = getattr(args, "cases", None)
        out = Out(getattr(args, "json", False))
        ring = Ring.parse(getattr(args, "ring", "z"))
        return HANDLERS[args.group](args, ring, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"property failure: {exc}", file=sys.stderr)
        return 1
    except (PpcalcError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0


if __name__ == "__main__":
    sys.exit(main())
