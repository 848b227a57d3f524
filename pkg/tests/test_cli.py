import json

import pytest

from ppcalc import suites
from ppcalc.cli import main
from ppcalc.errors import InputError
from ppcalc.linalg import Ring


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


@pytest.mark.parametrize("argv,expected", [
    (["pp", "parse", "E y . x1 - 2*y = 0"], "E y1 . x1 - 2*y1 = 0"),
    (["--ring", "zmod:4", "pp", "eval", "2*x1 = 0", "--at", "Z/4"], "Z/2"),
    (["pp", "leq", "E y . x1 = 4*y", "E y . x1 = 2*y"], "true"),
    (["--ring", "zmod:4", "pair", "defect", "x1 = x1", "E y . x1 = 2*y"], "Z/2"),
    (["pair", "defect", "E y . x1 = 2*y", "E y . x1 = 4*y", "--method", "ann"], "0"),
    (["--ring", "zmod:4", "pair", "calculus", "x1 = x1", "E y . x1 = 2*y"], "false"),
    (["fun", "eval", "rep:Z/2", "--at", "Z/4"], "Z/2"),
    (["fun", "defect", "co:Z->Z/2:[[1]]"], "Z"),
    (["fun", "in-fp0", "contra:Z->Z/2:[[1]]"], "true"),
    (["--ring", "zmod:4", "fun", "derived", "stable:Z/2", "--degree", "2", "--at", "Z/2"], "Z/2"),
    (["mod", "snf", "[[2,0],[0,3]]"], "invariants: [1, 6]"),
    (["--ring", "zmod:4", "mod", "hom", "Z/2", "Z/4"], "Z/2"),
    (["mod", "ext", "Z/2", "Z"], "Z/2"),
    (["mod", "tensor", "Z/2", "Z/3"], "0"),
])
def test_commands(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out.splitlines()[0] == expected


def test_global_flags_after_subcommand(capsys):
    assert run(capsys, "pp", "eval", "2*x1 = 0", "--at", "Z/4", "--ring", "zmod:4")[1] == "Z/2"


def test_rho_printed_formula_is_equivalent(capsys):
    code, out, _ = run(capsys, "--ring", "zmod:4", "pair", "rho", "2*x1 = 0", "x1 = 0")
    assert code == 0
    code, leq1, _ = run(capsys, "--ring", "zmod:4", "pp", "leq", out, "E y . x1 = 2*y")
    code, leq2, _ = run(capsys, "--ring", "zmod:4", "pp", "leq", "E y . x1 = 2*y", out)
    assert leq1 == leq2 == "true"


def test_json_output_is_deterministic(capsys):
    argv = ["--json", "--ring", "zmod:4", "pair", "sigma", "x1 = x1", "2*x1 = 0"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second
    data = json.loads(first)
    assert data["formula"]["side"] == "left"


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["pp"],
    ["pp", "parse"],
    ["--ring", "q", "pp", "parse", "x1 = 0"],
    ["pp", "parse", "x1 = 1"],
    ["pp", "eval", "x1 = 0", "--at", "Q"],
    ["mod", "env", "Z/2"],
    ["pair", "rho", "2*x1 = 0", "x1 = 0"],
    ["fun", "eval", "weird:Z", "--at", "Z"],
    ["mod", "snf", "[[1,2"],
    ["check", "no-such-suite"],
])
def test_usage_and_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_syntax_errors_show_a_caret(capsys):
    _, _, err = run(capsys, "pp", "parse", "x1 = 1")
    assert "column 6" in err and "^" in err


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0


def test_check_success_and_failure(capsys, monkeypatch):
    assert run(capsys, "check", "nonhereditary-Z4")[0] == 0

    def broken(case):
        case.record["note"] = "forced"
        raise suites.CheckFailure("forced failure")

    comp = suites.Component("forced", (Ring.zmod(4),), 1, broken, pinned=True)
    monkeypatch.setitem(suites.SUITES, "nonhereditary-Z4", [comp])
    code, out, _ = run(capsys, "--json", "check", "nonhereditary-Z4")
    assert code == 1
    report = json.loads(out)
    fail = report["failures"][0]
    assert fail["inputs"] == {"note": "forced"} and "--replay forced/zmod:4/0" in fail["replay"]
    assert run(capsys, "check", "nonhereditary-Z4", "--replay", "forced/zmod:4/0")[0] == 1


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("PPCALC_SEED", "17")
    code, out, _ = run(capsys, "--json", "check", "parser-roundtrip")
    assert code == 0 and json.loads(out)["seed"] == 17


def test_suite_registry_and_determinism():
    assert set(suites.SUITES) == {
        "snf-core", "module-homology", "fp0-equivalences", "recollement-identities", "hereditary-Z",
        "nonhereditary-Z4", "fpbang-membership", "perpendicular-pairs", "duality-involution",
        "defect-fourway", "sigma-rho-universal", "calculus-biconditional", "parser-roundtrip"}
    a = suites.run_suite("defect-fourway", seed=3, cases=3).to_json()
    b = suites.run_suite("defect-fourway", seed=3, cases=3).to_json()
    assert a == b and a["ok"]
    with pytest.raises(InputError):
        suites.run_suite("nope")
