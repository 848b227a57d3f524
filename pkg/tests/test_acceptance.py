"""Acceptance gate: twelve criteria, each a set of suite components run under a
pinned seed within a wall-clock limit.  Every criterion prints one PASS/FAIL line."""

import time

import pytest

from ppcalc import suites

SEED = 0

# (number, title, limit in seconds, [(suite, components or None for all)])
CRITERIA = [
    (1, "duality involution", 60, [("duality-involution", ["involution"])]),
    (2, "elementary dual equals tensor annihilator", 60, [("duality-involution", ["tensor-oracle"])]),
    (3, "four-way defect agreement", 120, [("defect-fourway", ["pinned", "random"])]),
    (4, "fp0 equivalences", 60, [("fp0-equivalences", None)]),
    (5, "recollement identities", 60, [("recollement-identities", ["identities", "identities-covariant"])]),
    (6, "hereditary dichotomy", 60, [("hereditary-Z", None), ("nonhereditary-Z4", None)]),
    (7, "fp_! membership and perpendicular pairs", 90,
     [("fpbang-membership", None), ("perpendicular-pairs", None)]),
    (8, "sigma/rho/mu/nu universal properties", 120, [("sigma-rho-universal", None)]),
    (9, "adjunction and dual-pair evaluation", 60,
     [("recollement-identities", ["leftdef"]), ("defect-fourway", ["agj-duality"])]),
    (10, "F(A)/F_0(A) against maps from P(-,A)", 60, [("recollement-identities", ["pinfp1"])]),
    (11, "linear-algebra core", 30, [("snf-core", None)]),
    (12, "parser round trip, diagnostics, exit codes", 5, [("parser-roundtrip", None)]),
]


@pytest.mark.parametrize("number,title,limit,parts", CRITERIA, ids=[f"criterion-{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, title, limit, parts, capsys):
    start = time.perf_counter()
    reports = [suites.run_suite(name, seed=SEED, components=comps) for name, comps in parts]
    elapsed = time.perf_counter() - start
    cases = sum(r.cases for r in reports)
    failures = [f for r in reports for f in r.failures]
    ok = not failures and elapsed < limit
    with capsys.disabled():
        status = "PASS" if ok else "FAIL"
        print(f"\n[acceptance] {number:2d} {status} {title}: {cases} cases, "
              f"{len(failures)} failures, {elapsed:.1f}s (limit {limit}s)")
    assert not failures, failures[:3]
    assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
