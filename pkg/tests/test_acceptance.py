"""End-to-end acceptance suite.

Every test carries a ``criterion`` mark; the terminal summary prints one
PASS/FAIL line per criterion.  All comparisons are exact rationals.
"""

import json
import subprocess
import sys
from fractions import Fraction as Fr

import pytest

from parslab.asymptotics import classify, limit_bound, meantime_bound
from parslab.checkers import (
    check_better_global,
    check_locally_better,
    check_pointed_diamond,
    check_rd_global,
    random_system,
)
from parslab.cli import main
from parslab.lambda_weak import diamond_harness, lambda_pars, random_corpus
from parslab.multidist import SubDistribution
from parslab.pars import Seeded, Uniform, run, strategy, unit
from parslab.syntax import (
    fixture_text,
    load_fixture,
    parse_definitions,
    parse_rules,
    print_rules,
    print_term,
)

from conftest import RULE_FIXTURES, md


def cli_lines(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out.splitlines()


@pytest.mark.criterion(1, "geometric termination: nnorm at step n is 1 - 2^-n, n <= 20")
def test_geometric_termination(capsys):
    code, lines = cli_lines(capsys, "run", "fig1.pars", "--from", "c", "--depth", "20")
    assert code == 0
    steps = [json.loads(l) for l in lines[1:]]
    assert [s["step"] for s in steps] == list(range(21))
    for s in steps:
        assert Fr(s["nnorm"]) == 1 - Fr(1, 2 ** s["step"])


@pytest.mark.criterion(2, "meantime at depth 30 is 2 - 2^-29, monotone, below 2")
def test_meantime(capsys, fig1):
    code, lines = cli_lines(capsys, "meantime", "fig1.pars", "--depth", "30")
    assert code == 0
    assert f"partial {2 - Fr(1, 2 ** 29)}" in lines
    partials = [meantime_bound(run(fig1, unit("c"), Uniform(0), d)).partial for d in range(31)]
    assert partials == sorted(partials) and all(p < 2 for p in partials)
    assert partials[-1] == 2 - Fr(1, 2 ** 29)


@pytest.mark.criterion(3, "fig5: all-r0 residual 2^-k, all-r2 stuck at 0, SN refuted, WN evidence")
def test_fig5_sn_failure(fig5):
    for k in range(13):
        assert limit_bound(run(fig5, unit("a"), Uniform(0), k)).residual == Fr(1, 2 ** k)
        assert run(fig5, unit("a"), Uniform(2), k).nnorm == [0] * (k + 1)
    c = classify(fig5, unit("a"), 8)
    assert c.sn.status == "refuted"
    assert c.wn.status == "evidence" and c.wn.value == Fr(255, 256)


@pytest.mark.criterion(4, "fig4: UN refuted at depth 8 with 255/256 witnesses; divergence rejoins")
def test_fig4_un_refuted(fig4):
    c = classify(fig4, unit("a"), 8)
    assert c.un.status == "refuted"
    a, b = c.un.witness
    assert {a.lower.get("true") >= Fr(255, 256), b.lower.get("true") >= Fr(255, 256)} == {True, False}
    assert {a.lower.get("false") >= Fr(255, 256), b.lower.get("false") >= Fr(255, 256)} == {True, False}
    assert not (a.lower <= b.lower or b.lower <= a.lower)
    # one-step divergence, then r1 forever on the left and r0 forever on the right
    left, right = md("1/2", "a", "1/2", "true"), md("1/2", "a", "1/2", "false")
    target = {"true": Fr(1, 2), "false": Fr(1, 2)}
    for start, policy in ((left, Uniform(1)), (right, Uniform(0))):
        lower = limit_bound(run(fig4, start, policy, 8)).lower
        assert lower <= SubDistribution(target)
        assert all(target[x] - lower.get(x) <= Fr(1, 2 ** 8) for x in target)


PR_STRATEGIES = ["leftmost", "rightmost", "full", "random(0)", "random(1)", "random(7)"]


@pytest.mark.criterion(5, "PR reaches nf {false: 1/2} within 12 steps under any strategy, residual 1/2")
@pytest.mark.parametrize("name", PR_STRATEGIES)
def test_pr_limit(defs, name):
    sys_ = lambda_pars(name)
    resolvers = [Uniform(0), Uniform(1), Seeded(3)] if name == "full" else [Uniform(0)]
    goal = SubDistribution({defs["F"]: Fr(1, 2)})
    for resolver in resolvers:
        tr = run(sys_, unit(defs["PR"]), resolver, 22)
        first = next(n for n, v in enumerate(tr.nf) if v == goal)
        assert first <= 12
        assert all(v == goal for v in tr.nf[first:first + 11])
        b = limit_bound(run(sys_, unit(defs["PR"]), resolver, first + 10))
        assert b.lower == goal and b.residual == Fr(1, 2)


@pytest.mark.criterion(6, "R: nf mass on true at depth n is 1 - 2^-n, n <= 20 (as stated)")
def test_r_ast_as_stated(defs):
    # taken literally; each halving needs a beta step and then a choice step,
    # so the literal per-step rate is not attainable by this calculus
    tr = run(lambda_pars("leftmost"), unit(defs["R"]), Uniform(0), 20)
    got = [v.get(defs["T"]) for v in tr.nf]
    assert got == [1 - Fr(1, 2 ** n) for n in range(21)]


def test_r_ast_per_round(defs):
    tr = run(lambda_pars("leftmost"), unit(defs["R"]), Uniform(0), 40)
    for n in range(41):
        assert tr.nf[n].get(defs["T"]) == 1 - Fr(1, 2 ** (n // 2))


@pytest.mark.criterion(7, "diamond harness: 500 random closed terms, zero pointed nf-diamond violations")
def test_diamond_harness():
    corpus = random_corpus(2024, 500, 12, min_redexes=2)
    v = diamond_harness(corpus, depth=8)
    assert v.holds, v.detail


@pytest.mark.criterion(8, "leftmost and rightmost agree on nf and meantime for 200 random terms, k <= 30")
def test_leftmost_rightmost_agree():
    corpus = random_corpus(8, 200, 12, min_redexes=2)
    left, right = lambda_pars("leftmost"), lambda_pars("rightmost")
    for m in corpus:
        a = run(left, unit(m), Uniform(0), 30, merge=True)
        b = run(right, unit(m), Uniform(0), 30, merge=True)
        assert a.nf == b.nf
        assert meantime_bound(a).contributions == meantime_bound(b).contributions


@pytest.mark.criterion(9, "300 random systems: pointed diamond implies global RD at depth 8")
def test_local_global_cross_validation():
    refuted_both = 0
    for seed in range(300):
        sys_ = random_system(seed)
        elems = [f"e{i}" for i in range(6)]
        pointed = check_pointed_diamond(sys_, elems, "nf")
        glob = check_rd_global(sys_, elems, "nf", 8)
        if pointed.holds:
            assert glob.holds, f"seed {seed}"
        elif not glob.holds:
            refuted_both += 1
    assert refuted_both >= 1


@pytest.mark.criterion(10, "fig5: always-r0 locally better than full; frontiers dominate; always-r2 fails at k = 1")
def test_locally_better_fig5(fig5):
    r0, r2 = strategy(fig5, "always-r0"), strategy(fig5, "always-r2")
    v = check_locally_better(r0, fig5, "nnorm", 10)
    assert v.holds and not v.truncated
    g = check_better_global(r0, fig5, unit("a"), "nnorm", 10, method="enumerate")
    assert g.holds and not g.truncated
    bad = check_locally_better(r2, fig5, "nnorm", 10)
    assert bad.status == "refuted"
    assert bad.witness.step + 1 == 1 and "step 1" in bad.detail


@pytest.mark.criterion(11, "parse/print round trip on all fixtures; byte-identical repeated runs")
@pytest.mark.parametrize("name", RULE_FIXTURES + ["lambda.lam"])
def test_round_trip(name):
    text = fixture_text(name)
    if name.endswith(".lam"):
        defs = parse_definitions(text)
        printed = "\n".join(f"{k} = {print_term(t)}" for k, t in defs.items())
        assert parse_definitions(printed) == defs
    else:
        printed = print_rules(parse_rules(text))
        assert print_rules(parse_rules(printed)) == printed


DETERMINISM_RUNS = [
    ["run", "fig4", "--policy", "seed:5", "--depth", "10"],
    ["run", "lambda", "--term", "PR", "--policy", "random(3)", "--depth", "12"],
    ["limit", "fig4", "--all", "--depth", "5"],
    ["classify", "fig5", "--depth", "6"],
    ["check", "fig4", "--property", "skew-confluence", "--depth", "3"],
]


@pytest.mark.criterion(11, "parse/print round trip on all fixtures; byte-identical repeated runs")
@pytest.mark.parametrize("argv", DETERMINISM_RUNS, ids=lambda a: " ".join(a[:2]))
def test_byte_identical(argv):
    cmd = [sys.executable, "-m", "parslab", *argv]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    assert a.stdout and a.stdout == b.stdout and a.returncode == b.returncode
