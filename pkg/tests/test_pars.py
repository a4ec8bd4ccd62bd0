import itertools
import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parslab.errors import InvalidRule, UnknownPolicy
from parslab.multidist import MultiDistribution, SubDistribution, flatten, nf, nnorm
from parslab.pars import Lex, Occurrence, ParsSystem, Rule, Seeded, Uniform, lift_step, resolve_policy, run, strategy, successors, unit
from parslab.checkers import random_system

from conftest import md


def brute_successors(sys, m):
    """Oracle: every per-occurrence choice vector, canonicalised."""
    options = [range(len(sys.rules(a))) if sys.rules(a) else [None] for _, a in m.pairs]
    out = set()
    for vec in itertools.product(*options):
        pairs = []
        for (p, a), k in zip(m.pairs, vec):
            if k is None:
                pairs.append((p, a))
            else:
                pairs.extend((p * q, b) for b, q in sys.rules(a)[k].rhs.items())
        out.add(MultiDistribution(pairs))
    return out


def test_rule_mass_must_be_one():
    with pytest.raises(InvalidRule):
        Rule(SubDistribution({"a": Fr(1, 2)}))


def test_lift_step_fig1(fig1):
    assert lift_step(fig1, unit("c"), Uniform(0)) == md("1/2", "c", "1/2", "true")


def test_lift_step_normal_is_identity(fig1):
    assert lift_step(fig1, unit("true"), Uniform(0)) == unit("true")


def test_lift_step_walk_keeps_occurrences(fig2):
    out = lift_step(fig2, md("1/2", "1", "1/2", "3"), Uniform(0))
    assert out == md("1/4", "0", "1/4", "2", "1/4", "2", "1/4", "4")


def test_successors_fig4(fig4):
    states, truncated = successors(fig4, unit("a"))
    assert not truncated
    assert set(states) == {md("1/2", "a", "1/2", "true"), md("1/2", "a", "1/2", "false")}


def test_successors_normal(fig4):
    assert successors(fig4, unit("true")).states == [unit("true")]


def test_successors_dedup_permutations(fig4):
    states = successors(fig4, md("1/2", "a", "1/2", "a")).states
    assert len(states) == 3


def test_successors_cap_flags(fig4):
    res = successors(fig4, md("1/4", "a", "1/8", "a", "1/16", "a"), cap=3)
    assert res.truncated and len(res.states) == 3


def test_run_fig1_nnorm(fig1):
    tr = run(fig1, unit("c"), Uniform(0), 3)
    assert tr.nnorm == [0, Fr(1, 2), Fr(3, 4), Fr(7, 8)]
    assert tr.depth == 3


def test_run_normal_start_constant(fig1):
    tr = run(fig1, unit("true"), Uniform(0), 5)
    assert all(s == unit("true") for s in tr.states)


def test_run_walk_stop_always_stop(fig3):
    tr = run(fig3, unit("2"), Uniform(1), 1)
    assert tr.final == unit("stop")


def test_walk_derivation_depth_two(fig2):
    tr = run(fig2, unit("2"), Uniform(0), 2)
    assert tr.states[1] == md("1/2", "1", "1/2", "3")
    assert tr.states[2] == md("1/4", "0", "1/4", "2", "1/4", "2", "1/4", "4")


def test_run_rejects_negative_depth(fig1):
    with pytest.raises(ValueError):
        run(fig1, unit("c"), Uniform(0), -1)


def test_uniform_prefers_labels(fig5):
    # fig5 labels its rules r0 and r2; all-r2 must pick the self-loop
    assert lift_step(fig5, unit("a"), Uniform(2)) == unit("a")
    assert lift_step(fig5, unit("a"), Uniform(0)) == md("1/2", "a", "1/2", "true")


def test_lex_policy_repeats_last_digit(fig4):
    tr = run(fig4, unit("a"), Lex("01"), 3)
    assert nf(tr.final, fig4.is_normal) == SubDistribution({"true": Fr(1, 2), "false": Fr(3, 8)})


def test_seeded_policy_is_deterministic(fig4):
    a = run(fig4, unit("a"), Seeded(3), 6)
    b = run(fig4, unit("a"), resolve_policy("seed:3"), 6)
    assert a.states == b.states


def test_resolve_policy_names():
    assert resolve_policy("all-r1").name == "all-r1"
    assert resolve_policy("always-r2").name == "all-r2"
    assert resolve_policy("lex(0110)").name == "lex(0110)"
    assert resolve_policy("7").name == "seed:7"
    with pytest.raises(UnknownPolicy):
        resolve_policy("sometimes")


def test_strategy_restricts(fig5):
    s2 = strategy(fig5, "always-r2")
    assert len(s2.rules("a")) == 1
    assert s2.rules("a")[0].rhs == SubDistribution({"a": 1})
    assert strategy(fig5, "full") is fig5
    with pytest.raises(UnknownPolicy):
        strategy(fig5, "greedy")


def test_generator_memoised():
    calls = []

    def gen(a):
        calls.append(a)
        return [{"x": 1}] if a == "y" else ()

    sys = ParsSystem(generator=gen)
    sys.rules("y")
    sys.rules("y")
    assert calls == ["y"]


def test_deterministic_system_single_successor(fig2):
    assert fig2.is_deterministic_on(["1", "2", "3"])
    assert len(successors(fig2, md("1/3", "1", "1/3", "2", "1/3", "5")).states) == 1


# --- properties over random systems ---------------------------------------------------------------


def _random_start(rng, sys):
    elems = [f"e{i}" for i in range(6)]
    k = rng.randint(1, 3)
    return MultiDistribution((Fr(1, k), rng.choice(elems)) for _ in range(k))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_successors_match_bruteforce(seed):
    rng = random.Random(seed)
    sys = random_system(rng)
    m = _random_start(rng, sys)
    assert set(successors(sys, m).states) == brute_successors(sys, m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_mass_conserved_and_nf_monotone(seed):
    rng = random.Random(seed)
    sys = random_system(rng)
    m = _random_start(rng, sys)
    tr = run(sys, m, Seeded(seed), 6)
    for a, b in zip(tr.states, tr.states[1:]):
        assert flatten(b).mass == flatten(a).mass
    for x, y in zip(tr.nf, tr.nf[1:]):
        assert x <= y
    assert tr.nnorm == sorted(tr.nnorm)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_unit_successor_count(seed):
    rng = random.Random(seed)
    sys = random_system(rng)
    for i in range(6):
        a = f"e{i}"
        n = len(successors(sys, unit(a)).states)
        distinct = len({r.rhs for r in sys.rules(a)})
        assert n == (distinct if sys.rules(a) else 1)


def test_occurrence_position_is_canonical_index(fig4):
    seen = []

    def spy(occ: Occurrence, rules):
        seen.append((occ.element, occ.position, occ.step))
        return 0

    lift_step(fig4, md("1/4", "a", "1/4", "true", "1/2", "a"), spy, step=4)
    assert seen == [("a", 0, 4), ("a", 1, 4)]
