"""Probabilistic abstract rewriting with exact arithmetic."""
from .errors import InvalidPosition, InvalidRule, MassOverflow, NotAValue, ParseError, ParsError, UnknownPolicy
from .multidist import (
    MultiDistribution,
    Relation,
    SubDistribution,
    compare,
    flatten,
    merge_duplicates,
    msum,
    nf,
    nnorm,
    scale,
)
from .pars import Lex, ParsSystem, RewriteTrace, Rule, Seeded, Uniform, lift_step, resolve_policy, run, strategy, successors, unit
from .asymptotics import LimitBound, MeanTimeBound, classify, explore_limits, greedy_trace, limit_bound, meantime_bound
from .checkers import (
    CheckVerdict,
    Observation,
    Witness,
    check_better_global,
    check_confluence,
    check_local_rd,
    check_locally_better,
    check_pointed_diamond,
    check_rd_global,
    check_skew_confluence,
    observation,
    random_system,
    replay_witness,
)
from .lambda_weak import Abs, App, Choice, RedexPosition, Term, Var, diamond_harness, lambda_pars, redexes, step_at, substitute
from .syntax import parse_definitions, parse_rules, parse_term, print_rules, print_term

__version__ = "0.1.0"
