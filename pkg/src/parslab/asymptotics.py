"""Limit distributions, expected termination time and bounded classification.

Every result here is a certified bound computed at a finite depth.  Because
the observation ``nf`` can only grow along a lifted rewrite sequence, the
normal-form part of a finite prefix is a sound lower bound for the limit of
every extension of that prefix, and ``initial mass - nnorm`` bounds what is
still missing.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .multidist import ZERO, MultiDistribution, SubDistribution, element_key, nf, nnorm
from .pars import DEFAULT_CAP, ParsSystem, RewriteTrace, successors, trace_from_states

DEFAULT_DEPTH = 32


@dataclass(frozen=True)
class LimitBound:
    """Lower bound ``lower`` on the limit of a prefix of length ``depth``.

    ``exact`` is set when ``lower`` is known to be itself a limit
    distribution of the start, e.g. because the prefix ends in a state that
    can reach itself again (the loop can be repeated forever and ``nf`` is
    constant along it) or because nothing is left to reduce.
    """

    lower: SubDistribution
    depth: int
    residual: Fraction
    exact: bool = False
    state: Optional[MultiDistribution] = field(default=None, compare=False)
    path: tuple = field(default=(), compare=False)

    @property
    def norm(self) -> Fraction:
        return self.lower.mass

    @property
    def upper_norm(self) -> Fraction:
        """Largest limit probability any extension of the prefix can reach."""
        return self.norm if self.exact else self.norm + self.residual

    def upper(self, u) -> Fraction:
        return self.lower.get(u) + (ZERO if self.exact else self.residual)


@dataclass(frozen=True)
class MeanTimeBound:
    partial: Fraction
    depth: int
    diverging: bool
    contributions: tuple = ()


def _recurrent(trace_states) -> bool:
    last = trace_states[-1]
    return any(s == last for s in trace_states[:-1])


def limit_bound(trace: RewriteTrace) -> LimitBound:
    if not trace.states:
        raise ValueError("empty trace")
    final = trace.final
    mass = trace.states[0].mass
    residual = mass - trace.nnorm[-1]
    exact = residual == 0 or _recurrent(trace.states)
    return LimitBound(trace.nf[-1], trace.depth, residual, exact, final, tuple(trace.states))


def meantime_bound(trace: RewriteTrace) -> MeanTimeBound:
    """Partial sum of ``mass - nnorm(m_n)`` over ``n < depth``.

    For unit-mass starts this is the usual expected-steps formula.  The
    ``diverging`` flag is raised when mass is still missing and the final
    state repeats an earlier one: the sum then grows without bound.
    """
    mass = trace.states[0].mass
    contributions = tuple(mass - p for p in trace.nnorm[:-1])
    diverging = trace.nnorm[-1] < mass and _recurrent(trace.states)
    return MeanTimeBound(sum(contributions, ZERO), trace.depth, diverging, contributions)


# --- exhaustive exploration ----------------------------------------------------


@dataclass
class Exploration:
    bounds: list
    truncated: bool
    depth: int
    mass: Fraction
    n_states: int


def _reaches(edges: dict, start_set, target) -> bool:
    stack = list(start_set)
    seen = set()
    while stack:
        s = stack.pop()
        if s == target:
            return True
        if s in seen:
            continue
        seen.add(s)
        stack.extend(edges.get(s, ()))
    return False


def explore_limits(sys: ParsSystem, m0: MultiDistribution, depth: int = DEFAULT_DEPTH,
                   cap: int = DEFAULT_CAP) -> Exploration:
    """Enumerate every choice path of length ``depth`` (states deduplicated per
    level) and return one :class:`LimitBound` per distinct lower bound."""
    levels = [{m0: None}]
    edges: dict = {}
    truncated = False
    for _ in range(depth):
        nxt: dict = {}
        for s in levels[-1]:
            if s not in edges:
                succ, trunc = successors(sys, s, cap)
                truncated |= trunc
                edges[s] = succ
            for t in edges[s]:
                if t not in nxt:
                    if len(nxt) >= cap:
                        truncated = True
                        break
                    nxt[t] = s
        levels.append(nxt)
    mass = m0.mass
    by_lower: dict = {}
    for s in levels[-1]:
        lower = nf(s, sys.is_normal)
        residual = mass - lower.mass
        exact = residual == 0 or (s in edges and _reaches(edges, edges[s], s))
        prev = by_lower.get(lower)
        if prev is None or (exact and not prev.exact):
            path = [s]
            for lvl in range(len(levels) - 1, 0, -1):
                path.append(levels[lvl][path[-1]])
            by_lower[lower] = LimitBound(lower, depth, residual, exact, s, tuple(reversed(path)))
    bounds = sorted(by_lower.values(), key=lambda b: (-b.norm, tuple((element_key(a), p) for a, p in b.lower.items())))
    return Exploration(bounds, truncated, depth, mass, sum(len(lv) for lv in levels))


def greedy_trace(sys: ParsSystem, m0: MultiDistribution, depth: int, cap: int = DEFAULT_CAP) -> RewriteTrace:
    """Heuristic: at each step move to a successor of maximal ``nnorm``.

    This approximates the construction of a sequence reaching the greatest
    limit probability but has only one step of lookahead.
    """
    states = [m0]
    for _ in range(depth):
        succ, _trunc = successors(sys, states[-1], cap)
        states.append(max(succ, key=lambda s: nnorm(s, sys.is_normal)))
    return trace_from_states(sys, states, "greedy-nnorm")


# --- classification ------------------------------------------------------------------


@dataclass
class Finding:
    """Outcome for one property: ``evidence``, ``counter-evidence`` or ``refuted``.

    Only ``refuted`` is conclusive; the other two describe what the explored
    prefixes of length ``depth`` show.
    """

    status: str
    detail: str
    witness: tuple = ()
    value: Optional[Fraction] = None


@dataclass
class Classification:
    depth: int
    truncated: bool
    bounds: list
    un: Finding
    sn: Finding
    wn: Finding
    ast: Finding

    def findings(self):
        return {"UN": self.un, "SN": self.sn, "WN": self.wn, "AST": self.ast}


def _incomparable_for_sure(a: LimitBound, b: LimitBound, mass) -> bool:
    """True if every limit above ``a`` and every limit above ``b`` are
    incomparable and no subdistribution of mass <= ``mass`` dominates both."""
    support = set(a.lower) | set(b.lower)
    a_wins = any(a.lower.get(u) > b.upper(u) for u in support)
    b_wins = any(b.lower.get(u) > a.upper(u) for u in support)
    if not (a_wins and b_wins):
        return False
    joined = a.lower.join(b.lower)
    return sum(joined.values(), ZERO) > mass


def _un_finding(bounds, mass, depth) -> Finding:
    if len(bounds) > 300:
        support = sorted({u for b in bounds for u in b.lower}, key=element_key)
        candidates = {}
        for u in support:
            best = max(bounds, key=lambda b: (b.lower.get(u), b.exact))
            candidates[id(best)] = best
        pool = list(candidates.values())
    else:
        pool = bounds
    best_pair = None
    for a, b in itertools.combinations(pool, 2):
        if _incomparable_for_sure(a, b, mass):
            score = sum(a.lower.join(b.lower).values(), ZERO)
            if best_pair is None or score > best_pair[0]:
                best_pair = (score, a, b)
    if best_pair:
        _, a, b = best_pair
        return Finding("refuted", f"limits above {a.lower} and above {b.lower} are incomparable "
                                  f"and no limit of mass <= {mass} dominates both", (a, b))
    for a, b in itertools.combinations(bounds, 2):
        if not (a.lower <= b.lower or b.lower <= a.lower):
            return Finding("counter-evidence", f"incomparable lower bounds at depth {depth}", (a, b))
    return Finding("evidence", f"explored lower bounds form a chain at depth {depth}")


def _sn_finding(bounds, depth) -> Finding:
    lowest_upper = min(bounds, key=lambda b: b.upper_norm)
    highest_lower = max(bounds, key=lambda b: b.norm)
    if lowest_upper.upper_norm < highest_lower.norm:
        return Finding("refuted", f"one sequence converges with probability <= {lowest_upper.upper_norm}, "
                                  f"another with probability >= {highest_lower.norm}",
                       (lowest_upper, highest_lower))
    lo = min(b.norm for b in bounds)
    if lo != highest_lower.norm:
        return Finding("counter-evidence", f"normal-form mass ranges over [{lo}, {highest_lower.norm}] "
                                           f"at depth {depth}", (min(bounds, key=lambda b: b.norm), highest_lower))
    return Finding("evidence", f"every explored path has normal-form mass {lo} at depth {depth}", value=lo)


def classify(sys: ParsSystem, m0: MultiDistribution, depth: int = DEFAULT_DEPTH,
             cap: int = DEFAULT_CAP) -> Classification:
    """Bounded semi-decision of unique limits, uniform normalization,
    normalization and almost-sure termination from ``m0``."""
    ex = explore_limits(sys, m0, depth, cap)
    bounds, mass = ex.bounds, ex.mass
    un = _un_finding(bounds, mass, depth)
    sn = _sn_finding(bounds, depth)
    best = max(bounds, key=lambda b: (b.norm, b.exact))
    wn = Finding("evidence", f"best explored path reaches normal-form mass {best.norm} "
                             f"(residual {best.residual}) at depth {depth}", (best,), best.norm)
    stuck = [b for b in bounds if b.exact and b.norm < mass]
    if stuck:
        worst = min(stuck, key=lambda b: b.norm)
        ast = Finding("refuted", f"a sequence converges with probability exactly {worst.norm} < {mass}", (worst,),
                      worst.norm)
    else:
        worst = max(bounds, key=lambda b: b.residual)
        ast = Finding("evidence", f"largest residual over explored paths is {worst.residual} at depth {depth}",
                      (worst,), worst.residual)
    return Classification(depth, ex.truncated, bounds, un, sn, wn, ast)
