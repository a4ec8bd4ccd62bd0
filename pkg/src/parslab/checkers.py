"""Bounded checkers for random descent, diamond, confluence and strategy comparison.

Every checker returns a :class:`CheckVerdict`.  ``holds`` is the outcome at the
checked depth; ``conclusive`` says whether that outcome settles the unbounded
property.  Failures carry a :class:`Witness` that :func:`replay_witness`
re-verifies from scratch.

Lifting acts on each occurrence independently and both observations are
linear, so the set of values observable after ``k`` steps from ``m`` is the
weighted Minkowski sum of the per-element sets.  Several checkers work on
these value sets instead of enumerating multidistributions.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .multidist import ONE, ZERO, MultiDistribution, SubDistribution, element_key, msum, nf, nnorm, scale
from .pars import DEFAULT_CAP, ParsSystem, Rule, successors, unit

OBSERVATIONS = ("nf", "nnorm")


class Observation:
    """``nf`` (subdistribution on normal forms) or ``nnorm`` (its mass).

    Values are hashable, partially ordered by ``<=`` and closed under the
    weighted sums used by :meth:`combine`.
    """

    def __init__(self, tag: str, is_normal: Callable):
        if tag not in OBSERVATIONS:
            raise ValueError(f"unknown observation {tag!r}; expected one of {OBSERVATIONS}")
        self.tag = tag
        self.is_normal = is_normal

    def __call__(self, m: MultiDistribution):
        return nf(m, self.is_normal) if self.tag == "nf" else nnorm(m, self.is_normal)

    def unit(self, a):
        if self.tag == "nf":
            return SubDistribution({a: ONE}) if self.is_normal(a) else SubDistribution()
        return ONE if self.is_normal(a) else ZERO

    def combine(self, weighted: Iterable) -> object:
        """``sum q * v`` over ``(q, v)`` pairs."""
        if self.tag == "nf":
            return SubDistribution((a, q * p) for q, v in weighted for a, p in v.items())
        return sum((q * v for q, v in weighted), ZERO)

    @staticmethod
    def leq(x, y) -> bool:
        return x <= y

    def __repr__(self):
        return f"Observation({self.tag!r})"


def observation(tag: str, sys: ParsSystem) -> Observation:
    return Observation(tag, sys.is_normal)


@dataclass(frozen=True)
class Witness:
    """Replayable evidence of a failure.

    ``left`` and ``right`` are rewrite paths (state tuples) from ``start``.
    ``claim`` says what replay must re-establish:

    * ``differ``: the observations of the final states differ;
    * ``no-join``: observations agree but no common one-step reduct exists;
    * ``no-paired-extension``: no pair of equal-observation extensions of
      length ``step`` exists;
    * ``not-dominated``: after ``step`` further steps no right-side value is
      below a left-side value (left extended by the second system, right by
      the first);
    * ``no-extension``: no extension of ``left`` within ``step`` steps
      reaches the observation of the final right state (or a common reduct).
    """

    claim: str
    start: MultiDistribution
    left: tuple
    right: tuple
    step: int
    left_value: object = None
    right_value: object = None
    kind: str = ""


@dataclass
class CheckVerdict:
    prop: str
    holds: bool
    conclusive: bool
    depth: int
    truncated: bool = False
    detail: str = ""
    witness: Optional[Witness] = None
    obs: str = ""

    @property
    def status(self) -> str:
        if self.holds:
            return "holds" if self.conclusive else "evidence"
        return "refuted" if self.conclusive else "counter-evidence"


# --- shared machinery ---------------------------------------------------------------


class _Successors:
    """Memoised successor sets with truncation tracking."""

    def __init__(self, sys: ParsSystem, cap: int):
        self.sys, self.cap = sys, cap
        self.memo: dict = {}
        self.truncated = False

    def __call__(self, m: MultiDistribution) -> list:
        try:
            return self.memo[m]
        except KeyError:
            states, trunc = successors(self.sys, m, self.cap)
            self.truncated |= trunc
            self.memo[m] = states
            return states


def _reach(succ: _Successors, m: MultiDistribution, depth: int, cap: int):
    """States reachable from ``m`` in at most ``depth`` steps, with a flag
    saying the set is closed under successors (fully explored)."""
    seen = {m: 0}
    frontier = [m]
    for d in range(depth):
        nxt = []
        for s in frontier:
            for t in succ(s):
                if t not in seen:
                    if len(seen) >= cap:
                        return seen, False, True
                    seen[t] = d + 1
                    nxt.append(t)
        frontier = nxt
        if not frontier:
            return seen, not succ.truncated, False
    closed = all(t in seen for s in frontier for t in succ(s))
    return seen, closed and not succ.truncated, False


class ValueSets:
    """Exact sets of observation values after ``k`` lifted steps."""

    def __init__(self, sys: ParsSystem, obs: Observation, cap: int = DEFAULT_CAP):
        self.sys, self.obs, self.cap = sys, obs, cap
        self.memo: dict = {}
        self.truncated = False

    def _minkowski(self, weighted_sets) -> frozenset:
        acc = {self.obs.combine(())}
        for q, vs in weighted_sets:
            nxt = set()
            for x in acc:
                for y in vs:
                    nxt.add(self.obs.combine(((ONE, x), (q, y))))
                    if len(nxt) >= self.cap:
                        self.truncated = True
                        break
            acc = nxt
        return frozenset(acc)

    def element(self, a, k: int) -> frozenset:
        key = (a, k)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        rules = self.sys.rules(a)
        if k == 0 or not rules:
            out = frozenset([self.obs.unit(a)])
        else:
            acc = set()
            for r in rules:
                acc |= self._minkowski([(q, self.element(b, k - 1)) for b, q in r.rhs.items()])
            out = frozenset(acc)
        self.memo[key] = out
        return out

    def multi(self, m: MultiDistribution, k: int) -> frozenset:
        return self._minkowski([(p, self.element(a, k)) for p, a in m.pairs])


def _sorted_values(values):
    if values and isinstance(next(iter(values)), SubDistribution):
        return sorted(values, key=lambda v: tuple((element_key(a), p) for a, p in v.items()))
    return sorted(values)


def _dominating_pair(obs: Observation, high: frozenset, low: frozenset):
    """Some ``(x, y)`` with ``x in high``, ``y in low`` and ``y <= x``, or None."""
    if obs.tag == "nnorm":
        x, y = max(high), min(low)
        return (x, y) if y <= x else None
    for x in _sorted_values(high):
        for y in _sorted_values(low):
            if y <= x:
                return (x, y)
    return None


def _divergences(sys_a: ParsSystem, sys_b: ParsSystem, elements, cap: int):
    """Pairs ``(a, t, s)`` with ``[1 a]`` stepping to ``t`` under ``sys_a``
    and to ``s`` under ``sys_b``, and a truncation flag."""
    truncated = False
    out = []
    for a in elements:
        left, t1 = successors(sys_a, unit(a), cap)
        right, t2 = successors(sys_b, unit(a), cap)
        truncated |= t1 or t2
        out.extend((a, t, s) for t in left for s in right)
    return out, truncated


def _default_elements(sys: ParsSystem, elements):
    return tuple(sys.redexes if elements is None else elements)


def reachable_elements(sys: ParsSystem, roots: Iterable, depth: int, cap: int = DEFAULT_CAP) -> tuple:
    """Elements reachable from ``roots`` in at most ``depth`` rule applications."""
    seen = dict.fromkeys(roots)
    frontier = list(seen)
    for _ in range(depth):
        nxt = []
        for a in frontier:
            for r in sys.rules(a):
                for b in r.rhs:
                    if b not in seen and len(seen) < cap:
                        seen[b] = None
                        nxt.append(b)
        frontier = nxt
    return tuple(sorted(seen, key=element_key))


# --- diamond --------------------------------------------------------------------------


def check_diamond(sys: ParsSystem, m0: MultiDistribution, obs: Observation, cap: int = DEFAULT_CAP) -> CheckVerdict:
    """Diamond at one start: distinct one-step reducts have equal observation
    and a common one-step reduct."""
    succ = _Successors(sys, cap)
    states = succ(m0)
    for t, s in itertools.combinations(states, 2):
        vt, vs = obs(t), obs(s)
        if vt != vs:
            return CheckVerdict("diamond", False, True, 1, succ.truncated,
                                f"observations differ: {vt} vs {vs}",
                                Witness("differ", m0, (m0, t), (m0, s), 1, vt, vs), obs.tag)
        joins = set(succ(t)) & set(succ(s))
        if not joins:
            # a missing join is certain only if both successor sets are complete
            return CheckVerdict("diamond", False, not succ.truncated, 1, succ.truncated,
                                "no common one-step reduct",
                                Witness("no-join", m0, (m0, t), (m0, s), 1, vt, vs), obs.tag)
    return CheckVerdict("diamond", True, not succ.truncated, 1, succ.truncated,
                        f"{len(states)} one-step reducts, all pairs joinable", obs=obs.tag)


def check_pointed_diamond(sys: ParsSystem, elements=None, obs: Observation | str = "nf",
                          cap: int = DEFAULT_CAP) -> CheckVerdict:
    """Diamond on every unit start ``[1 a]``; by linearity this is the diamond
    on all multidistributions over those elements."""
    if isinstance(obs, str):
        obs = observation(obs, sys)
    elements = _default_elements(sys, elements)
    truncated = False
    for a in elements:
        v = check_diamond(sys, unit(a), obs, cap)
        truncated |= v.truncated
        if not v.holds:
            v.detail = f"at {a}: {v.detail}"
            return v
    return CheckVerdict("diamond", True, not truncated, 1, truncated,
                        f"diamond holds at {len(elements)} element(s)", obs=obs.tag)


# --- random descent -----------------------------------------------------------------------


def check_local_rd(sys: ParsSystem, elements=None, obs: Observation | str = "nf", depth: int = 8,
                   cap: int = DEFAULT_CAP) -> CheckVerdict:
    """For every divergence ``t <= [1 a] => s`` search for equal-observation
    sequences of length ``depth`` from ``t`` and ``s``.

    Finding them for every divergence is bounded evidence.  A divergence for
    which the exhaustive search dies out is a conclusive refutation.
    """
    if isinstance(obs, str):
        obs = observation(obs, sys)
    elements = _default_elements(sys, elements)
    succ = _Successors(sys, cap)
    search = _PairSearch(succ, obs)

    for a in elements:
        start = unit(a)
        for t, s in itertools.combinations(succ(start), 2):
            if not search(t, s, depth):
                vt, vs = obs(t), obs(s)
                claim = "differ" if vt != vs else "no-paired-extension"
                return CheckVerdict("local-rd", False, not succ.truncated, depth, succ.truncated,
                                    f"at {a}: no pair of equal-observation extensions of length {depth}",
                                    Witness(claim, start, (start, t), (start, s), 1 if claim == "differ" else depth,
                                            vt, vs), obs.tag)
    return CheckVerdict("local-rd", True, False, depth, succ.truncated,
                        f"every one-step divergence at {len(elements)} element(s) has paired extensions "
                        f"of length {depth}", obs=obs.tag)


class _PairSearch:
    """Depth-first search for equal-observation extension pairs, memoising
    pairs already known to die out within a given number of steps."""

    def __init__(self, succ: _Successors, obs: Observation):
        self.succ, self.obs = succ, obs
        self.dead: dict = {}

    def __call__(self, t, s, remaining: int) -> bool:
        if t == s:
            return True
        if self.obs(t) != self.obs(s):
            return False
        if remaining == 0:
            return True
        key = (t, s) if t.sort_key() <= s.sort_key() else (s, t)
        if self.dead.get(key, -1) >= remaining:
            return False
        for t2 in self.succ(t):
            for s2 in self.succ(s):
                if self(t2, s2, remaining - 1):
                    return True
        self.dead[key] = remaining
        return False


class _Split(Exception):
    def __init__(self, left_plan, right_plan):
        super().__init__()
        self.left_plan = left_plan
        self.right_plan = right_plan


class _Descent:
    """Singleton-value DP for global random descent with witness plans.

    A plan is ``None`` (rule 0 for every occurrence at every step) or
    ``(rule_index, child, child_plan)``: the root takes that rule, the named
    child follows ``child_plan`` and every other child follows ``None``.
    """

    def __init__(self, sys: ParsSystem, obs: Observation):
        self.sys, self.obs = sys, obs
        self.memo: dict = {}
        self.paths: dict = {}

    def value(self, a, k):
        key = (a, k)
        if key in self.memo:
            return self.memo[key]
        rules = self.sys.rules(a)
        if k == 0 or not rules:
            v = self.obs.unit(a)
        else:
            v = None
            for i, r in enumerate(rules):
                parts = []
                for b, q in r.rhs.items():
                    try:
                        parts.append((q, self.value(b, k - 1)))
                    except _Split as e:
                        raise _Split((i, b, e.left_plan), (i, b, e.right_plan)) from None
                vi = self.obs.combine(parts)
                if v is None:
                    v = vi
                elif vi != v:
                    raise _Split((0, None, None), (i, None, None))
        self.memo[key] = v
        return v

    def path(self, a, k, plan=None) -> list:
        if plan is None and (a, k) in self.paths:
            return self.paths[(a, k)]
        rules = self.sys.rules(a)
        if k == 0 or not rules:
            out = [unit(a)] * (k + 1)
        else:
            i, child, child_plan = plan if plan is not None else (0, None, None)
            subs = [(q, self.path(b, k - 1, child_plan if b == child else None)) for b, q in rules[i].rhs.items()]
            out = [unit(a)] + [msum(scale(q, sub[n]) for q, sub in subs) for n in range(k)]
        if plan is None:
            self.paths[(a, k)] = out
        return out

    def multi_path(self, m: MultiDistribution, k, index=None, plan=None) -> list:
        subs = [(p, self.path(a, k, plan if j == index else None)) for j, (p, a) in enumerate(m.pairs)]
        return [m] + [msum(scale(p, sub[n]) for p, sub in subs) for n in range(1, k + 1)]


def check_rd_global(sys: ParsSystem, m0, obs: Observation | str = "nf", depth: int = 8) -> CheckVerdict:
    """All ``k``-step reducts of ``m0`` share one observation, for every
    ``k <= depth``.  ``m0`` may be a multidistribution, one element or a list
    of elements (each checked from its unit start).  Exact: no enumeration of
    multidistributions, hence no truncation."""
    if isinstance(obs, str):
        obs = observation(obs, sys)
    starts = _starts(m0)
    dp = _Descent(sys, obs)
    for k in range(1, depth + 1):
        for m in starts:
            for j, (p, a) in enumerate(m.pairs):
                try:
                    dp.value(a, k)
                except _Split as e:
                    left = dp.multi_path(m, k, j, e.left_plan)
                    right = dp.multi_path(m, k, j, e.right_plan)
                    vl, vr = obs(left[-1]), obs(right[-1])
                    return CheckVerdict("global-rd", False, True, depth, False,
                                        f"two {k}-step reducts of {m} observe {vl} and {vr}",
                                        Witness("differ", m, tuple(left), tuple(right), k, vl, vr), obs.tag)
    return CheckVerdict("global-rd", True, False, depth, False,
                        f"every k-step reduct agrees on the observation for k <= {depth}", obs=obs.tag)


def _starts(m0) -> list:
    if isinstance(m0, MultiDistribution):
        return [m0]
    if isinstance(m0, (list, tuple)):
        return [x if isinstance(x, MultiDistribution) else unit(x) for x in m0]
    return [unit(m0)]


def rd_global_bruteforce(sys: ParsSystem, m0: MultiDistribution, obs: Observation | str, depth: int,
                         cap: int = DEFAULT_CAP):
    """Reference oracle: enumerate every level and compare observations.

    Returns ``(holds, first_failing_k, truncated)``.
    """
    if isinstance(obs, str):
        obs = observation(obs, sys)
    succ = _Successors(sys, cap)
    level = {m0}
    for k in range(1, depth + 1):
        nxt = set()
        for s in level:
            nxt.update(succ(s))
            if len(nxt) >= cap:
                return True, None, True
        level = nxt
        if len({obs(s) for s in level}) > 1:
            return False, k, succ.truncated
    return True, None, succ.truncated


def frontier_values(sys: ParsSystem, m0: MultiDistribution, obs: Observation, k: int,
                    cap: int = DEFAULT_CAP, method: str = "dp"):
    """Observation values of all ``k``-step reducts of ``m0``.

    ``dp`` uses per-element value sets; ``enumerate`` walks the lifted
    relation level by level.  Returns ``(values, truncated)``.
    """
    if method == "dp":
        vs = ValueSets(sys, obs, cap)
        return vs.multi(m0, k), vs.truncated
    succ = _Successors(sys, cap)
    level = {m0}
    for _ in range(k):
        nxt = set()
        for s in level:
            nxt.update(succ(s))
            if len(nxt) >= cap:
                succ.truncated = True
                break
        level = nxt
    return frozenset(obs(s) for s in level), succ.truncated


# --- strategy comparison ---------------------------------------------------------------------


def check_locally_better(sys_s: ParsSystem, sys_r: ParsSystem, obs: Observation | str = "nnorm",
                         depth: int = 8, elements=None, cap: int = DEFAULT_CAP) -> CheckVerdict:
    """Local criterion for "``sys_s`` is better than ``sys_r``".

    For every ``t`` (an ``sys_s`` step of ``[1 a]``) and ``s`` (an ``sys_r``
    step of ``[1 a]``) and every ``k <= depth`` there must be an ``sys_r``
    k-step extension of ``t`` whose observation is at least that of some
    ``sys_s`` k-step extension of ``s``.  Both sides are computed exactly, so
    a failure at some ``k`` is conclusive; success is evidence up to
    ``depth``.  Failure steps are reported counted from ``[1 a]``.
    """
    if isinstance(obs, str):
        obs = observation(obs, sys_s)
    if elements is None:
        elements = tuple(sorted(set(sys_s.redexes) | set(sys_r.redexes), key=element_key))
    pairs, truncated = _divergences(sys_s, sys_r, elements, cap)
    vs_s, vs_r = ValueSets(sys_s, obs, cap), ValueSets(sys_r, obs, cap)
    for k in range(depth + 1):
        for a, t, s in pairs:
            high = vs_r.multi(t, k)
            low = vs_s.multi(s, k)
            if _dominating_pair(obs, high, low) is None:
                trunc = truncated or vs_s.truncated or vs_r.truncated
                start = unit(a)
                hv = max(high) if obs.tag == "nnorm" else None
                lv = min(low) if obs.tag == "nnorm" else None
                return CheckVerdict("locally-better", False, not trunc, depth, trunc,
                                    f"at {a}, step {k + 1}: no extension of the {sys_s.name} reduct {t} "
                                    f"dominates one of the {sys_r.name} reduct {s}",
                                    Witness("not-dominated", start, (start, t), (start, s), k, hv, lv), obs.tag)
    trunc = truncated or vs_s.truncated or vs_r.truncated
    return CheckVerdict("locally-better", True, False, depth, trunc,
                        f"{len(pairs)} divergence(s) dominated at every k <= {depth}", obs=obs.tag)


def check_better_global(sys_s: ParsSystem, sys_r: ParsSystem, m0, obs: Observation | str = "nnorm",
                        depth: int = 8, cap: int = DEFAULT_CAP, method: str = "dp") -> CheckVerdict:
    """Every ``sys_s`` k-step reduct observes at least every ``sys_r`` k-step
    reduct, for all ``k <= depth``."""
    if isinstance(obs, str):
        obs = observation(obs, sys_s)
    truncated = False
    for m in _starts(m0):
        for k in range(depth + 1):
            high, t1 = frontier_values(sys_s, m, obs, k, cap, method)
            low, t2 = frontier_values(sys_r, m, obs, k, cap, method)
            truncated |= t1 or t2
            for x in _sorted_values(high):
                for y in _sorted_values(low):
                    if not y <= x:
                        return CheckVerdict("better", False, not truncated, depth, truncated,
                                            f"after {k} steps from {m}: {x} is not above {y}",
                                            Witness("differ", m, (m,), (m,), k, x, y), obs.tag)
    return CheckVerdict("better", True, False, depth, truncated,
                        f"domination at every k <= {depth}", obs=obs.tag)


def normalizing_criterion(strategy_sys: ParsSystem, full: ParsSystem, depth: int = 8, elements=None) -> CheckVerdict:
    """Local evidence that ``strategy_sys`` is asymptotically normalizing."""
    return check_locally_better(strategy_sys, full, "nnorm", depth, elements)


def perpetual_criterion(strategy_sys: ParsSystem, full: ParsSystem, depth: int = 8, elements=None) -> CheckVerdict:
    """Local evidence that every ``strategy_sys`` sequence converges with
    probability at most every limit probability."""
    return check_locally_better(full, strategy_sys, "nnorm", depth, elements)


# --- confluence family -------------------------------------------------------------------------

CONFLUENCE_KINDS = ("full", "obs", "skew")


def _skew_impossible(r: MultiDistribution, s: MultiDistribution, obs: Observation) -> bool:
    """No extension of ``s`` can ever observe at least ``nf(r)``: some normal
    form has more mass in ``r`` than ``s`` holds there plus all its pending mass."""
    nr, ns = nf(r, obs.is_normal), nf(s, obs.is_normal)
    residual = s.mass - ns.mass
    return any(p > ns.get(u) + residual for u, p in nr.items())


def check_confluence(sys: ParsSystem, m0, obs: Observation | str = "nf", depth: int = 4,
                     kind: str = "skew", cap: int = DEFAULT_CAP) -> CheckVerdict:
    """Bounded confluence, obs-confluence or skew-confluence from ``m0``.

    Divergences range over states reachable in at most ``depth`` steps; joins
    are searched within ``depth`` further steps.  A failure is conclusive when
    the missing join is impossible for every extension (a normal form already
    carries more mass than the other side can ever collect, or both reachable
    sets are finite and fully explored).
    """
    if kind not in CONFLUENCE_KINDS:
        raise ValueError(f"unknown confluence kind {kind!r}")
    if isinstance(obs, str):
        obs = observation(obs, sys)
    prop = {"full": "confluence", "obs": "obs-confluence", "skew": "skew-confluence"}[kind]
    succ = _Successors(sys, cap)
    tops = []
    trunc_any = False
    for m in _starts(m0):
        reach, _closed, t = _reach(succ, m, depth, cap)
        trunc_any |= t
        tops.append((m, reach))
    memo: dict = {}

    def reach_of(s):
        if s not in memo:
            memo[s] = _reach(succ, s, depth, cap)
        return memo[s]

    best = None
    for m, reach in tops:
        states = sorted(reach, key=lambda s: (reach[s], s.sort_key()))
        pairs = itertools.permutations(states, 2) if kind == "skew" else itertools.combinations(states, 2)
        for s, r in pairs:
            rs, closed_s, ts = reach_of(s)
            trunc_any |= ts
            if kind == "skew":
                target = obs(r)
                ok = any(target <= obs(x) for x in rs)
                certain = _skew_impossible(r, s, obs) or closed_s
            else:
                rr, closed_r, tr = reach_of(r)
                trunc_any |= tr
                if kind == "obs":
                    ok = bool({obs(x) for x in rs} & {obs(y) for y in rr})
                else:
                    ok = bool(set(rs) & set(rr))
                nf_obs = Observation("nf", obs.is_normal)
                certain = (closed_s and closed_r) or _skew_impossible(r, s, nf_obs) or _skew_impossible(s, r, nf_obs)
                if kind == "obs" and obs.tag == "nf":
                    certain = certain or _skew_impossible(r, s, obs) or _skew_impossible(s, r, obs)
            if not ok:
                path_s = _path_to(succ, m, s, reach)
                path_r = _path_to(succ, m, r, reach)
                w = Witness("no-extension", m, path_s, path_r, depth, obs(s), obs(r), kind)
                if certain:
                    trunc = trunc_any or succ.truncated
                    return CheckVerdict(prop, False, True, depth, trunc,
                                        f"from {s} no extension can match {r}", w, obs.tag)
                if best is None:
                    best = (s, r, w)
    trunc = trunc_any or succ.truncated
    if best is not None:
        s, r, w = best
        return CheckVerdict(prop, False, False, depth, trunc,
                            f"no join for {s} and {r} within {depth} further steps", w, obs.tag)
    return CheckVerdict(prop, True, False, depth, trunc,
                        f"every divergence within depth {depth} joins within {depth} further steps", obs=obs.tag)


def check_skew_confluence(sys: ParsSystem, m0, obs: Observation | str = "nf", depth: int = 4,
                          cap: int = DEFAULT_CAP) -> CheckVerdict:
    return check_confluence(sys, m0, obs, depth, "skew", cap)


def _path_to(succ: _Successors, m, target, reach) -> tuple:
    """A shortest path from ``m`` to ``target`` inside the explored set."""
    parent = {m: None}
    frontier = [m]
    while frontier and target not in parent:
        nxt = []
        for s in frontier:
            for t in succ(s):
                if t in reach and t not in parent:
                    parent[t] = s
                    nxt.append(t)
        frontier = nxt
    path = [target]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


# --- witness replay -----------------------------------------------------------------------------


def _valid_path(sys: ParsSystem, path, cap: int) -> bool:
    return all(b in successors(sys, a, cap).states for a, b in zip(path, path[1:]))


def replay_witness(w: Witness, obs: Observation | str, sys: ParsSystem, sys_r: ParsSystem | None = None,
                   cap: int = DEFAULT_CAP) -> bool:
    """Re-establish the claim of ``w`` from scratch.

    ``sys_r`` is the second system of a strategy comparison; its steps
    produce ``right[1]`` while ``sys`` produces ``left[1]``.
    """
    if isinstance(obs, str):
        obs = observation(obs, sys)
    right_sys = sys_r or sys
    if w.left[0] != w.start or w.right[0] != w.start:
        return False
    if not (_valid_path(sys, w.left, cap) and _valid_path(right_sys, w.right, cap)):
        return False
    t, s = w.left[-1], w.right[-1]
    if w.claim == "differ":
        if len(w.left) == 1:
            # frontier-level claim: recompute the two frontiers
            high, _ = frontier_values(sys, w.start, obs, w.step, cap)
            low, _ = frontier_values(right_sys, w.start, obs, w.step, cap)
            return w.left_value in high and w.right_value in low and not w.right_value <= w.left_value
        return obs(t) == w.left_value and obs(s) == w.right_value and w.left_value != w.right_value
    if w.claim == "no-join":
        return obs(t) == obs(s) and not (set(successors(sys, t, cap).states) & set(successors(sys, s, cap).states))
    if w.claim == "no-paired-extension":
        return not _PairSearch(_Successors(sys, cap), obs)(t, s, w.step)
    if w.claim == "not-dominated":
        high = ValueSets(right_sys, obs, cap).multi(t, w.step)
        low = ValueSets(sys, obs, cap).multi(s, w.step)
        return _dominating_pair(obs, high, low) is None
    if w.claim == "no-extension":
        rs, _, _ = _reach(_Successors(sys, cap), t, w.step, cap)
        if w.kind == "skew":
            return not any(obs(s) <= obs(x) for x in rs)
        rr, _, _ = _reach(_Successors(sys, cap), s, w.step, cap)
        if w.kind == "obs":
            return not ({obs(x) for x in rs} & {obs(y) for y in rr})
        return not (set(rs) & set(rr))
    raise ValueError(f"unknown witness claim {w.claim!r}")


# --- random systems ---------------------------------------------------------------------------

_PARTS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), ONE)


def _random_partition(rng: random.Random) -> list:
    parts, left = [], ONE
    while left:
        p = rng.choice([q for q in _PARTS if q <= left])
        parts.append(p)
        left -= p
    return parts


def random_system(rng: random.Random | int, max_elements: int = 6, max_rules: int = 2) -> ParsSystem:
    """Random finite system over ``e0..e{n-1}`` (``n <= max_elements``) with at
    most ``max_rules`` rules per element and dyadic probabilities."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    n = rng.randint(2, max_elements)
    universe = [f"e{i}" for i in range(n)]
    table = {}
    for a in universe:
        k = rng.choice(range(max_rules + 1))
        rules = []
        for _ in range(k):
            rhs: dict = {}
            for p in _random_partition(rng):
                b = rng.choice(universe)
                rhs[b] = rhs.get(b, ZERO) + p
            rules.append(Rule(SubDistribution(rhs)))
        if rules:
            table[a] = rules
    return ParsSystem(table, name=f"random-{n}")
