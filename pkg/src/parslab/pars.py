"""Probabilistic abstract rewrite systems and their lifting to multidistributions."""
from __future__ import annotations

import itertools
import random
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple, Optional, Sequence

from .errors import InvalidRule, UnknownPolicy
from .multidist import (
    ONE,
    Element,
    MultiDistribution,
    SubDistribution,
    element_key,
    merge_duplicates,
    nf,
    nnorm,
)

DEFAULT_CAP = 10_000


@dataclass(frozen=True)
class Rule:
    """One rewrite step ``a -> rhs``; ``rhs`` must have mass exactly 1."""

    rhs: SubDistribution
    label: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.rhs, SubDistribution):
            object.__setattr__(self, "rhs", SubDistribution(self.rhs))
        if self.rhs.mass != 1:
            raise InvalidRule(f"rule right-hand side has mass {self.rhs.mass}, expected 1")


def _as_rule(r) -> Rule:
    return r if isinstance(r, Rule) else Rule(SubDistribution(r))


class ParsSystem:
    """A relation from elements to full finite distributions.

    Rules come from an explicit table, from a ``generator`` callback invoked
    lazily per element (memoised), or both; table entries win.  An element
    is a normal form iff it has no rule.
    """

    def __init__(self, rules: Mapping[Element, Iterable] | None = None, *,
                 generator: Callable[[Element], Iterable] | None = None,
                 name: str = "system", generator_name: str | None = None):
        self.name = name
        self.generator = generator
        self.generator_name = generator_name
        self._table = {a: tuple(_as_rule(r) for r in rs) for a, rs in (rules or {}).items()}
        self._table = {a: rs for a, rs in self._table.items() if rs}
        self._memo: dict = {}
        self._lock = threading.Lock()

    def rules(self, a: Element) -> tuple:
        if a in self._table:
            return self._table[a]
        if self.generator is None:
            return ()
        try:
            return self._memo[a]
        except KeyError:
            pass
        generated = tuple(_as_rule(r) for r in (self.generator(a) or ()))
        with self._lock:
            return self._memo.setdefault(a, generated)

    def is_normal(self, a: Element) -> bool:
        return not self.rules(a)

    def is_deterministic_on(self, elements: Iterable[Element]) -> bool:
        return all(len(self.rules(a)) <= 1 for a in elements)

    @property
    def table(self) -> dict:
        return dict(self._table)

    @property
    def elements(self) -> tuple:
        """Elements mentioned by the explicit table (LHS and RHS), sorted."""
        seen = set(self._table)
        for rs in self._table.values():
            for r in rs:
                seen.update(r.rhs)
        return tuple(sorted(seen, key=element_key))

    @property
    def redexes(self) -> tuple:
        """Non-normal elements of the explicit table, sorted."""
        return tuple(sorted(self._table, key=element_key))

    def restrict(self, select: Callable[[Element, tuple], Sequence[int]], name: str | None = None) -> "ParsSystem":
        """Sub-relation keeping, for each element, the rules at ``select(a, rules)``."""
        parent = self

        def gen(a):
            rs = parent.rules(a)
            return [rs[i] for i in select(a, rs)] if rs else ()

        return ParsSystem(generator=gen, name=name or f"{self.name}|restricted",
                          generator_name=self.generator_name)

    def __eq__(self, other):
        if not isinstance(other, ParsSystem):
            return NotImplemented
        return (self.name, self._table, self.generator_name) == (other.name, other._table, other.generator_name)

    __hash__ = None

    def __repr__(self):
        return f"ParsSystem({self.name!r}, {len(self._table)} rule heads)"


# --- choice resolution -----------------------------------------------------


class Occurrence(NamedTuple):
    element: Element
    position: int
    step: int


def _rule_index_for(k: int, rules: tuple) -> int:
    label = f"r{k}"
    for i, r in enumerate(rules):
        if r.label == label:
            return i
    return min(k, len(rules) - 1)


class Uniform:
    """Same rule for every occurrence: the rule labelled ``r<k>`` if the element
    has one, else rule index ``k`` (clamped to the last rule)."""

    def __init__(self, k: int):
        self.k = k
        self.name = f"all-r{k}"

    def __call__(self, occ: Occurrence, rules: tuple) -> int:
        return _rule_index_for(self.k, rules)


class Lex:
    """History-dependent policy: at step ``n`` use rule index ``bits[n]``.

    Steps past the end of ``bits`` repeat its final digit.
    """

    def __init__(self, bits: str):
        if not bits or not bits.isdigit():
            raise UnknownPolicy(f"lex policy needs a digit string, got {bits!r}")
        self.bits = bits
        self.name = f"lex({bits})"

    def __call__(self, occ: Occurrence, rules: tuple) -> int:
        k = int(self.bits[min(occ.step, len(self.bits) - 1)])
        return _rule_index_for(k, rules)


class Seeded:
    """Pseudo-random but reproducible per (seed, step, position, element)."""

    def __init__(self, seed: int):
        self.seed = seed
        self.name = f"seed:{seed}"

    def __call__(self, occ: Occurrence, rules: tuple) -> int:
        rng = random.Random(f"{self.seed}|{occ.step}|{occ.position}|{element_key(occ.element)}")
        return rng.randrange(len(rules))


_POLICY_RE = re.compile(r"^(?:all|always)-r(\d+)$")


def resolve_policy(name: str):
    """Map a policy name to a resolver: ``all-r<k>``, ``always-r<k>``,
    ``lex(<digits>)``, ``seed:<n>``, ``random(<n>)`` or a bare integer seed."""
    name = name.strip()
    m = _POLICY_RE.match(name)
    if m:
        return Uniform(int(m.group(1)))
    m = re.match(r"^lex\((\d+)\)$", name)
    if m:
        return Lex(m.group(1))
    m = re.match(r"^(?:seed:|random\()?(\d+)\)?$", name)
    if m:
        return Seeded(int(m.group(1)))
    raise UnknownPolicy(f"unknown policy {name!r}")


def strategy(sys: ParsSystem, name: str) -> ParsSystem:
    """Sub-relation named ``full`` (the system itself) or ``all-r<k>``/``always-r<k>``."""
    if name == "full":
        return sys
    m = _POLICY_RE.match(name)
    if not m:
        raise UnknownPolicy(f"unknown strategy {name!r}")
    k = int(m.group(1))
    return sys.restrict(lambda a, rs: [_rule_index_for(k, rs)], name=f"{sys.name}|{name}")


# --- lifting -------------------------------------------------------------------


def lift_step(sys: ParsSystem, m: MultiDistribution, choose, step: int = 0) -> MultiDistribution:
    """One lifted step: normal occurrences stay, every other occurrence is
    replaced by the scaled right-hand side of the rule ``choose`` picks."""
    out = []
    for i, (p, a) in enumerate(m.pairs):
        rules = sys.rules(a)
        if not rules:
            out.append((p, a))
            continue
        k = choose(Occurrence(a, i, step), rules)
        if not 0 <= k < len(rules):
            raise IndexError(f"resolver picked rule {k} for {a!r} which has {len(rules)} rules")
        out.extend((p * q, b) for b, q in rules[k].rhs.items())
    return MultiDistribution(out)


class Successors(NamedTuple):
    states: list
    truncated: bool


def successors(sys: ParsSystem, m: MultiDistribution, cap: int = DEFAULT_CAP) -> Successors:
    """All distinct one-step lifted reducts of ``m``, in generation order.

    Identical occurrences are grouped, so permuted choice vectors are not
    enumerated twice.
    """
    fixed = []
    groups = []  # (p, a, n_occurrences, rules)
    for (p, a), run in itertools.groupby(m.pairs):
        n = len(list(run))
        rules = sys.rules(a)
        if rules:
            groups.append((p, a, n, rules))
        else:
            fixed.extend([(p, a)] * n)
    per_group = []
    for p, a, n, rules in groups:
        contribs = [[(p * q, b) for b, q in r.rhs.items()] for r in rules]
        options = []
        for combo in itertools.combinations_with_replacement(range(len(rules)), n):
            pairs = []
            for k in combo:
                pairs.extend(contribs[k])
            options.append(pairs)
        per_group.append(options)
    seen: dict = {}
    truncated = False
    for choice in itertools.product(*per_group):
        pairs = list(fixed)
        for part in choice:
            pairs.extend(part)
        s = MultiDistribution(pairs)
        if s not in seen:
            if len(seen) >= cap:
                truncated = True
                break
            seen[s] = None
    return Successors(list(seen), truncated)


# --- traces --------------------------------------------------------------------


@dataclass
class RewriteTrace:
    states: list
    resolver: str
    nf: list = field(default_factory=list)
    nnorm: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.states) - 1

    @property
    def final(self) -> MultiDistribution:
        return self.states[-1]


def trace_from_states(sys: ParsSystem, states: Sequence[MultiDistribution], resolver: str) -> RewriteTrace:
    return RewriteTrace(list(states), resolver,
                        [nf(s, sys.is_normal) for s in states],
                        [nnorm(s, sys.is_normal) for s in states])


def run(sys: ParsSystem, m0: MultiDistribution, choose, depth: int, *, merge: bool = False) -> RewriteTrace:
    """Iterate ``lift_step`` ``depth`` times under ``choose``.

    ``merge`` collapses repeated occurrences of an element after every step.
    The result is flat-equivalent to the unmerged trace whenever ``choose``
    treats every occurrence of an element alike, and keeps traces of
    duplicating lambda terms small.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    states = [merge_duplicates(m0) if merge else m0]
    for n in range(depth):
        nxt = lift_step(sys, states[-1], choose, n)
        states.append(merge_duplicates(nxt) if merge else nxt)
    return trace_from_states(sys, states, getattr(choose, "name", repr(choose)))


def unit(a: Element) -> MultiDistribution:
    return MultiDistribution([(ONE, a)])


# --- built-in random walk generators -----------------------------------------------


def walk_rules(a):
    """``n+1 -> {n: 1/2, n+2: 1/2}`` over decimal strings; 0 is normal."""
    if isinstance(a, str) and a.isdigit() and int(a) > 0:
        n = int(a)
        return [Rule(SubDistribution({str(n - 1): Fraction(1, 2), str(n + 1): Fraction(1, 2)}))]
    return ()


def walk_stop_rules(a):
    """The walk above, plus the option ``n+1 -> {stop: 1}``."""
    rs = list(walk_rules(a))
    if rs:
        rs.append(Rule(SubDistribution({"stop": ONE})))
    return rs


GENERATORS = {"walk": walk_rules, "walk-stop": walk_stop_rules}

# elements each generator knows about, rule heads or not
GENERATOR_UNIVERSE = {
    "walk": lambda a: isinstance(a, str) and a.isdigit(),
    "walk-stop": lambda a: isinstance(a, str) and (a.isdigit() or a == "stop"),
}
