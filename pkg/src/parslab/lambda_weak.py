"""Probabilistic weak call-by-value lambda calculus.

Terms are ``x | \\x.M | M N | M (+) N``; values are variables and
abstractions.  Reduction never enters an abstraction body nor either branch
of a choice:

    (\\x.M) V  ->  {M[x:=V]: 1}
    P (+) Q    ->  {P: 1/2} + {Q: 1/2}

plus the two application congruences.  Terms compare up to alpha-renaming.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import NamedTuple

from .errors import InvalidPosition, NotAValue
from .multidist import ONE, SubDistribution

HALF = Fraction(1, 2)


class Term:
    __slots__ = ("_key", "_fv", "_size")

    def __init__(self):
        self._key = None
        self._fv = None
        self._size = None

    @property
    def sort_key(self) -> str:
        """Nameless (de Bruijn) rendering, used for alpha-equality and ordering."""
        if self._key is None:
            self._key = _nameless(self, ())
        return self._key

    @property
    def free_vars(self) -> frozenset:
        if self._fv is None:
            self._fv = _free_vars(self)
        return self._fv

    @property
    def size(self) -> int:
        if self._size is None:
            if isinstance(self, Var):
                self._size = 1
            elif isinstance(self, Abs):
                self._size = 1 + self.body.size
            else:
                self._size = 1 + self.left.size + self.right.size
        return self._size

    def is_value(self) -> bool:
        return isinstance(self, (Var, Abs))

    def is_closed(self) -> bool:
        return not self.free_vars

    def __eq__(self, other):
        if not isinstance(other, Term):
            return NotImplemented
        return self is other or self.sort_key == other.sort_key

    def __hash__(self):
        return hash(self.sort_key)

    def __repr__(self):
        from .syntax import print_term
        return print_term(self)


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        super().__init__()
        self.name = name


class Abs(Term):
    __slots__ = ("param", "body")

    def __init__(self, param: str, body: Term):
        super().__init__()
        self.param = param
        self.body = body


class App(Term):
    __slots__ = ("left", "right")

    def __init__(self, left: Term, right: Term):
        super().__init__()
        self.left = left
        self.right = right


class Choice(Term):
    __slots__ = ("left", "right")

    def __init__(self, left: Term, right: Term):
        super().__init__()
        self.left = left
        self.right = right


def _nameless(t: Term, env: tuple) -> str:
    if isinstance(t, Var):
        for i in range(len(env) - 1, -1, -1):
            if env[i] == t.name:
                return str(len(env) - 1 - i)
        return "'" + t.name
    if isinstance(t, Abs):
        return "\\" + _nameless(t.body, env + (t.param,))
    op = " " if isinstance(t, App) else " + "
    return "(" + _nameless(t.left, env) + op + _nameless(t.right, env) + ")"


def _free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Abs):
        return t.body.free_vars - {t.param}
    return t.left.free_vars | t.right.free_vars


def fresh_name(base: str, avoid) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def replace_free(m: Term, x: str, n: Term) -> Term:
    """Capture-avoiding ``m[x:=n]`` for an arbitrary term ``n``."""
    if x not in m.free_vars:
        return m
    if isinstance(m, Var):
        return n
    if isinstance(m, Abs):
        if m.param == x:
            return m
        if m.param in n.free_vars:
            y = fresh_name(m.param, n.free_vars | m.body.free_vars | {x})
            body = replace_free(m.body, m.param, Var(y))
            return Abs(y, replace_free(body, x, n))
        return Abs(m.param, replace_free(m.body, x, n))
    cls = type(m)
    return cls(replace_free(m.left, x, n), replace_free(m.right, x, n))


def substitute(m: Term, x: str, v: Term) -> Term:
    if not v.is_value():
        raise NotAValue(f"cannot substitute non-value {v!r} for {x}")
    return replace_free(m, x, v)


# --- redexes ---------------------------------------------------------------------


class RedexPosition(NamedTuple):
    path: tuple  # of "L"/"R": application left / right
    kind: str  # "beta" | "choice"

    @property
    def label(self) -> str:
        return f"{self.kind}@{''.join(self.path) or 'root'}"


def redexes(m: Term, _path: tuple = ()) -> list:
    """All weak redex positions of ``m``, left to right."""
    if isinstance(m, Choice):
        return [RedexPosition(_path, "choice")]
    if isinstance(m, App):
        if isinstance(m.left, Abs) and m.right.is_value():
            return [RedexPosition(_path, "beta")]
        return redexes(m.left, _path + ("L",)) + redexes(m.right, _path + ("R",))
    return []


def is_normal(m: Term) -> bool:
    return not redexes(m)


def _contract(m: Term, kind: str) -> list:
    if kind == "beta" and isinstance(m, App) and isinstance(m.left, Abs) and m.right.is_value():
        return [(substitute(m.left.body, m.left.param, m.right), ONE)]
    if kind == "choice" and isinstance(m, Choice):
        return [(m.left, HALF), (m.right, HALF)]
    raise InvalidPosition(f"no {kind} redex at this position of {m!r}")


def _step(m: Term, path: tuple, kind: str) -> list:
    if not path:
        return _contract(m, kind)
    if not isinstance(m, App):
        raise InvalidPosition(f"path {path} leaves the application spine")
    if path[0] == "L":
        return [(App(t, m.right), p) for t, p in _step(m.left, path[1:], kind)]
    if path[0] == "R":
        return [(App(m.left, t), p) for t, p in _step(m.right, path[1:], kind)]
    raise InvalidPosition(f"bad path step {path[0]!r}")


def step_at(m: Term, pos: RedexPosition) -> SubDistribution:
    return SubDistribution(_step(m, tuple(pos.path), pos.kind))


# --- the PARS over terms ------------------------------------------------------------

STRATEGIES = ("full", "leftmost", "rightmost")


def _random_pick(seed, m: Term, n: int) -> int:
    return random.Random(f"{seed}|{m.sort_key}").randrange(n)


def lambda_pars(strategy: str = "full"):
    """The weak calculus as a :class:`~parslab.pars.ParsSystem` over terms.

    ``full`` offers one rule per redex, ``leftmost``/``rightmost`` exactly
    one, and ``random(<seed>)`` one redex fixed per term from the seed.
    Every strategy has the same normal forms.
    """
    from .errors import UnknownPolicy
    from .pars import ParsSystem, Rule

    seed = None
    if strategy not in STRATEGIES:
        if strategy.startswith("random(") and strategy.endswith(")") and strategy[7:-1].isdigit():
            seed = int(strategy[7:-1])
        else:
            raise UnknownPolicy(f"unknown lambda strategy {strategy!r}")

    def gen(m):
        if not isinstance(m, Term):
            return ()
        positions = redexes(m)
        if not positions:
            return ()
        if strategy == "leftmost":
            positions = positions[:1]
        elif strategy == "rightmost":
            positions = positions[-1:]
        elif seed is not None:
            positions = [positions[_random_pick(seed, m, len(positions))]]
        return [Rule(step_at(m, p), p.label) for p in positions]

    return ParsSystem(generator=gen, name=f"lambda-weak|{strategy}", generator_name=f"lambda:{strategy}")


# --- random closed terms -----------------------------------------------------------------


def random_term(rng: random.Random, max_size: int = 12, choice_weight: Fraction = Fraction(1, 3)) -> Term:
    """A closed term with exactly ``rng.randint(2, max_size)`` nodes.

    Each internal node is a choice with probability ``choice_weight``; the
    rest are split evenly between abstractions and applications.
    """
    names = "xyzuvw"
    w_choice = float(choice_weight)
    w_app = w_choice + (1 - w_choice) / 2

    def binder(scope):
        return names[len(scope) % len(names)]

    def gen(budget: int, scope: tuple) -> Term:
        if budget == 1:
            return Var(rng.choice(scope))
        if budget == 2:
            v = binder(scope)
            return Abs(v, gen(1, scope + (v,)))
        # with nothing in scope every part needs at least two nodes
        least = 1 if scope else 2
        r = rng.random()
        if r < w_app and budget - 1 >= 2 * least:
            k = rng.randint(least, budget - 1 - least)
            cls = Choice if r < w_choice else App
            return cls(gen(k, scope), gen(budget - 1 - k, scope))
        v = binder(scope)
        return Abs(v, gen(budget - 1, scope + (v,)))

    return gen(rng.randint(2, max_size), ())


def random_corpus(seed: int, n: int, max_size: int = 12, min_redexes: int = 0) -> list:
    """``n`` seeded random closed terms; with ``min_redexes`` draws are
    rejected until a term has at least that many redexes."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        t = random_term(rng, max_size)
        if len(redexes(t)) >= min_redexes:
            out.append(t)
    return out


# --- diamond harness -------------------------------------------------------------------


def diamond_harness(corpus, depth: int = 8, reach: int = 2, cap: int = 10_000):
    """Check the pointed nf-diamond on every corpus term and on every term
    reachable from it within ``reach`` steps, then random descent for ``nf``
    from each corpus term up to ``depth``.

    For distinct one-step reducts ``t`` and ``s`` of ``[1 M]`` the harness
    demands ``nf t = nf s = 0`` and a common one-step reduct.  Returns a
    :class:`~parslab.checkers.CheckVerdict`; ``detail`` counts the checks.
    """
    from .checkers import CheckVerdict, Witness, check_rd_global, reachable_elements
    from .multidist import nf
    from .pars import successors, unit

    sys = lambda_pars("full")
    pairs_checked = 0
    terms = reachable_elements(sys, corpus, reach, cap)
    for m in terms:
        start = unit(m)
        reducts = successors(sys, start, cap).states
        for t, s in ((t, s) for i, t in enumerate(reducts) for s in reducts[i + 1:]):
            pairs_checked += 1
            vt, vs = nf(t, sys.is_normal), nf(s, sys.is_normal)
            if vt or vs:
                return CheckVerdict("nf-diamond", False, True, 1, False,
                                    f"at {m!r}: a one-step reduct already has normal-form mass",
                                    Witness("differ" if vt != vs else "no-join", start, (start, t), (start, s), 1,
                                            vt, vs), "nf")
            if not set(successors(sys, t, cap).states) & set(successors(sys, s, cap).states):
                return CheckVerdict("nf-diamond", False, True, 1, False, f"at {m!r}: no common one-step reduct",
                                    Witness("no-join", start, (start, t), (start, s), 1, vt, vs), "nf")
    rd = check_rd_global(sys, list(corpus), "nf", depth)
    if not rd.holds:
        return rd
    return CheckVerdict("nf-diamond", True, False, depth, False,
                        f"{len(terms)} term(s), {pairs_checked} divergent pair(s) joined; "
                        f"nf random descent up to depth {depth} on {len(corpus)} corpus term(s)", obs="nf")
