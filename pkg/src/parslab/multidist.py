"""Exact subdistributions and multidistributions.

Probabilities are :class:`fractions.Fraction` values in ``[0, 1]``.  Elements
are opaque hashable objects; the only things this module ever asks of them
are equality and a deterministic sort key (see :func:`element_key`).
"""
from __future__ import annotations

import enum
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Tuple

from .errors import MassOverflow

Prob = Fraction
Element = Hashable
IsNormal = Callable[[Element], bool]

ONE = Fraction(1)
ZERO = Fraction(0)


def prob(value) -> Fraction:
    """Coerce ``value`` (int, str like ``"3/8"``, Fraction) to an exact probability."""
    if isinstance(value, float):
        raise TypeError("floating point probabilities are not accepted")
    p = Fraction(value)
    if p < 0 or p > 1:
        raise ValueError(f"probability {p} outside [0, 1]")
    return p


def element_key(a):
    """Total, deterministic ordering key for elements of mixed kinds.

    Decimal strings sort numerically (so the random walk over N prints in
    order), other strings lexicographically, and objects exposing a
    ``sort_key`` attribute (lambda terms) by that key.
    """
    if isinstance(a, bool):
        return (1, 0, str(a))
    if isinstance(a, int):
        return (0, a, "")
    if isinstance(a, str):
        if a.isdigit():
            return (0, int(a), a)
        return (1, 0, a)
    key = getattr(a, "sort_key", None)
    if key is not None:
        return (2, 0, key)
    return (3, 0, repr(a))


def show(a) -> str:
    """Display form of an element: strings bare, anything else via repr."""
    return a if isinstance(a, str) else repr(a)


def format_prob(p: Fraction) -> str:
    return str(p)


class SubDistribution(Mapping):
    """Finite-support map element -> probability with total mass <= 1.

    Zero entries are never stored, so ``keys()`` is the support.  Instances
    are immutable and hashable, and iterate in canonical element order.
    """

    __slots__ = ("_entries", "_hash", "_mass")

    def __init__(self, entries: Mapping | Iterable[Tuple[Element, object]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict = {}
        for a, p in items:
            p = prob(p)
            if p:
                acc[a] = acc.get(a, ZERO) + p
        mass = sum(acc.values(), ZERO)
        if mass > 1:
            raise MassOverflow(f"subdistribution mass {mass} exceeds 1")
        self._entries = {a: acc[a] for a in sorted(acc, key=element_key)}
        self._mass = mass
        self._hash = None

    def __getitem__(self, a):
        return self._entries[a]

    def get(self, a, default=ZERO):
        return self._entries.get(a, default)

    def __iter__(self) -> Iterator:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._entries.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, SubDistribution):
            return self._entries == other._entries
        return NotImplemented

    def __repr__(self):
        body = ", ".join(f"{show(a)}: {p}" for a, p in self._entries.items())
        return "{" + body + "}"

    @property
    def mass(self) -> Fraction:
        return self._mass

    def norm(self) -> Fraction:
        return self._mass

    @property
    def support(self) -> tuple:
        return tuple(self._entries)

    def __le__(self, other: "SubDistribution") -> bool:
        return all(p <= other.get(a) for a, p in self._entries.items())

    def __ge__(self, other: "SubDistribution") -> bool:
        return other <= self

    def __lt__(self, other):
        return self <= other and self != other

    def __gt__(self, other):
        return other < self

    def restrict(self, keep: Callable[[Element], bool]) -> "SubDistribution":
        return SubDistribution((a, p) for a, p in self._entries.items() if keep(a))

    def join(self, other: "SubDistribution") -> dict:
        """Pointwise maximum, returned as a plain dict (its mass may exceed 1)."""
        out = dict(self._entries)
        for a, p in other.items():
            if p > out.get(a, ZERO):
                out[a] = p
        return out


EMPTY = SubDistribution()


class MultiDistribution:
    """Finite multiset of ``(p, a)`` pairs, ``p > 0``, with total mass <= 1.

    Pairs are kept sorted by ``(element_key(a), p)`` so that structural
    equality coincides with multiset equality.
    """

    __slots__ = ("pairs", "_hash", "_mass")

    def __init__(self, pairs: Iterable[Tuple[object, Element]] = (), *, _canonical=False):
        if _canonical:
            self.pairs = tuple(pairs)
        else:
            cleaned = []
            for p, a in pairs:
                p = prob(p)
                if p:
                    cleaned.append((p, a))
            cleaned.sort(key=lambda pa: (element_key(pa[1]), pa[0]))
            self.pairs = tuple(cleaned)
        self._mass = sum((p for p, _ in self.pairs), ZERO)
        if self._mass > 1:
            raise MassOverflow(f"multidistribution mass {self._mass} exceeds 1")
        self._hash = None

    @classmethod
    def unit(cls, a: Element) -> "MultiDistribution":
        return cls([(ONE, a)])

    @classmethod
    def from_distribution(cls, dist: Mapping) -> "MultiDistribution":
        return cls((p, a) for a, p in dist.items())

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        if isinstance(other, MultiDistribution):
            return self.pairs == other.pairs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.pairs)
        return self._hash

    def __repr__(self):
        return "[" + ", ".join(f"{p} {show(a)}" for p, a in self.pairs) + "]"

    def __add__(self, other: "MultiDistribution") -> "MultiDistribution":
        return msum([self, other])

    def __rmul__(self, q) -> "MultiDistribution":
        return scale(q, self)

    @property
    def mass(self) -> Fraction:
        return self._mass

    @property
    def elements(self) -> tuple:
        return tuple(a for _, a in self.pairs)

    def sort_key(self):
        return tuple((element_key(a), p) for p, a in self.pairs)


def scale(q, m: MultiDistribution) -> MultiDistribution:
    q = prob(q)
    if q == 0:
        raise ValueError("scalar must be positive")
    # multiplying by a positive constant preserves the canonical order
    return MultiDistribution(((q * p, a) for p, a in m.pairs), _canonical=True)


def msum(ms: Iterable[MultiDistribution]) -> MultiDistribution:
    """Disjoint (multiset) sum; duplicate pairs stay distinct occurrences."""
    pairs = []
    for m in ms:
        pairs.extend(m.pairs)
    pairs.sort(key=lambda pa: (element_key(pa[1]), pa[0]))
    return MultiDistribution(pairs, _canonical=True)


def flatten(m: MultiDistribution) -> SubDistribution:
    return SubDistribution((a, p) for p, a in m.pairs)


def nf(m: MultiDistribution, is_normal: IsNormal) -> SubDistribution:
    return SubDistribution((a, p) for p, a in m.pairs if is_normal(a))


def nnorm(m: MultiDistribution, is_normal: IsNormal) -> Fraction:
    return sum((p for p, a in m.pairs if is_normal(a)), ZERO)


def merge_duplicates(m: MultiDistribution) -> MultiDistribution:
    """Collapse occurrences of the same element into one pair (flat-equivalent)."""
    return MultiDistribution.from_distribution(flatten(m))


class Relation(enum.Enum):
    EQUAL = "equal"
    LEQ = "leq"
    GEQ = "geq"
    INCOMPARABLE = "incomparable"


def relate(x, y) -> Relation:
    """Strongest relation between two partially ordered observed values."""
    if x == y:
        return Relation.EQUAL
    if x <= y:
        return Relation.LEQ
    if y <= x:
        return Relation.GEQ
    return Relation.INCOMPARABLE


def compare(m: MultiDistribution, r: MultiDistribution, mode: str,
            is_normal: IsNormal | None = None) -> Relation:
    """Compare two multidistributions through ``flat``, ``nf`` or ``norm``."""
    if mode == "flat":
        return relate(flatten(m), flatten(r))
    if is_normal is None:
        raise ValueError(f"mode {mode!r} needs an is_normal predicate")
    if mode == "nf":
        return relate(nf(m, is_normal), nf(r, is_normal))
    if mode == "norm":
        return relate(nnorm(m, is_normal), nnorm(r, is_normal))
    raise ValueError(f"unknown comparison mode {mode!r}")
