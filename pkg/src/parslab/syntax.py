"""Surface syntax: rule files, lambda terms, definition files, JSON records.

Rule file grammar::

    # comment
    system fig1;
    generator walk;                       (optional: walk | walk-stop)
    rule c -> 1/2 c, 1/2 true;
    rule r2: a -> 1 a;                    (optional rule label)

Lambda terms: ``\\x. M`` (body extends right, ``\\x y. M`` is sugar),
left-associative application, ``M (+) N`` for choice (lowest precedence,
right-associative), parentheses.  Definition files hold one
``name = term`` per line; later definitions may use earlier names.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

from .errors import ParseError
from .lambda_weak import Abs, App, Choice, Term, Var, replace_free
from .multidist import MultiDistribution, SubDistribution
from .pars import GENERATORS, ParsSystem, Rule

IDENT = r"[a-zA-Z_][a-zA-Z0-9_']*"
ELEMENT = r"[a-zA-Z0-9_'](?:[a-zA-Z0-9_']|-(?!>))*"


class _Scanner:
    """Regex tokenizer that tracks 1-based line/column positions."""

    def __init__(self, text: str, tokens: list, source=None):
        self.text = text
        self.source = source
        self.tokens = []
        regex = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in tokens))
        pos, line, line_start = 0, 1, 0
        while pos < len(text):
            m = regex.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
            kind = m.lastgroup
            if kind == "NEWLINE":
                line += 1
                line_start = m.end()
            elif kind not in ("WS", "COMMENT"):
                self.tokens.append((kind, m.group(), line, m.start() - line_start + 1))
            pos = m.end()
        self.end = ("EOF", "", line, pos - line_start + 1)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else self.end

    def next(self):
        tok = self.peek()
        if tok[0] != "EOF":
            self.i += 1
        return tok

    def expect(self, kind, what=None):
        tok = self.next()
        if tok[0] != kind:
            self.error(f"expected {what or kind}, found {tok[1]!r}" if tok[1] else f"expected {what or kind}", tok)
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2], tok[3], self.source)


# --- rule files -------------------------------------------------------------------------

_RULE_TOKENS = [
    ("NEWLINE", r"\n"),
    ("WS", r"[ \t\r]+"),
    ("COMMENT", r"#[^\n]*"),
    ("ARROW", r"->"),
    ("FRAC", r"\d+/\d+"),
    ("WORD", ELEMENT),
    ("SEMI", r";"),
    ("COMMA", r","),
    ("COLON", r":"),
]


def parse_rules(text: str, source=None) -> ParsSystem:
    sc = _Scanner(text, _RULE_TOKENS, source)
    name, generator = "system", None
    table: dict = {}
    while sc.peek()[0] != "EOF":
        kw = sc.expect("WORD", "'system', 'generator' or 'rule'")
        if kw[1] == "system":
            name = sc.expect("WORD", "system name")[1]
            sc.expect("SEMI", "';'")
        elif kw[1] == "generator":
            tok = sc.peek()
            gname = sc.expect("WORD", "generator name")[1]
            if gname not in GENERATORS:
                sc.error(f"unknown generator {gname!r}", tok)
            generator = gname
            sc.expect("SEMI", "';'")
        elif kw[1] == "rule":
            label = None
            head = sc.expect("WORD", "element")
            if sc.peek()[0] == "COLON":
                sc.next()
                label = head[1]
                head = sc.expect("WORD", "element")
            sc.expect("ARROW", "'->'")
            pairs = []
            start = sc.peek()
            while True:
                ptok = sc.next()
                if ptok[0] == "FRAC":
                    num, den = ptok[1].split("/")
                    if int(den) == 0:
                        sc.error("zero denominator", ptok)
                    p = Fraction(int(num), int(den))
                elif ptok[0] == "WORD" and ptok[1].isdigit():
                    p = Fraction(int(ptok[1]))
                else:
                    sc.error("expected a probability like 1/2 or 1", ptok)
                if p <= 0 or p > 1:
                    sc.error(f"probability {p} outside ]0, 1]", ptok)
                elem = sc.expect("WORD", "element")[1]
                pairs.append((elem, p))
                sep = sc.next()
                if sep[0] == "SEMI":
                    break
                if sep[0] != "COMMA":
                    sc.error("expected ',' or ';'", sep)
            total = sum(p for _, p in pairs)
            if total != 1:
                sc.error(f"rule for {head[1]} has total probability {total}, expected 1", start)
            table.setdefault(head[1], []).append(Rule(SubDistribution(pairs), label))
        else:
            sc.error(f"unknown directive {kw[1]!r}", kw)
    gen = GENERATORS.get(generator) if generator else None
    return ParsSystem(table, generator=gen, name=name, generator_name=generator)


def print_rules(sys: ParsSystem) -> str:
    lines = [f"system {sys.name};"]
    if sys.generator_name:
        lines.append(f"generator {sys.generator_name};")
    for a in sys.redexes:
        for r in sys.rules(a):
            rhs = ", ".join(f"{p} {b}" for b, p in r.rhs.items())
            head = f"{r.label}: {a}" if r.label else f"{a}"
            lines.append(f"rule {head} -> {rhs};")
    return "\n".join(lines) + "\n"


# --- lambda terms ------------------------------------------------------------------------

_TERM_TOKENS = [
    ("NEWLINE", r"\n"),
    ("WS", r"[ \t\r]+"),
    ("COMMENT", r"#[^\n]*"),
    ("CHOICE", r"\(\+\)|⊕"),
    ("LAMBDA", r"\\|λ"),
    ("DOT", r"\."),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("EQUALS", r"="),
    ("IDENT", IDENT),
]


def _parse_choice(sc: _Scanner) -> Term:
    left = _parse_app(sc)
    if sc.peek()[0] == "CHOICE":
        sc.next()
        return Choice(left, _parse_choice(sc))
    return left


def _parse_app(sc: _Scanner) -> Term:
    items = []
    while True:
        kind = sc.peek()[0]
        if kind == "LAMBDA":
            items.append(_parse_lambda(sc))
            break
        if kind == "IDENT":
            items.append(Var(sc.next()[1]))
        elif kind == "LPAREN":
            sc.next()
            items.append(_parse_choice(sc))
            sc.expect("RPAREN", "')'")
        else:
            break
    if not items:
        tok = sc.peek()
        sc.error(f"expected a term, found {tok[1]!r}" if tok[1] else "expected a term, found end of input", tok)
    term = items[0]
    for arg in items[1:]:
        term = App(term, arg)
    return term


def _parse_lambda(sc: _Scanner) -> Term:
    sc.expect("LAMBDA", "'\\'")
    params = [sc.expect("IDENT", "binder name")[1]]
    while sc.peek()[0] == "IDENT":
        params.append(sc.next()[1])
    sc.expect("DOT", "'.'")
    body = _parse_choice(sc)
    for x in reversed(params):
        body = Abs(x, body)
    return body


def parse_term(text: str, defs: dict | None = None, source=None) -> Term:
    """Parse a term; free identifiers naming a definition are expanded."""
    sc = _Scanner(text, _TERM_TOKENS, source)
    term = _parse_choice(sc)
    if sc.peek()[0] != "EOF":
        sc.error(f"unexpected {sc.peek()[1]!r}")
    return expand(term, defs) if defs else term


def expand(term: Term, defs: dict) -> Term:
    for name in sorted(term.free_vars):
        if name in defs:
            term = replace_free(term, name, defs[name])
    return term


def parse_definitions(text: str, source=None) -> dict:
    """``name = term`` per line (``#`` comments); returns name -> expanded term."""
    defs: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = re.match(rf"\s*({IDENT})\s*=", line)
        if not m:
            raise ParseError("expected 'name = term'", lineno, 1, source)
        body = line[m.end():]
        try:
            defs[m.group(1)] = parse_term(body, defs)
        except ParseError as e:
            raise ParseError(e.message, lineno, m.end() + e.column, source) from None
    return defs


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        return f"\\{t.param}. {print_term(t.body)}"
    if isinstance(t, Choice):
        left = print_term(t.left)
        if isinstance(t.left, (Choice, Abs)):
            left = f"({left})"
        return f"{left} (+) {print_term(t.right)}"
    fun = print_term(t.left)
    if isinstance(t.left, (Choice, Abs)):
        fun = f"({fun})"
    arg = print_term(t.right)
    if not isinstance(t.right, Var):
        arg = f"({arg})"
    return f"{fun} {arg}"


# --- JSON codecs --------------------------------------------------------------------------


def dump_element(a) -> str:
    return print_term(a) if isinstance(a, Term) else str(a)


def load_element(s: str, kind: str = "atom"):
    return parse_term(s) if kind == "term" else s


def dump_multidist(m: MultiDistribution) -> list:
    return [[str(p), dump_element(a)] for p, a in m.pairs]


def load_multidist(data, kind: str = "atom") -> MultiDistribution:
    return MultiDistribution((Fraction(p), load_element(a, kind)) for p, a in data)


def dump_subdist(d: SubDistribution) -> list:
    return [[dump_element(a), str(p)] for a, p in d.items()]


def load_subdist(data, kind: str = "atom") -> SubDistribution:
    return SubDistribution((load_element(a, kind), Fraction(p)) for a, p in data)


def dumps(record) -> str:
    """Byte-stable JSON: sorted keys, fixed separators, ASCII only."""
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _dump_value(v):
    if v is None:
        return None
    return dump_subdist(v) if isinstance(v, SubDistribution) else str(v)


def _load_value(data, kind):
    if data is None:
        return None
    return load_subdist(data, kind) if isinstance(data, list) else Fraction(data)


def dump_witness(w) -> dict:
    return {
        "claim": w.claim,
        "kind": w.kind,
        "start": dump_multidist(w.start),
        "left": [dump_multidist(m) for m in w.left],
        "right": [dump_multidist(m) for m in w.right],
        "step": w.step,
        "left_value": _dump_value(w.left_value),
        "right_value": _dump_value(w.right_value),
    }


def load_witness(data: dict, kind: str = "atom"):
    from .checkers import Witness

    return Witness(
        data["claim"],
        load_multidist(data["start"], kind),
        tuple(load_multidist(m, kind) for m in data["left"]),
        tuple(load_multidist(m, kind) for m in data["right"]),
        int(data["step"]),
        _load_value(data["left_value"], kind),
        _load_value(data["right_value"], kind),
        data.get("kind", ""),
    )


def format_subdist(d: SubDistribution) -> str:
    return "{" + ", ".join(f"{dump_element(a)}: {p}" for a, p in d.items()) + "}"


def format_multidist(m: MultiDistribution) -> str:
    return "[" + ", ".join(f"{p} {dump_element(a)}" for p, a in m.pairs) + "]"


def fixture_text(name: str) -> str:
    """Text of a bundled fixture such as ``fig1.pars`` or ``lambda.lam``."""
    from importlib import resources

    return (resources.files("parslab") / "fixtures" / name).read_text(encoding="utf-8")


def load_fixture(name: str):
    """Bundled rule file as a system, or bundled definitions file as a dict."""
    text = fixture_text(name)
    return parse_definitions(text, name) if name.endswith(".lam") else parse_rules(text, name)
