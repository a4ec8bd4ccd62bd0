"""Command-line front end.

Exit codes: 0 success (property holds or bounded evidence), 1 conclusive
refutation, 2 parse or input error, 3 unknown element, policy or strategy.
"""
from __future__ import annotations

import argparse
import sys as _sys
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import asymptotics, checkers, lambda_weak, pars, syntax
from .errors import ParseError, UnknownPolicy
from .multidist import MultiDistribution

SCHEMA = 1
LAMBDA_POLICIES = lambda_weak.STRATEGIES


class UnknownElement(Exception):
    pass


class InputError(Exception):
    pass


# --- loading ----------------------------------------------------------------------------


def _read_source(name: str) -> tuple:
    """Text and display name of ``name``; bundled fixtures are the fallback."""
    path = Path(name)
    if path.is_file():
        return path.read_text(encoding="utf-8"), name
    bundled = resources.files("parslab") / "fixtures"
    for candidate in (name, name + ".pars", name + ".lam"):
        res = bundled / candidate
        if res.is_file():
            return res.read_text(encoding="utf-8"), candidate
    raise InputError(f"{name}: no such file or bundled fixture")


class Problem:
    """What a command operates on: a rule-file system or lambda terms."""

    def __init__(self, args):
        self.defs: dict = {}
        self.system = None
        self.is_lambda = False
        if args.file:
            text, self.source = _read_source(args.file)
            if self.source.endswith(".lam"):
                self.defs = syntax.parse_definitions(text, self.source)
                self.is_lambda = True
            else:
                self.system = syntax.parse_rules(text, self.source)
        if getattr(args, "term", None):
            self.is_lambda = True
            self.start_label = args.term
            if args.term in self.defs:
                self.term = self.defs[args.term]
            else:
                self.term = syntax.parse_term(args.term, self.defs, source="<term>")
                if not self.term.is_closed():
                    names = ", ".join(sorted(self.term.free_vars))
                    raise UnknownElement(f"term has free variables: {names}")
            self.start = MultiDistribution.unit(self.term)
        elif self.is_lambda:
            raise InputError("a definitions file needs --term")
        elif self.system is None:
            raise InputError("give a rule file or --term")
        else:
            elem = getattr(args, "from_", None)
            if elem is None:
                if not self.system.redexes:
                    raise UnknownElement("no default start element; use --from")
                elem = self.system.redexes[0]
            if not self._known(elem):
                raise UnknownElement(f"unknown element {elem!r} in {self.system.name}")
            self.start_label = elem
            self.start = MultiDistribution.unit(elem)
        self.kind = "term" if self.is_lambda else "atom"

    def _known(self, a) -> bool:
        sysm = self.system
        if a in sysm.elements or sysm.rules(a):
            return True
        pred = pars.GENERATOR_UNIVERSE.get(sysm.generator_name or "")
        return bool(pred and pred(a))

    @property
    def name(self) -> str:
        return "lambda-weak" if self.is_lambda else self.system.name

    def strategy(self, name: str):
        if self.is_lambda:
            return lambda_weak.lambda_pars(name)
        return pars.strategy(self.system, name)

    def runner(self, policy: str | None):
        """System and resolver for a policy name (default: leftmost for
        terms, all-r0 for rule files)."""
        if policy is None:
            policy = "leftmost" if self.is_lambda else "all-r0"
        if self.is_lambda:
            if policy in LAMBDA_POLICIES or policy.startswith("random("):
                return lambda_weak.lambda_pars(policy), pars.Uniform(0)
            return lambda_weak.lambda_pars("full"), pars.resolve_policy(policy)
        return self.system, pars.resolve_policy(policy)

    def full(self):
        return lambda_weak.lambda_pars("full") if self.is_lambda else self.system


# --- formatting -----------------------------------------------------------------------------


def _decimal(p: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits + 40
        q = Decimal(p.numerator) / Decimal(p.denominator)
        return str(q.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN))


def _fmt(p: Fraction, args) -> str:
    if getattr(args, "decimal", None) is not None:
        return f"{p} (~{_decimal(p, args.decimal)})"
    return str(p)


class Output:
    def __init__(self, path):
        self.lines: list = []
        self.path = path

    def __call__(self, line: str = ""):
        self.lines.append(line)

    def flush(self):
        text = "\n".join(self.lines) + ("\n" if self.lines else "")
        if self.path:
            Path(self.path).write_text(text, encoding="utf-8")
        else:
            _sys.stdout.write(text)


# --- commands ---------------------------------------------------------------------------------


def _trace(prob: Problem, args):
    if args.policy == "greedy-nnorm":
        return prob.full(), asymptotics.greedy_trace(prob.full(), prob.start, args.depth, args.cap)
    system, resolver = prob.runner(args.policy)
    return system, pars.run(system, prob.start, resolver, args.depth, merge=args.merge)


def _policy_name(prob: Problem, args) -> str:
    return args.policy or ("leftmost" if prob.is_lambda else "all-r0")


def cmd_run(args, out: Output) -> int:
    prob = Problem(args)
    _system, trace = _trace(prob, args)
    out(syntax.dumps({"record": "header", "schema": SCHEMA, "command": "run", "system": prob.name,
                      "start": str(prob.start_label) if not prob.is_lambda else syntax.print_term(prob.term),
                      "policy": _policy_name(prob, args), "depth": args.depth}))
    mass = trace.states[0].mass
    meantime = Fraction(0)
    for n, state in enumerate(trace.states):
        rec = {"record": "step", "step": n, "state": syntax.dump_multidist(state),
               "nf": syntax.dump_subdist(trace.nf[n]), "nnorm": str(trace.nnorm[n]), "meantime": str(meantime)}
        if args.decimal is not None:
            rec["nnorm_decimal"] = _decimal(trace.nnorm[n], args.decimal)
            rec["meantime_decimal"] = _decimal(meantime, args.decimal)
        out(syntax.dumps(rec))
        meantime += mass - trace.nnorm[n]
    return 0


def _bound_line(i, b: asymptotics.LimitBound, args, label="") -> str:
    tag = " exact" if b.exact else ""
    return (f"bound {i}{label}: lower {syntax.format_subdist(b.lower)} norm {_fmt(b.norm, args)} "
            f"residual {_fmt(b.residual, args)} depth {b.depth}{tag}")


def cmd_limit(args, out: Output) -> int:
    prob = Problem(args)
    if args.all:
        ex = asymptotics.explore_limits(prob.full(), prob.start, args.depth, args.cap)
        out(f"limit {prob.name} from {prob.start_label}: all paths, depth {args.depth}, "
            f"{len(ex.bounds)} distinct bound(s), {ex.n_states} state(s) explored")
        for i, b in enumerate(ex.bounds, 1):
            out(_bound_line(i, b, args))
        if ex.truncated:
            out(f"truncated: cap {args.cap} reached; bounds cover the explored part only")
        return 0
    _system, trace = _trace(prob, args)
    b = asymptotics.limit_bound(trace)
    out(f"limit {prob.name} from {prob.start_label}: policy {_policy_name(prob, args)}, depth {args.depth}")
    out(_bound_line(1, b, args))
    return 0


def cmd_meantime(args, out: Output) -> int:
    prob = Problem(args)
    _system, trace = _trace(prob, args)
    mt = asymptotics.meantime_bound(trace)
    out(f"meantime {prob.name} from {prob.start_label}: policy {_policy_name(prob, args)}, depth {args.depth}")
    out(f"partial {_fmt(mt.partial, args)}")
    out("contributions " + " ".join(str(c) for c in mt.contributions))
    out(f"diverging {'yes' if mt.diverging else 'no'}")
    return 0


def cmd_classify(args, out: Output) -> int:
    prob = Problem(args)
    c = asymptotics.classify(prob.full(), prob.start, args.depth, args.cap)
    out(f"classify {prob.name} from {prob.start_label}: depth {args.depth}, {len(c.bounds)} distinct bound(s)"
        + (", truncated" if c.truncated else ""))
    for name, f in c.findings().items():
        out(f"{name} {f.status}: {f.detail}")
    return 0


def _elements_for(prob: Problem, args):
    if prob.is_lambda:
        return checkers.reachable_elements(prob.full(), [prob.term], args.reach, args.cap)
    if args.from_ is not None:
        return checkers.reachable_elements(prob.system, [prob.start_label], args.reach, args.cap)
    return prob.system.redexes


def cmd_check(args, out: Output) -> int:
    prob = Problem(args)
    obs_tag = args.obs
    prop = args.property
    sys_a = prob.strategy(args.strategy_a)
    if prop == "diamond":
        v = checkers.check_pointed_diamond(sys_a, _elements_for(prob, args), checkers.observation(obs_tag, sys_a),
                                           args.cap)
    elif prop == "local-rd":
        v = checkers.check_local_rd(sys_a, _elements_for(prob, args), obs_tag, args.depth, args.cap)
    elif prop == "global-rd":
        start = prob.start if (prob.is_lambda or args.from_ is not None) else list(prob.system.redexes)
        v = checkers.check_rd_global(sys_a, start, obs_tag, args.depth)
    elif prop in ("skew-confluence", "obs-confluence", "confluence"):
        kind = {"skew-confluence": "skew", "obs-confluence": "obs", "confluence": "full"}[prop]
        v = checkers.check_confluence(sys_a, prob.start, obs_tag, args.depth, kind, args.cap)
    else:
        sys_b = prob.strategy(args.strategy_b)
        elements = None if not prob.is_lambda else _elements_for(prob, args)
        v = checkers.check_locally_better(sys_a, sys_b, obs_tag, args.depth, elements, args.cap)
    out(f"check {v.prop} on {prob.name}: obs {obs_tag}, depth {v.depth}")
    out(f"status {v.status}")
    out(f"detail {v.detail}")
    if v.truncated:
        out(f"truncated: cap {args.cap} reached")
    if v.witness is not None:
        out("witness " + syntax.dumps(syntax.dump_witness(v.witness)))
    return 1 if v.status == "refuted" else 0


def cmd_print(args, out: Output) -> int:
    text, source = _read_source(args.file)
    if source.endswith(".lam"):
        for name, term in syntax.parse_definitions(text, source).items():
            out(f"{name} = {syntax.print_term(term)}")
    else:
        out(syntax.print_rules(syntax.parse_rules(text, source)).rstrip("\n"))
    return 0


COMMANDS = {"run": cmd_run, "limit": cmd_limit, "meantime": cmd_meantime, "classify": cmd_classify,
            "check": cmd_check, "print": cmd_print}

PROPERTIES = ("diamond", "local-rd", "global-rd", "skew-confluence", "obs-confluence", "confluence",
              "locally-better")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parslab", description="Probabilistic abstract rewriting laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, policy=True):
        p.add_argument("file", nargs="?", help="rule file (.pars) or definitions file (.lam); bundled fixture names work")
        p.add_argument("--from", dest="from_", metavar="ELEM", help="start element (default: first rule head)")
        p.add_argument("--term", help="lambda term, or a name from the definitions file")
        p.add_argument("--depth", type=int, default=asymptotics.DEFAULT_DEPTH)
        p.add_argument("--cap", type=int, default=pars.DEFAULT_CAP)
        p.add_argument("--out", help="write output to this path instead of stdout")
        p.add_argument("--decimal", type=int, metavar="D", help="add a rounded decimal column (display only)")
        if policy:
            p.add_argument("--policy", default=None,
                           help="all-r<k>, always-r<k>, lex(<digits>), seed:<n>, greedy-nnorm; "
                                "for terms also leftmost, rightmost, full, random(<n>)")
            p.add_argument("--merge", action="store_true", help="collapse repeated occurrences after each step")

    common(sub.add_parser("run", help="write a trace as JSON lines"))
    lim = sub.add_parser("limit", help="certified limit bounds")
    common(lim)
    lim.add_argument("--all", action="store_true", help="explore every choice path")
    common(sub.add_parser("meantime", help="partial expected number of steps"))
    common(sub.add_parser("classify", help="bounded UN/SN/WN/AST report"), policy=False)
    chk = sub.add_parser("check", help="run a property checker")
    common(chk, policy=False)
    chk.add_argument("--property", choices=PROPERTIES, required=True)
    chk.add_argument("--obs", choices=checkers.OBSERVATIONS, default="nf")
    chk.add_argument("--strategy-a", default="full")
    chk.add_argument("--strategy-b", default="full")
    chk.add_argument("--reach", type=int, default=2, help="steps of reachable elements for pointed checks")
    prt = sub.add_parser("print", help="parse and print a file canonically")
    prt.add_argument("file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "depth", 0) is not None and getattr(args, "depth", 0) < 0:
        parser.error("--depth must be >= 0")
    out = Output(getattr(args, "out", None))
    try:
        code = COMMANDS[args.command](args, out)
    except ParseError as e:
        print(f"error: {e}", file=_sys.stderr)
        return 2
    except InputError as e:
        print(f"error: {e}", file=_sys.stderr)
        return 2
    except (UnknownPolicy, UnknownElement) as e:
        msg = e.args[0] if e.args else str(e)
        print(f"error: {msg}", file=_sys.stderr)
        return 3
    out.flush()
    return code


if __name__ == "__main__":
    raise SystemExit(main())
