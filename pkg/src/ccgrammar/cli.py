"""Command-line front end.

Exit status: 0 yes/accept, 1 no/reject, 2 unknown, 10 and above errors.
Decision subcommands print one machine-readable verdict line:
``YES``, ``NO <witness>`` or ``UNKNOWN <bound>``.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import decide
from .grammar import GrammarError, format_grammar, format_word, language, min_word, parse_grammar, parse_word
from .pda import (
    ConstructionError,
    LIMIT,
    PdaError,
    build_context_dpda,
    check_one_turn,
    describe_configuration,
    format_pda,
    is_deterministic,
    parse_pda,
    run,
)
from .regular import DfaError, parse_dfa, syntactic_oracle
from .rewrite import STRATEGIES, extract_reduction, normalize_trace, targets
from .transform import build_context_grammar, intersect_regular, inverse_morphism, parse_morphism, weak_omega_reduce

EXIT_YES = 0
EXIT_NO = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 10
EXIT_IO = 11
EXIT_INPUT = 12
EXIT_FAILURE = 13

CC_WARNING = (
    "warning: the grammar is assumed to be Clark-congruential (not checked); "
    "pass --trust-cc or a --cc-dfa certificate to silence"
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _grammar(path: str):
    try:
        return parse_grammar(_read(path))
    except GrammarError as exc:
        raise GrammarError(f"{path}: {exc}") from None


def _word(g, text: str) -> tuple:
    return g.alphabet.check_word(parse_word(text, g.alphabet.symbols))


def _context(u, v, sharp="#") -> str:
    def side(w):
        return "".join(w) if all(len(s) == 1 for s in w) else " ".join(w)
    return f"{side(u)}{sharp}{side(v)}"


def _verdict(v, bound, witness_text=None) -> int:
    if v.is_yes:
        print("YES")
        return EXIT_YES
    if v.is_no:
        print(f"NO {witness_text if witness_text is not None else v.witness}")
        return EXIT_NO
    print(f"UNKNOWN {bound}")
    if v.detail:
        print(f"# {v.detail}", file=sys.stderr)
    return EXIT_UNKNOWN


def _warn_cc(args, *grammars):
    """Warn about the CC precondition unless trusted or certified by a DFA."""
    if args.trust_cc:
        return
    if getattr(args, "cc_dfa", None):
        for g in grammars:
            v = decide.is_cc_regular_case(g, parse_dfa(_read(args.cc_dfa), g.alphabet))
            if not v.is_yes:
                print("warning: the --cc-dfa certificate failed: the grammar is not Clark-congruential", file=sys.stderr)
                return
        return
    print(CC_WARNING, file=sys.stderr)


def _add_trust_flags(p, certify=True):
    p.add_argument("--trust-cc", action="store_true", help="do not warn about the Clark-congruential precondition")
    if certify:
        p.add_argument("--cc-dfa", metavar="DFA", help="certify the precondition with a DFA for the language")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_minword(args) -> int:
    g = _grammar(args.grammar)
    if args.form is None:
        for a in g.nonterminals:
            w = min_word(g, (a,))
            print(f"{a}: {'undefined' if w is None else format_word(w)}")
        return EXIT_YES
    form = tuple(args.form.split())
    for s in form:
        if not g.is_nonterminal(s) and s not in g.alphabet:
            raise GrammarError(f"unknown symbol {s!r}")
    w = min_word(g, form)
    if w is None:
        print("undefined")
        return EXIT_NO
    print(format_word(w))
    return EXIT_YES


def cmd_rules(args) -> int:
    g = _grammar(args.grammar)
    for r in extract_reduction(g).rules:
        print(f"{format_word(r.lhs)} -> {format_word(r.rhs)}")
    return EXIT_YES


def _print_chain(chain):
    for i, w in enumerate(chain):
        print(("   " if i == 0 else "~> ") + format_word(w))


def cmd_reduce(args) -> int:
    g = _grammar(args.grammar)
    chain = normalize_trace(extract_reduction(g), _word(g, args.word), args.strategy)
    if args.trace:
        _print_chain(chain)
    else:
        print(format_word(chain[-1]))
    return EXIT_YES


def cmd_member(args) -> int:
    g = _grammar(args.grammar)
    _warn_cc(args, g)
    chain = normalize_trace(extract_reduction(g), _word(g, args.word), args.strategy)
    tgt = targets(g)
    if args.trace:
        _print_chain(chain)
        print(f"# {len(chain) - 1} steps", file=sys.stderr)
    if any(x in tgt for x in chain):
        print("YES")
        return EXIT_YES
    print(f"NO {format_word(chain[-1])}")
    return EXIT_NO


class _Step(argparse.Action):
    """Collect transformation flags in command-line order."""

    def __call__(self, parser, namespace, values, option_string=None):
        steps = list(getattr(namespace, "steps", None) or [])
        steps.append((self.dest, values))
        namespace.steps = steps


def cmd_transform(args) -> int:
    g = _grammar(args.grammar)
    steps = getattr(args, "steps", None) or []
    if not steps:
        raise UsageError("transform needs at least one of --omega, --inverse-morphism, --intersect, --context-grammar")
    for name, value in steps:
        if name == "omega":
            g = weak_omega_reduce(g)
        elif name == "inverse_morphism":
            g = inverse_morphism(g, parse_morphism(_read(value)))
        elif name == "intersect":
            g = intersect_regular(g, parse_dfa(_read(value), g.alphabet))
        elif name == "context_grammar":
            g = build_context_grammar(g, _word(g, value)).grammar
    print(format_grammar(g), end="")
    return EXIT_YES


def cmd_context_grammar(args) -> int:
    g = _grammar(args.grammar)
    print(format_grammar(build_context_grammar(g, _word(g, args.word)).grammar), end="")
    return EXIT_YES


def cmd_context_dpda(args) -> int:
    g = _grammar(args.grammar)
    m = build_context_dpda(g, _word(g, args.word), sharp=args.sharp)
    if args.emit:
        print(format_pda(m), end="")
        return EXIT_YES
    print(f"states: {len(m.states)}")
    print(f"transitions: {len(m.transitions)}")
    print(f"buffer bound: {m.buffer_bound}")
    print(f"deterministic: {'yes' if is_deterministic(m) else 'no'}")
    print(f"one-turn: {'yes' if check_one_turn(m) else 'no'}")
    return EXIT_YES


def cmd_run_pda(args) -> int:
    m = parse_pda(_read(args.pda))
    w = parse_word(args.word, m.input_alphabet)
    result = run(m, w, step_limit=args.step_limit)
    if args.trace:
        for c in result.trace:
            print(describe_configuration(m, c))
    if result.outcome == LIMIT:
        print(f"UNKNOWN {args.step_limit}")
        print("# step limit exceeded", file=sys.stderr)
        return EXIT_UNKNOWN
    print("ACCEPT" if result.accepted else "REJECT")
    return EXIT_YES if result.accepted else EXIT_NO


def cmd_congruent(args) -> int:
    g = _grammar(args.grammar)
    _warn_cc(args, g)
    v = decide.congruent(g, _word(g, args.w), _word(g, args.x), args.bound, args.budget)
    return _verdict(v, args.bound, _context(*v.witness) if v.is_no else None)


def cmd_equiv(args) -> int:
    g1 = _grammar(args.grammar1)
    g2 = _grammar(args.grammar2)
    _warn_cc(args)
    v = decide.cc_equiv(g1, g2, args.bound, args.budget)
    return _verdict(v, args.bound, format_word(v.witness) if v.is_no else None)


def _production_text(pw) -> str:
    body = " ".join(pw.body) if pw.body else "eps"
    return f"{pw.head} -> {body}"


def cmd_aligned(args) -> int:
    g = _grammar(args.grammar)
    choice = args.oracle
    if choice == "dyck":
        symbols = g.alphabet.symbols
        if set(symbols) - {"(", ")"}:
            raise UsageError("the dyck oracle needs a grammar over '(' and ')'")
        oracle = decide.DyckOracle()
    elif choice.startswith("dfa:"):
        oracle = syntactic_oracle(parse_dfa(_read(choice[4:]), g.alphabet))
    else:
        raise UsageError(f"unknown oracle {choice!r} (expected 'dyck' or 'dfa:<file>')")
    v = decide.is_aligned(g, oracle)
    return _verdict(v, "-", _production_text(v.witness) if v.is_no else None)


def cmd_recognize_regular(args) -> int:
    g = _grammar(args.grammar)
    d = parse_dfa(_read(args.dfa), g.alphabet)
    v = decide.is_cc_regular_case(g, d, args.sanity_bound)
    return _verdict(v, "-", _production_text(v.witness) if v.is_no else None)


def cmd_enumerate(args) -> int:
    g = _grammar(args.grammar)
    if args.n < 0:
        raise UsageError("length bound must be non-negative")
    for w in sorted(language(g, args.n), key=g.alphabet.key):
        print(format_word(w))
    return EXIT_YES


# ---------------------------------------------------------------------------
# Parser


def _add_decision_flags(p, *, certify=True):
    p.add_argument("--bound", type=int, default=decide.DEFAULT_BOUND, help="context length bound (default %(default)s)")
    p.add_argument("--budget", type=int, default=decide.DEFAULT_BUDGET, help="joinability node budget (default %(default)s)")
    _add_trust_flags(p, certify)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ccgrammar", description="Analysis of Clark-congruential context-free grammars.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("minword", help="least word of a nonterminal or sentential form")
    p.add_argument("grammar")
    p.add_argument("form", nargs="?", help="space-separated sentential form (default: every nonterminal)")
    p.set_defaults(func=cmd_minword)

    p = sub.add_parser("rules", help="print the reduction rules")
    p.add_argument("grammar")
    p.set_defaults(func=cmd_rules)

    for name, func, helptext in (
        ("reduce", cmd_reduce, "normalise a word"),
        ("member", cmd_member, "membership by reduction"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("grammar")
        p.add_argument("word")
        p.add_argument("--strategy", choices=STRATEGIES, default=STRATEGIES[0])
        p.add_argument("--trace", action="store_true", help="print the reduction chain")
        if name == "member":
            _add_trust_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("transform", help="apply transformations in the order given")
    p.add_argument("grammar")
    p.add_argument("--omega", nargs=0, action=_Step, help="weak omega-reduction")
    p.add_argument("--inverse-morphism", metavar="MAP", action=_Step, help="inverse strictly alphabetic morphism")
    p.add_argument("--intersect", metavar="DFA", action=_Step, help="intersection with a regular language")
    p.add_argument("--context-grammar", metavar="WORD", action=_Step, help="the context grammar of WORD")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("context-grammar", help="print the context grammar of a word")
    p.add_argument("grammar")
    p.add_argument("word")
    p.set_defaults(func=cmd_context_grammar)

    p = sub.add_parser("context-dpda", help="build the context DPDA of a word")
    p.add_argument("grammar")
    p.add_argument("word")
    p.add_argument("--emit", action="store_true", help="print the machine in the PDA text format")
    p.add_argument("--sharp", default="#", help="context marker (default %(default)s)")
    p.set_defaults(func=cmd_context_dpda)

    p = sub.add_parser("run-pda", help="run a DPDA file on a word")
    p.add_argument("pda")
    p.add_argument("word")
    p.add_argument("--trace", action="store_true", help="print every configuration")
    p.add_argument("--step-limit", type=int, default=100_000)
    p.set_defaults(func=cmd_run_pda)

    p = sub.add_parser("congruent", help="three-valued syntactic congruence test")
    p.add_argument("grammar")
    p.add_argument("w")
    p.add_argument("x")
    _add_decision_flags(p)
    p.set_defaults(func=cmd_congruent)

    p = sub.add_parser("equiv", help="three-valued language equivalence")
    p.add_argument("grammar1")
    p.add_argument("grammar2")
    _add_decision_flags(p, certify=False)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("aligned", help="check alignment with a congruence oracle")
    p.add_argument("grammar")
    p.add_argument("--oracle", required=True, help="'dyck' or 'dfa:<file>'")
    p.set_defaults(func=cmd_aligned)

    p = sub.add_parser("recognize-regular", help="exact Clark-congruence test given a DFA for the language")
    p.add_argument("grammar")
    p.add_argument("dfa")
    p.add_argument("--sanity-bound", type=int, default=decide.DEFAULT_BOUND)
    p.set_defaults(func=cmd_recognize_regular)

    p = sub.add_parser("enumerate", help="list the language up to a length")
    p.add_argument("grammar")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (GrammarError, DfaError, PdaError, decide.LanguageMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConstructionError, RecursionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
