"""Congruence, equivalence and alignment decisions for Clark-congruential grammars.

Where an exact answer would need general DPDA equivalence, the
procedures here are three-valued: a yes comes with a certificate
(joinability, or an exact oracle), a no comes with a checked witness,
anything else is unknown.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .grammar import Grammar, GrammarError, language, length_tables, min_word, prune_empty
from .oracle import CongruenceOracle, Verdict
from .pda import bounded_equiv, build_context_dpda
from .regular import Dfa, all_words, dfa_member, syntactic_oracle
from .rewrite import ReductionSystem, extract_reduction, joinable, member_by_reduction, targets

DEFAULT_BOUND = 8
DEFAULT_BUDGET = 10_000


# ---------------------------------------------------------------------------
# Oracles


def dyck_normal_form(w: Sequence[str], open_: str = "(", close: str = ")") -> tuple:
    """``(m, n)`` with ``w`` congruent to ``)^m (^n`` modulo ``() = eps``."""
    m = n = 0
    for a in w:
        if a == open_:
            n += 1
        elif a == close:
            if n:
                n -= 1
            else:
                m += 1
        else:
            raise GrammarError(f"symbol {a!r} is not a parenthesis")
    return m, n


class DyckOracle(CongruenceOracle):
    kind = "dyck"

    def __init__(self, open_: str = "(", close: str = ")"):
        self.open = open_
        self.close = close

    def decide(self, w, x) -> Verdict:
        nw = dyck_normal_form(w, self.open, self.close)
        nx = dyck_normal_form(x, self.open, self.close)
        if nw == nx:
            return Verdict.yes(f"both reduce to {nw}")
        (m1, n1), (m2, n2) = nw, nx
        if n1 - m1 != n2 - m2:
            k = max(m1, m2)
            j = k - m1 + n1
        else:
            k, j = min(nw, nx)
        u = (self.open,) * k
        v = (self.close,) * j
        return Verdict.no((u, v), "distinguishing context")


class JoinabilityOracle(CongruenceOracle):
    """Sound for the congruence generated by a reduction system; never says no."""

    kind = "rewrite-joinability"

    def __init__(self, sys: ReductionSystem, budget: int = DEFAULT_BUDGET):
        self.sys = sys
        self.budget = budget

    def decide(self, w, x) -> Verdict:
        return joinable(self.sys, w, x, self.budget)


class GrammarContextOracle(CongruenceOracle):
    """Brute-force context search in ``L(g)``; can refute, never confirm."""

    kind = "grammar-contexts"

    def __init__(self, g: Grammar, bound: int = DEFAULT_BOUND):
        self.g = g
        self.bound = bound

    def decide(self, w, x) -> Verdict:
        w, x = tuple(w), tuple(x)
        if w == x:
            return Verdict.yes("identical words")
        ctx = distinguishing_context(self.g, w, x, self.bound)
        if ctx is not None:
            return Verdict.no(ctx, "distinguishing context")
        return Verdict.unknown(f"no distinguishing context with |u|,|v| <= {self.bound}")


def distinguishing_context(g: Grammar, w: tuple, x: tuple, bound: int):
    """Least context ``(u, v)`` (|u|,|v| <= bound) with exactly one of uwv, uxv in L(g)."""
    lang = language(g, 2 * bound + max(len(w), len(x)))
    letters = g.alphabet.symbols
    key = g.alphabet.key
    best = None
    for u in all_words(letters, bound):
        for v in all_words(letters, bound):
            if ((u + w + v) in lang) != ((u + x + v) in lang):
                cand = (u, v)
                if best is None or (key(u + v), key(u)) < (key(best[0] + best[1]), key(best[0])):
                    best = cand
                break
    return best


# ---------------------------------------------------------------------------
# Congruence and equivalence


def _member(g: Grammar, w: tuple) -> bool:
    """Exact membership by enumeration (independent of the reduction system)."""
    tables = length_tables(g, len(w))
    return any(w in tables[a][len(w)] for a in g.initials)


def congruent(
    g: Grammar,
    w: Sequence[str],
    x: Sequence[str],
    bound: int = DEFAULT_BOUND,
    budget: int = DEFAULT_BUDGET,
) -> Verdict:
    """Three-valued test of ``w`` and ``x`` being syntactically congruent in ``L(g)``.

    ``g`` must be Clark-congruential.  yes: the words are joinable under
    the grammar's reduction.  no: the context DPDAs of ``w`` and ``x``
    disagree on some ``u#v`` of length at most ``bound``; the witness is
    the context ``(u, v)``, re-checked by enumeration.
    """
    w = g.alphabet.check_word(w)
    x = g.alphabet.check_word(x)
    sys = extract_reduction(g)
    j = joinable(sys, w, x, budget)
    if j.is_yes:
        return Verdict.yes(f"joinable: {j.detail}")
    mw = build_context_dpda(g, w, lazy=True)
    mx = build_context_dpda(g, x, lazy=True)
    res = bounded_equiv(mw, mx, bound)
    if res.equal:
        return Verdict.unknown(f"context automata agree up to length {bound}")
    word = res.counterexample
    i = word.index(mw.sharp)
    u, v = word[:i], word[i + 1:]
    if _member(g, u + w + v) == _member(g, u + x + v):
        return Verdict.unknown("counterexample failed the enumeration cross-check (is the grammar CC?)")
    return Verdict.no((u, v), "context automata disagree")


def _merge_alphabets(g1: Grammar, g2: Grammar) -> tuple:
    if g1.alphabet == g2.alphabet:
        return g1, g2
    merged = g1.alphabet.union(g2.alphabet)
    return g1.replace(alphabet=merged), g2.replace(alphabet=merged)


def cc_equiv(g1: Grammar, g2: Grammar, bound: int = DEFAULT_BOUND, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Three-valued language equivalence of two Clark-congruential grammars.

    Checks that each grammar's least initial words belong to the other
    language and that each reduction rule of one grammar relates words
    congruent in the other language.  A no carries a word in the
    symmetric difference (the least one found).
    """
    g1, g2 = _merge_alphabets(g1, g2)
    sys1, sys2 = extract_reduction(g1), extract_reduction(g2)
    key = g1.alphabet.key
    witnesses = []
    unknown = []

    def in1(word):
        return member_by_reduction(g1, sys1, word)

    def in2(word):
        return member_by_reduction(g2, sys2, word)

    for t in sorted(targets(g1), key=key):
        if not in2(t):
            witnesses.append(t)
    for t in sorted(targets(g2), key=key):
        if not in1(t):
            witnesses.append(t)
    for sys, here, other, other_member in ((sys1, in1, g2, in2), (sys2, in2, g1, in1)):
        for rule in sys.rules:
            v = congruent(other, rule.lhs, rule.rhs, bound, budget)
            if v.is_no:
                u, s = v.witness
                for cand in (u + rule.lhs + s, u + rule.rhs + s):
                    if here(cand) != other_member(cand):
                        witnesses.append(cand)
                        break
            elif v.is_unknown:
                unknown.append((rule, v.detail))
    if witnesses:
        return Verdict.no(min(witnesses, key=key), "word in exactly one language")
    if unknown:
        rule, detail = unknown[0]
        return Verdict.unknown(f"{len(unknown)} generator checks undecided (first: {rule}: {detail})")
    return Verdict.yes("all inclusions confirmed")


# ---------------------------------------------------------------------------
# Alignment and recognition


@dataclass(frozen=True)
class ProductionWitness:
    head: str
    body: tuple
    head_word: tuple
    body_word: tuple
    oracle_witness: object = None


def is_aligned(g: Grammar, oracle: CongruenceOracle) -> Verdict:
    """Whether every nonterminal's language sits inside one class of the oracle's congruence.

    After removing empty nonterminals it is enough to compare the least
    words of each production's head and body.
    """
    g = prune_empty(g)
    pending = []
    for head, body in g.productions:
        hw = min_word(g, (head,))
        bw = min_word(g, body)
        v = oracle.decide(hw, bw)
        if v.is_no:
            return Verdict.no(ProductionWitness(head, body, hw, bw, v.witness), "misaligned production")
        if v.is_unknown:
            pending.append((head, body, v.detail))
    if pending:
        head, body, detail = pending[0]
        return Verdict.unknown(f"{len(pending)} productions undecided (first {head} -> {body}: {detail})")
    return Verdict.yes("every production aligned")


class LanguageMismatch(ValueError):
    pass


def is_cc_regular_case(g: Grammar, d: Dfa, sanity_bound: int = DEFAULT_BOUND) -> Verdict:
    """Exact Clark-congruence test for a grammar whose language ``d`` recognises.

    ``L(d) = L(g)`` is assumed and checked on all words up to
    ``sanity_bound``.
    """
    if set(d.alphabet.symbols) != set(g.alphabet.symbols):
        raise LanguageMismatch("grammar and DFA alphabets differ")
    lang = language(g, sanity_bound)
    for w in all_words(g.alphabet.symbols, sanity_bound):
        if (w in lang) != dfa_member(d, w):
            raise LanguageMismatch(f"grammar and DFA disagree on {w!r}")
    return is_aligned(g, syntactic_oracle(d))
