"""The reduction system induced by a grammar, and reduction-based membership.

Every production ``A -> alpha`` with a non-empty body language contributes
the rule ``min(alpha) -> min(A)``.  Rules strictly decrease in length-lex
order, so rewriting always terminates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .grammar import Alphabet, Grammar, Word, min_word, productive_set
from .oracle import Verdict

LEFTMOST = "leftmost"
MINIMAL = "minimal-result"
STRATEGIES = (LEFTMOST, MINIMAL)


class RewriteRule(NamedTuple):
    lhs: Word
    rhs: Word


@dataclass(frozen=True)
class ReductionSystem:
    rules: tuple
    alphabet: Alphabet

    def __post_init__(self):
        key = self.alphabet.key
        rules = []
        for lhs, rhs in self.rules:
            lhs, rhs = tuple(lhs), tuple(rhs)
            if not key(rhs) < key(lhs):
                raise ValueError(f"rule {lhs} -> {rhs} is not length-lex decreasing")
            rules.append(RewriteRule(lhs, rhs))
        rules = sorted(set(rules), key=lambda r: (key(r.lhs), key(r.rhs)))
        object.__setattr__(self, "rules", tuple(rules))

    @property
    def left_sides(self) -> list:
        return list(dict.fromkeys(r.lhs for r in self.rules))


def extract_reduction(g: Grammar) -> ReductionSystem:
    rules = []
    for head, body in g.productions:
        lhs = min_word(g, body)
        if lhs is None:
            continue
        rhs = min_word(g, (head,))
        if lhs != rhs:
            rules.append((lhs, rhs))
    return ReductionSystem(tuple(rules), g.alphabet)


def _occurrences(rule: RewriteRule, w: Word):
    lhs = rule.lhs
    n = len(lhs)
    for i in range(len(w) - n + 1):
        if w[i:i + n] == lhs:
            yield i


def one_step(sys: ReductionSystem, w: Word) -> list:
    """All ``(position, rule, result)`` single-step rewrites of ``w``."""
    out = []
    for rule in sys.rules:
        for i in _occurrences(rule, w):
            out.append((i, rule, w[:i] + rule.rhs + w[i + len(rule.lhs):]))
    return out


def successors(sys: ReductionSystem, w: Word) -> set:
    return {r for _, _, r in one_step(sys, w)}


def is_irreducible(sys: ReductionSystem, w: Sequence[str]) -> bool:
    w = tuple(w)
    return not any(_contains(w, r.lhs) for r in sys.rules)


def _contains(w: Word, factor: Word) -> bool:
    n = len(factor)
    return any(w[i:i + n] == factor for i in range(len(w) - n + 1))


def reduce_step(sys: ReductionSystem, w: Sequence[str], strategy: str = LEFTMOST) -> Optional[Word]:
    """One rewrite of ``w``, or None when ``w`` is irreducible.

    ``leftmost`` rewrites at the leftmost matching position (ties: least
    left side first); ``minimal-result`` returns the least possible result.
    """
    w = sys.alphabet.check_word(w)
    steps = one_step(sys, w)
    if not steps:
        return None
    if strategy == LEFTMOST:
        key = sys.alphabet.key
        return min(steps, key=lambda s: (s[0], key(s[1].lhs), key(s[1].rhs)))[2]
    if strategy == MINIMAL:
        return min((s[2] for s in steps), key=sys.alphabet.key)
    raise ValueError(f"unknown strategy {strategy!r}")


def normalize_trace(sys: ReductionSystem, w: Sequence[str], strategy: str = LEFTMOST) -> list:
    """The reduction chain from ``w`` to an irreducible word (both ends included)."""
    chain = [sys.alphabet.check_word(w)]
    while True:
        nxt = reduce_step(sys, chain[-1], strategy)
        if nxt is None:
            return chain
        chain.append(nxt)


def normalize(sys: ReductionSystem, w: Sequence[str], strategy: str = LEFTMOST) -> Word:
    return normalize_trace(sys, w, strategy)[-1]


def targets(g: Grammar) -> set:
    """Least words of the productive initial nonterminals."""
    productive = productive_set(g)
    return {min_word(g, (a,)) for a in g.initials if a in productive}


def member_by_reduction(g: Grammar, sys: ReductionSystem, w: Sequence[str], strategy: str = LEFTMOST) -> bool:
    """Membership by reduction: does the chain from ``w`` pass through a target?

    Only correct when ``g`` is Clark-congruential; the caller vouches for
    that.  For such grammars every word on the chain is congruent to ``w``,
    so this agrees with testing the normal form.  For other grammars false
    positives are possible.
    """
    tgt = targets(g)
    return any(x in tgt for x in normalize_trace(sys, w, strategy))


def joinable(sys: ReductionSystem, w: Sequence[str], x: Sequence[str], node_budget: int = 10_000) -> Verdict:
    """yes if ``w`` and ``x`` have a common descendant, else unknown.

    Breadth-first over both reduction graphs at once; ``node_budget``
    caps the number of visited words.
    """
    if node_budget <= 0:
        raise ValueError("node_budget must be positive")
    w = sys.alphabet.check_word(w)
    x = sys.alphabet.check_word(x)
    if w == x:
        return Verdict.yes("identical words")
    seen = ({w}, {x})
    frontier = (deque([w]), deque([x]))
    visited = 2
    side = 0
    while frontier[0] or frontier[1]:
        if not frontier[side]:
            side = 1 - side
        node = frontier[side].popleft()
        for nxt in successors(sys, node):
            if nxt in seen[1 - side]:
                return Verdict.yes(f"common descendant {nxt!r}")
            if nxt not in seen[side]:
                seen[side].add(nxt)
                frontier[side].append(nxt)
                visited += 1
                if visited > node_budget:
                    return Verdict.unknown(f"node budget {node_budget} exhausted")
        side = 1 - side
    return Verdict.unknown("no common descendant")


class CriticalPair(NamedTuple):
    peak: Word
    left: Word
    right: Word


def critical_pairs(sys: ReductionSystem) -> list:
    """Peaks from overlaps and containments of left sides, least peak first."""
    out = set()
    rules = sys.rules
    for r1 in rules:
        l1 = r1.lhs
        for r2 in rules:
            l2 = r2.lhs
            # r2 inside r1
            for i in _occurrences(r2, l1):
                if r1 == r2 and i == 0:
                    continue
                a = r1.rhs
                b = l1[:i] + r2.rhs + l1[i + len(l2):]
                if a != b:
                    out.add(CriticalPair(l1, a, b))
            # proper overlap: suffix of l1 = prefix of l2
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    peak = l1 + l2[k:]
                    a = r1.rhs + l2[k:]
                    b = l1[:-k] + r2.rhs
                    if a != b:
                        out.add(CriticalPair(peak, a, b))
    key = sys.alphabet.key
    return sorted(out, key=lambda c: (key(c.peak), key(c.left), key(c.right)))


@dataclass(frozen=True)
class ConfluenceReport:
    confluent: bool
    witness: Optional[CriticalPair] = None
    normal_forms: frozenset = frozenset()
    detail: str = ""


def confluence_report(sys: ReductionSystem, budget: int = 10_000) -> ConfluenceReport:
    """Check all critical pairs for joinability.

    A peak whose two sides normalise to different irreducible words is a
    definite witness of non-confluence.
    """
    undecided = 0
    for cp in critical_pairs(sys):
        if joinable(sys, cp.left, cp.right, budget).is_yes:
            continue
        nf1 = normalize(sys, cp.left)
        nf2 = normalize(sys, cp.right)
        if nf1 != nf2:
            return ConfluenceReport(False, cp, frozenset({nf1, nf2}), "distinct normal forms")
        undecided += 1
    if undecided:
        return ConfluenceReport(True, detail=f"{undecided} critical pairs joined only via normal forms")
    return ConfluenceReport(True, detail="all critical pairs joinable")
