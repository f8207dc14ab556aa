"""Deterministic finite automata and syntactic congruences of regular languages."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .grammar import Alphabet, GrammarError, Word
from .oracle import CongruenceOracle, Verdict


class DfaError(ValueError):
    pass


@dataclass(frozen=True)
class Dfa:
    """Total DFA.  ``delta`` maps ``(state, letter)`` to a state."""

    states: tuple
    alphabet: Alphabet
    delta: dict = field(hash=False)
    init: object
    accepting: frozenset

    def __post_init__(self):
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        sset = set(states)
        if self.init not in sset:
            raise DfaError(f"initial state {self.init!r} is not a state")
        if not self.accepting <= sset:
            raise DfaError("accepting states must be states")
        for q in states:
            for a in self.alphabet:
                t = self.delta.get((q, a))
                if t is None:
                    raise DfaError(f"no transition from {q!r} on {a!r}")
                if t not in sset:
                    raise DfaError(f"transition target {t!r} is not a state")

    def run(self, word: Sequence[str], start=None):
        q = self.init if start is None else start
        delta = self.delta
        for a in word:
            q = delta[q, a]
        return q

    def accepts(self, word: Sequence[str]) -> bool:
        return self.run(word) in self.accepting


def dfa_member(d: Dfa, w: Sequence[str]) -> bool:
    return d.accepts(d.alphabet.check_word(w))


def _same_alphabet(d1: Dfa, d2: Dfa) -> None:
    if set(d1.alphabet.symbols) != set(d2.alphabet.symbols):
        raise DfaError("alphabet mismatch")


def dfa_intersect(d1: Dfa, d2: Dfa) -> Dfa:
    _same_alphabet(d1, d2)
    return _product(d1, d2, lambda x, y: x and y)


def dfa_union(d1: Dfa, d2: Dfa) -> Dfa:
    _same_alphabet(d1, d2)
    return _product(d1, d2, lambda x, y: x or y)


def _product(d1: Dfa, d2: Dfa, combine) -> Dfa:
    start = (d1.init, d2.init)
    index = {start: 0}
    queue = deque([start])
    delta = {}
    while queue:
        p = queue.popleft()
        for a in d1.alphabet:
            t = (d1.delta[p[0], a], d2.delta[p[1], a])
            if t not in index:
                index[t] = len(index)
                queue.append(t)
            delta[index[p], a] = index[t]
    accepting = {i for p, i in index.items() if combine(p[0] in d1.accepting, p[1] in d2.accepting)}
    return Dfa(tuple(range(len(index))), d1.alphabet, delta, 0, frozenset(accepting))


def dfa_complement(d: Dfa) -> Dfa:
    return Dfa(d.states, d.alphabet, d.delta, d.init, frozenset(d.states) - d.accepting)


def dfa_minimize(d: Dfa) -> Dfa:
    """Canonical minimal DFA: reachable part, Moore refinement, BFS numbering."""
    letters = d.alphabet.symbols
    reach = [d.init]
    seen = {d.init}
    for q in reach:
        for a in letters:
            t = d.delta[q, a]
            if t not in seen:
                seen.add(t)
                reach.append(t)
    block = {q: int(q in d.accepting) for q in reach}
    while True:
        sig = {q: (block[q],) + tuple(block[d.delta[q, a]] for a in letters) for q in reach}
        ids = {}
        new = {q: ids.setdefault(sig[q], len(ids)) for q in reach}
        if len(ids) == len(set(block.values())):
            break
        block = new
    # renumber blocks in BFS order from the initial block
    order = {block[d.init]: 0}
    rep = {}
    for q in reach:
        rep.setdefault(block[q], q)
    queue = deque([block[d.init]])
    delta = {}
    while queue:
        b = queue.popleft()
        for a in letters:
            t = block[d.delta[rep[b], a]]
            if t not in order:
                order[t] = len(order)
                queue.append(t)
            delta[order[b], a] = order[t]
    accepting = {order[block[q]] for q in reach if q in d.accepting}
    return Dfa(tuple(range(len(order))), d.alphabet, delta, 0, frozenset(accepting))


def dfa_from_words(words: Iterable[Sequence[str]], alphabet: Alphabet) -> Dfa:
    """DFA accepting exactly the given finite set of words."""
    trie = {(): 0}
    accept = set()
    for w in words:
        w = alphabet.check_word(w)
        for i in range(len(w) + 1):
            trie.setdefault(w[:i], len(trie))
        accept.add(trie[w])
    sink = len(trie)
    delta = {}
    for node, q in trie.items():
        for a in alphabet:
            delta[q, a] = trie.get(node + (a,), sink)
    for a in alphabet:
        delta[sink, a] = sink
    return Dfa(tuple(range(sink + 1)), alphabet, delta, 0, frozenset(accept))


def extend_alphabet(d: Dfa, alphabet: Alphabet) -> Dfa:
    """Same language over a larger alphabet; new letters lead to a sink."""
    missing = [a for a in d.alphabet if a not in alphabet]
    if missing:
        raise DfaError(f"letters {missing} dropped from alphabet")
    sink = ("sink",)
    delta = {}
    states = d.states + (sink,)
    for q in states:
        for a in alphabet:
            delta[q, a] = d.delta[q, a] if q != sink and a in d.alphabet else sink
    return dfa_minimize(Dfa(states, alphabet, delta, d.init, d.accepting))


def substring_avoiding_dfa(patterns: Iterable[Sequence[str]], alphabet: Alphabet) -> Dfa:
    """DFA for the words that contain none of ``patterns`` as a factor.

    Built from an Aho-Corasick keyword tree: a node is dead once some
    pattern ends there (directly or through its failure chain).
    """
    patterns = [alphabet.check_word(p) for p in patterns]
    if any(len(p) == 0 for p in patterns):
        return dfa_minimize(Dfa((0,), alphabet, {(0, a): 0 for a in alphabet}, 0, frozenset()))
    goto = [{}]
    out = [False]
    for p in patterns:
        node = 0
        for a in p:
            if a not in goto[node]:
                goto.append({})
                out.append(False)
                goto[node][a] = len(goto) - 1
            node = goto[node][a]
        out[node] = True
    fail = [0] * len(goto)
    delta = {}
    queue = deque()
    for a in alphabet:
        t = goto[0].get(a)
        if t is None:
            delta[0, a] = 0
        else:
            delta[0, a] = t
            queue.append(t)
    while queue:
        node = queue.popleft()
        out[node] = out[node] or out[fail[node]]
        for a in alphabet:
            t = goto[node].get(a)
            if t is None:
                delta[node, a] = delta[fail[node], a]
            else:
                fail[t] = delta[fail[node], a]
                delta[node, a] = t
                queue.append(t)
    for node in range(len(goto)):
        if out[node]:
            for a in alphabet:
                delta[node, a] = node
    accepting = frozenset(n for n in range(len(goto)) if not out[n])
    return dfa_minimize(Dfa(tuple(range(len(goto))), alphabet, delta, 0, accepting))


def dfa_concat(d1: Dfa, d2: Dfa) -> Dfa:
    """DFA for ``L(d1) L(d2)`` (subset construction over the second factor)."""
    _same_alphabet(d1, d2)

    def close(q1, s):
        return (q1, frozenset(s | {d2.init}) if q1 in d1.accepting else frozenset(s))

    start = close(d1.init, frozenset())
    index = {start: 0}
    queue = deque([start])
    delta = {}
    while queue:
        p = queue.popleft()
        for a in d1.alphabet:
            t = close(d1.delta[p[0], a], {d2.delta[s, a] for s in p[1]})
            if t not in index:
                index[t] = len(index)
                queue.append(t)
            delta[index[p], a] = index[t]
    accepting = {i for p, i in index.items() if p[1] & d2.accepting}
    return dfa_minimize(Dfa(tuple(range(len(index))), d1.alphabet, delta, 0, frozenset(accepting)))


def frame_dfa(r: Dfa, middle: Sequence[str], alphabet: Alphabet) -> Dfa:
    """DFA over ``alphabet`` for ``L(r) middle L(r)``.

    When ``middle`` is non-empty and uses only letters outside ``r``'s
    alphabet, the first such letter marks where ``middle`` starts, so the
    automaton is built directly: first copy of ``r``, a chain through
    ``middle``, second copy of ``r``.  Otherwise falls back to
    :func:`dfa_concat`.
    """
    middle = alphabet.check_word(middle)
    inner = set(r.alphabet.symbols)
    if not middle or any(a in inner for a in middle):
        rx = extend_alphabet(r, alphabet)
        return dfa_concat(dfa_concat(rx, dfa_from_words([middle], alphabet)), rx)
    sink = ("sink",)
    states = [(0, q) for q in r.states]
    states += [(1, i) for i in range(1, len(middle))]
    states += [(2, q) for q in r.states] + [sink]
    delta = {}
    for st in states:
        for a in alphabet:
            t = sink
            if st == sink:
                pass
            elif st[0] == 0:
                if a in inner:
                    t = (0, r.delta[st[1], a])
                elif a == middle[0] and st[1] in r.accepting:
                    t = (2, r.init) if len(middle) == 1 else (1, 1)
            elif st[0] == 1:
                if a == middle[st[1]]:
                    t = (2, r.init) if st[1] + 1 == len(middle) else (1, st[1] + 1)
            elif a in inner:
                t = (2, r.delta[st[1], a])
            delta[st, a] = t
    accepting = frozenset((2, q) for q in r.accepting)
    return dfa_minimize(Dfa(tuple(states), alphabet, delta, (0, r.init), accepting))


# ---------------------------------------------------------------------------
# Transition monoid


class MonoidElement(NamedTuple):
    map: tuple  # state i -> map[i]
    witness: Word


class TransitionMonoid:
    """State maps induced by words on a minimal DFA.

    Elements are discovered breadth-first in length-lex order, so each
    element's witness is its least inducing word.  Elements are referred
    to by index; index 0 is the identity.
    """

    def __init__(self, d: Dfa):
        d = dfa_minimize(d)
        self.dfa = d
        n = len(d.states)
        self.letters = d.alphabet.symbols
        self._letter_maps = {a: tuple(d.delta[q, a] for q in range(n)) for a in self.letters}
        identity = tuple(range(n))
        self.elements = [MonoidElement(identity, ())]
        self.index = {identity: 0}
        self._right = []  # _right[i][a] = index of element_i . a
        i = 0
        while i < len(self.elements):
            f, w = self.elements[i]
            row = {}
            for a in self.letters:
                g = self._letter_maps[a]
                h = tuple(g[f[q]] for q in range(n))
                if h not in self.index:
                    self.index[h] = len(self.elements)
                    self.elements.append(MonoidElement(h, w + (a,)))
                row[a] = self.index[h]
            self._right.append(row)
            i += 1
        self._compose = {}

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return 0

    def element_of(self, word: Sequence[str]) -> int:
        i = 0
        for a in word:
            i = self._right[i][a]
        return i

    def letter(self, a: str) -> int:
        return self._right[0][a]

    def compose(self, i: int, j: int) -> int:
        """Index of the element induced by ``witness_i witness_j``."""
        key = (i, j)
        r = self._compose.get(key)
        if r is None:
            f, g = self.elements[i].map, self.elements[j].map
            r = self.index[tuple(g[f[q]] for q in range(len(f)))]
            self._compose[key] = r
        return r

    def accepting(self, i: int) -> bool:
        """Whether the words of class ``i`` belong to the language."""
        return self.elements[i].map[self.dfa.init] in self.dfa.accepting

    @cached_property
    def table(self) -> list:
        return [[self.compose(i, j) for j in range(len(self))] for i in range(len(self))]

    @property
    def representatives(self) -> list:
        return [e.witness for e in self.elements]


def transition_monoid(d: Dfa) -> TransitionMonoid:
    return TransitionMonoid(d)


class SyntacticOracle(CongruenceOracle):
    """Exact syntactic congruence of a regular language.

    A no answer carries a distinguishing context ``(u, v)``.
    """

    kind = "regular-syntactic"

    def __init__(self, d: Dfa):
        self.monoid = TransitionMonoid(d)

    def decide(self, w, x) -> Verdict:
        m = self.monoid
        alphabet = m.dfa.alphabet
        iw = m.element_of(alphabet.check_word(w))
        ix = m.element_of(alphabet.check_word(x))
        if iw == ix:
            return Verdict.yes("same transition-monoid element")
        return Verdict.no(self._context(iw, ix), "distinguishing context")

    def _context(self, iw: int, ix: int):
        m = self.monoid
        d = m.dfa
        fw, fx = m.elements[iw].map, m.elements[ix].map
        best = None
        for q in range(len(d.states)):
            u = _access_word(d, q)
            v = _separating_suffix(d, fw[q], fx[q])
            if v is None:
                continue
            cand = (u, v)
            k = d.alphabet.key
            if best is None or (k(u + v), k(u)) < (k(best[0] + best[1]), k(best[0])):
                best = cand
        return best


def _access_word(d: Dfa, target) -> Word:
    parent = {d.init: None}
    queue = deque([d.init])
    while queue:
        q = queue.popleft()
        if q == target:
            break
        for a in d.alphabet:
            t = d.delta[q, a]
            if t not in parent:
                parent[t] = (q, a)
                queue.append(t)
    word = []
    q = target
    while parent[q] is not None:
        q, a = parent[q]
        word.append(a)
    return tuple(reversed(word))


def _separating_suffix(d: Dfa, p, q):
    start = (p, q)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        if (pair[0] in d.accepting) != (pair[1] in d.accepting):
            word = []
            while parent[pair] is not None:
                pair, a = parent[pair]
                word.append(a)
            return tuple(reversed(word))
        for a in d.alphabet:
            t = (d.delta[pair[0], a], d.delta[pair[1], a])
            if t not in parent:
                parent[t] = (pair, a)
                queue.append(t)
    return None


def syntactic_oracle(d: Dfa) -> SyntacticOracle:
    return SyntacticOracle(d)


# ---------------------------------------------------------------------------
# File format


def parse_dfa(text: str, alphabet: Alphabet | None = None) -> Dfa:
    """Parse ``states:``/``init:``/``accepting:`` lines and ``q a -> q'`` transitions.

    An optional ``alphabet:`` line fixes the letter order; otherwise
    ``alphabet`` (if given) or first appearance in the transitions is used.
    """
    states = init = accepting = declared = None
    transitions = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(":")
        if "->" not in line and head in ("states", "init", "accepting", "alphabet"):
            vals = rest.split()
            if head == "states":
                states = vals
            elif head == "init":
                if len(vals) != 1:
                    raise GrammarError("init needs exactly one state", lineno, 1)
                init = vals[0]
            elif head == "accepting":
                accepting = vals
            else:
                declared = vals
            continue
        lhs, arrow, rhs = line.partition("->")
        parts = lhs.split()
        if not arrow or len(parts) != 2 or len(rhs.split()) != 1:
            raise GrammarError("expected 'q a -> q2'", lineno, 1)
        transitions.append((parts[0], parts[1], rhs.strip()))
    if states is None or init is None or accepting is None:
        raise GrammarError("DFA file needs states:, init: and accepting: lines")
    if declared is not None:
        alphabet = Alphabet(tuple(declared))
    elif alphabet is None:
        alphabet = Alphabet(tuple(dict.fromkeys(a for _, a, _ in transitions)))
    delta = {}
    for q, a, t in transitions:
        if (q, a) in delta:
            raise DfaError(f"two transitions from {q!r} on {a!r}")
        if a not in alphabet:
            raise DfaError(f"letter {a!r} not in alphabet")
        delta[q, a] = t
    return Dfa(tuple(states), alphabet, delta, init, frozenset(accepting))


def format_dfa(d: Dfa) -> str:
    name = {q: f"q{i}" for i, q in enumerate(d.states)}
    lines = [
        "alphabet: " + " ".join(d.alphabet.symbols),
        "states: " + " ".join(name[q] for q in d.states),
        f"init: {name[d.init]}",
        "accepting: " + " ".join(name[q] for q in d.states if q in d.accepting),
    ]
    for q in d.states:
        for a in d.alphabet:
            lines.append(f"{name[q]} {a} -> {name[d.delta[q, a]]}")
    return "\n".join(lines) + "\n"


def all_words(alphabet: Sequence[str], max_len: int):
    """Every word up to ``max_len`` in length-lex order (w.r.t. the given order)."""
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)
