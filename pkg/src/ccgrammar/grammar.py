"""Context-free grammars: data model, file format, derivation semantics.

Words are tuples of terminal names so that multi-character terminals
(``a'``, ``lpar``) work unchanged everywhere.  The length-lex order on
words is owned by :class:`Alphabet`.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Sequence

Word = tuple  # tuple[str, ...]

EPSILON_TOKEN = "eps"
PRIME = "'"


class GrammarError(ValueError):
    """Raised for malformed grammars or grammar files."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Alphabet:
    """Terminal symbols listed in increasing order.

    ``primed`` marks the copies added by :meth:`with_primes`; it is empty
    unless that construction is in use.
    """

    symbols: tuple
    primed: frozenset = frozenset()
    _rank: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "primed", frozenset(self.primed))
        if len(set(symbols)) != len(symbols):
            raise GrammarError(f"duplicate terminal in order {symbols!r}")
        if not self.primed <= set(symbols):
            raise GrammarError("primed letters must belong to the alphabet")
        object.__setattr__(self, "_rank", {s: i for i, s in enumerate(symbols)})

    def __contains__(self, symbol) -> bool:
        return symbol in self._rank

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def rank(self, symbol: str) -> int:
        try:
            return self._rank[symbol]
        except KeyError:
            raise GrammarError(f"symbol {symbol!r} is not in the alphabet") from None

    def key(self, word: Sequence[str]) -> tuple:
        """Sort key realising the length-lex order."""
        return (len(word), tuple(self.rank(s) for s in word))

    def compare(self, x: Sequence[str], y: Sequence[str]) -> int:
        kx, ky = self.key(x), self.key(y)
        return (kx > ky) - (kx < ky)

    def check_word(self, word: Sequence[str]) -> Word:
        word = tuple(word)
        for s in word:
            if s not in self._rank:
                raise GrammarError(f"symbol {s!r} is not in the alphabet")
        return word

    @property
    def unprimed(self) -> tuple:
        return tuple(s for s in self.symbols if s not in self.primed)

    def with_primes(self) -> "Alphabet":
        """Alphabet extended by a primed copy of every (unprimed) letter.

        Primed letters follow all unprimed ones, in the same relative order.
        """
        base = self.unprimed
        copies = tuple(prime(s) for s in base)
        clash = set(copies) & set(base)
        if clash:
            raise GrammarError(f"primed names clash with existing terminals: {sorted(clash)}")
        return Alphabet(base + copies, frozenset(copies))

    def union(self, other: "Alphabet") -> "Alphabet":
        extra = tuple(s for s in other.symbols if s not in self._rank)
        return Alphabet(self.symbols + extra, self.primed | other.primed)


def prime(symbol: str) -> str:
    return symbol + PRIME


def unprime(symbol: str) -> str:
    return symbol[: -len(PRIME)] if symbol.endswith(PRIME) else symbol


class Production(NamedTuple):
    head: str
    body: tuple


@dataclass(frozen=True)
class Grammar:
    """A CFG ``<V, P, I>`` over a totally ordered terminal alphabet.

    Productions are deduplicated and grouped by head in nonterminal
    order; within a head they keep the order they were given in.
    """

    nonterminals: tuple
    initials: tuple
    productions: tuple
    alphabet: Alphabet

    def __post_init__(self):
        nts = tuple(dict.fromkeys(self.nonterminals))
        initials = tuple(dict.fromkeys(self.initials))
        prods = [Production(p[0], tuple(p[1])) for p in self.productions]
        ntset = set(nts)
        clash = ntset & set(self.alphabet.symbols)
        if clash:
            raise GrammarError(f"symbols used both as terminal and nonterminal: {sorted(clash)}")
        for a in initials:
            if a not in ntset:
                raise GrammarError(f"initial {a!r} is not a nonterminal")
        for head, body in prods:
            if head not in ntset:
                raise GrammarError(f"production head {head!r} is not a nonterminal")
            for s in body:
                if s not in ntset and s not in self.alphabet:
                    raise GrammarError(f"unknown symbol {s!r} in body of {head!r}")
        order = {a: i for i, a in enumerate(nts)}
        prods = sorted(dict.fromkeys(prods), key=lambda p: order[p.head])
        object.__setattr__(self, "nonterminals", nts)
        object.__setattr__(self, "initials", initials)
        object.__setattr__(self, "productions", tuple(prods))

    def is_nonterminal(self, symbol) -> bool:
        return symbol in self._ntset

    @cached_property
    def _ntset(self) -> frozenset:
        return frozenset(self.nonterminals)

    @cached_property
    def by_head(self) -> dict:
        table = {a: [] for a in self.nonterminals}
        for p in self.productions:
            table[p.head].append(p)
        return table

    @cached_property
    def _minima(self) -> dict:
        return _compute_minima(self)

    def check_form(self, form: Sequence[str]) -> tuple:
        form = tuple(form)
        for s in form:
            if not self.is_nonterminal(s) and s not in self.alphabet:
                raise GrammarError(f"symbol {s!r} is neither a terminal nor a nonterminal")
        return form

    def replace(self, **changes) -> "Grammar":
        fields = dict(
            nonterminals=self.nonterminals,
            initials=self.initials,
            productions=self.productions,
            alphabet=self.alphabet,
        )
        fields.update(changes)
        return Grammar(**fields)


def make_grammar(productions: Iterable, initials: Iterable, alphabet: Alphabet) -> Grammar:
    """Grammar whose nonterminals are the initials followed by all heads."""
    productions = [Production(h, tuple(b)) for h, b in productions]
    initials = tuple(initials)
    nts = tuple(dict.fromkeys(initials + tuple(p.head for p in productions)))
    return Grammar(nts, initials, tuple(productions), alphabet)


# ---------------------------------------------------------------------------
# File format


def parse_grammar(text: str) -> Grammar:
    """Parse the line-oriented grammar format.

    ``start: S, T`` (commas optional) names the initial nonterminals, an optional
    ``order: a b c`` fixes the terminal order, and every other non-comment
    line reads ``A -> body | body``.  Heads are nonterminals; every other
    symbol is a terminal.
    """
    starts = None
    order = None
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        col = raw.index(line[0]) + 1
        if line.startswith("start:"):
            if starts is not None:
                raise GrammarError("duplicate start declaration", lineno, col)
            # an empty list is allowed: pruning can leave a grammar without initials
            starts = line[len("start:"):].replace(",", " ").split()
            continue
        if line.startswith("order:"):
            if order is not None:
                raise GrammarError("duplicate order declaration", lineno, col)
            order = line[len("order:"):].split()
            continue
        if "->" not in line:
            raise GrammarError("expected 'A -> body', 'start:' or 'order:'", lineno, col)
        lhs, rhs = line.split("->", 1)
        head = lhs.strip()
        if not head or len(head.split()) != 1:
            raise GrammarError("production head must be a single symbol", lineno, col)
        if head == EPSILON_TOKEN:
            raise GrammarError("'eps' cannot be a nonterminal", lineno, col)
        for alt in rhs.split("|"):
            tokens = alt.split()
            if not tokens:
                raise GrammarError("empty alternative (write 'eps')", lineno, col + raw[col - 1:].index("->"))
            if tokens == [EPSILON_TOKEN]:
                tokens = []
            elif EPSILON_TOKEN in tokens:
                raise GrammarError("'eps' must stand alone in an alternative", lineno, col)
            if "->" in tokens:
                raise GrammarError("'->' cannot be a symbol (one production per line)", lineno, col)
            rules.append((lineno, head, tuple(tokens)))
    if starts is None:
        raise GrammarError("missing 'start:' declaration")
    heads = list(dict.fromkeys(h for _, h, _ in rules))
    nts = list(dict.fromkeys(starts + heads))
    ntset = set(nts)
    used = list(dict.fromkeys(s for _, _, body in rules for s in body if s not in ntset))
    if order is None:
        terminals = sorted(used)
    else:
        if len(set(order)) != len(order):
            raise GrammarError("terminal listed twice in order declaration")
        bad = [s for s in order if s in ntset]
        if bad:
            if set(bad) & set(starts) and not set(bad) & set(heads):
                raise GrammarError(f"undeclared start symbol {bad[0]!r} is declared as a terminal")
            raise GrammarError(f"nonterminal {bad[0]!r} listed in order declaration")
        missing = [s for s in used if s not in order]
        if missing:
            raise GrammarError(f"terminal {missing[0]!r} missing from order declaration")
        terminals = order
    # x' next to x is the primed copy of x (as printed for context grammars)
    primed = frozenset(s for s in terminals if s != unprime(s) and unprime(s) in terminals)
    return Grammar(
        tuple(nts),
        tuple(starts),
        tuple(Production(h, b) for _, h, b in rules),
        Alphabet(tuple(terminals), primed),
    )


def format_grammar(g: Grammar) -> str:
    """Inverse of :func:`parse_grammar` for grammars with string symbols."""
    lines = [f"start: {', '.join(g.initials)}"]
    lines.append("order: " + " ".join(g.alphabet.symbols) if g.alphabet.symbols else "order:")
    for a in g.nonterminals:
        bodies = [" ".join(p.body) if p.body else EPSILON_TOKEN for p in g.by_head[a]]
        if bodies:
            lines.append(f"{a} -> {' | '.join(bodies)}")
    return "\n".join(lines) + "\n"


def parse_word(text: str, symbols: Iterable[str]) -> Word:
    """Split ``text`` into symbols.

    Whitespace-separated input is taken literally; otherwise the text is
    tokenised greedily (longest match first) against ``symbols``.
    ``eps`` and the empty string denote the empty word.
    """
    text = text.strip()
    if text in ("", EPSILON_TOKEN):
        return ()
    symbols = list(symbols)
    known = set(symbols)
    if any(ch.isspace() for ch in text):
        tokens = tuple(text.split())
        for t in tokens:
            if t not in known:
                raise GrammarError(f"symbol {t!r} is not in the alphabet")
        return tokens
    by_length = sorted(known, key=len, reverse=True)
    out = []
    i = 0
    while i < len(text):
        for s in by_length:
            if s and text.startswith(s, i):
                out.append(s)
                i += len(s)
                break
        else:
            raise GrammarError(f"cannot tokenise {text!r} at offset {i}")
    return tuple(out)


def format_word(word: Sequence[str]) -> str:
    if not word:
        return EPSILON_TOKEN
    if all(len(s) == 1 for s in word):
        return "".join(word)
    return " ".join(word)


# ---------------------------------------------------------------------------
# Ordering


def lenlex_compare(x: Sequence[str], y: Sequence[str], order: Alphabet) -> int:
    """-1, 0 or 1 as ``x`` precedes, equals or follows ``y`` in length-lex order."""
    return order.compare(x, y)


# ---------------------------------------------------------------------------
# Languages


def enumerate_words(g: Grammar, form: Sequence[str], max_len: int) -> set:
    """All words of ``L(g, form)`` of length at most ``max_len``."""
    form = g.check_form(form)
    if max_len < 0:
        return set()
    tables = length_tables(g, max_len)
    out = set()
    for n in range(max_len + 1):
        out |= _form_words(g, form, n, tables)
    return out


def language(g: Grammar, max_len: int) -> set:
    """Words of ``L(g)`` up to ``max_len``."""
    tables = length_tables(g, max_len)
    return {w for a in g.initials for row in tables[a] for w in row}


def length_tables(g: Grammar, max_len: int) -> dict:
    """``tables[A][n]`` is the set of words of length ``n`` derivable from ``A``.

    Filled one length at a time; within a length a fixpoint absorbs
    epsilon- and unit-cycles.
    """
    cache = g.__dict__.setdefault("_length_tables", {})
    if max_len in cache:
        return cache[max_len]
    done = [n for n in cache if n > max_len]
    if done:
        full = cache[min(done)]
        return {a: rows[: max_len + 1] for a, rows in full.items()}
    tables = {a: [] for a in g.nonterminals}
    for n in range(max_len + 1):
        for a in g.nonterminals:
            tables[a].append(set())
        changed = True
        while changed:
            changed = False
            for head, body in g.productions:
                row = tables[head][n]
                for w in _form_words(g, body, n, tables):
                    if w not in row:
                        row.add(w)
                        changed = True
    cache[max_len] = tables
    return tables


def _form_words(g: Grammar, form: tuple, n: int, tables: dict) -> set:
    if not form:
        return {()} if n == 0 else set()
    first, rest = form[0], form[1:]
    if not g.is_nonterminal(first):
        if n == 0:
            return set()
        return {(first,) + w for w in _form_words(g, rest, n - 1, tables)}
    out = set()
    rows = tables[first]
    for k in range(n + 1):
        left = rows[k] if k < len(rows) else set()
        if not left:
            continue
        right = _form_words(g, rest, n - k, tables)
        if right:
            out.update(x + y for x in left for y in right)
    return out


def productive_set(g: Grammar) -> frozenset:
    """Nonterminals with a non-empty language (least fixpoint)."""
    productive = set()
    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            if head in productive:
                continue
            if all(not g.is_nonterminal(s) or s in productive for s in body):
                productive.add(head)
                changed = True
    return frozenset(productive)


def _compute_minima(g: Grammar) -> dict:
    # Knuth's generalisation of Dijkstra: concatenation never yields a word
    # smaller than any of its parts, so the first pop of a head is final.
    key = g.alphabet.key
    waiting = []
    uses = {a: [] for a in g.nonterminals}
    heap = []
    tick = itertools.count()
    for i, (head, body) in enumerate(g.productions):
        nts = [s for s in body if g.is_nonterminal(s)]
        waiting.append(len(nts))
        for s in nts:
            uses[s].append(i)
        if not nts:
            heapq.heappush(heap, (key(body), next(tick), head, body))
    best = {}
    while heap:
        _, _, head, word = heapq.heappop(heap)
        if head in best:
            continue
        best[head] = word
        for i in uses[head]:
            waiting[i] -= 1
            if waiting[i] == 0:
                h, body = g.productions[i]
                if h in best:
                    continue
                cand = tuple(s for x in body for s in (best[x] if g.is_nonterminal(x) else (x,)))
                heapq.heappush(heap, (key(cand), next(tick), h, cand))
    return best


def min_word(g: Grammar, form: Sequence[str]) -> Optional[Word]:
    """The length-lex least word derivable from ``form``, or None if none is."""
    form = g.check_form(form)
    minima = g._minima
    out = []
    for s in form:
        if g.is_nonterminal(s):
            if s not in minima:
                return None
            out.extend(minima[s])
        else:
            out.append(s)
    return tuple(out)


def _nonempty_word_set(g: Grammar, productive: frozenset) -> frozenset:
    """Nonterminals that derive at least one non-empty word."""
    out = set()
    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            if head in out or not all(not g.is_nonterminal(s) or s in productive for s in body):
                continue
            if any(not g.is_nonterminal(s) or s in out for s in body):
                out.add(head)
                changed = True
    return frozenset(out)


def infinite_set(g: Grammar) -> frozenset:
    """Nonterminals with an infinite language.

    ``A`` is infinite iff it reaches (through usable productions) a
    nonterminal on a cycle that carries an expanding edge, i.e. one whose
    sibling symbols can produce a non-empty word.
    """
    productive = productive_set(g)
    nonempty = _nonempty_word_set(g, productive)
    edges = {a: set() for a in productive}
    expanding = set()
    for head, body in g.productions:
        if head not in productive:
            continue
        if not all(not g.is_nonterminal(s) or s in productive for s in body):
            continue
        for i, s in enumerate(body):
            if not g.is_nonterminal(s):
                continue
            edges[head].add(s)
            siblings = body[:i] + body[i + 1:]
            if any(not g.is_nonterminal(t) or t in nonempty for t in siblings):
                expanding.add((head, s))
    reach = {a: _reachable(edges, a) for a in productive}
    pumping = {x for x, y in expanding if x in reach[y]}
    return frozenset(a for a in productive if reach[a] & pumping or a in pumping)


def _reachable(edges: dict, start) -> set:
    """Nodes reachable from ``start`` by one or more edges."""
    seen = set()
    stack = list(edges.get(start, ()))
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(edges.get(x, ()))
    return seen


def is_finite_language(g: Grammar, nonterminal: str) -> bool:
    if not g.is_nonterminal(nonterminal):
        raise GrammarError(f"{nonterminal!r} is not a nonterminal")
    return nonterminal not in infinite_set(g)


def finite_languages(g: Grammar) -> dict:
    """Exact languages of every productive nonterminal with a finite language."""
    productive = productive_set(g)
    finite = [a for a in productive if a not in infinite_set(g)]
    finite_set = set(finite)
    langs = {a: set() for a in finite}
    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            if head not in finite_set:
                continue
            if not all(not g.is_nonterminal(s) or s in productive for s in body):
                continue
            parts = [langs[s] if g.is_nonterminal(s) else {(s,)} for s in body]
            for combo in itertools.product(*parts):
                w = tuple(x for part in combo for x in part)
                if w not in langs[head]:
                    langs[head].add(w)
                    changed = True
    return langs


def prune_empty(g: Grammar) -> Grammar:
    """Drop nonterminals with an empty language and every production using one."""
    productive = productive_set(g)
    prods = [
        p
        for p in g.productions
        if p.head in productive and all(not g.is_nonterminal(s) or s in productive for s in p.body)
    ]
    return Grammar(
        tuple(a for a in g.nonterminals if a in productive),
        tuple(a for a in g.initials if a in productive),
        tuple(prods),
        g.alphabet,
    )


def trim(g: Grammar) -> Grammar:
    """prune_empty, then drop unreachable nonterminals and ``A -> A`` productions."""
    g = prune_empty(g)
    seen = set(g.initials)
    stack = list(g.initials)
    while stack:
        a = stack.pop()
        for p in g.by_head[a]:
            for s in p.body:
                if g.is_nonterminal(s) and s not in seen:
                    seen.add(s)
                    stack.append(s)
    return Grammar(
        tuple(a for a in g.nonterminals if a in seen),
        g.initials,
        tuple(p for p in g.productions if p.head in seen and p.body != (p.head,)),
        g.alphabet,
    )
