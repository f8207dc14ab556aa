"""Language-preserving grammar transformations and the context grammar of a word.

All three transformations keep a Clark-congruential grammar
Clark-congruential; :func:`build_context_grammar` chains them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .grammar import (
    Alphabet,
    Grammar,
    GrammarError,
    Production,
    finite_languages,
    infinite_set,
    prime,
    prune_empty,
    trim,
    unprime,
)
from .regular import Dfa, TransitionMonoid, frame_dfa, substring_avoiding_dfa
from .rewrite import extract_reduction


@dataclass(frozen=True)
class Morphism:
    """Strictly alphabetic morphism: every letter of ``domain`` maps to one letter."""

    mapping: dict
    domain: Alphabet

    def __post_init__(self):
        for a in self.domain:
            if a not in self.mapping:
                raise GrammarError(f"morphism undefined on {a!r}")
        for a, b in self.mapping.items():
            if not isinstance(b, str):
                raise GrammarError(f"image of {a!r} must be a single letter")

    def __call__(self, word: Sequence[str]) -> tuple:
        return tuple(self.mapping[a] for a in word)

    def preimages(self, letter: str) -> list:
        return [a for a in self.domain if self.mapping[a] == letter]

    def __hash__(self):
        return hash((tuple(sorted(self.mapping.items())), self.domain))


def identity_morphism(alphabet: Alphabet) -> Morphism:
    return Morphism({a: a for a in alphabet}, alphabet)


def unpriming_morphism(alphabet: Alphabet) -> Morphism:
    """Maps ``a`` and ``a'`` to ``a``; ``alphabet`` is the primed alphabet."""
    return Morphism({a: unprime(a) if a in alphabet.primed else a for a in alphabet}, alphabet)


def parse_morphism(text: str) -> Morphism:
    """Lines ``x -> y``; the domain order is the order of the lines."""
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        lhs, arrow, rhs = line.partition("->")
        if not arrow or len(lhs.split()) != 1 or len(rhs.split()) != 1:
            raise GrammarError("expected 'x -> y' with single letters", lineno, 1)
        a = lhs.strip()
        if a in mapping:
            raise GrammarError(f"letter {a!r} mapped twice", lineno, 1)
        mapping[a] = rhs.strip()
    return Morphism(mapping, Alphabet(tuple(mapping)))


class AnnotatedNonterminal(NamedTuple):
    base: str
    cls: int  # index into the transition monoid
    witness: tuple

    @property
    def name(self) -> str:
        return annotated_name(self.base, self.witness)


def annotated_name(base: str, witness: Sequence[str]) -> str:
    w = "".join(witness) if all(len(s) == 1 for s in witness) else ".".join(witness)
    return f"{base}[{w or 'eps'}]"


def weak_omega_reduce(g: Grammar) -> Grammar:
    """Inline every non-initial nonterminal whose language is finite.

    Each finite-language symbol in a body is replaced by each of its
    words; initial nonterminals with a finite language end up with
    terminal bodies only.
    """
    g = prune_empty(g)
    infinite = infinite_set(g)
    finite = finite_languages(g)
    kept = [a for a in g.nonterminals if a in infinite or a in g.initials]
    keep = set(kept)
    prods = []
    for head, body in g.productions:
        if head not in keep:
            continue
        options = [
            [(s,)] if not g.is_nonterminal(s) or s in infinite else sorted(finite[s], key=g.alphabet.key)
            for s in body
        ]
        for combo in itertools.product(*options):
            prods.append(Production(head, tuple(x for part in combo for x in part)))
    return Grammar(tuple(kept), g.initials, tuple(prods), g.alphabet)


def inverse_morphism(g: Grammar, h: Morphism) -> Grammar:
    """Grammar for ``h^-1(L(g, A))`` per nonterminal, over ``h``'s domain."""
    for a in h.domain:
        if h.mapping[a] not in g.alphabet:
            raise GrammarError(f"image of {a!r} is not a terminal of the grammar")
    prods = []
    for head, body in g.productions:
        options = [[s] if g.is_nonterminal(s) else h.preimages(s) for s in body]
        for combo in itertools.product(*options):
            prods.append(Production(head, tuple(combo)))
    return Grammar(g.nonterminals, g.initials, tuple(prods), h.domain)


def intersect_regular(g: Grammar, d: Dfa, *, with_annotations: bool = False):
    """Grammar for ``L(g) ∩ L(d)`` with nonterminals ``A[x]``.

    ``A[x]`` derives exactly the words of ``L(g, A)`` in the syntactic
    class of ``x`` (``x`` the least word of that class).  Classes are
    transition-monoid elements of the minimal DFA; only classes actually
    realised by some word of ``L(g, A)`` are created, which doubles as
    pruning of infeasible class assignments.
    """
    if set(d.alphabet.symbols) != set(g.alphabet.symbols):
        raise GrammarError("grammar and DFA alphabets differ")
    m = TransitionMonoid(d)
    g = prune_empty(g)
    is_nt = g.is_nonterminal

    def body_classes(body, realised):
        """Yield (assignment, class) for every choice of realised classes."""
        def go(i, acc, chosen):
            if i == len(body):
                yield tuple(chosen), acc
                return
            s = body[i]
            if not is_nt(s):
                yield from go(i + 1, m.compose(acc, m.letter(s)), chosen)
                return
            for c in sorted(realised[s]):
                chosen.append(c)
                yield from go(i + 1, m.compose(acc, c), chosen)
                chosen.pop()
        yield from go(0, m.identity, [])

    realised = {a: set() for a in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            for _, cls in body_classes(body, realised):
                if cls not in realised[head]:
                    realised[head].add(cls)
                    changed = True

    def name(a, c):
        return annotated_name(a, m.elements[c].witness)

    annotations = {}
    nts = []
    for a in g.nonterminals:
        for c in sorted(realised[a]):
            n = name(a, c)
            nts.append(n)
            annotations[n] = AnnotatedNonterminal(a, c, m.elements[c].witness)
    initials = [name(a, c) for a in g.initials for c in sorted(realised[a]) if m.accepting(c)]
    prods = []
    for head, body in g.productions:
        for chosen, cls in body_classes(body, realised):
            it = iter(chosen)
            new_body = tuple(name(s, next(it)) if is_nt(s) else s for s in body)
            prods.append(Production(name(head, cls), new_body))
    result = Grammar(tuple(nts), tuple(initials), tuple(prods), g.alphabet)
    if with_annotations:
        return result, annotations
    return result


@dataclass(frozen=True)
class ContextGrammar:
    """The context grammar of ``word`` together with the pieces it was built from.

    ``primed_word`` is ``word`` with every letter primed; it marks where
    ``word`` sat inside the surrounding context.
    """

    grammar: Grammar  # weakly omega-reduced
    before_omega: Grammar  # the trimmed intersection, before omega-reduction
    primed_grammar: Grammar  # inverse image under unpriming
    irreducible: Dfa  # irreducible words over the original letters
    frame: Dfa  # irreducible, then primed_word, then irreducible
    word: tuple
    primed_word: tuple
    base_alphabet: Alphabet


def build_context_grammar(g: Grammar, w: Sequence[str]) -> ContextGrammar:
    """Build the context grammar: prime, inverse morphism, intersect, omega-reduce.

    Its language is ``{ u w' v : u, v irreducible, u w v in L(g) }``, with
    ``w'`` the primed copy of ``w``, when ``g`` is Clark-congruential.
    """
    if g.alphabet.primed:
        raise GrammarError("grammar already uses primed letters")
    base = g.alphabet
    w = tuple(w)
    for a in w:
        if a not in base:
            raise GrammarError(f"symbol {a!r} is not a terminal of the grammar")
    g = prune_empty(g)
    primed = base.with_primes()
    w_primed = tuple(prime(a) for a in w)
    g1 = prune_empty(inverse_morphism(g, unpriming_morphism(primed)))
    r = substring_avoiding_dfa(extract_reduction(g).left_sides, base)
    frame = frame_dfa(r, w_primed, primed)
    gw1 = trim(intersect_regular(g1, frame))
    gw = trim(weak_omega_reduce(gw1))
    return ContextGrammar(gw, gw1, g1, r, frame, w, w_primed, base)
