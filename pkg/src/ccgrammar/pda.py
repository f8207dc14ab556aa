"""Pushdown automata, simulation, and the context DPDA of a word.

Acceptance follows the end-of-stack convention: a word is accepted when
the run reaches an accepting state with the input consumed and the stack
holding exactly the bottom marker.  Stacks are tuples, top first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

from .grammar import EPSILON_TOKEN, Grammar, GrammarError, format_word, min_word, parse_word
from .rewrite import ReductionSystem, extract_reduction, is_irreducible, one_step, successors
from .transform import ContextGrammar, build_context_grammar

BOTTOM = "$"
SHARP = "#"
INIT = "q0"

ACCEPT = "accept"
REJECT = "reject"
LIMIT = "limit-exceeded"


class PdaError(ValueError):
    pass


class NondeterministicError(PdaError):
    pass


class StepLimitExceeded(RuntimeError):
    pass


class Transition(NamedTuple):
    source: object
    letter: Optional[str]  # None for an epsilon move
    top: str
    push: tuple
    target: object


class Configuration(NamedTuple):
    state: object
    input: tuple
    stack: tuple


@dataclass(frozen=True)
class Pda:
    states: tuple
    transitions: tuple
    init: object
    accepting: frozenset
    input_alphabet: tuple
    stack_alphabet: tuple
    bottom: str = BOTTOM

    @cached_property
    def index(self) -> dict:
        table = {}
        for t in self.transitions:
            table.setdefault((t.source, t.letter, t.top), []).append(t)
        return table

    def is_accepting_configuration(self, state, remaining, stack) -> bool:
        return not remaining and stack == (self.bottom,) and state in self.accepting


class BufferState(NamedTuple):
    left: tuple
    right: tuple
    guard: object = None  # irreducibility-DFA state of the raw right context


class PushState(NamedTuple):
    """Push-phase state remembering the irreducibility-DFA state of the raw left context."""

    guard: object


@dataclass(frozen=True, kw_only=True)
class ContextDpda(Pda):
    """DPDA reading ``u#v`` and accepting iff ``u w v`` is in the language.

    Buffers left and right of the marker hold at most ``buffer_bound``
    letters; ``reduction`` is the rewrite system of the context grammar.
    """

    context: ContextGrammar
    reduction: ReductionSystem
    buffer_bound: int
    sharp: str = SHARP
    push_states: frozenset = frozenset()
    accepting_splits: frozenset = frozenset()
    lazy: bool = False

    def is_accepting_configuration(self, state, remaining, stack) -> bool:
        return (
            not remaining
            and stack == (self.bottom,)
            and isinstance(state, BufferState)
            and (state.left, state.right) in self.accepting_splits
        )


# ---------------------------------------------------------------------------
# Determinism and shape


def determinism_violations(m: Pda) -> list:
    """Pairs of transitions that break determinism."""
    out = []
    for key, ts in m.index.items():
        if len(ts) > 1:
            out.append((ts[0], ts[1]))
    lettered = {}
    for t in m.transitions:
        if t.letter is not None:
            lettered.setdefault((t.source, t.top), t)
    for t in m.transitions:
        if t.letter is None and (t.source, t.top) in lettered:
            out.append((t, lettered[t.source, t.top]))
    return out


def is_deterministic(m: Pda) -> bool:
    cached = m.__dict__.get("_deterministic")
    if cached is None:
        cached = not determinism_violations(m)
        m.__dict__["_deterministic"] = cached
    return cached


def check_one_turn(m: Pda, push_states=None) -> bool:
    """Structural one-turn test.

    Push-phase states (by default the initial state, or the machine's
    ``push_states``) never shrink the stack.  Every other state is the
    pop phase: moves never grow the stack and never return to the push
    phase.
    """
    if push_states is None:
        push_states = getattr(m, "push_states", None) or {m.init}
    for t in m.transitions:
        if t.source in push_states:
            if len(t.push) < 1:
                return False
        else:
            if len(t.push) > 1 or t.target in push_states:
                return False
    return True


# ---------------------------------------------------------------------------
# Simulation


def _move(m: Pda, state, remaining: tuple, stack: tuple):
    """The unique next configuration, or None if the machine halts."""
    if not stack:
        return None
    top = stack[0]
    eps = m.index.get((state, None, top))
    if eps:
        t = eps[0]
        return t.target, remaining, t.push + stack[1:]
    if remaining:
        ts = m.index.get((state, remaining[0], top))
        if ts:
            t = ts[0]
            return t.target, remaining[1:], t.push + stack[1:]
    return None


class RunResult(NamedTuple):
    outcome: str
    trace: list

    @property
    def accepted(self) -> bool:
        return self.outcome == ACCEPT


def run(m: Pda, w: Sequence[str], step_limit: int = 100_000) -> RunResult:
    """Simulate a DPDA on ``w`` and return the outcome with the full trace."""
    if not is_deterministic(m):
        raise NondeterministicError("run() simulates deterministic machines only")
    w = tuple(w)
    for a in w:
        if a not in m.input_alphabet:
            raise PdaError(f"letter {a!r} not in the input alphabet")
    conf = (m.init, w, (m.bottom,))
    trace = [Configuration(*conf)]
    accepted = m.is_accepting_configuration(*conf)
    steps = 0
    while True:
        nxt = _move(m, *conf)
        if nxt is None:
            return RunResult(ACCEPT if accepted else REJECT, trace)
        steps += 1
        if steps > step_limit:
            return RunResult(LIMIT, trace)
        conf = nxt
        trace.append(Configuration(*conf))
        accepted = accepted or m.is_accepting_configuration(*conf)


def _settle(m: Pda, state, stack, limit: int):
    """Follow epsilon moves; return (final state, stack, accepted on the way)."""
    accepted = m.is_accepting_configuration(state, (), stack)
    steps = 0
    while stack:
        eps = m.index.get((state, None, stack[0]))
        if not eps:
            break
        t = eps[0]
        state, stack = t.target, t.push + stack[1:]
        accepted = accepted or m.is_accepting_configuration(state, (), stack)
        steps += 1
        if steps > limit:
            raise StepLimitExceeded(f"more than {limit} epsilon moves")
    return state, stack, accepted


def _feed(m: Pda, conf, letter: str, limit: int):
    state, stack, _ = _settle(m, conf[0], conf[1], limit)
    if not stack:
        return None
    ts = m.index.get((state, letter, stack[0]))
    if not ts:
        return None
    t = ts[0]
    return t.target, t.push + stack[1:]


class EquivalenceResult(NamedTuple):
    equal: bool
    counterexample: Optional[tuple]
    bound: int


def bounded_equiv(m1: Pda, m2: Pda, max_len: int, step_limit: int = 100_000) -> EquivalenceResult:
    """Compare two DPDAs on every word up to ``max_len``.

    Words are explored breadth-first in length-lex order over the union
    of the input alphabets, carrying the pair of configurations reached so
    far; a configuration pair seen before is not expanded again.  The
    first disagreement found is the length-lex least one.
    """
    for m in (m1, m2):
        if not is_deterministic(m):
            raise NondeterministicError("bounded_equiv needs deterministic machines")
    letters = tuple(dict.fromkeys(m1.input_alphabet + m2.input_alphabet))
    start = ((m1.init, (m1.bottom,)), (m2.init, (m2.bottom,)))
    level = [((), start)]
    seen = {start}
    for n in range(max_len + 1):
        nxt_level = []
        for word, (c1, c2) in level:
            a1 = c1 is not None and _settle(m1, c1[0], c1[1], step_limit)[2]
            a2 = c2 is not None and _settle(m2, c2[0], c2[1], step_limit)[2]
            if a1 != a2:
                return EquivalenceResult(False, word, max_len)
            if n == max_len:
                continue
            for a in letters:
                d1 = _feed(m1, c1, a, step_limit) if c1 is not None else None
                d2 = _feed(m2, c2, a, step_limit) if c2 is not None else None
                if d1 is None and d2 is None:
                    continue
                pair = (d1, d2)
                if pair in seen:
                    continue
                seen.add(pair)
                nxt_level.append((word + (a,), pair))
        level = nxt_level
    return EquivalenceResult(True, None, max_len)


# ---------------------------------------------------------------------------
# Context DPDA


def buffer_bound(g: Grammar) -> int:
    """Longest least word of a production head or body."""
    n = 0
    for head, body in g.productions:
        lw = min_word(g, body)
        if lw is None:
            continue
        n = max(n, len(lw), len(min_word(g, (head,))))
    return n


class ConstructionError(RuntimeError):
    pass


def _split_result(result, occurrence, rule, u, v, wp, primed):
    """Write a rewritten buffer word as (left, right) around the marker."""
    if wp:
        pos = [i for i, s in enumerate(result) if s in primed]
        if not pos:
            raise ConstructionError(f"rewrite destroyed the marker word in {result!r}")
        i = pos[0]
        if result[i:i + len(wp)] != wp or any(s in primed for s in result[i + len(wp):]):
            raise ConstructionError(f"rewrite altered the marker word in {result!r}")
        return result[:i], result[i + len(wp):]
    p = len(u)
    i, lhs, rhs = occurrence, rule.lhs, rule.rhs
    if i + len(lhs) <= p:
        return u[:i] + rhs + u[i + len(lhs):], v
    if i >= p:
        j = i - p
        return u, v[:j] + rhs + v[j + len(lhs):]
    k = min(len(rhs), p - i)
    return u[:i] + rhs[:k], rhs[k:] + v[i + len(lhs) - p:]


def _reduce_buffer(sys: ReductionSystem, u: tuple, v: tuple, wp: tuple):
    """Rewrite ``u w' v`` once, choosing the result whose buffer word is least."""
    key = sys.alphabet.key
    best = None
    for i, rule, result in one_step(sys, u + wp + v):
        x, y = _split_result(result, i, rule, u, v, wp, sys.alphabet.primed)
        k = (key(x + y), key(result), len(x))
        if best is None or k < best[0]:
            best = (k, x, y)
    return best[1], best[2]


class _LazyIndex(dict):
    """Transition table filled in one source state at a time."""

    def __init__(self, expand):
        super().__init__()
        self._expand = expand
        self._done = set()

    def get(self, key, default=None):
        if key[0] not in self._done:
            self._done.add(key[0])
            for t in self._expand(key[0]):
                self.setdefault((t.source, t.letter, t.top), []).append(t)
        return super().get(key, default)


def build_context_dpda(g: Grammar, w: Sequence[str], sharp: str = SHARP, *, lazy: bool = False) -> ContextDpda:
    """The one-turn DPDA accepting ``{u#v : u, v irreducible, u w v in L(g)}``.

    For non-empty ``w`` this is ``{u#v : u w' v in L(context grammar)}``,
    ``w'`` being ``w`` primed.  For empty
    ``w`` the marker word is empty and cannot locate the split, so the
    machine additionally runs the irreducibility DFA over the raw ``u``
    (push phase) and raw ``v`` (pop phase).

    ``g`` must be Clark-congruential (not checked).  Only buffer states
    reachable from the initial state are materialised.  With ``lazy`` set
    not even those are: transitions are generated per state on first use,
    and ``states``/``transitions`` hold only the push phase.
    """
    cg = build_context_grammar(g, w)
    base = cg.base_alphabet.symbols
    if sharp in base:
        raise GrammarError(f"marker {sharp!r} is a terminal of the grammar")
    gw = cg.grammar
    wp = cg.primed_word
    sys = extract_reduction(gw)
    n = buffer_bound(gw)
    stack_alphabet = base + (BOTTOM,)
    irr = cg.irreducible
    guarded = not wp

    accepting_splits = set()
    for a in gw.initials:
        t = min_word(gw, (a,))
        if t is None:
            continue
        for i in range(len(t) - len(wp) + 1):
            x, mid, y = t[:i], t[i:i + len(wp)], t[i + len(wp):]
            if mid == wp and len(x) <= n and len(y) <= n and not (set(x + y) & set(wp)):
                accepting_splits.add((x, y))

    if guarded:
        push_states = [PushState(q) for q in irr.states if q in irr.accepting]
        init = PushState(irr.init)
    else:
        push_states = [INIT]
        init = INIT
    push_set = frozenset(push_states)

    def buffer(u, v, guard):
        if len(u) > n or len(v) > n:
            raise ConstructionError(f"buffer {u}{sharp}{v} exceeds bound {n}")
        return BufferState(u, v, guard)

    def push_phase(p):
        out = []
        for b in base:
            q = irr.delta[p.guard, b] if guarded else None
            if guarded and q not in irr.accepting:
                continue
            target = PushState(q) if guarded else INIT
            for a in stack_alphabet:
                out.append(Transition(p, b, a, (b, a), target))
        start = BufferState((), (), irr.init if guarded else None)
        for a in stack_alphabet:
            out.append(Transition(p, sharp, a, (a,), start))
        return out

    def pop_phase(s):
        u, v, guard = s
        out = []
        if not is_irreducible(sys, u + wp + v):
            x, y = _reduce_buffer(sys, u, v, wp)
            t = buffer(x, y, guard)
            return [Transition(s, None, a, (a,), t) for a in stack_alphabet]
        if len(u) < n:
            for a in base:
                out.append(Transition(s, None, a, (), buffer((a,) + u, v, guard)))
        if len(v) < n:
            for a in stack_alphabet:
                if a == BOTTOM or len(u) == n:
                    for b in base:
                        g2 = guard
                        if guarded:
                            g2 = irr.delta[guard, b]
                            if g2 not in irr.accepting:
                                continue
                        out.append(Transition(s, b, a, (a,), buffer(u, v + (b,), g2)))
        return out

    def expand(s):
        if s in push_set:
            return push_phase(s)
        if isinstance(s, BufferState):
            return pop_phase(s)
        return []

    if lazy:
        states, transitions = list(push_states), [t for p in push_states for t in push_phase(p)]
    else:
        states, transitions = [], []
        seen = {init}
        queue = deque([init])
        while queue:
            s = queue.popleft()
            states.append(s)
            for t in expand(s):
                transitions.append(t)
                if t.target not in seen:
                    seen.add(t.target)
                    queue.append(t.target)
        states += [p for p in push_states if p not in seen]
    accepting = frozenset(
        s for s in states if isinstance(s, BufferState) and (s.left, s.right) in accepting_splits
    )
    m = ContextDpda(
        states=tuple(states),
        transitions=tuple(transitions),
        init=init,
        accepting=accepting,
        input_alphabet=base + (sharp,),
        stack_alphabet=stack_alphabet,
        context=cg,
        reduction=sys,
        buffer_bound=n,
        sharp=sharp,
        push_states=push_set,
        accepting_splits=frozenset(accepting_splits),
        lazy=lazy,
    )
    if lazy:
        # deterministic by construction: each state's moves are generated by one rule
        m.__dict__["index"] = _LazyIndex(expand)
        m.__dict__["_deterministic"] = True
    return m


def simulation_violations(m: ContextDpda, trace: Sequence[Configuration]) -> list:
    """Steps between buffer states that are not (at most) one rewrite.

    For a configuration ``<u#v, y, x^R $>`` the represented word is
    ``x u w' v y``; consecutive pop-phase configurations must represent
    equal words or words related by one step of the context reduction.
    """
    wp = m.context.primed_word

    def word(c):
        u, v = c.state.left, c.state.right
        x = tuple(reversed(c.stack[:-1]))
        return x + u + wp + v + tuple(c.input)

    bad = []
    for c0, c1 in zip(trace, trace[1:]):
        if not isinstance(c0.state, BufferState) or not isinstance(c1.state, BufferState):
            continue
        w0, w1 = word(c0), word(c1)
        if w0 != w1 and w1 not in successors(m.reduction, w0):
            bad.append((c0, c1))
    return bad


# ---------------------------------------------------------------------------
# Text format


def state_name(m: Pda, s) -> str:
    if isinstance(s, BufferState):
        sharp = getattr(m, "sharp", SHARP)
        name = _plain(s.left) + sharp + _plain(s.right)
        return name if s.guard is None else f"{name}@{s.guard}"
    if isinstance(s, PushState):
        return f"{INIT}@{s.guard}"
    return str(s)


def _plain(word) -> str:
    return "".join(word)


def format_pda(m: Pda) -> str:
    """One transition per line as ``q a top/push q2``; ``eps`` marks epsilon."""
    lines = [
        f"init: {state_name(m, m.init)}",
        "accepting: " + " ".join(state_name(m, s) for s in m.states if s in m.accepting),
        "alphabet: " + " ".join(m.input_alphabet),
        "stack: " + " ".join(m.stack_alphabet),
        f"bottom: {m.bottom}",
    ]
    for t in m.transitions:
        letter = EPSILON_TOKEN if t.letter is None else t.letter
        push = _plain(t.push) or EPSILON_TOKEN
        lines.append(f"{state_name(m, t.source)} {letter} {t.top}/{push} {state_name(m, t.target)}")
    return "\n".join(lines) + "\n"


def parse_pda(text: str) -> Pda:
    header = {}
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        parts = line.split()
        # state names may start with the marker, so only non-transition lines are comments
        is_row = len(parts) == 4 and "/" in parts[2]
        if not line or (line.startswith("#") and not is_row):
            continue
        key, colon, rest = line.partition(":")
        if colon and key in ("init", "accepting", "alphabet", "stack", "bottom") and " " not in key:
            header[key] = rest.split()
            continue
        if not is_row:
            raise GrammarError("expected 'q a top/push q2'", lineno, 1)
        rows.append((lineno, parts))
    for key in ("init", "alphabet", "stack"):
        if key not in header:
            raise GrammarError(f"PDA file needs an '{key}:' line")
    bottom = header.get("bottom", [BOTTOM])[0]
    stack_alphabet = tuple(header["stack"])
    if bottom not in stack_alphabet:
        stack_alphabet += (bottom,)
    input_alphabet = tuple(header["alphabet"])
    transitions = []
    states = [header["init"][0]]
    for lineno, (src, letter, op, tgt) in rows:
        top, _, push = op.partition("/")
        if top not in stack_alphabet:
            raise GrammarError(f"unknown stack symbol {top!r}", lineno, 1)
        letter = None if letter == EPSILON_TOKEN else letter
        if letter is not None and letter not in input_alphabet:
            raise GrammarError(f"unknown input letter {letter!r}", lineno, 1)
        push_word = parse_word(push, stack_alphabet) if push != EPSILON_TOKEN else ()
        transitions.append(Transition(src, letter, top, push_word, tgt))
        states.extend([src, tgt])
    states.extend(header.get("accepting", []))
    return Pda(
        states=tuple(dict.fromkeys(states)),
        transitions=tuple(transitions),
        init=header["init"][0],
        accepting=frozenset(header.get("accepting", [])),
        input_alphabet=input_alphabet,
        stack_alphabet=stack_alphabet,
        bottom=bottom,
    )


def dyck_pda() -> Pda:
    """The three-rule DPDA for balanced parentheses."""
    q = "q"
    return Pda(
        states=(q,),
        transitions=(
            Transition(q, "(", BOTTOM, ("(", BOTTOM), q),
            Transition(q, "(", "(", ("(", "("), q),
            Transition(q, ")", "(", (), q),
        ),
        init=q,
        accepting=frozenset({q}),
        input_alphabet=("(", ")"),
        stack_alphabet=("(", ")", BOTTOM),
    )


def describe_configuration(m: Pda, c: Configuration) -> str:
    stack = _plain(c.stack)
    return f"<{state_name(m, c.state)}, {format_word(c.input)}, {stack}>"
