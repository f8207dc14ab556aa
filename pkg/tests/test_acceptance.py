"""Acceptance criteria 1 to 8.

Each test prints a single ``PASS``/``FAIL`` line naming the criterion and,
on failure, the checks that did not hold.  Run this file directly
(``python3 tests/test_acceptance.py``) to get just those eight lines.
"""

import itertools
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pytest

import bruteforce as bf
from corpus import CC_NAMES, CORPUS, NON_CC_NAMES, REGULAR, corpus_dfa, load
from ccgrammar.cli import main as cli_main
from ccgrammar.decide import (
    DyckOracle,
    cc_equiv,
    congruent,
    dyck_normal_form,
    is_aligned,
    is_cc_regular_case,
)
from ccgrammar.grammar import (
    format_grammar,
    infinite_set,
    language,
    min_word,
    parse_grammar,
    prune_empty,
)
from ccgrammar.pda import (
    BufferState,
    build_context_dpda,
    check_one_turn,
    is_deterministic,
    run,
    simulation_violations,
)
from ccgrammar.regular import Dfa, TransitionMonoid, substring_avoiding_dfa, syntactic_oracle
from ccgrammar.rewrite import (
    LEFTMOST,
    MINIMAL,
    confluence_report,
    extract_reduction,
    member_by_reduction,
    normalize_trace,
)
from ccgrammar.transform import (
    build_context_grammar,
    intersect_regular,
    inverse_morphism,
    parse_morphism,
    unpriming_morphism,
    weak_omega_reduce,
)

TITLES = {
    1: "Dyck baseline",
    2: "non-confluence witness",
    3: "membership-by-reduction boundary",
    4: "transformation oracle equivalence",
    5: "context DPDA correctness",
    6: "congruence and equivalence",
    7: "alignment and recognition",
    8: "global property sweep",
}


class Checks:
    """Named boolean checks; a criterion passes when all of them hold."""

    def __init__(self):
        self.failed = []
        self.count = 0

    def __call__(self, label, ok):
        self.count += 1
        if not ok:
            self.failed.append(label)
        return ok


def report(n, checks):
    status = "PASS" if not checks.failed else "FAIL"
    line = f"{status} criterion {n}: {TITLES[n]} ({checks.count} checks)"
    if checks.failed:
        shown = "; ".join(checks.failed[:5])
        more = f" and {len(checks.failed) - 5} more" if len(checks.failed) > 5 else ""
        line += f" failed: {shown}{more}"
    return line


def w(text):
    return tuple(text)


def even_length(alphabet):
    return Dfa((0, 1), alphabet, {(q, x): 1 - q for q in (0, 1) for x in alphabet}, 0, {0})


# --- criterion 1 --------------------------------------------------------------------------------


def criterion_1():
    c = Checks()
    g = load("dyck")
    sys_ = extract_reduction(g)
    c("least word of S is eps", min_word(g, ("S",)) == ())
    c("rules are exactly () -> eps", [(r.lhs, r.rhs) for r in sys_.rules] == [(w("()"), ())])
    irr = substring_avoiding_dfa(sys_.left_sides, g.alphabet)
    expected = {w(")" * n + "(" * m) for n in range(9) for m in range(9 - n)}
    c("irreducible words are )^n (^m up to 8", {x for x in bf.words("()", 8) if irr.accepts(x)} == expected)
    chain = normalize_trace(sys_, w("(()())()"))
    c("(()())() reduces in 4 steps", len(chain) - 1 == 4 and chain[-1] == ())
    c("(()())() accepted", member_by_reduction(g, sys_, w("(()())()")))
    c("(() rejected", not member_by_reduction(g, sys_, w("(()")))
    c("(() has normal form (", normalize_trace(sys_, w("(()"))[-1] == w("("))
    return c


# --- criterion 2 --------------------------------------------------------------------------------


def criterion_2():
    c = Checks()
    rep = confluence_report(extract_reduction(load("a_then_even")))
    c("reported non-confluent", not rep.confluent)
    c("peak is aa", rep.witness is not None and rep.witness.peak == w("aa"))
    c("normal forms are {a, eps}", rep.normal_forms == frozenset({w("a"), ()}))
    return c


# --- criterion 3 --------------------------------------------------------------------------------


def criterion_3():
    c = Checks()
    g = load("two_letters")
    c("bb accepted by reduction", member_by_reduction(g, extract_reduction(g), w("bb")))
    c("bb not enumerated", w("bb") not in language(g, 2))
    c("bb not in brute-force language", w("bb") not in bf.language(g, 2))
    return c


# --- criterion 4 --------------------------------------------------------------------------------

N4 = 6

CONTEXT_WORDS = {
    "dyck": ["", "(", ")", "()", ")(", "(("],
    "dyck_right": ["", "("],
    "dyck_split": ["()", ")"],
    "anbn": ["", "a", "b", "ab", "ba"],
    "a_then_even": ["", "a", "aa"],
    "a_star": ["", "a"],
    "even_a": ["", "a"],
    "single": ["", "a"],
    "empty": [""],
    "anbn_eps": ["a", "ab"],
    "ab_star": ["b", "ab"],
    "two_letters": ["a", "b"],
    "a_or_ab": ["a"],
    "ab_aab": ["a", "b"],
    "nested": ["(", "()"],
}


def regular_tests(g):
    al = g.alphabet
    out = [even_length(al)]
    if al.symbols:
        a = al.symbols[0]
        out.append(substring_avoiding_dfa([(a, a)], al))
    return out


def criterion_4():
    c = Checks()
    for name in CORPUS:
        g = load(name)
        per = bf.languages(g, N4)
        lang = bf.language(g, N4)

        r = weak_omega_reduce(g)
        after = bf.languages(r, N4)
        c(f"{name}: omega language", bf.language(r, N4) == lang)
        c(f"{name}: omega per nonterminal", all(after[a] == per[a] for a in r.nonterminals))
        inf = infinite_set(r)
        c(f"{name}: omega is weakly reduced", all(a in inf or a in r.initials for a in r.nonterminals))

        for h in (unpriming_morphism(g.alphabet.with_primes()), _collapse(g.alphabet)):
            gh = inverse_morphism(g, h)
            pre = bf.languages(gh, N4)
            dom = h.domain.symbols
            c(f"{name}: inverse morphism per nonterminal", all(
                pre[a] == {x for x in bf.words(dom, N4) if h(x) in per[a]} for a in g.nonterminals
            ))

        for d in regular_tests(g):
            gi, notes = intersect_regular(g, d, with_annotations=True)
            m = TransitionMonoid(d)
            got = bf.languages(gi, N4)
            c(f"{name}: intersection language", bf.language(gi, N4) == {x for x in lang if d.accepts(x)})
            c(f"{name}: intersection per class", all(
                got[n] == {x for x in per[a.base] if m.element_of(x) == a.cls} for n, a in notes.items()
            ))

        for word in CONTEXT_WORDS[name]:
            cg = build_context_grammar(g, w(word))
            wp = cg.primed_word
            expected = {u + wp + v for u, v in bf.context_set(g, w(word), N4 - len(wp))}
            c(f"{name}/{word!r}: context grammar set equation", bf.language(cg.grammar, N4) == expected)
            if word:
                c(f"{name}/{word!r}: unprimed words force the least word", _single_word_check(g, cg))
    return c


def _collapse(alphabet):
    """Two fresh letters per terminal, both mapped onto it."""
    lines = [f"{a}{i} -> {a}" for a in alphabet.symbols for i in (1, 2)]
    return parse_morphism("\n".join(lines) + "\n") if lines else unpriming_morphism(alphabet.with_primes())


def _single_word_check(g, cg):
    gp = cg.before_omega
    primed = set(gp.alphabet.primed)
    lang = bf.languages(gp, 8)
    base = bf.languages(g, 8)
    for a in gp.nonterminals:
        if any(not set(x) & primed for x in lang[a]):
            if lang[a] != {bf.least(g, base[a.split("[", 1)[0]])}:
                return False
    return True


# --- criterion 5 --------------------------------------------------------------------------------


def mw_checks(c, name, word, sweep=8):
    g = load(name)
    m = build_context_dpda(g, w(word))
    tag = f"{name}/{word!r}"
    c(f"{tag}: deterministic", is_deterministic(m))
    c(f"{tag}: one-turn", check_one_turn(m))
    expected = bf.context_set(g, w(word), sweep)
    got = set()
    invariant = True
    letters = g.alphabet.symbols
    for u in bf.words(letters, sweep):
        for v in bf.words(letters, sweep - len(u)):
            res = run(m, u + (m.sharp,) + v)
            if res.accepted:
                got.add((u, v))
            if simulation_violations(m, res.trace):
                invariant = False
    c(f"{tag}: language up to {sweep}", got == expected)
    c(f"{tag}: step invariant", invariant)
    gw = m.context.grammar
    least = {bf.least(gw, ws) for a, ws in bf.languages(gw, 2 * m.buffer_bound + len(word)).items() if a in gw.initials}
    c(f"{tag}: accepting states", all(s.left + m.context.primed_word + s.right in least for s in m.accepting))
    c(f"{tag}: buffers bounded", all(
        len(s.left) <= m.buffer_bound and len(s.right) <= m.buffer_bound for s in m.states if isinstance(s, BufferState)
    ))


def criterion_5():
    c = Checks()
    for word in ("", "(", "()"):
        mw_checks(c, "dyck", word)
    return c


# --- criterion 6 --------------------------------------------------------------------------------


def criterion_6():
    c = Checks()
    g = load("dyck")
    dyck_in = bf.member("dyck")
    c("() congruent to eps", congruent(g, w("()"), ()).is_yes)
    v = congruent(g, w("("), w(")"), 6)
    ok = v.is_no
    if ok:
        u, s = v.witness
        ok = dyck_in(u + w("(") + s) != dyck_in(u + w(")") + s)
    c("( and ) separated by a verified context", ok)
    c("Dyck equals S -> eps | ( S ) S", cc_equiv(g, parse_grammar("start: S\nS -> eps | ( S ) S\n")).is_yes)
    v = cc_equiv(g, parse_grammar("start: S\nS -> eps\n"), 6)
    c("Dyck differs from {eps} at ()", v.is_no and v.witness == w("()"))
    return c


# --- criterion 7 --------------------------------------------------------------------------------


def criterion_7():
    c = Checks()
    c("Dyck grammar is Dyck-aligned", is_aligned(load("dyck"), DyckOracle()).is_yes)
    v = is_cc_regular_case(load("two_letters"), corpus_dfa("two_letters"))
    c("{S -> a | b, T -> a b} is not CC", v.is_no)
    c("offending production is S -> b", v.is_no and (v.witness.head, v.witness.body) == ("S", ("b",)))
    return c


# --- criterion 8 --------------------------------------------------------------------------------


def signature(name, word, ctxs):
    return bf.context_signature(bf.MEMBERSHIP[name], word, ctxs)


def bounded_cc(name, word_len=4, ctx=3):
    """No nonterminal of the grammar has two short words with different short contexts."""
    g = load(name)
    ctxs = bf.string_contexts(g.alphabet.symbols, ctx)
    for ws in bf.languages(g, word_len).values():
        if len({signature(name, x, ctxs) for x in ws}) > 1:
            return False
    return True


def rules_congruent(name, ctx=4):
    g = load(name)
    ctxs = bf.string_contexts(g.alphabet.symbols, ctx)
    return all(signature(name, r.lhs, ctxs) == signature(name, r.rhs, ctxs) for r in extract_reduction(g).rules)


def criterion_8():
    c = Checks()
    c("corpus has at least 10 grammars of both kinds", len(CORPUS) >= 10 and CC_NAMES and NON_CC_NAMES)
    for name in CORPUS:
        c(f"{name}: CC label agrees with bounded context sweep", bounded_cc(name) == CORPUS[name][1])
    c("rules relate congruent words on every CC grammar", all(rules_congruent(n) for n in CC_NAMES))
    c("some non-CC grammar has a rule relating incongruent words", any(not rules_congruent(n) for n in NON_CC_NAMES))

    for name in CORPUS:
        _grammar_core(c, name)
        _rewriting(c, name)
        _regular(c, name)
    for name in REGULAR:
        _syntactic_oracle(c, name)
    for name in CC_NAMES:
        _cc_preservation(c, name)
        for word in CONTEXT_WORDS[name]:
            mw_checks(c, name, word, sweep=6)
        if name != "empty":
            _congruence_soundness(c, name)
    _dyck_normal_forms(c)
    _equivalence(c)
    _alignment(c)
    _cli(c)
    return c


def _grammar_core(c, name):
    g = load(name)
    per = bf.languages(g, 6)
    c(f"{name}: enumeration", language(g, 6) == bf.language(g, 6))
    for a in g.nonterminals:
        mw = min_word(g, (a,))
        c(f"{name}: least word of {a}", mw == bf.least(g, per[a]) or (mw is not None and len(mw) > 6 and not per[a]))
    for a, b in itertools.product(g.nonterminals, repeat=2):
        x, y = min_word(g, (a,)), min_word(g, (b,))
        if x is not None and y is not None:
            c(f"{name}: least word of {a} {b}", min_word(g, (a, b)) == x + y)
    pruned = prune_empty(g)
    after = bf.languages(pruned, 8)
    before = bf.languages(g, 8)
    c(f"{name}: pruning keeps languages", all(after[a] == before[a] for a in pruned.nonterminals))


def _rewriting(c, name):
    g = load(name)
    sys_ = extract_reduction(g)
    lang = bf.language(g, 8)
    bound_ok = True
    verdicts_ok = True
    for x in bf.words(g.alphabet.symbols, 8):
        for strategy in (LEFTMOST, MINIMAL):
            if len(normalize_trace(sys_, x, strategy)) - 1 > len(x) * (len(sys_.rules) + 1):
                bound_ok = False
        if CORPUS[name][1]:
            left = member_by_reduction(g, sys_, x, LEFTMOST)
            right = member_by_reduction(g, sys_, x, MINIMAL)
            if not (left == right == (x in lang)):
                verdicts_ok = False
    c(f"{name}: normalisation step bound", bound_ok)
    c(f"{name}: membership by reduction", verdicts_ok)


def _regular(c, name):
    g = load(name)
    lhss = extract_reduction(g).left_sides
    d = substring_avoiding_dfa(lhss, g.alphabet)
    n = 10 if len(g.alphabet) <= 2 else 6
    c(f"{name}: irreducibility automaton", all(
        d.accepts(x) == bf.irreducible(x, lhss) for x in bf.words(g.alphabet.symbols, n)
    ))


def _syntactic_oracle(c, name):
    d = corpus_dfa(name)
    test = bf.MEMBERSHIP[name]
    oracle = syntactic_oracle(d)
    m = oracle.monoid
    ok = all(m.element_of(e.witness) == i for i, e in enumerate(m.elements))
    c(f"{name}: monoid witnesses", ok)
    letters = d.alphabet.symbols
    ctxs = bf.string_contexts(letters, 6)
    short = list(bf.words(letters, 5))
    sig = {x: bf.context_signature(test, x, ctxs) for x in short}
    agree = all(oracle.decide(x, y).is_yes == (sig[x] == sig[y]) for x in short for y in short)
    c(f"{name}: syntactic oracle", agree)


def _cc_preservation(c, name):
    g = load(name)
    results = [weak_omega_reduce(g)] + [intersect_regular(g, d) for d in regular_tests(g)]
    for r in results:
        lang = bf.language(r, 13)
        ctxs = bf.contexts(r.alphabet.symbols, 4)
        ok = True
        for ws in bf.languages(r, 5).values():
            ws = sorted(ws, key=r.alphabet.key)
            for y in ws[1:]:
                if any(((u + ws[0] + v) in lang) != ((u + y + v) in lang) for u, v in ctxs):
                    ok = False
        c(f"{name}: transformed grammar stays CC at desk scale", ok)


def _congruence_soundness(c, name):
    g = load(name)
    letters = g.alphabet.symbols
    bound = 8 if len(letters) == 1 else 6
    ctxs = bf.string_contexts(letters, bound)
    short = list(bf.words(letters, 2))
    sig = {x: signature(name, x, ctxs) for x in short}
    test = bf.member(name)
    ok = True
    for x, y in itertools.combinations(short, 2):
        v = congruent(g, x, y, 6)
        if v.is_yes and sig[x] != sig[y]:
            ok = False
        if v.is_no:
            u, s = v.witness
            if test(u + x + s) == test(u + y + s):
                ok = False
    c(f"{name}: congruence verdicts sound", ok)


def _dyck_normal_forms(c):
    ctxs = bf.string_contexts("()", 6)
    classes = {}
    for x in bf.words("()", 8):
        classes.setdefault(dyck_normal_form(x), set()).add(signature("dyck", x, ctxs))
    c("Dyck normal forms are class invariants", all(len(s) == 1 for s in classes.values()))
    small = [next(iter(classes[f])) for f in classes if max(f) <= 6]
    c("Dyck normal forms within the bound are separated", len(set(small)) == len(small))


def _equivalence(c):
    pairs = [("dyck", "dyck_right"), ("dyck", "dyck_split"), ("a_star", "a_then_even"), ("a_star", "even_a"),
             ("anbn", "single"), ("empty", "empty")]
    for n1, n2 in pairs:
        v = cc_equiv(load(n1), load(n2), 6)
        t1, t2 = bf.member(n1), bf.member(n2)
        letters = sorted(set(load(n1).alphabet.symbols) | set(load(n2).alphabet.symbols))
        agree = all(t1(x) == t2(x) for x in bf.words(letters, 10))
        sound = (not v.is_yes or agree) and (not v.is_no or t1(v.witness) != t2(v.witness))
        c(f"{n1}/{n2}: equivalence verdict sound", sound)
    ctxs = bf.string_contexts("a", 8)
    for name in ("a_star", "even_a", "single"):
        test = bf.MEMBERSHIP[name]
        universal = all(test("a" * k) for k in range(17))
        conj = test("") and signature(name, "a", ctxs) == signature(name, "", ctxs)
        c(f"{name}: universality iff eps in L and a ~ eps", universal == conj)


def _alignment(c):
    for name in REGULAR:
        oracle = syntactic_oracle(corpus_dfa(name))
        g = prune_empty(load(name))
        c(f"{name}: alignment stable under pruning", is_aligned(g, oracle).value == is_aligned(prune_empty(g), oracle).value)
        c(f"{name}: regular recognition matches label", is_cc_regular_case(load(name), corpus_dfa(name)).is_yes == CORPUS[name][1])


def _cli(c):
    codes = {"YES": 0, "NO": 1, "UNKNOWN": 2, "ACCEPT": 0, "REJECT": 1}
    with tempfile.TemporaryDirectory() as tmp:
        paths = {}
        for name, (text, _) in CORPUS.items():
            paths[name] = os.path.join(tmp, name + ".cfg")
            with open(paths[name], "w") as fh:
                fh.write(text)
        for name in CORPUS:
            g = load(name)
            c(f"{name}: grammar round trip", parse_grammar(format_grammar(g)) == g)
            gw = build_context_grammar(g, ()).grammar
            c(f"{name}: context grammar round trip", parse_grammar(format_grammar(gw)) == gw)
        golden = [
            ["member", paths["dyck"], "(()())()", "--trust-cc"],
            ["member", paths["dyck"], "(()", "--trust-cc"],
            ["congruent", paths["dyck"], "()", "", "--trust-cc"],
            ["congruent", paths["dyck"], "(", ")", "--trust-cc", "--bound", "6"],
            ["congruent", paths["a_then_even"], "a", "", "--trust-cc", "--bound", "4"],
            ["equiv", paths["dyck"], paths["dyck_right"], "--trust-cc"],
            ["aligned", paths["dyck"], "--oracle", "dyck"],
        ]
        import contextlib
        import io

        for argv in golden:
            out = io.StringIO()
            with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
                code = cli_main(argv)
            c(f"exit status of {argv[0]}", codes.get(out.getvalue().split()[0]) == code)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    checks = CRITERIA[n]()
    line = report(n, checks)
    with capsys.disabled():
        print("\n" + line)
    assert not checks.failed, line


if __name__ == "__main__":
    failed = 0
    for n in sorted(CRITERIA):
        checks = CRITERIA[n]()
        print(report(n, checks), flush=True)
        failed += bool(checks.failed)
    sys.exit(1 if failed else 0)
