"""Analysis toolkit for Clark-congruential context-free grammars."""

from .decide import cc_equiv, congruent, is_aligned, is_cc_regular_case
from .grammar import Alphabet, Grammar, GrammarError, format_grammar, language, min_word, parse_grammar, parse_word
from .oracle import Answer, Verdict
from .pda import build_context_dpda, run
from .regular import Dfa, parse_dfa
from .rewrite import confluence_report, extract_reduction, member_by_reduction, normalize
from .transform import build_context_grammar, intersect_regular, inverse_morphism, weak_omega_reduce

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "Answer", "Dfa", "Grammar", "GrammarError", "Verdict",
    "build_context_dpda", "build_context_grammar", "cc_equiv", "confluence_report",
    "congruent", "extract_reduction", "format_grammar", "intersect_regular", "inverse_morphism",
    "is_aligned", "is_cc_regular_case", "language", "member_by_reduction", "min_word", "normalize",
    "parse_dfa", "parse_grammar", "parse_word", "run", "weak_omega_reduce",
]
