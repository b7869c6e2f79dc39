"""Sentence negation, negation-pair dataset construction, and
negation-sensitivity probing for NLG metrics."""

from .core import (MorphTarget, Number, ParsedSentence, Person, Pos, Tense,
                   Token, VerbForm, children_of, detokenize, root_of)
from .errors import (AdapterError, ConlluParseError, MalformedTreeError,
                     NegforgeError, UnsupportedSentenceError,
                     UnsupportedStructureError)
from .negator import (NegationOutcome, NegatorOptions, is_negated, negate,
                      negate_text)
from .parser import analyze, has_auxiliary

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "ConlluParseError",
    "MalformedTreeError",
    "MorphTarget",
    "NegationOutcome",
    "NegatorOptions",
    "NegforgeError",
    "Number",
    "ParsedSentence",
    "Person",
    "Pos",
    "Tense",
    "Token",
    "UnsupportedSentenceError",
    "UnsupportedStructureError",
    "VerbForm",
    "analyze",
    "children_of",
    "detokenize",
    "has_auxiliary",
    "is_negated",
    "negate",
    "negate_text",
    "root_of",
]
