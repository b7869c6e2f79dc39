"""Dependency-annotated sentence model shared by parsers, the negator, and I/O.

All types are immutable after construction and validate their own
invariants, so a constructed ``ParsedSentence`` is always a well-formed,
single-rooted dependency tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import MalformedTreeError


class Pos(Enum):
    """Coarse part-of-speech inventory understood by the negator."""

    VERB = "VERB"
    AUX = "AUX"
    PART = "PART"
    ADV = "ADV"
    NOUN = "NOUN"
    PRON = "PRON"
    ADJ = "ADJ"
    DET = "DET"
    ADP = "ADP"
    NUM = "NUM"
    PUNCT = "PUNCT"
    OTHER = "OTHER"


class Tense(Enum):
    PAST = "past"
    PRESENT = "present"


class Person(Enum):
    FIRST = "first"
    SECOND = "second"
    THIRD = "third"


class Number(Enum):
    SINGULAR = "singular"
    PLURAL = "plural"


class VerbForm(Enum):
    FINITE = "finite"
    BARE_INFINITIVE = "bare_infinitive"
    PAST_PARTICIPLE = "past_participle"
    GERUND = "gerund"


@dataclass(frozen=True)
class MorphTarget:
    """Conjugation target a verb form should be inflected to.

    For regular verbs other than "be", past tense is insensitive to
    person and number; those fields are still carried so present-tense
    targets stay unambiguous.
    """

    tense: Tense
    person: Person = Person.FIRST
    number: Number = Number.SINGULAR
    verb_form: VerbForm = VerbForm.FINITE


@dataclass(frozen=True)
class Token:
    """One syntactic word with its position in the dependency tree.

    ``index`` is 1-based; ``head`` is the index of the governing token,
    0 for the root. ``deprel`` is free text: parsers disagree on label
    inventories, and only "neg", "aux" and "cop" are interpreted
    downstream. ``fine_tag`` follows the Penn tagset (VBD, VBZ, MD, ...)
    because conjugation keys on those distinctions.
    """

    index: int
    surface: str
    lemma: str
    coarse_pos: Pos
    fine_tag: str
    head: int
    deprel: str
    space_after: bool | None = None

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if self.head < 0:
            raise ValueError(f"token head must be >= 0, got {self.head}")
        if self.head == self.index:
            raise ValueError(f"token {self.index} cannot be its own head")
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if self.space_after is None:
            # no spacing info supplied: words carry a following space,
            # punctuation and clitics do not
            attached = self.coarse_pos == Pos.PUNCT \
                or self.surface.startswith(("'", "’"))
            object.__setattr__(self, "space_after", not attached)


@dataclass(frozen=True)
class ParsedSentence:
    """An ordered, validated token list plus the raw sentence text."""

    tokens: tuple[Token, ...]
    text: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        n = len(self.tokens)
        for position, token in enumerate(self.tokens, start=1):
            if token.index != position:
                raise MalformedTreeError(
                    f"token indices must be 1..{n} without gaps; "
                    f"position {position} holds index {token.index}"
                )
            if token.head > n:
                raise MalformedTreeError(
                    f"token {token.index} points at nonexistent head {token.head}"
                )
        roots = [t.index for t in self.tokens if t.head == 0]
        if len(roots) != 1:
            raise MalformedTreeError(
                f"expected exactly one root, found {len(roots)}"
            )
        # Walking heads must reach the root within n steps from any token.
        for token in self.tokens:
            current, steps = token.head, 0
            while current != 0:
                if steps >= n:
                    raise MalformedTreeError(
                        f"head references form a cycle through token {token.index}"
                    )
                current = self.tokens[current - 1].head
                steps += 1

    def __len__(self) -> int:
        return len(self.tokens)


def children_of(sentence: ParsedSentence, index: int) -> list[Token]:
    """Tokens whose head is ``index``, in surface order."""
    if not 1 <= index <= len(sentence.tokens):
        raise ValueError(
            f"index {index} out of range 1..{len(sentence.tokens)}"
        )
    return [t for t in sentence.tokens if t.head == index]


def root_of(sentence: ParsedSentence) -> Token:
    """The unique token with head 0."""
    roots = [t for t in sentence.tokens if t.head == 0]
    if len(roots) != 1:
        raise MalformedTreeError(f"expected exactly one root, found {len(roots)}")
    return roots[0]


def join_surfaces(pieces: Iterable[tuple[str, bool]]) -> str:
    """Concatenate (surface, space_after) pairs; no trailing space."""
    parts: list[str] = []
    for surface, space_after in pieces:
        parts.append(surface)
        if space_after:
            parts.append(" ")
    return "".join(parts).rstrip(" ")


def detokenize(tokens: Sequence[Token]) -> str:
    """Rebuild sentence text from token surfaces and spacing flags.

    A single space follows each token whose ``space_after`` is true;
    clitics such as "n't" or "'m" attach to their host because the host
    carries ``space_after=False``.
    """
    return join_surfaces((t.surface, t.space_after) for t in tokens)
