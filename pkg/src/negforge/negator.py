"""Rule-based addition and deletion of verbal negation cues.

Five branches, selected from the dependency tree:

  1. negated, cue hangs off an auxiliary "do" that itself modifies a
     full verb: drop both "do" and the cue, re-inflect the verb to the
     conjugation "do" carried ("didn't know" -> "knew");
  2. negated, cue hangs off anything else: drop the cue alone,
     restoring the full auxiliary when the cue was clitic
     ("won't" -> "will");
  3. affirmative, root is a full verb with no auxiliary support: insert
     conjugated "do" plus the negation before it and reduce the root to
     its bare infinitive ("enjoyed" -> "did not enjoy");
  4. affirmative, root has an auxiliary or copula child: negate the
     first such child ("will be" -> "won't be");
  5. affirmative, root is itself an auxiliary without auxiliary
     children: negate the root ("'m" -> "'m not").

Only the root clause is touched; embedded clauses stay as they are.
Sentences matching no branch raise rather than guess, as do sentences
carrying more than one cue.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .core import (MorphTarget, Number, ParsedSentence, Person, Pos, Tense,
                   Token, VerbForm, join_surfaces, root_of)
from .errors import NegforgeError, UnsupportedStructureError
from .morphology import (conjugate_do, contract_negation,
                         default_verb_lexicon, expand_negative_contraction,
                         inflect_verb, lemmatize_verb)

CUE_LEMMAS = frozenset({"not", "n't", "never"})

BARE = MorphTarget(tense=Tense.PRESENT, verb_form=VerbForm.BARE_INFINITIVE)


@dataclass(frozen=True)
class NegatorOptions:
    """Output preferences; contracted forms ("won't") are the default."""

    prefer_contractions: bool = True


DEFAULT_OPTIONS = NegatorOptions()


@dataclass(frozen=True)
class NegationOutcome:
    """Result of one polarity flip: new text plus what changed."""

    text: str
    branch: int
    removed_cues: tuple[str, ...] = ()
    added_tokens: tuple[str, ...] = ()
    contracted: bool = False

    def __post_init__(self) -> None:
        if bool(self.removed_cues) == bool(self.added_tokens):
            raise ValueError(
                "exactly one of removed_cues/added_tokens must be non-empty"
            )
        if self.removed_cues and self.branch not in (1, 2):
            raise ValueError("cue removal is confined to branches 1 and 2")
        if self.added_tokens and self.branch not in (3, 4, 5):
            raise ValueError("cue insertion is confined to branches 3-5")


def is_negation_cue(token: Token) -> bool:
    """The "neg" label, or the UD-style advmod fallback for schemes
    without a dedicated negation relation."""
    if token.deprel == "neg":
        return True
    return token.deprel == "advmod" and token.lemma.lower() in CUE_LEMMAS


def is_negated(sentence: ParsedSentence) -> bool:
    return any(is_negation_cue(t) for t in sentence.tokens)


def _match_case(model: str, word: str) -> str:
    if model[:1].isupper() and word[:1].islower():
        return word[:1].upper() + word[1:]
    return word


def _morph_target_of(token: Token) -> MorphTarget:
    """Conjugation target carried by a finite verb or auxiliary token."""
    tag = token.fine_tag.upper()
    if tag == "VBD":
        return MorphTarget(Tense.PAST, Person.THIRD, Number.SINGULAR)
    if tag == "VBZ":
        return MorphTarget(Tense.PRESENT, Person.THIRD, Number.SINGULAR)
    if tag in ("VBP", "VB"):
        return MorphTarget(Tense.PRESENT, Person.FIRST, Number.SINGULAR)
    # no usable tag: recover the target from the surface form
    surface = token.surface.lower()
    lemma = (token.lemma or lemmatize_verb(surface)).lower()
    forms = default_verb_lexicon().irregulars.get(lemma)
    if forms is not None:
        if surface == forms.past:
            return MorphTarget(Tense.PAST, Person.THIRD, Number.SINGULAR)
        if surface == forms.third_singular:
            return MorphTarget(Tense.PRESENT, Person.THIRD, Number.SINGULAR)
    elif surface.endswith("ed"):
        return MorphTarget(Tense.PAST, Person.THIRD, Number.SINGULAR)
    elif surface.endswith("s") and surface != lemma:
        return MorphTarget(Tense.PRESENT, Person.THIRD, Number.SINGULAR)
    return MorphTarget(Tense.PRESENT, Person.FIRST, Number.SINGULAR)


class _Cells:
    """Mutable (surface, space_after) working copy of the token line."""

    def __init__(self, sentence: ParsedSentence):
        self.surfaces = [t.surface for t in sentence.tokens]
        self.spaces = [t.space_after for t in sentence.tokens]

    def delete(self, position: int) -> None:
        if position > 0:
            # the predecessor inherits the deleted token's spacing, so
            # "did n't know" collapses to "did know", not "didknow"
            self.spaces[position - 1] = self.spaces[position]
        del self.surfaces[position]
        del self.spaces[position]
        # deleting the sentence-initial token promotes its successor,
        # which needs a capital unless it already carries one
        if position == 0 and self.surfaces and self.surfaces[0][:1].islower():
            self.surfaces[0] = self.surfaces[0][:1].upper() + self.surfaces[0][1:]

    def insert_word_after(self, position: int, surface: str) -> None:
        self.surfaces.insert(position + 1, surface)
        self.spaces.insert(position + 1, self.spaces[position])
        self.spaces[position] = True

    def insert_clitic_after(self, position: int, stem: str, clitic: str) -> None:
        self.surfaces.insert(position + 1, clitic)
        self.spaces.insert(position + 1, self.spaces[position])
        self.surfaces[position] = stem
        self.spaces[position] = False

    def insert_words_before(self, position: int, words: list[tuple[str, bool]]) -> None:
        for offset, (surface, space_after) in enumerate(words):
            self.surfaces.insert(position + offset, surface)
            self.spaces.insert(position + offset, space_after)

    def text(self) -> str:
        return join_surfaces(zip(self.surfaces, self.spaces))


def _remove_negation(sentence: ParsedSentence, cue: Token) -> NegationOutcome:
    tokens = sentence.tokens
    cells = _Cells(sentence)
    host = tokens[cue.head - 1] if cue.head else None

    host_is_negated_do = (
        host is not None
        and host.coarse_pos == Pos.AUX
        and (host.lemma or lemmatize_verb(host.surface)).lower() == "do"
        and host.head != 0
        and tokens[host.head - 1].coarse_pos == Pos.VERB
    )
    if host_is_negated_do:
        assert host is not None
        main = tokens[host.head - 1]
        target = _morph_target_of(host)
        lemma = main.lemma or lemmatize_verb(main.surface)
        cells.surfaces[main.index - 1] = _match_case(
            main.surface, inflect_verb(lemma, target)
        )
        removed = sorted((host, cue), key=lambda t: t.index)
        for token in reversed(removed):
            cells.delete(token.index - 1)
        return NegationOutcome(
            text=cells.text(),
            branch=1,
            removed_cues=tuple(t.surface for t in removed),
        )

    # branch 2: strip the cue; a clitic leaves its host in contracted
    # shape ("wo"), so restore the full auxiliary
    if host is not None and cue.surface.lower().replace("’", "'") == "n't":
        full = expand_negative_contraction(host.surface + "n't")
        if full is not None:
            cells.surfaces[host.index - 1] = full
    cells.delete(cue.index - 1)
    return NegationOutcome(
        text=cells.text(),
        branch=2,
        removed_cues=(cue.surface,),
    )


def _negate_after(cells: _Cells, position: int, surface: str,
                  options: NegatorOptions) -> tuple[tuple[str, ...], bool]:
    """Place the negation right after the auxiliary at ``position``."""
    if options.prefer_contractions:
        contracted = contract_negation(surface)
        if contracted is not None:
            cells.insert_clitic_after(position, stem=contracted[:-3], clitic="n't")
            return ("n't",), True
    cells.insert_word_after(position, "not")
    return ("not",), False


def _add_negation(sentence: ParsedSentence,
                  options: NegatorOptions) -> NegationOutcome:
    tokens = sentence.tokens
    cells = _Cells(sentence)
    root = root_of(sentence)

    aux_children = [
        t for t in tokens
        if t.head == root.index
        and (t.deprel == "aux" or t.deprel.startswith("aux:") or t.deprel == "cop")
    ]
    if aux_children:
        first_aux = aux_children[0]
        added, contracted = _negate_after(
            cells, first_aux.index - 1, first_aux.surface, options
        )
        return NegationOutcome(
            text=cells.text(), branch=4,
            added_tokens=added, contracted=contracted,
        )

    if root.coarse_pos == Pos.AUX:
        added, contracted = _negate_after(
            cells, root.index - 1, root.surface, options
        )
        return NegationOutcome(
            text=cells.text(), branch=5,
            added_tokens=added, contracted=contracted,
        )

    if root.coarse_pos == Pos.VERB:
        target = _morph_target_of(root)
        do_form = conjugate_do(target)
        sentence_initial = root.index == 1
        if sentence_initial:
            do_form = _match_case(root.surface, do_form)
        lemma = root.lemma or lemmatize_verb(root.surface)
        bare = inflect_verb(lemma, BARE)
        if not sentence_initial:
            bare = _match_case(root.surface, bare)
        cells.surfaces[root.index - 1] = bare
        if options.prefer_contractions:
            contracted = contract_negation(do_form)
            assert contracted is not None  # do/does/did all contract
            cells.insert_words_before(
                root.index - 1, [(contracted[:-3], False), ("n't", True)]
            )
            return NegationOutcome(
                text=cells.text(), branch=3,
                added_tokens=(contracted[:-3], "n't"), contracted=True,
            )
        cells.insert_words_before(
            root.index - 1, [(do_form, True), ("not", True)]
        )
        return NegationOutcome(
            text=cells.text(), branch=3,
            added_tokens=(do_form, "not"), contracted=False,
        )

    raise UnsupportedStructureError(
        f"root {root.surface!r} is neither a verb nor an auxiliary and has "
        "no auxiliary child"
    )


def negate(sentence: ParsedSentence,
           options: NegatorOptions | None = None) -> NegationOutcome:
    """Flip the polarity of the sentence's root clause."""
    options = options or DEFAULT_OPTIONS
    cues = [t for t in sentence.tokens if is_negation_cue(t)]
    if len(cues) > 1:
        raise UnsupportedStructureError(
            f"multiple negation cues: {[t.surface for t in cues]}"
        )
    if cues:
        return _remove_negation(sentence, cues[0])
    return _add_negation(sentence, options)


ParserProvider = Callable[[str], ParsedSentence]


def negate_text(text: str, parser: str | ParserProvider = "builtin",
                options: NegatorOptions | None = None) -> NegationOutcome:
    """Parse then negate, labeling which stage any error came from."""
    if not text or not text.strip():
        raise ValueError("cannot negate empty input")
    if isinstance(parser, str):
        if parser != "builtin":
            raise ValueError(
                f"parser {parser!r} needs configuration; pass a callable instead"
            )
        from .parser import analyze

        parse = analyze
    else:
        parse = parser
    try:
        sentence = parse(text)
    except NegforgeError as exc:
        exc.stage = "parse"  # type: ignore[attr-defined]
        raise
    try:
        return negate(sentence, options)
    except NegforgeError as exc:
        exc.stage = "negate"  # type: ignore[attr-defined]
        raise
