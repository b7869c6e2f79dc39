"""English verb morphology: lemmatization, inflection, do-support, contractions.

Backed by TSV lexicons so the irregular tables can grow without code
changes. Unknown verbs fall back to regular orthographic rules rather
than raising: a dataset build must not abort on a rare verb, and the
worst case is an unnatural but label-correct sentence.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

from .core import MorphTarget, Number, Person, Tense, VerbForm
from .resources import read_tsv

VOWELS = "aeiou"

# be is kept out of the irregular table: it is the only English verb whose
# past tense inflects for number, so it gets an explicit form map.
BE_FORMS = {
    (Tense.PRESENT, Person.FIRST, Number.SINGULAR): "am",
    (Tense.PRESENT, Person.SECOND, Number.SINGULAR): "are",
    (Tense.PRESENT, Person.THIRD, Number.SINGULAR): "is",
    (Tense.PRESENT, Person.FIRST, Number.PLURAL): "are",
    (Tense.PRESENT, Person.SECOND, Number.PLURAL): "are",
    (Tense.PRESENT, Person.THIRD, Number.PLURAL): "are",
    (Tense.PAST, Person.FIRST, Number.SINGULAR): "was",
    (Tense.PAST, Person.SECOND, Number.SINGULAR): "were",
    (Tense.PAST, Person.THIRD, Number.SINGULAR): "was",
    (Tense.PAST, Person.FIRST, Number.PLURAL): "were",
    (Tense.PAST, Person.SECOND, Number.PLURAL): "were",
    (Tense.PAST, Person.THIRD, Number.PLURAL): "were",
}

BE_LEMMA_FORMS = ("be", "am", "is", "are", "was", "were", "been", "being")


@dataclass(frozen=True)
class IrregularForms:
    past: str
    third_singular: str
    past_participle: str
    gerund: str


@dataclass(frozen=True)
class VerbLexicon:
    """Irregular verb table plus the explicit form map for "be"."""

    irregulars: dict[str, IrregularForms]
    be_forms: dict[tuple[Tense, Person, Number], str]

    def __post_init__(self) -> None:
        index: dict[str, str] = {form: "be" for form in BE_LEMMA_FORMS}
        for lemma, forms in self.irregulars.items():
            for form in (lemma, forms.past, forms.third_singular,
                         forms.past_participle, forms.gerund):
                index.setdefault(form, lemma)
        object.__setattr__(self, "_reverse", index)

    def lemma_of(self, form: str) -> str | None:
        return self._reverse.get(form.lower())  # type: ignore[attr-defined]


@lru_cache(maxsize=None)
def _load_lexicon(directory: str | None) -> VerbLexicon:
    irregulars = {}
    for row in read_tsv("irregular_verbs.tsv", directory):
        lemma, past, third, participle, gerund = row
        irregulars[lemma] = IrregularForms(past, third, participle, gerund)
    return VerbLexicon(irregulars=irregulars, be_forms=dict(BE_FORMS))


def default_verb_lexicon(directory: str | os.PathLike | None = None) -> VerbLexicon:
    return _load_lexicon(str(directory) if directory is not None else None)


@lru_cache(maxsize=None)
def _known_lemmas(directory: str | None) -> frozenset[str]:
    lexicon = _load_lexicon(directory)
    lemmas = set(lexicon.irregulars)
    lemmas.add("be")
    for row in read_tsv("verbs.tsv", directory):
        lemmas.add(row[0])
    return frozenset(lemmas)


def _strip_candidates(form: str) -> list[str]:
    """Possible stems for a regularly inflected form, best guess first."""
    candidates: list[str] = []

    def _stem_variants(stem: str) -> list[str]:
        variants = [stem]
        # undo consonant doubling: stopp -> stop
        if (len(stem) >= 3 and stem[-1] == stem[-2]
                and stem[-1] not in VOWELS + "lsz"):
            variants.append(stem[:-1])
        # restore dropped e: danc -> dance, chang -> change
        if stem and stem[-1] not in VOWELS:
            variants.append(stem + "e")
        return variants

    if form.endswith("ied") and len(form) > 4:
        candidates.append(form[:-3] + "y")
    if form.endswith("ed") and len(form) > 3:
        candidates.extend(_stem_variants(form[:-2]))
        candidates.append(form[:-1])  # danced -> dance via -d
    if form.endswith("ying") and len(form) > 5:
        candidates.append(form[:-4] + "ie")  # lying -> lie
    if form.endswith("ing") and len(form) > 4:
        candidates.extend(_stem_variants(form[:-3]))
    if form.endswith("ies") and len(form) > 4:
        candidates.append(form[:-3] + "y")
    if form.endswith("es") and len(form) > 3:
        candidates.append(form[:-2])
    if form.endswith("s") and not form.endswith("ss") and len(form) > 2:
        candidates.append(form[:-1])
    return candidates


def lemmatize_verb(form: str, lexicon: VerbLexicon | None = None) -> str:
    """Base form of a verb; unknown forms come back unchanged."""
    lexicon = lexicon or default_verb_lexicon()
    word = form.lower()
    hit = lexicon.lemma_of(word)
    if hit is not None:
        return hit
    known = _known_lemmas(None)
    candidates = _strip_candidates(word)
    for candidate in candidates:
        if candidate in known:
            return candidate
    if candidates:
        return candidates[0]
    return word


def _regular_past(lemma: str) -> str:
    if lemma.endswith("e"):
        return lemma + "d"
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in VOWELS:
        return lemma[:-1] + "ied"
    if _should_double(lemma):
        return lemma + lemma[-1] + "ed"
    return lemma + "ed"


def _regular_third_singular(lemma: str) -> str:
    if lemma.endswith(("s", "x", "z", "ch", "sh", "o")):
        return lemma + "es"
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in VOWELS:
        return lemma[:-1] + "ies"
    return lemma + "s"


def _regular_gerund(lemma: str) -> str:
    if lemma.endswith("ie"):
        return lemma[:-2] + "ying"
    if lemma.endswith("e") and not lemma.endswith(("ee", "oe", "ye")):
        return lemma[:-1] + "ing"
    if _should_double(lemma):
        return lemma + lemma[-1] + "ing"
    return lemma + "ing"


def _should_double(lemma: str) -> bool:
    """CVC doubling, applied only to single-vowel-group stems."""
    if len(lemma) < 3:
        return False
    if lemma[-1] in VOWELS + "wxy" or lemma[-2] not in VOWELS:
        return False
    if lemma[-3] in VOWELS:
        return False
    groups, in_group = 0, False
    for char in lemma:
        if char in VOWELS:
            if not in_group:
                groups += 1
            in_group = True
        else:
            in_group = False
    return groups == 1


def inflect_verb(lemma: str, target: MorphTarget,
                 lexicon: VerbLexicon | None = None) -> str:
    """Conjugate a lemma to the given target form."""
    lexicon = lexicon or default_verb_lexicon()
    word = lemma.lower()

    if word == "be":
        if target.verb_form == VerbForm.BARE_INFINITIVE:
            return "be"
        if target.verb_form == VerbForm.PAST_PARTICIPLE:
            return "been"
        if target.verb_form == VerbForm.GERUND:
            return "being"
        return lexicon.be_forms[(target.tense, target.person, target.number)]

    irregular = lexicon.irregulars.get(word)
    if target.verb_form == VerbForm.BARE_INFINITIVE:
        return word
    if target.verb_form == VerbForm.PAST_PARTICIPLE:
        return irregular.past_participle if irregular else _regular_past(word)
    if target.verb_form == VerbForm.GERUND:
        return irregular.gerund if irregular else _regular_gerund(word)
    # finite
    if target.tense == Tense.PAST:
        return irregular.past if irregular else _regular_past(word)
    if target.person == Person.THIRD and target.number == Number.SINGULAR:
        return irregular.third_singular if irregular else _regular_third_singular(word)
    return word


def conjugate_do(target: MorphTarget) -> str:
    """The do-support form matching a conjugation target."""
    if target.tense == Tense.PAST:
        return "did"
    if target.person == Person.THIRD and target.number == Number.SINGULAR:
        return "does"
    return "do"


@dataclass(frozen=True)
class ContractionTable:
    """Negative contractions, keyed by auxiliary surface, plus the inverse."""

    entries: dict[str, str]
    reverse: dict[str, str]


@lru_cache(maxsize=None)
def _load_contractions(directory: str | None) -> ContractionTable:
    entries = {}
    for row in read_tsv("contractions.tsv", directory):
        aux, contracted = row
        entries[aux] = contracted
    reverse = {contracted: aux for aux, contracted in entries.items()}
    return ContractionTable(entries=entries, reverse=reverse)


def default_contraction_table(directory: str | os.PathLike | None = None) -> ContractionTable:
    return _load_contractions(str(directory) if directory is not None else None)


def _match_case(model: str, word: str) -> str:
    if model[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def contract_negation(aux_surface: str,
                      table: ContractionTable | None = None) -> str | None:
    """Contracted negative of an auxiliary, or None when no standard
    contraction exists (notably "am")."""
    table = table or default_contraction_table()
    contracted = table.entries.get(aux_surface.lower())
    if contracted is None:
        return None
    return _match_case(aux_surface, contracted)


def expand_negative_contraction(contracted: str,
                                table: ContractionTable | None = None) -> str | None:
    """Auxiliary hiding inside a negative contraction: won't -> will."""
    table = table or default_contraction_table()
    full = table.reverse.get(contracted.lower())
    if full is None:
        return None
    return _match_case(contracted, full)
