"""Built-in lightweight English analyzer.

Produces a flat dependency tree good enough for the five negation
branches: the main verb (or final auxiliary) is the root, earlier
auxiliaries attach to it as "aux", negation cues attach to the nearest
preceding auxiliary as "neg", and everything else hangs off the root.
Coverage is deliberately limited to single-clause declaratives; anything
unanalyzable raises instead of mis-parsing, which is the safer failure
mode for dataset construction.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from .core import (MorphTarget, Number, ParsedSentence, Person, Pos, Tense,
                   Token, VerbForm)
from .errors import ExternalParserError, UnsupportedSentenceError
from .morphology import default_verb_lexicon, lemmatize_verb
from .resources import read_tsv

NEGATION_CUES = frozenset({"not", "n't", "never"})

_PUNCT_CHARS = set(".,!?;:\"()[]{}…")
_DETERMINERS = frozenset({
    "the", "a", "an", "this", "that", "these", "those", "my", "your",
    "his", "her", "its", "our", "their", "some", "any", "every", "each",
})
_ADPOSITIONS = frozenset({
    "in", "on", "at", "of", "for", "with", "from", "by", "about", "into",
    "over", "after", "under", "between", "through", "during", "against",
    "without", "before", "around", "near",
})
_ADVERBS = frozenset({
    "very", "so", "too", "there", "here", "really", "quite", "now",
    "then", "often", "always", "again", "yet", "already", "just",
    "still", "also", "soon", "together", "away",
})
_WH_WORDS = frozenset({
    "what", "who", "whom", "whose", "which", "where", "when", "why", "how",
})
_CONJUNCTIONS = frozenset({"and", "or", "but"})

_TENSE = {"past": Tense.PAST, "present": Tense.PRESENT}
_PERSON = {"first": Person.FIRST, "second": Person.SECOND, "third": Person.THIRD}
_NUMBER = {"singular": Number.SINGULAR, "plural": Number.PLURAL}
_VERB_FORM = {
    "finite": VerbForm.FINITE,
    "bare_infinitive": VerbForm.BARE_INFINITIVE,
    "past_participle": VerbForm.PAST_PARTICIPLE,
    "gerund": VerbForm.GERUND,
}


@dataclass(frozen=True)
class AuxEntry:
    lemma: str
    fine_tag: str
    target: MorphTarget


@dataclass(frozen=True)
class Lexicons:
    """Closed-class word lists driving tokenization and tagging."""

    auxiliaries: dict[str, AuxEntry]
    negation_cues: frozenset[str]
    pronouns: dict[str, tuple[Person, Number]]
    contraction_splits: dict[str, tuple[str, ...]]
    known_verbs: frozenset[str]

    def __post_init__(self) -> None:
        for source, parts in self.contraction_splits.items():
            if "".join(parts) != source:
                raise ValueError(
                    f"contraction split {parts!r} does not reproduce {source!r}"
                )


@lru_cache(maxsize=None)
def _load_lexicons(directory: str | None) -> Lexicons:
    auxiliaries = {}
    for row in read_tsv("auxiliaries.tsv", directory):
        surface, lemma, tag, tense, person, number, form = row
        auxiliaries[surface] = AuxEntry(
            lemma=lemma,
            fine_tag=tag,
            target=MorphTarget(
                tense=_TENSE[tense],
                person=_PERSON[person],
                number=_NUMBER[number],
                verb_form=_VERB_FORM[form],
            ),
        )
    pronouns = {}
    for row in read_tsv("pronouns.tsv", directory):
        surface, person, number = row
        pronouns[surface] = (_PERSON[person], _NUMBER[number])
    splits = {}
    for row in read_tsv("contraction_splits.tsv", directory):
        source, parts = row
        splits[source] = tuple(parts.split(" "))
    known = frozenset(row[0] for row in read_tsv("verbs.tsv", directory))
    return Lexicons(
        auxiliaries=auxiliaries,
        negation_cues=NEGATION_CUES,
        pronouns=pronouns,
        contraction_splits=splits,
        known_verbs=known,
    )


def default_lexicons(directory: str | os.PathLike | None = None) -> Lexicons:
    return _load_lexicons(str(directory) if directory is not None else None)


def _normalize_apostrophes(word: str) -> str:
    return word.replace("’", "'")


def _split_chunk(chunk: str, lexicons: Lexicons) -> list[str]:
    """Split one whitespace-delimited chunk into surface tokens."""
    pieces: list[str] = []
    # peel leading punctuation
    start = 0
    while start < len(chunk) and chunk[start] in _PUNCT_CHARS:
        pieces.append(chunk[start])
        start += 1
    # peel trailing punctuation
    trailing: list[str] = []
    end = len(chunk)
    while end > start and chunk[end - 1] in _PUNCT_CHARS:
        trailing.append(chunk[end - 1])
        end -= 1
    core = chunk[start:end]
    if core:
        pieces.extend(_split_core(core, lexicons))
    pieces.extend(reversed(trailing))
    return pieces


def _split_core(core: str, lexicons: Lexicons) -> list[str]:
    lowered = _normalize_apostrophes(core.lower())
    split = lexicons.contraction_splits.get(lowered)
    if split is not None:
        out, offset = [], 0
        for part in split:
            out.append(core[offset:offset + len(part)])
            offset += len(part)
        return out
    if lowered.endswith("n't") and len(lowered) > 3:
        return [core[:-3], core[-3:]]
    if lowered.endswith("'s") and len(lowered) > 2:
        return [core[:-2], core[-2:]]
    return [core]


def tokenize(text: str, lexicons: Lexicons | None = None) -> list[tuple[str, bool]]:
    """Whitespace + punctuation + contraction tokenization.

    Returns (surface, space_after) pairs whose concatenation via the
    spacing flags reproduces the stripped input exactly.
    """
    lexicons = lexicons or default_lexicons()
    chunks = text.split()
    tokens: list[tuple[str, bool]] = []
    for chunk_pos, chunk in enumerate(chunks):
        parts = _split_chunk(chunk, lexicons)
        for part_pos, part in enumerate(parts):
            last_in_chunk = part_pos == len(parts) - 1
            last_overall = last_in_chunk and chunk_pos == len(chunks) - 1
            tokens.append((part, last_in_chunk and not last_overall))
    return tokens


def _looks_proper(surface: str, position: int) -> bool:
    return position > 0 and surface[:1].isupper()


def _analyze_verb(word: str, lexicons: Lexicons) -> tuple[str, str] | None:
    """(lemma, fine_tag) when the word is a recognizable verb form.

    Suffix stripping only fires when it lands on a known lemma, so
    plural nouns ("dollars") or -ed adjectives with no verbal stem
    ("hundred") never get promoted to verbs; unanalyzable sentences fail
    loudly later instead.
    """
    verb_lexicon = default_verb_lexicon()
    lemma = verb_lexicon.lemma_of(word)
    if lemma is None and word in lexicons.known_verbs:
        lemma = word
    if lemma is not None and lemma != "be":
        forms = verb_lexicon.irregulars.get(lemma)
        if forms is not None:
            if word == lemma:
                return lemma, "VB"
            if word == forms.past:
                return lemma, "VBD"
            if word == forms.third_singular:
                return lemma, "VBZ"
            if word == forms.gerund:
                return lemma, "VBG"
            if word == forms.past_participle:
                return lemma, "VBN"
            return lemma, "VB"
        return word, "VB"
    stems = _verb_stems(lexicons)
    if word.endswith("ed") and len(word) > 4:
        stem = lemmatize_verb(word)
        if stem != word and stem in stems:
            return stem, "VBD"
    if word.endswith("ing") and len(word) > 5:
        stem = lemmatize_verb(word)
        if stem != word and stem in stems:
            return stem, "VBG"
    if word.endswith("s") and not word.endswith("ss") and len(word) > 2:
        stem = lemmatize_verb(word)
        if stem != word and stem in stems:
            return stem, "VBZ"
    return None


def _verb_stems(lexicons: Lexicons) -> frozenset[str]:
    return lexicons.known_verbs | frozenset(default_verb_lexicon().irregulars)


def _participle_forms() -> frozenset[str]:
    lexicon = default_verb_lexicon()
    forms = {f.past_participle for f in lexicon.irregulars.values()}
    forms.add("been")
    return frozenset(forms)


def _is_possessive_s(position: int, surfaces: list[str],
                     lexicons: Lexicons) -> bool:
    """Distinguish "Ray's car" (possessive) from "Ray's running" (verbal).

    A pronominal host always reads as a contracted verb; a nominal host
    reads as a possessive unless a participle-like word follows.
    """
    if position == 0:
        return False
    host = _normalize_apostrophes(surfaces[position - 1].lower())
    if host in lexicons.pronouns or host in _WH_WORDS \
            or host in ("that", "there", "here"):
        return False
    for follower in surfaces[position + 1:position + 3]:
        word = _normalize_apostrophes(follower.lower())
        if word in _ADVERBS or word in lexicons.negation_cues:
            continue
        if word in lexicons.auxiliaries:
            return False  # "Ray's been ..."
        verb = _analyze_verb(word, lexicons)
        return verb is None or verb[1] not in ("VBN", "VBD", "VBG")
    return True


def _tag(surfaces: list[str], lexicons: Lexicons) -> list[tuple[str, Pos, str]]:
    """Assign (lemma, coarse, fine) per surface."""
    participles = _participle_forms()
    tagged: list[tuple[str, Pos, str]] = []
    for position, surface in enumerate(surfaces):
        word = _normalize_apostrophes(surface.lower())
        if all(c in _PUNCT_CHARS for c in word):
            tagged.append((surface, Pos.PUNCT, surface))
            continue
        if word in lexicons.negation_cues:
            lemma = "not" if word in ("not", "n't") else word
            coarse = Pos.PART if word in ("not", "n't") else Pos.ADV
            tagged.append((lemma, coarse, "RB"))
            continue
        if word == "'s" and _is_possessive_s(position, surfaces, lexicons):
            tagged.append((word, Pos.PART, "POS"))
            continue
        if word in lexicons.auxiliaries:
            entry = lexicons.auxiliaries[word]
            lemma = entry.lemma
            if word == "'s":
                # "'s" reads as "is" unless a lexicon past participle
                # follows (possibly across an adverb or cue): "he's been".
                for follower in surfaces[position + 1:position + 3]:
                    follower_word = _normalize_apostrophes(follower.lower())
                    if follower_word in _ADVERBS or follower_word in lexicons.negation_cues:
                        continue
                    if follower_word in participles:
                        lemma = "have"
                    break
            tagged.append((lemma, Pos.AUX, entry.fine_tag))
            continue
        if word in lexicons.pronouns:
            tagged.append((word, Pos.PRON, "PRP"))
            continue
        if word in _WH_WORDS:
            tagged.append((word, Pos.PRON, "WP"))
            continue
        if word in _DETERMINERS:
            tagged.append((word, Pos.DET, "DT"))
            continue
        if word == "to":
            tagged.append((word, Pos.PART, "TO"))
            continue
        if word in _ADPOSITIONS:
            tagged.append((word, Pos.ADP, "IN"))
            continue
        if word in _CONJUNCTIONS:
            tagged.append((word, Pos.OTHER, "CC"))
            continue
        if word.replace(".", "").replace(",", "").isdigit():
            tagged.append((word, Pos.NUM, "CD"))
            continue
        verb = _analyze_verb(word, lexicons)
        if verb is not None:
            lemma, tag = verb
            tagged.append((lemma, Pos.VERB, tag))
            continue
        if word in _ADVERBS or word.endswith("ly"):
            tagged.append((word, Pos.ADV, "RB"))
            continue
        if _looks_proper(surface, position):
            tagged.append((word, Pos.NOUN, "NNP"))
            continue
        tagged.append((word, Pos.NOUN, "NN"))
    return _demote_false_verbs(tagged)


_FINITE_TAGS = frozenset({"VB", "VBP", "VBZ", "VBD"})


def _demote_false_verbs(
    tagged: list[tuple[str, Pos, str]],
) -> list[tuple[str, Pos, str]]:
    """Retag verb/noun-ambiguous words that sit in noun positions.

    Covers "the answer" (determiner precedes), "work is fun" (an
    auxiliary follows a bare form), and finite forms after the clause's
    main finite verb ("I like answers"). Simple declaratives have one
    finite verb group, so later candidates are objects or subordinate
    material the negator must not target.
    """
    out = list(tagged)
    seen_finite_verb = False
    for i, (lemma, coarse, fine) in enumerate(tagged):
        if coarse != Pos.VERB:
            continue
        previous = out[i - 1] if i > 0 else None
        following = tagged[i + 1] if i + 1 < len(tagged) else None
        if previous is not None and previous[1] == Pos.DET:
            out[i] = (lemma, Pos.NOUN, "NN")
            continue
        if (following is not None and following[1] == Pos.AUX
                and fine in ("VB", "VBZ")):
            out[i] = (lemma, Pos.NOUN, "NN")
            continue
        if seen_finite_verb and fine in _FINITE_TAGS:
            out[i] = (lemma, Pos.NOUN, "NN")
            continue
        if fine in _FINITE_TAGS:
            seen_finite_verb = True
    return out


def analyze(text: str, lexicons: Lexicons | None = None) -> ParsedSentence:
    """Parse a single simple clause into a flat dependency tree."""
    if not text or not text.strip():
        raise ValueError("cannot analyze empty input")
    lexicons = lexicons or default_lexicons()
    stripped = text.strip()
    pairs = tokenize(stripped, lexicons)
    surfaces = [surface for surface, _ in pairs]
    tagged = _tag(surfaces, lexicons)

    finite_verbs = [
        i for i, (_, coarse, fine) in enumerate(tagged)
        if coarse == Pos.VERB and fine in _FINITE_TAGS
    ]
    aux_positions = [i for i, (_, coarse, _) in enumerate(tagged) if coarse == Pos.AUX]
    if finite_verbs:
        root_pos = finite_verbs[-1]
    elif aux_positions:
        # only participles/gerunds besides auxiliaries: the final
        # auxiliary carries the clause ("She is running.")
        root_pos = aux_positions[-1]
    else:
        raise UnsupportedSentenceError(f"no finite verb or auxiliary in {stripped!r}")

    tokens: list[Token] = []
    for i, ((surface, space_after), (lemma, coarse, fine)) in enumerate(zip(pairs, tagged)):
        if i == root_pos:
            head, deprel = 0, "root"
        elif coarse == Pos.AUX and i < root_pos:
            head, deprel = root_pos + 1, "aux"
        elif lemma in lexicons.negation_cues and coarse in (Pos.PART, Pos.ADV):
            preceding_aux = [p for p in aux_positions if p < i]
            head = (preceding_aux[-1] + 1) if preceding_aux else root_pos + 1
            deprel = "neg"
        else:
            head, deprel = root_pos + 1, "dep"
        tokens.append(Token(
            index=i + 1,
            surface=surface,
            lemma=lemma,
            coarse_pos=coarse,
            fine_tag=fine,
            head=head,
            deprel=deprel,
            space_after=space_after,
        ))
    return ParsedSentence(tokens=tuple(tokens), text=stripped)


def has_auxiliary(text: str, lexicons: Lexicons | None = None) -> bool:
    """True when any token (after contraction splitting) is an auxiliary."""
    lexicons = lexicons or default_lexicons()
    for surface, _ in tokenize(text, lexicons):
        if _normalize_apostrophes(surface.lower()) in lexicons.auxiliaries:
            return True
    return False


def conllu_fixture_parser(document) -> Callable[[str], ParsedSentence]:
    """Parser provider backed by a pre-parsed CoNLL-U document.

    Sentences are matched by their exact text, so the same input file
    can drive repeated negation runs without re-parsing.
    """
    index = {sentence.text: sentence for sentence in document.sentences}

    def parse(text: str) -> ParsedSentence:
        sentence = index.get(text.strip())
        if sentence is None:
            raise UnsupportedSentenceError(
                f"sentence not present in the CoNLL-U fixture: {text!r}"
            )
        return sentence

    return parse


class ExternalCommandParser:
    """Streams sentences to an external parser that emits CoNLL-U.

    The command receives one raw sentence per line on stdin and must
    reply with one CoNLL-U block (terminated by a blank line) per
    sentence on stdout.
    """

    def __init__(self, command: str | list[str], timeout: float = 60.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self._process: subprocess.Popen | None = None
        self._lock = threading.Lock()

    def _ensure_started(self) -> subprocess.Popen:
        if self._process is None or self._process.poll() is not None:
            try:
                self._process = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    bufsize=1,
                )
            except OSError as exc:
                raise ExternalParserError(
                    f"could not start parser command {self.command!r}: {exc}"
                ) from exc
        return self._process

    def parse(self, text: str) -> ParsedSentence:
        from .conllu import parse_conllu

        sentence = " ".join(text.split())
        if not sentence:
            raise ValueError("cannot parse empty input")
        with self._lock:
            process = self._ensure_started()
            assert process.stdin is not None and process.stdout is not None
            try:
                process.stdin.write(sentence + "\n")
                process.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise ExternalParserError(f"parser process died: {exc}") from exc
            block: list[str] = []
            saw_content = False
            while True:
                line = process.stdout.readline()
                if not line:
                    raise ExternalParserError(
                        "parser process closed its output stream"
                    )
                if not line.strip():
                    if saw_content:
                        break
                    continue
                saw_content = True
                block.append(line)
        document = parse_conllu("".join(block) + "\n")
        if len(document.sentences) != 1:
            raise ExternalParserError(
                f"expected one parsed sentence, got {len(document.sentences)}"
            )
        return document.sentences[0]

    def close(self) -> None:
        if self._process is not None and self._process.poll() is None:
            try:
                if self._process.stdin is not None:
                    self._process.stdin.close()
            except OSError:
                pass
            try:
                self._process.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self._process.terminate()
        self._process = None

    def __enter__(self) -> "ExternalCommandParser":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
