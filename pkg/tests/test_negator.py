from __future__ import annotations

import itertools

import pytest

from negforge.conllu import parse_conllu
from negforge.errors import (UnsupportedSentenceError,
                             UnsupportedStructureError)
from negforge.morphology import default_contraction_table
from negforge.negator import (NegationOutcome, NegatorOptions, is_negated,
                              negate, negate_text)
from negforge.parser import analyze

CONTRACT = NegatorOptions(prefer_contractions=True)
PLAIN = NegatorOptions(prefer_contractions=False)

GOLDEN_ROWS = [
    ("I didn't know what to do.", "I knew what to do.", 1, CONTRACT),
    ("I have never been to Paris.", "I have been to Paris.", 2, CONTRACT),
    ("I enjoyed it so much.", "I did not enjoy it so much.", 3, PLAIN),
    ("I will be there.", "I won't be there.", 4, CONTRACT),
    ("I'm very hungry.", "I'm not very hungry.", 5, CONTRACT),
]


def expand_contractions(text: str) -> str:
    """Test-side normalizer: rewrite clitic negations as separate words."""
    table = default_contraction_table()
    words = []
    for word in text.split():
        trailing = ""
        while word and word[-1] in ".,!?;:":
            trailing = word[-1] + trailing
            word = word[:-1]
        lowered = word.lower()
        if lowered in table.reverse:
            full = table.reverse[lowered]
            if word[:1].isupper():
                full = full[0].upper() + full[1:]
            expanded = [full, "not"]
        elif lowered == "cannot":
            expanded = [word[:3], "not"]
        else:
            expanded = [word]
        if trailing:
            expanded[-1] += trailing
        words.extend(expanded)
    return " ".join(words)


class TestGoldenRows:
    @pytest.mark.parametrize("text, expected, branch, options", GOLDEN_ROWS)
    def test_row(self, text, expected, branch, options):
        outcome = negate_text(text, options=options)
        assert outcome.text == expected
        assert outcome.branch == branch

    def test_branch_one_removes_do_and_cue(self):
        outcome = negate_text("I didn't know what to do.")
        assert outcome.removed_cues == ("did", "n't")
        assert outcome.added_tokens == ()

    def test_branch_two_removes_cue_only(self):
        outcome = negate_text("I have never been to Paris.")
        assert outcome.removed_cues == ("never",)

    def test_branch_four_contraction(self):
        outcome = negate_text("I will be there.", options=CONTRACT)
        assert outcome.added_tokens == ("n't",)
        assert outcome.contracted

    def test_branch_five_uncontractable_falls_back_to_not(self):
        outcome = negate_text("I'm very hungry.", options=CONTRACT)
        assert outcome.added_tokens == ("not",)
        assert not outcome.contracted


class TestMore:
    def test_copular_contraction(self):
        assert negate_text("Ray Charles is legendary.").text \
            == "Ray Charles isn't legendary."

    def test_do_support_reinflects_third_singular(self):
        outcome = negate_text("He does not run.")
        assert outcome.text == "He runs."
        assert outcome.branch == 1

    def test_clitic_removal_restores_full_auxiliary(self):
        outcome = negate_text("I won't be there.")
        assert outcome.text == "I will be there."
        assert outcome.branch == 2

    def test_branch_three_contraction(self):
        outcome = negate_text("I enjoyed it so much.", options=CONTRACT)
        assert outcome.text == "I didn't enjoy it so much."
        assert outcome.added_tokens == ("did", "n't")
        assert outcome.contracted

    def test_empty_input(self):
        with pytest.raises(ValueError):
            negate_text("")

    def test_unsupported_sentence_labeled_parse_stage(self):
        with pytest.raises(UnsupportedSentenceError) as info:
            negate_text("Wow !")
        assert getattr(info.value, "stage", None) == "parse"

    def test_two_cues_rejected(self):
        sentence = analyze("I will not never be there.")
        with pytest.raises(UnsupportedStructureError):
            negate(sentence)

    def test_deterministic(self):
        results = {negate_text("I will be there.").text for _ in range(5)}
        assert len(results) == 1


class TestIsNegated:
    def test_negated(self):
        assert is_negated(analyze("I didn't know what to do."))

    def test_affirmative(self):
        assert not is_negated(analyze("I will be there."))

    def test_never_counts(self):
        assert is_negated(analyze("I have never been to Paris."))


class TestConlluInput:
    UD_COPULA = (
        "1\tRay\tRay\tPROPN\tNNP\t_\t4\tnsubj\t_\t_\n"
        "2\tCharles\tCharles\tPROPN\tNNP\t_\t1\tflat\t_\t_\n"
        "3\tis\tbe\tAUX\tVBZ\t_\t4\tcop\t_\t_\n"
        "4\tlegendary\tlegendary\tADJ\tJJ\t_\t0\troot\t_\tSpaceAfter=No\n"
        "5\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\tSpaceAfter=No\n\n"
    )
    UD_NEGATED_ADVMOD = (
        "1\tRay\tRay\tPROPN\tNNP\t_\t5\tnsubj\t_\t_\n"
        "2\tCharles\tCharles\tPROPN\tNNP\t_\t1\tflat\t_\t_\n"
        "3\tis\tbe\tAUX\tVBZ\t_\t5\tcop\t_\t_\n"
        "4\tnot\tnot\tPART\tRB\t_\t5\tadvmod\t_\t_\n"
        "5\tlegendary\tlegendary\tADJ\tJJ\t_\t0\troot\t_\tSpaceAfter=No\n"
        "6\t.\t.\tPUNCT\t.\t_\t5\tpunct\t_\tSpaceAfter=No\n\n"
    )

    def test_copular_root_negates_via_cop_child(self):
        sentence = parse_conllu(self.UD_COPULA).sentences[0]
        outcome = negate(sentence, CONTRACT)
        assert outcome.text == "Ray Charles isn't legendary."
        assert outcome.branch == 4

    def test_advmod_not_detected_and_removed(self):
        sentence = parse_conllu(self.UD_NEGATED_ADVMOD).sentences[0]
        assert is_negated(sentence)
        outcome = negate(sentence)
        assert outcome.text == "Ray Charles is legendary."
        assert outcome.branch == 2


SUBJECTS = [("I", "I"), ("You", "you"), ("He", "he"), ("She", "she"),
            ("We", "we"), ("They", "they")]
MODALS = [None, "will", "would", "can", "could", "should", "must"]
VERBS = ["know", "take", "give", "see", "find", "tell", "keep", "hold",
         "bring", "leave"]
OBJECTS = ["the answer", "a book"]


def generated_sentences():
    from negforge.core import MorphTarget, Number, Person, Tense
    from negforge.morphology import inflect_verb

    for (subject, pronoun), modal, verb, obj in itertools.product(
            SUBJECTS, MODALS, VERBS, OBJECTS):
        if modal is None:
            third = pronoun in ("he", "she", "it")
            form = inflect_verb(verb, MorphTarget(
                Tense.PRESENT,
                Person.THIRD if third else Person.FIRST,
                Number.SINGULAR if third else Number.PLURAL,
            ))
            yield f"{subject} {form} {obj}."
        else:
            yield f"{subject} {modal} {verb} {obj}."


class TestProperties:
    def test_polarity_toggle_and_involution(self):
        sentences = list(generated_sentences())
        assert len(sentences) >= 200
        for text in sentences:
            parsed = analyze(text)
            assert not is_negated(parsed), text
            negated = negate(parsed, PLAIN)
            reparsed = analyze(negated.text)
            assert is_negated(reparsed), (text, negated.text)
            back = negate(reparsed, PLAIN)
            assert expand_contractions(back.text) == expand_contractions(text), \
                (text, negated.text, back.text)

    def test_polarity_toggle_with_contractions(self):
        for text in list(generated_sentences())[::7]:
            outcome = negate(analyze(text), CONTRACT)
            assert is_negated(analyze(outcome.text)), (text, outcome.text)

    def test_token_conservation_without_contractions(self):
        for text in list(generated_sentences())[::13]:
            words = text.split()
            outcome = negate(analyze(text), PLAIN)
            new_words = outcome.text.split()
            added = len(outcome.added_tokens)
            assert 1 <= added <= 2
            assert len(new_words) == len(words) + added, (text, outcome.text)


class TestOutcomeInvariants:
    def test_rejects_both_sides_set(self):
        with pytest.raises(ValueError):
            NegationOutcome(text="x", branch=1,
                            removed_cues=("a",), added_tokens=("b",))

    def test_rejects_neither_side_set(self):
        with pytest.raises(ValueError):
            NegationOutcome(text="x", branch=1)

    def test_rejects_branch_side_mismatch(self):
        with pytest.raises(ValueError):
            NegationOutcome(text="x", branch=3, removed_cues=("a",))
        with pytest.raises(ValueError):
            NegationOutcome(text="x", branch=2, added_tokens=("a",))


class TestRobustness:
    def test_fuzzed_inputs_raise_only_contract_errors(self):
        # arbitrary word salad must either negate or fail with the
        # documented error types; nothing else may escape
        import random
        from negforge.errors import NegforgeError

        rng = random.Random(1234)
        vocabulary = [
            "the", "a", "dog", "dogs", "runs", "ran", "will", "is", "was",
            "not", "never", "n't", "happy", "quickly", "Paris", "on", "to",
            "it", "they", "book", "books", "answer", "work", "working",
            "known", "cannot", "won't", "didn't", ".", "!", "?", ",", "and",
        ]
        crashes = []
        for _ in range(2000):
            text = " ".join(rng.choices(vocabulary, k=rng.randint(1, 12)))
            try:
                negate_text(text)
            except (NegforgeError, ValueError):
                pass
            except Exception as exc:  # noqa: BLE001
                crashes.append((text, repr(exc)))
        assert not crashes, crashes[:5]

    def test_passive_aux_child_from_ud_parse(self):
        from negforge.conllu import parse_conllu

        block = (
            "1\tHe\the\tPRON\tPRP\t_\t3\tnsubj\t_\t_\n"
            "2\twas\tbe\tAUX\tVBD\t_\t3\taux:pass\t_\t_\n"
            "3\ttaken\ttake\tVERB\tVBN\t_\t0\troot\t_\tSpaceAfter=No\n"
            "4\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\tSpaceAfter=No\n\n"
        )
        sentence = parse_conllu(block).sentences[0]
        outcome = negate(sentence, CONTRACT)
        assert outcome.text == "He wasn't taken."
        assert outcome.branch == 4
