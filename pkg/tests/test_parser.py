from __future__ import annotations

import pytest

from negforge.core import Pos, detokenize
from negforge.errors import UnsupportedSentenceError
from negforge.parser import (Lexicons, analyze, default_lexicons,
                             has_auxiliary, tokenize)

ROUND_TRIP_SENTENCES = [
    "I didn't know what to do.",
    "I have never been to Paris.",
    "I enjoyed it so much.",
    "I will be there.",
    "I'm very hungry.",
    "Ray Charles is legendary.",
    "He does not run.",
    "They cannot see a bird.",
    "She knows the answer.",
    "Work is fun.",
]


class TestTokenize:
    def test_contraction_split(self):
        surfaces = [s for s, _ in tokenize("I didn't know.")]
        assert surfaces == ["I", "did", "n't", "know", "."]

    def test_cannot_split(self):
        surfaces = [s for s, _ in tokenize("They cannot see.")]
        assert surfaces == ["They", "can", "not", "see", "."]

    def test_wont_split_keeps_surface(self):
        surfaces = [s for s, _ in tokenize("I won't go.")]
        assert surfaces == ["I", "wo", "n't", "go", "."]

    def test_splits_reproduce_input(self):
        for sentence in ROUND_TRIP_SENTENCES:
            pairs = tokenize(sentence)
            rebuilt = "".join(s + (" " if sp else "") for s, sp in pairs)
            assert rebuilt == sentence

    def test_split_table_concatenation_invariant(self):
        lexicons = default_lexicons()
        for source, parts in lexicons.contraction_splits.items():
            assert "".join(parts) == source

    def test_bad_split_rejected(self):
        lexicons = default_lexicons()
        with pytest.raises(ValueError):
            Lexicons(
                auxiliaries=lexicons.auxiliaries,
                negation_cues=lexicons.negation_cues,
                pronouns=lexicons.pronouns,
                contraction_splits={"won't": ("will", "n't")},
                known_verbs=lexicons.known_verbs,
            )


class TestAnalyze:
    def test_do_support_sentence_tree(self):
        s = analyze("I didn't know what to do.")
        surfaces = [t.surface for t in s.tokens]
        assert surfaces == ["I", "did", "n't", "know", "what", "to", "do", "."]
        know = s.tokens[3]
        assert know.head == 0
        did = s.tokens[1]
        assert did.deprel == "aux" and did.head == know.index
        cue = s.tokens[2]
        assert cue.deprel == "neg" and cue.head == did.index

    def test_modal_sentence_tree(self):
        s = analyze("I will be there.")
        be = s.tokens[2]
        assert be.surface == "be" and be.head == 0
        will = s.tokens[1]
        assert will.deprel == "aux" and will.head == be.index
        assert not any(t.deprel == "neg" for t in s.tokens)

    def test_never_attaches_to_preceding_auxiliary(self):
        s = analyze("I have never been to Paris.")
        never = next(t for t in s.tokens if t.surface == "never")
        have = next(t for t in s.tokens if t.surface == "have")
        assert never.deprel == "neg"
        assert never.head == have.index

    def test_no_verb_errors(self):
        with pytest.raises(UnsupportedSentenceError):
            analyze("Wow !")

    def test_empty_input_errors(self):
        with pytest.raises(ValueError):
            analyze("")
        with pytest.raises(ValueError):
            analyze("   ")

    def test_round_trip_detokenization(self):
        for sentence in ROUND_TRIP_SENTENCES:
            parsed = analyze(sentence)
            assert detokenize(parsed.tokens) == sentence
            assert parsed.text == sentence

    def test_every_cue_carries_neg_deprel(self):
        for sentence in ("I didn't know.", "He is not here.",
                         "I have never been to Paris.", "They cannot see."):
            parsed = analyze(sentence)
            for token in parsed.tokens:
                if token.lemma in ("not", "never"):
                    assert token.deprel == "neg", (sentence, token)

    def test_possessive_s_not_auxiliary(self):
        s = analyze("Ray's car is red.")
        apostrophe_s = s.tokens[1]
        assert apostrophe_s.surface == "'s"
        assert apostrophe_s.coarse_pos == Pos.PART
        root = next(t for t in s.tokens if t.head == 0)
        assert root.surface == "is"

    def test_verbal_s_after_pronoun(self):
        s = analyze("He's been there.")
        apostrophe_s = s.tokens[1]
        assert apostrophe_s.coarse_pos == Pos.AUX
        assert apostrophe_s.lemma == "have"

    def test_s_defaults_to_be(self):
        s = analyze("She's determined.")
        assert s.tokens[1].lemma == "be"


class TestHasAuxiliary:
    def test_clitic_hit(self):
        assert has_auxiliary("I'm very hungry.")

    def test_plain_verb_miss(self):
        assert not has_auxiliary("Dogs bark.")

    def test_multiple_hits(self):
        assert has_auxiliary("He has never been there.")


class TestConlluFixtureParser:
    def test_lookup_by_text(self):
        from negforge.conllu import parse_conllu
        from negforge.parser import conllu_fixture_parser

        block = (
            "# text = I will be there.\n"
            "1\tI\ti\tPRON\tPRP\t_\t3\tnsubj\t_\t_\n"
            "2\twill\twill\tAUX\tMD\t_\t3\taux\t_\t_\n"
            "3\tbe\tbe\tAUX\tVB\t_\t0\troot\t_\t_\n"
            "4\tthere\tthere\tADV\tRB\t_\t3\tadvmod\t_\tSpaceAfter=No\n"
            "5\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\tSpaceAfter=No\n\n"
        )
        parse = conllu_fixture_parser(parse_conllu(block))
        sentence = parse("I will be there.")
        assert sentence.tokens[2].surface == "be"
        with pytest.raises(UnsupportedSentenceError):
            parse("Unknown sentence.")

    def test_drives_negate_text(self):
        from negforge.conllu import parse_conllu
        from negforge.negator import negate_text
        from negforge.parser import conllu_fixture_parser

        block = (
            "# text = I will be there.\n"
            "1\tI\ti\tPRON\tPRP\t_\t3\tnsubj\t_\t_\n"
            "2\twill\twill\tAUX\tMD\t_\t3\taux\t_\t_\n"
            "3\tbe\tbe\tAUX\tVB\t_\t0\troot\t_\t_\n"
            "4\tthere\tthere\tADV\tRB\t_\t3\tadvmod\t_\tSpaceAfter=No\n"
            "5\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\tSpaceAfter=No\n\n"
        )
        parse = conllu_fixture_parser(parse_conllu(block))
        assert negate_text("I will be there.", parser=parse).text \
            == "I won't be there."
