"""CoNLL-U reading and writing.

Ten tab-separated columns, blank-line sentence separation, "#" comments,
"_" for unset fields. Multiword range rows ("3-4") are skipped because
the negator operates on syntactic words; empty-node rows ("5.1") are
rejected. Only SpaceAfter=No is read from MISC.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import TextIO

from .core import ParsedSentence, Pos, Token, detokenize
from .errors import ConlluParseError, MalformedTreeError

_COLUMNS = 10

_UPOS_TO_POS = {pos.value: pos for pos in Pos if pos != Pos.OTHER}


@dataclass
class ConlluDocument:
    sentences: list[ParsedSentence] = field(default_factory=list)
    comments: list[list[str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.comments) != len(self.sentences):
            raise ValueError("one comment list per sentence required")


def _parse_row(line: str, line_no: int, expected_index: int) -> Token | None:
    columns = line.split("\t")
    if len(columns) != _COLUMNS:
        raise ConlluParseError(
            f"expected {_COLUMNS} tab-separated columns, got {len(columns)}",
            line=line_no,
        )
    raw_id, form, lemma, upos, xpos, _feats, head, deprel, _deps, misc = columns
    if "-" in raw_id:
        return None  # multiword range row; component words follow
    if "." in raw_id:
        raise ConlluParseError(
            f"empty-node row {raw_id!r} is not supported", line=line_no
        )
    try:
        index = int(raw_id)
    except ValueError:
        raise ConlluParseError(f"non-numeric ID {raw_id!r}", line=line_no) from None
    if index != expected_index:
        raise ConlluParseError(
            f"token ID {index} out of order, expected {expected_index}",
            line=line_no,
        )
    try:
        head_index = int(head)
    except ValueError:
        raise ConlluParseError(f"non-numeric HEAD {head!r}", line=line_no) from None
    space_after = "SpaceAfter=No" not in misc.split("|")
    try:
        return Token(
            index=index,
            surface=form,
            lemma="" if lemma == "_" else lemma,
            coarse_pos=_UPOS_TO_POS.get(upos, Pos.OTHER),
            fine_tag="" if xpos == "_" else xpos,
            head=head_index,
            deprel="" if deprel == "_" else deprel,
            space_after=space_after,
        )
    except ValueError as exc:
        raise ConlluParseError(str(exc), line=line_no) from None


def _finish_sentence(tokens: list[Token], comments: list[str],
                     start_line: int) -> ParsedSentence:
    text = None
    for comment in comments:
        body = comment[1:].strip()
        if body.startswith("text ="):
            text = body[len("text ="):].strip()
            break
    try:
        return ParsedSentence(
            tokens=tuple(tokens),
            text=text if text is not None else detokenize(tokens),
        )
    except MalformedTreeError as exc:
        raise ConlluParseError(
            f"sentence starting here is not a valid tree: {exc}",
            line=start_line,
        ) from None


def parse_conllu(source: str | TextIO) -> ConlluDocument:
    """Parse CoNLL-U text into validated sentences."""
    if isinstance(source, str):
        source = io.StringIO(source)
    document = ConlluDocument()
    tokens: list[Token] = []
    comments: list[str] = []
    start_line = 1
    in_block = False
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            if in_block and tokens:
                document.sentences.append(
                    _finish_sentence(tokens, comments, start_line)
                )
                document.comments.append(comments)
            elif in_block:
                raise ConlluParseError("comment block without tokens", line=line_no)
            tokens, comments, in_block = [], [], False
            continue
        if not in_block:
            start_line = line_no
            in_block = True
        if line.startswith("#"):
            if tokens:
                raise ConlluParseError(
                    "comment lines must precede token rows", line=line_no
                )
            comments.append(line)
            continue
        token = _parse_row(line, line_no, expected_index=len(tokens) + 1)
        if token is not None:
            tokens.append(token)
    if in_block and tokens:
        document.sentences.append(_finish_sentence(tokens, comments, start_line))
        document.comments.append(comments)
    elif in_block:
        raise ConlluParseError("comment block without tokens", line=start_line)
    return document


def _unset(value: str) -> str:
    return value if value else "_"


def emit_conllu(document: ConlluDocument) -> str:
    """Serialize a document; parse_conllu(emit_conllu(d)) == d."""
    blocks: list[str] = []
    for sentence, comments in zip(document.sentences, document.comments):
        lines = list(comments)
        for token in sentence.tokens:
            upos = "X" if token.coarse_pos == Pos.OTHER else token.coarse_pos.value
            lines.append("\t".join((
                str(token.index),
                token.surface,
                _unset(token.lemma),
                upos,
                _unset(token.fine_tag),
                "_",
                str(token.head),
                _unset(token.deprel),
                "_",
                "_" if token.space_after else "SpaceAfter=No",
            )))
        blocks.append("\n".join(lines) + "\n\n")
    return "".join(blocks)
