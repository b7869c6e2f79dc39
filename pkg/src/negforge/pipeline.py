"""Reconstruction of the CANNOT negation dataset and its WMT-merged splits.

Stages: source adapters read column-mapped TSV/JSONL records, per-source
filters drop noisy pairs, raw sentences are negated, paraphrases are
attached as meaning-preserving counterparts, swap augmentation doubles
the pair list, and negation data and WMT data are split 80:10:10
separately before the respective subsets are combined.

Negated pairs carry score 0 and paraphrase pairs score 1; WMT records
keep their human scores untouched (they can exceed [0, 1]).
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import NegforgeError
from .negator import NegatorOptions, negate_text
from .parser import has_auxiliary

log = logging.getLogger(__name__)


class Source(Enum):
    NAN_NLI = "nan_nli"
    WIKI_FACTCHECK = "wiki_factcheck"
    GLUE_DIAG = "glue_diag"
    SENTIMENT = "sentiment"
    WMT = "wmt"
    OTHER = "other"


NEGATION_SOURCES = frozenset({
    Source.NAN_NLI, Source.WIKI_FACTCHECK, Source.GLUE_DIAG, Source.SENTIMENT,
})


class Split(Enum):
    TRAIN = "train"
    DEV = "dev"
    TEST = "test"
    UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class SentencePair:
    """One dataset row: candidate scored against its reference."""

    reference: str
    candidate: str
    score: float
    source: Source = Source.OTHER
    split: Split = Split.UNASSIGNED

    def __post_init__(self) -> None:
        if not self.reference or not self.candidate:
            raise ValueError("reference and candidate must be non-empty")
        if self.source in NEGATION_SOURCES and self.score not in (0.0, 1.0):
            raise ValueError(
                f"negation-sourced pairs must score 0 or 1, got {self.score}"
            )


@dataclass(frozen=True)
class FilterConfig:
    """Thresholds from the source-filtering rules.

    Pairs are discarded when Jaccard similarity falls below
    ``min_jaccard`` or the word-length difference reaches
    ``max_length_diff_words + 1`` (the keep-threshold is stored to avoid
    off-by-one readings of "four or more words"). ``max_words`` and
    ``require_auxiliary`` gate raw sentences before negation; WMT
    records must score strictly above ``wmt_min_score_exclusive``.
    """

    min_jaccard: float = 0.55
    max_length_diff_words: int = 3
    max_words: int = 33
    require_auxiliary: bool = True
    wmt_min_score_exclusive: float = -1.0
    dedup_exact: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.min_jaccard <= 1.0:
            raise ValueError("min_jaccard must lie in [0, 1]")


def whitespace_tokenize(text: str) -> list[str]:
    """Split on whitespace runs; no lowercasing, no punctuation stripping."""
    return text.split()


def jaccard(a: Sequence[str], b: Sequence[str]) -> float:
    """|set(a) & set(b)| / |set(a) | set(b)|; two empty lists count as 1."""
    set_a, set_b = set(a), set(b)
    union = set_a | set_b
    if not union:
        return 1.0
    return len(set_a & set_b) / len(union)


def filter_pair(pair: SentencePair, cfg: FilterConfig | None = None) -> bool:
    """True when the pair survives the Jaccard and length-difference rules."""
    cfg = cfg or FilterConfig()
    ref_words = whitespace_tokenize(pair.reference)
    cand_words = whitespace_tokenize(pair.candidate)
    if jaccard(ref_words, cand_words) < cfg.min_jaccard:
        return False
    return abs(len(ref_words) - len(cand_words)) <= cfg.max_length_diff_words


@dataclass
class SourceReport:
    records_in: int = 0
    label_dropped: int = 0
    filter_dropped: int = 0
    gate_dropped: int = 0
    negator_failures: int = 0
    pairs: int = 0
    paraphrases_added: int = 0
    paraphrases_missing: int = 0
    excluded: bool = False


@dataclass
class BuildReport:
    """Machine-readable account of what each pipeline stage kept."""

    sources: dict[str, SourceReport] = field(default_factory=dict)
    negation_pairs_before_swap: int = 0
    negation_pairs_after_swap: int = 0
    dedup_removed: int = 0
    wmt_kept: int = 0
    wmt_rejected: int = 0
    split_sizes: dict[str, int] = field(default_factory=dict)
    wmt_fraction: float | None = None
    seed: int = 0

    def source(self, name: str) -> SourceReport:
        return self.sources.setdefault(name, SourceReport())

    def to_dict(self) -> dict:
        payload = dataclasses.asdict(self)
        return payload

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def build_negated_pairs(
    sentences: Iterable[str],
    cfg: FilterConfig | None = None,
    negate: Callable[[str], str] | None = None,
    source: Source = Source.SENTIMENT,
    report: SourceReport | None = None,
) -> list[SentencePair]:
    """Negate raw sentences into (sentence, negated, 0) pairs.

    Sentences failing the auxiliary/length gates are dropped; negator
    failures are logged and skipped so a batch build never aborts.
    """
    cfg = cfg or FilterConfig()
    if negate is None:
        negate = lambda text: negate_text(text).text  # noqa: E731
    pairs: list[SentencePair] = []
    for sentence in sentences:
        if report is not None:
            report.records_in += 1
        words = whitespace_tokenize(sentence)
        if not words:
            if report is not None:
                report.gate_dropped += 1
            continue
        if len(words) > cfg.max_words:
            if report is not None:
                report.gate_dropped += 1
            continue
        if cfg.require_auxiliary and not has_auxiliary(sentence):
            if report is not None:
                report.gate_dropped += 1
            continue
        try:
            negated = negate(sentence)
        except (NegforgeError, ValueError) as exc:
            log.info("negator skipped %r: %s", sentence, exc)
            if report is not None:
                report.negator_failures += 1
            continue
        pairs.append(SentencePair(
            reference=sentence, candidate=negated, score=0.0, source=source,
        ))
    if report is not None:
        report.pairs += len(pairs)
    return pairs


def attach_paraphrases(
    pairs: Sequence[SentencePair],
    paraphrases: dict[str, str],
    on_missing: str = "error",
    report: SourceReport | None = None,
) -> list[SentencePair]:
    """Append one (reference, paraphrase, 1) pair per distinct reference."""
    if on_missing not in ("error", "skip"):
        raise ValueError(f"unknown missing-paraphrase policy {on_missing!r}")
    out = list(pairs)
    seen: set[str] = set()
    for pair in pairs:
        if pair.reference in seen:
            continue
        seen.add(pair.reference)
        paraphrase = paraphrases.get(pair.reference)
        if paraphrase is None:
            if on_missing == "error":
                raise NegforgeError(
                    f"no paraphrase for reference {pair.reference!r}"
                )
            log.warning("no paraphrase for %r", pair.reference)
            if report is not None:
                report.paraphrases_missing += 1
            continue
        out.append(SentencePair(
            reference=pair.reference,
            candidate=paraphrase,
            score=1.0,
            source=pair.source,
        ))
        if report is not None:
            report.paraphrases_added += 1
    return out


def swap_augment(pairs: Sequence[SentencePair]) -> list[SentencePair]:
    """Input followed by every pair with reference/candidate exchanged."""
    swapped = [
        dataclasses.replace(p, reference=p.candidate, candidate=p.reference)
        for p in pairs
    ]
    return list(pairs) + swapped


def dedup_exact(pairs: Sequence[SentencePair]) -> tuple[list[SentencePair], int]:
    """Drop later pairs whose (reference, candidate) strings repeat."""
    seen: set[tuple[str, str]] = set()
    kept: list[SentencePair] = []
    for pair in pairs:
        key = (pair.reference, pair.candidate)
        if key in seen:
            continue
        seen.add(key)
        kept.append(pair)
    return kept, len(pairs) - len(kept)


def merge_wmt(
    records: Iterable[tuple[str, str, object]],
    cfg: FilterConfig | None = None,
    report: BuildReport | None = None,
) -> list[SentencePair]:
    """Keep human-scored records above the score floor, tagged as WMT.

    Scores pass through unclipped; records with non-numeric scores are
    rejected and counted rather than aborting the merge.
    """
    cfg = cfg or FilterConfig()
    kept: list[SentencePair] = []
    rejected = 0
    for reference, candidate, raw_score in records:
        try:
            score = float(raw_score)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            log.warning("non-numeric WMT score %r rejected", raw_score)
            rejected += 1
            continue
        if score > cfg.wmt_min_score_exclusive:
            kept.append(SentencePair(
                reference=reference, candidate=candidate,
                score=score, source=Source.WMT,
            ))
    if report is not None:
        report.wmt_kept += len(kept)
        report.wmt_rejected += rejected
    return kept


def split_dataset(
    pairs: Sequence[SentencePair],
    ratios: tuple[int, int, int] = (80, 10, 10),
    seed: int = 0,
) -> tuple[list[SentencePair], list[SentencePair], list[SentencePair]]:
    """Seeded shuffle then contiguous slicing into train/dev/test.

    Dev and test sizes are floored; the remainder goes to train, so the
    three outputs always partition the input.
    """
    if sum(ratios) != 100:
        raise ValueError(f"ratios must sum to 100, got {ratios}")
    shuffled = list(pairs)
    random.Random(seed).shuffle(shuffled)
    n = len(shuffled)
    n_dev = n * ratios[1] // 100
    n_test = n * ratios[2] // 100
    n_train = n - n_dev - n_test
    tagged = (
        [dataclasses.replace(p, split=Split.TRAIN) for p in shuffled[:n_train]],
        [dataclasses.replace(p, split=Split.DEV)
         for p in shuffled[n_train:n_train + n_dev]],
        [dataclasses.replace(p, split=Split.TEST)
         for p in shuffled[n_train + n_dev:]],
    )
    return tagged


@dataclass
class DatasetBundle:
    train: list[SentencePair]
    dev: list[SentencePair]
    test: list[SentencePair]


def _read_records(path: Path, fmt: str, name: str) -> list[dict]:
    if not path.exists():
        raise NegforgeError(f"source {name!r}: file not found: {path}")
    if fmt == "tsv":
        with open(path, encoding="utf-8", newline="") as handle:
            return list(csv.DictReader(handle, delimiter="\t"))
    if fmt == "jsonl":
        records = []
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records
    if fmt == "txt":
        with open(path, encoding="utf-8") as handle:
            return [{"sentence": line.strip()} for line in handle if line.strip()]
    raise NegforgeError(f"source {name!r}: unknown format {fmt!r}")


def _read_paraphrases(path: Path, name: str) -> dict[str, str]:
    if not path.exists():
        raise NegforgeError(f"source {name!r}: paraphrase file not found: {path}")
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle, delimiter="\t"):
            mapping[row["reference"]] = row["paraphrase"]
    return mapping


def _source_enum(name: str) -> Source:
    try:
        return Source(name)
    except ValueError:
        return Source.OTHER


def _load_config(config: str | Path | dict) -> tuple[dict, Path]:
    if isinstance(config, dict):
        return config, Path.cwd()
    path = Path(config)
    if not path.exists():
        raise NegforgeError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix in (".yaml", ".yml"):
        import yaml

        return yaml.safe_load(text), path.parent
    return json.loads(text), path.parent


def _filter_config(base: FilterConfig, overrides: dict | None) -> FilterConfig:
    if not overrides:
        return base
    return dataclasses.replace(base, **overrides)


def build_cannot_wmt(
    config: str | Path | dict,
    base_dir: str | Path | None = None,
) -> tuple[DatasetBundle, BuildReport]:
    """Run the whole pipeline from a declarative source description.

    The config lists sources (name, kind, path, format, column map,
    optional per-source filters and paraphrase file), global filter
    values, the split seed, and names of sources to exclude for
    ablation builds. Excluded sources contribute zero pairs and show up
    as such in the report.
    """
    cfg, config_dir = _load_config(config)
    root = Path(base_dir) if base_dir is not None else config_dir
    seed = int(cfg.get("seed", 0))
    exclude = set(cfg.get("exclude", []))
    base_filters = _filter_config(FilterConfig(), cfg.get("filters"))
    negator_options = NegatorOptions(
        prefer_contractions=bool(cfg.get("prefer_contractions", True))
    )

    report = BuildReport(seed=seed)
    negation_pairs: list[SentencePair] = []
    wmt_pairs: list[SentencePair] = []

    for source_cfg in cfg.get("sources", []):
        name = source_cfg["name"]
        source_report = report.source(name)
        if name in exclude:
            source_report.excluded = True
            continue
        kind = source_cfg["kind"]
        filters = _filter_config(base_filters, source_cfg.get("filters"))
        path = root / source_cfg["path"]
        fmt = source_cfg.get("format", "tsv")
        columns = source_cfg.get("columns", {})
        records = _read_records(path, fmt, name)
        source = _source_enum(source_cfg.get("source", name))

        if kind == "scored_pairs":
            source_report.records_in += len(records)
            triples = [
                (r[columns.get("reference", "reference")],
                 r[columns.get("candidate", "candidate")],
                 r[columns.get("score", "score")])
                for r in records
            ]
            kept = merge_wmt(triples, filters, report)
            wmt_pairs.extend(kept)
            source_report.pairs += len(kept)
            continue

        if kind == "negation_source":
            sentences = [r[columns.get("reference", "sentence")] for r in records]
            pairs = build_negated_pairs(
                sentences, filters,
                negate=lambda text: negate_text(text, options=negator_options).text,
                source=source, report=source_report,
            )
        elif kind in ("contradiction_pairs", "pair_source"):
            source_report.records_in += len(records)
            pairs = []
            label_column = columns.get("label", "label")
            wanted = source_cfg.get("contradiction_label", "contradiction")
            for record in records:
                if kind == "contradiction_pairs":
                    if record.get(label_column) != wanted:
                        source_report.label_dropped += 1
                        continue
                pair = SentencePair(
                    reference=record[columns.get("reference", "reference")],
                    candidate=record[columns.get("candidate", "candidate")],
                    score=0.0,
                    source=source,
                )
                if source_cfg.get("jaccard_filter", kind == "pair_source"):
                    if not filter_pair(pair, filters):
                        source_report.filter_dropped += 1
                        continue
                pairs.append(pair)
            source_report.pairs += len(pairs)
        else:
            raise NegforgeError(f"source {name!r}: unknown kind {kind!r}")

        paraphrase_file = source_cfg.get("paraphrases")
        if paraphrase_file:
            mapping = _read_paraphrases(root / paraphrase_file, name)
            pairs = attach_paraphrases(
                pairs, mapping,
                on_missing=source_cfg.get("on_missing_paraphrase", "error"),
                report=source_report,
            )
        negation_pairs.extend(pairs)

    report.negation_pairs_before_swap = len(negation_pairs)
    negation_pairs = swap_augment(negation_pairs)
    if bool(cfg.get("dedup_exact", base_filters.dedup_exact)):
        negation_pairs, removed = dedup_exact(negation_pairs)
        report.dedup_removed = removed
    report.negation_pairs_after_swap = len(negation_pairs)

    neg_train, neg_dev, neg_test = split_dataset(negation_pairs, seed=seed)
    wmt_train, wmt_dev, wmt_test = split_dataset(wmt_pairs, seed=seed)
    bundle = DatasetBundle(
        train=neg_train + wmt_train,
        dev=neg_dev + wmt_dev,
        test=neg_test + wmt_test,
    )
    report.split_sizes = {
        "train": len(bundle.train),
        "dev": len(bundle.dev),
        "test": len(bundle.test),
    }
    total = len(bundle.train) + len(bundle.dev) + len(bundle.test)
    if total:
        report.wmt_fraction = len(wmt_pairs) / total
    return bundle, report


PAIR_FIELDS = ("reference", "candidate", "score", "source", "split")


def write_pairs(pairs: Iterable[SentencePair], path: str | Path,
                delimiter: str = "\t") -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter=delimiter)
        writer.writerow(PAIR_FIELDS)
        for pair in pairs:
            writer.writerow((
                pair.reference, pair.candidate, format(pair.score, "g"),
                pair.source.value, pair.split.value,
            ))


def read_pairs(path: str | Path, delimiter: str = "\t") -> list[SentencePair]:
    pairs = []
    with open(path, encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle, delimiter=delimiter):
            pairs.append(SentencePair(
                reference=row["reference"],
                candidate=row["candidate"],
                score=float(row["score"]),
                source=_source_enum(row.get("source", "other")),
                split=Split(row.get("split", "unassigned")),
            ))
    return pairs


def write_bundle(bundle: DatasetBundle, out_dir: str | Path,
                 delimiter: str = "\t") -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    extension = "csv" if delimiter == "," else "tsv"
    write_pairs(bundle.train, out / f"train.{extension}", delimiter)
    write_pairs(bundle.dev, out / f"dev.{extension}", delimiter)
    write_pairs(bundle.test, out / f"test.{extension}", delimiter)
