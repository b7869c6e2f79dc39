"""Negation-sensitivity probing for external scoring metrics.

A metric lives behind an adapter: either an in-process scorer (exact
match, Jaccard) or a separate process speaking line-delimited JSON on
stdin/stdout. The harness scores reference-candidate pairs, perturbs
candidates to a controlled degree (word swaps, drops, repetitions, or a
single negation), and aggregates how far the metric's scores move.

Two aggregations are reported per (kind, degree) cell: the raw mean
score difference, and that mean normalized by the score range the
metric exhibited on the run, since the exact weighting used by
diagnostic benchmarks of this style is not pinned down.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
import shlex
import subprocess
import threading
import time
import queue as queue_module
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import AdapterError, NegforgeError
from .negator import NegatorOptions, negate_text
from .pipeline import jaccard, whitespace_tokenize

Pair = tuple[str, str]


class PerturbationKind(Enum):
    WORD_SWAP = "word_swap"
    WORD_DROP = "word_drop"
    REPETITION = "repetition"
    NEGATION = "negation"


ALL_KINDS = tuple(PerturbationKind)


@dataclass(frozen=True)
class PerturbedItem:
    reference: str
    candidate: str
    perturbed: str
    kind: PerturbationKind
    degree: int

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        if self.degree > 0 and self.perturbed == self.candidate:
            raise ValueError("a nonzero degree must change the candidate")


# ---------------------------------------------------------------------------
# Spearman correlation


def _average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # tied block occupies positions i..j (0-based); share the average
        shared = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def _pearson(a: Sequence[float], b: Sequence[float]) -> float:
    n = len(a)
    mean_a = sum(a) / n
    mean_b = sum(b) / n
    cov = sum((x - mean_a) * (y - mean_b) for x, y in zip(a, b))
    var_a = sum((x - mean_a) ** 2 for x in a)
    var_b = sum((y - mean_b) ** 2 for y in b)
    if var_a == 0.0 or var_b == 0.0:
        raise ValueError("constant input has no defined correlation")
    return cov / math.sqrt(var_a * var_b)


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation with average ranks for ties."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    return _pearson(_average_ranks(x), _average_ranks(y))


# ---------------------------------------------------------------------------
# Adapters


@dataclass(frozen=True)
class ItemFailure:
    reason: str


class CallableAdapter:
    """Wraps an in-process scoring function."""

    def __init__(self, fn: Callable[[str, str], float], name: str = "callable"):
        self.fn = fn
        self.name = name

    def score_many(self, pairs: Sequence[Pair]) -> list[float | ItemFailure]:
        return [float(self.fn(ref, cand)) for ref, cand in pairs]

    def close(self) -> None:
        pass

    def __enter__(self) -> "CallableAdapter":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def exact_match_adapter() -> CallableAdapter:
    return CallableAdapter(
        lambda ref, cand: 1.0 if ref == cand else 0.0, name="exact",
    )


def jaccard_adapter() -> CallableAdapter:
    return CallableAdapter(
        lambda ref, cand: jaccard(
            whitespace_tokenize(ref), whitespace_tokenize(cand)
        ),
        name="jaccard",
    )


BUILTIN_ADAPTERS: dict[str, Callable[[], CallableAdapter]] = {
    "exact": exact_match_adapter,
    "jaccard": jaccard_adapter,
}


class ProcessAdapter:
    """Client side of the scorer wire protocol.

    One JSON object per line. The harness pings before scoring:

        -> {"cmd": "ping"}
        <- {"ok": true}
        -> {"id": "0", "reference": "...", "candidate": "..."}
        <- {"id": "0", "score": 0.5}

    Responses may arrive in any order; each batch write is followed by a
    bounded wait for the matching ids.
    """

    def __init__(self, command: str | list[str], timeout: float = 60.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.name = " ".join(self.command)
        self._process: subprocess.Popen | None = None
        self._lines: queue_module.Queue[str | None] = queue_module.Queue()
        self._batch_counter = 0
        self._lock = threading.Lock()

    # -- process plumbing

    def _reader(self, stdout) -> None:
        for line in stdout:
            self._lines.put(line)
        self._lines.put(None)

    def start(self) -> None:
        if self._process is not None and self._process.poll() is None:
            return
        try:
            self._process = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise AdapterError(
                f"could not start adapter {self.command!r}: {exc}"
            ) from exc
        threading.Thread(
            target=self._reader, args=(self._process.stdout,), daemon=True,
        ).start()
        try:
            self.ping()
        except AdapterError:
            self.close()  # don't leak the child on a failed handshake
            raise

    def _send(self, payload: dict) -> None:
        assert self._process is not None and self._process.stdin is not None
        try:
            self._process.stdin.write(json.dumps(payload) + "\n")
            self._process.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise AdapterError(f"adapter process died: {exc}") from exc

    def _read_line(self, deadline: float) -> str | None:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            return None
        try:
            line = self._lines.get(timeout=remaining)
        except queue_module.Empty:
            return None
        if line is None:
            raise AdapterError("adapter closed its output stream")
        return line

    def ping(self) -> None:
        if self._process is None:
            self.start()
            return
        self._send({"cmd": "ping"})
        deadline = time.monotonic() + self.timeout
        line = self._read_line(deadline)
        if line is None:
            raise AdapterError("adapter did not answer the ping handshake")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AdapterError(f"unreadable ping reply {line!r}") from exc
        if reply.get("ok") is not True:
            raise AdapterError(f"unexpected ping reply {reply!r}")

    def request_raw(self, payload: dict) -> dict:
        """Send one object and return the next parseable reply line."""
        with self._lock:
            if self._process is None:
                self.start()
            self._send(payload)
            deadline = time.monotonic() + self.timeout
            while True:
                line = self._read_line(deadline)
                if line is None:
                    raise AdapterError("timed out waiting for adapter reply")
                try:
                    return json.loads(line)
                except json.JSONDecodeError:
                    continue

    # -- scoring

    def score_many(self, pairs: Sequence[Pair]) -> list[float | ItemFailure]:
        with self._lock:
            if self._process is None:
                self.start()
            self._batch_counter += 1
            prefix = f"b{self._batch_counter}"
            ids = [f"{prefix}-{i}" for i in range(len(pairs))]
            for request_id, (reference, candidate) in zip(ids, pairs):
                self._send({
                    "id": request_id,
                    "reference": reference,
                    "candidate": candidate,
                })
            results: dict[str, float | ItemFailure] = {}
            pending = set(ids)
            deadline = time.monotonic() + self.timeout
            stray = 0
            while pending:
                line = self._read_line(deadline)
                if line is None:
                    break
                try:
                    reply = json.loads(line)
                except json.JSONDecodeError:
                    stray += 1
                    if stray > len(pairs) + 10:
                        raise AdapterError("adapter floods unparseable output")
                    continue
                reply_id = reply.get("id")
                if reply_id not in pending:
                    stray += 1
                    continue
                pending.discard(reply_id)
                if "error" in reply:
                    results[reply_id] = ItemFailure(str(reply["error"]))
                    continue
                score = reply.get("score")
                if isinstance(score, (int, float)) and math.isfinite(score):
                    results[reply_id] = float(score)
                else:
                    results[reply_id] = ItemFailure(f"non-finite score {score!r}")
            for missing in pending:
                results[missing] = ItemFailure("no response before timeout")
            return [results[request_id] for request_id in ids]

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
                try:
                    self._process.wait(timeout=2)
                except subprocess.TimeoutExpired:
                    self._process.kill()
        self._process = None

    def __enter__(self) -> "ProcessAdapter":
        self.start()
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


class PooledAdapter:
    """Fans a batch out to several adapters over disjoint contiguous
    shards; results are reassembled by input index."""

    def __init__(self, adapters: Sequence):
        if not adapters:
            raise ValueError("need at least one adapter")
        self.adapters = list(adapters)
        self.name = f"pool of {len(self.adapters)}"

    def score_many(self, pairs: Sequence[Pair]) -> list[float | ItemFailure]:
        from concurrent.futures import ThreadPoolExecutor

        n_shards = min(len(self.adapters), max(len(pairs), 1))
        bounds = [
            (len(pairs) * i // n_shards, len(pairs) * (i + 1) // n_shards)
            for i in range(n_shards)
        ]
        with ThreadPoolExecutor(max_workers=n_shards) as pool:
            shard_results = list(pool.map(
                lambda pack: pack[0].score_many(pairs[pack[1]:pack[2]]),
                [(adapter, lo, hi)
                 for adapter, (lo, hi) in zip(self.adapters, bounds)],
            ))
        merged: list[float | ItemFailure] = []
        for shard in shard_results:
            merged.extend(shard)
        return merged

    def close(self) -> None:
        for adapter in self.adapters:
            adapter.close()

    def __enter__(self) -> "PooledAdapter":
        for adapter in self.adapters:
            if hasattr(adapter, "start"):
                adapter.start()
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def score_pairs(
    adapter,
    pairs: Sequence[Pair],
    max_error_fraction: float = 0.1,
) -> list[float | None]:
    """One finite score per pair; tolerated per-item failures become None.

    The run aborts with AdapterError when the failure fraction exceeds
    ``max_error_fraction``.
    """
    if not pairs:
        return []
    raw = adapter.score_many(pairs)
    failures = [r for r in raw if isinstance(r, ItemFailure)]
    if len(failures) / len(pairs) > max_error_fraction:
        sample = "; ".join(f.reason for f in failures[:3])
        raise AdapterError(
            f"{len(failures)}/{len(pairs)} items failed "
            f"(limit {max_error_fraction:.0%}): {sample}"
        )
    return [None if isinstance(r, ItemFailure) else r for r in raw]


# ---------------------------------------------------------------------------
# Perturbations


def _rng_for(seed: int, kind: PerturbationKind, degree: int, candidate: str) -> random.Random:
    # string seeds hash deterministically across processes
    return random.Random(f"{seed}|{kind.value}|{degree}|{candidate}")


def _perturb_words(
    words: list[str],
    kind: PerturbationKind,
    degree: int,
    rng: random.Random,
) -> tuple[list[str], bool]:
    """Returns the perturbed words plus whether the degree was capped."""
    if kind == PerturbationKind.WORD_SWAP:
        available = len(words) - 1
        count = min(degree, max(available, 0))
        out = list(words)
        for position in rng.sample(range(available), count) if count else []:
            out[position], out[position + 1] = out[position + 1], out[position]
        return out, count < degree
    if kind == PerturbationKind.WORD_DROP:
        # never empty the sentence
        count = min(degree, len(words) - 1)
        count = max(count, 0)
        drop = set(rng.sample(range(len(words)), count)) if count else set()
        return [w for i, w in enumerate(words) if i not in drop], count < degree
    if kind == PerturbationKind.REPETITION:
        count = min(degree, len(words))
        duplicate = set(rng.sample(range(len(words)), count)) if count else set()
        out: list[str] = []
        for i, word in enumerate(words):
            out.append(word)
            if i in duplicate:
                out.append(word)
        return out, count < degree
    raise ValueError(f"unhandled kind {kind}")


def perturb(
    candidate: str,
    kind: PerturbationKind | str,
    degree: int,
    seed: int = 0,
    negator_options: NegatorOptions | None = None,
) -> str:
    """Deterministically impair a candidate sentence.

    word_swap exchanges ``degree`` distinct adjacent word pairs,
    word_drop deletes ``degree`` words (always leaving at least one),
    repetition duplicates ``degree`` words in place, and negation runs
    the rule-based negator (degree must be 1). Degrees beyond the
    available positions are capped.
    """
    kind = PerturbationKind(kind)
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if kind == PerturbationKind.NEGATION:
        if degree != 1:
            raise ValueError("negation supports only degree 1")
        return negate_text(candidate, options=negator_options).text
    words = whitespace_tokenize(candidate)
    if not words:
        raise ValueError("cannot perturb an empty candidate")
    rng = _rng_for(seed, kind, degree, candidate)
    perturbed, _capped = _perturb_words(words, kind, degree, rng)
    return " ".join(perturbed)


# ---------------------------------------------------------------------------
# Sensitivity aggregation


@dataclass
class SensitivityCell:
    kind: PerturbationKind
    degree: int
    item_count: int
    mean_raw_difference: float
    normalized_score: float
    capped_items: int = 0
    failed_items: int = 0


@dataclass
class SensitivityReport:
    cells: list[SensitivityCell] = field(default_factory=list)
    spearman_vs_labels: float | None = None
    corpus_size: int = 0

    def cell(self, kind: PerturbationKind | str, degree: int) -> SensitivityCell:
        kind = PerturbationKind(kind)
        for cell in self.cells:
            if cell.kind == kind and cell.degree == degree:
                return cell
        raise KeyError(f"no cell for ({kind.value}, {degree})")

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(
            ("kind", "degree", "item_count", "mean_raw_difference",
             "normalized_score")
        )
        for cell in self.cells:
            writer.writerow((
                cell.kind.value, cell.degree, cell.item_count,
                format(cell.mean_raw_difference, ".10g"),
                format(cell.normalized_score, ".10g"),
            ))
        return buffer.getvalue()

    def summary(self) -> str:
        lines = [f"corpus size: {self.corpus_size}"]
        if self.spearman_vs_labels is not None:
            lines.append(f"spearman vs labels: {self.spearman_vs_labels:.4f}")
        for cell in self.cells:
            lines.append(
                f"{cell.kind.value} degree {cell.degree}: "
                f"mean diff {cell.mean_raw_difference:.4f} "
                f"(normalized {cell.normalized_score:.4f}, "
                f"n={cell.item_count}, failed={cell.failed_items})"
            )
        return "\n".join(lines)


def sensitivity(
    adapter,
    corpus: Sequence[Pair],
    kinds: Iterable[PerturbationKind | str] = ALL_KINDS,
    degrees: Iterable[int] = (1,),
    seed: int = 0,
    labels: Sequence[float] | None = None,
    max_error_fraction: float = 0.1,
    negator_options: NegatorOptions | None = None,
) -> SensitivityReport:
    """Score the corpus plain and perturbed; aggregate the differences.

    Items whose perturbation fails (an unnegatable sentence, or an edit
    that cannot change the string) are excluded from that cell. The
    normalized score divides the mean difference by the score range
    observed across the unperturbed and perturbed predictions of the
    cell, so metrics on different scales stay comparable.
    """
    if not corpus:
        raise ValueError("corpus must be non-empty")
    kinds = [PerturbationKind(k) for k in kinds]
    degrees = sorted(set(int(d) for d in degrees))
    if any(d < 1 for d in degrees):
        raise ValueError("degrees must be >= 1")

    base_scores = score_pairs(adapter, corpus, max_error_fraction)
    report = SensitivityReport(corpus_size=len(corpus))
    if labels is not None:
        usable = [
            (s, l) for s, l in zip(base_scores, labels) if s is not None
        ]
        report.spearman_vs_labels = spearman(
            [s for s, _ in usable], [l for _, l in usable]
        )

    for kind in kinds:
        cell_degrees = [1] if kind == PerturbationKind.NEGATION else degrees
        for degree in cell_degrees:
            items: list[tuple[int, PerturbedItem]] = []
            capped = failed = 0
            for position, (reference, candidate) in enumerate(corpus):
                if base_scores[position] is None:
                    failed += 1
                    continue
                try:
                    if kind == PerturbationKind.NEGATION:
                        perturbed = negate_text(
                            candidate, options=negator_options
                        ).text
                    else:
                        words = whitespace_tokenize(candidate)
                        if not words:
                            raise ValueError("empty candidate")
                        rng = _rng_for(seed, kind, degree, candidate)
                        new_words, was_capped = _perturb_words(
                            words, kind, degree, rng
                        )
                        capped += was_capped
                        perturbed = " ".join(new_words)
                    item = PerturbedItem(
                        reference=reference, candidate=candidate,
                        perturbed=perturbed, kind=kind, degree=degree,
                    )
                except (NegforgeError, ValueError):
                    failed += 1
                    continue
                items.append((position, item))
            if not items:
                continue
            perturbed_scores = score_pairs(
                adapter,
                [(item.reference, item.perturbed) for _, item in items],
                max_error_fraction,
            )
            observed: list[float] = []
            diffs: list[float] = []
            for (position, _item), perturbed_score in zip(items, perturbed_scores):
                if perturbed_score is None:
                    failed += 1
                    continue
                base = base_scores[position]
                assert base is not None
                diffs.append(base - perturbed_score)
                observed.extend((base, perturbed_score))
            if not diffs:
                continue
            mean_diff = sum(diffs) / len(diffs)
            score_range = max(observed) - min(observed)
            normalized = mean_diff / score_range if score_range > 0 else 0.0
            report.cells.append(SensitivityCell(
                kind=kind, degree=degree, item_count=len(diffs),
                mean_raw_difference=mean_diff, normalized_score=normalized,
                capped_items=capped, failed_items=failed,
            ))
    return report


def read_pair_file(path: str | Path) -> tuple[list[Pair], list[float] | None]:
    """Read a headered TSV of (reference, candidate[, score, ...]) rows."""
    pairs: list[Pair] = []
    scores: list[float] = []
    has_scores = True
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle, delimiter="\t")
        if reader.fieldnames is None or "reference" not in reader.fieldnames \
                or "candidate" not in reader.fieldnames:
            raise NegforgeError(
                f"{path}: expected a headered TSV with reference/candidate columns"
            )
        for row in reader:
            pairs.append((row["reference"], row["candidate"]))
            if "score" in row and row["score"] not in (None, ""):
                scores.append(float(row["score"]))
            else:
                has_scores = False
    return pairs, (scores if has_scores and scores else None)


def evaluate_testset(
    adapter,
    dataset: str | Path,
    max_error_fraction: float = 0.0,
) -> float:
    """Spearman correlation between the adapter's scores and gold scores."""
    pairs, gold = read_pair_file(dataset)
    if gold is None:
        raise NegforgeError(f"{dataset}: rows carry no gold scores")
    predicted = score_pairs(adapter, pairs, max_error_fraction)
    usable = [(p, g) for p, g in zip(predicted, gold) if p is not None]
    return spearman([p for p, _ in usable], [g for _, g in usable])


# ---------------------------------------------------------------------------
# Adapter conformance


@dataclass
class ConformanceCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ConformanceReport:
    checks: list[ConformanceCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(check.passed for check in self.checks)

    def summary(self) -> str:
        return "\n".join(
            f"{'PASS' if c.passed else 'FAIL'} {c.name}"
            + (f": {c.detail}" if c.detail else "")
            for c in self.checks
        )


def _random_sentence(rng: random.Random) -> str:
    vocabulary = (
        "alpha bravo charlie delta echo foxtrot golf hotel india juliet "
        "kilo lima mike november oscar papa quebec romeo sierra tango"
    ).split()
    return " ".join(rng.choice(vocabulary) for _ in range(rng.randint(2, 9)))


def verify_adapter(
    adapter,
    n_requests: int = 1000,
    seed: int = 0,
) -> ConformanceReport:
    """Harness-side protocol conformance suite.

    Checks the ping handshake, id-matched finite responses over a batch
    of randomized requests (tolerating any response order), and the
    malformed-request contract for process adapters.
    """
    report = ConformanceReport()
    rng = random.Random(seed)
    try:
        if hasattr(adapter, "start"):
            adapter.start()
        report.checks.append(ConformanceCheck("ping handshake", True))
    except AdapterError as exc:
        report.checks.append(ConformanceCheck("ping handshake", False, str(exc)))
        return report

    pairs = []
    for _ in range(n_requests):
        reference = _random_sentence(rng)
        candidate = reference if rng.random() < 0.3 else _random_sentence(rng)
        pairs.append((reference, candidate))
    raw = adapter.score_many(pairs)
    bad = [r for r in raw if not isinstance(r, float) or not math.isfinite(r)]
    report.checks.append(ConformanceCheck(
        f"{n_requests} randomized requests",
        not bad,
        "" if not bad else f"{len(bad)} items failed",
    ))

    if isinstance(adapter, ProcessAdapter):
        try:
            reply = adapter.request_raw({"id": "malformed-probe",
                                         "reference": "only half a pair"})
            passed = reply.get("id") == "malformed-probe" and "error" in reply
            report.checks.append(ConformanceCheck(
                "malformed request yields error record", passed,
                "" if passed else f"got {reply!r}",
            ))
        except AdapterError as exc:
            report.checks.append(ConformanceCheck(
                "malformed request yields error record", False, str(exc),
            ))
        survivors = adapter.score_many([("still", "alive")])
        report.checks.append(ConformanceCheck(
            "keeps serving after malformed request",
            len(survivors) == 1 and isinstance(survivors[0], float),
        ))
    return report
