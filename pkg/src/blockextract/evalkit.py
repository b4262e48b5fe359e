"""Token-level extraction metrics, vote consolidation, and dataset evaluation.

Token scoring follows common QA practice: lowercase, strip punctuation, split
on whitespace, compare token multisets (set comparison available via
``distinct=True``).  ``run_eval`` drives the whole pipeline over a JSONL
dataset and scores each record against either gold text or gold intervals.
"""

from __future__ import annotations

import csv
import json
import string
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, TextIO

from .extractor import BackendUnavailable, ExtractorBackend, Query
from .intervals import IntervalSet
from .render import OutputFormat


class EmptyGoldSet(Exception):
    pass


class ArityMismatch(Exception):
    pass


@dataclass(frozen=True)
class ScoreTriple:
    precision: float
    recall: float
    f1: float


_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def normalize_tokens(text: str) -> list[str]:
    return text.lower().translate(_PUNCT_TABLE).split()


def _triple(overlap: float, n_pred: int, n_gold: int) -> ScoreTriple:
    if n_pred == 0 and n_gold == 0:
        return ScoreTriple(1.0, 1.0, 1.0)
    if n_pred == 0 or n_gold == 0:
        return ScoreTriple(0.0, 0.0, 0.0)
    precision = overlap / n_pred
    recall = overlap / n_gold
    if precision + recall == 0:
        return ScoreTriple(0.0, 0.0, 0.0)
    return ScoreTriple(precision, recall, 2 * precision * recall / (precision + recall))


def token_score(predicted: str, gold: str, distinct: bool = False) -> ScoreTriple:
    """Precision/recall/F1 over normalized token multisets (or sets)."""
    pred = normalize_tokens(predicted)
    ref = normalize_tokens(gold)
    if distinct:
        overlap = len(set(pred) & set(ref))
        return _triple(overlap, len(set(pred)), len(set(ref)))
    common = Counter(pred) & Counter(ref)
    return _triple(sum(common.values()), len(pred), len(ref))


def qa_score(response: str, gold_answers: list[str], distinct: bool = False) -> float:
    """Best token F1 of the response against any gold answer."""
    if not gold_answers:
        raise EmptyGoldSet("at least one gold answer required")
    return max(token_score(response, answer, distinct).f1 for answer in gold_answers)


def majority_vote(runs: list[IntervalSet], k: int, threshold: int) -> IntervalSet:
    """Indices selected by at least ``threshold`` of ``k`` runs."""
    if len(runs) != k:
        raise ArityMismatch(f"expected {k} runs, got {len(runs)}")
    if not 1 <= threshold <= k:
        raise ArityMismatch(f"threshold {threshold} outside 1..{k}")
    counts: Counter[int] = Counter()
    for run in runs:
        counts.update(run.members())
    return IntervalSet.from_members(i for i, c in counts.items() if c >= threshold)


@dataclass
class LatencyStats:
    per_page_seconds: list[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        if not self.per_page_seconds:
            return 0.0
        return sum(self.per_page_seconds) / len(self.per_page_seconds)


@dataclass
class EvalRecord:
    id: str
    url: str
    html: str
    query: str = ""
    gold_text: str | None = None
    gold_intervals: IntervalSet | None = None

    def __post_init__(self):
        if (self.gold_text is None) == (self.gold_intervals is None):
            raise ValueError(f"record {self.id!r}: exactly one of gold_text/gold_intervals required")


def record_from_json(obj: dict) -> EvalRecord:
    if not isinstance(obj.get("html"), str):
        raise TypeError('"html" must be a string')
    gold_intervals = None
    if "gold_intervals" in obj:
        gold_intervals = IntervalSet.from_pairs((int(lo), int(hi)) for lo, hi in obj["gold_intervals"])
    return EvalRecord(
        id=str(obj.get("id", "")),
        url=str(obj.get("url", "")),
        html=obj["html"],
        query=str(obj.get("query", "")),
        gold_text=obj.get("gold_text"),
        gold_intervals=gold_intervals,
    )


def load_records(lines: Iterable[str]) -> Iterator[EvalRecord]:
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield record_from_json(json.loads(line))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"dataset line {lineno}: {exc}") from exc


@dataclass
class EvalRow:
    id: str
    precision: float
    recall: float
    f1: float
    latency_seconds: float
    flagged: bool = False
    error: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "f1": round(self.f1, 6),
            "latency_seconds": round(self.latency_seconds, 6),
            "flagged": self.flagged,
            "error": self.error,
        }


@dataclass
class EvalReport:
    rows: list[EvalRow]
    latency: LatencyStats

    def summary(self) -> dict:
        count = len(self.rows)
        mean = lambda xs: sum(xs) / count if count else 0.0  # noqa: E731
        return {
            "records": count,
            "mean_precision": round(mean([r.precision for r in self.rows]), 6),
            "mean_recall": round(mean([r.recall for r in self.rows]), 6),
            "mean_f1": round(mean([r.f1 for r in self.rows]), 6),
            "mean_latency_seconds": round(self.latency.mean, 6),
            "flagged": sum(1 for r in self.rows if r.flagged),
        }


def _interval_triple(predicted: IntervalSet, gold: IntervalSet) -> ScoreTriple:
    pred, ref = predicted.members(), gold.members()
    return _triple(len(pred & ref), len(pred), len(ref))


def run_eval(
    records: Iterable[EvalRecord],
    config=None,
    backend_factory: Callable[[EvalRecord, Query], ExtractorBackend] | None = None,
    workers: int = 1,
    distinct_tokens: bool = False,
) -> EvalReport:
    """Run the full pipeline on each record and score against its gold.

    Text-gold records are scored on the plain-text rendering; interval-gold
    records by member-set precision/recall.  Failing records (transport
    failure, unparseable replies) score 0, are flagged, and the run continues.
    """
    from .pipeline import PipelineConfig, extract

    config = config or PipelineConfig()
    text_config = replace(config, format=OutputFormat.TEXT)

    def score_record(record: EvalRecord) -> EvalRow:
        query = Query.make(record.query)
        backend = backend_factory(record, query) if backend_factory else None
        start = time.perf_counter()
        try:
            result = extract(record.html, query, text_config, backend=backend, url=record.url)
        except BackendUnavailable as exc:
            elapsed = time.perf_counter() - start
            return EvalRow(record.id, 0.0, 0.0, 0.0, elapsed, flagged=True, error=str(exc))
        elapsed = result.stats.latency_ms / 1000.0
        if record.gold_intervals is not None:
            triple = _interval_triple(result.indices, record.gold_intervals)
        else:
            triple = token_score(result.content, record.gold_text or "", distinct_tokens)
        if result.stats.unparseable_chunks:
            return EvalRow(record.id, 0.0, 0.0, 0.0, elapsed, flagged=True,
                           error=f"{result.stats.unparseable_chunks} unparseable chunk replies")
        return EvalRow(record.id, triple.precision, triple.recall, triple.f1, elapsed)

    records = list(records)
    if workers > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(score_record, records))
    else:
        rows = [score_record(record) for record in records]
    return EvalReport(rows=rows, latency=LatencyStats([r.latency_seconds for r in rows]))


def write_rows_jsonl(report: EvalReport, fh: TextIO) -> None:
    for row in report.rows:
        fh.write(json.dumps(row.to_json()) + "\n")


def write_csv(report: EvalReport, fh: TextIO) -> None:
    writer = csv.writer(fh)
    writer.writerow(["id", "precision", "recall", "f1", "latency_seconds", "flagged", "error"])
    for row in report.rows:
        writer.writerow([row.id, f"{row.precision:.6f}", f"{row.recall:.6f}",
                         f"{row.f1:.6f}", f"{row.latency_seconds:.6f}", row.flagged, row.error])
