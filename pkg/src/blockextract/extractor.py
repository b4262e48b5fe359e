"""Obtain index intervals for each chunk from a pluggable backend.

A backend is anything with ``predict(prompt) -> reply`` and a ``name``; the
reply grammar is a bracketed list of closed index pairs (``[[1,2],[7,7]]``,
bare ``[1,2], [7,7]`` runs also accepted) or the standalone token ``NA`` for
"nothing relevant".  Replies are clipped to the chunk's index range and
canonicalized, so a backend can never select blocks outside the chunk it saw.

Bundled backends: a deterministic lexical scorer (BM25-style term overlap for
query mode, tag/length heuristics for main-content mode), remote JSON-over-HTTP
chat completion, and select-all / select-none / replay fixtures.
"""

from __future__ import annotations

import logging
import math
import os
import re
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import requests

from .chunker import ChunkPlan
from .dom import collapse_ws, unescape_text
from .intervals import IntervalSet, merge_intervals
from .segmenter import BlockSequence, render_block_line

log = logging.getLogger(__name__)

QUERY_RELEVANT = "query_relevant"
MAIN_CONTENT = "main_content"


class UnparseableReply(Exception):
    pass


class BackendUnavailable(Exception):
    pass


@dataclass(frozen=True)
class Query:
    text: str
    mode: str

    def __post_init__(self):
        if self.mode not in (QUERY_RELEVANT, MAIN_CONTENT):
            raise ValueError(f"unknown query mode: {self.mode}")
        if (self.mode == MAIN_CONTENT) != (not self.text.strip()):
            raise ValueError("main_content mode requires empty query text and vice versa")

    @classmethod
    def make(cls, text: str | None) -> "Query":
        text = (text or "").strip()
        return cls(text=text, mode=QUERY_RELEVANT if text else MAIN_CONTENT)


class ExtractorBackend(Protocol):
    name: str

    def predict(self, prompt: str) -> str: ...


DEFAULT_SYSTEM_TEXT = (
    "You are a precise selection engine. Given numbered webpage blocks, you "
    "answer only with index intervals or NA, never with prose."
)

DEFAULT_QUERY_BODY = """\
Task: select every content block relevant to the user query from the numbered
blocks of a webpage. Irrelevant blocks (navigation, ads, boilerplate, unrelated
sections) must not be selected.

URL: {url}
Title: {title}
Query: {query}

Rules:
- Each block is one line formatted as "[i] <tag>content</tag>".
- Answer with closed index intervals as a list of pairs, e.g. [[1,2],[5,8]].
- Cover exactly the relevant blocks, nothing more.
- If no block is relevant, answer NA.

Blocks:
{blocks}

Answer:"""

DEFAULT_MAIN_BODY = """\
Task: select every content block that belongs to the main content of the
webpage. Navigation bars, advertisements, footers, cookie notices, and
related-article teasers must not be selected.

URL: {url}
Title: {title}

Rules:
- Each block is one line formatted as "[i] <tag>content</tag>".
- Answer with closed index intervals as a list of pairs, e.g. [[1,2],[5,8]].
- Cover exactly the main-content blocks, nothing more.
- If the page has no main content, answer NA.

Blocks:
{blocks}

Answer:"""


@dataclass(frozen=True)
class PromptTemplate:
    system_text: str = DEFAULT_SYSTEM_TEXT
    query_body: str = DEFAULT_QUERY_BODY
    main_body: str = DEFAULT_MAIN_BODY

    @classmethod
    def from_file(cls, path: str | Path) -> "PromptTemplate":
        body = Path(path).read_text(encoding="utf-8")
        return cls(query_body=body, main_body=body)

    def render(self, query: Query, title: str, url: str, chunk_lines: str) -> str:
        body = self.main_body if query.mode == MAIN_CONTENT else self.query_body
        values = {"query": query.text, "title": title, "url": url, "blocks": chunk_lines}
        # single pass so placeholder-like text in substituted values stays literal
        return re.sub(r"\{(query|title|url|blocks)\}", lambda m: values[m.group(1)], body)


_OUTER_LIST_RE = re.compile(
    r"\[\s*(?:\[\s*\d+\s*,\s*\d+\s*\]\s*(?:,\s*\[\s*\d+\s*,\s*\d+\s*\]\s*)*)?\]"
)
_BARE_RUN_RE = re.compile(
    r"\[\s*\d+\s*,\s*\d+\s*\](?:\s*,\s*\[\s*\d+\s*,\s*\d+\s*\])*"
)
_NA_RE = re.compile(r"\bNA\b")
_PAIR_RE = re.compile(r"\[\s*(\d+)\s*,\s*(\d+)\s*\]")


def parse_reply(raw_reply: str, chunk_range: tuple[int, int]) -> IntervalSet:
    """Parse a backend reply into a canonical set clipped to the chunk range.

    The first well-formed interval list or standalone NA token wins; pairs
    with lo > hi are dropped.  Raises UnparseableReply when neither occurs.
    """
    candidates = []
    list_match = _OUTER_LIST_RE.search(raw_reply) or _BARE_RUN_RE.search(raw_reply)
    if list_match:
        candidates.append((list_match.start(), "list", list_match.group(0)))
    na_match = _NA_RE.search(raw_reply)
    if na_match:
        candidates.append((na_match.start(), "na", ""))
    if not candidates:
        raise UnparseableReply(raw_reply[:200])
    _, kind, text = min(candidates)
    if kind == "na":
        return IntervalSet.empty()
    pairs = [(int(a), int(b)) for a, b in _PAIR_RE.findall(text)]
    lo, hi = chunk_range
    clipped = [(max(a, lo), min(b, hi)) for a, b in pairs if a <= b]
    return IntervalSet.from_pairs(p for p in clipped if p[0] <= p[1])


def chunk_lines(seq: BlockSequence, chunk: tuple[int, int]) -> str:
    lo, hi = chunk
    return "\n".join(render_block_line(b) for b in seq.blocks[lo - 1 : hi])


def extract_indices(
    seq: BlockSequence,
    query: Query,
    backend: ExtractorBackend,
    plan: ChunkPlan,
    tmpl: PromptTemplate | None = None,
    concurrency: int = 4,
    unparseable_chunks: list[tuple[int, int]] | None = None,
) -> IntervalSet:
    """Run the backend over every chunk and merge the per-chunk interval sets.

    Chunks may be processed concurrently; the merged result is order
    independent.  An unparseable reply counts its chunk as empty (and is
    recorded in ``unparseable_chunks`` when given); transport failure aborts
    the whole extraction with BackendUnavailable.
    """
    tmpl = tmpl or PromptTemplate()

    def run_chunk(chunk: tuple[int, int]) -> IntervalSet:
        prompt = tmpl.render(query, seq.title, seq.url, chunk_lines(seq, chunk))
        reply = backend.predict(prompt)
        try:
            return parse_reply(reply, chunk)
        except UnparseableReply:
            log.warning("unparseable reply for chunk %s: %.120r", chunk, reply)
            if unparseable_chunks is not None:
                unparseable_chunks.append(chunk)
            return IntervalSet.empty()

    if len(plan.chunks) > 1 and concurrency > 1:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            results = list(pool.map(run_chunk, plan.chunks))
    else:
        results = [run_chunk(chunk) for chunk in plan.chunks]
    return merge_intervals(results)


_LINE_RE = re.compile(r"^\[(\d+)\] <([a-z0-9]+)(?: [^>]*)?>(.*)</\2>$")
_TAG_RE = re.compile(r"<[^>]+>")


def _parse_prompt_lines(prompt: str) -> list[tuple[int, str, str]]:
    """Recover (index, tag, visible text) from the block lines embedded in a
    rendered prompt."""
    out = []
    for line in prompt.splitlines():
        m = _LINE_RE.match(line.strip())
        if m:
            text = unescape_text(_TAG_RE.sub(" ", m.group(3)))
            out.append((int(m.group(1)), m.group(2), collapse_ws(text)))
    return out


def _runs_to_reply(indices: list[int]) -> str:
    if not indices:
        return "NA"
    return str(IntervalSet.from_members(indices))


class SelectAllBackend:
    """Fixture: selects the full index range of whatever chunk it is shown."""

    name = "select_all"

    def predict(self, prompt: str) -> str:
        lines = _parse_prompt_lines(prompt)
        if not lines:
            return "NA"
        return f"[[{lines[0][0]},{lines[-1][0]}]]"


class SelectNoneBackend:
    """Fixture: never selects anything."""

    name = "select_none"

    def predict(self, prompt: str) -> str:
        return "NA"


class ReplayBackend:
    """Fixture: replays a fixed interval set, clipped to the chunk shown."""

    name = "replay"

    def __init__(self, intervals: IntervalSet):
        self.intervals = intervals

    def predict(self, prompt: str) -> str:
        lines = _parse_prompt_lines(prompt)
        if not lines:
            return "NA"
        clipped = self.intervals.clip(lines[0][0], lines[-1][0])
        return str(clipped) if clipped else "NA"


_TOKEN_RE = re.compile(r"\w+")
MAIN_CONTENT_TAGS = {"p", "h1", "h2", "h3", "h4", "h5", "h6", "li", "tr",
                     "blockquote", "pre", "figure"}


def _terms(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def lexical_reply(
    query_terms: list[str],
    lines: list[tuple[int, str, str]],
    quantile: float = 0.8,
    k1: float = 1.5,
    b: float = 0.75,
) -> str:
    """Okapi-style term-overlap scoring of block lines against query terms;
    blocks at or above the score quantile (among positive scores) are selected."""
    docs = [_terms(text) for _, _, text in lines]
    n_docs = len(docs)
    if n_docs == 0:
        return "NA"
    avgdl = sum(len(d) for d in docs) / n_docs or 1.0
    freqs = [Counter(d) for d in docs]
    df: Counter[str] = Counter()
    for tf in freqs:
        df.update(tf.keys())
    idf = {t: math.log(1.0 + (n_docs - n + 0.5) / (n + 0.5)) for t, n in df.items()}

    scores = []
    for tf, doc in zip(freqs, docs):
        norm = k1 * (1 - b + b * len(doc) / avgdl)
        s = 0.0
        for term in query_terms:
            f = tf.get(term, 0)
            if f:
                s += idf.get(term, 0.0) * f * (k1 + 1) / (f + norm)
        scores.append(s)

    positive = sorted(s for s in scores if s > 0)
    if not positive:
        return "NA"
    keep = max(1, math.ceil((1.0 - quantile) * len(positive)))
    threshold = positive[-keep]
    selected = [lines[i][0] for i, s in enumerate(scores) if s > 0 and s >= threshold]
    return _runs_to_reply(selected)


def main_content_reply(lines: list[tuple[int, str, str]], min_chars: int = 30) -> str:
    selected = [
        idx for idx, tag, text in lines
        if tag in MAIN_CONTENT_TAGS and len(text) >= min_chars
    ]
    return _runs_to_reply(selected)


class LexicalBackend:
    """Deterministic offline stand-in for a model backend."""

    name = "lexical"

    def __init__(self, query: Query, quantile: float = 0.8, min_chars: int = 30):
        self.query = query
        self.quantile = quantile
        self.min_chars = min_chars

    def predict(self, prompt: str) -> str:
        lines = _parse_prompt_lines(prompt)
        if self.query.mode == MAIN_CONTENT:
            return main_content_reply(lines, self.min_chars)
        return lexical_reply(_terms(self.query.text), lines, self.quantile)


class RemoteBackend:
    """Chat-completion JSON-over-HTTP backend with retries and backoff."""

    name = "remote"

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str = "",
        system_text: str = DEFAULT_SYSTEM_TEXT,
        timeout: float = 60.0,
        retries: int = 3,
        backoff: float = 0.5,
    ):
        if not endpoint:
            raise ValueError("remote backend requires an endpoint")
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key
        self.system_text = system_text
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff

    @classmethod
    def from_env(cls, **kwargs) -> "RemoteBackend":
        return cls(
            endpoint=kwargs.pop("endpoint", "") or os.environ.get("EXTRACTOR_ENDPOINT", ""),
            model=kwargs.pop("model", "") or os.environ.get("EXTRACTOR_MODEL", ""),
            api_key=kwargs.pop("api_key", "") or os.environ.get("EXTRACTOR_API_KEY", ""),
            **kwargs,
        )

    def predict(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": self.system_text},
                {"role": "user", "content": prompt},
            ],
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error: Exception | None = None
        for attempt in range(self.retries):
            try:
                resp = requests.post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout
                )
                resp.raise_for_status()
                data = resp.json()
                return data["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                if attempt + 1 < self.retries:
                    time.sleep(self.backoff * (2**attempt))
        raise BackendUnavailable(f"{self.endpoint}: {last_error}")
