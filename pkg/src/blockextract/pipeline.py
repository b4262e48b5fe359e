"""End-to-end orchestration: raw HTML + query -> rendered extraction.

parse -> title -> clean -> segment -> chunk -> backend index prediction ->
select -> rejoin -> regroup -> standalone HTML -> output format.  The whole
pass is stateless; every call builds its own tree and sequence, so concurrent
callers never share mutable state.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from .assembler import build_html, reconstruct, rejoin_fragments, select, SelectedBlocks
from .chunker import default_token_counter, plan_chunks
from .dom import clean, extract_title, parse_html
from .extractor import (
    ExtractorBackend,
    LexicalBackend,
    PromptTemplate,
    Query,
    RemoteBackend,
    SelectAllBackend,
    SelectNoneBackend,
    extract_indices,
)
from .intervals import IntervalSet
from .render import OutputFormat, to_markdown, to_text
from .segmenter import BlockSequence, SegmenterConfig, render_indexed, segment

BACKEND_CHOICES = ("lexical", "remote", "select_all", "select_none")


@dataclass
class PipelineConfig:
    segmenter: SegmenterConfig = field(default_factory=SegmenterConfig)
    max_doc_tokens: int = 8192
    prompt_margin_tokens: int = 1024
    backend: str = "lexical"
    format: OutputFormat = OutputFormat.MARKDOWN
    prompt_path: str | None = None
    concurrency: int = 4
    endpoint: str = ""
    model: str = ""
    timeout: float = 60.0

    def __post_init__(self):
        if self.max_doc_tokens <= 0 or self.concurrency <= 0 or self.prompt_margin_tokens < 0:
            raise ValueError("numeric config fields must be positive")
        if self.max_doc_tokens - self.prompt_margin_tokens <= 0:
            raise ValueError("prompt margin leaves no room for blocks")
        if self.backend not in BACKEND_CHOICES:
            raise ValueError(f"unknown backend {self.backend!r}")

    @property
    def chunk_budget(self) -> int:
        return self.max_doc_tokens - self.prompt_margin_tokens


@dataclass
class ExtractionStats:
    blocks: int
    chunks: int
    latency_ms: float
    input_tokens: int
    content_tokens: int
    unparseable_chunks: int = 0


@dataclass
class ExtractionResult:
    content: str
    indices: IntervalSet
    selected: SelectedBlocks
    title: str
    stats: ExtractionStats


def load_template(config: PipelineConfig) -> PromptTemplate:
    if config.prompt_path:
        return PromptTemplate.from_file(config.prompt_path)
    return PromptTemplate()


def build_backend(config: PipelineConfig, query: Query, tmpl: PromptTemplate) -> ExtractorBackend:
    if config.backend == "lexical":
        return LexicalBackend(query)
    if config.backend == "select_all":
        return SelectAllBackend()
    if config.backend == "select_none":
        return SelectNoneBackend()
    return RemoteBackend.from_env(
        endpoint=config.endpoint,
        model=config.model,
        system_text=tmpl.system_text,
        timeout=config.timeout,
    )


def segment_html(html: str, config: PipelineConfig | None = None, url: str = "") -> BlockSequence:
    """Parse, clean, and segment a page without running any backend."""
    config = config or PipelineConfig()
    doc = parse_html(html)
    title = extract_title(doc)
    cleaned, salvage = clean(doc)
    seq = segment(cleaned, config.segmenter, salvage)
    seq.title = title
    seq.url = url
    return seq


def render_output(content_html: str, fmt: OutputFormat, adoc) -> str:
    if fmt is OutputFormat.HTML:
        return content_html
    return to_markdown(adoc) if fmt is OutputFormat.MARKDOWN else to_text(adoc)


def extract(
    html: str,
    query: Query | str | None = None,
    config: PipelineConfig | None = None,
    backend: ExtractorBackend | None = None,
    url: str = "",
    tmpl: PromptTemplate | None = None,
    counter: Callable[[str], int] = default_token_counter,
) -> ExtractionResult:
    """Full extraction pass over one page."""
    config = config or PipelineConfig()
    q = query if isinstance(query, Query) else Query.make(query)
    start = time.perf_counter()

    seq = segment_html(html, config, url)
    plan = plan_chunks(seq, counter, config.chunk_budget)
    tmpl = tmpl or load_template(config)
    backend = backend or build_backend(config, q, tmpl)

    unparseable: list[tuple[int, int]] = []
    indices = extract_indices(
        seq, q, backend, plan, tmpl,
        concurrency=config.concurrency,
        unparseable_chunks=unparseable,
    )

    selected = rejoin_fragments(select(seq, indices))
    nodes = reconstruct(selected)
    adoc = build_html(nodes, seq.title)
    content = render_output(adoc.html, config.format, adoc)

    latency_ms = (time.perf_counter() - start) * 1000.0
    stats = ExtractionStats(
        blocks=len(seq),
        chunks=len(plan.chunks),
        latency_ms=latency_ms,
        input_tokens=counter(render_indexed(seq)),
        content_tokens=counter(content),
        unparseable_chunks=len(unparseable),
    )
    return ExtractionResult(
        content=content, indices=indices, selected=selected, title=seq.title, stats=stats
    )
