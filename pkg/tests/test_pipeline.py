from __future__ import annotations

import pytest

from blockextract.extractor import ReplayBackend
from blockextract.intervals import IntervalSet
from blockextract.pipeline import PipelineConfig, extract, segment_html
from blockextract.render import OutputFormat
from blockextract.segmenter import SegmenterConfig

import pagegen


def test_empty_page_is_valid_empty_extraction():
    result = extract("", None, PipelineConfig(backend="select_all"))
    assert result.content == ""
    assert result.indices == IntervalSet.empty()
    assert result.stats.blocks == 0
    assert result.stats.chunks == 0


def test_html_format_returns_standalone_document():
    config = PipelineConfig(backend="select_all", format=OutputFormat.HTML)
    result = extract("<head><title>T</title></head><body><p>x</p></body>", None, config)
    assert result.content.startswith("<html><head><title>T</title></head><body>")
    assert result.title == "T"


def test_query_and_main_modes_accepted():
    html = "<body><p>The harbor opens at nine in the morning.</p><p>nav</p></body>"
    for query in (None, "", "when does the harbor open?"):
        result = extract(html, query, PipelineConfig(backend="lexical", format=OutputFormat.TEXT))
        assert "harbor" in result.content


def test_multi_chunk_pipeline_merges_results():
    html = pagegen.make_page(70, paragraphs=14, with_images=False)
    seq = segment_html(html)
    n = len(seq.blocks)
    config = PipelineConfig(max_doc_tokens=1200, prompt_margin_tokens=200,
                            format=OutputFormat.TEXT)
    gold = IntervalSet.from_pairs([(1, 2), (n - 1, n)])
    result = extract(html, "anything", config, backend=ReplayBackend(gold))
    assert result.stats.chunks > 1
    assert result.indices.members() == gold.members()


def test_oversized_block_splits_then_selection_rejoins():
    long_sentences = " ".join(f"Sentence {i} about the harbor and its long history." for i in range(60))
    html = f"<body><p>{long_sentences}</p><p>short tail</p></body>"
    config = PipelineConfig(
        segmenter=SegmenterConfig(max_block_chars=200), format=OutputFormat.TEXT
    )
    seq = segment_html(html, config)
    fragment_count = sum(1 for b in seq.blocks if b.split is not None)
    assert fragment_count >= 2
    # select only the middle fragment: group completion must restore all text
    middle = next(b.index for b in seq.blocks if b.split and b.split.split_part == 2)
    result = extract(html, "harbor", config,
                     backend=ReplayBackend(IntervalSet.from_members({middle})))
    assert result.content.count("Sentence") == 60
    assert "short tail" not in result.content


def test_stats_are_populated():
    result = extract(pagegen.make_page(5), None, PipelineConfig(backend="select_all"))
    stats = result.stats
    assert stats.blocks > 0
    assert stats.chunks >= 1
    assert stats.latency_ms > 0
    assert stats.input_tokens > 0
    assert stats.content_tokens > 0
    assert stats.unparseable_chunks == 0


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(max_doc_tokens=0)
    with pytest.raises(ValueError):
        PipelineConfig(max_doc_tokens=100, prompt_margin_tokens=100)
    with pytest.raises(ValueError):
        PipelineConfig(backend="nonexistent")


def test_prompt_margin_shrinks_chunk_budget():
    config = PipelineConfig(max_doc_tokens=8192, prompt_margin_tokens=1024)
    assert config.chunk_budget == 7168


def test_custom_prompt_template_used(tmp_path):
    path = tmp_path / "tmpl.txt"
    path.write_text("CUSTOM {query}\n{blocks}", encoding="utf-8")

    class Capture:
        name = "capture"
        seen = ""

        def predict(self, prompt):
            Capture.seen = prompt
            return "NA"

    config = PipelineConfig(prompt_path=str(path))
    extract("<body><p>x</p></body>", "q", config, backend=Capture())
    assert Capture.seen.startswith("CUSTOM q")


def test_cli_and_library_agree():
    html = pagegen.make_page(33)
    result = extract(html, None, PipelineConfig(backend="select_all"))
    again = extract(html, None, PipelineConfig(backend="select_all"))
    assert result.content == again.content
    assert result.indices == again.indices
