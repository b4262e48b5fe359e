"""blockextract: structure-aware HTML block segmentation and index-based extraction.

Pages are cleaned and segmented into numbered content blocks; a pluggable
backend predicts which block index intervals matter for a query (or for the
page's main content); the selected blocks are reassembled into standalone
HTML, Markdown, or plain text.
"""

from .assembler import (
    AssembledDocument,
    IncompleteSplitGroup,
    IndexOutOfRange,
    SelectedBlocks,
    build_html,
    reconstruct,
    rejoin_fragments,
    select,
)
from .chunker import ChunkPlan, SingleBlockOverBudget, default_token_counter, plan_chunks
from .dom import (
    DomNode,
    NodeClass,
    RawDocument,
    classify,
    clean,
    document_from_html,
    extract_title,
    layout_text,
    parse_html,
)
from .evalkit import (
    ArityMismatch,
    EmptyGoldSet,
    EvalRecord,
    EvalReport,
    LatencyStats,
    ScoreTriple,
    majority_vote,
    qa_score,
    run_eval,
    token_score,
)
from .extractor import (
    BackendUnavailable,
    LexicalBackend,
    PromptTemplate,
    Query,
    RemoteBackend,
    ReplayBackend,
    SelectAllBackend,
    SelectNoneBackend,
    UnparseableReply,
    extract_indices,
    parse_reply,
)
from .intervals import IntervalSet, merge_intervals
from .pipeline import ExtractionResult, PipelineConfig, extract, segment_html
from .render import OutputFormat, to_markdown, to_text
from .segmenter import (
    BlockSequence,
    ContentBlock,
    SegmenterConfig,
    SplitInfo,
    normalize_inline,
    render_indexed,
    segment,
    split_block,
)

__version__ = "0.1.0"

__all__ = [
    "AssembledDocument", "ArityMismatch", "BackendUnavailable", "BlockSequence",
    "ChunkPlan", "ContentBlock", "DomNode", "EmptyGoldSet", "EvalRecord",
    "EvalReport", "ExtractionResult", "IncompleteSplitGroup", "IndexOutOfRange",
    "IntervalSet", "LatencyStats", "LexicalBackend", "NodeClass", "OutputFormat",
    "PipelineConfig", "PromptTemplate", "Query", "RawDocument", "RemoteBackend",
    "ReplayBackend", "ScoreTriple", "SegmenterConfig", "SelectAllBackend",
    "SelectNoneBackend", "SelectedBlocks", "SingleBlockOverBudget", "SplitInfo",
    "UnparseableReply", "build_html", "classify", "clean", "default_token_counter",
    "document_from_html", "extract", "extract_indices", "extract_title",
    "layout_text", "majority_vote",
    "merge_intervals", "normalize_inline", "parse_html", "parse_reply",
    "plan_chunks", "qa_score", "reconstruct", "rejoin_fragments", "render_indexed",
    "run_eval", "segment", "segment_html", "select", "split_block", "to_markdown",
    "to_text", "token_score",
]
