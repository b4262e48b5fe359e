"""Turn a cleaned DOM into the ordered, numbered sequence of content blocks.

Traversal is depth-first from <body> (or from the outermost nodes when a page
has no body).  Block-level elements become segments; inline markup inside a
segment is reduced to text plus retained formatting tags; hyperlinks keep only
their anchor text; images survive only with a caption, rewritten to the
``<img>image: {src}, caption: {text}</img>`` wire form.

A block element with no text of its own merges with its first child segment,
producing the one-level wrapper shape ``<div><p>text</p></div>`` that the
assembler later recognizes when regrouping lists and tables.

Segments whose visible text exceeds the configured limit are split at
sentence, then word, then raw character boundaries; fragments carry a
(split-id, split-part, split-total) triplet so they can be rejoined losslessly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .dom import (
    DomNode,
    NodeClass,
    classify,
    collapse_ws,
    escape_text,
    layout_text,
    parse_html,
    unescape_text,
)


@dataclass
class SegmenterConfig:
    max_block_chars: int = 2000

    def __post_init__(self):
        if self.max_block_chars < 64:
            raise ValueError("max_block_chars must be >= 64")


@dataclass(frozen=True)
class SplitInfo:
    split_id: int
    split_part: int
    split_total: int


@dataclass
class ContentBlock:
    """One addressable segment: 1-based index, tag, and inner HTML.

    inner_html is text plus retained format/img markup; for a merged block it
    carries exactly one outer child wrapper (e.g. ``<li>first item</li>``
    inside a ``ul`` block).
    """

    index: int
    tag: str
    inner_html: str
    split: SplitInfo | None = None


@dataclass
class BlockSequence:
    blocks: list[ContentBlock] = field(default_factory=list)
    title: str = ""
    url: str = ""

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass
class _Seg:
    tag: str
    inner: str
    merged: bool = False
    split: SplitInfo | None = None


_CAPTION_SOURCES = ("alt", "figcaption", "title")


def _discover_caption(img: DomNode, context: DomNode | None) -> str:
    alt = collapse_ws(img.attrs.get("alt", ""))
    if alt:
        return alt
    if context is not None:
        for sibling in context.children:
            if sibling.kind == "element" and sibling.tag == "figcaption":
                caption = collapse_ws(sibling.visible_text())
                if caption:
                    return caption
    return collapse_ws(img.attrs.get("title", ""))


def format_image(img: DomNode, caption: str) -> str:
    """Wire form for a captioned image; uncaptioned or src-less images drop."""
    src = collapse_ws(img.attrs.get("src", ""))
    if not src or not caption:
        return ""
    return f"<img>image: {escape_text(src)}, caption: {escape_text(caption)}</img>"


def normalize_inline(nodes: list[DomNode], context: DomNode | None = None) -> str:
    """Reduce inline content to text plus retained formatting markup.

    Formatting tags (b/i/em/...) are kept bare, <a> collapses to its anchor
    text, images go through format_image, every other tag is stripped while
    its processed content is kept in order.  Whitespace runs collapse to
    single spaces.
    """

    def emit(node: DomNode) -> str:
        if node.kind == "text":
            return escape_text(node.text)
        if node.kind != "element":
            return ""
        cls = classify(node.tag)
        if cls is NodeClass.SKIP:
            return ""
        if cls is NodeClass.IMAGE:
            return format_image(node, _discover_caption(node, context))
        if cls is NodeClass.FORMAT_INLINE:
            if node.tag == "br":
                return "<br>"
            inner = "".join(emit(child) for child in node.children)
            return f"<{node.tag}>{inner}</{node.tag}>"
        if node.tag == "a":
            return escape_text(node.visible_text())
        # other inline tags (and stray blocks inside inline content): strip
        # the wrapper, keep processed children
        return "".join(emit(child) for child in node.children)

    raw = "".join(emit(node) for node in nodes)
    return collapse_ws(raw)


def _is_block_child(node: DomNode) -> bool:
    return node.kind == "element" and classify(node.tag) is NodeClass.BLOCK


def _row_segment(tr: DomNode) -> list[_Seg]:
    cells = [c for c in tr.children if c.kind == "element" and c.tag in ("td", "th")]
    if not cells:
        return _process_generic(tr)
    texts = [escape_text(layout_text(cell)) for cell in cells]
    inner = " | ".join(texts)
    if not collapse_ws(unescape_text(inner).replace("|", " ")):
        return []
    return [_Seg("tr", inner)]


def _table_children(table: DomNode) -> list[DomNode]:
    """Splice row-group wrappers (thead/tbody/tfoot) so a table's rows are
    direct children; keeps table segmentation in the table/tr shape the
    assembler knows how to regroup."""
    out: list[DomNode] = []
    for child in table.children:
        if child.kind == "element" and child.tag in ("thead", "tbody", "tfoot"):
            out.extend(child.children)
        else:
            out.append(child)
    return out


def _process_generic(el: DomNode) -> list[_Seg]:
    children = _table_children(el) if el.tag == "table" else el.children
    inline_nodes = [c for c in children if not _is_block_child(c)]
    block_children = [c for c in children if _is_block_child(c)]
    inner = normalize_inline(inline_nodes, context=el)

    if inner:
        segs = [_Seg(el.tag, inner)]
        for child in block_children:
            segs.extend(_process_block(child))
        return segs

    if block_children:
        segs: list[_Seg] = []
        for child in block_children:
            segs.extend(_process_block(child))
        if segs and not segs[0].merged:
            first = segs[0]
            segs[0] = _Seg(el.tag, f"<{first.tag}>{first.inner}</{first.tag}>", merged=True)
        return segs

    return []  # neither text nor children: disregarded


def _process_block(el: DomNode) -> list[_Seg]:
    if el.tag == "tr":
        return _row_segment(el)
    return _process_generic(el)


def _process_root_children(children: list[DomNode]) -> list[_Seg]:
    """Top-level handling: block children become segments, inline runs become
    anonymous <p> segments; the container itself never merges or emits."""
    segs: list[_Seg] = []
    run: list[DomNode] = []

    def flush_run():
        if run:
            inner = normalize_inline(run)
            if inner:
                segs.append(_Seg("p", inner))
            run.clear()

    for child in children:
        if _is_block_child(child):
            flush_run()
            segs.extend(_process_block(child))
        else:
            run.append(child)
    flush_run()
    return segs


_SENTENCE_END_RE = re.compile(r"[.!?。！？](?:\s+|$)")
_WORD_RE = re.compile(r"\S+\s*|\s+")


def _sentence_pieces(text: str) -> list[str]:
    cuts = [m.end() for m in _SENTENCE_END_RE.finditer(text)]
    pieces, start = [], 0
    for cut in cuts:
        pieces.append(text[start:cut])
        start = cut
    if start < len(text):
        pieces.append(text[start:])
    return pieces


def _word_pieces(text: str) -> list[str]:
    return [m.group(0) for m in _WORD_RE.finditer(text)]


def _split_text(text: str, limit: int) -> list[str]:
    """Partition text into fragments <= limit, cutting at sentence boundaries
    first, then words, then raw characters; concatenation is exact."""
    pieces: list[str] = []
    for sentence in _sentence_pieces(text):
        if len(sentence) <= limit:
            pieces.append(sentence)
            continue
        for word in _word_pieces(sentence):
            if len(word) <= limit:
                pieces.append(word)
            else:
                pieces.extend(word[i : i + limit] for i in range(0, len(word), limit))
    fragments: list[str] = []
    current = ""
    for piece in pieces:
        if current and len(current) + len(piece) > limit:
            fragments.append(current)
            current = piece
        else:
            current += piece
    if current:
        fragments.append(current)
    return fragments


def block_text(inner_html: str) -> str:
    """Visible text of a block's inner HTML (entities decoded)."""
    return parse_html(inner_html).visible_text()


def split_block(block: ContentBlock, cfg: SegmenterConfig, next_split_id: int) -> list[ContentBlock]:
    """Split an oversized block into tagged fragments carrying split triplets.

    Fragments hold the block's visible text only; retained inline markup does
    not survive a split (a cut can land inside a tag pair).
    """
    text = block_text(block.inner_html)
    fragments = _split_text(text, cfg.max_block_chars)
    if len(fragments) <= 1:
        return [block]
    total = len(fragments)
    return [
        ContentBlock(
            index=0,
            tag=block.tag,
            inner_html=escape_text(fragment),
            split=SplitInfo(next_split_id, part, total),
        )
        for part, fragment in enumerate(fragments, start=1)
    ]


def segment(doc: DomNode, cfg: SegmenterConfig, salvage: list[str]) -> BlockSequence:
    """Produce the numbered block sequence for a cleaned document.

    Salvaged script text is appended at the very end as <p> blocks; oversized
    blocks (including salvage) are split; indices are assigned 1..n last.
    """
    body = doc.find_first("body")
    if body is not None:
        roots = body.children
    else:
        # no body: unwrap a bare <html> wrapper, else start from the
        # outermost nodes in order
        html_el = next(
            (c for c in doc.children if c.kind == "element" and c.tag == "html"), None
        )
        roots = html_el.children if html_el is not None else doc.children
    segs = _process_root_children(list(roots))

    for text in salvage:
        inner = escape_text(collapse_ws(text))
        if inner:
            segs.append(_Seg("p", inner))

    blocks: list[ContentBlock] = []
    next_split_id = 1
    for seg in segs:
        block = ContentBlock(index=0, tag=seg.tag, inner_html=seg.inner)
        if len(block_text(seg.inner)) > cfg.max_block_chars:
            parts = split_block(block, cfg, next_split_id)
            if len(parts) > 1:
                next_split_id += 1
            blocks.extend(parts)
        else:
            blocks.append(block)

    for position, block in enumerate(blocks, start=1):
        block.index = position
    return BlockSequence(blocks=blocks)


def render_block_line(block: ContentBlock) -> str:
    split_attrs = ""
    if block.split is not None:
        split_attrs = (
            f' split-id="{block.split.split_id}"'
            f' split-part="{block.split.split_part}"'
            f' split-total="{block.split.split_total}"'
        )
    return f"[{block.index}] <{block.tag}{split_attrs}>{block.inner_html}</{block.tag}>"


def render_indexed(seq: BlockSequence) -> str:
    """One line per block: ``[i] <tag>content</tag>``; wire format, byte-stable."""
    return "\n".join(render_block_line(block) for block in seq.blocks)
