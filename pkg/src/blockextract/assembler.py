"""Map selected index intervals back to blocks and rebuild a standalone page.

Selection completes partial split groups so fragment rejoining is always
lossless; rejoined blocks then go through a structural pass that regroups
flat runs produced by segmentation: a parent-wrapping-first-child block like
``<ul><li>first</li></ul>`` gathers the ``<li>`` blocks that follow it back
into one list (same for ol/li, table/tr, dl/dt+dd).  Everything else passes
through unchanged, in order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .dom import DomNode, collapse_ws, parse_html, serialize, unescape_text
from .intervals import IntervalSet
from .segmenter import BlockSequence, ContentBlock

_GATHER_CHILDREN = {
    "ul": {"li"},
    "ol": {"li"},
    "table": {"tr"},
    "dl": {"dt", "dd"},
}


class IndexOutOfRange(Exception):
    pass


class IncompleteSplitGroup(Exception):
    pass


@dataclass
class SelectedBlocks:
    blocks: list[ContentBlock]


@dataclass
class AssembledDocument:
    html: str
    block_count: int
    title: str


def select(seq: BlockSequence, iset: IntervalSet) -> SelectedBlocks:
    """Blocks whose index is a member, original order; split groups whose
    fragments are partially selected are completed."""
    n = len(seq.blocks)
    for lo, hi in iset.intervals:
        if lo < 1 or hi > n:
            raise IndexOutOfRange(f"interval [{lo},{hi}] outside 1..{n}")
    members = iset.members()
    selected_groups = {
        b.split.split_id for b in seq.blocks if b.split is not None and b.index in members
    }
    picked = [
        b for b in seq.blocks
        if b.index in members
        or (b.split is not None and b.split.split_id in selected_groups)
    ]
    return SelectedBlocks(blocks=picked)


def rejoin_fragments(sel: SelectedBlocks) -> SelectedBlocks:
    """Collapse each split group to one block, fragments joined in part order."""
    groups: dict[int, list[ContentBlock]] = {}
    for block in sel.blocks:
        if block.split is not None:
            groups.setdefault(block.split.split_id, []).append(block)

    for split_id, fragments in groups.items():
        parts = sorted(f.split.split_part for f in fragments)
        total = fragments[0].split.split_total
        if parts != list(range(1, total + 1)):
            raise IncompleteSplitGroup(f"split group {split_id} has parts {parts} of {total}")

    out: list[ContentBlock] = []
    done: set[int] = set()
    for block in sel.blocks:
        if block.split is None:
            out.append(block)
            continue
        gid = block.split.split_id
        if gid in done:
            continue
        done.add(gid)
        fragments = sorted(groups[gid], key=lambda f: f.split.split_part)
        joined = "".join(f.inner_html for f in fragments)
        out.append(ContentBlock(index=fragments[0].index, tag=block.tag, inner_html=joined))
    return SelectedBlocks(blocks=out)


_IMG_PSEUDO_RE = re.compile(r"<img>image: (.*?), caption: (.*?)</img>")


def _parse_inner(inner_html: str) -> list[DomNode]:
    """Parse block inner HTML into nodes, converting image pseudo-tags back
    into real <img src alt> elements first."""
    nodes: list[DomNode] = []
    pos = 0
    for match in _IMG_PSEUDO_RE.finditer(inner_html):
        if match.start() > pos:
            nodes.extend(parse_html(inner_html[pos : match.start()]).children)
        img = DomNode("element", tag="img")
        img.attrs["src"] = unescape_text(match.group(1))
        img.attrs["alt"] = unescape_text(match.group(2))
        nodes.append(img)
        pos = match.end()
    if pos < len(inner_html):
        nodes.extend(parse_html(inner_html[pos:]).children)
    return nodes


def _block_node(block: ContentBlock) -> DomNode:
    node = DomNode("element", tag=block.tag)
    node.children = _parse_inner(block.inner_html)
    return node


def _wrapped_child(block: ContentBlock, child_tags: set[str]) -> DomNode | None:
    """The single wrapped child element if the block is a merged
    parent-wrapping-first-child of the expected type, else None."""
    children = _parse_inner(block.inner_html)
    elements = [c for c in children if c.kind == "element"]
    stray_text = any(c.kind == "text" and c.text.strip() for c in children)
    if stray_text or len(elements) != 1:
        return None
    return elements[0] if elements[0].tag in child_tags else None


def reconstruct(sel: SelectedBlocks) -> list[DomNode]:
    """Regroup gatherable parent/child runs; leave other blocks unchanged."""
    blocks = sel.blocks
    nodes: list[DomNode] = []
    i = 0
    while i < len(blocks):
        block = blocks[i]
        child_tags = _GATHER_CHILDREN.get(block.tag)
        first_child = _wrapped_child(block, child_tags) if child_tags else None
        if first_child is None:
            nodes.append(_block_node(block))
            i += 1
            continue
        parent = DomNode("element", tag=block.tag, children=[first_child])
        i += 1
        while i < len(blocks) and blocks[i].tag in child_tags and blocks[i].split is None:
            parent.children.append(_block_node(blocks[i]))
            i += 1
        nodes.append(parent)
    return nodes


def build_html(nodes: list[DomNode], title: str) -> AssembledDocument:
    """Wrap reconstructed nodes in a standalone document with the page title."""
    converted = [_convert_pseudo_images(node) for node in nodes]
    body_inner = "".join(serialize(node) for node in converted)
    title_text = collapse_ws(title)
    html = (
        f"<html><head><title>{_escape_title(title_text)}</title></head>"
        f"<body>{body_inner}</body></html>"
    )
    return AssembledDocument(html=html, block_count=len(nodes), title=title_text)


def _escape_title(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _convert_pseudo_images(node: DomNode) -> DomNode:
    """Defensive pass for hand-built trees whose text still carries the image
    pseudo-tag wire form."""
    if node.kind in ("text", "comment"):
        return node
    fresh = DomNode(node.kind, tag=node.tag, attrs=dict(node.attrs))
    for child in node.children:
        if child.kind != "text" or not _IMG_PSEUDO_RE.search(child.text):
            fresh.children.append(_convert_pseudo_images(child))
            continue
        pos = 0
        for match in _IMG_PSEUDO_RE.finditer(child.text):
            if match.start() > pos:
                fresh.children.append(DomNode("text", text=child.text[pos : match.start()]))
            img = DomNode("element", tag="img")
            img.attrs["src"] = unescape_text(match.group(1))
            img.attrs["alt"] = unescape_text(match.group(2))
            fresh.children.append(img)
            pos = match.end()
        if pos < len(child.text):
            fresh.children.append(DomNode("text", text=child.text[pos:]))
    return fresh
