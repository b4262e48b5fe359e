"""Deterministic conversion of an assembled document to Markdown or text.

A purpose-built converter keeps the output byte-stable: fixed heading/list/
table/quote mappings, two-space nested-list indents, no dependence on an
external tool's version-to-version quirks.
"""

from __future__ import annotations

from enum import Enum

from .assembler import AssembledDocument
from .dom import DomNode, collapse_ws, parse_html

_HEADINGS = {"h1": 1, "h2": 2, "h3": 3, "h4": 4, "h5": 5, "h6": 6}
_CONTAINER_TAGS = {
    "div", "section", "article", "main", "header", "footer", "aside",
    "figure", "dl", "thead", "tbody",
}
_HARD_BREAK = ""


class OutputFormat(Enum):
    HTML = "html"
    MARKDOWN = "markdown"
    TEXT = "text"


def _inline_md(nodes: list[DomNode]) -> str:
    def emit(node: DomNode) -> str:
        if node.kind == "text":
            return node.text
        if node.kind != "element":
            return ""
        inner = "".join(emit(c) for c in node.children)
        if node.tag in ("b", "strong"):
            return f"**{inner.strip()}**" if inner.strip() else ""
        if node.tag in ("i", "em"):
            return f"*{inner.strip()}*" if inner.strip() else ""
        if node.tag == "code":
            return f"`{inner.strip()}`" if inner.strip() else ""
        if node.tag == "br":
            return _HARD_BREAK
        if node.tag == "img":
            src = node.attrs.get("src", "")
            alt = node.attrs.get("alt", "")
            return f"![{alt}]({src})"
        return inner

    text = collapse_ws("".join(emit(n) for n in nodes))
    return text.replace(f"{_HARD_BREAK} ", _HARD_BREAK).replace(f" {_HARD_BREAK}", _HARD_BREAK).replace(_HARD_BREAK, "  \n")


def _has_block_children(node: DomNode) -> bool:
    return any(
        c.kind == "element" and (c.tag in _CONTAINER_TAGS or c.tag in _HEADINGS or
                                 c.tag in ("p", "ul", "ol", "li", "table", "tr",
                                           "blockquote", "pre", "dt", "dd"))
        for c in node.children
    )


def _list_md(node: DomNode, depth: int, ordered: bool) -> str:
    lines: list[str] = []
    counter = 0
    indent = "  " * depth
    for child in node.children:
        if child.kind != "element" or child.tag != "li":
            continue
        counter += 1
        marker = f"{counter}. " if ordered else "- "
        nested = [c for c in child.children if c.kind == "element" and c.tag in ("ul", "ol")]
        nested_ids = {id(c) for c in nested}
        plain = [c for c in child.children if id(c) not in nested_ids]
        text = _inline_md(plain)
        lines.append(f"{indent}{marker}{text}".rstrip())
        for sub in nested:
            lines.append(_list_md(sub, depth + 1, ordered=sub.tag == "ol"))
    return "\n".join(lines)


def _row_cells(tr: DomNode) -> list[str]:
    cells = [c for c in tr.children if c.kind == "element" and c.tag in ("td", "th")]
    if cells:
        return [_inline_md(c.children) for c in cells]
    return [part.strip() for part in collapse_ws(tr.visible_text()).split(" | ")]


def _table_md(node: DomNode) -> str:
    rows: list[DomNode] = []
    for child in node.walk():
        if child.kind == "element" and child.tag == "tr":
            rows.append(child)
    lines: list[str] = []
    for pos, tr in enumerate(rows):
        cells = _row_cells(tr)
        lines.append("| " + " | ".join(cells) + " |")
        if pos == 0:
            lines.append("| " + " | ".join(["---"] * len(cells)) + " |")
    return "\n".join(lines)


def _block_md(node: DomNode, depth: int = 0) -> list[str]:
    if node.kind == "text":
        text = collapse_ws(node.text)
        return [text] if text else []
    if node.kind != "element":
        return []
    tag = node.tag
    if tag in _HEADINGS:
        text = _inline_md(node.children)
        return [f"{'#' * _HEADINGS[tag]} {text}"] if text else []
    if tag in ("ul", "ol"):
        block = _list_md(node, depth, ordered=tag == "ol")
        return [block] if block else []
    if tag == "li":
        text = _inline_md(node.children)
        return [f"- {text}"] if text else []
    if tag == "table":
        block = _table_md(node)
        return [block] if block else []
    if tag == "tr":
        cells = _row_cells(node)
        return ["| " + " | ".join(cells) + " |"] if any(cells) else []
    if tag == "dt":
        text = _inline_md(node.children)
        return [f"**{text}**"] if text else []
    if tag == "blockquote":
        inner = _blocks_md(node.children, depth)
        quoted = "\n".join(f"> {line}" if line else ">" for line in inner.splitlines())
        return [quoted] if quoted else []
    if tag == "pre":
        text = node.visible_text().strip()
        return [f"```\n{text}\n```"] if text else []
    if tag == "img":
        return [f"![{node.attrs.get('alt', '')}]({node.attrs.get('src', '')})"]
    if _has_block_children(node):
        blocks: list[str] = []
        for child in node.children:
            blocks.extend(_block_md(child, depth))
        return blocks
    text = _inline_md(node.children)
    return [text] if text else []


def _blocks_md(nodes: list[DomNode], depth: int = 0) -> str:
    blocks: list[str] = []
    for node in nodes:
        blocks.extend(_block_md(node, depth))
    return "\n\n".join(blocks)


def to_markdown(doc: AssembledDocument) -> str:
    body = parse_html(doc.html).find_first("body")
    if body is None:
        return ""
    return _blocks_md(body.children)


def _block_text(node: DomNode) -> list[str]:
    if node.kind == "text":
        text = collapse_ws(node.text)
        return [text] if text else []
    if node.kind != "element":
        return []
    if _has_block_children(node):
        blocks: list[str] = []
        for child in node.children:
            blocks.extend(_block_text(child))
        return blocks
    text = collapse_ws(node.visible_text())
    return [text] if text else []


def to_text(doc: AssembledDocument) -> str:
    """Visible text, one paragraph per block, formatting tags dropped."""
    body = parse_html(doc.html).find_first("body")
    if body is None:
        return ""
    blocks: list[str] = []
    for node in body.children:
        blocks.extend(_block_text(node))
    return "\n\n".join(blocks)
