"""Tolerant HTML parsing, cleaning, and tag classification.

The tree builder sits on top of the stdlib tokenizer (``html.parser``) and
never raises on malformed input: unclosed tags are closed at EOF, stray end
tags are dropped, and a handful of HTML5 implied-end-tag rules keep sibling
``<p>``/``<li>``/``<tr>`` elements from nesting into each other.  Recovery
behavior on broken markup is pinned by golden-file tests, not re-derived.

``clean`` removes everything that can never be page content (scripts, styles,
head, form controls, comments, ...) but first scans script bodies for HTML
string literals and salvages their visible text, since some pages ship real
content inside JavaScript.
"""

from __future__ import annotations

import html as html_entities
import re
from dataclasses import dataclass, field
from enum import Enum
from html.parser import HTMLParser


class NodeClass(Enum):
    BLOCK = "block"
    INLINE = "inline"
    FORMAT_INLINE = "format_inline"
    IMAGE = "image"
    VOID = "void"
    SKIP = "skip"


BLOCK_TAGS = {
    "div", "p", "h1", "h2", "h3", "h4", "h5", "h6", "ul", "ol", "li",
    "table", "thead", "tbody", "tr", "td", "th", "blockquote", "pre",
    "section", "article", "header", "footer", "nav", "aside", "main",
    "figure", "figcaption", "dl", "dt", "dd",
}
FORMAT_INLINE_TAGS = {"b", "strong", "i", "em", "u", "code", "br", "sub", "sup", "s"}
IMAGE_TAGS = {"img"}
SKIP_TAGS = {
    "script", "style", "head", "meta", "link", "iframe", "svg", "canvas",
    "form", "input", "button", "select",
}

# Elements that never take children (parser-level concern, distinct from the
# content classification above: img/br/link/meta are void *and* classified).
VOID_TAGS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link",
    "meta", "param", "source", "track", "wbr",
}

# Start tags that implicitly close currently-open elements (subset of the
# HTML5 rules, enough to keep flat sibling structures flat).
_P_CLOSERS = BLOCK_TAGS | {"hr", "address", "details", "fieldset", "form", "menu"}
_IMPLIED_CLOSE = {
    "li": {"li"},
    "dt": {"dt", "dd"},
    "dd": {"dt", "dd"},
    "tr": {"tr", "td", "th"},
    "td": {"td", "th"},
    "th": {"td", "th"},
    "thead": {"tr", "td", "th"},
    "tbody": {"tr", "td", "th", "thead"},
    "tfoot": {"tr", "td", "th", "tbody"},
    "option": {"option"},
}


def classify(tag: str) -> NodeClass:
    """Map a lowercase tag name to its content class; unknown tags are inline."""
    if tag in BLOCK_TAGS:
        return NodeClass.BLOCK
    if tag in FORMAT_INLINE_TAGS:
        return NodeClass.FORMAT_INLINE
    if tag in IMAGE_TAGS:
        return NodeClass.IMAGE
    if tag in SKIP_TAGS:
        return NodeClass.SKIP
    return NodeClass.INLINE


@dataclass
class DomNode:
    """One node of the parsed tree: document, element, text, or comment."""

    kind: str  # "document" | "element" | "text" | "comment"
    tag: str = ""
    attrs: dict[str, str] = field(default_factory=dict)
    children: list["DomNode"] = field(default_factory=list)
    text: str = ""

    def find_first(self, tag: str) -> "DomNode | None":
        for node in self.walk():
            if node.kind == "element" and node.tag == tag:
                return node
        return None

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def visible_text(self) -> str:
        """Concatenated text-node content, in document order."""
        parts = []
        for node in self.walk():
            if node.kind == "text":
                parts.append(node.text)
        return "".join(parts)


@dataclass
class RawDocument:
    """Source page: URL, raw HTML text, and the extracted title."""

    url: str = ""
    html: str = ""
    title: str = ""


def document_from_html(html: str, url: str = "") -> RawDocument:
    """Bundle page text with its extracted (markup-free, trimmed) title."""
    return RawDocument(url=url, html=html, title=extract_title(parse_html(html)))


# Nesting cap: elements beyond this depth become leaves (their content piles
# up as siblings), which keeps every later tree walk within recursion limits.
MAX_TREE_DEPTH = 256


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = DomNode("document")
        self.stack: list[DomNode] = [self.root]

    def _top(self) -> DomNode:
        return self.stack[-1]

    def handle_starttag(self, tag, attrs):
        closes = _IMPLIED_CLOSE.get(tag, set())
        if tag in _P_CLOSERS:
            closes = closes | {"p"}
        while len(self.stack) > 1 and self._top().tag in closes:
            self.stack.pop()
        node = DomNode("element", tag=tag)
        for name, value in attrs:
            node.attrs.setdefault(name, value if value is not None else "")
        self._top().children.append(node)
        if tag not in VOID_TAGS and len(self.stack) < MAX_TREE_DEPTH:
            self.stack.append(node)

    def handle_endtag(self, tag):
        if tag in VOID_TAGS:
            return
        for depth in range(len(self.stack) - 1, 0, -1):
            if self.stack[depth].tag == tag:
                del self.stack[depth:]
                return
        # stray end tag: ignore

    def handle_data(self, data):
        if not data:
            return
        top = self._top()
        if top.children and top.children[-1].kind == "text":
            top.children[-1].text += data
        else:
            top.children.append(DomNode("text", text=data))

    def handle_comment(self, data):
        self._top().children.append(DomNode("comment", text=data))


def parse_html(html: str) -> DomNode:
    """Parse any string into a best-effort document tree; never raises."""
    builder = _TreeBuilder()
    try:
        builder.feed(html)
        builder.close()
    except Exception:
        pass  # keep whatever tree was built before the tokenizer choked
    return builder.root


def decode_html_bytes(raw: bytes) -> str:
    """Decode page bytes as UTF-8, replacing invalid sequences."""
    return raw.decode("utf-8", errors="replace")


def collapse_ws(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def layout_text(node: DomNode) -> str:
    """Visible text with separators at block-element boundaries, collapsed.

    "<div>a</div><div>b</div>" flattens to "a b", not "ab", matching how the
    markup lays out.
    """
    parts: list[str] = []

    def walk(n: DomNode) -> None:
        if n.kind == "text":
            parts.append(n.text)
            return
        if n.kind not in ("element", "document"):
            return
        breaks = n.kind == "element" and classify(n.tag) is NodeClass.BLOCK
        if breaks:
            parts.append(" ")
        for child in n.children:
            walk(child)
        if breaks:
            parts.append(" ")

    walk(node)
    return collapse_ws("".join(parts))


# svg icons carry their own <title>; template content is inert
_TITLE_OPAQUE = (SKIP_TAGS - {"head"}) | {"template"}


def extract_title(doc: DomNode) -> str:
    """Text of the first real <title> element, whitespace-collapsed; "" if absent."""

    def find(node: DomNode) -> DomNode | None:
        for child in node.children:
            if child.kind != "element":
                continue
            if child.tag == "title":
                return child
            if child.tag in _TITLE_OPAQUE:
                continue
            found = find(child)
            if found is not None:
                return found
        return None

    node = find(doc)
    if node is None:
        return ""
    return collapse_ws(node.visible_text())


_JS_ESCAPE_RE = re.compile(r"\\([\"'/\\])")
_JS_WS_ESCAPE_RE = re.compile(r"\\[ntr]")
# Bounds keep salvage linear on adversarial tag soup (a script full of
# unclosed "<a" would otherwise cost quadratic scanning); real embedded
# fragments are tiny compared to every limit here.
_MAX_OPEN_TAG_ATTRS = 1_000
_MAX_FRAGMENT_SPAN = 20_000
_MAX_SCRIPT_SCAN = 512_000
_MAX_FRAGMENTS = 64
_SALVAGE_SCAN_BUDGET = 20_000_000
_OPEN_TAG_RE = re.compile(r"<([a-zA-Z][a-zA-Z0-9]*)\b[^>]{0,%d}>" % _MAX_OPEN_TAG_ATTRS)
_EMBEDDED_HTML_RE = re.compile(
    r"<([a-zA-Z][a-zA-Z0-9]*)\b[^>]{0,%d}>(.{0,%d}?)</\1\s*>"
    % (_MAX_OPEN_TAG_ATTRS, _MAX_FRAGMENT_SPAN),
    re.DOTALL,
)


def _unescape_js(text: str) -> str:
    text = _JS_WS_ESCAPE_RE.sub(" ", text)
    return _JS_ESCAPE_RE.sub(lambda m: m.group(1), text)


def _find_close(hay: str, tag: str, start: int, end: int) -> tuple[int, int]:
    """Position and end of the first well-formed ``</tag>`` in hay[start:end]."""
    needle = f"</{tag}"
    pos = hay.find(needle, start, end)
    while pos != -1:
        i = pos + len(needle)
        while i < len(hay) and hay[i] in " \t\r\n":
            i += 1
        if i < len(hay) and hay[i] == ">":
            return pos, i + 1
        pos = hay.find(needle, pos + 1, end)
    return -1, -1


def _salvage_from_script(script_text: str) -> list[str]:
    """Visible text of balanced ``<tag ...>...</tag>`` fragments embedded in a
    script body, in order."""
    hay = _unescape_js(script_text[:_MAX_SCRIPT_SCAN])
    found: list[str] = []
    cursor = 0
    budget = _SALVAGE_SCAN_BUDGET
    while budget > 0 and len(found) < _MAX_FRAGMENTS:
        open_match = _OPEN_TAG_RE.search(hay, cursor)
        if open_match is None:
            break
        window_end = min(len(hay), open_match.end() + _MAX_FRAGMENT_SPAN)
        close_pos, close_end = _find_close(hay, open_match.group(1), open_match.end(), window_end)
        budget -= (window_end if close_pos == -1 else close_pos) - open_match.end()
        if close_pos == -1:
            cursor = open_match.end()
            continue
        candidate = hay[open_match.start() : close_end]
        if _EMBEDDED_HTML_RE.fullmatch(candidate) is None:
            cursor = open_match.end()
            continue
        text = layout_text(parse_html(candidate))
        if text:
            found.append(text)
        cursor = close_end
    return found


def clean(doc: DomNode) -> tuple[DomNode, list[str]]:
    """Strip non-content nodes, salvaging text hidden inside scripts.

    Removes comments, <head>, <template>, and every skip-class element
    (script/style/link/iframe/form controls/...); <noscript> is unwrapped in
    place since its content is visible fallback text.  Returns a new tree and
    the salvaged strings in document order.  Idempotent.
    """
    salvage: list[str] = []

    def rebuild(node: DomNode) -> list[DomNode]:
        if node.kind == "comment":
            return []
        if node.kind == "text":
            return [DomNode("text", text=node.text)]
        if node.kind == "element":
            if node.tag == "script":
                salvage.extend(_salvage_from_script(node.visible_text()))
                return []
            if node.tag in ("head", "template"):
                return []
            if node.tag == "noscript":
                out = []
                for child in node.children:
                    out.extend(rebuild(child))
                return out
            if node.tag in SKIP_TAGS:
                return []
        fresh = DomNode(node.kind, tag=node.tag, attrs=dict(node.attrs))
        for child in node.children:
            fresh.children.extend(rebuild(child))
        return [fresh]

    rebuilt = rebuild(doc)
    return (rebuilt[0] if rebuilt else DomNode("document")), salvage


def escape_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def escape_attr(text: str) -> str:
    return escape_text(text).replace('"', "&quot;")


def unescape_text(text: str) -> str:
    return html_entities.unescape(text)


def serialize(node: DomNode) -> str:
    """Deterministic serialization: double-quoted attrs, insertion order."""
    if node.kind == "text":
        return escape_text(node.text)
    if node.kind == "comment":
        return ""
    if node.kind == "document":
        return "".join(serialize(child) for child in node.children)
    attrs = "".join(f' {name}="{escape_attr(value)}"' for name, value in node.attrs.items())
    if node.tag in VOID_TAGS:
        return f"<{node.tag}{attrs}>"
    inner = "".join(serialize(child) for child in node.children)
    return f"<{node.tag}{attrs}>{inner}</{node.tag}>"
