from __future__ import annotations

import re
import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
PAGES_DIR = TESTS_DIR / "fixtures" / "pages"
GOLDENS_DIR = TESTS_DIR / "goldens"

sys.path.insert(0, str(TESTS_DIR))  # makes pagegen importable as a plain module


def strip_markdown(text: str) -> str:
    """Remove markdown syntax, keeping visible words (images vanish, matching
    the plain-text rendering)."""
    out_lines = []
    for line in text.splitlines():
        if re.fullmatch(r"[|\s\-:]*", line):
            continue  # table separator or blank
        line = re.sub(r"!\[[^\]]*\]\([^)]*\)", " ", line)
        line = re.sub(r"^\s*(#{1,6} |>\s?|- |\d+\. )", "", line)
        line = line.replace("**", "").replace("`", "")
        line = re.sub(r"(?<!\w)\*|\*(?!\w)", "", line)
        line = line.replace("|", " ")
        out_lines.append(line)
    return re.sub(r"\s+", " ", " ".join(out_lines)).strip()


def normalize_ws(text: str) -> str:
    return re.sub(r"\s+", " ", text.replace("|", " ")).strip()


def fixture_pages() -> dict[str, str]:
    return {p.name: p.read_text(encoding="utf-8") for p in sorted(PAGES_DIR.glob("*.html"))}


def tree_dump(node, depth: int = 0) -> str:
    pad = "  " * depth
    if node.kind == "text":
        return f"{pad}text {node.text!r}\n"
    if node.kind == "comment":
        return f"{pad}comment {node.text!r}\n"
    label = node.kind if node.kind == "document" else node.tag
    out = f"{pad}{label}\n"
    for child in node.children:
        out += tree_dump(child, depth + 1)
    return out


@pytest.fixture(scope="session")
def pages() -> dict[str, str]:
    return fixture_pages()
