"""Seeded synthetic page generator for corpus-style tests.

Pages are deterministic functions of the seed: same seed, same bytes.  The
shapes mimic common real-page structure (nav/header noise, article body with
headings, lists, tables, quotes, figures, scripts, comments).
"""

from __future__ import annotations

import random

WORDS = (
    "the quick brown fox jumps over lazy dog while seventeen engineers "
    "review ancient harbor records during winter the museum archive opens "
    "daily except monday visitors can request guided tours about maritime "
    "history salt trade routes and lighthouse construction methods every "
    "exhibit includes original documents photographs and restored tools "
    "from local workshops researchers study shipping manifests weather "
    "logs and port ledgers to understand regional commerce patterns"
).split()

CJK_SENTENCES = [
    "博物馆每天上午九点开放。",
    "请提前在网上预约参观时间！",
    "展览介绍了海上贸易的历史？",
    "这里收藏了大量的航海日志。",
]


def _words(rng: random.Random, count: int) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(count))


def _sentence(rng: random.Random) -> str:
    text = _words(rng, rng.randint(6, 16)).capitalize()
    return text + rng.choice([".", ".", ".", "!", "?"])


def paragraph(rng: random.Random, sentences: int | None = None) -> str:
    n = sentences or rng.randint(2, 5)
    return " ".join(_sentence(rng) for _ in range(n))


def _nav(rng: random.Random) -> str:
    items = "".join(f"<li><a href='/s/{i}'>{_words(rng, 1).title()}</a></li>" for i in range(5))
    return f"<nav><ul>{items}</ul></nav>"


def _list(rng: random.Random, ordered: bool) -> str:
    tag = "ol" if ordered else "ul"
    items = "".join(f"<li>{_sentence(rng)}</li>" for _ in range(rng.randint(3, 6)))
    return f"<{tag}>{items}</{tag}>"


def _table(rng: random.Random) -> str:
    rows = []
    for _ in range(rng.randint(2, 5)):
        cells = "".join(f"<td>{_words(rng, rng.randint(1, 4))}</td>" for _ in range(3))
        rows.append(f"<tr>{cells}</tr>")
    return "<table>" + "".join(rows) + "</table>"


def _figure(rng: random.Random) -> str:
    name = _words(rng, 1)
    return (
        f"<figure><img src='/img/{name}.jpg' alt='{_words(rng, 3)}'>"
        f"<figcaption>{_sentence(rng)}</figcaption></figure>"
    )


def _script_noise(rng: random.Random) -> str:
    return f"<script>var t{rng.randint(0, 99)} = {rng.randint(1, 9999)}; track(t{rng.randint(0, 99)});</script>"


def _salvage_script(rng: random.Random) -> str:
    hidden = _sentence(rng)
    return f'<script>render("<div><p>{hidden}</p></div>");</script>'


def make_page(
    seed: int,
    paragraphs: int = 8,
    with_lists: bool = True,
    with_tables: bool = True,
    with_images: bool = True,
    with_noise: bool = True,
    with_salvage: bool = False,
    cjk: bool = False,
) -> str:
    rng = random.Random(seed)
    title = _words(rng, rng.randint(2, 5)).title()
    parts = [f"<html><head><title>{title}</title>"]
    if with_noise:
        parts.append("<meta charset='utf-8'><style>body{margin:0}</style>")
        parts.append("<link rel='stylesheet' href='/site.css'>")
    parts.append("</head><body>")
    if with_noise:
        parts.append(_nav(rng))
        parts.append(f"<header><div class='banner'>{_words(rng, 4)}</div></header>")
        parts.append(_script_noise(rng))
    parts.append(f"<article><h1>{title}</h1>")
    for i in range(paragraphs):
        parts.append(f"<p>{paragraph(rng)}</p>")
        if cjk and i % 3 == 1:
            parts.append(f"<p>{''.join(rng.choice(CJK_SENTENCES) for _ in range(3))}</p>")
        if with_lists and i % 4 == 1:
            parts.append(_list(rng, ordered=rng.random() < 0.4))
        if with_tables and i % 5 == 2:
            parts.append(_table(rng))
        if with_images and i % 6 == 3:
            parts.append(_figure(rng))
        if i % 7 == 4:
            parts.append(f"<blockquote><p>{_sentence(rng)}</p></blockquote>")
        if i % 5 == 3:
            parts.append(f"<h2>{_words(rng, 3).title()}</h2>")
    parts.append("</article>")
    if with_salvage:
        parts.append(_salvage_script(rng))
    if with_noise:
        parts.append("<aside><ul><li><a href='/r/1'>related one</a></li></ul></aside>")
        parts.append("<!-- page footer -->")
        parts.append(f"<footer><p>copyright {_words(rng, 2)}</p></footer>")
        parts.append("<form action='/sub'><input name='email'><button>Go</button></form>")
    parts.append("</body></html>")
    return "".join(parts)


def make_big_page(seed: int, min_bytes: int = 300_000) -> str:
    """A long article page; min_bytes controls the total HTML size."""
    rng = random.Random(seed)
    title = _words(rng, 3).title()
    parts = [f"<html><head><title>{title}</title></head><body>", _nav(rng)]
    parts.append(f"<article><h1>{title}</h1>")
    size = 0
    section = 0
    while size < min_bytes:
        section += 1
        chunk = f"<h2>Section {section}</h2>"
        for _ in range(6):
            chunk += f"<p>{paragraph(rng, sentences=5)}</p>"
        if section % 4 == 0:
            chunk += _table(rng)
        parts.append(chunk)
        size += len(chunk)
    parts.append("</article></body></html>")
    return "".join(parts)


def corpus(count: int, start_seed: int = 100) -> list[str]:
    pages = []
    for i in range(count):
        seed = start_seed + i
        pages.append(
            make_page(
                seed,
                paragraphs=6 + (i % 9),
                with_lists=i % 2 == 0,
                with_tables=i % 3 != 1,
                with_images=i % 2 == 1,
                with_noise=True,
                with_salvage=i % 4 == 2,
                cjk=i % 5 == 3,
            )
        )
    return pages
