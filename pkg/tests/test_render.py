from __future__ import annotations

from blockextract.assembler import AssembledDocument
from blockextract.chunker import default_token_counter
from blockextract.render import OutputFormat, to_markdown, to_text

import pagegen


def doc_from(html_body: str, title: str = "") -> AssembledDocument:
    html = f"<html><head><title>{title}</title></head><body>{html_body}</body></html>"
    return AssembledDocument(html=html, block_count=0, title=title)


def md(body: str) -> str:
    return to_markdown(doc_from(body))


def txt(body: str) -> str:
    return to_text(doc_from(body))


def test_headings():
    assert md("<h1>T</h1>") == "# T"
    assert md("<h3>Deep</h3>") == "### Deep"


def test_paragraphs_blank_line_separated():
    assert md("<p>A</p><p>B</p>") == "A\n\nB"


def test_unordered_list():
    assert md("<ul><li>A</li><li>B</li></ul>") == "- A\n- B"


def test_ordered_list_numbered():
    assert md("<ol><li>A</li><li>B</li><li>C</li></ol>") == "1. A\n2. B\n3. C"


def test_nested_list_indents_two_spaces():
    got = md("<ul><li>A<ul><li>A1</li></ul></li><li>B</li></ul>")
    assert got == "- A\n  - A1\n- B"


def test_bold_italic_code():
    assert md("<p>Hi <b>there</b></p>") == "Hi **there**"
    assert md("<p><em>soft</em> and <code>mono</code></p>") == "*soft* and `mono`"


def test_pre_fenced():
    assert md("<pre>line1\nline2</pre>") == "```\nline1\nline2\n```"


def test_blockquote_prefixed():
    assert md("<blockquote><p>quoted words</p></blockquote>") == "> quoted words"


def test_table_pipes_and_separator():
    got = md("<table><tr><th>A</th><th>B</th></tr><tr><td>1</td><td>2</td></tr></table>")
    assert got == "| A | B |\n| --- | --- |\n| 1 | 2 |"


def test_table_from_consolidated_rows():
    got = md("<table><tr>A | B</tr><tr>1 | 2</tr></table>")
    assert got == "| A | B |\n| --- | --- |\n| 1 | 2 |"


def test_image_markdown():
    assert md('<p><img src="u.png" alt="Cat"></p>') == "![Cat](u.png)"


def test_definition_list_terms_bold():
    got = md("<dl><dt>Term</dt><dd>Meaning of it</dd></dl>")
    assert got == "**Term**\n\nMeaning of it"


def test_br_hard_break():
    assert md("<p>one<br>two</p>") == "one  \ntwo"


def test_entities_decoded():
    assert md("<p>a &amp; b &lt; c</p>") == "a & b < c"
    assert txt("<p>a &amp; b</p>") == "a & b"


def test_to_text_basics():
    assert txt("<p>Hi <b>there</b></p>") == "Hi there"
    assert txt("") == ""
    assert txt("<p>A</p><p>B</p>") == "A\n\nB"


def test_markdown_deterministic():
    body = "<h1>T</h1><p>x <b>y</b></p><ul><li>i</li></ul>"
    assert md(body) == md(body)


def test_entity_decoding_is_single_pass():
    # double-encoded input decodes exactly one level, never two
    assert md("<p>a &amp;amp; b</p>") == "a &amp; b"


from conftest import normalize_ws, strip_markdown


def test_markdown_text_equivalence_on_generated_pages():
    from blockextract.pipeline import PipelineConfig, extract

    for seed in (0, 4, 9):
        html = pagegen.make_page(seed)
        config = PipelineConfig(backend="select_all", format=OutputFormat.MARKDOWN)
        result = extract(html, None, config)
        text = extract(html, None, PipelineConfig(backend="select_all", format=OutputFormat.TEXT)).content
        assert strip_markdown(result.content) == normalize_ws(text), f"seed {seed}"


def test_markdown_token_economy_on_generated_pages():
    from blockextract.pipeline import PipelineConfig, extract

    for seed in (1, 5):
        html = pagegen.make_page(seed)
        result = extract(html, None, PipelineConfig(backend="select_all", format=OutputFormat.HTML))
        md_out = extract(html, None, PipelineConfig(backend="select_all", format=OutputFormat.MARKDOWN)).content
        assert default_token_counter(md_out) <= default_token_counter(result.content)


def test_output_format_values():
    assert {f.value for f in OutputFormat} == {"html", "markdown", "text"}
