"""Command-line interface: segment, extract, serve, eval.

Config precedence is flags > environment > config file (INI, section
[blockextract]) > defaults.  Input is a file path or "-" for stdin; bytes are
decoded as UTF-8 with replacement, so binary garbage still segments.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from pathlib import Path

from .dom import decode_html_bytes
from .evalkit import load_records, run_eval, write_csv, write_rows_jsonl
from .extractor import BackendUnavailable
from .pipeline import BACKEND_CHOICES, PipelineConfig, extract, segment_html
from .render import OutputFormat
from .segmenter import SegmenterConfig, render_indexed
from .service import DEFAULT_MAX_BODY_BYTES, serve

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BACKEND = 3

_CONFIG_SECTION = "blockextract"
_CONFIG_KEYS = {
    "max_block_chars": int,
    "max_doc_tokens": int,
    "prompt_margin_tokens": int,
    "backend": str,
    "format": str,
    "prompt_path": str,
    "concurrency": int,
    "endpoint": str,
    "model": str,
    "timeout": float,
}


def _load_config_file(path: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    values = {}
    if parser.has_section(_CONFIG_SECTION):
        for key, cast in _CONFIG_KEYS.items():
            if parser.has_option(_CONFIG_SECTION, key):
                values[key] = cast(parser.get(_CONFIG_SECTION, key))
    return values


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(_load_config_file(args.config))
    if os.environ.get("EXTRACTOR_ENDPOINT"):
        values["endpoint"] = os.environ["EXTRACTOR_ENDPOINT"]
    if os.environ.get("EXTRACTOR_MODEL"):
        values["model"] = os.environ["EXTRACTOR_MODEL"]
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag

    max_block_chars = values.pop("max_block_chars", 2000)
    fmt = OutputFormat(values.pop("format", "markdown"))
    return PipelineConfig(
        segmenter=SegmenterConfig(max_block_chars=max_block_chars),
        format=fmt,
        **values,
    )


def _read_input(path: str) -> str:
    if path == "-":
        return decode_html_bytes(sys.stdin.buffer.read())
    return decode_html_bytes(Path(path).read_bytes())


def _add_config_flags(sub: argparse.ArgumentParser, with_backend: bool = True) -> None:
    sub.add_argument("--config", help="INI config file, section [blockextract]")
    sub.add_argument("--max-block-chars", dest="max_block_chars", type=int)
    sub.add_argument("--max-doc-tokens", dest="max_doc_tokens", type=int)
    sub.add_argument("--prompt-margin", dest="prompt_margin_tokens", type=int)
    sub.add_argument("--concurrency", type=int)
    if with_backend:
        sub.add_argument("--backend", choices=BACKEND_CHOICES)
        sub.add_argument("--format", choices=[f.value for f in OutputFormat])
        sub.add_argument("--prompt-path", dest="prompt_path")
        sub.add_argument("--endpoint")
        sub.add_argument("--model")
        sub.add_argument("--timeout", type=float)


def _cmd_segment(args: argparse.Namespace) -> int:
    try:
        html = _read_input(args.input)
    except OSError as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        config = _build_config(args)
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    seq = segment_html(html, config)
    rendered = render_indexed(seq)
    if rendered:
        print(rendered)
    return EXIT_OK


def _cmd_extract(args: argparse.Namespace) -> int:
    try:
        html = _read_input(args.input)
    except OSError as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        config = _build_config(args)
        result = extract(html, args.query, config, url=args.url)
    except BackendUnavailable as exc:
        print(f"backend unavailable: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if result.content:
        print(result.content)
    if args.emit_indices:
        print(str(result.indices), file=sys.stderr)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    try:
        config = _build_config(args)
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    serve(args.bind, config, max_body_bytes=args.max_body_bytes)
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    try:
        config = _build_config(args)
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.dataset == "-":
            records = list(load_records(sys.stdin))
        else:
            with open(args.dataset, encoding="utf-8") as fh:
                records = list(load_records(fh))
    except (OSError, ValueError) as exc:
        print(f"cannot read dataset: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = run_eval(records, config, workers=args.workers,
                      distinct_tokens=args.distinct_tokens)
    if args.rows:
        with open(args.rows, "w", encoding="utf-8") as fh:
            write_rows_jsonl(report, fh)
        print(json.dumps(report.summary()))
    else:
        write_rows_jsonl(report, sys.stdout)
        print(json.dumps(report.summary()), file=sys.stderr)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            write_csv(report, fh)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockextract",
        description="Segment HTML into numbered blocks and extract content by index intervals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_segment = sub.add_parser("segment", help="print the numbered block lines of a page")
    p_segment.add_argument("input", nargs="?", default="-", help="HTML file or - for stdin")
    _add_config_flags(p_segment, with_backend=False)
    p_segment.set_defaults(func=_cmd_segment)

    p_extract = sub.add_parser("extract", help="extract content from a page")
    p_extract.add_argument("input", nargs="?", default="-", help="HTML file or - for stdin")
    p_extract.add_argument("--query", default="", help="empty query selects main content")
    p_extract.add_argument("--url", default="")
    p_extract.add_argument("--emit-indices", action="store_true",
                           help="print the selected intervals on stderr")
    _add_config_flags(p_extract)
    p_extract.set_defaults(func=_cmd_extract)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--bind", default="127.0.0.1:8791")
    p_serve.add_argument("--max-body-bytes", type=int, default=DEFAULT_MAX_BODY_BYTES)
    _add_config_flags(p_serve)
    p_serve.set_defaults(func=_cmd_serve)

    p_eval = sub.add_parser("eval", help="score the pipeline over a JSONL dataset")
    p_eval.add_argument("--dataset", required=True, help="JSONL file or - for stdin")
    p_eval.add_argument("--rows", help="write per-record rows to this JSONL file")
    p_eval.add_argument("--csv", help="also write a CSV table")
    p_eval.add_argument("--workers", type=int, default=1)
    p_eval.add_argument("--distinct-tokens", action="store_true",
                        help="score with token sets instead of multisets")
    _add_config_flags(p_eval)
    p_eval.set_defaults(func=_cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("BLOCKEXTRACT_LOG", "WARNING"))
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
