"""Partition a block sequence into prompt-sized chunks under a token budget.

Packing is greedy left-to-right over the rendered ``[i] <tag>...`` lines, never
splitting a block across chunks; the running total is the sum of per-line
token counts.  Any token counter satisfying ``count("") == 0`` and
concatenation monotonicity can be plugged in; the default approximates subword
tokens as ceil(utf8_bytes / 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

from .segmenter import BlockSequence, render_block_line


class TokenCounter(Protocol):
    def __call__(self, text: str) -> int: ...


def default_token_counter(text: str) -> int:
    return math.ceil(len(text.encode("utf-8")) / 4)


class SingleBlockOverBudget(Exception):
    def __init__(self, index: int, tokens: int, budget: int):
        super().__init__(f"block {index} needs {tokens} tokens, budget {budget}")
        self.index = index


@dataclass
class ChunkPlan:
    chunks: list[tuple[int, int]] = field(default_factory=list)
    budget: int = 0


def plan_chunks(
    seq: BlockSequence,
    counter: Callable[[str], int] = default_token_counter,
    budget: int = 8192,
) -> ChunkPlan:
    """Greedy contiguous packing of blocks 1..n into chunks within budget."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    chunks: list[tuple[int, int]] = []
    start = None
    running = 0
    for block in seq.blocks:
        tokens = counter(render_block_line(block))
        if tokens > budget:
            raise SingleBlockOverBudget(block.index, tokens, budget)
        if start is None:
            start, running = block.index, tokens
        elif running + tokens <= budget:
            running += tokens
        else:
            chunks.append((start, block.index - 1))
            start, running = block.index, tokens
    if start is not None:
        chunks.append((start, seq.blocks[-1].index))
    return ChunkPlan(chunks=chunks, budget=budget)
