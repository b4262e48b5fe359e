from __future__ import annotations

import random

import pytest

from blockextract.chunker import SingleBlockOverBudget, default_token_counter, plan_chunks
from blockextract.segmenter import BlockSequence, ContentBlock, render_block_line


def make_seq(sizes: list[int]) -> BlockSequence:
    # inner text sized so the rendered line costs exactly `size` under a
    # characters-div-4 counter is fiddly; use a counter keyed by index instead
    blocks = [ContentBlock(index=i + 1, tag="p", inner_html=f"b{i + 1}") for i in range(len(sizes))]
    return BlockSequence(blocks=blocks)


def counter_for(sizes: list[int]):
    table = {f"[{i + 1}] <p>b{i + 1}</p>": size for i, size in enumerate(sizes)}

    def counter(text: str) -> int:
        return table[text]

    return counter


def test_three_blocks_budget_250():
    sizes = [100, 100, 100]
    plan = plan_chunks(make_seq(sizes), counter_for(sizes), budget=250)
    assert plan.chunks == [(1, 2), (3, 3)]


def test_all_fit_single_chunk():
    sizes = [10, 10, 10]
    plan = plan_chunks(make_seq(sizes), counter_for(sizes), budget=100)
    assert plan.chunks == [(1, 3)]


def test_greedy_packing_example():
    sizes = [200, 60, 60, 200]
    plan = plan_chunks(make_seq(sizes), counter_for(sizes), budget=260)
    assert plan.chunks == [(1, 2), (3, 4)]


def test_single_block_over_budget_reports_index():
    sizes = [10, 400, 10]
    with pytest.raises(SingleBlockOverBudget) as err:
        plan_chunks(make_seq(sizes), counter_for(sizes), budget=260)
    assert err.value.index == 2


def test_empty_sequence_gives_empty_plan():
    plan = plan_chunks(BlockSequence(blocks=[]), default_token_counter, budget=100)
    assert plan.chunks == []


def test_default_counter_basics():
    assert default_token_counter("") == 0
    assert default_token_counter("abcd") == 1
    assert default_token_counter("abcde") == 2
    a, b = "hello world", "and more"
    assert default_token_counter(a + b) <= default_token_counter(a) + default_token_counter(b) + 1


def test_chunk_properties_random():
    rng = random.Random(99)
    for _ in range(200):
        n = rng.randint(1, 40)
        sizes = [rng.randint(1, 80) for _ in range(n)]
        budget = max(max(sizes), rng.randint(80, 200))
        counter = counter_for(sizes)
        plan = plan_chunks(make_seq(sizes), counter, budget=budget)
        # coverage: contiguous, disjoint, 1..n
        covered = []
        for lo, hi in plan.chunks:
            covered.extend(range(lo, hi + 1))
        assert covered == list(range(1, n + 1))
        # budget and greedy maximality
        for pos, (lo, hi) in enumerate(plan.chunks):
            total = sum(sizes[i - 1] for i in range(lo, hi + 1))
            assert total <= budget
            if pos + 1 < len(plan.chunks):
                assert total + sizes[hi] > budget


def test_line_rendering_used_for_budget():
    block = ContentBlock(index=1, tag="p", inner_html="word " * 100)
    seq = BlockSequence(blocks=[block])
    line_tokens = default_token_counter(render_block_line(block))
    with pytest.raises(SingleBlockOverBudget):
        plan_chunks(seq, default_token_counter, budget=line_tokens - 1)
    assert plan_chunks(seq, default_token_counter, budget=line_tokens).chunks == [(1, 1)]
