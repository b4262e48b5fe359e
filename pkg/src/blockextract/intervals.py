"""Canonical sets of 1-based closed index intervals.

Canonical form is sorted, non-overlapping, and non-adjacent ([1,2] + [3,5]
collapses to [1,5]), so two sets with the same members always have the same
representation.  Selection semantics downstream is purely set-of-indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable


def _canonicalize(pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    kept = sorted((lo, hi) for lo, hi in pairs if lo <= hi)
    merged: list[list[int]] = []
    for lo, hi in kept:
        if merged and lo <= merged[-1][1] + 1:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class IntervalSet:
    intervals: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "IntervalSet":
        """Build a canonical set; pairs with lo > hi are dropped."""
        canonical = _canonicalize(pairs)
        if canonical and canonical[0][0] < 1:
            raise ValueError(f"interval start below 1: {canonical[0]}")
        return cls(canonical)

    @classmethod
    def from_members(cls, members: Iterable[int]) -> "IntervalSet":
        return cls.from_pairs((i, i) for i in members)

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    def members(self) -> set[int]:
        out: set[int] = set()
        for lo, hi in self.intervals:
            out.update(range(lo, hi + 1))
        return out

    def __contains__(self, index: int) -> bool:
        return any(lo <= index <= hi for lo, hi in self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __len__(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    def to_list(self) -> list[list[int]]:
        return [[lo, hi] for lo, hi in self.intervals]

    def __str__(self) -> str:
        return "[" + ",".join(f"[{lo},{hi}]" for lo, hi in self.intervals) + "]"

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(_canonicalize(list(self.intervals) + list(other.intervals)))

    def clip(self, lo: int, hi: int) -> "IntervalSet":
        clipped = [(max(a, lo), min(b, hi)) for a, b in self.intervals]
        return IntervalSet(_canonicalize(p for p in clipped if p[0] <= p[1]))


def merge_intervals(per_chunk: Iterable[IntervalSet]) -> IntervalSet:
    """Union of member sets across chunk results, re-canonicalized."""
    pairs: list[tuple[int, int]] = []
    for iset in per_chunk:
        pairs.extend(iset.intervals)
    return IntervalSet(_canonicalize(pairs))


_PAIR_RE = re.compile(r"\[\s*(\d+)\s*,\s*(\d+)\s*\]")


def parse_interval_list(text: str) -> IntervalSet:
    """Parse a ``[[lo,hi],...]`` string (whitespace-tolerant) into a set."""
    pairs = [(int(a), int(b)) for a, b in _PAIR_RE.findall(text)]
    return IntervalSet.from_pairs(pairs)
