"""Fixed-length bit words under the coordinatewise order, plus combinadics.

A word y dominates w when every coordinate of w is also set in y: the only
order a write-once memory can move along. Fixed-weight words are ranked in
colexicographic order of their support sets, giving the bijection used for
subset-valued messages.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator


@dataclass(frozen=True, slots=True)
class BitWord:
    """length coordinates stored as an integer mask (bit i = coordinate i)."""

    length: int
    bits: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be nonnegative")
        if not 0 <= self.bits < (1 << self.length):
            raise ValueError(f"bits 0x{self.bits:x} out of range for length {self.length}")

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def support(self) -> tuple[int, ...]:
        """Indices of set coordinates, ascending."""
        out = []
        bits = self.bits
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return tuple(out)

    @classmethod
    def from_support(cls, indices: Iterable[int], length: int) -> "BitWord":
        bits = 0
        for i in indices:
            bits |= 1 << i
        return cls(length, bits)

    @classmethod
    def zeros(cls, length: int) -> "BitWord":
        return cls(length, 0)


def dominates(y: BitWord, w: BitWord) -> bool:
    """True iff w <= y coordinatewise (y can be reached from w by 0->1 writes)."""
    if y.length != w.length:
        raise ValueError(f"length mismatch: {y.length} vs {w.length}")
    return w.bits & y.bits == w.bits


def enumerate_above(w: BitWord, max_weight: int) -> Iterator[BitWord]:
    """All y >= w with weight(y) <= max_weight, in ascending integer order.

    Empty when weight(w) already exceeds max_weight, which signals an
    infeasible round state to the caller rather than raising here.
    """
    budget = max_weight - w.weight
    if budget < 0:
        return
    free = ~w.bits & ((1 << w.length) - 1)
    s = 0
    while True:
        if s.bit_count() <= budget:
            yield BitWord(w.length, w.bits | s)
        # next submask of `free` in ascending integer order
        s = (s - free) & free
        if s == 0:
            return


def count_above(w: BitWord, max_weight: int) -> int:
    """Size of enumerate_above(w, max_weight) without enumerating."""
    budget = max_weight - w.weight
    if budget < 0:
        return 0
    free = w.length - w.weight
    return sum(comb(free, j) for j in range(min(budget, free) + 1))


def subset_rank(word: BitWord, weight: int) -> int:
    """Colexicographic rank of a weight-`weight` word among all such words."""
    if word.weight != weight:
        raise ValueError(f"word has weight {word.weight}, expected {weight}")
    return sum(comb(c, j + 1) for j, c in enumerate(word.support()))


def subset_unrank(rank: int, length: int, weight: int) -> BitWord:
    """Inverse of subset_rank: the weight-`weight` word of given colex rank."""
    if not 0 <= weight <= length:
        raise ValueError(f"weight {weight} out of range for length {length}")
    total = comb(length, weight)
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} out of range, expected 0..{total - 1}")
    bits = 0
    c = length - 1
    for j in range(weight, 0, -1):
        while comb(c, j) > rank:
            c -= 1
        bits |= 1 << c
        rank -= comb(c, j)
    return BitWord(length, bits)
