"""Concatenation of independent coded blocks and bitstream packing.

A full code is n1 side-by-side copies of the basic block; blocks encode
and decode independently (each may pick its own hash coefficients), so
concatenation preserves the rate while the per-block search cost becomes
polynomial in the total length. This module splits a flat bitstream into
per-block round messages, joins them back, and bridges block states to
the flat device memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .bitwords import BitWord
from .capacity import WomParams, achieved_rate
from .block_codec import BlockState, RoundMessage, encode_round, encode_round1


@dataclass(frozen=True, slots=True)
class FullParams:
    """n1 independent copies of one block configuration."""

    block: WomParams
    n1: int

    def __post_init__(self):
        if self.n1 < 1:
            raise ValueError("need at least one block")

    @property
    def N1(self) -> int:
        return self.n1 * self.block.n0

    def round_capacity(self, j: int) -> int:
        """Message bits one round carries across all blocks."""
        return self.n1 * self.block.m * self.block.payload_bits(j)


def replication_count(n: int, a: float) -> float:
    """Copy count 2^(4n/(a-1)) that makes encoding cost N1^a; report only.

    Materializing this many blocks is the asymptotic argument, not a desk
    operation, hence the float return.
    """
    if a <= 1:
        raise ValueError("complexity exponent must exceed 1")
    return 2.0 ** (4 * n / (a - 1))


def full_rate(params: FullParams) -> float:
    """Rate of the concatenated code; equals the single-block rate exactly."""
    return achieved_rate(params.block)


def full_encode_round(
    states: Sequence[BlockState], msgs: Sequence[RoundMessage]
) -> list[BlockState]:
    """Encode one round across all blocks; fails atomically.

    States are immutable, so any per-block error (sequencing, no encoding)
    propagates before the caller sees a partially updated list.
    """
    if len(states) != len(msgs):
        raise ValueError(f"{len(states)} states but {len(msgs)} messages")
    if not states:
        raise ValueError("need at least one block")
    rounds = {s.round for s in states}
    if len(rounds) > 1:
        raise ValueError(f"blocks disagree on the current round: {sorted(rounds)}")
    encoder = encode_round1 if msgs[0].round == 1 else encode_round
    return [encoder(state, msg) for state, msg in zip(states, msgs)]


def _read_bits(stream: BitWord, offset: int, width: int) -> int:
    return (stream.bits >> offset) & ((1 << width) - 1)


def pack_messages(stream: BitWord, j: int, params: FullParams) -> list[RoundMessage]:
    """Split a bitstream into per-block round-j messages.

    Round 1 consumes floor(log2(C(n, B_1))) bits per data word as a subset
    rank (always in range by construction); round j >= 2 consumes k_j - l
    bits per data word. Bits are consumed in ascending index order.
    """
    width = params.block.payload_bits(j)
    needed = params.round_capacity(j)
    if stream.length < needed:
        raise ValueError(f"stream has {stream.length} bits, round {j} needs {needed}")
    out = []
    offset = 0
    for _ in range(params.n1):
        payload = []
        for _ in range(params.block.m):
            value = _read_bits(stream, offset, width)
            offset += width
            payload.append(value if j == 1 else BitWord(width, value))
        out.append(RoundMessage(j, tuple(payload)))
    return out


def unpack_messages(msgs: Sequence[RoundMessage], params: FullParams) -> BitWord:
    """Join per-block messages back into the bitstream pack_messages split."""
    if len(msgs) != params.n1:
        raise ValueError(f"{len(msgs)} messages for {params.n1} blocks")
    rounds = {m.round for m in msgs}
    if len(rounds) != 1:
        raise ValueError(f"messages disagree on the round: {sorted(rounds)}")
    j = rounds.pop()
    width = params.block.payload_bits(j)
    bits = 0
    offset = 0
    for msg in msgs:
        if len(msg.payload) != params.block.m:
            raise ValueError(f"payload has {len(msg.payload)} entries, expected {params.block.m}")
        for entry in msg.payload:
            value = int(entry) if j == 1 else entry.bits
            if value >> width:
                raise ValueError(f"payload value {value} does not fit in {width} bits")
            bits |= value << offset
            offset += width
    return BitWord(offset, bits)


def states_to_memory(states: Sequence[BlockState]) -> BitWord:
    """Flatten block states into one device-sized word (block i at i * N_0)."""
    if not states:
        raise ValueError("need at least one block")
    p = states[0].params
    if any(s.params != p for s in states):
        raise ValueError("blocks disagree on parameters")
    memory = 0
    for i, state in enumerate(states):
        base = i * p.n0
        memory |= state.header.bits << base
        for d, word in enumerate(state.data):
            memory |= word.bits << (base + p.data_offset(d))
        for s, word in enumerate(state.sides):
            memory |= word.bits << (base + p.side_offset(s))
    return BitWord(len(states) * p.n0, memory)


def memory_to_states(memory: BitWord, params: FullParams) -> list[BlockState]:
    """Slice flat device memory back into per-block states."""
    if memory.length != params.N1:
        raise ValueError(f"memory has {memory.length} bits, expected {params.N1}")
    p = params.block
    out = []
    for i in range(params.n1):
        base = i * p.n0
        grab = lambda off, length: BitWord(length, (memory.bits >> (base + off)) & ((1 << length) - 1))
        out.append(
            BlockState(
                params=p,
                header=grab(0, p.t),
                data=tuple(grab(p.data_offset(d), p.n) for d in range(p.m)),
                sides=tuple(grab(p.side_offset(s), 2 * p.n) for s in range(p.t - 1)),
            )
        )
    return out
