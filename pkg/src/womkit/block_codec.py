"""Round-based encoder/decoder for one coded memory block.

A block is t header bits (round counter, unary), m data words of n bits,
and t-1 side words of 2n bits. Round 1 writes each message as the
characteristic word of a fixed-weight subset. Every later round j finds a
single truncated affine map H and per-word replacements y_i >= w_i within
the round's weight budget such that H(y_i) equals the i-th message, then
stores H's coefficient pair in side word j-2. Decoding the current round
reads the pair back and re-applies the map (round 1 unranks the subsets).

All states are immutable; encoders return new states that dominate their
inputs coordinatewise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .bitwords import BitWord, count_above, enumerate_above, subset_rank, subset_unrank
from .capacity import WomParams
from .gf2n import FieldElement, canonical_spec
from .hashfam import HashIndex, hash_apply


class SequencingError(Exception):
    """A round was encoded out of order."""


class NoEncoding(Exception):
    """The search space holds no valid encoding for this round's messages.

    `bottleneck` is the index of the data word whose candidate set most
    often emptied the running intersection; it points at the parameter
    (budget or hash size) that made the instance infeasible.
    """

    def __init__(self, message: str, bottleneck: int):
        super().__init__(message)
        self.bottleneck = bottleneck


@dataclass(frozen=True, slots=True)
class RoundMessage:
    """Payload of one round: m subset ranks (round 1) or m words of k_j-l bits."""

    round: int
    payload: tuple

    def __post_init__(self):
        object.__setattr__(self, "payload", tuple(self.payload))
        if self.round < 1:
            raise ValueError("rounds are numbered from 1")


@dataclass(frozen=True, slots=True)
class BlockState:
    """Immutable contents of one block; the round is derived from the header."""

    params: WomParams
    header: BitWord
    data: tuple[BitWord, ...]
    sides: tuple[BitWord, ...]

    def __post_init__(self):
        object.__setattr__(self, "data", tuple(self.data))
        object.__setattr__(self, "sides", tuple(self.sides))
        p = self.params
        if self.header.length != p.t:
            raise ValueError(f"header has {self.header.length} bits, expected {p.t}")
        r = self.header.bits.bit_length()
        if self.header.bits != (1 << r) - 1:
            raise ValueError(f"header 0b{self.header.bits:b} is not a unary round counter")
        if len(self.data) != p.m or any(d.length != p.n for d in self.data):
            raise ValueError(f"expected {p.m} data words of {p.n} bits")
        if len(self.sides) != p.t - 1 or any(s.length != 2 * p.n for s in self.sides):
            raise ValueError(f"expected {p.t - 1} side words of {2 * p.n} bits")

    @classmethod
    def fresh(cls, params: WomParams) -> "BlockState":
        return cls(
            params=params,
            header=BitWord.zeros(params.t),
            data=tuple(BitWord.zeros(params.n) for _ in range(params.m)),
            sides=tuple(BitWord.zeros(2 * params.n) for _ in range(params.t - 1)),
        )

    @property
    def round(self) -> int:
        """Rounds written so far: index of the highest header bit + 1."""
        return self.header.bits.bit_length()


def _check_message(state: BlockState, msg: RoundMessage, expected_round: int) -> None:
    if msg.round != expected_round:
        raise SequencingError(
            f"message is for round {msg.round}, block expects round {expected_round}"
        )
    if len(msg.payload) != state.params.m:
        raise ValueError(f"payload has {len(msg.payload)} entries, expected {state.params.m}")


def encode_round1(state: BlockState, msg: RoundMessage) -> BlockState:
    """Write the first round: payload ranks become fixed-weight data words."""
    if state.round != 0:
        raise SequencingError(f"block already holds {state.round} round(s)")
    _check_message(state, msg, 1)
    p = state.params
    b1 = p.budgets[0]
    data = tuple(subset_unrank(int(rank), p.n, b1) for rank in msg.payload)
    return BlockState(p, BitWord(p.t, 1), data, state.sides)


def in_guaranteed_regime(params: WomParams, j: int, ws: Sequence[BitWord]) -> bool:
    """Whether round j's search is guaranteed to succeed from these words.

    True when m < 2^(l/4) and every candidate set (words above w_i within
    the round budget) has at least 2^(k_j) elements. Outside the regime the
    search is still exact: it either finds an encoding or proves there is
    none.
    """
    if not params.m < 2 ** (params.l / 4):
        return False
    kj = params.k_for_round(j)
    budget = params.budgets[j - 1]
    return all(count_above(w, budget) >= (1 << kj) for w in ws)


def search_block_encoding(
    params: WomParams, j: int, ws: Sequence[BitWord], xs: Sequence[BitWord]
) -> tuple[HashIndex, list[BitWord]]:
    """Find a map H and words y_i >= w_i of weight <= B_j with H(y_i) = x_i.

    Scans multipliers a in ascending order. For each a the candidate
    targets T_i = { H_{a,0}(y) XOR x_i : y in Y_i } are intersected; a
    nonempty intersection yields the shift v = min(intersection), the
    additive coefficient b = v padded with zeros, and per word the smallest
    candidate hashing to x_i XOR v. The ascending scan and min tie-breaks
    make the result a pure function of the inputs.
    """
    if not 2 <= j <= params.t:
        raise ValueError(f"round {j} out of range 2..{params.t}")
    if len(ws) != params.m or len(xs) != params.m:
        raise ValueError(f"expected {params.m} current words and messages")
    spec = canonical_spec(params.n)  # rejects widths the search cannot cover
    n = params.n
    kj = params.k_for_round(j)
    out_len = kj - params.l
    budget = params.budgets[j - 1]
    prev_budget = params.budgets[j - 2]
    for i, w in enumerate(ws):
        if w.length != n:
            raise ValueError(f"word {i} has {w.length} bits, expected {n}")
        if w.weight > prev_budget:
            raise ValueError(f"word {i} has weight {w.weight}, above round-{j - 1} budget {prev_budget}")
    for i, x in enumerate(xs):
        if x.length != out_len:
            raise ValueError(f"message {i} has {x.length} bits, expected {out_len}")

    candidates = []
    for i, w in enumerate(ws):
        masks = [y.bits for y in enumerate_above(w, budget)]
        if not masks:
            raise NoEncoding(f"no words above data word {i} within budget {budget}", i)
        candidates.append(masks)

    mask = (1 << out_len) - 1
    top = 1 << n
    modulus = spec.modulus
    fail_counts = [0] * params.m
    for a in range(top):
        # Truncated products a*z^bit; a*y folds over the set bits of y.
        rows = []
        r = a
        for _ in range(n):
            rows.append(r & mask)
            r <<= 1
            if r & top:
                r ^= modulus
        common = None
        for i in range(params.m):
            xi = xs[i].bits
            targets = set()
            for y in candidates[i]:
                acc = 0
                yy = y
                while yy:
                    low = yy & -yy
                    acc ^= rows[low.bit_length() - 1]
                    yy ^= low
                targets.add(acc ^ xi)
            common = targets if common is None else common & targets
            if not common:
                fail_counts[i] += 1
                break
        if common:
            v = min(common)
            ys = []
            for i in range(params.m):
                want = xs[i].bits ^ v
                for y in candidates[i]:
                    acc = 0
                    yy = y
                    while yy:
                        low = yy & -yy
                        acc ^= rows[low.bit_length() - 1]
                        yy ^= low
                    if acc == want:
                        ys.append(BitWord(n, y))
                        break
            index = HashIndex(FieldElement(spec, a), FieldElement(spec, v), kj, params.l)
            return index, ys
    bottleneck = max(range(params.m), key=lambda i: (fail_counts[i], -i))
    raise NoEncoding(
        f"exhausted all {top} multipliers for round {j}; data word {bottleneck} "
        "was the most frequent bottleneck",
        bottleneck,
    )


def encode_round(state: BlockState, msg: RoundMessage) -> BlockState:
    """Write round j >= 2: replace data words and store the map's coefficients."""
    j = msg.round
    if j < 2 or j > state.params.t:
        raise SequencingError(f"round {j} out of range 2..{state.params.t}")
    if state.round != j - 1:
        raise SequencingError(f"block holds {state.round} round(s), cannot write round {j}")
    _check_message(state, msg, j)
    p = state.params
    index, ys = search_block_encoding(p, j, state.data, msg.payload)
    side = BitWord(2 * p.n, index.a.coeffs | (index.b.coeffs << p.n))
    sides = state.sides[: j - 2] + (side,) + state.sides[j - 1 :]
    return BlockState(p, BitWord(p.t, (1 << j) - 1), tuple(ys), sides)


def decode_round(state: BlockState, j: int) -> RoundMessage:
    """Read back round j's messages; only the most recent round is decodable."""
    if not 1 <= j <= state.params.t:
        raise ValueError(f"round {j} out of range 1..{state.params.t}")
    if state.round != j:
        raise ValueError(f"block holds {state.round} round(s), round {j} is not current")
    p = state.params
    if j == 1:
        return RoundMessage(1, tuple(subset_rank(d, p.budgets[0]) for d in state.data))
    spec = canonical_spec(p.n)
    side = state.sides[j - 2].bits
    a = FieldElement(spec, side & ((1 << p.n) - 1))
    b = FieldElement(spec, side >> p.n)
    index = HashIndex(a, b, p.k_for_round(j), p.l)
    return RoundMessage(j, tuple(hash_apply(index, d) for d in state.data))
