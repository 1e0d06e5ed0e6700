"""Strict write-once memory and its on-disk image format.

The device is the independent safety layer: every write must dominate the
current contents coordinatewise or it is rejected, so a codec bug cannot
silently clear a programmed cell.

Images are text files with LF newlines:

    WOMIMG 1
    t=<int> n=<int> m=<int> l=<int>
    k=<int>,<int>,...          k_2..k_t, empty after "k=" when t = 1
    p=<num>/<den>,...          t exact rationals, the last one 1/2
    round=<int>
    header=<hex>               then data0..data{m-1}, then side0..side{t-2}
    crc32=<8 hex digits>       over every byte before this line

Multi-block images repeat the header/data/side group once per block, each
group preceded by a `block=<i>` line (single-block images omit the
delimiter). Hex packs bits little-endian within bytes: bit index 0 is the
least significant bit of the first byte.
"""

from __future__ import annotations

import binascii
from dataclasses import dataclass
from fractions import Fraction

from .bitwords import BitWord
from .capacity import WeightVector, WomParams

MAGIC = b"WOMIMG 1"


class WriteOnceViolation(Exception):
    """A write tried to clear a programmed cell; `index` is the lowest one."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class ImageFormatError(ValueError):
    """Base class for image parse failures."""


class BadMagic(ImageFormatError):
    """The file does not start with the image magic line."""


class TruncatedImage(ImageFormatError):
    """The file ends before all declared regions (or the trailer) appear."""


class ChecksumMismatch(ImageFormatError):
    """The CRC32 trailer does not match the file contents."""


class MalformedImage(ImageFormatError):
    """A line is present but does not parse."""


@dataclass(frozen=True, slots=True)
class Device:
    """Write-once memory of fixed size with wear counters."""

    cells: BitWord
    writes_applied: int = 0
    cells_programmed: int = 0

    @classmethod
    def fresh(cls, nbits: int) -> "Device":
        return cls(BitWord.zeros(nbits))


def apply_write(dev: Device, new_state: BitWord) -> Device:
    """Replace the memory contents; rejects any 1 -> 0 transition."""
    if new_state.length != dev.cells.length:
        raise ValueError(
            f"write has {new_state.length} bits, device has {dev.cells.length}"
        )
    cleared = dev.cells.bits & ~new_state.bits
    if cleared:
        index = (cleared & -cleared).bit_length() - 1
        raise WriteOnceViolation(f"write clears programmed cell {index}", index)
    fresh_bits = (new_state.bits & ~dev.cells.bits).bit_count()
    return Device(new_state, dev.writes_applied + 1, dev.cells_programmed + fresh_bits)


def _bits_to_hex(bits: int, length: int) -> str:
    return bits.to_bytes((length + 7) // 8, "little").hex()


def _hex_to_bits(text: str, length: int) -> int:
    nbytes = (length + 7) // 8
    if len(text) != 2 * nbytes:
        raise MalformedImage(f"expected {2 * nbytes} hex digits for {length} bits, got {len(text)}")
    try:
        raw = bytes.fromhex(text)
    except ValueError as exc:
        raise MalformedImage(f"bad hex payload: {text!r}") from exc
    bits = int.from_bytes(raw, "little")
    if bits >> length:
        raise MalformedImage("padding bits beyond the region length are set")
    return bits


def save_image(dev: Device, params: WomParams, round_: int) -> bytes:
    """Serialize the device; the block count is the device size / block size."""
    n1, rem = divmod(dev.cells.length, params.n0)
    if rem != 0 or n1 < 1:
        raise ValueError(
            f"device size {dev.cells.length} is not a positive multiple of block size {params.n0}"
        )
    if not 0 <= round_ <= params.t:
        raise ValueError(f"round {round_} out of range 0..{params.t}")
    lines = [
        MAGIC.decode(),
        f"t={params.t} n={params.n} m={params.m} l={params.l}",
        "k=" + ",".join(str(kj) for kj in params.k),
        "p=" + ",".join(f"{x.numerator}/{x.denominator}" for x in params.p.p),
        f"round={round_}",
    ]
    memory = dev.cells.bits
    for block in range(n1):
        if n1 > 1:
            lines.append(f"block={block}")
        base = block * params.n0
        region = lambda off, length: _bits_to_hex((memory >> (base + off)) & ((1 << length) - 1), length)
        lines.append("header=" + region(0, params.t))
        for i in range(params.m):
            lines.append(f"data{i}=" + region(params.data_offset(i), params.n))
        for j in range(params.t - 1):
            lines.append(f"side{j}=" + region(params.side_offset(j), 2 * params.n))
    body = "\n".join(lines).encode() + b"\n"
    return body + f"crc32={binascii.crc32(body):08x}\n".encode()


class _LineReader:
    def __init__(self, lines: list[str]):
        self.lines = lines
        self.pos = 0

    def peek(self) -> str | None:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def take(self, key: str) -> str:
        line = self.peek()
        if line is None:
            raise TruncatedImage(f"file ends where {key}= was expected")
        if not line.startswith(key + "="):
            raise MalformedImage(f"expected {key}=..., found {line!r}")
        self.pos += 1
        return line[len(key) + 1 :]


def _parse_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise MalformedImage(f"bad {what}: {text!r}") from exc


def load_image(data: bytes) -> tuple[Device, WomParams, int]:
    """Parse image bytes back into a device, its parameters, and the round."""
    if not data.startswith(MAGIC + b"\n"):
        raise BadMagic("not a memory image (bad magic line)")
    if not data.endswith(b"\n"):
        raise TruncatedImage("file does not end with a newline")
    split = data.rfind(b"\ncrc32=")
    if split < 0:
        raise TruncatedImage("missing crc32 trailer")
    covered = data[: split + 1]
    trailer = data[split + 1 : -1].decode("ascii", errors="replace")
    digits = trailer[len("crc32=") :]
    if len(digits) != 8 or any(c not in "0123456789abcdef" for c in digits):
        raise MalformedImage(f"bad crc32 trailer: {trailer!r}")
    if int(digits, 16) != binascii.crc32(covered):
        raise ChecksumMismatch("crc32 mismatch: image bytes were altered")

    try:
        text = covered.decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedImage("image is not ASCII text") from exc
    reader = _LineReader(text.split("\n")[:-1])
    reader.pos = 1  # magic line already checked

    fields = reader.take("t").split()
    if len(fields) != 4:
        raise MalformedImage("parameter line must hold t= n= m= l=")
    t = _parse_int(fields[0], "t")
    values = {}
    for part, key in zip(fields[1:], ("n", "m", "l")):
        if not part.startswith(key + "="):
            raise MalformedImage(f"expected {key}= in parameter line, found {part!r}")
        values[key] = _parse_int(part[len(key) + 1 :], key)

    k_text = reader.take("k")
    k = tuple(_parse_int(x, "k entry") for x in k_text.split(",")) if k_text else ()
    p_entries = []
    for part in reader.take("p").split(","):
        num, sep, den = part.partition("/")
        if not sep:
            raise MalformedImage(f"density {part!r} is not a num/den rational")
        try:
            p_entries.append(Fraction(_parse_int(num, "density"), _parse_int(den, "density")))
        except ZeroDivisionError as exc:
            raise MalformedImage(f"density {part!r} has a zero denominator") from exc
    try:
        params = WomParams(t=t, n=values["n"], m=values["m"], l=values["l"], k=k, p=WeightVector(p_entries))
    except ValueError as exc:
        raise MalformedImage(f"inconsistent parameters: {exc}") from exc

    round_ = _parse_int(reader.take("round"), "round")
    if not 0 <= round_ <= params.t:
        raise MalformedImage(f"round {round_} out of range 0..{params.t}")

    delimited = reader.peek() is not None and reader.peek().startswith("block=")
    memory = 0
    block = 0
    while True:
        if delimited:
            if reader.peek() is None:
                break
            label = _parse_int(reader.take("block"), "block index")
            if label != block:
                raise MalformedImage(f"expected block={block}, found block={label}")
        base = block * params.n0
        memory |= _hex_to_bits(reader.take("header"), params.t) << base
        for i in range(params.m):
            memory |= _hex_to_bits(reader.take(f"data{i}"), params.n) << (base + params.data_offset(i))
        for j in range(params.t - 1):
            memory |= _hex_to_bits(reader.take(f"side{j}"), 2 * params.n) << (base + params.side_offset(j))
        block += 1
        if not delimited:
            break
    if reader.peek() is not None:
        raise MalformedImage(f"unexpected trailing line: {reader.peek()!r}")

    cells = BitWord(block * params.n0, memory)
    return Device(cells, cells_programmed=cells.weight), params, round_
