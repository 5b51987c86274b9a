"""On-disk container format for encrypted data, plus plain-text key files.

Container layout (15-byte header, then payload):

  bytes 0-3    magic "TPSK"
  byte  4      format version, currently 1
  byte  5      B, plaintext bits per block (1..64)
  byte  6      W, serialized bytes per ciphertext block
  bytes 7-14   exact plaintext length in bits, little-endian uint64
  bytes 15..   ceil(len_bits/B) ciphertext blocks, each W big-endian bytes

The final partial block is zero-padded on the right before encryption;
the header length field recovers the exact source size. W defaults to the
smallest byte count covering every value below n**2, so with 8-bit blocks
and a maximal 8-bit-prime key the payload is exactly 4x the source.
``paper_compat`` forces W=4 for any key small enough, reproducing that
fixed 32-bit output framing. Keys are never stored in the container.

Key files are UTF-8 text: three decimal primes, one per line, with blank
lines and '#' comments ignored.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cipher import (
    CipherKey,
    CipherParams,
    CorruptCiphertextError,
    derive_params,
    validate_key,
)

MAGIC = b"TPSK"
VERSION = 1
MAX_BLOCK_BITS = 64
PAPER_COMPAT_WIDTH = 4

_HEADER = struct.Struct("<4sBBBQ")
HEADER_SIZE = _HEADER.size


class ContainerFormatError(ValueError):
    """Base class for malformed container data."""


class NotAContainerError(ContainerFormatError):
    """Input does not start with the container magic."""


class UnsupportedVersionError(ContainerFormatError):
    """Container declares a format version this code does not read."""


class TruncatedPayloadError(ContainerFormatError):
    """Payload shorter (or longer) than the header promises."""


class KeyFileError(ValueError):
    """Key file text is not three decimal integers."""


@dataclass(frozen=True)
class ContainerHeader:
    """Parsed fixed-size header."""

    block_bits: int
    cipher_block_bytes: int
    plaintext_bit_length: int

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC,
            VERSION,
            self.block_bits,
            self.cipher_block_bytes,
            self.plaintext_bit_length,
        )

    @classmethod
    def unpack(cls, raw: bytes) -> "ContainerHeader":
        if len(raw) < len(MAGIC) or raw[: len(MAGIC)] != MAGIC:
            raise NotAContainerError(
                f"bad magic {raw[:len(MAGIC)]!r}, expected {MAGIC!r}"
            )
        if len(raw) < HEADER_SIZE:
            raise TruncatedPayloadError(
                f"container is {len(raw)} bytes, header alone needs {HEADER_SIZE}"
            )
        _, version, block_bits, width, bit_length = _HEADER.unpack_from(raw)
        if version != VERSION:
            raise UnsupportedVersionError(
                f"container version {version}, this reader supports {VERSION}"
            )
        if not 1 <= block_bits <= MAX_BLOCK_BITS:
            raise ContainerFormatError(f"header block_bits {block_bits} outside 1..{MAX_BLOCK_BITS}")
        if width < 1:
            raise ContainerFormatError("header cipher_block_bytes must be >= 1")
        return cls(block_bits, width, bit_length)


def cipher_block_width(params: CipherParams) -> int:
    """Smallest whole byte count covering every ciphertext value in [0, n**2)."""
    return max(1, ((params.n_squared - 1).bit_length() + 7) // 8)


def _block_count(bit_length: int, block_bits: int) -> int:
    return -(-bit_length // block_bits)


def _unpack_blocks(source: bytes, block_bits: int) -> np.ndarray:
    """Split a byte string into big-endian block values, zero-padding the tail."""
    if block_bits == 8:
        return np.frombuffer(source, dtype=np.uint8).astype(np.uint64)
    bits = np.unpackbits(np.frombuffer(source, dtype=np.uint8))
    n_blocks = _block_count(bits.size, block_bits)
    padded = np.zeros(n_blocks * block_bits, dtype=np.uint8)
    padded[: bits.size] = bits
    weights = np.left_shift(
        np.uint64(1), np.arange(block_bits - 1, -1, -1, dtype=np.uint64)
    )
    matrix = padded.reshape(n_blocks, block_bits).astype(np.uint64)
    return (matrix * weights).sum(axis=1, dtype=np.uint64)


def _pack_blocks(values, block_bits: int, bit_length: int) -> bytes:
    """Inverse of _unpack_blocks: reassemble bytes, dropping pad bits."""
    arr = np.asarray(values, dtype=np.uint64)
    if block_bits == 8:
        return arr.astype(np.uint8).tobytes()[: bit_length // 8]
    shifts = np.arange(block_bits - 1, -1, -1, dtype=np.uint64)
    bits = ((arr[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits.reshape(-1)[:bit_length]).tobytes()


def _serialize_blocks(values, width: int) -> bytes:
    if isinstance(values, np.ndarray) and width <= 8:
        shifts = np.arange(width - 1, -1, -1, dtype=np.uint64) * np.uint64(8)
        return (values[:, None] >> shifts).astype(np.uint8).tobytes()
    return b"".join(int(v).to_bytes(width, "big") for v in values)


def _parse_blocks(payload: bytes, width: int) -> np.ndarray | list[int]:
    if width <= 8:
        matrix = np.frombuffer(payload, dtype=np.uint8).reshape(-1, width)
        shifts = np.arange(width - 1, -1, -1, dtype=np.uint64) * np.uint64(8)
        return (matrix.astype(np.uint64) << shifts).sum(axis=1, dtype=np.uint64)
    return [
        int.from_bytes(payload[i : i + width], "big")
        for i in range(0, len(payload), width)
    ]


def encrypt_file(
    source: bytes,
    key: CipherKey,
    block_bits: int = 8,
    *,
    paper_compat: bool = False,
    backend: str | None = None,
) -> bytes:
    """Encrypt a byte string into a self-describing container.

    ``paper_compat`` pins the serialized block width to 4 bytes; it is an
    error for keys whose ciphertext values need more.
    """
    validate_key(key.key1, key.key2, key.key3, block_bits)
    if block_bits > MAX_BLOCK_BITS:
        raise ValueError(
            f"container supports at most {MAX_BLOCK_BITS}-bit blocks, got {block_bits}"
        )
    params = derive_params(key, block_bits)
    width = cipher_block_width(params)
    if paper_compat:
        if width > PAPER_COMPAT_WIDTH:
            raise ValueError(
                f"paper_compat writes {PAPER_COMPAT_WIDTH}-byte blocks but this "
                f"key needs {width}"
            )
        width = PAPER_COMPAT_WIDTH
    values = _unpack_blocks(source, block_bits)
    encrypted = kernels.encrypt_blocks(values, params, key.key3, backend=backend)
    header = ContainerHeader(block_bits, width, len(source) * 8)
    return header.pack() + _serialize_blocks(encrypted, width)


def decrypt_file(
    container: bytes, key: CipherKey, *, backend: str | None = None
) -> bytes:
    """Decrypt a container produced by encrypt_file, byte-exactly.

    Raises CorruptCiphertextError when any block is implausible under the
    supplied key -- either a ciphertext value >= n**2 or a decrypted block
    that does not fit the advertised block size. A wrong key that slips
    past both checks still cannot silently reproduce the original bytes.
    """
    header = ContainerHeader.unpack(container)
    payload = container[HEADER_SIZE:]
    width = header.cipher_block_bytes
    if len(payload) % width:
        raise TruncatedPayloadError(
            f"payload of {len(payload)} bytes is not a multiple of the "
            f"{width}-byte block width"
        )
    expected = _block_count(header.plaintext_bit_length, header.block_bits)
    actual = len(payload) // width
    if actual != expected:
        raise TruncatedPayloadError(
            f"expected {expected} ciphertext blocks for "
            f"{header.plaintext_bit_length} plaintext bits, found {actual}"
        )
    validate_key(key.key1, key.key2, key.key3, header.block_bits)
    params = derive_params(key, header.block_bits)
    values = _parse_blocks(payload, width)
    if actual:
        biggest = int(values.max()) if isinstance(values, np.ndarray) else max(values)
        if biggest >= params.n_squared:
            raise CorruptCiphertextError(
                "ciphertext block >= n**2: wrong key or damaged container"
            )
    recovered = kernels.decrypt_blocks(values, params, key.key3, backend=backend)
    limit = 1 << header.block_bits
    if isinstance(recovered, np.ndarray):
        # uint64 values cannot reach 2**64, so a 64-bit block never overflows
        out_of_range = header.block_bits < 64 and bool(
            (recovered >= np.uint64(limit)).any()
        )
    else:
        out_of_range = any(v >= limit for v in recovered)
    if out_of_range:
        raise CorruptCiphertextError(
            "decrypted block exceeds the block size: wrong key or damaged container"
        )
    return _pack_blocks(recovered, header.block_bits, header.plaintext_bit_length)


def parse_key_file(text: str) -> CipherKey:
    """Parse a key file: three decimal primes, '#' comments, blank lines.

    Primality and distinctness are checked here; whether the key fits a
    particular block size is checked when the key is used.
    """
    values: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        try:
            values.append(int(body))
        except ValueError:
            raise KeyFileError(
                f"key file line {lineno}: expected a decimal integer, got {body!r}"
            ) from None
    if len(values) != 3:
        raise KeyFileError(
            f"key file must contain exactly three integers, found {len(values)}"
        )
    return validate_key(values[0], values[1], values[2], block_bits=1)


def format_key_file(key: CipherKey) -> str:
    """Render a key in the key-file format parse_key_file reads."""
    return (
        "# tpskbcvk key: key1, key2, key3 (decimal, one per line)\n"
        f"{key.key1}\n{key.key2}\n{key.key3}\n"
    )
