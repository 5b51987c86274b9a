"""The triple-prime block cipher: key model and per-block transforms.

Keys are three distinct primes. The first two form the working semiprime
n = key1*key2 and the shared exponent k3 = phi(n) - 1; the third acts as a
multiplicative mask. Encryption runs both exponentiations modulo n**2,
decryption modulo n -- the asymmetry is intentional and round-trips
because plaintext blocks are constrained below n. Since k3 = -1 mod phi(n)
each exponentiation is a modular inversion on units, so the whole cipher
reduces to c = p * key3^-1 (mod n) plus the extra structure mod n**2.

Identical blocks encrypt identically under one key (no chaining, no
nonce), so ciphertext leaks plaintext block frequencies. Educational use
only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import bigmath


class CipherError(Exception):
    """Base class for cipher-domain failures."""


class KeyValidationError(CipherError, ValueError):
    """Key material rejected: non-prime, duplicated, or too small for the block size."""


class BlockRangeError(CipherError, ValueError):
    """Plaintext block value outside [0, 2**block_bits)."""


class CorruptCiphertextError(CipherError, ValueError):
    """Ciphertext block outside its valid domain (wrong key or damaged data)."""


@dataclass(frozen=True)
class CipherKey:
    """The three private primes. Build via validate_key or generate_key."""

    key1: int
    key2: int
    key3: int


@dataclass(frozen=True)
class CipherParams:
    """Derived values shared by every block transform under one key."""

    n: int
    n_squared: int
    phi_n: int
    k3: int
    block_bits: int

    @property
    def block_limit(self) -> int:
        """Exclusive upper bound for plaintext block values."""
        return 1 << self.block_bits


@dataclass(frozen=True)
class EncryptionTrace:
    """One block encryption with its intermediate masked value."""

    p: int
    b_intermediate: int
    c: int


def validate_key(key1: int, key2: int, key3: int, block_bits: int) -> CipherKey:
    """Check the key criteria and return the validated key.

    All three components must be prime and pairwise distinct, and the
    semiprime key1*key2 must exceed the largest block value so that blocks
    survive reduction modulo n.
    """
    if block_bits < 1:
        raise KeyValidationError(f"block_bits must be >= 1, got {block_bits}")
    for name, value in (("key1", key1), ("key2", key2), ("key3", key3)):
        if not bigmath.is_prime(value):
            raise KeyValidationError(f"{name}={value} is not prime")
    if len({key1, key2, key3}) != 3:
        raise KeyValidationError(
            f"key components must be pairwise distinct, got ({key1}, {key2}, {key3})"
        )
    if (1 << block_bits) - 1 >= key1 * key2:
        raise KeyValidationError(
            f"{block_bits}-bit blocks do not fit below the semiprime: "
            f"2**{block_bits} - 1 >= key1*key2 = {key1 * key2}"
        )
    return CipherKey(key1, key2, key3)


def derive_params(key: CipherKey, block_bits: int) -> CipherParams:
    """Compute n, n**2, phi(n) and the shared exponent for a validated key."""
    n = key.key1 * key.key2
    phi_n = (key.key1 - 1) * (key.key2 - 1)
    return CipherParams(
        n=n,
        n_squared=n * n,
        phi_n=phi_n,
        k3=phi_n - 1,
        block_bits=block_bits,
    )


def generate_key(prime_bits: int, rng: random.Random | None = None) -> CipherKey:
    """Generate three distinct random primes of equal bit length.

    Bit lengths below 5 cannot supply three distinct primes of the exact
    length and are rejected.
    """
    if prime_bits < 5:
        raise KeyValidationError(
            f"prime_bits must be >= 5 to fit three distinct primes, got {prime_bits}"
        )
    chosen: list[int] = []
    while len(chosen) < 3:
        p = bigmath.generate_prime(prime_bits, rng)
        if p not in chosen:
            chosen.append(p)
    return CipherKey(chosen[0], chosen[1], chosen[2])


def encrypt_block(p: int, params: CipherParams, key3: int) -> EncryptionTrace:
    """Encrypt one block; the returned trace carries the ciphertext in .c."""
    if not 0 <= p < params.block_limit:
        raise BlockRangeError(
            f"plaintext block {p} outside [0, 2**{params.block_bits})"
        )
    b = bigmath.mod_pow(p, params.k3, params.n_squared)
    c = bigmath.mod_pow(b * key3, params.k3, params.n_squared)
    return EncryptionTrace(p=p, b_intermediate=b, c=c)


def decrypt_block(c: int, params: CipherParams, key3: int) -> int:
    """Invert encrypt_block; both exponentiations reduce modulo n."""
    if not 0 <= c < params.n_squared:
        raise CorruptCiphertextError(
            f"ciphertext block {c} outside [0, n**2 = {params.n_squared})"
        )
    b = bigmath.mod_pow(c * key3, params.k3, params.n)
    return bigmath.mod_pow(b, params.k3, params.n)
