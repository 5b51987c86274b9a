"""Key-space estimators and a desk-scale exhaustive key-recovery attack.

The estimators turn a key-space size into an expected search duration
(half the space at a given trial rate), and a prime bit length into the
time needed to test every prime below 2**bits. The attack actually runs
the exhaustive search at toy sizes against known plaintext/ciphertext
pairs, confirming the arithmetic the estimators extrapolate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bigmath, kernels
from .cipher import CipherKey, derive_params, encrypt_block

SECONDS_PER_YEAR = 365.25 * 86400.0

# Above this the canonical triple space exceeds ~10**8 and a desk run
# stops being a demonstration.
MAX_ATTACK_PRIME_BITS = 12


@dataclass(frozen=True)
class KeysearchEstimate:
    """Expected exhaustive-search time over a key space."""

    alternatives: float
    rate_per_microsecond: float
    half_space_seconds: float

    @property
    def hours(self) -> float:
        return self.half_space_seconds / 3600.0

    @property
    def years(self) -> float:
        return self.half_space_seconds / SECONDS_PER_YEAR


@dataclass(frozen=True)
class PrimeSearchEstimate:
    """Time to test every prime below 2**key_bits at a given rate."""

    key_bits: int
    tests_per_second: float
    passes: int
    estimated_primes: float
    seconds: float

    @property
    def years(self) -> float:
        return self.seconds / SECONDS_PER_YEAR


@dataclass(frozen=True)
class AttackResult:
    """Outcome of a brute-force key recovery.

    Candidates are canonical (key1 < key2); swapping the first two primes
    never changes the cipher, so each entry stands for both orderings.
    trials counts the canonical triples actually tested.
    """

    candidates: frozenset[CipherKey]
    trials: int


def keysearch_time(
    alternatives: float, rate_per_microsecond: float
) -> KeysearchEstimate:
    """Expected time to hit the key: half the space at the given rate."""
    if alternatives < 1:
        raise ValueError(f"alternatives must be >= 1, got {alternatives}")
    if rate_per_microsecond <= 0:
        raise ValueError(f"rate must be positive, got {rate_per_microsecond}")
    microseconds = alternatives / 2.0 / rate_per_microsecond
    return KeysearchEstimate(
        alternatives=float(alternatives),
        rate_per_microsecond=float(rate_per_microsecond),
        half_space_seconds=microseconds / 1e6,
    )


def prime_search_duration(
    key_bits: int, tests_per_second: float, passes: int = 1
) -> PrimeSearchEstimate:
    """Duration of `passes` sweeps over the estimated primes below 2**key_bits.

    One pass is the default; pass 3 for the reading where each of the
    three key primes is searched independently.
    """
    if key_bits < 2:
        raise ValueError(f"key_bits must be >= 2, got {key_bits}")
    if tests_per_second <= 0:
        raise ValueError(f"rate must be positive, got {tests_per_second}")
    if passes < 1:
        raise ValueError(f"passes must be >= 1, got {passes}")
    # math.log of the exact integer; 2**key_bits never touches float range
    count = bigmath.prime_count_estimate(1 << key_bits)
    return PrimeSearchEstimate(
        key_bits=key_bits,
        tests_per_second=float(tests_per_second),
        passes=passes,
        estimated_primes=count,
        seconds=count * passes / tests_per_second,
    )


def format_duration(seconds: float) -> str:
    """Humanize a duration with the largest sensible unit."""
    if seconds < 60:
        return f"{seconds:.4g} seconds"
    if seconds < 3600:
        return f"{seconds / 60:.4g} minutes"
    if seconds < 2 * 86400:
        return f"{seconds / 3600:.4g} hours"
    if seconds < 2 * SECONDS_PER_YEAR:
        return f"{seconds / 86400:.4g} days"
    return f"{seconds / SECONDS_PER_YEAR:.4g} years"


def _primes_below(limit: int) -> list[int]:
    if limit <= 2:
        return []
    mask = np.ones(limit, dtype=bool)
    mask[:2] = False
    for i in range(2, math.isqrt(limit - 1) + 1):
        if mask[i]:
            mask[i * i :: i] = False
    return [int(p) for p in np.nonzero(mask)[0]]


def parse_pairs_file(text: str) -> list[tuple[int, int]]:
    """Known pairs, one 'PLAIN CIPHER' decimal pair per line ('#' comments)."""
    pairs: list[tuple[int, int]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        parts = body.split()
        if len(parts) != 2:
            raise ValueError(
                f"pairs file line {lineno}: expected 'PLAIN CIPHER', got {body!r}"
            )
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ValueError(
                f"pairs file line {lineno}: expected decimal integers, got {body!r}"
            ) from None
    return pairs


def brute_force_recover(
    pairs: list[tuple[int, int]], max_prime_bits: int, block_bits: int
) -> AttackResult:
    """Exhaust every candidate key triple consistent with all known pairs.

    Candidates range over primes below 2**max_prime_bits, taken as
    canonical (key1 < key2, key3 distinct from both) and filtered to keys
    whose semiprime fits the block size. The key3 sweep for each semiprime
    is vectorized, since all those candidates share one exponent and
    modulus.
    """
    if not 2 <= max_prime_bits <= MAX_ATTACK_PRIME_BITS:
        raise ValueError(
            f"max_prime_bits must be in 2..{MAX_ATTACK_PRIME_BITS}, got {max_prime_bits}"
        )
    pairs = list(pairs)
    if not pairs:
        raise ValueError("at least one known plaintext/ciphertext pair is required")
    block_limit = 1 << block_bits
    for p, c in pairs:
        if not 0 <= p < block_limit:
            raise ValueError(f"plaintext block {p} outside [0, 2**{block_bits})")
        if c < 0:
            raise ValueError(f"ciphertext block {c} is negative")

    primes = _primes_below(1 << max_prime_bits)
    candidates: set[CipherKey] = set()
    trials = 0
    for i, k1 in enumerate(primes):
        for k2 in primes[i + 1 :]:
            n = k1 * k2
            if block_limit - 1 >= n:
                continue
            key3s = [q for q in primes if q != k1 and q != k2]
            if not key3s:
                continue
            params = derive_params(CipherKey(k1, k2, key3s[0]), block_bits)
            trials += len(key3s)
            # the unmasked value is shared by every key3 candidate
            masked_inputs = [
                bigmath.mod_pow(p, params.k3, params.n_squared) for p, _ in pairs
            ]
            if any(c >= params.n_squared for _, c in pairs):
                continue
            if params.n_squared <= kernels.FAST_MODULUS_LIMIT:
                k3_arr = np.array(key3s, dtype=np.uint64)
                alive = np.ones(len(key3s), dtype=bool)
                for b, (_, c) in zip(masked_inputs, pairs):
                    products = b * k3_arr % np.uint64(params.n_squared)
                    outputs = kernels.modpow_blocks(
                        products, params.k3, params.n_squared, backend="numpy"
                    )
                    alive &= outputs == np.uint64(c)
                    if not alive.any():
                        break
                for q in k3_arr[alive]:
                    candidates.add(CipherKey(k1, k2, int(q)))
            else:
                for q in key3s:
                    if all(
                        bigmath.mod_pow(b * q, params.k3, params.n_squared) == c
                        for b, (_, c) in zip(masked_inputs, pairs)
                    ):
                        candidates.add(CipherKey(k1, k2, q))
    return AttackResult(candidates=frozenset(candidates), trials=trials)


def verify_candidate(
    key: CipherKey, pairs: list[tuple[int, int]], block_bits: int
) -> bool:
    """Re-encrypt every pair under a candidate and compare ciphertexts."""
    params = derive_params(key, block_bits)
    return all(encrypt_block(p, params, key.key3).c == c for p, c in pairs)
