"""Arbitrary-precision modular arithmetic and primality utilities."""

from __future__ import annotations

import math
import random

# Witness set proven deterministic for every n < 2**64.
_DETERMINISTIC_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_DETERMINISTIC_LIMIT = 1 << 64
_RANDOM_WITNESS_ROUNDS = 64

_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
    53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
)


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """Return base**exponent mod modulus by square-and-multiply.

    The full power is never materialized; every intermediate value stays
    below modulus**2.
    """
    if modulus < 2:
        raise ValueError(f"modulus must be >= 2, got {modulus}")
    if base < 0 or exponent < 0:
        raise ValueError("base and exponent must be non-negative")
    result = 1
    base %= modulus
    while exponent:
        if exponent & 1:
            result = result * base % modulus
        base = base * base % modulus
        exponent >>= 1
    return result


def is_prime(n: int) -> bool:
    """Miller-Rabin primality test.

    Deterministic (fixed witness set) for n < 2**64; above that, 64 random
    witness rounds, so a composite passes with probability <= 4**-64.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 101 * 101:
        # survived trial division by every prime <= 97
        return True
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if n < _DETERMINISTIC_LIMIT:
        witnesses = _DETERMINISTIC_WITNESSES
    else:
        witnesses = [random.randrange(2, n - 1) for _ in range(_RANDOM_WITNESS_ROUNDS)]
    for a in witnesses:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def generate_prime(bits: int, rng: random.Random | None = None) -> int:
    """Return a uniform random prime p with 2**(bits-1) <= p < 2**bits.

    Draws odd candidates with the top bit forced (guaranteeing the bit
    length) and tests each. Pass a seeded ``random.Random`` for
    reproducible output; the default draws from the OS entropy pool.
    """
    if bits < 2:
        raise ValueError(f"bits must be >= 2, got {bits}")
    if rng is None:
        rng = random.SystemRandom()
    top = 1 << (bits - 1)
    while True:
        candidate = top | rng.getrandbits(bits - 1) | 1
        if is_prime(candidate):
            return candidate


def totient_semiprime(p: int, q: int) -> int:
    """Euler totient of the semiprime p*q, i.e. (p-1)*(q-1)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if p == q:
        raise ValueError(f"p and q must be distinct, both are {p}")
    return (p - 1) * (q - 1)


def prime_count_estimate(n: int) -> float:
    """Approximate number of primes <= n as n / ln(n).

    ``math.log`` accepts arbitrarily large ints, so the logarithm never
    overflows; if the quotient itself exceeds float range the estimate is
    returned as ``inf``.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    ln_n = math.log(n)
    try:
        return n / ln_n
    except OverflowError:
        pass
    try:
        return math.exp(ln_n - math.log(ln_n))
    except OverflowError:
        return math.inf
