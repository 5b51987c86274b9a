"""Batch block transforms with selectable backends.

Every block in a stream shares one exponent and one modulus, so a single
square-and-multiply ladder can drive whole arrays of residues at once.
Three implementations:

  numba    elementwise @njit ladder (default whenever numba imports)
  numpy    vectorized ladder on uint64 arrays
  python   per-block arbitrary-precision ints, works for any key size

The TPSKBCVK_BACKEND environment variable picks the default. The uint64
backends require the working modulus to stay within FAST_MODULUS_LIMIT
(2**32) so that products of two residues never overflow 64 bits; larger
moduli silently use the python backend. Every key built from 8-bit primes
fits the fast path (n**2 <= 2**32 exactly when n <= 2**16).

numba is imported lazily on first use, so merely loading this module (or
running with the numpy/python backends) never pays JIT startup cost.
"""

from __future__ import annotations

import importlib.util
import os
from collections.abc import Sequence

import numpy as np

from . import bigmath
from .cipher import CipherParams

ENV_VAR = "TPSKBCVK_BACKEND"
BACKENDS = ("numba", "numpy", "python")

# Largest working modulus the uint64 ladders accept: (2**32 - 1)**2 < 2**64.
FAST_MODULUS_LIMIT = 1 << 32

_numba_module = None


def _numba_available() -> bool:
    return importlib.util.find_spec("numba") is not None


def _numba_impl():
    global _numba_module
    if _numba_module is None:
        from . import _numba_kernels

        _numba_module = _numba_kernels
    return _numba_module


def default_backend() -> str:
    """Backend named by TPSKBCVK_BACKEND, else numba when importable."""
    choice = os.environ.get(ENV_VAR, "").strip().lower()
    if choice:
        if choice not in BACKENDS:
            raise ValueError(
                f"{ENV_VAR}={choice!r}: expected one of {', '.join(BACKENDS)}"
            )
        if choice == "numba" and not _numba_available():
            raise RuntimeError(f"{ENV_VAR}=numba but numba is not importable")
        return choice
    return "numba" if _numba_available() else "numpy"


def resolve_backend(backend: str | None, modulus: int) -> str:
    """Effective backend for a working modulus; None means the default.

    A modulus beyond FAST_MODULUS_LIMIT downgrades any uint64 backend to
    python, since correctness beats the requested fast path.
    """
    chosen = default_backend() if backend is None else backend
    if chosen not in BACKENDS:
        raise ValueError(f"unknown backend {chosen!r}: expected one of {', '.join(BACKENDS)}")
    if chosen != "python" and modulus > FAST_MODULUS_LIMIT:
        return "python"
    if chosen == "numba" and not _numba_available():
        raise RuntimeError("numba backend requested but numba is not importable")
    return chosen


def _modpow_numpy(values: np.ndarray, exponent: int, modulus: int) -> np.ndarray:
    m = np.uint64(modulus)
    result = np.ones_like(values)
    base = values % m
    e = int(exponent)
    while e:
        if e & 1:
            result = result * base % m
        base = base * base % m
        e >>= 1
    return result


def _as_u64(values) -> np.ndarray:
    return np.ascontiguousarray(values, dtype=np.uint64)


def modpow_blocks(
    values, exponent: int, modulus: int, backend: str | None = None
) -> np.ndarray | list[int]:
    """values**exponent mod modulus for a whole batch of block values."""
    chosen = resolve_backend(backend, modulus)
    if chosen == "python":
        return [bigmath.mod_pow(int(v), exponent, modulus) for v in values]
    arr = _as_u64(values)
    if chosen == "numba":
        return _numba_impl().modpow_u64(
            arr, np.uint64(exponent), np.uint64(modulus)
        )
    return _modpow_numpy(arr, exponent, modulus)


def encrypt_blocks(
    values: Sequence[int] | np.ndarray,
    params: CipherParams,
    key3: int,
    backend: str | None = None,
) -> np.ndarray | list[int]:
    """Encrypt a batch of plaintext block values.

    Returns a uint64 array on the fast backends and a list of ints on the
    python backend. Block-range validation is the caller's job; values
    must already be < 2**block_bits.
    """
    n2, k3 = params.n_squared, params.k3
    chosen = resolve_backend(backend, n2)
    if chosen == "python":
        out = []
        for v in values:
            b = bigmath.mod_pow(int(v), k3, n2)
            out.append(bigmath.mod_pow(b * key3, k3, n2))
        return out
    arr = _as_u64(values)
    mask = key3 % n2
    if chosen == "numba":
        return _numba_impl().encrypt_u64(
            arr, np.uint64(k3), np.uint64(n2), np.uint64(mask)
        )
    b = _modpow_numpy(arr, k3, n2)
    return _modpow_numpy(b * np.uint64(mask) % np.uint64(n2), k3, n2)


def decrypt_blocks(
    values: Sequence[int] | np.ndarray,
    params: CipherParams,
    key3: int,
    backend: str | None = None,
) -> np.ndarray | list[int]:
    """Invert encrypt_blocks for a batch of ciphertext block values.

    Callers must have rejected values >= n**2 already; the uint64 gate is
    still n**2 so either direction of a key picks the same backend.
    """
    n, k3 = params.n, params.k3
    chosen = resolve_backend(backend, params.n_squared)
    if chosen == "python":
        out = []
        for v in values:
            b = bigmath.mod_pow(int(v) * key3, k3, n)
            out.append(bigmath.mod_pow(b, k3, n))
        return out
    arr = _as_u64(values)
    mask = key3 % n
    if chosen == "numba":
        return _numba_impl().decrypt_u64(
            arr, np.uint64(k3), np.uint64(n), np.uint64(mask)
        )
    b = _modpow_numpy(arr % np.uint64(n) * np.uint64(mask) % np.uint64(n), k3, n)
    return _modpow_numpy(b, k3, n)
