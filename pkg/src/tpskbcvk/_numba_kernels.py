"""JIT-compiled uint64 block kernels. Import through kernels.py only.

Everything here assumes the caller already checked that the working
modulus fits kernels.FAST_MODULUS_LIMIT, so products of two residues
never overflow 64 bits. All scalars are passed as np.uint64; the uint64
constants below keep numba from promoting mixed int arithmetic to float.
"""

import numpy as np
from numba import njit

_ZERO = np.uint64(0)
_ONE = np.uint64(1)


@njit(cache=True)
def _modpow_u64(base, exponent, modulus):
    result = _ONE
    base = base % modulus
    while exponent > _ZERO:
        if exponent & _ONE:
            result = result * base % modulus
        base = base * base % modulus
        exponent = exponent >> _ONE
    return result


@njit(cache=True)
def modpow_u64(values, exponent, modulus):
    out = np.empty_like(values)
    for i in range(values.shape[0]):
        out[i] = _modpow_u64(values[i], exponent, modulus)
    return out


@njit(cache=True)
def encrypt_u64(values, exponent, modulus, mask):
    out = np.empty_like(values)
    for i in range(values.shape[0]):
        b = _modpow_u64(values[i], exponent, modulus)
        out[i] = _modpow_u64(b * mask % modulus, exponent, modulus)
    return out


@njit(cache=True)
def decrypt_u64(values, exponent, modulus, mask):
    out = np.empty_like(values)
    for i in range(values.shape[0]):
        b = _modpow_u64(values[i] % modulus * mask % modulus, exponent, modulus)
        out[i] = _modpow_u64(b, exponent, modulus)
    return out
