"""Portable deterministic randomness built on SplitMix64.

Every stochastic choice in the pipeline (frame draws, box noise, synthetic
embeddings) flows through the counter-addressable streams defined here, so
results are bit-reproducible regardless of execution order or parallelism.
A stream is identified by a 64-bit key; output ``k`` of a stream is
``mix64(key + (k + 1) * GAMMA)``, which allows O(1) random access.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# SplitMix64 constants (Steele, Lea & Flood).
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# FNV-1a 64-bit constants.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(text: str) -> int:
    """FNV-1a 64-bit hash of the UTF-8 encoding of ``text``."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def mix64(z: int) -> int:
    """SplitMix64 finalizer: bijective avalanche mix of a 64-bit value."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def stream_u64(key: int, index: int) -> int:
    """Output ``index`` of the SplitMix64 stream seeded with ``key``."""
    return mix64((key + ((index + 1) * GAMMA)) & _MASK64)


def stream_u64_block(key: int, start: int, count: int) -> np.ndarray:
    """Vectorized ``stream_u64`` for outputs ``start .. start+count-1``.

    Bit-identical to the scalar path; uint64 arithmetic wraps mod 2**64.
    """
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key & _MASK64) + idx * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


def bounded_int(value_u64: int, low: int, high: int) -> int:
    """Map a u64 onto the inclusive range [low, high] by modulo.

    The modulo bias over a 64-bit source is below 2**-60 for the narrow
    ranges used here (noise offsets, frame picks), far beneath every
    statistical tolerance in the test suite.
    """
    span = high - low + 1
    return low + (value_u64 % span)


def uniform_open01(values_u64: np.ndarray) -> np.ndarray:
    """Map u64 samples to floats in (0, 1]: (v >> 11 + 1) * 2**-53."""
    return ((values_u64 >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def standard_normal_block(key: int, start: int, count: int) -> np.ndarray:
    """``count`` standard-normal draws from stream ``key`` via Box-Muller.

    Draw ``i`` consumes stream outputs ``2i`` and ``2i + 1``, so disjoint
    index ranges give independent, order-free blocks.
    """
    u = stream_u64_block(key, 2 * start, 2 * count)
    u1 = uniform_open01(u[0::2])
    u2 = uniform_open01(u[1::2])
    r = np.sqrt(-2.0 * np.log(u1))
    return r * np.cos(2.0 * np.pi * u2)
