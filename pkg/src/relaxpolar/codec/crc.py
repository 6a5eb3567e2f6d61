"""CRC attach/check over bit arrays.

The register is the plain MSB-first shift register: for each input bit the
top register bit is XORed with it, the register shifts left, and the
polynomial is applied when that XOR is 1.  Check bits are appended MSB
first, so a valid word drives the register back to zero.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from relaxpolar.polarization.codespec import CrcConfig

__all__ = [
    "crc_attach",
    "crc_attach_batch",
    "crc_bits",
    "crc_bits_batch",
    "crc_check",
    "crc_check_batch",
    "crc_register",
]


def crc_register(bits: NDArray[np.uint8], config: CrcConfig) -> int:
    """Register content after shifting `bits` through it."""
    top = config.width - 1
    mask = (1 << config.width) - 1
    reg = config.init
    for b in np.asarray(bits, dtype=np.uint8).ravel():
        feedback = ((reg >> top) & 1) ^ int(b & 1)
        reg = (reg << 1) & mask
        if feedback:
            reg ^= config.polynomial
    return reg


def _to_bits(value: int, width: int) -> NDArray[np.uint8]:
    return np.array([(value >> (width - 1 - k)) & 1 for k in range(width)], dtype=np.uint8)


def crc_bits(payload: NDArray[np.uint8], config: CrcConfig) -> NDArray[np.uint8]:
    """The `width` check bits of `payload`, MSB first."""
    return _to_bits(crc_register(payload, config), config.width)


def crc_attach(payload: NDArray[np.uint8], config: CrcConfig) -> NDArray[np.uint8]:
    payload = np.asarray(payload, dtype=np.uint8)
    return np.concatenate([payload, crc_bits(payload, config)])


def crc_check(word: NDArray[np.uint8], config: CrcConfig) -> bool:
    return crc_register(word, config) == 0


@lru_cache(maxsize=32)
def _affine_form(config: CrcConfig, length: int) -> tuple[NDArray[np.uint8], NDArray[np.uint8]]:
    """CRC(m) = m @ A + c0 over GF(2) for messages of a fixed length."""
    zero = np.zeros(length, dtype=np.uint8)
    offset = crc_bits(zero, config)
    rows = np.zeros((length, config.width), dtype=np.uint8)
    for k in range(length):
        unit = zero.copy()
        unit[k] = 1
        rows[k] = crc_bits(unit, config) ^ offset
    return rows, offset


def crc_bits_batch(payloads: NDArray[np.uint8], config: CrcConfig) -> NDArray[np.uint8]:
    """Check bits for every row of `payloads`."""
    payloads = np.atleast_2d(np.asarray(payloads, dtype=np.uint8))
    rows, offset = _affine_form(config, payloads.shape[1])
    parity = (payloads.astype(np.int64) @ rows.astype(np.int64)) & 1
    return (parity.astype(np.uint8) ^ offset).astype(np.uint8)


def crc_attach_batch(payloads: NDArray[np.uint8], config: CrcConfig) -> NDArray[np.uint8]:
    payloads = np.atleast_2d(np.asarray(payloads, dtype=np.uint8))
    return np.concatenate([payloads, crc_bits_batch(payloads, config)], axis=1)


def crc_check_batch(words: NDArray[np.uint8], config: CrcConfig) -> NDArray[np.bool_]:
    """Row-wise check of payload+CRC words."""
    words = np.atleast_2d(np.asarray(words, dtype=np.uint8))
    split = words.shape[1] - config.width
    expected = crc_bits_batch(words[:, :split], config)
    return np.all(expected == words[:, split:], axis=1)
