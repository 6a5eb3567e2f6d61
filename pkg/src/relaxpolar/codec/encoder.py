"""Relaxation-aware polar encoder.

The transform works on halves: a node of size S combines its two children
as (left XOR right, right), a relaxed node just concatenates them.  The
bit-reversal permutation is applied once at the output, so an all-zero
map reproduces u B_N F^{(x)n}.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from relaxpolar.exceptions import CodecError
from relaxpolar.polarization.maps import RelaxationMap

__all__ = [
    "bit_reversal_permutation",
    "butterfly",
    "encode",
    "generator_matrix",
    "kron_generator",
]


@lru_cache(maxsize=32)
def _bit_reversal(n: int) -> NDArray[np.int64]:
    idx = np.arange(2**n, dtype=np.int64)
    rev = np.zeros_like(idx)
    for k in range(n):
        rev |= ((idx >> k) & 1) << (n - 1 - k)
    rev.flags.writeable = False
    return rev


def bit_reversal_permutation(n: int) -> NDArray[np.int64]:
    """rev[k] = k with its n-bit binary expansion reversed."""
    return _bit_reversal(n)


def butterfly(bits: NDArray[np.uint8], relaxed: Sequence[NDArray[np.bool_]]) -> NDArray[np.uint8]:
    """Halves transform of the last axis; relaxed[k] flags the 2^k nodes k levels below the root.

    Over GF(2) the transform is its own inverse, which the decoders use to
    re-encode hard decisions.
    """
    v = np.array(bits, dtype=np.uint8, copy=True)
    size = v.shape[-1]
    depth = int(size).bit_length() - 1
    if 2**depth != size:
        raise CodecError(f"block length {size} is not a power of two")
    lead = v.shape[:-1]
    for k in range(depth - 1, -1, -1):
        half = 2 ** (depth - k - 1)
        active = ~np.asarray(relaxed[k], dtype=bool) if k < len(relaxed) else np.ones(2**k, dtype=bool)
        if not active.any():
            continue
        blocks = v.reshape(*lead, 2**k, 2, half)
        blocks[..., active, 0, :] ^= blocks[..., active, 1, :]
    return v


def encode(u: NDArray[np.uint8], relaxation: RelaxationMap) -> NDArray[np.uint8]:
    """Codeword(s) x for u (last axis of length N) under the map."""
    u = np.asarray(u, dtype=np.uint8)
    size = relaxation.length
    if u.shape[-1] != size:
        raise CodecError(f"expected {size} bits, got {u.shape[-1]}")
    v = butterfly(u, relaxation.levels[:-1])
    return v[..., bit_reversal_permutation(relaxation.n)]


def generator_matrix(relaxation: RelaxationMap) -> NDArray[np.uint8]:
    """Row i is the codeword of the i-th unit vector."""
    return encode(np.eye(relaxation.length, dtype=np.uint8), relaxation)


def kron_generator(n: int) -> NDArray[np.uint8]:
    """B_N F^{(x)n} built explicitly from Kronecker products."""
    kernel = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        g = np.kron(g, kernel) % 2
    return g[bit_reversal_permutation(n), :].astype(np.uint8)
