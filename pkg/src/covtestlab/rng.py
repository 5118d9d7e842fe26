"""Deterministic random streams.

Every random draw in the package goes through :func:`stream`, which hashes
``(base_seed, purpose, replicate)`` into a 64-bit seed for a PCG64 generator.
Replicates therefore never depend on the order in which they are executed.
Normals are produced by pushing open-interval uniforms through
:func:`covtestlab.distributions.norm_ppf`, so the output is fixed by the
uniform bit stream alone.
"""

import hashlib
import struct

import numpy as np

from .distributions import norm_ppf

_MASK64 = (1 << 64) - 1
_TWO53 = float(1 << 53)


def derive_seed(base_seed, purpose, replicate=0):
    """Hash a base seed, purpose tag and replicate index into a 64-bit seed."""
    h = hashlib.blake2b(digest_size=8, person=b"covtestlab")
    h.update(struct.pack("<Q", int(base_seed) & _MASK64))
    h.update(str(purpose).encode("utf-8"))
    h.update(b"\x00")
    h.update(struct.pack("<q", int(replicate)))
    return int.from_bytes(h.digest(), "little")


def stream(base_seed, purpose, replicate=0):
    return np.random.Generator(np.random.PCG64(derive_seed(base_seed, purpose, replicate)))


def uniforms(gen, size):
    """Uniforms strictly inside (0, 1) built from 53 random bits each."""
    k = gen.integers(0, 1 << 53, size=size, dtype=np.int64)
    return (k.astype(np.float64) + 0.5) / _TWO53


def standard_normals(gen, size):
    return norm_ppf(uniforms(gen, size))
