"""Deterministic low-discrepancy sample points for residual scans.

A Weyl (Kronecker) sequence with square-root-of-prime increments: cheap,
platform-stable, and reproducible from (dim, count, seed) alone.  Solver
instances derive their seed from a hash of the transform parameters so a
given problem always sees the same scan points.
"""

from __future__ import annotations

import hashlib

import numpy as np

_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
    59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131,
)


def sample_points(dim: int, count: int, radius: float = 3.0, seed: int = 0) -> np.ndarray:
    """Return ``count`` points in [-radius, radius]^dim as a (count, dim) array."""
    if dim < 1 or dim > len(_PRIMES):
        raise ValueError(f"dim must be in 1..{len(_PRIMES)}")
    if count < 0:
        raise ValueError("count must be nonnegative")
    alphas = np.sqrt(np.asarray(_PRIMES[:dim], dtype=float))
    alphas -= np.floor(alphas)
    k = np.arange(1, count + 1, dtype=float)[:, None] + float(seed % 1_000_003)
    frac = np.mod(k * alphas[None, :], 1.0)
    return (2.0 * frac - 1.0) * radius


def instance_seed(*arrays) -> int:
    """Stable seed derived from the bytes of the given scalars/arrays."""
    h = hashlib.blake2b(digest_size=8)
    for a in arrays:
        h.update(np.ascontiguousarray(np.asarray(a, dtype=float)).tobytes())
    return int.from_bytes(h.digest(), "little") % 1_000_003
