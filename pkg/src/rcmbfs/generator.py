"""Deterministic Kronecker (R-MAT) edge-list generation.

Each edge is sampled independently: one uniform draw per recursion level
selects a quadrant of the 2x2 initiator matrix, accumulating one source bit
and one destination bit per level.  Draws come from counter-based Philox
streams keyed ``(seed, chunk_index)`` over fixed 65536-edge chunks, so the
output is a pure function of (params, seed) regardless of evaluation order
or worker count, and any chunk can be regenerated in isolation.

Vertex ids are then scrambled by a seeded bijection on [0, 2^scale) built
from invertible word operations (odd multiply, xor-shift, add, all modulo
2^scale), hiding generation order without changing the degree distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import EdgeList

__all__ = [
    "KroneckerParams",
    "kronecker_generate",
    "scramble_ids",
    "generator_metadata",
    "isolated_count",
    "CHUNK_EDGES",
]

CHUNK_EDGES = 1 << 16
_M64 = (1 << 64) - 1
DEFAULT_INITIATOR = (0.57, 0.19, 0.19, 0.05)


@dataclass
class KroneckerParams:
    """Parameters of one generation run.

    ``scale`` is log2 of the vertex count, ``edgefactor`` the number of raw
    edge pairs per vertex.  The default initiator matches the standard
    benchmark setting.
    """

    scale: int
    edgefactor: int = 16
    initiator: tuple[float, float, float, float] = DEFAULT_INITIATOR
    seed: int = 1

    @property
    def n(self) -> int:
        return 1 << self.scale

    @property
    def m(self) -> int:
        return self.n * self.edgefactor

    def validate(self) -> None:
        if not 1 <= self.scale <= 30:
            raise ValueError(f"scale must be in [1, 30], got {self.scale}")
        if self.edgefactor < 1:
            raise ValueError(f"edgefactor must be >= 1, got {self.edgefactor}")
        if len(self.initiator) != 4 or any(x < 0 for x in self.initiator):
            raise ValueError("initiator must be 4 non-negative probabilities")
        if abs(sum(self.initiator) - 1.0) > 1e-9:
            raise ValueError(
                f"initiator must sum to 1 within 1e-9, got {sum(self.initiator)!r}"
            )
        if not 0 <= self.seed <= _M64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def _scramble_constants(scale: int, seed: int):
    """Derive per-round (multiplier, addend, shift) triples from the seed."""
    x = (seed ^ 0xD6E8FEB86659FD93) & _M64
    rounds = []
    shifts = (max(1, scale // 2), max(1, scale // 3), max(1, (2 * scale) // 3))
    for r in range(3):
        x = _splitmix64(x)
        mult = x | 1
        x = _splitmix64(x)
        add = x
        rounds.append((mult, add, shifts[r]))
    return rounds


def scramble_ids(ids: np.ndarray, scale: int, seed: int) -> np.ndarray:
    """Apply the seeded vertex-label bijection to an array of ids.

    Every step (odd multiply mod 2^scale, xor with right shift, add mod
    2^scale) is individually invertible, so the composite is a permutation
    of [0, 2^scale).  Vectorized, O(1) extra memory per call.
    """
    mask = np.uint64((1 << scale) - 1)
    x = np.asarray(ids, dtype=np.uint64).copy()
    for mult, add, shift in _scramble_constants(scale, seed):
        np.multiply(x, np.uint64(mult & _M64), out=x)
        np.bitwise_and(x, mask, out=x)
        np.bitwise_xor(x, x >> np.uint64(shift), out=x)
        np.add(x, np.uint64(add & ((1 << scale) - 1)), out=x)
        np.bitwise_and(x, mask, out=x)
    return x


def _chunk_pairs(params: KroneckerParams, chunk: int, count: int):
    """Sample ``count`` raw (src, dst) pairs from chunk stream ``chunk``."""
    a, b, c, _ = params.initiator
    t1, t2, t3 = a, a + b, a + b + c
    key = np.array([params.seed, chunk], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    u = rng.random((count, params.scale))
    # quadrant index 0..3; high bit -> src, low bit -> dst
    q = (
        (u >= t1).astype(np.uint8)
        + (u >= t2).astype(np.uint8)
        + (u >= t3).astype(np.uint8)
    )
    # column 0 decides the most significant bit (coarsest recursion level)
    weights = np.uint64(1) << np.arange(params.scale - 1, -1, -1, dtype=np.uint64)
    src = ((q >> 1) & 1).astype(np.uint64) @ weights
    dst = (q & 1).astype(np.uint64) @ weights
    return src, dst


def kronecker_generate(params: KroneckerParams) -> EdgeList:
    """Generate exactly ``n * edgefactor`` raw edge pairs.

    Output may contain duplicates and self-loops; canonicalization is the
    CSR builder's job.  Byte-identical for identical params.
    """
    params.validate()
    m = params.m
    out = np.empty((m, 2), dtype=np.uint32)
    for chunk, lo in enumerate(range(0, m, CHUNK_EDGES)):
        hi = min(lo + CHUNK_EDGES, m)
        src, dst = _chunk_pairs(params, chunk, hi - lo)
        out[lo:hi, 0] = scramble_ids(src, params.scale, params.seed)
        out[lo:hi, 1] = scramble_ids(dst, params.scale, params.seed)
    return EdgeList(n_declared=params.n, edges=out)


def isolated_count(el: EdgeList) -> int:
    """Vertices of ``el`` that appear in no edge pair."""
    if el.edges.size == 0:
        return el.n_declared
    return el.n_declared - int(np.unique(el.edges).size)


def generator_metadata(params: KroneckerParams, el: EdgeList | None = None) -> dict:
    """Sidecar fields fully describing a generation run."""
    meta = {
        "generator": "kronecker",
        "generator_version": 1,
        "scale": params.scale,
        "edgefactor": params.edgefactor,
        "n": params.n,
        "m": params.m,
        "seed": params.seed,
        "initiator": ",".join(f"{x:g}" for x in params.initiator),
        "prng": "philox4x64",
        "stream_chunk_edges": CHUNK_EDGES,
        "scramble": "mul-xorshift-add, 3 rounds, mod 2^scale",
    }
    if el is not None:
        meta["isolated_count"] = isolated_count(el)
    return meta
