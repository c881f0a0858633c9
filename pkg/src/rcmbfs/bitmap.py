"""Aligned bitmap used for frontiers and visited sets.

Bits live in uint64 words.  Storage is rounded up to whole 512-bit blocks
(64 bytes) and the first word is placed on a 64-byte boundary, so any block
index maps to one aligned cache line and an 8-word slice.  Blocks are the
granularity of partition ownership in the bottom-up kernels: a thread that
owns a block range owns its words outright and may update them without
atomics.

Invariant: bits at positions >= n_bits are always zero.  Every operation
below preserves it; kernels rely on it when counting and converting.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._atomics import atomic_fetch_or_u64

WORD_BITS = 64
BLOCK_BITS = 512
BLOCK_WORDS = BLOCK_BITS // WORD_BITS
_ALIGN = 64

__all__ = [
    "Bitmap",
    "WORD_BITS",
    "BLOCK_BITS",
    "BLOCK_WORDS",
    "or_blocks",
    "copy_blocks",
]


def _aligned_u64(n_words: int) -> tuple[np.ndarray, np.ndarray]:
    """Allocate ``n_words`` zeroed uint64 with the first byte 64-aligned.

    Returns (backing buffer, aligned view).  The buffer must be kept alive
    as long as the view is used.
    """
    raw = np.zeros(n_words * 8 + _ALIGN, dtype=np.uint8)
    off = (-raw.ctypes.data) % _ALIGN
    words = raw[off : off + n_words * 8].view(np.uint64)
    return raw, words


@njit(nogil=True, cache=True)
def _test_and_set(words, bit):
    w = bit >> 6
    m = np.uint64(1) << np.uint64(bit & 63)
    old = atomic_fetch_or_u64(words, w, m)
    return (old & m) != 0


class Bitmap:
    """Fixed-size bit array of ``n_bits`` bits.

    Attributes
    ----------
    n_bits : int
        Logical size.  Valid bit positions are ``0 <= i < n_bits``.
    words : numpy.ndarray
        uint64 storage, 64-byte aligned, ``n_blocks * 8`` words long.
    """

    __slots__ = ("n_bits", "n_blocks", "words", "_raw")

    def __init__(self, n_bits: int):
        if n_bits < 0:
            raise ValueError(f"n_bits must be non-negative, got {n_bits}")
        self.n_bits = int(n_bits)
        self.n_blocks = -(-self.n_bits // BLOCK_BITS)
        self._raw, self.words = _aligned_u64(self.n_blocks * BLOCK_WORDS)

    @classmethod
    def from_indices(cls, n_bits: int, ids) -> "Bitmap":
        bm = cls(n_bits)
        bm.set_many(ids)
        return bm

    @property
    def n_words(self) -> int:
        return self.words.shape[0]

    def _check_bit(self, i: int) -> int:
        i = int(i)
        if not 0 <= i < self.n_bits:
            raise IndexError(f"bit {i} out of range for bitmap of {self.n_bits} bits")
        return i

    def test(self, i: int) -> bool:
        i = self._check_bit(i)
        return bool(self.words[i >> 6] >> np.uint64(i & 63) & np.uint64(1))

    def set(self, i: int) -> None:
        i = self._check_bit(i)
        self.words[i >> 6] |= np.uint64(1) << np.uint64(i & 63)

    def test_and_set(self, i: int) -> bool:
        """Atomically set bit ``i``; return its previous value."""
        i = self._check_bit(i)
        return bool(_test_and_set(self.words, i))

    def set_many(self, ids) -> None:
        ids = np.asarray(ids, dtype=np.int64)
        if ids.size == 0:
            return
        if ids.min() < 0 or ids.max() >= self.n_bits:
            bad = ids[(ids < 0) | (ids >= self.n_bits)][0]
            raise IndexError(f"bit {bad} out of range for bitmap of {self.n_bits} bits")
        np.bitwise_or.at(
            self.words, ids >> 6, np.uint64(1) << (ids & 63).astype(np.uint64)
        )

    def clear_all(self) -> None:
        self.words[:] = 0

    def count(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def to_indices(self) -> np.ndarray:
        """Positions of set bits, ascending, as uint32."""
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return np.flatnonzero(bits[: self.n_bits]).astype(np.uint32)

    def copy(self) -> "Bitmap":
        out = Bitmap(self.n_bits)
        out.words[:] = self.words
        return out

    def __repr__(self) -> str:
        return f"Bitmap(n_bits={self.n_bits}, set={self.count()})"


def _check_pair(dst: Bitmap, src: Bitmap, block_lo: int, block_hi: int) -> tuple[int, int]:
    if dst.n_bits != src.n_bits:
        raise ValueError(
            f"bitmap size mismatch: {dst.n_bits} vs {src.n_bits} bits"
        )
    if not (0 <= block_lo <= block_hi <= dst.n_blocks):
        raise IndexError(
            f"block range [{block_lo}, {block_hi}) invalid for {dst.n_blocks} blocks"
        )
    return block_lo * BLOCK_WORDS, block_hi * BLOCK_WORDS


def or_blocks(dst: Bitmap, src: Bitmap, block_lo: int, block_hi: int) -> None:
    """``dst |= src`` over whole blocks ``[block_lo, block_hi)``.

    Runs as vectorized word-wide operations on the aligned storage.  Both
    bitmaps must have the same logical size.
    """
    lo, hi = _check_pair(dst, src, block_lo, block_hi)
    np.bitwise_or(dst.words[lo:hi], src.words[lo:hi], out=dst.words[lo:hi])


def copy_blocks(dst: Bitmap, src: Bitmap, block_lo: int, block_hi: int) -> None:
    """Copy whole blocks ``[block_lo, block_hi)`` of ``src`` into ``dst``."""
    lo, hi = _check_pair(dst, src, block_lo, block_hi)
    dst.words[lo:hi] = src.words[lo:hi]
