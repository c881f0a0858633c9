"""Work-stealing partitions for bottom-up traversal.

The vertex range [0, n) is cut into ``partition_factor * threads`` ranges
aligned to 512-vertex blocks (one cache line of bitmap).  Block counts form
a descending near-arithmetic sequence with first term about twice the mean,
so early partitions are large and late ones small: threads that finish
early steal small leftovers, which evens out skewed per-partition work.

Each partition also carries mutable live bounds.  Shrinking advances them
past fully-visited blocks so later bottom-up steps skip finished regions
entirely; bounds only ever tighten.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .bitmap import BLOCK_BITS, Bitmap

__all__ = ["PartitionSet", "get_partitions", "shrink_partition"]


@dataclass
class PartitionSet:
    """Static ranges plus per-partition live bounds and the shared cursor.

    ``starts``/``ends`` are fixed at construction: disjoint, covering
    [0, n), block-aligned except the final end.  ``live_lo``/``live_hi``
    start equal to them and tighten monotonically until :meth:`reset`.
    ``cursor`` is a one-element int64 array bumped atomically by worker
    threads claiming partitions.
    """

    n: int
    starts: np.ndarray
    ends: np.ndarray
    live_lo: np.ndarray
    live_hi: np.ndarray
    cursor: np.ndarray

    @property
    def n_partitions(self) -> int:
        return int(self.starts.size)

    @property
    def block_counts(self) -> np.ndarray:
        return (self.ends - self.starts + BLOCK_BITS - 1) // BLOCK_BITS

    def reset(self) -> None:
        """Restore full live bounds and rewind the cursor (new traversal)."""
        self.live_lo[:] = self.starts
        self.live_hi[:] = self.ends
        self.cursor[0] = 0

    def reset_cursor(self) -> None:
        self.cursor[0] = 0

    def live_total(self) -> int:
        """Vertices currently inside live bounds, summed over partitions."""
        return int(np.sum(self.live_hi - self.live_lo))


def _descending_block_counts(total_blocks: int, n_parts: int) -> np.ndarray:
    """Non-increasing positive block counts summing exactly to total_blocks.

    Ideal real-valued sequence: first term 2*total/n_parts - 1, last term 1,
    linear in between (sums to total exactly).  Taking floors in exact
    integer arithmetic keeps it non-increasing and >= 1; the lost remainder
    (< n_parts) is returned to the largest partitions, one block each, which
    preserves monotonicity.
    """
    b, s = total_blocks, n_parts
    if s == 1:
        return np.array([b], dtype=np.int64)
    num0 = (2 * b - s) * (s - 1)
    step = 2 * b - 2 * s
    den = s * (s - 1)
    counts = np.array([(num0 - i * step) // den for i in range(s)], dtype=np.int64)
    delta = b - int(counts.sum())
    counts[:delta] += 1
    return counts


def get_partitions(n: int, partition_factor: int, threads: int) -> PartitionSet:
    """Build the partition set for an n-vertex graph.

    Requests ``partition_factor * threads`` partitions; if the graph has
    fewer 512-vertex blocks than that, the count is clamped to the block
    count (every partition must own at least one block) with a warning.
    """
    if n < 1:
        raise ValueError(f"need at least one vertex, got n={n}")
    if partition_factor < 1 or threads < 1:
        raise ValueError(
            f"partition_factor and threads must be >= 1, got "
            f"{partition_factor} and {threads}"
        )
    total_blocks = -(-n // BLOCK_BITS)
    requested = partition_factor * threads
    n_parts = min(requested, total_blocks)
    if n_parts < requested:
        warnings.warn(
            f"partition count clamped from {requested} to {n_parts} "
            f"({total_blocks} blocks of {BLOCK_BITS} vertices available)",
            stacklevel=2,
        )
    counts = _descending_block_counts(total_blocks, n_parts)
    block_ends = np.cumsum(counts)
    ends = np.minimum(block_ends * BLOCK_BITS, n)
    starts = np.empty_like(ends)
    starts[0] = 0
    starts[1:] = ends[:-1]
    return PartitionSet(
        n=n,
        starts=starts,
        ends=ends,
        live_lo=starts.copy(),
        live_hi=ends.copy(),
        cursor=np.zeros(1, dtype=np.int64),
    )


@njit(nogil=True, cache=True)
def shrink_bounds(vis_words, ext_words, lo, hi):
    """Tighten [lo, hi) past fully-visited 512-bit blocks.

    A block counts as finished when every word of ``vis | ext`` is all-ones.
    Only whole aligned blocks are dropped; a partial tail block (bits past
    the bitmap's logical end are zero) can never appear all-ones, so it is
    naturally retained.
    """
    full = np.uint64(0xFFFFFFFFFFFFFFFF)
    while hi - lo >= 512:
        w0 = lo >> 6
        ok = True
        for j in range(8):
            if (vis_words[w0 + j] | ext_words[w0 + j]) != full:
                ok = False
                break
        if not ok:
            break
        lo += 512
    while hi - lo >= 512 and (hi & 511) == 0:
        w0 = (hi >> 6) - 8
        ok = True
        for j in range(8):
            if (vis_words[w0 + j] | ext_words[w0 + j]) != full:
                ok = False
                break
        if not ok:
            break
        hi -= 512
    return lo, hi


def shrink_partition(ps: PartitionSet, index: int, visited: Bitmap) -> tuple[int, int]:
    """Shrink one partition's live bounds against a visited bitmap.

    Updates ``ps.live_lo[index]``/``ps.live_hi[index]`` in place and returns
    the new ``(lo, hi)``.  Bounds never widen.
    """
    if not 0 <= index < ps.n_partitions:
        raise IndexError(f"partition {index} out of range for {ps.n_partitions}")
    if visited.n_bits != ps.n:
        raise ValueError(
            f"bitmap covers {visited.n_bits} bits but partitions cover {ps.n}"
        )
    lo, hi = shrink_bounds(
        visited.words, visited.words,
        int(ps.live_lo[index]), int(ps.live_hi[index]),
    )
    ps.live_lo[index] = lo
    ps.live_hi[index] = hi
    return lo, hi
