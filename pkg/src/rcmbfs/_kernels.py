"""Compiled traversal kernels.

Every kernel here is nogil so Python worker threads run them concurrently.
Synchronization rules, relied on throughout:

* top-down kernels claim vertices with an atomic fetch-or on the visited
  word; the claim winner alone writes parent and its local queue
* bottom-up kernels never use atomics on visited/next-frontier: a claimed
  partition (or static range) is block-aligned, so its bitmap words belong
  to exactly one thread for the duration of the step
* the partition cursor is a shared int64 bumped with atomic fetch-add
* level boundaries are barriers (the engine joins threads between steps)
"""

import numpy as np
from numba import njit

from ._atomics import atomic_fetch_add_i64, atomic_fetch_or_u64
from .partition import shrink_bounds

_U0 = np.uint64(0)
_U1 = np.uint64(1)
_U63 = np.uint64(63)


@njit(cache=True)
def seq_bfs_kernel(row_starts, dst, source, parent, queue, bounds):
    """Plain queue BFS; parent = first-discovering neighbor in scan order.

    Fills ``queue`` with vertices in discovery order and ``bounds`` with
    level boundaries; returns the number of levels (bounds[0..n_levels]
    are valid afterwards).
    """
    parent[source] = np.int32(source)
    queue[0] = np.uint32(source)
    bounds[0] = 0
    n_levels = 0
    level_start = 0
    level_end = 1
    tail = 1
    while level_start < level_end:
        n_levels += 1
        bounds[n_levels] = level_end
        for i in range(level_start, level_end):
            v = queue[i]
            for j in range(row_starts[v], row_starts[v + 1]):
                w = dst[j]
                if parent[w] < 0:
                    parent[w] = np.int32(v)
                    queue[tail] = w
                    tail += 1
        level_start = level_end
        level_end = tail
    return n_levels


@njit(nogil=True, cache=True)
def td_plain(
    row_starts, dst, frontier, f_lo, f_hi, parent, visited_words,
    next_q, next_cursor,
):
    """Scan frontier[f_lo:f_hi], claiming unvisited neighbors atomically.

    Claim winners append to the shared next_q at slots taken from the
    shared next_cursor (atomic fetch-add), so concurrent callers never
    collide; with one caller the append order is plain scan order.
    Returns (claimed count, degree sum of claimed, edges examined).
    """
    cnt = 0
    degsum = np.int64(0)
    scanned = np.int64(0)
    for i in range(f_lo, f_hi):
        v = frontier[i]
        for j in range(row_starts[v], row_starts[v + 1]):
            w = dst[j]
            scanned += 1
            wi = np.int64(w) >> 6
            m = _U1 << (np.uint64(w) & _U63)
            if (visited_words[wi] & m) == _U0:
                old = atomic_fetch_or_u64(visited_words, wi, m)
                if (old & m) == _U0:
                    parent[w] = np.int32(v)
                    pos = atomic_fetch_add_i64(next_cursor, 0, 1)
                    next_q[pos] = w
                    cnt += 1
                    degsum += row_starts[w + 1] - row_starts[w]
    return cnt, degsum, scanned


@njit(nogil=True, cache=True)
def td_striped(
    row_starts, dst, frontier, n_f, parent, visited_words,
    next_q, next_cursor, k, t,
):
    """Striped-assignment top-down scan for thread k of t.

    For frontier vertex j with degree d, thread k owns the contiguous
    stripe of floor(d/t) neighbors starting at row_starts[v] + k*floor(d/t);
    the remainder stripe belongs to thread (j mod t).  Every thread walks
    the whole frontier but touches only its assigned edges, so per-thread
    edge counts are balanced by construction.  Discoveries append to the
    shared next_q via the atomic next_cursor, as in td_plain.
    """
    cnt = 0
    degsum = np.int64(0)
    assigned = np.int64(0)
    for idx in range(n_f):
        v = frontier[idx]
        base = row_starts[v]
        d = row_starts[v + 1] - base
        workload = d // t
        lo = base + k * workload
        hi = lo + workload
        for j in range(lo, hi):
            w = dst[j]
            assigned += 1
            wi = np.int64(w) >> 6
            m = _U1 << (np.uint64(w) & _U63)
            if (visited_words[wi] & m) == _U0:
                old = atomic_fetch_or_u64(visited_words, wi, m)
                if (old & m) == _U0:
                    parent[w] = np.int32(v)
                    pos = atomic_fetch_add_i64(next_cursor, 0, 1)
                    next_q[pos] = w
                    cnt += 1
                    degsum += row_starts[w + 1] - row_starts[w]
        if idx % t == k:
            for j in range(base + t * workload, base + d):
                w = dst[j]
                assigned += 1
                wi = np.int64(w) >> 6
                m = _U1 << (np.uint64(w) & _U63)
                if (visited_words[wi] & m) == _U0:
                    old = atomic_fetch_or_u64(visited_words, wi, m)
                    if (old & m) == _U0:
                        parent[w] = np.int32(v)
                        pos = atomic_fetch_add_i64(next_cursor, 0, 1)
                        next_q[pos] = w
                        cnt += 1
                        degsum += row_starts[w + 1] - row_starts[w]
    return cnt, degsum, assigned


@njit(nogil=True, cache=True)
def bu_range(row_starts, dst, fcur_words, fnext_words, visited_words, parent, lo, hi):
    """Bottom-up scan of vertex range [lo, hi), immediate visited updates.

    The range must be block-aligned relative to other concurrent callers
    (word ownership).  Neighbors are checked in adjacency order with early
    exit on the first frontier member.  Returns (found, degree sum of
    found, neighbor checks).
    """
    cnt = 0
    degsum = np.int64(0)
    checks = np.int64(0)
    for v in range(lo, hi):
        wv = v >> 6
        mv = _U1 << (np.uint64(v) & _U63)
        if (visited_words[wv] & mv) != _U0:
            continue
        a = row_starts[v]
        b = row_starts[v + 1]
        for j in range(a, b):
            u = dst[j]
            checks += 1
            if (fcur_words[np.int64(u) >> 6] & (_U1 << (np.uint64(u) & _U63))) != _U0:
                parent[v] = np.int32(u)
                visited_words[wv] |= mv
                fnext_words[wv] |= mv
                cnt += 1
                degsum += b - a
                break
    return cnt, degsum, checks


@njit(nogil=True, cache=True)
def bu_steal(
    row_starts, dst, fcur_words, fnext_words, visited_words, parent,
    live_lo, live_hi, cursor,
):
    """Work-stealing bottom-up step: claim partitions off a shared cursor.

    Identical per-vertex semantics to bu_range.  Live bounds are read but
    not shrunk here.  Returns (found, degree sum, checks, partitions
    claimed by this thread).
    """
    cnt = 0
    degsum = np.int64(0)
    checks = np.int64(0)
    claimed = 0
    n_parts = live_lo.shape[0]
    while True:
        p = atomic_fetch_add_i64(cursor, 0, 1)
        if p >= n_parts:
            break
        claimed += 1
        for v in range(live_lo[p], live_hi[p]):
            wv = v >> 6
            mv = _U1 << (np.uint64(v) & _U63)
            if (visited_words[wv] & mv) != _U0:
                continue
            a = row_starts[v]
            b = row_starts[v + 1]
            for j in range(a, b):
                u = dst[j]
                checks += 1
                if (fcur_words[np.int64(u) >> 6] & (_U1 << (np.uint64(u) & _U63))) != _U0:
                    parent[v] = np.int32(u)
                    visited_words[wv] |= mv
                    fnext_words[wv] |= mv
                    cnt += 1
                    degsum += b - a
                    break
    return cnt, degsum, checks, claimed


@njit(nogil=True, cache=True)
def bu_reduced(
    row_starts, dst_desc, fcur_words, fnext_words, visited_words, parent,
    live_lo, live_hi, cursor,
):
    """Two-pass degree-aware bottom-up step with shrinking, deferred visited.

    Adjacency must be sorted descending by neighbor degree.  Per claimed
    partition: shrink, pass 1 tests only each vertex's first (highest
    degree) neighbor, shrink, pass 2 tests the rest with early break,
    shrink, then the partition's new frontier bits are OR-ed into visited
    word by word.  Discoveries go to fnext only until that final publish,
    so skip tests use visited|fnext.  Safe because a partition's words
    belong to one thread for the whole step.

    Returns (found, degree sum, checks, pass-1 finds, partitions claimed).
    """
    cnt = 0
    degsum = np.int64(0)
    checks = np.int64(0)
    pass1_hits = 0
    claimed = 0
    n_parts = live_lo.shape[0]
    while True:
        p = atomic_fetch_add_i64(cursor, 0, 1)
        if p >= n_parts:
            break
        claimed += 1
        lo, hi = shrink_bounds(
            visited_words, fnext_words, live_lo[p], live_hi[p]
        )
        lo1 = lo
        hi1 = hi
        # pass 1: highest-degree neighbor only
        for v in range(lo, hi):
            wv = v >> 6
            mv = _U1 << (np.uint64(v) & _U63)
            if ((visited_words[wv] | fnext_words[wv]) & mv) != _U0:
                continue
            a = row_starts[v]
            if row_starts[v + 1] == a:
                continue
            u = dst_desc[a]
            checks += 1
            if (fcur_words[np.int64(u) >> 6] & (_U1 << (np.uint64(u) & _U63))) != _U0:
                parent[v] = np.int32(u)
                fnext_words[wv] |= mv
                cnt += 1
                pass1_hits += 1
                degsum += row_starts[v + 1] - a
        lo, hi = shrink_bounds(visited_words, fnext_words, lo, hi)
        # pass 2: remaining neighbors, descending degree, early break
        for v in range(lo, hi):
            wv = v >> 6
            mv = _U1 << (np.uint64(v) & _U63)
            if ((visited_words[wv] | fnext_words[wv]) & mv) != _U0:
                continue
            a = row_starts[v]
            b = row_starts[v + 1]
            for j in range(a + 1, b):
                u = dst_desc[j]
                checks += 1
                if (fcur_words[np.int64(u) >> 6] & (_U1 << (np.uint64(u) & _U63))) != _U0:
                    parent[v] = np.int32(u)
                    fnext_words[wv] |= mv
                    cnt += 1
                    degsum += b - a
                    break
        lo, hi = shrink_bounds(visited_words, fnext_words, lo, hi)
        live_lo[p] = lo
        live_hi[p] = hi
        # publish: all new bits of this partition live in words of [lo1, hi1)
        w0 = lo1 >> 6
        w1 = (hi1 + 63) >> 6
        for w in range(w0, w1):
            visited_words[w] |= fnext_words[w]
    return cnt, degsum, checks, pass1_hits, claimed


@njit(cache=True)
def queue_to_bits(queue, n_f, words):
    """Scatter queue[0:n_f] into a zeroed word array."""
    for i in range(n_f):
        v = queue[i]
        words[np.int64(v) >> 6] |= _U1 << (np.uint64(v) & _U63)
