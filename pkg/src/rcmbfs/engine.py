"""Hybrid direction-optimizing BFS engine.

Five modes share one orchestration loop:

* ``sequential``: single compiled queue BFS, the reference oracle
* ``level_sync``: top-down every level, frontier chunked across threads
* ``hybrid``: per-level top-down/bottom-up choice, plain kernels (static
  block-aligned vertex ranges in bottom-up)
* ``hybrid_balanced``: striped-assignment top-down plus work-stealing
  partitioned bottom-up
* ``hybrid_reduced``: striped top-down plus the two-pass degree-aware
  bottom-up with partition shrinking (needs the descending-degree
  adjacency variant)

Direction switching follows the classic frontier-edge heuristic: go
bottom-up when m_f > m_u / alpha, return top-down when n_f < n / beta.
The first level is always top-down.

Isolated vertices are pre-marked visited at the start of every run.  This
is engine-internal state only (their predecessor stays -1): bottom-up
kernels then never scan them, and partition shrinking can drop the isolated
tail of a reordered graph outright.
"""

from __future__ import annotations

import csv
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bitmap import Bitmap
from .graph import CsrGraph
from .partition import PartitionSet, get_partitions

__all__ = [
    "TOP_DOWN",
    "BOTTOM_UP",
    "MODES",
    "BfsParams",
    "Frontier",
    "StepStats",
    "LevelRecord",
    "BfsResult",
    "PolicyCounters",
    "update_traversal_policy",
    "default_partition_factor",
    "top_down_step",
    "top_down_step_balanced",
    "bottom_up_step",
    "bottom_up_step_balanced",
    "bottom_up_step_reduced",
    "bfs_sequential",
    "bfs_run",
    "BfsEngine",
    "write_level_trace",
]

TOP_DOWN = "top_down"
BOTTOM_UP = "bottom_up"
MODES = ("sequential", "level_sync", "hybrid", "hybrid_balanced", "hybrid_reduced")
_PARTITIONED_MODES = ("hybrid_balanced", "hybrid_reduced")


def default_partition_factor(n: int) -> int:
    """Partition-factor default by graph size: 10 below 2^26 vertices, else 20."""
    return 10 if n < (1 << 26) else 20


@dataclass
class BfsParams:
    """Traversal configuration.

    ``alpha`` controls the top-down to bottom-up switch, ``beta`` the way
    back; the defaults are the tuned values for power-law graphs.
    ``partition_factor`` sets the work-stealing partition count
    (partition_factor * threads).
    """

    alpha: int = 64
    beta: int = 8
    partition_factor: int = 20
    threads: int = 1
    mode: str = "hybrid"

    def __post_init__(self):
        if not 1 <= self.alpha <= 128:
            raise ValueError(f"alpha must be in [1, 128], got {self.alpha}")
        if not 1 <= self.beta <= 32:
            raise ValueError(f"beta must be in [1, 32], got {self.beta}")
        if self.partition_factor < 1:
            raise ValueError(
                f"partition_factor must be >= 1, got {self.partition_factor}"
            )
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class Frontier:
    """One BFS level's vertex set, in queue and/or bitmap form.

    When both forms are present they denote the same set.  ``active`` names
    the form the producing kernel emitted.
    """

    n: int
    queue: np.ndarray | None = None
    bits: Bitmap | None = None
    active: str = "queue"

    @classmethod
    def from_queue(cls, n: int, queue: np.ndarray) -> "Frontier":
        return cls(n=n, queue=np.ascontiguousarray(queue, dtype=np.uint32),
                   active="queue")

    @classmethod
    def from_bitmap(cls, bits: Bitmap) -> "Frontier":
        return cls(n=bits.n_bits, bits=bits, active="bitmap")

    @property
    def count(self) -> int:
        if self.queue is not None:
            return int(self.queue.size)
        return self.bits.count()

    def indices(self) -> np.ndarray:
        """Member vertices (queue order if queued, else ascending)."""
        if self.queue is not None:
            return self.queue
        return self.bits.to_indices()

    def to_queue_form(self) -> "Frontier":
        if self.queue is not None:
            return self
        return Frontier(n=self.n, queue=self.bits.to_indices(), bits=self.bits,
                        active="queue")

    def to_bitmap_form(self) -> "Frontier":
        if self.bits is not None:
            return self
        bits = Bitmap(self.n)
        _kernels.queue_to_bits(self.queue, self.queue.size, bits.words)
        return Frontier(n=self.n, queue=self.queue, bits=bits, active="bitmap")


@dataclass
class StepStats:
    """Counters one step kernel reports back to the orchestrator."""

    n_next: int
    deg_next: int
    scanned_edges: int
    per_thread_edges: np.ndarray
    pass1_hits: int | None = None
    claimed: int | None = None


@dataclass
class LevelRecord:
    """Per-level trace entry (one per processed frontier)."""

    level: int
    direction: str
    n_f: int
    m_f: int
    m_u: int
    scanned_edges: int
    wall_time: float
    per_thread_edges: np.ndarray | None = None
    pass1_hits: int | None = None
    live_vertices: int | None = None
    claimed: int | None = None


@dataclass
class BfsResult:
    """Predecessor tree plus per-level instrumentation of one traversal."""

    source: int
    n: int
    predecessor: np.ndarray
    levels: list[LevelRecord]
    elapsed_time: float
    traversed_edges: int
    mode: str

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def n_reached(self) -> int:
        return int(np.count_nonzero(self.predecessor >= 0))


@dataclass
class PolicyCounters:
    """Inputs to the direction heuristic after a finished level."""

    direction: str
    m_f: int
    m_u: int
    n_f: int
    n: int


def update_traversal_policy(counters: PolicyCounters, params: BfsParams) -> str:
    """Choose the next step's direction from frontier/unvisited edge counts.

    Top-down switches to bottom-up when the frontier's incident edges
    exceed 1/alpha of the edges incident to unvisited vertices; bottom-up
    returns to top-down when the frontier shrinks below n/beta vertices.
    """
    if counters.direction == TOP_DOWN:
        if counters.m_f > counters.m_u / params.alpha:
            return BOTTOM_UP
        return TOP_DOWN
    if counters.n_f < counters.n / params.beta:
        return TOP_DOWN
    return BOTTOM_UP


def _fanout(fn, threads: int, pool: ThreadPoolExecutor | None):
    """Run fn(k) for k in [0, threads); collect results in thread order."""
    if threads == 1:
        return [fn(0)]
    if pool is not None:
        return [f.result() for f in [pool.submit(fn, k) for k in range(threads)]]
    out = [None] * threads
    workers = []
    for k in range(threads):
        th = threading.Thread(target=lambda i=k: out.__setitem__(i, fn(i)))
        workers.append(th)
        th.start()
    for th in workers:
        th.join()
    return out


def _chunk_bounds(total: int, threads: int) -> list[tuple[int, int]]:
    return [(total * k // threads, total * (k + 1) // threads) for k in range(threads)]


def top_down_step(
    g: CsrGraph,
    frontier: Frontier,
    visited: Bitmap,
    parent: np.ndarray,
    threads: int = 1,
    pool: ThreadPoolExecutor | None = None,
) -> tuple[Frontier, StepStats]:
    """Claim all unvisited neighbors of the frontier (chunked scan).

    Precondition: frontier vertices are already marked visited.  Returns
    the next frontier in queue form; each discovered vertex got exactly one
    parent (the claim winner's frontier vertex).
    """
    fr = frontier.to_queue_form()
    q = fr.queue
    next_q = np.empty(g.n, dtype=np.uint32)
    cursor = np.zeros(1, dtype=np.int64)
    chunks = _chunk_bounds(q.size, threads)

    def work(k):
        lo, hi = chunks[k]
        return _kernels.td_plain(
            g.row_starts, g.dst, q, lo, hi, parent, visited.words, next_q, cursor
        )

    parts = _fanout(work, threads, pool)
    total = int(cursor[0])
    stats = StepStats(
        n_next=total,
        deg_next=int(sum(p[1] for p in parts)),
        scanned_edges=int(sum(p[2] for p in parts)),
        per_thread_edges=np.array([p[2] for p in parts], dtype=np.int64),
    )
    return Frontier.from_queue(g.n, next_q[:total]), stats


def top_down_step_balanced(
    g: CsrGraph,
    frontier: Frontier,
    visited: Bitmap,
    parent: np.ndarray,
    threads: int = 1,
    pool: ThreadPoolExecutor | None = None,
) -> tuple[Frontier, StepStats]:
    """Top-down step with striped per-vertex edge assignment.

    Each thread takes a floor(d/t)-wide stripe of every frontier vertex's
    adjacency; vertex j's remainder edges go to thread (j mod t).  The
    per-thread assigned-edge counts then differ by at most
    (t-1) * ceil(|F|/t).
    """
    fr = frontier.to_queue_form()
    q = fr.queue
    next_q = np.empty(g.n, dtype=np.uint32)
    cursor = np.zeros(1, dtype=np.int64)

    def work(k):
        return _kernels.td_striped(
            g.row_starts, g.dst, q, q.size, parent, visited.words,
            next_q, cursor, k, threads,
        )

    parts = _fanout(work, threads, pool)
    total = int(cursor[0])
    stats = StepStats(
        n_next=total,
        deg_next=int(sum(p[1] for p in parts)),
        scanned_edges=int(sum(p[2] for p in parts)),
        per_thread_edges=np.array([p[2] for p in parts], dtype=np.int64),
    )
    return Frontier.from_queue(g.n, next_q[:total]), stats


def _bu_collect(g_n: int, fnext: Bitmap, parts, with_pass1=False) -> tuple[Frontier, StepStats]:
    stats = StepStats(
        n_next=int(sum(p[0] for p in parts)),
        deg_next=int(sum(p[1] for p in parts)),
        scanned_edges=int(sum(p[2] for p in parts)),
        per_thread_edges=np.array([p[2] for p in parts], dtype=np.int64),
    )
    if with_pass1:
        stats.pass1_hits = int(sum(p[3] for p in parts))
        stats.claimed = int(sum(p[4] for p in parts))
    elif len(parts[0]) > 3:
        stats.claimed = int(sum(p[3] for p in parts))
    return Frontier.from_bitmap(fnext), stats


def bottom_up_step(
    g: CsrGraph,
    frontier: Frontier,
    visited: Bitmap,
    parent: np.ndarray,
    threads: int = 1,
    pool: ThreadPoolExecutor | None = None,
) -> tuple[Frontier, StepStats]:
    """Plain bottom-up step over static block-aligned per-thread ranges.

    Every unvisited vertex scans its neighbors in adjacency order and
    adopts the first one found in the frontier.  Returns the next frontier
    in bitmap form.
    """
    fr = frontier.to_bitmap_form()
    fnext = Bitmap(g.n)
    n_blocks = fnext.n_blocks
    bounds = [
        min((n_blocks * k // threads) * 512, g.n) for k in range(threads + 1)
    ]
    bounds[threads] = g.n

    def work(k):
        return _kernels.bu_range(
            g.row_starts, g.dst, fr.bits.words, fnext.words, visited.words,
            parent, bounds[k], bounds[k + 1],
        )

    parts = _fanout(work, threads, pool)
    return _bu_collect(g.n, fnext, parts)


def bottom_up_step_balanced(
    g: CsrGraph,
    frontier: Frontier,
    visited: Bitmap,
    parent: np.ndarray,
    ps: PartitionSet,
    threads: int = 1,
    pool: ThreadPoolExecutor | None = None,
) -> tuple[Frontier, StepStats]:
    """Bottom-up step with work stealing over the partition set.

    Threads atomically bump the shared cursor to claim partitions until all
    are taken.  Partition live bounds are honored but not shrunk here.
    """
    fr = frontier.to_bitmap_form()
    fnext = Bitmap(g.n)
    ps.reset_cursor()

    def work(k):
        return _kernels.bu_steal(
            g.row_starts, g.dst, fr.bits.words, fnext.words, visited.words,
            parent, ps.live_lo, ps.live_hi, ps.cursor,
        )

    parts = _fanout(work, threads, pool)
    return _bu_collect(g.n, fnext, parts)


def bottom_up_step_reduced(
    g_desc: CsrGraph,
    frontier: Frontier,
    visited: Bitmap,
    parent: np.ndarray,
    ps: PartitionSet,
    threads: int = 1,
    pool: ThreadPoolExecutor | None = None,
) -> tuple[Frontier, StepStats]:
    """Two-pass degree-aware bottom-up step with partition shrinking.

    ``g_desc`` must carry descending-degree adjacency lists.  Pass 1 tests
    only each unvisited vertex's highest-degree neighbor; pass 2 finishes
    the rest with early break.  Live bounds shrink before each pass and
    persist in ``ps`` for the next step.  Visited updates are deferred to a
    per-partition bulk OR after pass 2.
    """
    fr = frontier.to_bitmap_form()
    fnext = Bitmap(g_desc.n)
    ps.reset_cursor()

    def work(k):
        return _kernels.bu_reduced(
            g_desc.row_starts, g_desc.dst, fr.bits.words, fnext.words,
            visited.words, parent, ps.live_lo, ps.live_hi, ps.cursor,
        )

    parts = _fanout(work, threads, pool)
    return _bu_collect(g_desc.n, fnext, parts, with_pass1=True)


def _isolated_premark_words(g: CsrGraph, template: Bitmap) -> np.ndarray:
    """Word array with one bit per isolated vertex, sized like template."""
    words = np.zeros_like(template.words)
    packed = np.packbits(g.degrees == 0, bitorder="little")
    words.view(np.uint8)[: packed.size] = packed
    return words


def bfs_sequential(g: CsrGraph, source: int) -> BfsResult:
    """Reference single-thread BFS; deterministic parent choice.

    Per-level wall times are not instrumented (the whole traversal is one
    compiled call); ``elapsed_time`` covers the full run.
    """
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range for n={g.n}")
    parent = np.full(g.n, -1, dtype=np.int32)
    queue = np.empty(g.n, dtype=np.uint32)
    bounds = np.empty(g.n + 2, dtype=np.int64)
    t0 = time.perf_counter()
    n_levels = _kernels.seq_bfs_kernel(
        g.row_starts, g.dst, source, parent, queue, bounds
    )
    elapsed = time.perf_counter() - t0
    m_total = g.m_directed
    records = []
    seen_edges = 0
    for lv in range(n_levels):
        lo, hi = int(bounds[lv]), int(bounds[lv + 1])
        m_f = int(g.degrees[queue[lo:hi]].sum(dtype=np.int64))
        m_u = m_total - seen_edges - m_f
        records.append(
            LevelRecord(
                level=lv, direction=TOP_DOWN, n_f=hi - lo, m_f=m_f, m_u=m_u,
                scanned_edges=m_f, wall_time=0.0,
            )
        )
        seen_edges += m_f
    reached = parent >= 0
    traversed = int(g.degrees[reached].sum(dtype=np.int64)) // 2
    return BfsResult(
        source=source, n=g.n, predecessor=parent, levels=records,
        elapsed_time=elapsed, traversed_edges=traversed, mode="sequential",
    )


class BfsEngine:
    """Reusable traversal context: buffers, partitions, worker pool.

    Build once per (graph, params) pair and call :meth:`run` for each
    source; not reentrant (one traversal at a time).  Use as a context
    manager or call :meth:`close` to release the worker pool.
    """

    def __init__(self, g: CsrGraph, params: BfsParams, g_desc: CsrGraph | None = None):
        self.g = g
        self.params = params
        self.g_desc = g_desc
        if params.mode == "hybrid_reduced":
            if g_desc is None:
                raise ValueError(
                    "hybrid_reduced needs the descending-degree adjacency "
                    "variant (pass g_desc, e.g. degree_sort_adjacency(g))"
                )
            if g_desc.n != g.n or g_desc.m_directed != g.m_directed:
                raise ValueError("g_desc does not match g")
        self.ps: PartitionSet | None = None
        if params.mode in _PARTITIONED_MODES and g.n >= 1:
            self.ps = get_partitions(g.n, params.partition_factor, params.threads)
        self.pool: ThreadPoolExecutor | None = None
        if params.threads > 1 and params.mode != "sequential":
            self.pool = ThreadPoolExecutor(max_workers=params.threads)
        self._visited = Bitmap(g.n)
        self._iso_words = _isolated_premark_words(g, self._visited)

    def close(self) -> None:
        if self.pool is not None:
            self.pool.shutdown(wait=True)
            self.pool = None

    def __enter__(self) -> "BfsEngine":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def run(self, source: int) -> BfsResult:
        g = self.g
        p = self.params
        if not 0 <= source < g.n:
            raise ValueError(f"source {source} out of range for n={g.n}")
        if p.mode == "sequential":
            return bfs_sequential(g, source)

        parent = np.full(g.n, -1, dtype=np.int32)
        parent[source] = source
        visited = self._visited
        visited.words[:] = self._iso_words
        visited.set(source)
        if self.ps is not None:
            self.ps.reset()

        t0 = time.perf_counter()
        frontier = Frontier.from_queue(g.n, np.array([source], dtype=np.uint32))
        deg_src = int(g.degrees[source])
        n_f, m_f = 1, deg_src
        m_u = g.m_directed - deg_src
        direction = TOP_DOWN
        records: list[LevelRecord] = []
        level = 0
        hybrid = p.mode != "level_sync"

        while n_f > 0:
            lt0 = time.perf_counter()
            use_dir = direction if hybrid else TOP_DOWN
            if use_dir == TOP_DOWN:
                frontier = frontier.to_queue_form()
                if p.mode in _PARTITIONED_MODES:
                    frontier, stats = top_down_step_balanced(
                        g, frontier, visited, parent, p.threads, self.pool
                    )
                else:
                    frontier, stats = top_down_step(
                        g, frontier, visited, parent, p.threads, self.pool
                    )
            else:
                frontier = frontier.to_bitmap_form()
                if p.mode == "hybrid":
                    frontier, stats = bottom_up_step(
                        g, frontier, visited, parent, p.threads, self.pool
                    )
                elif p.mode == "hybrid_balanced":
                    frontier, stats = bottom_up_step_balanced(
                        g, frontier, visited, parent, self.ps, p.threads, self.pool
                    )
                else:
                    frontier, stats = bottom_up_step_reduced(
                        self.g_desc, frontier, visited, parent, self.ps,
                        p.threads, self.pool,
                    )
            wall = time.perf_counter() - lt0
            records.append(
                LevelRecord(
                    level=level, direction=use_dir, n_f=n_f, m_f=m_f, m_u=m_u,
                    scanned_edges=stats.scanned_edges, wall_time=wall,
                    per_thread_edges=stats.per_thread_edges,
                    pass1_hits=stats.pass1_hits,
                    live_vertices=(
                        self.ps.live_total()
                        if (self.ps is not None and use_dir == BOTTOM_UP)
                        else None
                    ),
                    claimed=stats.claimed,
                )
            )
            m_u -= stats.deg_next
            m_f = stats.deg_next
            n_f = stats.n_next
            if hybrid:
                direction = update_traversal_policy(
                    PolicyCounters(
                        direction=use_dir, m_f=m_f, m_u=m_u, n_f=n_f, n=g.n
                    ),
                    p,
                )
            level += 1
        elapsed = time.perf_counter() - t0
        reached = parent >= 0
        traversed = int(g.degrees[reached].sum(dtype=np.int64)) // 2
        return BfsResult(
            source=source, n=g.n, predecessor=parent, levels=records,
            elapsed_time=elapsed, traversed_edges=traversed, mode=p.mode,
        )


def bfs_run(
    g: CsrGraph,
    source: int,
    params: BfsParams | None = None,
    g_desc: CsrGraph | None = None,
) -> BfsResult:
    """One-shot traversal: build an engine, run, tear down."""
    if params is None:
        params = BfsParams()
    with BfsEngine(g, params, g_desc=g_desc) as eng:
        return eng.run(source)


def write_level_trace(results, path: str | os.PathLike) -> None:
    """Dump per-level records of one or more results as CSV."""
    fields = [
        "round", "source", "mode", "level", "direction", "n_f", "m_f", "m_u",
        "scanned_edges", "wall_time_s", "pass1_hits", "live_vertices",
    ]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(fields)
        for rnd, res in enumerate(results):
            for rec in res.levels:
                w.writerow(
                    [
                        rnd, res.source, res.mode, rec.level, rec.direction,
                        rec.n_f, rec.m_f, rec.m_u, rec.scanned_edges,
                        f"{rec.wall_time:.6f}",
                        "" if rec.pass1_hits is None else rec.pass1_hits,
                        "" if rec.live_vertices is None else rec.live_vertices,
                    ]
                )
