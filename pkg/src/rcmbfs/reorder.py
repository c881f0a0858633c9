"""Reverse Cuthill-McKee relabeling, partial variant, and adjacency resorts.

The RCM pass walks each connected component of the non-isolated vertex set
in BFS order, seeded per component at the minimal-degree vertex and visiting
neighbors in ascending degree, then reverses the resulting order.  All ties
break by ascending original id, which makes the permutation a pure function
of the graph and lets regression tests compare byte-for-byte.

Partial RCM runs the identical traversal but stops assigning new labels
after ``ceil(p * |V+|)`` vertices; the untouched non-isolated vertices keep
their original relative order behind the reversed prefix.  Isolated
vertices always go last, ascending.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .graph import CsrGraph, read_metadata, write_metadata

__all__ = [
    "Permutation",
    "RcmRunStats",
    "rcm",
    "partial_rcm",
    "apply_permutation",
    "degree_sort_adjacency",
    "save_permutation",
    "load_permutation",
    "graph_hash",
]

PERM_FORMAT_VERSION = 1


@dataclass
class Permutation:
    """A vertex relabeling: ``perm[new_id] = original_id`` and its inverse."""

    perm: np.ndarray
    inv: np.ndarray

    @classmethod
    def from_new_to_orig(cls, perm: np.ndarray, check: bool = True) -> "Permutation":
        perm = np.ascontiguousarray(perm, dtype=np.uint32)
        n = perm.size
        if check and n:
            counts = np.bincount(perm, minlength=n)
            if counts.size != n or not np.all(counts == 1):
                raise ValueError("permutation array is not a bijection on [0, n)")
        inv = np.empty(n, dtype=np.uint32)
        inv[perm] = np.arange(n, dtype=np.uint32)
        return cls(perm=perm, inv=inv)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        ids = np.arange(n, dtype=np.uint32)
        return cls(perm=ids, inv=ids.copy())

    @property
    def size(self) -> int:
        return int(self.perm.size)


@dataclass
class RcmRunStats:
    """Component layout discovered during the relabeling traversal.

    ``component_ranges`` lists ``(start_new_id, end_new_id)`` per discovered
    component, ascending by start, jointly covering ``[0, n_assigned)``.
    For a complete run ``n_assigned == n_non_isolated`` and the ranges cover
    all of ``[0, |V+|)``; a truncated partial run only describes the prefix
    it actually explored (its last range may be a component fragment).
    """

    n: int
    n_non_isolated: int
    n_assigned: int
    component_ranges: list[tuple[int, int]] = field(default_factory=list)

    @property
    def n_components(self) -> int:
        return len(self.component_ranges)

    @property
    def component_sizes(self) -> np.ndarray:
        return np.array([e - s for s, e in self.component_ranges], dtype=np.int64)

    @property
    def largest_component_fraction(self) -> float:
        if self.n_non_isolated == 0 or not self.component_ranges:
            return 0.0
        return float(self.component_sizes.max()) / self.n_non_isolated

    @property
    def complete(self) -> bool:
        return self.n_assigned == self.n_non_isolated


@njit(cache=True)
def _rcm_walk(row_starts, dst_sorted, vplus, n, k):
    """BFS-order labeling of up to ``k`` non-isolated vertices.

    ``vplus`` must be sorted by (degree, id) ascending; ``dst_sorted`` must
    hold adjacency lists sorted the same way.  Returns the labeled prefix
    (original ids in discovery order) and the discovery positions where new
    components started.
    """
    order = np.empty(k, dtype=np.uint32)
    comp_starts = np.empty(k + 1, dtype=np.int64)
    placed = np.zeros(n, dtype=np.uint8)
    n_comp = 0
    slow = 0
    fast = 0
    seed_scan = 0
    while slow < k:
        if slow == fast:
            # current component exhausted: seed the next one at the
            # unplaced vertex of minimal (degree, id)
            while placed[vplus[seed_scan]]:
                seed_scan += 1
            s = vplus[seed_scan]
            comp_starts[n_comp] = fast
            n_comp += 1
            placed[s] = 1
            order[fast] = s
            fast += 1
            if fast == k:
                # the seed itself was the k-th label; stop before its
                # neighbors can spill past the requested prefix
                return order, comp_starts[:n_comp], placed
        v = order[slow]
        slow += 1
        for j in range(row_starts[v], row_starts[v + 1]):
            w = dst_sorted[j]
            if not placed[w]:
                placed[w] = 1
                order[fast] = w
                fast += 1
                if fast == k:
                    return order, comp_starts[:n_comp], placed
    return order, comp_starts[:n_comp], placed


@njit(cache=True)
def _degree_sort_rows(row_starts, dst, degrees, out_dst, n, descending):
    """Rewrite each adjacency list ordered by (degree, id asc)."""
    maxkey = np.int64(1) << np.int64(31)
    for v in range(row_starts.shape[0] - 1):
        a = row_starts[v]
        b = row_starts[v + 1]
        keys = np.empty(b - a, dtype=np.int64)
        for j in range(b - a):
            w = dst[a + j]
            d = np.int64(degrees[w])
            dd = (maxkey - d) if descending else d
            keys[j] = dd * n + np.int64(w)
        keys.sort()
        for j in range(b - a):
            out_dst[a + j] = np.uint32(keys[j] % n)


@njit(cache=True)
def _permute_rows(row_starts, dst, new_to_orig, orig_to_new, new_row_starts, out_dst):
    for nv in range(new_to_orig.shape[0]):
        ov = new_to_orig[nv]
        o0 = row_starts[ov]
        cnt = row_starts[ov + 1] - o0
        b = new_row_starts[nv]
        for j in range(cnt):
            out_dst[b + j] = orig_to_new[dst[o0 + j]]
        out_dst[b : b + cnt].sort()


def degree_sort_adjacency(g: CsrGraph, order: str = "descending") -> CsrGraph:
    """Same topology, each adjacency list resorted by neighbor degree.

    ``order`` is ``"ascending"`` or ``"descending"``; ties break by
    ascending neighbor id either way.
    """
    if order not in ("ascending", "descending"):
        raise ValueError(f"order must be 'ascending' or 'descending', got {order!r}")
    out_dst = np.empty_like(g.dst)
    if g.n:
        _degree_sort_rows(
            g.row_starts, g.dst, g.degrees, out_dst,
            np.int64(max(g.n, 1)), order == "descending",
        )
    return CsrGraph(n=g.n, row_starts=g.row_starts, dst=out_dst, degrees=g.degrees)


def _rcm_impl(g: CsrGraph, k: int | None) -> tuple[Permutation, RcmRunStats]:
    n = g.n
    deg = g.degrees
    # (degree, id) ascending over the non-isolated set
    by_deg = np.lexsort((np.arange(n), deg))
    vplus = by_deg[deg[by_deg] > 0].astype(np.uint32)
    n_plus = int(vplus.size)
    if k is None:
        k = n_plus
    stats = RcmRunStats(n=n, n_non_isolated=n_plus, n_assigned=k)
    isolated = np.flatnonzero(deg == 0).astype(np.uint32)

    if k == 0:
        perm_arr = np.concatenate(
            [np.flatnonzero(deg > 0).astype(np.uint32), isolated]
        ) if n else np.zeros(0, dtype=np.uint32)
        return Permutation.from_new_to_orig(perm_arr, check=False), stats

    asc = degree_sort_adjacency(g, "ascending")
    order, comp_starts, placed = _rcm_walk(g.row_starts, asc.dst, vplus, n, k)

    remaining = np.flatnonzero((deg > 0) & (placed == 0)).astype(np.uint32)
    perm_arr = np.concatenate([order[::-1], remaining, isolated])
    # discovery range [a, b) lands at new ids [k - b, k - a) after reversal
    bounds = np.append(comp_starts, k)
    ranges = [
        (int(k - bounds[i + 1]), int(k - bounds[i]))
        for i in range(len(comp_starts) - 1, -1, -1)
    ]
    stats.component_ranges = ranges
    return Permutation.from_new_to_orig(perm_arr, check=False), stats


def rcm(g: CsrGraph) -> tuple[Permutation, RcmRunStats]:
    """Full reverse Cuthill-McKee relabeling.

    Non-isolated vertices occupy new ids ``[0, |V+|)``; isolated vertices
    are appended ascending.  Deterministic: a pure function of the graph.
    """
    return _rcm_impl(g, None)


def partial_rcm(g: CsrGraph, p: float) -> tuple[Permutation, RcmRunStats]:
    """RCM truncated after labeling ``ceil(p * |V+|)`` vertices.

    ``p`` must lie in (0, 1]; ``p = 1`` reproduces :func:`rcm` exactly
    (identical code path).  Unlabeled non-isolated vertices follow the
    reversed prefix in original id order.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    deg_pos = int(np.count_nonzero(g.degrees > 0))
    k = min(math.ceil(p * deg_pos), deg_pos)
    return _rcm_impl(g, k)


def apply_permutation(g: CsrGraph, perm: Permutation) -> CsrGraph:
    """Relabel ``g``: new vertex ``i`` is old vertex ``perm.perm[i]``.

    Adjacency lists come out sorted ascending by new id.  Raises
    ``ValueError`` if the permutation size differs from ``g.n``.
    """
    if perm.size != g.n:
        raise ValueError(f"permutation size {perm.size} != graph size {g.n}")
    new_degrees = g.degrees[perm.perm]
    new_row_starts = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(new_degrees, dtype=np.int64, out=new_row_starts[1:])
    out_dst = np.empty_like(g.dst)
    if g.n:
        _permute_rows(g.row_starts, g.dst, perm.perm, perm.inv, new_row_starts, out_dst)
    return CsrGraph(
        n=g.n, row_starts=new_row_starts, dst=out_dst,
        degrees=new_degrees.astype(np.int32),
    )


def graph_hash(g: CsrGraph) -> str:
    """sha256 over the canonical CSR arrays; identifies a graph exactly."""
    h = hashlib.sha256()
    h.update(np.int64(g.n).tobytes())
    h.update(np.ascontiguousarray(g.row_starts).tobytes())
    h.update(np.ascontiguousarray(g.dst).tobytes())
    return h.hexdigest()


def save_permutation(
    perm: Permutation,
    path: str | os.PathLike,
    graph_digest: str = "",
    p: float = 1.0,
) -> None:
    """Write ``perm.perm`` as little-endian uint32 plus a ``.meta`` sidecar."""
    path = str(path)
    perm.perm.astype("<u4").tofile(path)
    write_metadata(
        path + ".meta",
        {
            "format_version": PERM_FORMAT_VERSION,
            "n": perm.size,
            "p": f"{p:g}",
            "graph_sha256": graph_digest,
            "algorithm": "rcm" if p == 1.0 else "partial-rcm",
        },
    )


def load_permutation(path: str | os.PathLike) -> tuple[Permutation, dict]:
    path = str(path)
    arr = np.fromfile(path, dtype="<u4")
    meta: dict = {}
    if os.path.exists(path + ".meta"):
        meta = read_metadata(path + ".meta")
        if "n" in meta and int(meta["n"]) != arr.size:
            raise ValueError(
                f"{path}: sidecar declares n={meta['n']} but file holds {arr.size} entries"
            )
    return Permutation.from_new_to_orig(arr), meta
