"""Graph ingestion and the CSR structure every kernel runs on.

The canonical in-memory form is an undirected simple graph in compressed
sparse row layout: ``row_starts`` (int64, length n+1), ``dst`` (uint32,
length m_directed), ``degrees`` (int32).  Construction symmetrizes the raw
edge list, removes self-loops, deduplicates, and sorts each adjacency list
ascending by neighbor id, so two inputs describing the same simple graph
produce byte-identical arrays.

Edge-list files come in two interchangeable formats:

* text: one ``u v`` pair per line, ``#`` starts a comment
* binary: little-endian uint32 pairs, no header

Binary files carry no vertex count; it is taken from an explicit argument,
from a ``<path>.meta`` sidecar, or inferred as ``max id + 1``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EdgeList",
    "CsrGraph",
    "build_csr",
    "neighbors",
    "bandwidth",
    "load_edge_list",
    "save_edge_list",
    "read_metadata",
    "write_metadata",
]


@dataclass
class EdgeList:
    """Raw directed edge pairs plus the declared vertex count.

    ``edges`` has shape (m, 2), dtype uint32.  Duplicates, self-loops, and
    both orientations may all be present; CSR construction canonicalizes.
    """

    n_declared: int
    edges: np.ndarray

    @property
    def m_raw(self) -> int:
        return int(self.edges.shape[0])


@dataclass
class CsrGraph:
    """Undirected simple graph in CSR form.

    ``dst[row_starts[v] : row_starts[v+1]]`` lists the neighbors of ``v``
    in ascending id order (unless rebuilt by a degree-sorting transform).
    Every undirected edge appears twice, once per direction.
    """

    n: int
    row_starts: np.ndarray
    dst: np.ndarray
    degrees: np.ndarray

    @property
    def m_directed(self) -> int:
        return int(self.dst.shape[0])

    @property
    def m_undirected(self) -> int:
        return self.m_directed // 2

    @property
    def isolated_count(self) -> int:
        return int(np.count_nonzero(self.degrees == 0))

    def neighbors(self, v: int) -> np.ndarray:
        return self.dst[self.row_starts[v] : self.row_starts[v + 1]]


def build_csr(el: EdgeList) -> CsrGraph:
    """Canonicalize an edge list into a :class:`CsrGraph`.

    Symmetrizes, drops self-loops, deduplicates, and sorts each adjacency
    list ascending.  Raises ``ValueError`` naming the first out-of-range
    input edge if any endpoint is >= ``n_declared``.
    """
    n = int(el.n_declared)
    if n < 0:
        raise ValueError(f"vertex count must be non-negative, got {n}")
    e = np.asarray(el.edges)
    if e.size == 0:
        e = e.reshape(0, 2)
    if e.ndim != 2 or e.shape[1] != 2:
        raise ValueError(f"edge array must have shape (m, 2), got {e.shape}")

    u = e[:, 0].astype(np.int64)
    v = e[:, 1].astype(np.int64)
    bad = np.flatnonzero((u < 0) | (u >= n) | (v < 0) | (v >= n))
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"edge {i} = ({int(u[i])}, {int(v[i])}) out of range for n={n}"
        )

    keep = u != v
    u, v = u[keep], v[keep]
    # Encode both orientations as u*n+v keys; unique() dedups and leaves the
    # concatenation sorted by (src, dst), which is exactly CSR order.
    keys = np.unique(np.concatenate([u * n + v, v * n + u]))
    src = keys // n
    dst = (keys % n).astype(np.uint32)
    degrees = np.bincount(src, minlength=n).astype(np.int32)
    row_starts = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, dtype=np.int64, out=row_starts[1:])
    return CsrGraph(n=n, row_starts=row_starts, dst=dst, degrees=degrees)


def neighbors(g: CsrGraph, v: int) -> np.ndarray:
    """Adjacency slice of ``v`` (zero-copy view into ``g.dst``)."""
    return g.neighbors(v)


def bandwidth(g: CsrGraph) -> int:
    """Largest ``|u - v|`` over all adjacency entries (0 for edgeless graphs)."""
    if g.m_directed == 0:
        return 0
    best = 0
    step = 1 << 20
    for lo in range(0, g.n, step):
        hi = min(lo + step, g.n)
        counts = np.diff(g.row_starts[lo : hi + 1])
        seg = g.dst[g.row_starts[lo] : g.row_starts[hi]].astype(np.int64)
        if seg.size == 0:
            continue
        src = np.repeat(np.arange(lo, hi, dtype=np.int64), counts)
        best = max(best, int(np.max(np.abs(src - seg))))
    return best


# ---------------------------------------------------------------------------
# metadata sidecars


def write_metadata(path: str | os.PathLike, mapping: dict) -> None:
    """Write a ``key = value`` sidecar (one pair per line, '#' comments)."""
    with open(path, "w") as f:
        for k, v in mapping.items():
            f.write(f"{k} = {v}\n")


def read_metadata(path: str | os.PathLike) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            t = line.split("#", 1)[0].strip()
            if not t:
                continue
            if "=" not in t:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {t!r}")
            k, _, v = t.partition("=")
            out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# edge-list files


def _detect_format(path: str, fmt: str) -> str:
    if fmt != "auto":
        if fmt not in ("text", "binary"):
            raise ValueError(f"unknown edge-list format {fmt!r}")
        return fmt
    ext = os.path.splitext(str(path))[1].lower()
    return "binary" if ext in (".bin", ".dat") else "text"


def _parse_text_strict(path: str) -> np.ndarray:
    """Line-by-line parse used to produce positioned error messages."""
    rows: list[tuple[int, int]] = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            t = line.split("#", 1)[0].strip()
            if not t:
                continue
            parts = t.split()
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected two vertex ids, got {t!r}"
                )
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: non-integer vertex id in {t!r}"
                ) from None
            if a < 0 or b < 0:
                raise ValueError(f"{path}:{lineno}: negative vertex id in {t!r}")
            if a >= 1 << 32 or b >= 1 << 32:
                raise ValueError(f"{path}:{lineno}: vertex id exceeds uint32 in {t!r}")
            rows.append((a, b))
    if not rows:
        return np.zeros((0, 2), dtype=np.uint32)
    return np.asarray(rows, dtype=np.uint32)


def _load_text(path: str) -> np.ndarray:
    try:
        arr = np.loadtxt(path, dtype=np.int64, comments="#", ndmin=2)
    except ValueError:
        return _parse_text_strict(path)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.uint32)
    if arr.shape[1] != 2 or arr.min() < 0 or arr.max() >= 1 << 32:
        return _parse_text_strict(path)  # reparse to point at the bad line
    return arr.astype(np.uint32)


def _load_binary(path: str) -> np.ndarray:
    raw = np.fromfile(path, dtype="<u4")
    if raw.size % 2:
        raise ValueError(
            f"{path}: truncated binary edge list ({raw.size} uint32 words, expected an even count)"
        )
    return raw.reshape(-1, 2).astype(np.uint32)


def load_edge_list(
    path: str | os.PathLike, fmt: str = "auto", n: int | None = None
) -> EdgeList:
    """Read an edge-list file into an :class:`EdgeList`.

    Vertex count precedence: explicit ``n`` argument, then an ``n`` key in a
    ``<path>.meta`` sidecar, then ``max id + 1`` over the file contents.
    """
    path = str(path)
    kind = _detect_format(path, fmt)
    edges = _load_text(path) if kind == "text" else _load_binary(path)
    if n is None:
        meta_path = path + ".meta"
        if os.path.exists(meta_path):
            meta = read_metadata(meta_path)
            if "n" in meta:
                n = int(meta["n"])
    if n is None:
        n = int(edges.max()) + 1 if edges.size else 0
    if edges.size and int(edges.max()) >= n:
        raise ValueError(
            f"{path}: contains vertex id {int(edges.max())} but n={n} was declared"
        )
    return EdgeList(n_declared=int(n), edges=edges)


def save_edge_list(
    el: EdgeList,
    path: str | os.PathLike,
    fmt: str = "auto",
    meta: dict | None = None,
) -> None:
    """Write an edge list; optionally attach a ``<path>.meta`` sidecar.

    The sidecar always records ``n`` and ``m`` in addition to caller keys,
    so a later load recovers the declared vertex count.
    """
    path = str(path)
    kind = _detect_format(path, fmt)
    edges = np.ascontiguousarray(el.edges, dtype=np.uint32)
    if kind == "binary":
        edges.astype("<u4").tofile(path)
    else:
        with open(path, "w") as f:
            for a, b in edges:
                f.write(f"{a} {b}\n")
    if meta is not None:
        full = {"n": el.n_declared, "m": el.m_raw}
        full.update(meta)
        write_metadata(path + ".meta", full)
