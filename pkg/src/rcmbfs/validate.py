"""Independent verification that a predecessor array is a correct BFS tree.

Five rules, each reported separately with its first counterexample:

1. the source is its own predecessor
2. every tree edge (v, parent(v)) exists in the graph
3. parent chains are finite (no cycles) and level(v) = level(parent(v)) + 1
4. no graph edge spans more than one level among reached vertices
5. a vertex is reached exactly when it shares the source's connected
   component

Component membership comes from a union-find over the raw edge list when
one is supplied, so a CSR construction bug cannot hide a traversal bug.
None of this code touches engine internals: the checks run on the
predecessor array and the graph alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .graph import CsrGraph, EdgeList

__all__ = ["CheckResult", "ValidationReport", "Validator", "validate"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    """Outcome of all five rules plus the levels derived from the tree."""

    passed: bool
    checks: list[CheckResult] = field(default_factory=list)
    derived_levels: np.ndarray | None = None

    def as_text(self) -> str:
        lines = [f"validation: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            status = "ok" if c.passed else "FAIL"
            suffix = f" ({c.detail})" if c.detail and not c.passed else ""
            lines.append(f"  [{status}] {c.name}{suffix}")
        return "\n".join(lines)

    def as_key_values(self) -> str:
        lines = [f"passed = {str(self.passed).lower()}"]
        for c in self.checks:
            key = c.name.replace(" ", "_")
            lines.append(f"check.{key} = {str(c.passed).lower()}")
            if c.detail and not c.passed:
                lines.append(f"check.{key}.detail = {c.detail}")
        return "\n".join(lines)


@njit(cache=True)
def _uf_components(n, us, vs):
    """Union-find with path halving over an edge array; returns root labels."""
    root = np.arange(n, dtype=np.int64)
    for e in range(us.shape[0]):
        a = np.int64(us[e])
        b = np.int64(vs[e])
        while root[a] != a:
            root[a] = root[root[a]]
            a = root[a]
        while root[b] != b:
            root[b] = root[root[b]]
            b = root[b]
        if a != b:
            if a < b:
                root[b] = a
            else:
                root[a] = b
    for v in range(n):
        r = v
        while root[r] != r:
            r = root[r]
        root[v] = r
    return root


def _csr_edge_endpoints(g: CsrGraph) -> tuple[np.ndarray, np.ndarray]:
    src = np.repeat(
        np.arange(g.n, dtype=np.int64), np.diff(g.row_starts)
    )
    return src, g.dst.astype(np.int64)


class Validator:
    """Reusable checker: precomputes edge keys and component labels once.

    Hand the raw :class:`EdgeList` in when available; otherwise component
    labels fall back to CSR-derived endpoints (documented weaker
    independence).
    """

    def __init__(self, g: CsrGraph, edge_list: EdgeList | None = None):
        self.g = g
        # sorted (u * n + v) keys over stored directed edges: membership
        # queries for "does edge (u, v) exist" by binary search
        src, dst = _csr_edge_endpoints(g)
        self._edge_keys = src * g.n + dst if g.n else np.zeros(0, dtype=np.int64)
        self._src32 = src.astype(np.int32)
        self._dst32 = g.dst.astype(np.int32)
        if edge_list is not None:
            e = edge_list.edges
            us = e[:, 0]  # strided uint32 views; the kernel casts per element
            vs = e[:, 1]
        else:
            us, vs = src, dst
        self._labels = _uf_components(g.n, us, vs) if g.n else np.zeros(0, np.int64)

    def component_labels(self) -> np.ndarray:
        return self._labels

    def validate(self, source: int, parent: np.ndarray) -> ValidationReport:
        g = self.g
        n = g.n
        parent = np.asarray(parent)
        if parent.shape != (n,):
            raise ValueError(
                f"predecessor array has shape {parent.shape}, expected ({n},)"
            )
        parent = parent.astype(np.int64)
        if not 0 <= source < n:
            raise ValueError(f"source {source} out of range for n={n}")
        checks: list[CheckResult] = []

        # 1: source roots itself
        ok = parent[source] == source
        checks.append(
            CheckResult(
                "source is own parent", bool(ok),
                "" if ok else f"parent[{source}] = {parent[source]}",
            )
        )

        reached = parent >= 0
        tree_v = np.flatnonzero(reached & (np.arange(n) != source))

        # 2: tree edges exist (out-of-range parents count as missing edges)
        pa = parent[tree_v]
        in_range = (pa >= 0) & (pa < n)
        bad2 = -1
        if not np.all(in_range):
            bad2 = int(tree_v[np.flatnonzero(~in_range)[0]])
        else:
            keys = tree_v * n + pa
            pos = np.searchsorted(self._edge_keys, keys)
            pos_ok = pos < self._edge_keys.size
            found = np.zeros(tree_v.size, dtype=bool)
            found[pos_ok] = self._edge_keys[pos[pos_ok]] == keys[pos_ok]
            if not np.all(found):
                bad2 = int(tree_v[np.flatnonzero(~found)[0]])
        checks.append(
            CheckResult(
                "tree edges exist", bad2 < 0,
                "" if bad2 < 0 else f"(v={bad2}, parent={int(parent[bad2])}) is not a graph edge",
            )
        )

        # 3: levels finite, level(v) = level(parent(v)) + 1
        levels = np.full(n, -1, dtype=np.int64)
        levels[source] = 0
        pending = reached & (levels < 0)
        # parents out of range cannot propagate; mask them out
        safe = pending & (parent >= 0) & (parent < n)
        for _ in range(n):
            if not np.any(safe):
                break
            cand = np.flatnonzero(safe)
            pl = levels[parent[cand]]
            newly = cand[pl >= 0]
            if newly.size == 0:
                break
            levels[newly] = levels[parent[newly]] + 1
            safe[newly] = False
        unresolved = np.flatnonzero(reached & (levels < 0))
        ok3 = unresolved.size == 0
        detail3 = ""
        if not ok3:
            v = int(unresolved[0])
            detail3 = f"vertex {v}: parent chain never reaches the source (cycle or unreached parent)"
        checks.append(CheckResult("parent chains are proper levels", ok3, detail3))

        # 4: graph edges span at most one level among reached endpoints
        bad4 = ""
        src_all, dst_all = self._src32, self._dst32
        lv_s = levels[src_all]
        lv_d = levels[dst_all]
        both = (lv_s >= 0) & (lv_d >= 0)
        skew = np.abs(lv_s - lv_d) > 1
        offenders = np.flatnonzero(both & skew)
        if offenders.size:
            i = int(offenders[0])
            bad4 = (
                f"edge ({int(src_all[i])}, {int(dst_all[i])}) spans levels "
                f"{int(levels[src_all[i]])} and {int(levels[dst_all[i]])}"
            )
        checks.append(CheckResult("edges span at most one level", offenders.size == 0, bad4))

        # 5: reached iff same component as source
        same = self._labels == self._labels[source]
        mism = np.flatnonzero(same != reached)
        bad5 = ""
        if mism.size:
            v = int(mism[0])
            if same[v]:
                bad5 = f"vertex {v} is in the source component but unreached"
            else:
                bad5 = f"vertex {v} is reached but outside the source component"
        checks.append(CheckResult("reachability matches components", mism.size == 0, bad5))

        return ValidationReport(
            passed=all(c.passed for c in checks),
            checks=checks,
            derived_levels=levels,
        )


def validate(
    g: CsrGraph,
    source: int,
    parent: np.ndarray,
    edge_list: EdgeList | None = None,
) -> ValidationReport:
    """One-shot validation; builds a throwaway :class:`Validator`."""
    return Validator(g, edge_list=edge_list).validate(source, parent)
