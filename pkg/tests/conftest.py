"""Shared fixtures: cached generated graphs and random-graph helpers.

Generated graphs at a given (scale, edgefactor, seed) are deterministic,
so one session-wide cache serves every test that needs them.  The cache
stores CSR variants only (plain, relabeled, degree-sorted); raw edge
lists are cheap to regenerate where a test wants them.
"""

import numpy as np
import pytest

from rcmbfs import (
    BfsParams,
    EdgeList,
    KroneckerParams,
    Validator,
    apply_permutation,
    build_csr,
    degree_sort_adjacency,
    kronecker_generate,
    rcm,
)


class KronCache:
    def __init__(self):
        self._store = {}

    def _get(self, key, builder):
        if key not in self._store:
            self._store[key] = builder()
        return self._store[key]

    def graph(self, scale, edgefactor=16, seed=1):
        return self._get(
            ("g", scale, edgefactor, seed),
            lambda: build_csr(
                kronecker_generate(
                    KroneckerParams(scale=scale, edgefactor=edgefactor, seed=seed)
                )
            ),
        )

    def rcm_graph(self, scale, edgefactor=16, seed=1):
        def build():
            g = self.graph(scale, edgefactor, seed)
            perm, stats = rcm(g)
            return apply_permutation(g, perm), perm, stats

        return self._get(("rcm", scale, edgefactor, seed), build)

    def desc_graph(self, scale, edgefactor=16, seed=1):
        """Descending-degree adjacency of the relabeled graph."""
        return self._get(
            ("desc", scale, edgefactor, seed),
            lambda: degree_sort_adjacency(
                self.rcm_graph(scale, edgefactor, seed)[0], "descending"
            ),
        )

    def validator(self, scale, edgefactor=16, seed=1, reordered=False):
        g = (
            self.rcm_graph(scale, edgefactor, seed)[0]
            if reordered
            else self.graph(scale, edgefactor, seed)
        )
        return self._get(("val", scale, edgefactor, seed, reordered), lambda: Validator(g))

    def drop(self, *prefixes):
        """Free entries whose key starts with any given tag (memory control)."""
        for k in [k for k in self._store if k[0] in prefixes]:
            del self._store[k]


@pytest.fixture(scope="session")
def kron():
    return KronCache()


def random_edge_list(rng, n, m) -> EdgeList:
    """Uniform random multigraph pairs (duplicates and self-loops allowed)."""
    e = rng.integers(0, n, size=(m, 2), dtype=np.uint32)
    return EdgeList(n_declared=n, edges=e)


def random_graph(rng, n=None, density=2.5):
    if n is None:
        n = int(rng.integers(16, 5001))
    m = max(1, int(n * density))
    return build_csr(random_edge_list(rng, n, m))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def mode_params(mode, threads=1, **kw):
    return BfsParams(mode=mode, threads=threads, **kw)


def derived_levels(validator, source, parent):
    """Per-vertex levels implied by a parent array (validator's resolver)."""
    rep = validator.validate(source, parent)
    return rep, rep.derived_levels
