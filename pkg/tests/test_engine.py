"""Traversal engine: step kernels, direction policy, whole runs."""

from collections import deque

import numpy as np
import pytest

from rcmbfs import (
    BOTTOM_UP,
    MODES,
    TOP_DOWN,
    Bitmap,
    BfsEngine,
    BfsParams,
    EdgeList,
    Frontier,
    PolicyCounters,
    bfs_run,
    bfs_sequential,
    bottom_up_step,
    bottom_up_step_reduced,
    build_csr,
    degree_sort_adjacency,
    get_partitions,
    top_down_step,
    top_down_step_balanced,
    update_traversal_policy,
    write_level_trace,
)

from conftest import random_graph

# small graphs legitimately have fewer 512-vertex blocks than requested
# partitions; the clamp warning itself is covered in test_partition.py
pytestmark = pytest.mark.filterwarnings("ignore:partition count clamped")


def py_bfs(g, source):
    parent = np.full(g.n, -1, dtype=np.int64)
    level = np.full(g.n, -1, dtype=np.int64)
    parent[source] = source
    level[source] = 0
    dq = deque([source])
    while dq:
        v = dq.popleft()
        for w in g.neighbors(v):
            w = int(w)
            if parent[w] < 0:
                parent[w] = v
                level[w] = level[v] + 1
                dq.append(w)
    return parent, level


def tree_levels(parent, source):
    """Level of each reached vertex implied by its parent chain."""
    n = parent.size
    lev = np.full(n, -1, dtype=np.int64)
    lev[source] = 0
    for v in range(n):
        if parent[v] < 0 or lev[v] >= 0:
            continue
        path = []
        u = v
        while lev[u] < 0:
            path.append(u)
            u = int(parent[u])
            if len(path) > n:
                pytest.fail("parent chain does not terminate")
        base = int(lev[u])
        for i, w in enumerate(reversed(path)):
            lev[w] = base + i + 1
    return lev


def path_graph(k):
    e = np.array([[i, i + 1] for i in range(k - 1)], dtype=np.uint32)
    return build_csr(EdgeList(n_declared=k, edges=e))


def star_graph(n_leaves, center=0):
    leaves = [v for v in range(n_leaves + 1) if v != center]
    e = np.array([[center, l] for l in leaves], dtype=np.uint32)
    return build_csr(EdgeList(n_declared=n_leaves + 1, edges=e))


def seeded_state(g, frontier_vertices):
    """visited/parent with the frontier already claimed, as steps expect."""
    visited = Bitmap(g.n)
    parent = np.full(g.n, -1, dtype=np.int32)
    for v in frontier_vertices:
        visited.set(v)
        parent[v] = v
    fr = Frontier.from_queue(g.n, np.array(frontier_vertices, dtype=np.uint32))
    return fr, visited, parent


# --- sequential reference ---------------------------------------------------


def test_sequential_matches_python_oracle(rng):
    for _ in range(20):
        g = random_graph(rng, n=int(rng.integers(2, 800)))
        src = int(rng.integers(0, g.n))
        res = bfs_sequential(g, src)
        exp_parent, exp_level = py_bfs(g, src)
        assert np.array_equal(res.predecessor, exp_parent)
        assert np.array_equal(tree_levels(res.predecessor, src), exp_level)


def test_sequential_matches_networkx(rng):
    nx = pytest.importorskip("networkx")
    for _ in range(5):
        g = random_graph(rng, n=int(rng.integers(10, 500)))
        src = int(rng.integers(0, g.n))
        gx = nx.Graph()
        gx.add_nodes_from(range(g.n))
        for v in range(g.n):
            for w in g.neighbors(v):
                gx.add_edge(v, int(w))
        dist = nx.single_source_shortest_path_length(gx, src)
        lev = tree_levels(bfs_sequential(g, src).predecessor, src)
        for v in range(g.n):
            assert lev[v] == dist.get(v, -1)


def test_sequential_single_vertex():
    g = build_csr(EdgeList(n_declared=1, edges=np.zeros((0, 2), dtype=np.uint32)))
    res = bfs_sequential(g, 0)
    assert list(res.predecessor) == [0]
    assert res.depth == 0
    assert res.n_reached == 1
    assert res.traversed_edges == 0


def test_sequential_three_vertex_path():
    res = bfs_sequential(path_graph(3), 0)
    assert list(res.predecessor) == [0, 0, 1]
    assert res.depth == 2
    assert [rec.n_f for rec in res.levels] == [1, 1, 1]


def test_sequential_isolated_source():
    e = np.array([[1, 2]], dtype=np.uint32)
    g = build_csr(EdgeList(n_declared=3, edges=e))
    res = bfs_sequential(g, 0)
    assert list(res.predecessor) == [0, -1, -1]
    assert res.n_reached == 1 and res.traversed_edges == 0


def test_sequential_source_out_of_range():
    g = path_graph(3)
    with pytest.raises(ValueError, match="out of range"):
        bfs_sequential(g, 3)
    with pytest.raises(ValueError, match="out of range"):
        bfs_run(g, -1)


def test_record_recurrences_sequential(rng):
    g = random_graph(rng, n=600)
    src = int(np.flatnonzero(g.degrees > 0)[0])
    res = bfs_sequential(g, src)
    recs = res.levels
    assert recs[0].n_f == 1
    assert recs[0].m_f == g.degrees[src]
    assert recs[0].m_u == g.m_directed - recs[0].m_f
    for a, b in zip(recs, recs[1:]):
        assert b.m_u == a.m_u - b.m_f
    assert sum(r.n_f for r in recs) == res.n_reached
    reached = res.predecessor >= 0
    assert res.traversed_edges == int(g.degrees[reached].sum()) // 2


# --- top-down steps ---------------------------------------------------------


def test_td_step_star():
    g = star_graph(6, center=0)
    fr, visited, parent = seeded_state(g, [0])
    nxt, stats = top_down_step(g, fr, visited, parent)
    assert stats.n_next == 6
    assert stats.scanned_edges == 6  # the center's full adjacency
    assert stats.deg_next == 6  # six degree-1 leaves
    assert sorted(nxt.indices().tolist()) == [1, 2, 3, 4, 5, 6]
    assert all(parent[l] == 0 for l in range(1, 7))
    assert all(visited.test(l) for l in range(1, 7))


def test_td_step_nothing_left():
    g = star_graph(4, center=0)
    fr, visited, parent = seeded_state(g, [0])
    for v in range(g.n):
        visited.set(v)
    nxt, stats = top_down_step(g, fr, visited, parent)
    assert stats.n_next == 0 and nxt.count == 0
    assert stats.scanned_edges == 4  # scanned, found everything claimed


def test_td_step_level_sets_match_sequential(rng):
    g = random_graph(rng, n=400)
    src = int(np.argmax(g.degrees))
    _, exp_level = py_bfs(g, src)
    fr, visited, parent = seeded_state(g, [src])
    lv = 0
    while fr.count:
        want = np.flatnonzero(exp_level == lv)
        assert np.array_equal(np.sort(fr.indices()), want)
        fr, _ = top_down_step(g, fr, visited, parent)
        lv += 1
    assert not np.any(exp_level >= lv)


@pytest.mark.parametrize("threads", [2, 4])
def test_td_parallel_discovers_same_set(rng, threads):
    g = random_graph(rng, n=1000, density=4.0)
    src = int(np.argmax(g.degrees))
    fr0, vis0, par0 = seeded_state(g, [src])
    ref, _ = top_down_step(g, fr0, vis0, par0)
    for step_fn in (top_down_step, top_down_step_balanced):
        fr, visited, parent = seeded_state(g, [src])
        nxt, stats = step_fn(g, fr, visited, parent, threads)
        assert np.array_equal(np.sort(nxt.indices()), np.sort(ref.indices()))
        assert stats.per_thread_edges.size == threads
        # every discovered vertex got a frontier member as parent
        for w in nxt.indices():
            assert parent[w] == src


def test_td_striped_even_split():
    # degree exactly threads * q: every thread gets a q-edge stripe
    g = star_graph(8, center=0)
    fr, visited, parent = seeded_state(g, [0])
    nxt, stats = top_down_step_balanced(g, fr, visited, parent, threads=4)
    assert stats.n_next == 8
    assert stats.per_thread_edges.tolist() == [2, 2, 2, 2]


def test_td_striped_remainder_goes_by_position():
    # degree 3 < threads 4: floor stripe is empty, the remainder lands on
    # thread (queue position mod threads) = 0 for a single frontier vertex
    g = star_graph(3, center=0)
    fr, visited, parent = seeded_state(g, [0])
    nxt, stats = top_down_step_balanced(g, fr, visited, parent, threads=4)
    assert stats.n_next == 3
    assert stats.per_thread_edges.tolist() == [3, 0, 0, 0]


# --- direction policy -------------------------------------------------------


def policy(direction, m_f, m_u, n_f, n, **kw):
    return update_traversal_policy(
        PolicyCounters(direction=direction, m_f=m_f, m_u=m_u, n_f=n_f, n=n),
        BfsParams(**kw),
    )


def test_policy_empty_frontier_stays_top_down():
    assert policy(TOP_DOWN, 0, 10_000, 0, 1000) == TOP_DOWN


def test_policy_switch_threshold_is_strict():
    # alpha 64, m_u 6400: threshold m_f > 100
    assert policy(TOP_DOWN, 101, 6400, 5, 1000) == BOTTOM_UP
    assert policy(TOP_DOWN, 100, 6400, 5, 1000) == TOP_DOWN


def test_policy_return_threshold_is_strict():
    # beta 8, n 800: return when n_f < 100
    assert policy(BOTTOM_UP, 1, 1, 99, 800) == TOP_DOWN
    assert policy(BOTTOM_UP, 1, 1, 100, 800) == BOTTOM_UP


def test_policy_respects_alpha_beta():
    assert policy(TOP_DOWN, 11, 100, 5, 1000, alpha=10) == BOTTOM_UP
    assert policy(TOP_DOWN, 11, 100, 5, 1000, alpha=5) == TOP_DOWN
    assert policy(TOP_DOWN, 11, 100, 5, 1000, alpha=128) == BOTTOM_UP
    assert policy(BOTTOM_UP, 1, 1, 400, 1000, beta=2) == TOP_DOWN
    assert policy(BOTTOM_UP, 1, 1, 600, 1000, beta=2) == BOTTOM_UP


# --- bottom-up steps --------------------------------------------------------


def test_bu_step_star():
    g = star_graph(6, center=0)
    fr, visited, parent = seeded_state(g, [0])
    nxt, stats = bottom_up_step(g, fr, visited, parent)
    assert stats.n_next == 6
    assert sorted(nxt.indices().tolist()) == [1, 2, 3, 4, 5, 6]
    assert all(parent[l] == 0 for l in range(1, 7))


def test_bu_step_everything_visited():
    g = star_graph(4, center=0)
    fr, visited, parent = seeded_state(g, list(range(g.n)))
    nxt, stats = bottom_up_step(g, fr, visited, parent)
    assert stats.n_next == 0 and nxt.count == 0


def test_bu_step_adopts_first_listed_neighbor(rng):
    g = random_graph(rng, n=300)
    src = int(np.argmax(g.degrees))
    fr, visited, parent = seeded_state(g, [src])
    nxt, _ = bottom_up_step(g, fr, visited, parent)
    for w in nxt.indices():
        assert parent[w] == src  # only frontier member available
        assert src in g.neighbors(int(w))


def test_bu_reduced_star_pass1_finds_everything():
    # every leaf's single (hence highest-degree) neighbor is the center
    g = star_graph(6, center=0)
    gd = degree_sort_adjacency(g, "descending")
    ps = get_partitions(g.n, 1, 1)
    fr, visited, parent = seeded_state(g, [0])
    nxt, stats = bottom_up_step_reduced(gd, fr, visited, parent, ps)
    assert stats.n_next == 6
    assert stats.pass1_hits == 6
    assert stats.claimed == ps.n_partitions
    assert sorted(nxt.indices().tolist()) == [1, 2, 3, 4, 5, 6]
    # deferred publish: discovered vertices are visited after the step
    assert all(visited.test(l) for l in range(1, 7))


def test_bu_reduced_agrees_with_plain_bu(rng):
    for _ in range(10):
        g = random_graph(rng, n=int(rng.integers(50, 1500)), density=3.0)
        gd = degree_sort_adjacency(g, "descending")
        src = int(np.argmax(g.degrees))
        fr, vis_a, par_a = seeded_state(g, [src])
        ref, _ = bottom_up_step(g, fr, vis_a, par_a)
        ps = get_partitions(g.n, 2, 1)
        fr, vis_b, par_b = seeded_state(g, [src])
        got, stats = bottom_up_step_reduced(gd, fr, vis_b, par_b, ps)
        assert np.array_equal(ref.indices(), got.indices())
        assert np.array_equal(
            np.sort(np.flatnonzero(par_a >= 0)), np.sort(np.flatnonzero(par_b >= 0))
        )
        assert stats.pass1_hits <= stats.n_next


# --- whole-run mode agreement -----------------------------------------------


def run_mode(g, src, mode, threads=1, gd=None, **kw):
    kw.setdefault("partition_factor", 2)
    params = BfsParams(mode=mode, threads=threads, **kw)
    need_desc = mode == "hybrid_reduced"
    return bfs_run(g, src, params, g_desc=gd if need_desc else None)


def test_all_modes_agree_on_path():
    g = path_graph(12)
    gd = degree_sort_adjacency(g, "descending")
    for src in (0, 5, 11):
        ref = bfs_sequential(g, src)
        for mode in MODES[1:]:
            res = run_mode(g, src, mode, gd=gd)
            assert np.array_equal(res.predecessor, ref.predecessor), (mode, src)
            assert res.depth == ref.depth


def test_level_sync_single_thread_equals_sequential(rng):
    for _ in range(10):
        g = random_graph(rng, n=int(rng.integers(2, 1000)))
        src = int(rng.integers(0, g.n))
        ref = bfs_sequential(g, src)
        res = bfs_run(g, src, BfsParams(mode="level_sync", threads=1))
        assert np.array_equal(res.predecessor, ref.predecessor)


@pytest.mark.parametrize("threads", [1, 2, 4])
def test_modes_agree_on_random_graphs(rng, threads):
    for _ in range(6):
        g = random_graph(rng, n=int(rng.integers(20, 1200)))
        gd = degree_sort_adjacency(g, "descending")
        src = int(rng.choice(np.flatnonzero(g.degrees > 0)))
        ref = bfs_sequential(g, src)
        ref_lev = tree_levels(ref.predecessor, src)
        for mode in MODES[1:]:
            res = run_mode(g, src, mode, threads=threads, gd=gd)
            assert np.array_equal(res.predecessor >= 0, ref.predecessor >= 0), mode
            assert np.array_equal(tree_levels(res.predecessor, src), ref_lev), mode
            assert res.traversed_edges == ref.traversed_edges
            assert [r.n_f for r in res.levels] == [r.n_f for r in ref.levels]


@pytest.mark.parametrize("threads", [1, 4])
def test_modes_agree_on_generated_graph(kron, threads):
    g = kron.rcm_graph(12)[0]
    gd = kron.desc_graph(12)
    srcs = np.random.default_rng(9).choice(
        np.flatnonzero(g.degrees > 0), size=4, replace=False
    )
    for src in (int(s) for s in srcs):
        ref = bfs_sequential(g, src)
        ref_lev = tree_levels(ref.predecessor, src)
        for mode in MODES[1:]:
            res = run_mode(g, src, mode, threads=threads, gd=gd)
            assert np.array_equal(res.predecessor >= 0, ref.predecessor >= 0)
            assert np.array_equal(tree_levels(res.predecessor, src), ref_lev)
            assert [r.n_f for r in res.levels] == [r.n_f for r in ref.levels]


def test_hybrid_direction_pattern_on_generated_graph(kron):
    # deterministic graph, deterministic policy: the phase layout is frozen
    g = kron.rcm_graph(12)[0]
    srcs = np.random.default_rng(9).choice(
        np.flatnonzero(g.degrees > 0), size=8, replace=False
    )
    assert [int(s) for s in srcs[:4]] == [1401, 2893, 3196, 954]
    pats = []
    for src in srcs[:4]:
        res = bfs_run(g, int(src), BfsParams(mode="hybrid"))
        assert res.levels[0].direction == TOP_DOWN
        pats.append(
            "".join("T" if r.direction == TOP_DOWN else "B" for r in res.levels)
        )
    assert pats == ["TBBBT", "TBBBT", "TBBBT", "TTBBT"]


def test_record_recurrences_hybrid(kron):
    g = kron.rcm_graph(12)[0]
    res = bfs_run(g, 1401, BfsParams(mode="hybrid"))
    recs = res.levels
    assert recs[0].n_f == 1 and recs[0].m_f == g.degrees[1401]
    assert recs[0].m_u == g.m_directed - recs[0].m_f
    for a, b in zip(recs, recs[1:]):
        assert b.m_u == a.m_u - b.m_f
    assert sum(r.n_f for r in recs) == res.n_reached
    reached = res.predecessor >= 0
    assert res.traversed_edges == int(g.degrees[reached].sum()) // 2


def test_td_striped_balance_bound(kron):
    g = kron.rcm_graph(12)[0]
    for threads in (2, 4):
        res = bfs_run(
            g, 1401, BfsParams(mode="hybrid_balanced", threads=threads,
                               partition_factor=2),
        )
        seen_td = 0
        for rec in res.levels:
            if rec.direction != TOP_DOWN:
                continue
            seen_td += 1
            spread = int(rec.per_thread_edges.max() - rec.per_thread_edges.min())
            assert spread <= (threads - 1) * -(-rec.n_f // threads)
        assert seen_td >= 1


def test_bu_claims_cover_all_partitions(kron):
    g = kron.rcm_graph(12)[0]
    gd = kron.desc_graph(12)
    for mode in ("hybrid_balanced", "hybrid_reduced"):
        res = run_mode(g, 1401, mode, threads=4, gd=gd)
        bu = [r for r in res.levels if r.direction == BOTTOM_UP]
        assert bu
        for rec in bu:
            assert rec.claimed == 2 * 4  # partition_factor * threads


def test_live_vertices_shrink_monotonically(kron):
    g = kron.rcm_graph(12)[0]
    gd = kron.desc_graph(12)
    res = run_mode(g, 1401, "hybrid_reduced", gd=gd)
    live = [r.live_vertices for r in res.levels if r.direction == BOTTOM_UP]
    assert len(live) >= 2
    assert all(a >= b for a, b in zip(live, live[1:]))
    assert live[-1] < g.n  # something was retired
    # the stealing-only mode honors bounds but never shrinks them
    res2 = run_mode(g, 1401, "hybrid_balanced", gd=None)
    for rec in res2.levels:
        if rec.direction == BOTTOM_UP:
            assert rec.live_vertices == g.n


def test_pass1_resolves_most_discoveries(kron):
    g = kron.rcm_graph(12)[0]
    gd = kron.desc_graph(12)
    res = run_mode(g, 1401, "hybrid_reduced", gd=gd)
    hits = sum(r.pass1_hits or 0 for r in res.levels)
    nf = [r.n_f for r in res.levels]
    discovered_bu = sum(
        nf[i + 1] for i in range(len(nf) - 1)
        if res.levels[i].direction == BOTTOM_UP
    )
    frac = hits / discovered_bu
    print(f"\npass-1 share of bottom-up discoveries: {frac:.3f}")
    assert 0.5 <= frac <= 1.0


# --- engine lifecycle -------------------------------------------------------


def test_engine_reusable_across_sources(kron):
    g = kron.rcm_graph(12)[0]
    gd = kron.desc_graph(12)
    params = BfsParams(mode="hybrid_reduced", partition_factor=2)
    with BfsEngine(g, params, g_desc=gd) as eng:
        first = eng.run(1401)
        second = eng.run(2893)
    fresh = bfs_run(g, 2893, params, g_desc=gd)
    assert np.array_equal(second.predecessor, fresh.predecessor)
    assert first.source == 1401 and second.source == 2893


def test_engine_context_manager_releases_pool():
    g = path_graph(100)
    with BfsEngine(g, BfsParams(mode="level_sync", threads=2)) as eng:
        assert eng.pool is not None
        eng.run(0)
    assert eng.pool is None


def test_engine_single_thread_has_no_pool():
    g = path_graph(10)
    eng = BfsEngine(g, BfsParams(mode="hybrid"))
    assert eng.pool is None
    eng.close()


def test_hybrid_reduced_requires_descending_adjacency():
    g = path_graph(10)
    with pytest.raises(ValueError, match="descending-degree"):
        BfsEngine(g, BfsParams(mode="hybrid_reduced"))
    other = degree_sort_adjacency(path_graph(11), "descending")
    with pytest.raises(ValueError, match="does not match"):
        BfsEngine(g, BfsParams(mode="hybrid_reduced"), g_desc=other)


def test_params_validation():
    for kw in (
        dict(alpha=0), dict(alpha=129), dict(beta=0), dict(beta=33),
        dict(partition_factor=0), dict(threads=0), dict(mode="inward"),
    ):
        with pytest.raises(ValueError):
            BfsParams(**kw)


def test_engine_run_source_out_of_range():
    g = path_graph(5)
    with BfsEngine(g, BfsParams(mode="hybrid")) as eng:
        with pytest.raises(ValueError, match="out of range"):
            eng.run(5)


def test_isolated_source_under_engine():
    e = np.array([[1, 2]], dtype=np.uint32)
    g = build_csr(EdgeList(n_declared=4, edges=e))  # 0 and 3 isolated
    res = bfs_run(g, 0, BfsParams(mode="hybrid"))
    assert list(res.predecessor) == [0, -1, -1, -1]
    assert res.n_reached == 1 and res.depth == 0


def test_frontier_form_round_trip(rng):
    n = 900
    members = np.unique(rng.integers(0, n, size=50).astype(np.uint32))
    fr = Frontier.from_queue(n, members)
    assert fr.count == members.size
    both = fr.to_bitmap_form()
    assert both.bits.count() == members.size
    back = Frontier.from_bitmap(both.bits)
    assert np.array_equal(back.indices(), members)  # ascending
    assert back.to_queue_form().count == members.size


def test_write_level_trace(tmp_path, kron):
    g = kron.rcm_graph(12)[0]
    results = [bfs_run(g, s, BfsParams(mode="hybrid")) for s in (1401, 2893)]
    out = tmp_path / "trace.csv"
    write_level_trace(results, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("round,source,mode,level,direction")
    assert len(lines) == 1 + sum(len(r.levels) for r in results)
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "1401" and first[2] == "hybrid"
    assert first[4] == TOP_DOWN and first[5] == "1"
