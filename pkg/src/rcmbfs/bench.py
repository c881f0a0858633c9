"""Benchmark pipelines: graph preparation, timed rounds, TEPS statistics.

A run works from a :class:`RunConfig`: obtain a graph (generate or load),
optionally reorder it, pick seeded random sources among non-isolated
vertices, traverse each source with one reusable engine, validate every
round unless told not to, and report per-round TEPS with min/max/median/
harmonic-mean summaries.

TEPS counts each undirected edge of the reached component once
(deduplicated CSR edges).  The raw input-pair count of the component is
reported alongside, since duplicate pairs in generator output would inflate
it; the deduplicated number is the primary metric.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .engine import BfsEngine, BfsParams, BfsResult, write_level_trace
from .generator import KroneckerParams, generator_metadata, kronecker_generate
from .graph import CsrGraph, EdgeList, build_csr, load_edge_list
from .reorder import (
    Permutation,
    RcmRunStats,
    apply_permutation,
    degree_sort_adjacency,
    partial_rcm,
    rcm,
)
from .validate import Validator

__all__ = [
    "RunConfig",
    "BenchSummary",
    "PreparedRun",
    "ValidationFailure",
    "parse_reorder",
    "prepare_run",
    "run_benchmark",
    "sweep",
]


class ValidationFailure(RuntimeError):
    """A benchmark round produced an invalid BFS tree."""

    def __init__(self, round_index: int, source: int, report):
        self.round_index = round_index
        self.source = source
        self.report = report
        super().__init__(
            f"round {round_index} (source {source}) failed validation:\n"
            + report.as_text()
        )


def parse_reorder(spec: str) -> tuple[str, float]:
    """Parse a reorder spec: ``none``, ``rcm``, or ``partial:<p>``."""
    if spec == "none":
        return "none", 0.0
    if spec == "rcm":
        return "rcm", 1.0
    if spec.startswith("partial:"):
        try:
            p = float(spec.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad reorder spec {spec!r}: ratio is not a number") from None
        if not 0.0 < p <= 1.0:
            raise ValueError(f"bad reorder spec {spec!r}: ratio must be in (0, 1]")
        return "partial", p
    raise ValueError(
        f"bad reorder spec {spec!r}: expected none, rcm, or partial:<ratio>"
    )


@dataclass
class RunConfig:
    """Everything needed to reproduce a benchmark run.

    Exactly one graph source: ``generate`` (Kronecker parameters) or
    ``graph_path``.  ``seed`` drives source sampling only; the generator
    has its own seed inside ``generate``.
    """

    generate: KroneckerParams | None = None
    graph_path: str | None = None
    graph_format: str = "auto"
    n_vertices: int | None = None
    reorder: str = "none"
    params: BfsParams = field(default_factory=BfsParams)
    rounds: int = 64
    seed: int = 1
    validate: bool = True
    out_dir: str | None = None
    save_parents: str | None = None

    def check(self) -> None:
        if (self.generate is None) == (self.graph_path is None):
            raise ValueError("config needs exactly one of: generate params, graph path")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        parse_reorder(self.reorder)


@dataclass
class PreparedRun:
    """Graph pipeline outputs shared by all rounds (and all sweep points)."""

    graph: CsrGraph
    g_desc: CsrGraph | None
    perm: Permutation | None
    rcm_stats: RcmRunStats | None
    sources: np.ndarray
    validator: Validator | None
    raw_pairs: int
    raw_pairs_per_label: np.ndarray | None
    timings: dict[str, float]


def _sample_sources(g: CsrGraph, rounds: int, seed: int) -> np.ndarray:
    eligible = np.flatnonzero(g.degrees > 0)
    if eligible.size == 0:
        raise ValueError("graph has no non-isolated vertices to draw sources from")
    if rounds > eligible.size:
        raise ValueError(
            f"{rounds} rounds requested but only {eligible.size} non-isolated "
            f"vertices are available (sampling is without replacement)"
        )
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(eligible, size=rounds, replace=False)).astype(np.int64)


def prepare_run(config: RunConfig) -> PreparedRun:
    """Execute the graph pipeline once: obtain, build, reorder, precompute."""
    config.check()
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    if config.generate is not None:
        el = kronecker_generate(config.generate)
        timings["generate"] = time.perf_counter() - t0
    else:
        el = load_edge_list(
            config.graph_path, fmt=config.graph_format, n=config.n_vertices
        )
        timings["load"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    g = build_csr(el)
    timings["csr_build"] = time.perf_counter() - t0

    kind, p = parse_reorder(config.reorder)
    perm = None
    stats = None
    if kind != "none":
        t0 = time.perf_counter()
        perm, stats = rcm(g) if kind == "rcm" else partial_rcm(g, p)
        g = apply_permutation(g, perm)
        timings["reorder"] = time.perf_counter() - t0

    g_desc = None
    if config.params.mode == "hybrid_reduced":
        t0 = time.perf_counter()
        g_desc = degree_sort_adjacency(g, "descending")
        timings["degree_sort"] = time.perf_counter() - t0

    # validation must see the graph the engine traverses; after a reorder
    # the raw pairs refer to old labels, so relabel them for the oracle
    validator = None
    raw_per_label = None
    if config.validate:
        t0 = time.perf_counter()
        if perm is not None:
            relabeled = EdgeList(
                n_declared=g.n,
                edges=perm.inv[el.edges.reshape(-1)].reshape(-1, 2),
            )
        else:
            relabeled = el
        validator = Validator(g, edge_list=relabeled)
        labels = validator.component_labels()
        if relabeled.edges.size:
            raw_per_label = np.bincount(
                labels[relabeled.edges[:, 0]], minlength=g.n
            )
        timings["validator_setup"] = time.perf_counter() - t0

    sources = _sample_sources(g, config.rounds, config.seed)
    return PreparedRun(
        graph=g, g_desc=g_desc, perm=perm, rcm_stats=stats, sources=sources,
        validator=validator, raw_pairs=el.m_raw,
        raw_pairs_per_label=raw_per_label, timings=timings,
    )


@dataclass
class BenchSummary:
    """Aggregate results of one benchmark run."""

    mode: str
    threads: int
    alpha: int
    beta: int
    partition_factor: int
    rounds: int
    sources: np.ndarray
    teps: np.ndarray
    traversed: np.ndarray
    raw_pairs_reached: np.ndarray | None
    depths: np.ndarray
    elapsed: np.ndarray
    level_aggregates: list[dict]
    preprocessing: dict[str, float]
    validated: bool
    graph_n: int
    graph_m_undirected: int
    raw_pairs: int

    @property
    def teps_min(self) -> float:
        return float(self.teps.min())

    @property
    def teps_max(self) -> float:
        return float(self.teps.max())

    @property
    def teps_median(self) -> float:
        return float(np.median(self.teps))

    @property
    def teps_harmonic_mean(self) -> float:
        return float(self.teps.size / np.sum(1.0 / self.teps))

    def as_text(self) -> str:
        lines = [
            f"graph: n={self.graph_n} m={self.graph_m_undirected} "
            f"(raw input pairs {self.raw_pairs})",
            f"mode={self.mode} threads={self.threads} alpha={self.alpha} "
            f"beta={self.beta} lambda={self.partition_factor}",
            f"rounds={self.rounds} validated={'yes' if self.validated else 'no'}",
            (
                "TEPS  min={:.3e}  median={:.3e}  hmean={:.3e}  max={:.3e}".format(
                    self.teps_min, self.teps_median,
                    self.teps_harmonic_mean, self.teps_max,
                )
            ),
            (
                "depth  min={}  median={}  max={}".format(
                    int(self.depths.min()),
                    int(np.median(self.depths)),
                    int(self.depths.max()),
                )
            ),
            "traversed edges (dedup, median) = {}".format(
                int(np.median(self.traversed))
            ),
        ]
        if self.raw_pairs_reached is not None:
            lines.append(
                "raw input pairs in reached component (median) = {}".format(
                    int(np.median(self.raw_pairs_reached))
                )
            )
        if self.preprocessing:
            lines.append(
                "preprocessing: "
                + "  ".join(
                    f"{k}={v:.3f}s" for k, v in self.preprocessing.items()
                )
            )
        lines.append("per-level aggregates (over rounds reaching each level):")
        for agg in self.level_aggregates:
            lines.append(
                "  level {level}: {direction} x{rounds}, "
                "mean n_f {mean_n_f:.1f}, mean scanned {mean_scanned:.1f}".format(
                    **agg
                )
            )
        return "\n".join(lines)


def _aggregate_levels(per_round_levels: list[list]) -> list[dict]:
    out = []
    max_depth = max((len(lv) for lv in per_round_levels), default=0)
    for i in range(max_depth):
        recs = [lv[i] for lv in per_round_levels if len(lv) > i]
        dirs = sorted({r.direction for r in recs})
        out.append(
            {
                "level": i,
                "direction": "/".join(dirs),
                "rounds": len(recs),
                "mean_n_f": float(np.mean([r.n_f for r in recs])),
                "mean_scanned": float(np.mean([r.scanned_edges for r in recs])),
            }
        )
    return out


def run_benchmark(
    config: RunConfig, prepared: PreparedRun | None = None
) -> BenchSummary:
    """Run all rounds; raise :class:`ValidationFailure` on the first bad tree.

    Pass a :class:`PreparedRun` to reuse a pipeline across runs (sweeps);
    otherwise one is prepared from the config.
    """
    pr = prepared if prepared is not None else prepare_run(config)
    g = pr.graph
    p = config.params
    teps = np.empty(config.rounds)
    traversed = np.empty(config.rounds, dtype=np.int64)
    depths = np.empty(config.rounds, dtype=np.int64)
    elapsed = np.empty(config.rounds)
    raw_reached = (
        np.empty(config.rounds, dtype=np.int64)
        if pr.raw_pairs_per_label is not None
        else None
    )
    per_round_levels: list[list] = []
    trace_results: list[BfsResult] = []

    with BfsEngine(g, p, g_desc=pr.g_desc) as eng:
        for i, src in enumerate(pr.sources):
            res = eng.run(int(src))
            teps[i] = res.traversed_edges / res.elapsed_time
            traversed[i] = res.traversed_edges
            depths[i] = res.depth
            elapsed[i] = res.elapsed_time
            per_round_levels.append(res.levels)
            if raw_reached is not None:
                labels = pr.validator.component_labels()
                raw_reached[i] = int(pr.raw_pairs_per_label[labels[int(src)]])
            if pr.validator is not None:
                report = pr.validator.validate(int(src), res.predecessor)
                if not report.passed:
                    raise ValidationFailure(i, int(src), report)
            if config.save_parents and i == 0:
                _save_parents(config.save_parents, res)
            if config.out_dir:
                trace_results.append(
                    BfsResult(
                        source=res.source, n=res.n,
                        predecessor=np.zeros(0, dtype=np.int32),
                        levels=res.levels, elapsed_time=res.elapsed_time,
                        traversed_edges=res.traversed_edges, mode=res.mode,
                    )
                )

    summary = BenchSummary(
        mode=p.mode, threads=p.threads, alpha=p.alpha, beta=p.beta,
        partition_factor=p.partition_factor, rounds=config.rounds,
        sources=pr.sources, teps=teps, traversed=traversed,
        raw_pairs_reached=raw_reached, depths=depths, elapsed=elapsed,
        level_aggregates=_aggregate_levels(per_round_levels),
        preprocessing=dict(pr.timings), validated=pr.validator is not None,
        graph_n=g.n, graph_m_undirected=g.m_undirected, raw_pairs=pr.raw_pairs,
    )
    if config.out_dir:
        _write_outputs(config, summary, trace_results)
    return summary


def _save_parents(path: str, res: BfsResult) -> None:
    res.predecessor.astype("<i4").tofile(path)
    from .graph import write_metadata

    write_metadata(
        path + ".meta",
        {"n": res.n, "source": res.source, "mode": res.mode, "dtype": "int32-le"},
    )


def _write_outputs(config: RunConfig, summary: BenchSummary, results) -> None:
    os.makedirs(config.out_dir, exist_ok=True)
    with open(os.path.join(config.out_dir, "summary.txt"), "w") as f:
        f.write(summary.as_text() + "\n")
    import csv as _csv

    with open(os.path.join(config.out_dir, "summary.csv"), "w", newline="") as f:
        w = _csv.writer(f)
        w.writerow(["round", "source", "teps", "traversed_edges", "depth", "elapsed_s"])
        for i in range(summary.rounds):
            w.writerow(
                [
                    i, int(summary.sources[i]), f"{summary.teps[i]:.6e}",
                    int(summary.traversed[i]), int(summary.depths[i]),
                    f"{summary.elapsed[i]:.6f}",
                ]
            )
    write_level_trace(results, os.path.join(config.out_dir, "trace.csv"))


def sweep(
    config: RunConfig,
    alphas: list[int],
    betas: list[int],
    partition_factors: list[int],
) -> tuple[list[dict], dict]:
    """Grid search over (alpha, beta, lambda) on one shared graph and sources.

    Returns (rows, best row by median TEPS).  Each grid point runs the full
    round count with a fresh engine but the same prepared pipeline.
    """
    if not alphas or not betas or not partition_factors:
        raise ValueError("sweep grid must be non-empty on every axis")
    base = config.params
    needs_desc = base.mode == "hybrid_reduced"
    pr = prepare_run(config)
    if needs_desc and pr.g_desc is None:
        raise ValueError("sweep in hybrid_reduced mode needs the degree-sorted variant")
    rows = []
    for a in alphas:
        for b in betas:
            for lam in partition_factors:
                cfg = RunConfig(
                    generate=config.generate, graph_path=config.graph_path,
                    graph_format=config.graph_format,
                    n_vertices=config.n_vertices, reorder=config.reorder,
                    params=BfsParams(
                        alpha=a, beta=b, partition_factor=lam,
                        threads=base.threads, mode=base.mode,
                    ),
                    rounds=config.rounds, seed=config.seed,
                    validate=config.validate,
                )
                s = run_benchmark(cfg, prepared=pr)
                rows.append(
                    {
                        "alpha": a, "beta": b, "lambda": lam,
                        "median_teps": s.teps_median,
                        "hmean_teps": s.teps_harmonic_mean,
                        "min_teps": s.teps_min, "max_teps": s.teps_max,
                    }
                )
    best = max(rows, key=lambda r: r["median_teps"])
    return rows, best
