"""Command-line interface.

Subcommands: generate, stats, reorder, run, sweep, validate.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 I/O or
file-format error.

Any subcommand accepts ``--config FILE`` holding flat ``key = value``
pairs that mirror the long options (``lambda = 10``, ``mode =
hybrid_reduced``, ``validate = false``).  Options given on the command
line override the file.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import (
    RunConfig,
    ValidationFailure,
    parse_reorder,
    run_benchmark,
    sweep,
)
from .engine import MODES, BfsParams, default_partition_factor
from .generator import (
    DEFAULT_INITIATOR,
    KroneckerParams,
    generator_metadata,
    kronecker_generate,
)
from .graph import (
    EdgeList,
    bandwidth,
    build_csr,
    load_edge_list,
    read_metadata,
    save_edge_list,
)
from .reorder import (
    apply_permutation,
    graph_hash,
    partial_rcm,
    rcm,
    save_permutation,
)
from .validate import Validator

__all__ = ["main"]


class _IoError(Exception):
    """File missing, unreadable, or malformed: maps to exit code 3."""


class _UsageError(Exception):
    """Inconsistent or incomplete options: maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_initiator(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"initiator needs 4 comma-separated probabilities, got {text!r}"
        )
    try:
        return tuple(float(x) for x in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric initiator entry in {text!r}")


def _parse_int_list(text: str):
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty integer list")
    return vals


def _add_graph_input(p: _Parser, generate_ok: bool) -> None:
    p.add_argument(
        "--graph", metavar="PATH", required=not generate_ok,
        help="edge-list file to load",
    )
    p.add_argument(
        "--format", default="auto", choices=("auto", "text", "binary"),
        help="edge-list file format (auto: by extension)",
    )
    p.add_argument("--n", type=int, default=None, help="declared vertex count")
    if generate_ok:
        p.add_argument("--scale", type=int, help="generate: log2 of vertex count")
        p.add_argument("--edgefactor", type=int, default=16, help="generate: edges per vertex")
        p.add_argument("--gen-seed", type=int, default=1, help="generate: stream seed")
        p.add_argument(
            "--initiator", type=_parse_initiator, default=DEFAULT_INITIATOR,
            help="generate: a,b,c,d quadrant probabilities",
        )


def _add_bfs_params(p: _Parser) -> None:
    p.add_argument("--mode", default="hybrid", choices=MODES)
    p.add_argument("--alpha", type=int, default=64, help="top-down to bottom-up threshold")
    p.add_argument("--beta", type=int, default=8, help="bottom-up to top-down threshold")
    p.add_argument(
        "--lambda", dest="partition_factor", type=int, default=None,
        help="partitions per thread (default: 10 below 2^26 vertices, else 20)",
    )
    p.add_argument("--threads", type=int, default=1)


def _add_rounds(p: _Parser, default_rounds: int) -> None:
    p.add_argument("--rounds", type=int, default=default_rounds, help="sources per run")
    p.add_argument("--seed", type=int, default=1, help="source-sampling seed")
    p.add_argument(
        "--validate", default=True, action=argparse.BooleanOptionalAction,
        help="check every predecessor tree",
    )
    p.add_argument("--reorder", default="none", help="none | rcm | partial:<ratio>")


def build_parser() -> _Parser:
    ap = _Parser(prog="rcmbfs", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic power-law edge list")
    g.add_argument("--scale", type=int, required=True, help="log2 of vertex count")
    g.add_argument("--edgefactor", type=int, default=16, help="edges per vertex")
    g.add_argument("--seed", type=int, default=1)
    g.add_argument(
        "--initiator", type=_parse_initiator, default=DEFAULT_INITIATOR,
        help="a,b,c,d quadrant probabilities (default 0.57,0.19,0.19,0.05)",
    )
    g.add_argument("--out", required=True, metavar="PATH")
    g.add_argument("--format", default="auto", choices=("auto", "text", "binary"))
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("stats", help="structural report on an edge-list file")
    _add_graph_input(s, generate_ok=False)
    s.set_defaults(func=cmd_stats)

    r = sub.add_parser("reorder", help="compute and save a bandwidth-reducing relabeling")
    _add_graph_input(r, generate_ok=False)
    r.add_argument("--method", default="rcm", choices=("rcm", "partial"))
    r.add_argument("--p", type=float, default=None, help="labeled fraction for --method partial")
    r.add_argument("--out", required=True, metavar="PATH", help="permutation output file")
    r.add_argument("--out-graph", metavar="PATH", help="also write the relabeled edge list")
    r.add_argument(
        "--out-graph-format", default="auto", choices=("auto", "text", "binary")
    )
    r.set_defaults(func=cmd_reorder)

    rn = sub.add_parser("run", help="benchmark traversals from sampled sources")
    _add_graph_input(rn, generate_ok=True)
    _add_bfs_params(rn)
    _add_rounds(rn, default_rounds=64)
    rn.add_argument("--out-dir", metavar="DIR", help="write summary.txt/summary.csv/trace.csv")
    rn.add_argument("--save-parents", metavar="PATH", help="dump round 0's predecessor array")
    rn.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="grid-search alpha/beta/lambda on one graph")
    _add_graph_input(sw, generate_ok=True)
    sw.add_argument("--mode", default="hybrid", choices=MODES)
    sw.add_argument("--threads", type=int, default=1)
    _add_rounds(sw, default_rounds=8)
    sw.add_argument("--alphas", type=_parse_int_list, default=[16, 32, 64, 128])
    sw.add_argument("--betas", type=_parse_int_list, default=[4, 8, 16])
    sw.add_argument("--lambdas", type=_parse_int_list, default=[5, 10, 20])
    sw.add_argument("--out", metavar="PATH", help="write the grid as CSV")
    sw.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="check a saved predecessor tree against its graph")
    _add_graph_input(v, generate_ok=False)
    v.add_argument("--parents", required=True, metavar="PATH", help="int32-le predecessor dump")
    v.add_argument("--source", type=int, default=None, help="override the sidecar's source")
    v.set_defaults(func=cmd_validate)
    return ap


# ---------------------------------------------------------------------------
# config files


def _config_args(path: str) -> list[str]:
    try:
        mapping = read_metadata(path)
    except OSError as e:
        raise _IoError(f"cannot read config {path}: {e}") from None
    except ValueError as e:
        raise _IoError(str(e)) from None
    out: list[str] = []
    for k, v in mapping.items():
        flag = k.replace("_", "-")
        low = v.lower()
        if low in ("true", "false"):
            out.append(f"--{flag}" if low == "true" else f"--no-{flag}")
        else:
            out.extend([f"--{flag}", v])
    return out


def _expand_config(argv: list[str]) -> list[str]:
    """Splice config-file options in after the subcommand (CLI flags win)."""
    out: list[str] = []
    injected: list[str] | None = None
    i = 0
    while i < len(argv):
        a = argv[i]
        if a == "--config":
            if i + 1 >= len(argv):
                raise _UsageError("--config needs a file path")
            injected = _config_args(argv[i + 1])
            i += 2
        elif a.startswith("--config="):
            injected = _config_args(a.split("=", 1)[1])
            i += 1
        else:
            out.append(a)
            i += 1
    if injected is None:
        return out
    if not out or out[0].startswith("-"):
        raise _UsageError("--config requires a subcommand before it")
    return [out[0]] + injected + out[1:]


# ---------------------------------------------------------------------------
# command handlers


def _load_graph(args) -> tuple[EdgeList, "object"]:
    if not args.graph:
        raise _UsageError("no --graph file given")
    try:
        el = load_edge_list(args.graph, fmt=args.format, n=args.n)
    except OSError as e:
        raise _IoError(str(e)) from None
    except ValueError as e:
        raise _IoError(str(e)) from None
    return el, build_csr(el)


def cmd_generate(args) -> int:
    params = KroneckerParams(
        scale=args.scale, edgefactor=args.edgefactor,
        initiator=tuple(args.initiator), seed=args.seed,
    )
    el = kronecker_generate(params)
    meta = generator_metadata(params, el)
    try:
        save_edge_list(el, args.out, fmt=args.format, meta=meta)
    except OSError as e:
        raise _IoError(str(e)) from None
    print(f"wrote {args.out} (+{args.out}.meta)")
    print(f"n = {params.n}")
    print(f"m_raw = {el.m_raw}")
    print(f"isolated = {meta['isolated_count']}")
    return 0


def cmd_stats(args) -> int:
    el, g = _load_graph(args)
    deg = g.degrees
    print(f"n = {g.n}")
    print(f"raw_pairs = {el.m_raw}")
    print(f"m_undirected = {g.m_undirected}")
    print(f"m_directed = {g.m_directed}")
    print(f"isolated = {g.isolated_count}")
    print(f"non_isolated = {g.n - g.isolated_count}")
    if g.n:
        nz = deg[deg > 0]
        mean = float(deg.mean()) if g.n else 0.0
        print(f"degree_mean = {mean:.3f}")
        if nz.size:
            p50, p90, p99 = (int(x) for x in np.percentile(nz, [50, 90, 99]))
            print(f"degree_p50 = {p50}")
            print(f"degree_p90 = {p90}")
            print(f"degree_p99 = {p99}")
            print(f"degree_max = {int(deg.max())}")
    print(f"bandwidth = {bandwidth(g)}")
    if g.n:
        labels = Validator(g, edge_list=el).component_labels()
        non_iso = deg > 0
        if non_iso.any():
            sizes = np.bincount(labels[non_iso])
            sizes = np.sort(sizes[sizes > 0])[::-1]
            print(f"components = {sizes.size}")
            print(f"largest_component = {int(sizes[0])}")
            frac = sizes[0] / non_iso.sum()
            print(f"largest_component_fraction = {frac:.4f}")
            top = ", ".join(str(int(s)) for s in sizes[:5])
            print(f"component_sizes_top5 = {top}")
        else:
            print("components = 0")
    # cross-check the sidecar, if one is present
    meta_path = str(args.graph) + ".meta"
    try:
        meta = read_metadata(meta_path)
    except OSError:
        meta = None
    except ValueError as e:
        raise _IoError(str(e)) from None
    if meta and "isolated_count" in meta:
        claimed = int(meta["isolated_count"])
        tag = "matches" if claimed == g.isolated_count else f"MISMATCH, file has {claimed}"
        print(f"sidecar_isolated_count = {claimed} ({tag})")
    return 0


def cmd_reorder(args) -> int:
    el, g = _load_graph(args)
    bw_before = bandwidth(g)
    if args.method == "partial":
        if args.p is None:
            raise _UsageError("--method partial needs --p")
        perm, stats = partial_rcm(g, args.p)
        p_used = args.p
    else:
        perm, stats = rcm(g)
        p_used = 1.0
    g2 = apply_permutation(g, perm)
    try:
        save_permutation(perm, args.out, graph_digest=graph_hash(g), p=p_used)
    except OSError as e:
        raise _IoError(str(e)) from None
    print(f"wrote {args.out} (+{args.out}.meta)")
    print(f"n = {g.n}")
    print(f"n_non_isolated = {stats.n_non_isolated}")
    print(f"n_assigned = {stats.n_assigned}")
    print(f"components_seen = {stats.n_components}")
    print(f"largest_component_fraction = {stats.largest_component_fraction:.4f}")
    print(f"bandwidth_before = {bw_before}")
    print(f"bandwidth_after = {bandwidth(g2)}")
    if args.out_graph:
        src = np.repeat(np.arange(g2.n, dtype=np.int64), np.diff(g2.row_starts))
        keep = src < g2.dst
        pairs = np.stack(
            [src[keep].astype(np.uint32), g2.dst[keep].astype(np.uint32)], axis=1
        )
        out_el = EdgeList(n_declared=g2.n, edges=pairs)
        try:
            save_edge_list(
                out_el, args.out_graph, fmt=args.out_graph_format,
                meta={"reordered_from": str(args.graph), "p": f"{p_used:g}"},
            )
        except OSError as e:
            raise _IoError(str(e)) from None
        print(f"wrote {args.out_graph} (+{args.out_graph}.meta)")
    return 0


def _run_config_from_args(args, out_dir=None, save_parents=None) -> RunConfig:
    gen = None
    if getattr(args, "scale", None) is not None:
        if args.graph:
            raise _UsageError("give either --graph or --scale, not both")
        gen = KroneckerParams(
            scale=args.scale, edgefactor=args.edgefactor,
            initiator=tuple(args.initiator), seed=args.gen_seed,
        )
    elif not args.graph:
        raise _UsageError("need a graph: --graph PATH or --scale N")
    parse_reorder(args.reorder)
    lam = getattr(args, "partition_factor", None)
    if lam is None:
        if gen is not None:
            lam = default_partition_factor(gen.n)
        else:
            lam = default_partition_factor(_peek_n(args))
    params = BfsParams(
        alpha=getattr(args, "alpha", 64), beta=getattr(args, "beta", 8),
        partition_factor=lam, threads=args.threads, mode=args.mode,
    )
    return RunConfig(
        generate=gen, graph_path=args.graph, graph_format=args.format,
        n_vertices=args.n, reorder=args.reorder, params=params,
        rounds=args.rounds, seed=args.seed, validate=args.validate,
        out_dir=out_dir, save_parents=save_parents,
    )


def _peek_n(args) -> int:
    """Vertex count of a graph file without parsing the edges."""
    if args.n is not None:
        return args.n
    try:
        meta = read_metadata(str(args.graph) + ".meta")
        if "n" in meta:
            return int(meta["n"])
    except (OSError, ValueError):
        pass
    try:
        el = load_edge_list(args.graph, fmt=args.format, n=args.n)
    except OSError as e:
        raise _IoError(str(e)) from None
    except ValueError as e:
        raise _IoError(str(e)) from None
    return el.n_declared


def cmd_run(args) -> int:
    cfg = _run_config_from_args(
        args, out_dir=args.out_dir, save_parents=args.save_parents
    )
    try:
        summary = run_benchmark(cfg)
    except OSError as e:
        raise _IoError(str(e)) from None
    except ValueError as e:
        raise _IoError(str(e)) from None
    print(summary.as_text())
    return 0


def cmd_sweep(args) -> int:
    cfg = _run_config_from_args(args)
    try:
        rows, best = sweep(cfg, args.alphas, args.betas, args.lambdas)
    except OSError as e:
        raise _IoError(str(e)) from None
    except ValueError as e:
        raise _IoError(str(e)) from None
    print(f"{'alpha':>6} {'beta':>5} {'lambda':>6} {'median_teps':>12} {'hmean_teps':>12}")
    for r in rows:
        print(
            f"{r['alpha']:>6} {r['beta']:>5} {r['lambda']:>6} "
            f"{r['median_teps']:>12.4e} {r['hmean_teps']:>12.4e}"
        )
    print(
        f"best: alpha={best['alpha']} beta={best['beta']} "
        f"lambda={best['lambda']} median_teps={best['median_teps']:.4e}"
    )
    if args.out:
        import csv as _csv

        try:
            with open(args.out, "w", newline="") as f:
                w = _csv.writer(f)
                w.writerow(
                    ["alpha", "beta", "lambda", "median_teps", "hmean_teps",
                     "min_teps", "max_teps"]
                )
                for r in rows:
                    w.writerow(
                        [r["alpha"], r["beta"], r["lambda"],
                         f"{r['median_teps']:.6e}", f"{r['hmean_teps']:.6e}",
                         f"{r['min_teps']:.6e}", f"{r['max_teps']:.6e}"]
                    )
        except OSError as e:
            raise _IoError(str(e)) from None
        print(f"wrote {args.out}")
    return 0


def cmd_validate(args) -> int:
    el, g = _load_graph(args)
    try:
        parent = np.fromfile(args.parents, dtype="<i4")
    except OSError as e:
        raise _IoError(str(e)) from None
    if parent.size != g.n:
        raise _IoError(
            f"{args.parents}: holds {parent.size} entries but the graph has {g.n} vertices"
        )
    source = args.source
    if source is None:
        try:
            meta = read_metadata(str(args.parents) + ".meta")
        except OSError:
            meta = {}
        except ValueError as e:
            raise _IoError(str(e)) from None
        if "source" in meta:
            source = int(meta["source"])
    if source is None:
        raise _UsageError("no --source given and no source in the parents sidecar")
    report = Validator(g, edge_list=el).validate(source, parent.astype(np.int32))
    print(report.as_text())
    return 0 if report.passed else 2


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _expand_config(argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)
        return args.func(args)
    except ValidationFailure as e:
        print(str(e), file=sys.stderr)
        return 2
    except _UsageError as e:
        print(f"rcmbfs: error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        # bad parameter values (alpha range, initiator sums, ...) are usage
        print(f"rcmbfs: error: {e}", file=sys.stderr)
        return 1
    except _IoError as e:
        print(f"rcmbfs: error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
