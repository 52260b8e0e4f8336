"""Command-line entry point: ``rolesim <subcommand> [flags]``.

Data goes to files; stdout carries a short human-readable summary. Each
output file gets a ``<output>.manifest.json`` next to it recording the
command, resolved parameters, inputs, wall time and iteration summary.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .baselines import MEASURES, BaselineConfig
from .core import (
    DEFAULT_BETA,
    DEFAULT_MAX_ITERS,
    DEFAULT_MAX_NODES,
    DEFAULT_REL_TOL,
    INIT_SCHEMES,
    RoleSimConfig,
    SimilarityMatrix,
    compute_rolesim,
    read_matrix,
    write_matrix,
)
from .equivalence import (
    BINARY,
    COUNTED,
    DEFAULT_ORBIT_CAP,
    automorphism_orbits_bruteforce,
    degree_seed,
    is_equitable,
    is_regular,
    refine_partition,
    structural_classes,
)
from .evaluate import check_axioms, pearson, percentile_ranks, topk_pairs, within_block_avg_rank
from .graph import (
    BlockSpec,
    Partition,
    generate_block_model,
    generate_scale_free,
    k_shell_decomposition,
    random_block_spec,
    read_graph,
    write_graph,
)
from .iceberg import IcebergConfig, IcebergTable, compute_iceberg
from .matching import MODES

THREADS_ENV = "ROLESIM_THREADS"
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2

logger = logging.getLogger("rolesim")


class CliError(Exception):
    pass


# --- helpers ------------------------------------------------------------------


def _resolve_threads(flag: Optional[int]) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _apply_threads(n: int) -> int:
    import numba

    if n < 1:
        raise CliError("--threads must be >= 1")
    n = min(n, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(n)
    return n


def _write_manifest(out: Path, args: argparse.Namespace, started: float, extra: dict) -> None:
    params = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "tool_version": __version__,
        "command": args.command,
        "argv": sys.argv[1:],
        "parameters": params,
        "output": str(out),
        "wall_time_s": round(time.perf_counter() - started, 6),
        **extra,
    }
    with open(str(out) + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)


def _need_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"no such file: {path}")
    return p


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated numbers, got {text!r}") from None


def _load_scores(path: str):
    """Matrix file (binary or CSV) or an iceberg table CSV."""
    p = _need_file(path)
    with open(p, "rb") as fh:
        head = fh.read(9)
    if head.startswith(b"# iceberg"):
        return IcebergTable.read_csv(p)
    return read_matrix(p)


# --- subcommands -----------------------------------------------------------------


def cmd_gen_block(args, started):
    if args.sizes:
        sizes = [int(x) for x in _floats(args.sizes)]
        flat = _floats(args.probs or "")
        k = len(sizes)
        if len(flat) != k * k:
            raise CliError(f"--probs needs {k * k} values (row-major {k}x{k} matrix)")
        spec = BlockSpec(sizes, np.array(flat).reshape(k, k), args.seed)
    else:
        spec = random_block_spec(args.n, args.blocks, args.density, args.seed)
    g, blocks = generate_block_model(spec)
    out = Path(args.out)
    write_graph(g, out)
    blocks_out = Path(args.blocks_out or str(out) + ".blocks.csv")
    blocks.to_csv(blocks_out)
    extra = {"block_sizes": spec.sizes, "P": spec.P.tolist(), "sample_seed": spec.seed,
             "nodes": g.n, "edges": g.num_edges, "blocks_file": str(blocks_out)}
    _write_manifest(out, args, started, extra)
    print(f"block model: {g.n} nodes, {g.num_edges} edges, sizes {spec.sizes} -> {out}")


def cmd_gen_sf(args, started):
    g = generate_scale_free(args.n, args.m, args.seed)
    out = Path(args.out)
    write_graph(g, out)
    _write_manifest(out, args, started, {"nodes": g.n, "edges": g.num_edges})
    print(f"scale-free graph: {g.n} nodes, {g.num_edges} edges -> {out}")


def cmd_rolesim(args, started):
    g = read_graph(_need_file(args.graph))
    cfg = RoleSimConfig(beta=args.beta, init=args.init, matching=args.matching,
                        rel_tol=args.rel_tol, max_iters=args.max_iters,
                        convergence=args.convergence, max_nodes=args.max_nodes)
    m, rep = compute_rolesim(g, cfg)
    out = Path(args.out)
    write_matrix(m, out)
    _write_manifest(out, args, started, {"nodes": g.n, "report": rep.summary(), "deltas": rep.deltas})
    state = "converged" if rep.converged else "stopped at the iteration cap"
    print(f"rolesim: {g.n} nodes, {rep.iterations} iterations, {state} -> {out}")


def cmd_iceberg(args, started):
    g = read_graph(_need_file(args.graph))
    cfg = IcebergConfig(theta=args.theta, beta=args.beta, alpha=args.alpha,
                        matching=args.matching, rel_tol=args.rel_tol, max_iters=args.max_iters)
    table, rep = compute_iceberg(g, cfg)
    out = Path(args.out)
    table.to_csv(out, cfg)
    extra = {"nodes": g.n, "pairs": len(table), "fraction": table.fraction_of_pairs(),
             "report": rep.summary()}
    _write_manifest(out, args, started, extra)
    print(f"iceberg: {len(table)} pairs ({100 * table.fraction_of_pairs():.3f}% of all), "
          f"{rep.iterations} iterations -> {out}")


def cmd_baseline(args, started):
    g = read_graph(_need_file(args.graph))
    cfg = BaselineConfig(decay=args.decay, rel_tol=args.rel_tol, max_iters=args.max_iters,
                         max_nodes=args.max_nodes)
    m, rep = MEASURES[args.command](g, cfg)
    out = Path(args.out)
    write_matrix(m, out)
    _write_manifest(out, args, started, {"nodes": g.n, "report": rep.summary()})
    print(f"{args.command}: {g.n} nodes, {rep.iterations} iterations -> {out}")


def cmd_equiv(args, started):
    g = read_graph(_need_file(args.graph))
    extra: dict = {"nodes": g.n}
    if args.mode == "verify":
        if not args.partition:
            raise CliError("equiv verify needs --partition")
        p = Partition.read_csv(_need_file(args.partition))
        if p.n != g.n:
            raise CliError("partition size does not match the graph")
        eq, reg = is_equitable(g, p), is_regular(g, p)
        print(f"equitable: {'yes' if eq else 'no'}")
        print(f"regular: {'yes' if reg else 'no'}")
        return EXIT_OK
    if args.mode == "structural":
        p = structural_classes(g)
    elif args.mode == "refine":
        if args.seed_partition:
            seed = Partition.read_csv(_need_file(args.seed_partition))
        elif args.degree_bands is not None:
            bands = [int(x) for x in _floats(args.degree_bands)] if args.degree_bands else None
            seed = degree_seed(g, bands)
        else:
            seed = Partition(np.zeros(g.n, dtype=np.int64))
        p = refine_partition(g, seed, args.spectrum)
    else:
        p = automorphism_orbits_bruteforce(g, args.max_nodes)
    if args.out:
        out = Path(args.out)
        p.to_csv(out)
        extra["classes"] = p.k
        _write_manifest(out, args, started, extra)
    for cls in p.classes():
        if len(cls) > 1 or args.show_singletons:
            print(" ".join(str(int(g.labels[v])) for v in cls))
    print(f"{p.k} classes over {g.n} nodes")
    return EXIT_OK


def cmd_kshell(args, started):
    g = read_graph(_need_file(args.graph))
    core = k_shell_decomposition(g)
    out = Path(args.out)
    with open(out, "w") as fh:
        fh.write("node,shell\n")
        for v, c in enumerate(core.tolist()):
            fh.write(f"{v},{c}\n")
    _write_manifest(out, args, started, {"nodes": g.n, "max_shell": int(core.max()) if g.n else 0})
    print(f"kshell: max shell {int(core.max()) if g.n else 0} -> {out}")


def cmd_axioms(args, started):
    m = read_matrix(_need_file(args.matrix))
    orbits = Partition.read_csv(_need_file(args.orbits)) if args.orbits else None
    rep = check_axioms(m, orbits, tol=args.tol)
    for line in rep.lines():
        print(line)
    if args.out:
        out = Path(args.out)
        rep.to_csv(out)
        _write_manifest(out, args, started, {"all_passed": rep.all_passed})
    return EXIT_OK if rep.all_passed else EXIT_CHECK_FAILED


def cmd_eval_blocks(args, started):
    blocks = Partition.read_csv(_need_file(args.blocks))
    rows = []
    for item in args.matrix:
        name, _, path = item.rpartition("=")
        name = name or Path(path).stem
        m = read_matrix(_need_file(path))
        rep = within_block_avg_rank(m, blocks)
        rows.append((name, rep))
        print(f"{name}: overall within-block percentile {rep.overall:.4f}")
    if args.out:
        out = Path(args.out)
        with open(out, "w") as fh:
            fh.write("measure,block,avg_percentile\n")
            for name, rep in rows:
                for b, v in sorted(rep.per_block.items()):
                    fh.write(f"{name},{b},{v!r}\n")
                fh.write(f"{name},overall,{rep.overall!r}\n")
        _write_manifest(out, args, started, {"overall": {n: r.overall for n, r in rows}})


def cmd_rank_compare(args, started):
    a = read_matrix(_need_file(args.a))
    b = read_matrix(_need_file(args.b))
    if a.n != b.n:
        raise CliError(f"matrices differ in size: {a.n} vs {b.n}")
    ra, rb = percentile_ranks(a.upper()), percentile_ranks(b.upper())
    r = pearson(ra, rb)
    print(f"pearson of percentile ranks: {r:.6f} over {ra.size} pairs")
    if args.out:
        out = Path(args.out)
        with open(out, "w") as fh:
            fh.write("a,b,pairs,pearson\n")
            fh.write(f"{args.a},{args.b},{ra.size},{r!r}\n")
        _write_manifest(out, args, started, {"pearson": r})


def cmd_topk(args, started):
    src = _load_scores(args.scores)
    pairs = topk_pairs(src, args.k)
    if args.out:
        out = Path(args.out)
        with open(out, "w") as fh:
            fh.write("u,v,score\n")
            for u, v, s in pairs:
                fh.write(f"{u},{v},{s!r}\n")
        _write_manifest(out, args, started, {"returned": len(pairs)})
    else:
        for u, v, s in pairs:
            print(f"{u},{v},{s:.6f}")


# --- parser ----------------------------------------------------------------------


def _iteration_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rolesim", description="Role similarity toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default: ${THREADS_ENV}, else all cores)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-block", help="sample a block-model graph")
    p.add_argument("--sizes", help="comma-separated block sizes")
    p.add_argument("--probs", help="row-major k*k link probabilities, comma-separated")
    p.add_argument("--n", type=int, default=1000, help="node count when sizes are drawn at random")
    p.add_argument("--blocks", type=int, default=3, help="block count when sizes are drawn at random")
    p.add_argument("--density", type=float, default=2.0, help="target edges per node when probabilities are drawn at random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--blocks-out", help="planted partition CSV (default: <out>.blocks.csv)")
    p.set_defaults(func=cmd_gen_block)

    p = sub.add_parser("gen-sf", help="sample a preferential-attachment graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_sf)

    p = sub.add_parser("rolesim", help="full RoleSim matrix")
    p.add_argument("--graph", required=True)
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--init", choices=INIT_SCHEMES, default="degree-ratio")
    p.add_argument("--matching", choices=MODES, default="exact")
    p.add_argument("--convergence", choices=("relative", "absolute"), default="relative")
    p.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    _iteration_flags(p)
    p.add_argument("--out", required=True, help="*.csv for text, anything else for binary")
    p.set_defaults(func=cmd_rolesim)

    p = sub.add_parser("iceberg", help="pairs scoring at least theta")
    p.add_argument("--graph", required=True)
    p.add_argument("--theta", type=float, default=0.9)
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--matching", choices=MODES, default="exact")
    _iteration_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_iceberg)

    for name, helptext in (("simrank", "SimRank matrix"), ("simrankpp", "SimRank++ matrix"),
                           ("psimrank", "P-SimRank matrix")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--graph", required=True)
        p.add_argument("--decay", type=float, default=DEFAULT_BETA)
        p.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
        _iteration_flags(p)
        p.add_argument("--out", required=True)
        p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("equiv", help="equivalence partitions")
    p.add_argument("mode", choices=("structural", "refine", "orbits", "verify"))
    p.add_argument("--graph", required=True)
    p.add_argument("--spectrum", choices=(COUNTED, BINARY), default=COUNTED)
    p.add_argument("--seed-partition", help="starting partition CSV for refine")
    p.add_argument("--degree-bands", nargs="?", const="",
                   help="seed refine by degree; optional ascending band edges, e.g. 3,5")
    p.add_argument("--partition", help="partition CSV to verify")
    p.add_argument("--max-nodes", type=int, default=DEFAULT_ORBIT_CAP, help="orbit search cap")
    p.add_argument("--show-singletons", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("kshell", help="K-shell index of every node")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_kshell)

    p = sub.add_parser("axioms", help="check a matrix against the role axioms")
    p.add_argument("--matrix", required=True)
    p.add_argument("--orbits", help="orbit partition CSV")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", help="CSV report")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("eval-blocks", help="within-block average percentile")
    p.add_argument("--matrix", action="append", required=True, help="[name=]path, repeatable")
    p.add_argument("--blocks", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval_blocks)

    p = sub.add_parser("rank-compare", help="Pearson of percentile ranks of two matrices")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rank_compare)

    p = sub.add_parser("topk", help="highest-scoring pairs of a matrix or iceberg table")
    p.add_argument("--scores", required=True)
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_topk)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        args.threads = _apply_threads(_resolve_threads(args.threads))
        status = args.func(args, started)
    except (CliError, ValueError, RuntimeError, OSError) as exc:
        print(f"rolesim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if status is None else status


if __name__ == "__main__":
    sys.exit(main())
