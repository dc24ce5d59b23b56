"""File-in/file-out command line: generate, learn, verify, benchmark.

Exit codes: 0 success, 2 usage, 3 degenerate data or bad input files,
4 verification failure. Every command writes a manifest.json next to its
outputs; all randomness flows from --seed through named substreams.
"""
from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ci import CachingOracle, DegenerateInputError, GaussianCITester, GraphOracle
from .equivalence import is_maximal
from .graphs import load_graph, save_graph
from .search import (
    INIT_EMPTY,
    INIT_MIN_DEGREE,
    SearchAborted,
    SearchConfig,
    run_restarts,
)
from .simulate import (
    SimulationSpec,
    aggregate_rows,
    rows_to_csv,
    run_benchmark,
    sample_data,
    sample_projected_dmag,
)
from .rng import substream
from .verify import (
    check_closure,
    check_conjecture,
    check_gpi_minimality,
    check_imap_filter,
    check_mec_fixed_points,
    check_separation_oracle,
    check_sparsest_poset,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_VERIFY = 4

_SUITES = (
    "sparsest-poset",
    "minimal-imap",
    "mec-fixed-point",
    "conjecture",
    "separation-oracle",
    "closure",
)


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _write_manifest(
    out_dir: Path, command: str, args: argparse.Namespace, started: str,
    inputs: list[str], outputs: list[str],
) -> None:
    config = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in sorted(vars(args).items())
        if k not in ("command", "func")
    }
    doc = {
        "command": command,
        "config": config,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "inputs": inputs,
        "outputs": outputs,
        "started": started,
        "finished": _now(),
    }
    (out_dir / "manifest.json").write_text(json.dumps(doc, indent=2) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _positive(kind):
    def parse(text: str):
        value = kind(text)
        if value < 1:
            raise argparse.ArgumentTypeError("must be at least 1")
        return value

    return parse


# -- commands ---------------------------------------------------------------------


def _cmd_generate(args) -> int:
    started = _now()
    spec = SimulationSpec(
        observed=args.nodes,
        latents=args.latents,
        expected_neighbors=args.expected_neighbors,
        samples=args.samples,
        seed=args.seed,
    )
    out = _out_dir(args)
    wd, dmag = sample_projected_dmag(spec, replicate=0)
    labels = [f"h{i}" for i in range(spec.latents)] + [
        f"x{i}" for i in range(spec.observed)
    ]
    obs_labels = labels[spec.latents :]
    save_graph(wd.dag, out / "true_dag.json", labels)
    save_graph(dmag, out / "true_dmag.json", obs_labels)
    outputs = ["true_dag.json", "true_dmag.json"]
    if spec.samples > 0:
        data = sample_data(wd, spec.samples, substream(spec.seed, "noise", 0))
        np.savetxt(
            out / "data.csv",
            data[:, spec.latents :],
            delimiter=",",
            comments="",
            header=",".join(obs_labels),
            fmt="%.17g",
        )
        outputs.append("data.csv")
    _write_manifest(out, "generate", args, started, [], outputs)
    print(f"wrote {', '.join(outputs)} to {out}")
    return EXIT_OK


def _load_data_csv(path: str) -> tuple[np.ndarray, list[str]]:
    with open(path) as fh:
        header = fh.readline().strip()
    labels = [x.strip() for x in header.split(",") if x.strip()]
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(labels):
        raise ValueError("data column count does not match the header")
    return data, labels


def _cmd_learn(args, parser: argparse.ArgumentParser) -> int:
    if (args.data is None) == (args.true_graph is None):
        parser.error("exactly one of --data or --true-graph is required")
    if args.data is not None and args.alpha is None:
        parser.error("--alpha is required with --data")
    started = _now()
    out = _out_dir(args)
    init = INIT_MIN_DEGREE if args.init == "md" else INIT_EMPTY
    config = SearchConfig(
        depth=args.depth,
        restarts=args.restarts,
        initialization=init,
        rng_seed=args.seed,
        max_steps=args.max_steps,
    )
    inputs = [args.data or args.true_graph]
    try:
        if args.data is not None:
            data, labels = _load_data_csv(args.data)
            oracle = CachingOracle(GaussianCITester.from_data(data, args.alpha))
        else:
            graph, labels = load_graph(args.true_graph)
            if not (graph.is_ancestral() and is_maximal(graph)):
                raise ValueError("--true-graph must be a maximal ancestral graph")
            oracle = CachingOracle(GraphOracle(graph))
        outcome = run_restarts(oracle, config)
    except DegenerateInputError as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SearchAborted as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, OSError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_DATA
    save_graph(outcome.graph, out / "learned_graph.json", labels)
    (out / "trace.jsonl").write_text(outcome.trace.to_jsonl())
    _write_manifest(
        out, "learn", args, started, inputs, ["learned_graph.json", "trace.jsonl"]
    )
    print(
        f"learned graph with {outcome.graph.num_edges} edges "
        f"({oracle.queries} CI queries)"
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    started = _now()
    out = _out_dir(args)
    seed = args.seed

    def pick(value, default):
        return default if value is None else value

    if args.suite == "sparsest-poset":
        results = [
            check_sparsest_poset(pick(args.nodes, 4), pick(args.graphs, 50), seed)
        ]
    elif args.suite == "minimal-imap":
        results = [
            check_imap_filter(pick(args.graphs, 25), seed),
            check_gpi_minimality(pick(args.pairs, 1000), seed),
        ]
    elif args.suite == "mec-fixed-point":
        results = [
            check_mec_fixed_points(pick(args.graphs, 100), pick(args.pairs, 1000), seed)
        ]
    elif args.suite == "conjecture":
        results = [
            check_conjecture(
                runs=pick(args.graphs, 500),
                seed=seed,
                max_observed=pick(args.nodes, 8),
                depth=args.depth,
                restarts=args.restarts,
                dump_dir=out,
                jobs=args.jobs,
            )
        ]
    elif args.suite == "separation-oracle":
        results = [
            check_separation_oracle(pick(args.queries, 10000), pick(args.nodes, 7), seed)
        ]
    else:
        results = [check_closure(pick(args.nodes, 5), pick(args.graphs, 200), seed)]
    outputs = ["report.json"]
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{res.suite}: {status} ({res.checked} checks, {len(res.failures)} failures)")
        for line in res.failures[:10]:
            print(f"  {line}")
        outputs.extend(res.details.get("dumped", []))
    report = {"suite": args.suite, "results": [r.to_json() for r in results]}
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    _write_manifest(out, "verify", args, started, [], outputs)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def _cmd_benchmark(args) -> int:
    started = _now()
    out = _out_dir(args)
    spec = SimulationSpec(
        observed=args.nodes,
        latents=args.latents,
        expected_neighbors=args.expected_neighbors,
        seed=args.seed,
    )
    init = INIT_MIN_DEGREE if args.init == "md" else INIT_EMPTY
    config = SearchConfig(
        depth=args.depth,
        restarts=args.restarts,
        initialization=init,
        rng_seed=args.seed,
        max_steps=args.max_steps,
    )
    alphas = args.alphas or [
        float(a) for a in np.logspace(-10, math.log10(0.7), 8)
    ]
    sizes = args.sample_sizes or [10000]
    rows = run_benchmark(spec, config, alphas, sizes, args.replicates, jobs=args.jobs)
    (out / "results.csv").write_text(rows_to_csv(rows))
    (out / "aggregates.json").write_text(
        json.dumps(aggregate_rows(rows), indent=2) + "\n"
    )
    _write_manifest(
        out, "benchmark", args, started, [], ["results.csv", "aggregates.json"]
    )
    errors = sum(1 for r in rows if r.error)
    print(f"{len(rows)} rows ({errors} errors) written to {out}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gspo",
        description="Greedy sparsest-poset causal discovery with latent confounders.",
    )
    parser.add_argument("--version", action="version", version=f"gspo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="sample a ground-truth model and data")
    gen.add_argument("--nodes", type=_positive(int), required=True,
                     help="observed variable count")
    gen.add_argument("--latents", type=int, default=0)
    gen.add_argument("--expected-neighbors", type=float, default=3.0)
    gen.add_argument("--samples", type=int, default=0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=".")

    learn = sub.add_parser("learn", help="run the greedy sparsest-poset search")
    learn.add_argument("--data", help="CSV of samples (header row of labels)")
    learn.add_argument("--alpha", type=float, help="test level for --data mode")
    learn.add_argument("--true-graph", help="graph JSON for oracle mode")
    learn.add_argument("--depth", type=_positive(int), default=4)
    learn.add_argument("--restarts", type=_positive(int), default=5)
    learn.add_argument("--init", choices=("empty", "md"), default="empty")
    learn.add_argument("--max-steps", type=_positive(int), default=None)
    learn.add_argument("--seed", type=int, default=0)
    learn.add_argument("--out", default=".")

    ver = sub.add_parser("verify", help="run an exact verification suite")
    ver.add_argument("--suite", choices=_SUITES, required=True)
    ver.add_argument("--nodes", type=_positive(int), default=None)
    ver.add_argument("--graphs", type=_positive(int), default=None)
    ver.add_argument("--pairs", type=_positive(int), default=None)
    ver.add_argument("--queries", type=_positive(int), default=None)
    ver.add_argument("--depth", type=_positive(int), default=4)
    ver.add_argument("--restarts", type=_positive(int), default=5)
    ver.add_argument("--jobs", type=_positive(int), default=1)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out", default=".")

    bench = sub.add_parser("benchmark", help="sweep alphas and sample sizes")
    bench.add_argument("--nodes", type=_positive(int), default=10)
    bench.add_argument("--latents", type=int, default=3)
    bench.add_argument("--expected-neighbors", type=float, default=3.0)
    bench.add_argument("--replicates", type=_positive(int), default=100)
    bench.add_argument("--alphas", type=_float_list, default=None,
                       help="comma-separated; default 8 points in [1e-10, 0.7]")
    bench.add_argument("--sample-sizes", type=_int_list, default=None,
                       help="comma-separated; default 10000")
    bench.add_argument("--depth", type=_positive(int), default=4)
    bench.add_argument("--restarts", type=_positive(int), default=5)
    bench.add_argument("--init", choices=("empty", "md"), default="md")
    bench.add_argument("--max-steps", type=_positive(int), default=None)
    bench.add_argument("--jobs", type=_positive(int), default=1)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default=".")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "generate":
        return _cmd_generate(args)
    if args.command == "learn":
        return _cmd_learn(args, parser)
    if args.command == "verify":
        return _cmd_verify(args)
    return _cmd_benchmark(args)


if __name__ == "__main__":
    sys.exit(main())
