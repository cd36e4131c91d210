"""Command-line surface: instance generation, solves, iteration sweeps,
oracle verification suites and qubit reports.

Results are machine-readable (JSON for solves, CSV for sweeps, a plain
text format for graphs) and byte-identical across runs with the same
seed.  Each output file gets a sidecar `<name>.manifest.json` recording
the command, configuration echo and wall-clock timings; the manifest is
the one artifact excluded from the byte-identity contract because it
carries timings.

Exit codes: 0 success, 2 usage error, 3 resource limit, 4 no Hamiltonian
cycle, 5 solution failed verification against brute force, 1 any other
failure (including failed verify suites).

Environment overrides (nothing else is read from the environment):
GQTSP_SEED for the default --seed, GQTSP_MAX_QUBITS for the simulator
memory bound.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

import gqtsp
from gqtsp.budget import QubitBudget
from gqtsp.errors import NoHamiltonianCycleError, ResourceLimitError
from gqtsp.gas import GasConfig, GqtspLayout, run_fixed, run_gqtsp
from gqtsp.tsp import (
    brute_force_best,
    load_graph,
    normalize_phases,
    random_euclidean_graph,
    save_graph,
)
from gqtsp.verify import verify_clc, verify_hcd, verify_mcx, verify_qaqr

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_NO_CYCLE = 4
EXIT_MISMATCH = 5


def _default_seed() -> int:
    return int(os.environ.get("GQTSP_SEED", "0"))


def _write_manifest(out_path: str, command: str, config: dict, seed: int,
                    started: float, outputs: list[str]) -> None:
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "artifact_version": gqtsp.__version__,
        "timings": {"wall_s": time.time() - started},
        "outputs": outputs,
    }
    with open(out_path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    started = time.time()
    try:
        graph = random_euclidean_graph(args.n, args.d, args.seed,
                                       squared=args.squared)
    except (ValueError, NoHamiltonianCycleError) as exc:
        print(f"gen: {exc}", file=sys.stderr)
        return EXIT_NO_CYCLE if isinstance(exc, NoHamiltonianCycleError) else EXIT_USAGE
    save_graph(graph, args.out)
    best_word, best_cost, ranked = brute_force_best(graph)
    if ranked:
        print(f"wrote {args.out}: N={args.n} d={graph.degree} "
              f"edges={int(np.isfinite(graph.costs).sum()) // 2}")
        print(f"brute-force optimum: tour {list(ranked[0].tour)} cost {best_cost:.6f} "
              f"({len(ranked)} directed cycles)")
    else:
        print(f"wrote {args.out}: no Hamiltonian cycle exists")
    _write_manifest(args.out, "gen", {"n": args.n, "d": args.d,
                                      "squared": args.squared},
                    args.seed, started, [args.out])
    return EXIT_OK


def cmd_solve(args) -> int:
    started = time.time()
    graph = load_graph(args.graph)
    n = graph.n_cities
    if n >= 6 and not args.allow_large:
        print(f"solve: N={n} needs a {QubitBudget(n, graph.degree, args.t).total_sparse}"
              "-qubit statevector; pass --allow-large to proceed", file=sys.stderr)
        return EXIT_RESOURCE
    config = GasConfig(graph, t=args.t, shots=args.shots, seed=args.seed,
                       rounds=args.rounds, iterations=args.iterations,
                       objective=args.objective)
    try:
        result = run_gqtsp(config)
    except NoHamiltonianCycleError as exc:
        print(f"solve: {exc}", file=sys.stderr)
        return EXIT_NO_CYCLE
    except ResourceLimitError as exc:
        print(f"solve: {exc}", file=sys.stderr)
        return EXIT_RESOURCE

    verified = None
    optimum = None
    if n <= 10:
        _, best_cost, ranked = brute_force_best(graph)
        if ranked:
            optimum = best_cost
            better = ((lambda a, b: a <= b + 1e-9) if args.objective == "min"
                      else (lambda a, b: a >= b - 1e-9))
            target = best_cost if args.objective == "min" else max(r.cost for r in ranked)
            verified = better(result.best_cost, target)

    payload = {
        "graph": args.graph,
        "objective": args.objective,
        "tour": list(result.best_tour) if result.best_tour else None,
        "word": list(result.best_word) if result.best_word else None,
        "cost": result.best_cost,
        "verified_optimal": verified,
        "brute_force_cost": optimum,
        "threshold_history": result.threshold_history,
        "incumbent_history": result.incumbent_history,
        "rounds_run": result.rounds_run,
        "iterations_per_round": result.iterations_per_round,
        "counts": result.counts,
        "qubit_total": result.qubit_total,
        "step_gate_counts": result.step_gate_counts,
        "i_opt_estimate": result.i_opt_estimate,
        "marked_count_final": result.marked_count,
        "warnings": result.warnings,
        "seed": args.seed,
        "t": args.t,
        "shots": args.shots,
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        _write_manifest(args.out, "solve",
                        {"graph": args.graph, "t": args.t, "shots": args.shots,
                         "rounds": args.rounds, "iterations": args.iterations,
                         "objective": args.objective},
                        args.seed, started, [args.out])
    else:
        sys.stdout.write(text)
    if verified is False:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_sweep(args) -> int:
    started = time.time()
    graph = load_graph(args.graph)
    n = graph.n_cities
    if n >= 6 and not args.allow_large:
        print(f"sweep: N={n} full statevector runs need --allow-large",
              file=sys.stderr)
        return EXIT_RESOURCE
    layout = GqtspLayout(graph, args.t)
    if args.threshold is not None:
        threshold = args.threshold
    else:
        if n > 10:
            print("sweep: --threshold is required for N > 10", file=sys.stderr)
            return EXIT_USAGE
        _, _, ranked = brute_force_best(graph)
        if not ranked:
            print("sweep: no Hamiltonian cycle in the graph", file=sys.stderr)
            return EXIT_NO_CYCLE
        # isolate the optimum: threshold at the runner-up undirected cycle
        phases = layout.phases
        buckets = sorted({phases.quantize(r.word) for r in ranked}, reverse=True)
        threshold = buckets[1] if len(buckets) > 1 else buckets[0]
    try:
        _, curve, _ = run_fixed(layout, threshold, args.max_iters)
    except ResourceLimitError as exc:
        print(f"sweep: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    lines = ["iteration,p1,p2,p3"]
    for k, (p1, p2, p3) in enumerate(curve):
        lines.append(f"{k},{p1!r},{p2!r},{p3!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        _write_manifest(args.out, "sweep",
                        {"graph": args.graph, "t": args.t,
                         "max_iters": args.max_iters, "threshold": threshold},
                        args.seed, started, [args.out])
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    rng_seeds = {n: args.seed + i for i, n in enumerate(_parse_range(args.n_range))}
    reports = []
    if args.suite == "hcd":
        for n, seed in rng_seeds.items():
            graph = random_euclidean_graph(n, min(4, n - 1), seed=seed)
            reports.append(verify_hcd(graph))
    elif args.suite == "clc":
        for n, seed in rng_seeds.items():
            from gqtsp.tsp import random_integer_graph
            reports.append(verify_clc(random_integer_graph(n, seed=seed),
                                      t=args.t))
    elif args.suite == "mcx":
        reports.append(verify_mcx(_parse_range(args.n_range)))
    elif args.suite == "qaqr":
        for n in _parse_range(args.n_range):
            reports.append(verify_qaqr(address_bits=n, seed=args.seed))
    else:
        print(f"verify: unknown suite {args.suite!r}", file=sys.stderr)
        return EXIT_USAGE
    failed = False
    for report in reports:
        print(report.line())
        for ce in report.counterexamples[:10]:
            print(f"  counterexample: {ce}")
        failed = failed or not report.ok
    return EXIT_FAILURE if failed else EXIT_OK


def cmd_qubits(args) -> int:
    rows = [QubitBudget(n, args.d, args.t) for n in _parse_range(args.n_range)]
    header = (f"{'N':>3} {'n':>3} {'loc':>4} {'chk':>4} {'pool':>5} "
              f"{'sparse':>7} {'dense':>6} {'naive':>6} {'~asym':>7}  decomposition")
    print(header)
    for b in rows:
        parts = b.sparse_decomposition()
        decomp = "+".join(str(p) for p in parts) + f"={sum(parts)}"
        if sum(parts) != b.total_sparse:
            decomp += f" (pool padded to {b.pool} for the length oracle)"
        print(f"{b.n_cities:>3} {b.n:>3} {b.location_qubits:>4} "
              f"{b.check_qubits:>4} {b.pool:>5} {b.total_sparse:>7} "
              f"{b.total_dense:>6} {b.total_naive:>6} "
              f"{b.asymptotic_estimate:>7.1f}  {decomp}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gqtsp",
        description="Grover-adaptive-search TSP solver on a statevector simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random Euclidean instance")
    p.add_argument("n", type=int, help="number of cities")
    p.add_argument("d", type=int, help="maximum degree after pruning")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--squared", action="store_true",
                   help="use squared Euclidean distances")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the full adaptive search")
    p.add_argument("graph")
    p.add_argument("--t", type=int, default=6, help="QPE precision qubits")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--rounds", type=int, default=5)
    p.add_argument("--iterations", type=int, default=None,
                   help="Grover iterations per round (default: fixed schedule)")
    p.add_argument("--objective", choices=["min", "max"], default="min")
    p.add_argument("--allow-large", action="store_true",
                   help="permit N >= 6 full statevector runs")
    p.add_argument("--out", default=None, help="result JSON path (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="per-iteration top-3 probabilities (CSV)")
    p.add_argument("graph")
    p.add_argument("--max-iters", type=int, default=16)
    p.add_argument("--t", type=int, default=6)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--threshold", type=int, default=None,
                   help="bucket threshold (default: isolate the optimum)")
    p.add_argument("--allow-large", action="store_true")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run an exhaustive verification suite")
    p.add_argument("suite", choices=["hcd", "clc", "mcx", "qaqr"])
    p.add_argument("--n-range", default=None,
                   help="sizes, e.g. 4..6 (default depends on the suite)")
    p.add_argument("--t", type=int, default=6)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("qubits", help="qubit-consumption report (no simulation)")
    p.add_argument("--n-range", default="4..8")
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--t", type=int, default=6)
    p.set_defaults(func=cmd_qubits)
    return parser


_DEFAULT_RANGES = {"hcd": "4..6", "clc": "4", "mcx": "3..6", "qaqr": "3"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "n_range", None) is None and hasattr(args, "suite"):
        args.n_range = _DEFAULT_RANGES[args.suite]
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
