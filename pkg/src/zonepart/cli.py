"""Command-line pipeline: model -> quantify -> partition -> evaluate -> report.

Exit codes: 0 ok, 2 configuration error, 3 infeasible model, 4 solver limit.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ModelInfeasibleError, SolverLimitError, ZonePartError
from .interaction import ComfortSchedule, InteractionGraph, build_graph, generate_excitation
from .metrics import CASE1_WEIGHTS, CASE2_WEIGHTS, MetricWeights, rank_partitions, read_raw_table, score
from .milp import BranchAndBound, build_base, extract_partition, robust_counterpart, solve, stochastic_objective
from .milp.bnb import INFEASIBLE, NODE_LIMIT
from .mpc import ACTUATOR_STUCK, SENSOR_GAIN, UNCONTROLLED, EvaluationReport, FaultScenario, MpcConfig, evaluate
from .partition import Partition, cut_cost, enumerate_connected_partitions
from .reference import REFERENCE_DAY, reference_building, reference_gain_peaks
from .thermal import load_building, save_building
from .weather import read_csv, synthetic_year, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_LIMIT = 0, 2, 3, 4
DEFAULT_SEED = 2023

log = logging.getLogger("zonepart")


class ConfigError(ZonePartError):
    pass


def _require(path: str | None, what: str) -> Path:
    if not path:
        raise ConfigError(f"--{what} is required")
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{what} file not found: {p}")
    return p


def _weights(choice: str | None, alpha: float | None) -> MetricWeights:
    presets = {"case1": CASE1_WEIGHTS, "case2": CASE2_WEIGHTS}
    if choice is None or choice in presets:
        w = presets[choice or "case1"]
    else:
        try:
            w = MetricWeights(**json.loads(_require(choice, "weights").read_text()))
        except (TypeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"bad weights file {choice}: {exc}") from None
    if alpha is not None:
        w = MetricWeights(**{**asdict(w), "alpha": alpha})
    return w


def _n_values(args, n_zones: int) -> list[int]:
    if args.all_n:
        return list(range(1, n_zones + 1))
    if args.n is None:
        raise ConfigError("give --n or --all-n")
    if not 1 <= args.n <= n_zones:
        raise ConfigError(f"--n must lie in [1, {n_zones}]")
    return [args.n]


def _header(seed: int) -> str:
    return f"# zonepart {__version__}, seed {seed}\n"


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- subcommands ---------------------------------------------------------------


def cmd_model(args) -> int:
    """Write the bundled building and a synthetic weather year."""
    out = _out_dir(args)
    building = reference_building()
    save_building(building, out / "building.json")
    weather = synthetic_year(building.surfaces, reference_gain_peaks(), year=args.year, seed=args.seed)
    write_csv(weather, out / "weather.csv", comment=f"seed {args.seed}")
    print(f"wrote {out / 'building.json'} and {out / 'weather.csv'} (seed {args.seed})")
    return EXIT_OK


def cmd_quantify(args) -> int:
    building = load_building(_require(args.building, "building"))
    weather = read_csv(_require(args.weather, "weather"))
    w = weather.matrix(building)  # validates columns before the simulation
    schedule = ComfortSchedule.office(weather.timestamps, args.comfort[0], args.comfort[1])
    excitation = generate_excitation(building, w, schedule, args.seed)
    graph = build_graph(building, excitation, args.nd)
    graph.meta.update({"seed": args.seed, "n_d": args.nd, "warnings": list(excitation.warnings)})
    path = Path(args.out or "graph.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    graph.save(path)
    for e in graph.edges:
        iv = graph.intervals[e]
        print(f"I_{e[0]}-{e[1]} = [{iv.lower:.4f}, {iv.upper:.4f}] degC, mean {graph.distributions[e].mean:.4f}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_partition(args) -> int:
    graph = InteractionGraph.load(_require(args.graph, "graph"))
    seed = graph.meta.get("seed", args.seed)
    ns = _n_values(args, len(graph.vertices))
    out = _out_dir(args)
    backend = BranchAndBound(node_limit=args.node_limit)
    summary = {"meta": {"seed": seed, "mode": args.mode}, "results": []}
    status = EXIT_OK
    for n in ns:
        base = build_base(graph, n, symmetry_breaking=args.symmetry_breaking)
        if args.mode == "robust":
            problem, weights = robust_counterpart(base, graph), graph.weights("max")
        else:
            problem, weights = stochastic_objective(base, graph), graph.weights("stochastic")
        sol = solve(problem, backend)
        item = {"n": n, "status": sol.status, "nodes": sol.nodes, "lp_iterations": sol.lp_iterations, "gap": sol.gap}
        if sol.status == INFEASIBLE:
            status = max(status, EXIT_INFEASIBLE)
        if sol.status == NODE_LIMIT:
            status = max(status, EXIT_LIMIT)
        if sol.x is None:
            summary["results"].append(item)
            print(f"n={n}: {sol.status}")
            continue
        raw, norm = extract_partition(sol, problem, graph)
        name = f"partition_n{n}.txt"
        (out / name).write_text(
            _header(seed) + f"# mode {args.mode}, n {n}, objective {sol.objective!r}, raw {raw}\n" + norm.to_text()
        )
        item.update({
            "objective": sol.objective, "raw": str(raw), "normalized": str(norm),
            "normalized_n": norm.n, "cut_cost": cut_cost(graph, norm, weights), "file": name,
        })
        summary["results"].append(item)
        print(f"n={n}: {norm}  objective {sol.objective:.6f}  ({sol.status}, {sol.nodes} nodes)")
    (out / "partition_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return status


_FAULTS = {"sensor": SENSOR_GAIN, "actuator": ACTUATOR_STUCK, "uncontrolled": UNCONTROLLED}


def cmd_evaluate(args) -> int:
    building = load_building(_require(args.building, "building"))
    weather = read_csv(_require(args.weather, "weather"))
    weights = _weights(args.weights, args.alpha)
    config = MpcConfig(horizon=args.horizon)
    if args.partitions:
        parts = [Partition.load(_require(p, "partition")) for p in args.partitions]
    else:
        from .partition import SimpleGraph

        g = SimpleGraph(building.zone_ids, building.adjacent_pairs())
        parts = [p for n in range(1, len(building.zone_ids) + 1) for p in enumerate_connected_partitions(g, n)]
    start = weather.index_of(np.datetime64(args.day, "m"))
    steps = 96
    w = weather.window(start, start + steps + config.horizon)
    if len(w) < steps + config.horizon:
        raise ConfigError("weather file ends before the evaluated day plus the horizon")
    schedule = ComfortSchedule.office(w.timestamps, args.comfort[0], args.comfort[1])
    fault = FaultScenario(_FAULTS[args.fault], building.zone_ids)
    extra = {f"uncontrolled_{z}": FaultScenario(UNCONTROLLED, (z,)) for z in args.uncontrolled}
    workers = 1 if args.single_thread else args.workers
    report = evaluate(building, parts, w, schedule, fault, weights, config, extra, steps, workers)
    report.meta.update({"seed": args.seed, "day": args.day, "fault": args.fault})
    out = _out_dir(args)
    report.save_json(out / "report.json")
    (out / "report.csv").write_text(_header(args.seed) + report.to_csv())
    _print_ranked(report.ranked())
    return EXIT_OK


def cmd_replay(args) -> int:
    rows, printed = read_raw_table(_require(args.table, "table"))
    weights = _weights(args.weights, args.alpha)
    score(rows, weights)
    report = EvaluationReport(rows, weights, {"seed": args.seed, "source": str(args.table)})
    worst = 0.0
    for r in rows:
        line = f"{r.label:24s} ODM {r.odm:9.4f}  FPM {r.fpm:9.4f}  WPM {r.wpm:9.4f}"
        if r.label in printed:
            dev = max(abs(a - b) for a, b in zip((r.odm, r.fpm, r.wpm), printed[r.label]))
            worst = max(worst, dev)
            line += f"  |dev| {dev:.4f} pp"
        print(line)
    if printed:
        print(f"max deviation from printed metrics: {worst:.4f} pp")
    if args.out:
        Path(args.out).write_text(_header(args.seed) + report.to_csv())
    return EXIT_OK


def _print_ranked(rows) -> None:
    print(f"{'rank':>4} {'n':>2} {'partition':24s} {'ODM%':>8} {'FPM%':>8} {'WPM%':>8}")
    for k, r in enumerate(rows, start=1):
        print(f"{k:>4} {r.n:>2} {r.label:24s} {r.odm:8.3f} {r.fpm:8.3f} {r.wpm:8.3f}")


def cmd_report(args) -> int:
    path = _require(args.report, "report")
    try:
        data = json.loads(path.read_text())
        rows = data["rows"]
    except (json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"bad report file {path}: {exc}") from None
    from types import SimpleNamespace

    ranked = rank_partitions(
        SimpleNamespace(n=r["n"], label=r["label"], odm=r["ODM_pct"], fpm=r["FPM_pct"], wpm=r["WPM_pct"]) for r in rows
    )
    _print_ranked(ranked)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="root random seed")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--single-thread", action="store_true", help="deterministic single-threaded run")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="zonepart", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("model", parents=[common], help="write the bundled building and weather year")
    s.add_argument("--year", type=int, default=2023)
    s.set_defaults(func=cmd_model)

    comfort = argparse.ArgumentParser(add_help=False)
    comfort.add_argument("--comfort", type=float, nargs=2, default=(22.0, 24.0), metavar=("LOW", "HIGH"))
    comfort.add_argument("--building")
    comfort.add_argument("--weather")

    s = sub.add_parser("quantify", parents=[common, comfort], help="interaction intervals and distributions")
    s.add_argument("--nd", type=int, default=10, help="sub-intervals per edge distribution")
    s.set_defaults(func=cmd_quantify)

    s = sub.add_parser("partition", parents=[common], help="solve the clustering MILP")
    s.add_argument("--graph")
    s.add_argument("--mode", choices=("stochastic", "robust"), default="stochastic")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--n", type=int)
    g.add_argument("--all-n", action="store_true")
    s.add_argument("--symmetry-breaking", action="store_true")
    s.add_argument("--node-limit", type=int, default=200_000)
    s.set_defaults(func=cmd_partition)

    weights = argparse.ArgumentParser(add_help=False)
    weights.add_argument("--weights", help="case1, case2 or a JSON file of MetricWeights fields")
    weights.add_argument("--alpha", type=float)

    s = sub.add_parser("evaluate", parents=[common, comfort, weights], help="post-assess partitions with MPC")
    s.add_argument("partitions", nargs="*", help="partition files (default: every connected partition)")
    s.add_argument("--day", default=str(REFERENCE_DAY), help="first timestamp of the evaluated day")
    s.add_argument("--fault", choices=sorted(_FAULTS), default="sensor")
    s.add_argument("--uncontrolled", type=int, nargs="*", default=[], help="zones for extra uncontrolled runs")
    s.add_argument("--horizon", type=int, default=24)
    s.add_argument("--workers", type=int, default=4)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("replay-metrics", parents=[common, weights], help="metrics from raw triples")
    s.add_argument("table", help="CSV with n, partition and raw triple columns")
    s.set_defaults(func=cmd_replay)

    s = sub.add_parser("report", parents=[common], help="print a WPM ranking from a report file")
    s.add_argument("report")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ModelInfeasibleError as exc:
        print(f"error: infeasible model: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverLimitError as exc:
        print(f"error: solver limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ZonePartError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
