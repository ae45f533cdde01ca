"""Command-line front end.

    routewalk walk <scenario>      run the random walks and write statistics
    routewalk enumerate <scenario> evaluate every configuration (desk scale)
    routewalk validate <scenario>  parse and cross-check without running

Common flags: ``--out DIR`` overrides the scenario's output directory,
``--seed U64`` overrides its base seed, ``--jobs N`` runs walks (or the
enumeration) in N processes without changing any output byte, and
``--use-enumerated-optimum CSV`` makes distances refer to a previously
enumerated optimum instead of the best walk sample.

Exit codes: 0 success, 1 runtime failure, 2 validation failure. Output files
are staged and moved into place only when the whole command succeeded. Set
``ROUTEWALK_LOG`` (DEBUG/INFO/WARNING/ERROR) for log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import shutil
import sys
import tempfile
from dataclasses import replace
from multiprocessing import get_context
from pathlib import Path

from . import __version__
from .errors import RouteWalkError, ScenarioError
from .landscape import LandscapeStats, analyze, random_walk
from .netsim import simulate
from .routespace import (
    Config,
    RouteTable,
    enumerate_all,
    enumerate_routes,
    space_size,
    write_route_table_csv,
)
from .scenario import Scenario, load_scenario, manifest_text, with_reference

log = logging.getLogger("routewalk")

_EXIT_OK, _EXIT_RUNTIME, _EXIT_VALIDATION = 0, 1, 2


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        scenario = _load(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_VALIDATION
    try:
        return args.handler(args, scenario)
    except ScenarioError as exc:
        # Handlers raise ScenarioError for anything caught before the first
        # simulation (route enumeration, reference loading, cap checks).
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_VALIDATION
    except RouteWalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_RUNTIME


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="routewalk",
        description="Landscape statistics for unicast routing configurations.",
    )
    parser.add_argument("--version", action="version", version=f"routewalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("scenario", help="scenario file path")
        p.add_argument("--out", type=Path, default=None, help="output directory override")
        p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
        p.add_argument(
            "--seed", type=int, default=None, help="base seed override (default: scenario's)"
        )

    walk = sub.add_parser("walk", help="run random walks and compute landscape statistics")
    common(walk)
    walk.add_argument(
        "--use-enumerated-optimum",
        type=Path,
        default=None,
        metavar="CSV",
        help="take the distance reference from an enumeration CSV instead of "
        "the best walk sample",
    )
    walk.set_defaults(handler=_cmd_walk)

    enum = sub.add_parser("enumerate", help="evaluate every configuration (desk scale)")
    common(enum)
    enum.set_defaults(handler=_cmd_enumerate)

    val = sub.add_parser("validate", help="parse and cross-check a scenario")
    common(val)
    val.add_argument(
        "--dump-routes",
        type=Path,
        default=None,
        metavar="CSV",
        help="also write the route table for audit",
    )
    val.set_defaults(handler=_cmd_validate)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("ROUTEWALK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load(args: argparse.Namespace) -> Scenario:
    if args.jobs < 1:
        raise ScenarioError(f"--jobs must be >= 1, got {args.jobs}")
    scenario = load_scenario(args.scenario, seed_override=args.seed)
    if args.out is not None:
        scenario = _with_out_dir(scenario, args.out)
    return scenario


def _with_out_dir(scenario: Scenario, out_dir: Path) -> Scenario:
    resolved = tuple(
        (section, (("dir", str(out_dir)),) if section == "output" else items)
        for section, items in scenario.resolved
    )
    return replace(scenario, out_dir=out_dir, resolved=resolved)


# ---------------------------------------------------------------- walk

def _cmd_walk(args: argparse.Namespace, scenario: Scenario) -> int:
    # Validation phase: everything up to the first simulation exits with 2.
    try:
        table = enumerate_routes(scenario.topology, scenario.max_hops)
        if args.use_enumerated_optimum is not None:
            config, fitness = _read_reference_csv(args.use_enumerated_optimum, table)
            scenario = with_reference(scenario, config, fitness)
        if scenario.reference is not None:
            table.validate_config(scenario.reference[0])
    except RouteWalkError as exc:
        raise ScenarioError(str(exc)) from exc

    log.info("running %d walks x %d steps (jobs=%d)",
             scenario.walk.num_walks, scenario.walk.num_steps, args.jobs)
    traces = _run_walks(scenario, table, args.jobs)
    stats = analyze(
        traces,
        scenario.walk.max_lag,
        reference=scenario.reference,
        noise_factor=scenario.noise_factor,
        fast_fraction=scenario.fast_fraction,
    )

    files = {
        "correlation.csv": _correlation_csv(stats),
        "scatter.csv": _scatter_csv(stats),
        "summary.txt": _summary_text(stats, scenario, table),
        "manifest.scn": manifest_text(
            scenario, {"tool": "routewalk", "version": __version__, "command": "walk"}
        ),
    }
    _publish(files, scenario.out_dir)
    print(f"wrote {scenario.out_dir}/{{correlation.csv,scatter.csv,summary.txt,manifest.scn}}")
    print(f"fdc = {stats.fdc!r}")
    print(f"classification = {stats.classification}")
    print(f"best_fitness = {stats.best_fitness!r}")
    return _EXIT_OK


def _run_walks(scenario: Scenario, table: RouteTable, jobs: int):
    payloads = [
        (scenario.topology, table, scenario.traffic, scenario.sim, scenario.walk, w)
        for w in range(scenario.walk.num_walks)
    ]
    if jobs == 1 or len(payloads) == 1:
        return [_walk_worker(p) for p in payloads]
    with get_context("fork").Pool(min(jobs, len(payloads))) as pool:
        return pool.map(_walk_worker, payloads)


def _walk_worker(payload):
    topology, table, traffic, sim_params, walk_params, walk_index = payload
    return random_walk(topology, table, traffic, sim_params, walk_params, walk_index)


def _read_reference_csv(path: Path, table: RouteTable) -> tuple[Config, float]:
    """Pick the minimum-fitness row of an enumeration/optimum CSV."""
    import csv as _csv

    try:
        with open(path, newline="") as fh:
            reader = _csv.DictReader(fh)
            if reader.fieldnames is None or not {"config", "fitness_seconds"} <= set(
                reader.fieldnames
            ):
                raise ScenarioError(
                    f"{path}: expected columns 'config' and 'fitness_seconds'"
                )
            best: tuple[Config, float] | None = None
            for row in reader:
                config = tuple(int(tok) for tok in row["config"].split("-"))
                fitness = float(row["fitness_seconds"])
                if best is None or fitness < best[1]:
                    best = (config, fitness)
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise ScenarioError(f"{path}: malformed row: {exc}") from exc
    if best is None:
        raise ScenarioError(f"{path}: no data rows")
    return best


# ---------------------------------------------------------------- enumerate

def _cmd_enumerate(args: argparse.Namespace, scenario: Scenario) -> int:
    try:
        table = enumerate_routes(scenario.topology, scenario.max_hops)
        configs = list(enumerate_all(table, cap=scenario.enum_cap))
    except RouteWalkError as exc:
        raise ScenarioError(str(exc)) from exc

    log.info("enumerating %d configurations (jobs=%d)", len(configs), args.jobs)
    fitnesses = _evaluate_configs(scenario, table, configs, args.jobs)

    lines = ["config_index,config,fitness_seconds"]
    best_idx = 0
    for i, (config, fitness) in enumerate(zip(configs, fitnesses)):
        lines.append(f"{i},{'-'.join(map(str, config))},{fitness!r}")
        if fitness < fitnesses[best_idx]:
            best_idx = i
    optimum = (
        "config_index,config,fitness_seconds\n"
        f"{best_idx},{'-'.join(map(str, configs[best_idx]))},{fitnesses[best_idx]!r}\n"
    )
    _publish(
        {"enumeration.csv": "\n".join(lines) + "\n", "optimum.csv": optimum},
        scenario.out_dir,
    )
    print(f"wrote {scenario.out_dir}/{{enumeration.csv,optimum.csv}}")
    print(f"configurations = {len(configs)}")
    print(f"optimum_fitness = {fitnesses[best_idx]!r}")
    return _EXIT_OK


_ENUM_CONTEXT = None


def _init_enum_worker(payload) -> None:
    global _ENUM_CONTEXT
    _ENUM_CONTEXT = payload


def _enum_worker(config: Config) -> float:
    topology, table, traffic, sim_params = _ENUM_CONTEXT
    return simulate(topology, table, config, traffic, sim_params).mean_delay_s


def _evaluate_configs(scenario: Scenario, table: RouteTable, configs, jobs: int):
    payload = (scenario.topology, table, scenario.traffic, scenario.sim)
    if jobs == 1:
        _init_enum_worker(payload)
        return [_enum_worker(c) for c in configs]
    chunk = max(1, len(configs) // (jobs * 8))
    with get_context("fork").Pool(jobs, _init_enum_worker, (payload,)) as pool:
        return pool.map(_enum_worker, configs, chunksize=chunk)


# ---------------------------------------------------------------- validate

def _cmd_validate(args: argparse.Namespace, scenario: Scenario) -> int:
    try:
        table = enumerate_routes(scenario.topology, scenario.max_hops)
    except RouteWalkError as exc:
        raise ScenarioError(str(exc)) from exc
    counts = table.route_counts
    print(f"scenario = {args.scenario}")
    print(f"N = {table.num_pairs}")
    print(f"K_min = {min(counts)}")
    print(f"K_max = {max(counts)}")
    print(f"viable_pairs = {len(table.viable_pairs)}/{table.num_pairs}")
    print(f"space_size = {space_size(table)}")
    print(f"flows = {len(scenario.traffic.flows)}")
    print(f"walks = {scenario.walk.num_walks} x {scenario.walk.num_steps} steps")
    if args.dump_routes is not None:
        write_route_table_csv(table, args.dump_routes)
        print(f"wrote {args.dump_routes}")
    return _EXIT_OK


# ---------------------------------------------------------------- output

def _correlation_csv(stats: LandscapeStats) -> str:
    lines = ["lag,r,samples_at_lag"]
    for lag, (r, count) in enumerate(zip(stats.autocorr.r, stats.autocorr.samples_at_lag)):
        lines.append(f"{lag},{r!r},{count}")
    return "\n".join(lines) + "\n"


def _scatter_csv(stats: LandscapeStats) -> str:
    lines = ["rank_by_fitness,hamming_distance_to_best,fitness_seconds"]
    for rank, (distance, fitness) in enumerate(stats.scatter, start=1):
        lines.append(f"{rank},{distance},{fitness!r}")
    return "\n".join(lines) + "\n"


def _summary_text(stats: LandscapeStats, scenario: Scenario, table: RouteTable) -> str:
    external = scenario.reference is not None
    lines = [
        f"fdc = {stats.fdc!r}",
        f"classification = {stats.classification}",
        f"best_fitness = {stats.best_fitness!r}",
        f"best_config = {','.join(map(str, stats.best_config))}",
        f"reference_source = {'external' if external else 'best_found'}",
        f"reference_fitness = {stats.reference_fitness!r}",
        f"reference_config = {','.join(map(str, stats.reference_config))}",
        f"num_walks = {stats.num_walks}",
        f"num_steps = {scenario.walk.num_steps}",
        f"num_samples = {stats.num_samples}",
        f"max_lag = {scenario.walk.max_lag}",
        f"space_size = {space_size(table)}",
    ]
    return "\n".join(lines) + "\n"


def _publish(files: dict[str, str], out_dir: Path) -> None:
    """Write all outputs to a staging directory, then move them into place."""
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".routewalk-", dir=out_dir.parent))
    try:
        for name, content in files.items():
            (staging / name).write_text(content)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name in files:
            os.replace(staging / name, out_dir / name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)


if __name__ == "__main__":
    sys.exit(main())
