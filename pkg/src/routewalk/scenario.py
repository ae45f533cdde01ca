"""Scenario files: one INI-style text file describes a full experiment.

Sections and keys (defaults in parentheses):

    [topology]
      builder = cycle            one of the bundled builders, or
      file = ring6.topo          a topology file path (relative to the
      inline = nodes 2; link ... scenario file), or inline lines joined by ';'
      nodes = 6                  builder parameter
      capacity_bps = 1000000     builder parameter (1e6)
      prop_delay_s = 0.010       builder parameter (0.01)

    [traffic]
      pattern = hotspot | adjacent
      hub = 0                    hotspot only
      direction = both           hotspot only: both | to_hub | from_hub (both)
      packet_size_bytes = 800
      interval_s = 0.01

    [routes]                     optional section
      max_hops =                 hop cap for route enumeration (none)
      enum_cap =                 refusal threshold for full enumeration (2**24)

    [sim]
      duration_s = 30.0          (30.0)
      warmup_s = 5.0             (5.0)
      queue_limit = 0            waiting packets per directed link, 0 = unbounded (0)
      start_jitter = off         on: jitter flow starts with a derived seed (off)

    [walk]
      num_walks = 5              (1)
      num_steps = 300            (10 * number of ordered pairs)
      max_lag = 200              (min(num_steps - 1, 200))
      seed = 42                  (0)
      noise_factor = 3.0         classification noise band factor (3.0)
      fast_fraction = 0.10       classification fast-decay fraction (0.10)

    [output]
      dir = runs/example         output directory (relative to the CWD)

    [reference]                  optional; written into manifests so reruns
      config = 0,1,0,...         reuse the exact distance reference
      fitness = 0.0164

    [meta]                       ignored on load; manifests carry run info here

Run manifests are themselves valid scenario files with every default and
override resolved, so re-running a manifest reproduces the run exactly.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from pathlib import Path

from .errors import RouteWalkError, ScenarioError
from .landscape import SEED_ROLE_JITTER, WalkParams, derive_seed
from .netsim import SimParams
from .routespace import DEFAULT_ENUM_CAP, Config
from .topology import (
    Topology,
    TrafficPattern,
    adjacent_pattern,
    build_cycle,
    format_topology,
    hotspot_pattern,
    load_topology,
    parse_topology,
)

__all__ = ["Scenario", "load_scenario", "manifest_text"]

_KNOWN_KEYS = {
    "topology": {"builder", "file", "inline", "nodes", "capacity_bps", "prop_delay_s"},
    "traffic": {"pattern", "hub", "direction", "packet_size_bytes", "interval_s"},
    "routes": {"max_hops", "enum_cap"},
    "sim": {"duration_s", "warmup_s", "queue_limit", "start_jitter"},
    "walk": {"num_walks", "num_steps", "max_lag", "seed", "noise_factor", "fast_fraction"},
    "output": {"dir"},
    "reference": {"config", "fitness"},
    "meta": None,  # free-form, ignored
}


@dataclass(frozen=True)
class Scenario:
    """A fully resolved experiment description.

    ``resolved`` keeps the canonical key-value form (defaults applied, CLI
    seed override included) that :func:`manifest_text` writes back out.
    """

    topology: Topology
    traffic: TrafficPattern
    sim: SimParams
    walk: WalkParams
    max_hops: int | None
    enum_cap: int
    out_dir: Path
    reference: tuple[Config, float] | None
    noise_factor: float
    fast_fraction: float
    resolved: tuple[tuple[str, tuple[tuple[str, str], ...]], ...]


class _SectionReader:
    def __init__(self, parser: configparser.ConfigParser, section: str, path: Path):
        self.section = section
        self.path = path
        self.raw = dict(parser[section]) if parser.has_section(section) else {}
        self.seen: set[str] = set()

    def get(self, key: str, default: str | None = None) -> str | None:
        self.seen.add(key)
        value = self.raw.get(key, default)
        if value is not None:
            value = value.strip()
        return value if value else default

    def require(self, key: str) -> str:
        value = self.get(key)
        if value is None:
            raise ScenarioError(f"{self.path}: [{self.section}] is missing key '{key}'")
        return value

    def check_no_unknown(self) -> None:
        known = _KNOWN_KEYS.get(self.section)
        if known is None:
            return
        unknown = set(self.raw) - known
        if unknown:
            raise ScenarioError(
                f"{self.path}: [{self.section}] has unknown keys {sorted(unknown)}"
            )


def _parse_typed(reader: _SectionReader, key: str, kind, default=None):
    text = reader.get(key, None)
    if text is None:
        return default
    try:
        if kind is bool:
            if text.lower() in ("on", "true", "yes", "1"):
                return True
            if text.lower() in ("off", "false", "no", "0"):
                return False
            raise ValueError(text)
        return kind(text)
    except ValueError:
        raise ScenarioError(
            f"{reader.path}: [{reader.section}] {key} = {text!r} is not a valid "
            f"{kind.__name__}"
        ) from None


def load_scenario(path: str | Path, seed_override: int | None = None) -> Scenario:
    """Parse, default-fill, and cross-validate a scenario file.

    Every failure raises :class:`ScenarioError` naming the file and section.
    ``seed_override`` replaces the scenario's base seed before any derived
    seed is computed.
    """
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ScenarioError(f"{path}: {exc}") from exc

    unknown_sections = set(parser.sections()) - set(_KNOWN_KEYS)
    if unknown_sections:
        raise ScenarioError(f"{path}: unknown sections {sorted(unknown_sections)}")
    for name in ("topology", "traffic"):
        if not parser.has_section(name):
            raise ScenarioError(f"{path}: missing required section [{name}]")

    try:
        return _build_scenario(parser, path, seed_override)
    except ScenarioError:
        raise
    except RouteWalkError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _build_scenario(
    parser: configparser.ConfigParser, path: Path, seed_override: int | None
) -> Scenario:
    resolved: list[tuple[str, tuple[tuple[str, str], ...]]] = []

    # [topology]
    topo_r = _SectionReader(parser, "topology", path)
    builder = topo_r.get("builder")
    topo_file = topo_r.get("file")
    inline = topo_r.get("inline")
    sources = [s for s in (builder, topo_file, inline) if s is not None]
    if len(sources) != 1:
        raise ScenarioError(
            f"{path}: [topology] needs exactly one of 'builder', 'file', 'inline'"
        )
    if builder is not None:
        if builder != "cycle":
            raise ScenarioError(f"{path}: unknown topology builder {builder!r}")
        nodes = _parse_typed(topo_r, "nodes", int)
        if nodes is None:
            raise ScenarioError(f"{path}: [topology] builder=cycle needs 'nodes'")
        capacity = _parse_typed(topo_r, "capacity_bps", float, 1_000_000.0)
        prop_delay = _parse_typed(topo_r, "prop_delay_s", float, 0.010)
        topology = build_cycle(nodes, capacity, prop_delay)
        resolved.append(
            (
                "topology",
                (
                    ("builder", "cycle"),
                    ("nodes", str(nodes)),
                    ("capacity_bps", repr(capacity)),
                    ("prop_delay_s", repr(prop_delay)),
                ),
            )
        )
    else:
        if topo_file is not None:
            topology = load_topology(path.parent / topo_file)
        else:
            topology = _topology_from_inline(inline)
        # Manifests must be self-contained, so files become inline text.
        resolved.append((
            "topology",
            (("inline", _topology_to_inline(topology)),),
        ))
    topo_r.check_no_unknown()

    # [traffic]
    traffic_r = _SectionReader(parser, "traffic", path)
    pattern = traffic_r.require("pattern")
    packet_size = _parse_typed(traffic_r, "packet_size_bytes", int, 800)
    interval = _parse_typed(traffic_r, "interval_s", float, 0.01)
    traffic_keys: list[tuple[str, str]] = [("pattern", pattern)]
    if pattern == "hotspot":
        hub = _parse_typed(traffic_r, "hub", int)
        if hub is None:
            raise ScenarioError(f"{path}: [traffic] hotspot pattern needs 'hub'")
        direction = traffic_r.get("direction", "both")
        traffic = hotspot_pattern(topology, hub, packet_size, interval, direction)
        traffic_keys += [("hub", str(hub)), ("direction", direction)]
    elif pattern == "adjacent":
        if traffic_r.get("hub") is not None or traffic_r.get("direction") is not None:
            raise ScenarioError(
                f"{path}: [traffic] 'hub'/'direction' only apply to the hotspot pattern"
            )
        traffic = adjacent_pattern(topology, packet_size, interval)
    else:
        raise ScenarioError(f"{path}: unknown traffic pattern {pattern!r}")
    traffic_keys += [
        ("packet_size_bytes", str(packet_size)),
        ("interval_s", repr(interval)),
    ]
    resolved.append(("traffic", tuple(traffic_keys)))
    traffic_r.check_no_unknown()

    # [routes]
    routes_r = _SectionReader(parser, "routes", path)
    max_hops = _parse_typed(routes_r, "max_hops", int)
    enum_cap = _parse_typed(routes_r, "enum_cap", int, DEFAULT_ENUM_CAP)
    routes_keys = []
    if max_hops is not None:
        routes_keys.append(("max_hops", str(max_hops)))
    routes_keys.append(("enum_cap", str(enum_cap)))
    resolved.append(("routes", tuple(routes_keys)))
    routes_r.check_no_unknown()

    # [walk] comes before [sim] in processing order because the jitter seed
    # derives from the walk seed.
    walk_r = _SectionReader(parser, "walk", path)
    num_pairs = topology.num_nodes * (topology.num_nodes - 1)
    num_steps = _parse_typed(walk_r, "num_steps", int, 10 * num_pairs)
    num_walks = _parse_typed(walk_r, "num_walks", int, 1)
    max_lag = _parse_typed(walk_r, "max_lag", int, min(num_steps - 1, 200))
    seed = _parse_typed(walk_r, "seed", int, 0)
    if seed_override is not None:
        seed = seed_override
    noise_factor = _parse_typed(walk_r, "noise_factor", float, 3.0)
    fast_fraction = _parse_typed(walk_r, "fast_fraction", float, 0.10)
    walk = WalkParams(num_steps=num_steps, num_walks=num_walks, seed=seed, max_lag=max_lag)
    resolved.append(
        (
            "walk",
            (
                ("num_walks", str(num_walks)),
                ("num_steps", str(num_steps)),
                ("max_lag", str(max_lag)),
                ("seed", str(seed)),
                ("noise_factor", repr(noise_factor)),
                ("fast_fraction", repr(fast_fraction)),
            ),
        )
    )
    walk_r.check_no_unknown()

    # [sim]
    sim_r = _SectionReader(parser, "sim", path)
    duration = _parse_typed(sim_r, "duration_s", float, 30.0)
    warmup = _parse_typed(sim_r, "warmup_s", float, 5.0)
    queue_limit = _parse_typed(sim_r, "queue_limit", int, 0)
    start_jitter = _parse_typed(sim_r, "start_jitter", bool, False)
    jitter_seed = derive_seed(seed, SEED_ROLE_JITTER, 0) if start_jitter else None
    sim = SimParams(
        duration_s=duration,
        warmup_s=warmup,
        queue_limit=queue_limit,
        start_jitter_seed=jitter_seed,
    )
    resolved.append(
        (
            "sim",
            (
                ("duration_s", repr(duration)),
                ("warmup_s", repr(warmup)),
                ("queue_limit", str(queue_limit)),
                ("start_jitter", "on" if start_jitter else "off"),
            ),
        )
    )
    sim_r.check_no_unknown()

    # [output]
    out_r = _SectionReader(parser, "output", path)
    out_dir = Path(out_r.get("dir", "runs/" + path.stem))
    resolved.append(("output", (("dir", str(out_dir)),)))
    out_r.check_no_unknown()

    # [reference]
    ref_r = _SectionReader(parser, "reference", path)
    reference = None
    if ref_r.get("config") is not None or ref_r.get("fitness") is not None:
        config_text = ref_r.require("config")
        fitness = _parse_typed(ref_r, "fitness", float)
        if fitness is None:
            raise ScenarioError(f"{path}: [reference] needs both 'config' and 'fitness'")
        try:
            config = tuple(int(tok) for tok in config_text.split(","))
        except ValueError:
            raise ScenarioError(
                f"{path}: [reference] config must be comma-separated route indices"
            ) from None
        if len(config) != num_pairs:
            raise ScenarioError(
                f"{path}: [reference] config has {len(config)} entries, "
                f"topology has {num_pairs} ordered pairs"
            )
        reference = (config, fitness)
        resolved.append(
            ("reference", (("config", config_text), ("fitness", repr(fitness))))
        )
    ref_r.check_no_unknown()

    # Flow endpoints are validated by the generators; re-check here so file
    # and inline topologies get the same guarantee.
    for flow in traffic.flows:
        if flow.src not in topology.nodes or flow.dst not in topology.nodes:
            raise ScenarioError(
                f"{path}: flow {flow.src}->{flow.dst} references a node "
                "outside the topology"
            )

    return Scenario(
        topology=topology,
        traffic=traffic,
        sim=sim,
        walk=walk,
        max_hops=max_hops,
        enum_cap=enum_cap,
        out_dir=out_dir,
        reference=reference,
        noise_factor=noise_factor,
        fast_fraction=fast_fraction,
        resolved=tuple(resolved),
    )


def _topology_from_inline(inline: str) -> Topology:
    text = "\n".join(part.strip() for part in inline.split(";"))
    return parse_topology(text, origin="<inline topology>")


def _topology_to_inline(topology: Topology) -> str:
    return "; ".join(format_topology(topology))


def with_reference(scenario: Scenario, config: Config, fitness: float) -> Scenario:
    """Return a copy with an external distance reference baked in.

    The reference also lands in the resolved key-value form, so manifests of
    runs that used an enumerated optimum rerun with the same reference.
    """
    resolved = tuple(
        (section, items) for section, items in scenario.resolved if section != "reference"
    ) + (
        (
            "reference",
            (
                ("config", ",".join(map(str, config))),
                ("fitness", repr(fitness)),
            ),
        ),
    )
    return Scenario(
        topology=scenario.topology,
        traffic=scenario.traffic,
        sim=scenario.sim,
        walk=scenario.walk,
        max_hops=scenario.max_hops,
        enum_cap=scenario.enum_cap,
        out_dir=scenario.out_dir,
        reference=(tuple(config), fitness),
        noise_factor=scenario.noise_factor,
        fast_fraction=scenario.fast_fraction,
        resolved=resolved,
    )


def manifest_text(scenario: Scenario, meta: dict[str, str]) -> str:
    """Render the resolved scenario as a rerunnable manifest file."""
    out = io.StringIO()
    out.write("[meta]\n")
    for key, value in meta.items():
        out.write(f"{key} = {value}\n")
    for section, items in scenario.resolved:
        out.write(f"\n[{section}]\n")
        for key, value in items:
            out.write(f"{key} = {value}\n")
    return out.getvalue()
