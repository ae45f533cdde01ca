"""Network topologies and traffic demand patterns.

A topology is a set of nodes ``0..n-1`` plus directed link entries. Every
physical link appears as two directed entries (one per direction), each with
its own capacity and propagation delay; the simulator gives each directed
entry its own FIFO queue.

Topology file grammar (line oriented, ``#`` starts a comment):

    nodes <n>
    link <a> <b> <capacity_bps> <prop_delay_s>
    link <a> <b> <cap_ab> <delay_ab> <cap_ba> <delay_ba>

The 4-field form creates both directions with equal parameters; the 6-field
form sets each direction separately. Builders only produce symmetric links;
asymmetric parameters are available through files only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import TopologyError, TrafficError

__all__ = [
    "Link",
    "Topology",
    "Flow",
    "TrafficPattern",
    "build_cycle",
    "load_topology",
    "parse_topology",
    "format_topology",
    "save_topology",
    "hotspot_pattern",
    "adjacent_pattern",
]


@dataclass(frozen=True)
class Link:
    """One directed link entry: ``src -> dst``."""

    src: int
    dst: int
    capacity_bps: float
    prop_delay_s: float

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise TopologyError(f"self-loop link {self.src}->{self.dst}")
        if self.capacity_bps <= 0:
            raise TopologyError(
                f"link {self.src}->{self.dst}: capacity must be > 0, got {self.capacity_bps}"
            )
        if self.prop_delay_s < 0:
            raise TopologyError(
                f"link {self.src}->{self.dst}: propagation delay must be >= 0, "
                f"got {self.prop_delay_s}"
            )


@dataclass(frozen=True)
class Topology:
    """Validated directed graph. Immutable; safe to share across threads.

    ``links`` is canonically sorted by (src, dst) so two topologies with the
    same link set compare equal regardless of construction order.
    """

    nodes: tuple[int, ...]
    links: tuple[Link, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        n = len(self.nodes)
        if self.nodes != tuple(range(n)):
            raise TopologyError(f"nodes must be 0..{n - 1} in order, got {self.nodes}")
        if n < 2:
            raise TopologyError("a topology needs at least 2 nodes")
        object.__setattr__(
            self, "links", tuple(sorted(self.links, key=lambda l: (l.src, l.dst)))
        )
        seen: set[tuple[int, int]] = set()
        for link in self.links:
            if link.src not in self.nodes or link.dst not in self.nodes:
                raise TopologyError(f"link {link.src}->{link.dst} references unknown node")
            key = (link.src, link.dst)
            if key in seen:
                raise TopologyError(f"duplicate link entry {link.src}->{link.dst}")
            seen.add(key)
        for src, dst in seen:
            if (dst, src) not in seen:
                raise TopologyError(
                    f"link {src}->{dst} has no reverse direction; every physical link "
                    "must be present as two directed entries"
                )
        self._check_connected()

    def _check_connected(self) -> None:
        # Reverse entries are guaranteed above, so reachability from node 0
        # implies strong connectivity of the directed graph.
        reached = {0}
        frontier = [0]
        while frontier:
            node = frontier.pop()
            for nxt in self.adjacency.get(node, ()):
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        missing = set(self.nodes) - reached
        if missing:
            raise TopologyError(f"graph is not connected: nodes {sorted(missing)} unreachable")

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        """Out-neighbors per node, ascending."""
        adj: dict[int, list[int]] = {node: [] for node in self.nodes}
        for link in self.links:
            adj[link.src].append(link.dst)
        return {node: tuple(sorted(nbrs)) for node, nbrs in adj.items()}

    @cached_property
    def link_index(self) -> dict[tuple[int, int], int]:
        """Position of each directed entry within ``links``."""
        return {(l.src, l.dst): i for i, l in enumerate(self.links)}

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def physical_links(self) -> list[tuple[int, int]]:
        """Undirected link set as (a, b) with a < b."""
        return sorted({(min(l.src, l.dst), max(l.src, l.dst)) for l in self.links})


@dataclass(frozen=True)
class Flow:
    """One CBR session: fixed-size packets at a fixed interval."""

    src: int
    dst: int
    packet_size_bytes: int
    interval_s: float
    start_time_s: float = 0.0

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise TrafficError(f"flow source equals destination ({self.src})")
        if self.packet_size_bytes <= 0:
            raise TrafficError(f"packet size must be > 0, got {self.packet_size_bytes}")
        if self.interval_s <= 0:
            raise TrafficError(f"packet interval must be > 0, got {self.interval_s}")
        if self.start_time_s < 0:
            raise TrafficError(f"start time must be >= 0, got {self.start_time_s}")


@dataclass(frozen=True)
class TrafficPattern:
    """A workload: a tuple of flows plus a human-readable description.

    The description records generator conventions (hub, direction, stagger)
    so runs remain auditable from their manifests.
    """

    flows: tuple[Flow, ...]
    description: str = ""

    def __post_init__(self) -> None:
        if not self.flows:
            raise TrafficError("traffic pattern has no flows")


def build_cycle(
    n: int, capacity_bps: float = 1_000_000.0, prop_delay_s: float = 0.010
) -> Topology:
    """Ring of ``n`` nodes; adjacent pairs joined by a symmetric physical link.

    Produces ``2n`` directed link entries. Requires ``n >= 3``.
    """
    if n < 3:
        raise TopologyError(f"a cycle needs at least 3 nodes, got {n}")
    links = []
    for i in range(n):
        j = (i + 1) % n
        links.append(Link(i, j, capacity_bps, prop_delay_s))
        links.append(Link(j, i, capacity_bps, prop_delay_s))
    return Topology(nodes=tuple(range(n)), links=tuple(links))


def load_topology(path: str | Path) -> Topology:
    """Parse and validate a topology file (grammar in the module docstring)."""
    path = Path(path)
    if not path.is_file():
        raise TopologyError(f"topology file not found: {path}")
    return parse_topology(path.read_text(), origin=str(path))


def parse_topology(text: str, origin: str = "<topology>") -> Topology:
    """Parse topology text; ``origin`` labels error messages."""
    num_nodes: int | None = None
    links: list[Link] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        if kind == "nodes":
            if num_nodes is not None:
                raise TopologyError(f"{origin}:{lineno}: duplicate 'nodes' header")
            if len(fields) != 2:
                raise TopologyError(f"{origin}:{lineno}: expected 'nodes <n>'")
            num_nodes = _parse_int(fields[1], origin, lineno)
        elif kind == "link":
            if num_nodes is None:
                raise TopologyError(f"{origin}:{lineno}: 'link' before 'nodes' header")
            if len(fields) not in (5, 7):
                raise TopologyError(
                    f"{origin}:{lineno}: expected 'link <a> <b> <capacity_bps> "
                    "<prop_delay_s> [<cap_ba> <delay_ba>]'"
                )
            a = _parse_int(fields[1], origin, lineno)
            b = _parse_int(fields[2], origin, lineno)
            cap_ab = _parse_float(fields[3], origin, lineno)
            del_ab = _parse_float(fields[4], origin, lineno)
            if len(fields) == 7:
                cap_ba = _parse_float(fields[5], origin, lineno)
                del_ba = _parse_float(fields[6], origin, lineno)
            else:
                cap_ba, del_ba = cap_ab, del_ab
            try:
                links.append(Link(a, b, cap_ab, del_ab))
                links.append(Link(b, a, cap_ba, del_ba))
            except TopologyError as exc:
                raise TopologyError(f"{origin}:{lineno}: {exc}") from exc
        else:
            raise TopologyError(f"{origin}:{lineno}: unknown directive {kind!r}")
    if num_nodes is None:
        raise TopologyError(f"{origin}: missing 'nodes' header")
    return Topology(nodes=tuple(range(num_nodes)), links=tuple(links))


def format_topology(topology: Topology) -> list[str]:
    """Topology as grammar lines; ``parse_topology`` round-trips them."""
    lines = [f"nodes {topology.num_nodes}"]
    by_pair = {(l.src, l.dst): l for l in topology.links}
    for a, b in topology.physical_links():
        fwd = by_pair[(a, b)]
        rev = by_pair[(b, a)]
        if (fwd.capacity_bps, fwd.prop_delay_s) == (rev.capacity_bps, rev.prop_delay_s):
            lines.append(f"link {a} {b} {fwd.capacity_bps!r} {fwd.prop_delay_s!r}")
        else:
            lines.append(
                f"link {a} {b} {fwd.capacity_bps!r} {fwd.prop_delay_s!r} "
                f"{rev.capacity_bps!r} {rev.prop_delay_s!r}"
            )
    return lines


def save_topology(topology: Topology, path: str | Path) -> None:
    """Write a topology in the file grammar; ``load_topology`` round-trips it."""
    Path(path).write_text("\n".join(format_topology(topology)) + "\n")


def _parse_int(token: str, origin: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise TopologyError(f"{origin}:{lineno}: expected integer, got {token!r}") from None


def _parse_float(token: str, origin: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise TopologyError(f"{origin}:{lineno}: expected number, got {token!r}") from None


def _staggered(flows: list[tuple[int, int]], packet_size_bytes: int, interval_s: float) -> tuple[Flow, ...]:
    # Spread start times across one interval so CBR sources do not phase-lock.
    m = len(flows)
    return tuple(
        Flow(src, dst, packet_size_bytes, interval_s, start_time_s=k * interval_s / m)
        for k, (src, dst) in enumerate(flows)
    )


def hotspot_pattern(
    topology: Topology,
    hub: int,
    packet_size_bytes: int,
    interval_s: float,
    direction: str = "both",
) -> TrafficPattern:
    """Logical star centered on ``hub``.

    ``direction`` selects the demand edges: ``both`` (default) puts one flow
    from every non-hub node to the hub and one back, 2(n-1) flows total;
    ``to_hub`` / ``from_hub`` keep a single direction (n-1 flows).
    """
    if hub not in topology.nodes:
        raise TrafficError(f"hub {hub} is not a node of the topology")
    if direction not in ("both", "to_hub", "from_hub"):
        raise TrafficError(f"unknown hotspot direction {direction!r}")
    endpoints: list[tuple[int, int]] = []
    for node in topology.nodes:
        if node == hub:
            continue
        if direction in ("both", "to_hub"):
            endpoints.append((node, hub))
        if direction in ("both", "from_hub"):
            endpoints.append((hub, node))
    return TrafficPattern(
        flows=_staggered(endpoints, packet_size_bytes, interval_s),
        description=(
            f"hotspot hub={hub} direction={direction} "
            f"({len(endpoints)} flows, start stagger interval/{len(endpoints)})"
        ),
    )


def adjacent_pattern(
    topology: Topology, packet_size_bytes: int, interval_s: float
) -> TrafficPattern:
    """One flow per ordered pair of physically adjacent nodes."""
    endpoints = sorted({(l.src, l.dst) for l in topology.links})
    return TrafficPattern(
        flows=_staggered(endpoints, packet_size_bytes, interval_s),
        description=(
            f"adjacent-nodes ({len(endpoints)} flows, "
            f"start stagger interval/{len(endpoints)})"
        ),
    )
