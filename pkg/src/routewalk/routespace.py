"""Route alternatives per node pair and the configuration space over them.

A routing configuration assigns one route (by index) to every ordered
source-destination pair; the pair order and the per-pair route order are both
canonical, so configuration indices mean the same thing across runs and
platforms. Distance between two configurations is the number of pairs whose
selected routes differ, and a walk step re-routes exactly one viable pair
(a pair with at least two alternatives).
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from random import Random
from typing import Iterator

from .errors import ConfigurationError, InfeasiblePairError, SpaceSizeError
from .topology import Topology

__all__ = [
    "RouteTable",
    "enumerate_routes",
    "space_size",
    "hamming_distance",
    "random_configuration",
    "neighbor_step",
    "enumerate_all",
    "write_route_table_csv",
    "DEFAULT_ENUM_CAP",
]

Route = tuple[int, ...]
Config = tuple[int, ...]

DEFAULT_ENUM_CAP = 2**24


@dataclass(frozen=True)
class RouteTable:
    """All admissible routes for every ordered node pair of one topology.

    ``pairs`` lists the N = n(n-1) ordered pairs sorted by (src, dst);
    ``routes[i]`` holds pair i's alternatives sorted by (hop count, node
    sequence). Immutable and shareable across threads.
    """

    pairs: tuple[tuple[int, int], ...]
    routes: tuple[tuple[Route, ...], ...]

    def __post_init__(self) -> None:
        if len(self.pairs) != len(self.routes):
            raise ConfigurationError("pairs and routes length mismatch")
        for (src, dst), alternatives in zip(self.pairs, self.routes):
            if not alternatives:
                raise InfeasiblePairError(f"pair {src}->{dst} has no routes")
            for route in alternatives:
                if route[0] != src or route[-1] != dst:
                    raise ConfigurationError(
                        f"route {route} does not join pair {src}->{dst}"
                    )
                if len(set(route)) != len(route):
                    raise ConfigurationError(f"route {route} revisits a node")

    @cached_property
    def pair_index(self) -> dict[tuple[int, int], int]:
        return {pair: i for i, pair in enumerate(self.pairs)}

    @cached_property
    def route_counts(self) -> tuple[int, ...]:
        """K_i: number of alternatives per pair."""
        return tuple(len(alts) for alts in self.routes)

    @cached_property
    def viable_pairs(self) -> tuple[int, ...]:
        """Indices of pairs with K_i >= 2; only these can be re-routed."""
        return tuple(i for i, k in enumerate(self.route_counts) if k >= 2)

    @property
    def num_pairs(self) -> int:
        return len(self.pairs)

    def validate_config(self, config: Config) -> None:
        if len(config) != self.num_pairs:
            raise ConfigurationError(
                f"configuration has {len(config)} entries, table has {self.num_pairs} pairs"
            )
        for i, (idx, k) in enumerate(zip(config, self.route_counts)):
            if not 0 <= idx < k:
                raise ConfigurationError(
                    f"entry {i} selects route {idx}, pair has {k} alternatives"
                )

    def route_for(self, pair_idx: int, route_idx: int) -> Route:
        return self.routes[pair_idx][route_idx]


def _simple_paths(adjacency: dict[int, tuple[int, ...]], src: int, dst: int,
                  max_hops: int | None) -> list[Route]:
    """All loop-free paths src -> dst, depth-first with ascending neighbors."""
    paths: list[Route] = []
    path = [src]
    on_path = {src}

    def extend(node: int) -> None:
        if max_hops is not None and len(path) - 1 >= max_hops:
            return
        for nxt in adjacency[node]:
            if nxt in on_path:
                continue
            path.append(nxt)
            if nxt == dst:
                paths.append(tuple(path))
            else:
                on_path.add(nxt)
                extend(nxt)
                on_path.remove(nxt)
            path.pop()

    extend(src)
    return paths


def enumerate_routes(topology: Topology, max_hops: int | None = None) -> RouteTable:
    """Enumerate all simple paths for every ordered pair, canonically ordered.

    ``max_hops`` caps route length (in links); a pair left with no route under
    the cap raises :class:`InfeasiblePairError`.
    """
    if max_hops is not None and max_hops < 1:
        raise InfeasiblePairError(f"max_hops must be >= 1, got {max_hops}")
    pairs = []
    all_routes = []
    for src in topology.nodes:
        for dst in topology.nodes:
            if src == dst:
                continue
            found = _simple_paths(topology.adjacency, src, dst, max_hops)
            if not found:
                raise InfeasiblePairError(
                    f"pair {src}->{dst} has no route"
                    + (f" within {max_hops} hops" if max_hops is not None else "")
                )
            found.sort(key=lambda r: (len(r), r))
            pairs.append((src, dst))
            all_routes.append(tuple(found))
    return RouteTable(pairs=tuple(pairs), routes=tuple(all_routes))


def space_size(table: RouteTable) -> int:
    """Number of routing configurations: the product of the K_i."""
    return math.prod(table.route_counts)


def hamming_distance(a: Config, b: Config) -> int:
    """Number of pairs whose selected routes differ."""
    if len(a) != len(b):
        raise ConfigurationError(
            f"configurations have different lengths ({len(a)} vs {len(b)})"
        )
    return sum(x != y for x, y in zip(a, b))


def random_configuration(table: RouteTable, rng: Random) -> Config:
    """Uniform independent draw of each entry from [0, K_i)."""
    return tuple(rng.randrange(k) for k in table.route_counts)


def neighbor_step(config: Config, table: RouteTable, rng: Random) -> Config:
    """Re-route one uniformly chosen viable pair to a different alternative.

    The result is always at distance exactly 1 from ``config``.
    """
    table.validate_config(config)
    viable = table.viable_pairs
    if not viable:
        raise ConfigurationError("no viable pair: the space has a single point")
    pair = viable[rng.randrange(len(viable))]
    k = table.route_counts[pair]
    new_idx = rng.randrange(k - 1)
    if new_idx >= config[pair]:
        new_idx += 1
    out = list(config)
    out[pair] = new_idx
    return tuple(out)


def enumerate_all(table: RouteTable, cap: int = DEFAULT_ENUM_CAP) -> Iterator[Config]:
    """Yield every configuration once, in mixed-radix counting order.

    The first configuration is all zeros and the last is all (K_i - 1); the
    rightmost entry varies fastest. Refuses upfront when the space exceeds
    ``cap`` (the enumeration is meant for desk-scale ground truth only).
    """
    size = space_size(table)
    if size > cap:
        raise SpaceSizeError(
            f"configuration space has {size} points, above the enumeration cap {cap}"
        )
    return iter(itertools.product(*(range(k) for k in table.route_counts)))


def write_route_table_csv(table: RouteTable, path: str | Path) -> None:
    """Dump the table for audit: one row per (pair, alternative)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair_index", "src", "dst", "route_index", "node_sequence"])
        for i, ((src, dst), alternatives) in enumerate(zip(table.pairs, table.routes)):
            for j, route in enumerate(alternatives):
                writer.writerow([i, src, dst, j, "-".join(map(str, route))])
