"""Event-driven packet simulator: the fitness function of the toolkit.

Each flow emits fixed-size packets at fixed intervals along the single route
its configuration selects. At every directed link a packet waits in a FIFO
queue, holds the link for size/capacity seconds, then takes the propagation
delay to the next node; forwarding itself costs nothing. Fitness is the mean
end-to-end delay over packets that were sent at or after the warmup time and
delivered by the end of the horizon.

Runs are single-threaded and deterministic: events at equal timestamps are
processed in creation order, and emission times come from multiplication
(start + k*interval), never accumulation.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from heapq import heappop, heappush
from pathlib import Path
from random import Random

from .errors import DegenerateResultError, SimulationError
from .routespace import Config, RouteTable
from .topology import Topology, TrafficPattern

__all__ = ["SimParams", "SimResult", "simulate"]

_EMIT, _TX_DONE, _ARRIVE = 0, 1, 2


@dataclass(frozen=True)
class SimParams:
    """Horizon and queueing knobs.

    ``queue_limit`` is the waiting-room size per directed link, not counting
    the packet being transmitted; 0 means unbounded. With
    ``start_jitter_seed`` set, every flow's start time is shifted by a seeded
    uniform draw in [0, interval) instead of relying on the pattern's
    deterministic stagger alone.
    """

    duration_s: float = 30.0
    warmup_s: float = 5.0
    queue_limit: int = 0
    start_jitter_seed: int | None = None

    def __post_init__(self) -> None:
        if self.warmup_s < 0:
            raise SimulationError(f"warmup must be >= 0, got {self.warmup_s}")
        if self.duration_s <= self.warmup_s:
            raise SimulationError(
                f"duration ({self.duration_s}) must exceed warmup ({self.warmup_s})"
            )
        if self.queue_limit < 0:
            raise SimulationError(f"queue_limit must be >= 0, got {self.queue_limit}")


@dataclass(frozen=True)
class SimResult:
    """Outcome of one run. ``mean_delay_s`` is the fitness value.

    ``measured`` counts delivered packets with send time >= warmup (the ones
    behind ``mean_delay_s``); ``delivered`` counts all deliveries. Packets
    still queued or on a link at the horizon are ``in_flight`` and excluded.
    ``peak_queue`` maps each directed link to the largest number of packets
    that ever waited in its queue.
    """

    mean_delay_s: float
    generated: int
    delivered: int
    dropped: int
    in_flight: int
    measured: int
    per_flow_mean_delay_s: tuple[float | None, ...]
    peak_queue: dict[tuple[int, int], int]


def simulate(
    topology: Topology,
    table: RouteTable,
    config: Config,
    traffic: TrafficPattern,
    params: SimParams,
    trace_path: str | Path | None = None,
) -> SimResult:
    """Run one deterministic simulation and return its delay statistics.

    Raises :class:`SimulationError` for unroutable flows and
    :class:`DegenerateResultError` when nothing was delivered inside the
    measurement window. With ``trace_path`` set, writes one CSV row per
    delivered packet (flow_id, seq, send_time, recv_time, delay, hops).
    """
    table.validate_config(config)

    num_links = len(topology.links)
    cap = [l.capacity_bps for l in topology.links]
    prop = [l.prop_delay_s for l in topology.links]
    link_index = topology.link_index

    # Resolve each flow to its directed-link path under this configuration.
    flow_bits: list[float] = []
    flow_paths: list[tuple[int, ...]] = []
    starts: list[float] = []
    jitter = Random(params.start_jitter_seed) if params.start_jitter_seed is not None else None
    for flow in traffic.flows:
        pair_idx = table.pair_index.get((flow.src, flow.dst))
        if pair_idx is None:
            raise SimulationError(
                f"flow {flow.src}->{flow.dst} has no pair in the route table"
            )
        route = table.routes[pair_idx][config[pair_idx]]
        try:
            flow_paths.append(
                tuple(link_index[(route[h], route[h + 1])] for h in range(len(route) - 1))
            )
        except KeyError as exc:
            raise SimulationError(
                f"route {route} for flow {flow.src}->{flow.dst} uses a link "
                f"missing from the topology: {exc}"
            ) from exc
        flow_bits.append(flow.packet_size_bytes * 8.0)
        start = flow.start_time_s
        if jitter is not None:
            start += jitter.random() * flow.interval_s
        starts.append(start)

    duration = params.duration_s
    warmup = params.warmup_s
    queue_limit = params.queue_limit

    intervals = [flow.interval_s for flow in traffic.flows]
    queues: list[deque] = [deque() for _ in range(num_links)]
    busy = [False] * num_links
    peak = [0] * num_links

    generated = delivered = dropped = 0
    delay_sum = 0.0
    measured = 0
    flow_delay_sum = [0.0] * len(traffic.flows)
    flow_measured = [0] * len(traffic.flows)
    trace_rows: list[tuple] | None = [] if trace_path is not None else None

    heap: list[tuple] = []
    eseq = 0
    for f, start in enumerate(starts):
        if start < duration:
            heappush(heap, (start, eseq, _EMIT, 0, f, 0, 0.0, 0))
            eseq += 1

    # Event tuples: (time, eseq, kind, link, flow, pseq, send_time, hop).
    while heap and heap[0][0] <= duration:
        t, _, kind, li, f, pseq, send, hop = heappop(heap)

        if kind == _TX_DONE:
            # Packet leaves link li; arrival at the far node after prop delay.
            heappush(heap, (t + prop[li], eseq, _ARRIVE, li, f, pseq, send, hop + 1))
            eseq += 1
            q = queues[li]
            if q:
                nf, npseq, nsend, nhop = q.popleft()
                heappush(
                    heap,
                    (t + flow_bits[nf] / cap[li], eseq, _TX_DONE, li, nf, npseq, nsend, nhop),
                )
                eseq += 1
            else:
                busy[li] = False

        elif kind == _ARRIVE:
            path = flow_paths[f]
            if hop == len(path):
                delivered += 1
                if send >= warmup:
                    delay = t - send
                    delay_sum += delay
                    measured += 1
                    flow_delay_sum[f] += delay
                    flow_measured[f] += 1
                if trace_rows is not None:
                    trace_rows.append((f, pseq, send, t, t - send, len(path)))
            else:
                nli = path[hop]
                if busy[nli]:
                    q = queues[nli]
                    if queue_limit and len(q) >= queue_limit:
                        dropped += 1
                    else:
                        q.append((f, pseq, send, hop))
                        if len(q) > peak[nli]:
                            peak[nli] = len(q)
                else:
                    busy[nli] = True
                    heappush(
                        heap,
                        (t + flow_bits[f] / cap[nli], eseq, _TX_DONE, nli, f, pseq, send, hop),
                    )
                    eseq += 1

        else:  # _EMIT
            generated += 1
            nli = flow_paths[f][0]
            if busy[nli]:
                q = queues[nli]
                if queue_limit and len(q) >= queue_limit:
                    dropped += 1
                else:
                    q.append((f, pseq, t, 0))
                    if len(q) > peak[nli]:
                        peak[nli] = len(q)
            else:
                busy[nli] = True
                heappush(
                    heap,
                    (t + flow_bits[f] / cap[nli], eseq, _TX_DONE, nli, f, pseq, t, 0),
                )
                eseq += 1
            next_t = starts[f] + (pseq + 1) * intervals[f]
            if next_t < duration:
                heappush(heap, (next_t, eseq, _EMIT, 0, f, pseq + 1, 0.0, 0))
                eseq += 1

    if measured == 0:
        raise DegenerateResultError(
            "no packet was both sent after warmup and delivered before the horizon"
        )

    result = SimResult(
        mean_delay_s=delay_sum / measured,
        generated=generated,
        delivered=delivered,
        dropped=dropped,
        in_flight=generated - delivered - dropped,
        measured=measured,
        per_flow_mean_delay_s=tuple(
            (flow_delay_sum[f] / flow_measured[f]) if flow_measured[f] else None
            for f in range(len(traffic.flows))
        ),
        peak_queue={
            (l.src, l.dst): peak[i] for i, l in enumerate(topology.links)
        },
    )
    if trace_rows is not None:
        _write_trace(trace_path, trace_rows)
    return result


def _write_trace(path: str | Path, rows: list[tuple]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["flow_id", "seq", "send_time", "recv_time", "delay", "hops"])
        for row in rows:
            writer.writerow([row[0], row[1], repr(row[2]), repr(row[3]), repr(row[4]), row[5]])
