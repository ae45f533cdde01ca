"""Random-walk sampling of the configuration space and its statistics.

A walk starts from a uniform random configuration and repeatedly re-routes
one viable pair, evaluating mean packet delay at every step. From the pooled
samples this module computes:

* the fitness-distance correlation (FDC): Pearson correlation between sample
  fitnesses and their Hamming distances to the best sample found, an
  indicator of how much distance-to-best structures the search space;
* the walk autocorrelation r(s): correlation of fitnesses s steps apart,
  whose decay shape separates random, weakly correlated, and strongly
  correlated landscapes;
* scatter pairs (distance to best, fitness) for plotting.

Population (divide-by-N) moments are used throughout, so r(0) = 1 holds
exactly whenever the fitness variance is positive.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from random import Random
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import EstimatorError, RouteWalkError, ScenarioError, SimulationError
from .netsim import SimParams, simulate
from .routespace import (
    Config,
    RouteTable,
    hamming_distance,
    neighbor_step,
    random_configuration,
)
from .topology import Topology, TrafficPattern

__all__ = [
    "WalkParams",
    "WalkTrace",
    "AutocorrResult",
    "LandscapeStats",
    "derive_seed",
    "random_walk",
    "fdc",
    "autocorrelation",
    "scatter_data",
    "classify_autocorr",
    "analyze",
]

# Roles for counter-based seed derivation (see derive_seed).
SEED_ROLE_WALK = 0
SEED_ROLE_JITTER = 1


def derive_seed(base: int, role: int, counter: int) -> int:
    """Derive a child seed from (base, role, counter), stable across platforms.

    SHA-256 over the decimal rendering keeps the scheme independent of
    Python's randomized string hashing, so parallel and serial runs agree.
    Role 0 seeds walk number ``counter``; role 1 seeds start-time jitter.
    """
    digest = hashlib.sha256(f"{base}:{role}:{counter}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class WalkParams:
    """Walk length, replication, seeding, and the largest reported lag."""

    num_steps: int
    num_walks: int = 1
    seed: int = 0
    max_lag: int = 1

    def __post_init__(self) -> None:
        if self.num_steps < 2:
            raise ScenarioError(f"num_steps must be >= 2, got {self.num_steps}")
        if self.num_walks < 1:
            raise ScenarioError(f"num_walks must be >= 1, got {self.num_walks}")
        if not 1 <= self.max_lag < self.num_steps:
            raise ScenarioError(
                f"max_lag must be in [1, num_steps), got {self.max_lag} "
                f"with num_steps={self.num_steps}"
            )


@dataclass(frozen=True)
class WalkTrace:
    """One walk: configuration and fitness at every step.

    Consecutive configurations are at Hamming distance exactly 1; fitnesses
    are finite positive delays. ``configs[0]`` is the random starting point.
    """

    walk_index: int
    seed: int
    configs: tuple[Config, ...]
    fitnesses: tuple[float, ...]


@dataclass(frozen=True)
class AutocorrResult:
    """Pooled autocorrelation series plus per-walk series for inspection.

    ``r[s]`` estimates the lag-s fitness correlation from all (t, t+s) pairs
    of all walks; ``samples_at_lag[s]`` counts those pairs. Per-walk entries
    are NaN where a single walk has zero fitness variance.
    """

    r: tuple[float, ...]
    samples_at_lag: tuple[int, ...]
    per_walk: tuple[tuple[float, ...], ...]

    @property
    def max_lag(self) -> int:
        return len(self.r) - 1


@dataclass(frozen=True)
class LandscapeStats:
    """Bundle of every statistic computed from one set of walks.

    ``reference_config`` is the point distances are measured against: the
    best sample found, unless an externally supplied optimum replaced it
    (then ``best_*`` still describe the best walk sample).
    """

    fdc: float
    autocorr: AutocorrResult
    classification: str
    best_config: Config
    best_fitness: float
    reference_config: Config
    reference_fitness: float
    scatter: tuple[tuple[int, float], ...]
    num_walks: int
    num_samples: int


def random_walk(
    topology: Topology,
    table: RouteTable,
    traffic: TrafficPattern,
    sim_params: SimParams,
    walk_params: WalkParams,
    walk_index: int,
    fitness_fn: Callable[[Config], float] | None = None,
) -> WalkTrace:
    """Run one seeded random walk of ``walk_params.num_steps`` evaluations.

    The walk's random source is seeded from (seed, walk_index) only, so
    walks can run in any order or in parallel with identical results.
    ``fitness_fn`` defaults to the packet simulator's mean delay and exists
    as an injection point for testing the walk dynamics in isolation.
    """
    if fitness_fn is None:
        def fitness_fn(config: Config) -> float:
            return simulate(topology, table, config, traffic, sim_params).mean_delay_s

    seed = derive_seed(walk_params.seed, SEED_ROLE_WALK, walk_index)
    rng = Random(seed)
    configs: list[Config] = []
    fitnesses: list[float] = []
    config = random_configuration(table, rng)
    for step in range(walk_params.num_steps):
        if step > 0:
            config = neighbor_step(config, table, rng)
        try:
            fitness = fitness_fn(config)
        except RouteWalkError as exc:
            raise SimulationError(f"walk {walk_index}, step {step}: {exc}") from exc
        if not (math.isfinite(fitness) and fitness > 0):
            raise SimulationError(
                f"walk {walk_index}, step {step}: fitness must be a finite positive "
                f"delay, got {fitness!r}"
            )
        configs.append(config)
        fitnesses.append(fitness)
    return WalkTrace(
        walk_index=walk_index,
        seed=seed,
        configs=tuple(configs),
        fitnesses=tuple(fitnesses),
    )


def fdc(fitnesses: Sequence[float], distances: Sequence[float]) -> float:
    """Fitness-distance correlation: covariance over the product of spreads.

    Population moments cancel, so this equals the Pearson correlation of the
    two sets. Zero spread in either set leaves the coefficient undefined and
    raises :class:`EstimatorError` rather than returning 0.
    """
    f = np.asarray(fitnesses, dtype=float)
    d = np.asarray(distances, dtype=float)
    if f.ndim != 1 or f.shape != d.shape:
        raise EstimatorError(
            f"fitness and distance sets must be 1-d and equally long "
            f"({f.shape} vs {d.shape})"
        )
    if f.size < 2:
        raise EstimatorError("FDC needs at least 2 samples")
    if f.max() == f.min():
        raise EstimatorError("FDC undefined: fitness set has zero variance")
    if d.max() == d.min():
        raise EstimatorError("FDC undefined: distance set has zero variance")
    df = f - f.mean()
    dd = d - d.mean()
    cov = float((df * dd).mean())
    s_f = math.sqrt(float((df * df).mean()))
    s_d = math.sqrt(float((dd * dd).mean()))
    # max != min does not rule out variance underflowing to exactly zero
    # (values closer than float epsilon to their mean), so guard again here.
    if s_f == 0.0 or s_d == 0.0:
        raise EstimatorError("FDC undefined: a set's computed variance is zero")
    return cov / (s_f * s_d)


def _as_series(traces: Iterable) -> list[np.ndarray]:
    series = []
    for t in traces:
        values = t.fitnesses if isinstance(t, WalkTrace) else t
        series.append(np.asarray(values, dtype=float))
    return series


def autocorrelation(traces: Sequence, max_lag: int) -> AutocorrResult:
    """Pooled fitness autocorrelation r(s) for s = 0..max_lag.

    Accepts walk traces or plain fitness sequences. For each lag, the mean
    of lagged products pools every valid (t, t+s) pair from every walk;
    the mean and variance pool all samples. Pairs never span walks.
    """
    series = _as_series(traces)
    if not series:
        raise EstimatorError("autocorrelation needs at least one walk")
    for s in series:
        if len(s) <= max_lag:
            raise EstimatorError(
                f"every walk must be longer than max_lag={max_lag}, got length {len(s)}"
            )
    pooled = _autocorr_of(series, max_lag)
    if pooled is None:
        raise EstimatorError(
            "autocorrelation undefined: pooled fitness variance is zero"
        )
    r, counts = pooled
    per_walk = []
    for s in series:
        single = _autocorr_of([s], max_lag)
        if single is None:
            per_walk.append(tuple([math.nan] * (max_lag + 1)))
        else:
            per_walk.append(single[0])
    return AutocorrResult(r=r, samples_at_lag=counts, per_walk=tuple(per_walk))


def _autocorr_of(
    series: list[np.ndarray], max_lag: int
) -> tuple[tuple[float, ...], tuple[int, ...]] | None:
    all_f = np.concatenate(series) if len(series) > 1 else series[0]
    if all_f.max() == all_f.min():
        return None
    mean = float(all_f.mean())
    mean_sq = mean * mean
    r: list[float] = []
    counts: list[int] = []
    variance = 0.0
    for lag in range(max_lag + 1):
        prod_sum = 0.0
        count = 0
        for s in series:
            if len(s) > lag:
                tail = s[lag:] if lag else s
                head = s[: len(s) - lag] if lag else s
                prod_sum += float(np.dot(head, tail))
                count += len(s) - lag
        numerator = prod_sum / count - mean_sq
        if lag == 0:
            if numerator <= 0.0:  # variance underflow: flat to float precision
                return None
            variance = numerator
        r.append(numerator / variance)
        counts.append(count)
    return tuple(r), tuple(counts)


def scatter_data(
    traces: Sequence[WalkTrace], best: Config
) -> tuple[tuple[int, float], ...]:
    """(distance to ``best``, fitness) for every sample, ascending by fitness.

    Duplicates are retained; ties keep walk-then-step order so output is
    deterministic.
    """
    pairs = [
        (hamming_distance(config, best), fitness)
        for trace in traces
        for config, fitness in zip(trace.configs, trace.fitnesses)
    ]
    pairs.sort(key=lambda p: p[1])
    return tuple(pairs)


def classify_autocorr(
    r: Sequence[float],
    num_samples: int,
    noise_factor: float = 3.0,
    fast_fraction: float = 0.10,
) -> str:
    """Advisory label for the decay shape of an autocorrelation series.

    ``random``: every lag >= 1 stays inside the sampling-noise band
    noise_factor/sqrt(num_samples). Otherwise ``fast-decay`` when r first
    drops below 1/e within ``fast_fraction`` of the reported lags, else
    ``slow-decay``.
    """
    if not r or abs(r[0] - 1.0) > 1e-9:
        raise EstimatorError("autocorrelation series must start at r(0) = 1")
    band = noise_factor / math.sqrt(num_samples)
    if all(abs(x) < band for x in r[1:]):
        return "random"
    threshold = 1.0 / math.e
    crossing = next((s for s in range(1, len(r)) if r[s] < threshold), None)
    max_lag = len(r) - 1
    if crossing is not None and crossing <= fast_fraction * max_lag:
        return "fast-decay"
    return "slow-decay"


def analyze(
    traces: Sequence[WalkTrace],
    max_lag: int,
    reference: tuple[Config, float] | None = None,
    noise_factor: float = 3.0,
    fast_fraction: float = 0.10,
) -> LandscapeStats:
    """Compute every landscape statistic from a set of walk traces.

    The best sample (minimum fitness; ties broken by earliest walk, then
    earliest step) anchors distances unless ``reference`` supplies an
    external optimum, e.g. from a full enumeration.
    """
    if not traces:
        raise EstimatorError("analyze needs at least one walk trace")
    best_config: Config | None = None
    best_fitness = math.inf
    num_samples = 0
    for trace in traces:
        num_samples += len(trace.fitnesses)
        for config, fitness in zip(trace.configs, trace.fitnesses):
            if fitness < best_fitness:
                best_fitness = fitness
                best_config = config
    if best_config is None or num_samples < 2:
        raise EstimatorError("analyze needs at least 2 samples")

    ref_config, ref_fitness = (
        reference if reference is not None else (best_config, best_fitness)
    )

    fitnesses = [f for trace in traces for f in trace.fitnesses]
    distances = [
        hamming_distance(config, ref_config)
        for trace in traces
        for config in trace.configs
    ]
    try:
        coefficient = fdc(fitnesses, distances)
        autocorr = autocorrelation(traces, max_lag)
    except EstimatorError as exc:
        raise EstimatorError(f"landscape statistics undefined: {exc}") from exc
    classification = classify_autocorr(
        autocorr.r, num_samples, noise_factor=noise_factor, fast_fraction=fast_fraction
    )
    return LandscapeStats(
        fdc=coefficient,
        autocorr=autocorr,
        classification=classification,
        best_config=best_config,
        best_fitness=best_fitness,
        reference_config=ref_config,
        reference_fitness=ref_fitness,
        scatter=scatter_data(traces, ref_config),
        num_walks=len(traces),
        num_samples=num_samples,
    )
