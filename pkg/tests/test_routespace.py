from random import Random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from routewalk.errors import ConfigurationError, InfeasiblePairError, SpaceSizeError
from routewalk.routespace import (
    RouteTable,
    enumerate_all,
    enumerate_routes,
    hamming_distance,
    neighbor_step,
    random_configuration,
    space_size,
    write_route_table_csv,
)


def nx_simple_path_counts(topology, max_hops=None):
    """Independent oracle: per-pair simple path counts via networkx."""
    g = nx.DiGraph((l.src, l.dst) for l in topology.links)
    counts = {}
    for s in topology.nodes:
        for d in topology.nodes:
            if s == d:
                continue
            paths = nx.all_simple_paths(g, s, d, cutoff=max_hops)
            counts[(s, d)] = sum(1 for _ in paths)
    return counts


@pytest.fixture
def forced_table():
    """One viable pair (K=2) next to a frozen pair (K=1)."""
    return RouteTable(
        pairs=((0, 1), (1, 0)),
        routes=(((0, 1), (0, 2, 1)), ((1, 0),)),
    )


class TestEnumerateRoutes:
    def test_ring6_counts_match_oracle(self, ring6, ring6_table):
        oracle = nx_simple_path_counts(ring6)
        assert ring6_table.num_pairs == 30
        for pair, alternatives in zip(ring6_table.pairs, ring6_table.routes):
            assert len(alternatives) == oracle[pair] == 2

    def test_ring3_counts(self, ring3_table):
        assert ring3_table.num_pairs == 6
        assert all(k == 2 for k in ring3_table.route_counts)

    def test_hop_cap_matches_oracle(self, ring6):
        capped = enumerate_routes(ring6, max_hops=3)
        oracle = nx_simple_path_counts(ring6, max_hops=3)
        for pair, alternatives in zip(capped.pairs, capped.routes):
            assert len(alternatives) == oracle[pair]
        # Ring distance < 3 leaves only the short arc; distance 3 keeps both.
        for (s, d), alternatives in zip(capped.pairs, capped.routes):
            ring_distance = min((d - s) % 6, (s - d) % 6)
            assert len(alternatives) == (2 if ring_distance == 3 else 1)

    def test_infeasible_under_tight_cap(self, path3):
        with pytest.raises(InfeasiblePairError, match="0->2"):
            enumerate_routes(path3, max_hops=1)

    def test_canonical_order(self, ring6_table):
        for alternatives in ring6_table.routes:
            keys = [(len(r), r) for r in alternatives]
            assert keys == sorted(keys)
        assert len(set(ring6_table.routes[0])) == len(ring6_table.routes[0])

    def test_enumeration_is_reproducible(self, ring6, ring6_table):
        assert enumerate_routes(ring6) == ring6_table

    def test_routes_join_their_pairs(self, ring6, ring6_table):
        directed = {(l.src, l.dst) for l in ring6.links}
        for (s, d), alternatives in zip(ring6_table.pairs, ring6_table.routes):
            for route in alternatives:
                assert route[0] == s and route[-1] == d
                assert all((a, b) in directed for a, b in zip(route, route[1:]))

    def test_pair_order_is_lexicographic(self, ring3_table):
        assert ring3_table.pairs == ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))


class TestSpaceSize:
    def test_ring6(self, ring6_table):
        assert space_size(ring6_table) == 2**30 == 1073741824

    def test_ring3(self, ring3_table):
        assert space_size(ring3_table) == 64

    def test_singleton(self, path3_table):
        assert all(k == 1 for k in path3_table.route_counts)
        assert space_size(path3_table) == 1


class TestHammingDistance:
    def test_identity(self):
        assert hamming_distance((0, 1, 0), (0, 1, 0)) == 0

    def test_single_difference(self):
        assert hamming_distance((0, 0, 0), (0, 1, 0)) == 1

    def test_all_differ_on_ring6(self, ring6_table):
        zeros = (0,) * 30
        ones = (1,) * 30
        assert hamming_distance(zeros, ones) == 30

    def test_length_mismatch(self):
        with pytest.raises(ConfigurationError):
            hamming_distance((0, 1), (0, 1, 0))

    @given(st.data())
    @settings(max_examples=200, deadline=None)
    def test_metric_axioms(self, data):
        n = data.draw(st.integers(min_value=1, max_value=20))
        entry = st.integers(min_value=0, max_value=3)
        config = st.tuples(*([entry] * n))
        a, b, c = data.draw(config), data.draw(config), data.draw(config)
        assert hamming_distance(a, a) == 0
        assert hamming_distance(a, b) == hamming_distance(b, a)
        assert hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c)
        if a != b:
            assert hamming_distance(a, b) >= 1


class TestRandomConfiguration:
    def test_deterministic_for_seed(self, ring6_table):
        assert random_configuration(ring6_table, Random(7)) == random_configuration(
            ring6_table, Random(7)
        )

    def test_forced_when_single_route(self, path3_table):
        assert random_configuration(path3_table, Random(0)) == (0,) * path3_table.num_pairs

    def test_entries_within_bounds(self, ring6_table):
        rng = Random(3)
        for _ in range(100):
            ring6_table.validate_config(random_configuration(ring6_table, rng))

    def test_per_entry_frequencies_uniform(self, ring6_table):
        rng = Random(12345)
        draws = 10_000
        ones = [0] * ring6_table.num_pairs
        for _ in range(draws):
            config = random_configuration(ring6_table, rng)
            for i, v in enumerate(config):
                ones[i] += v
        for count in ones:
            assert abs(count / draws - 0.5) < 0.02


class TestNeighborStep:
    def test_distance_is_one(self, ring6_table):
        rng = Random(9)
        config = random_configuration(ring6_table, rng)
        for _ in range(200):
            nxt = neighbor_step(config, ring6_table, rng)
            assert hamming_distance(config, nxt) == 1
            config = nxt

    def test_changed_entry_is_new_value(self, ring6_table):
        rng = Random(11)
        config = random_configuration(ring6_table, rng)
        nxt = neighbor_step(config, ring6_table, rng)
        changed = [i for i in range(30) if config[i] != nxt[i]]
        assert len(changed) == 1
        assert nxt[changed[0]] != config[changed[0]]

    def test_forced_toggle(self, forced_table):
        rng = Random(1)
        assert neighbor_step((0, 0), forced_table, rng) == (1, 0)
        assert neighbor_step((1, 0), forced_table, rng) == (0, 0)

    def test_no_viable_pair(self, path3_table):
        config = (0,) * path3_table.num_pairs
        with pytest.raises(ConfigurationError, match="viable"):
            neighbor_step(config, path3_table, Random(0))

    def test_pair_selection_uniform(self, ring6_table):
        rng = Random(2024)
        config = random_configuration(ring6_table, rng)
        picked = [0] * 30
        steps = 10_000
        for _ in range(steps):
            nxt = neighbor_step(config, ring6_table, rng)
            changed = next(i for i in range(30) if config[i] != nxt[i])
            picked[changed] += 1
            config = nxt
        for count in picked:
            assert abs(count / steps - 1 / 30) < 0.01

    @given(seed=st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=100, deadline=None)
    def test_distance_one_property(self, ring3_table, seed):
        rng = Random(seed)
        config = random_configuration(ring3_table, rng)
        nxt = neighbor_step(config, ring3_table, rng)
        assert hamming_distance(config, nxt) == 1


class TestEnumerateAll:
    def test_ring3_is_complete_and_distinct(self, ring3_table):
        configs = list(enumerate_all(ring3_table))
        assert len(configs) == 64 == space_size(ring3_table)
        assert len(set(configs)) == 64

    def test_counting_order_endpoints(self, ring3_table):
        configs = list(enumerate_all(ring3_table))
        assert configs[0] == (0,) * 6
        assert configs[-1] == (1,) * 6
        assert configs[1] == (0, 0, 0, 0, 0, 1)

    def test_singleton_space(self, path3_table):
        assert list(enumerate_all(path3_table)) == [(0,) * path3_table.num_pairs]

    def test_cap_refusal_names_size(self, ring6_table):
        with pytest.raises(SpaceSizeError, match="1073741824"):
            enumerate_all(ring6_table, cap=2**24)

    def test_matches_product_iteration(self, forced_table):
        assert list(enumerate_all(forced_table)) == [(0, 0), (1, 0)]


class TestCsvExport:
    def test_rows_cover_every_route(self, tmp_path, ring3_table):
        path = tmp_path / "routes.csv"
        write_route_table_csv(ring3_table, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "pair_index,src,dst,route_index,node_sequence"
        assert len(lines) - 1 == sum(ring3_table.route_counts)
        assert lines[1] == "0,0,1,0,0-1"
