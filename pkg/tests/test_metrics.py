"""
Unit Tests for Network Observations
Run with: pytest tests/ -v
"""

from itertools import combinations

import numpy as np
import pytest

from affinity_sim.dynamics import initialize
from affinity_sim.metrics import (
    affinity_stats,
    clustering_coefficient,
    collect_metrics,
    link_tier_counts,
    mean_personal_network_size,
    network_density,
    outlier_counts,
)
from affinity_sim.models import Params
from affinity_sim.network import Network
from affinity_sim.rng import make_streams
from affinity_sim.tiers import Tier


def make_network(n, edges=(), affinity=0.5):
    net = Network()
    for _ in range(n):
        net.add_profile(30.0, affinity, 0.5, 0.5)
    for source, target in edges:
        net.add_link(source, target)
    return net


def brute_force_clustering(n, edges):
    """Mean local clustering by explicit triangle enumeration"""
    neighbours = {v: set() for v in range(n)}
    for a, b in edges:
        neighbours[a].add(b)
        neighbours[b].add(a)
    total = 0.0
    for v in range(n):
        degree = len(neighbours[v])
        if degree < 2:
            continue
        closed = sum(1 for a, b in combinations(sorted(neighbours[v]), 2) if b in neighbours[a])
        total += closed / (degree * (degree - 1) / 2)
    return total / n


# ============== FIXTURES ==============

@pytest.fixture
def random_graphs():
    """200 random directed graphs on at most 12 nodes"""
    rng = np.random.default_rng(2024)
    graphs = []
    for _ in range(200):
        n = int(rng.integers(1, 13))
        p = rng.uniform(0.0, 1.0)
        edges = [(a, b) for a in range(n) for b in range(n) if a != b and rng.uniform() < p]
        graphs.append((n, edges))
    return graphs


# ============== DENSITY TESTS ==============

class TestDensity:
    """Tests for network density"""

    def test_one_of_two(self):
        assert network_density(make_network(2, [(0, 1)])) == 0.5

    def test_hundred_profiles(self):
        """1000 links among 100 profiles is 1000/9900"""
        edges = [(a, b) for a in range(100) for b in range(100) if a != b][:1000]
        assert network_density(make_network(100, edges)) == pytest.approx(1000 / 9900)

    def test_empty(self):
        assert network_density(make_network(10)) == 0.0
        assert network_density(make_network(1)) == 0.0

    def test_oracle(self, random_graphs):
        for n, edges in random_graphs:
            expected = len(edges) / (n * (n - 1)) if n > 1 else 0.0
            assert network_density(make_network(n, edges)) == expected


class TestMeanNetworkSize:
    """Tests for mean personal network size"""

    def test_no_links(self):
        assert mean_personal_network_size(make_network(10)) == 0.0

    def test_complete(self):
        edges = [(a, b) for a in range(10) for b in range(10) if a != b]
        assert mean_personal_network_size(make_network(10, edges)) == 9.0

    def test_mixed_degrees(self):
        """Out-degrees (0, 2, 4, 0, 0) average to 6/5"""
        edges = [(1, 0), (1, 2), (2, 0), (2, 1), (2, 3), (2, 4)]
        assert mean_personal_network_size(make_network(5, edges)) == pytest.approx(1.2)

    def test_empty_population(self):
        with pytest.raises(ValueError):
            mean_personal_network_size(Network())


# ============== CLUSTERING TESTS ==============

class TestClustering:
    """Tests for the clustering coefficient"""

    def test_triangle(self):
        assert clustering_coefficient(make_network(3, [(0, 1), (1, 2), (2, 0)])) == pytest.approx(1.0)

    def test_path(self):
        assert clustering_coefficient(make_network(3, [(0, 1), (1, 2)])) == 0.0

    def test_k4_minus_edge(self):
        """Local values (1, 1, 2/3, 2/3) average to 5/6"""
        edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]
        assert clustering_coefficient(make_network(4, edges)) == pytest.approx(5 / 6)

    def test_direction_ignored(self):
        """Reciprocal links count as one undirected edge"""
        one_way = make_network(3, [(0, 1), (1, 2), (2, 0)])
        both_ways = make_network(3, [(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2)])
        assert clustering_coefficient(one_way) == clustering_coefficient(both_ways)

    def test_low_degree_nodes_count_as_zero(self):
        """Isolated nodes pull the mean down"""
        assert clustering_coefficient(make_network(6, [(0, 1), (1, 2), (2, 0)])) == pytest.approx(0.5)

    def test_oracle(self, random_graphs):
        for n, edges in random_graphs:
            assert clustering_coefficient(make_network(n, edges)) == pytest.approx(
                brute_force_clustering(n, edges), abs=1e-12
            )


# ============== OUTLIER TESTS ==============

class TestOutliers:
    """Tests for outlier counts"""

    def test_fresh_network(self):
        net = initialize(Params(), make_streams(1))
        assert outlier_counts(net, 50) == (100, 0)

    def test_high_boundary_inclusive(self):
        """Out-degree 35 of 50 is high"""
        net = make_network(51, [(0, b) for b in range(1, 36)])
        low, high = outlier_counts(net, 50)
        assert high == 1
        assert low == 50

    def test_low_boundary_inclusive(self):
        """Out-degree 5 of 50 is low, 6 is not"""
        net = make_network(51, [(0, b) for b in range(1, 6)] + [(1, b) for b in range(2, 8)])
        low, _ = outlier_counts(net, 50)
        assert low == 50


# ============== AFFINITY TESTS ==============

class TestAffinityStats:
    """Tests for affinity mean and std"""

    @pytest.mark.parametrize("n,affinity", [(10, 0.3), (100, 0.1), (7, 0.7), (1, 0.42)])
    def test_all_equal(self, n, affinity):
        """Equal affinities give their value as mean and exactly zero std"""
        assert affinity_stats(make_network(n, affinity=affinity)) == (affinity, 0.0)

    def test_two_point(self):
        net = make_network(2)
        net.profiles[0].affinity = 0.0
        net.profiles[1].affinity = 1.0
        assert affinity_stats(net) == (0.5, 0.5)

    def test_uniform_std(self):
        rng = np.random.default_rng(9)
        net = Network()
        for value in rng.uniform(0.0, 1.0, 100_000):
            net.add_profile(30.0, float(value), 0.5, 0.5)
        assert affinity_stats(net)[1] == pytest.approx(0.2887, abs=0.01)


# ============== TIER COUNT TESTS ==============

class TestTierCounts:
    """Tests for per-tier link counts and the metrics row"""

    def test_empty(self):
        assert link_tier_counts(make_network(3)) == (0, 0, 0, 0, 0)

    def test_all_weakest(self):
        assert link_tier_counts(make_network(3, [(0, 1), (1, 2), (2, 0)])) == (0, 0, 0, 0, 3)

    def test_collect_metrics(self):
        net = make_network(4, [(0, 1), (1, 2), (2, 0)])
        net.set_tier(0, 1, Tier.STRONG)
        net.step_index = 7
        row = collect_metrics(net, max_network=3)
        assert row.step == 7
        assert row.density == pytest.approx(3 / 12)
        assert row.mean_net_size == pytest.approx(0.75)
        assert row.clustering == pytest.approx(0.75)
        assert row.tier_counts == (0, 1, 0, 0, 2)
        assert row.total_links == 3
