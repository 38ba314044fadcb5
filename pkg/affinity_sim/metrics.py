"""
Network Observations
Pure statistics over a Network snapshot; nothing here mutates the network
"""

from typing import Tuple

import networkx as nx
import numpy as np

from .models import MetricsRow
from .network import Network
from .tiers import Tier

# Outlier thresholds as percent of max_network, both inclusive
LOW_OUTLIER_PERCENT = 10
HIGH_OUTLIER_PERCENT = 70


def network_density(net: Network) -> float:
    n = len(net)
    if n < 2:
        return 0.0
    return net.link_count() / (n * (n - 1))


def mean_personal_network_size(net: Network) -> float:
    if len(net) == 0:
        raise ValueError("mean personal network size is undefined for an empty network")
    return net.link_count() / len(net)


def undirected_projection(net: Network) -> nx.Graph:
    """Graph with an edge wherever a link exists in either direction"""
    graph = nx.Graph()
    graph.add_nodes_from(net.ids())
    graph.add_edges_from((link.source, link.target) for link in net.links())
    return graph


def clustering_coefficient(net: Network) -> float:
    """Mean local clustering over all nodes; nodes of degree < 2 count as 0"""
    if len(net) == 0:
        return 0.0
    return float(nx.average_clustering(undirected_projection(net), count_zeros=True))


def outlier_counts(net: Network, max_network: int) -> Tuple[int, int]:
    """Profiles whose out-degree is <= 10% (low) or >= 70% (high) of max_network"""
    if max_network < 1:
        raise ValueError(f"max_network must be >= 1, got {max_network}")
    low = high = 0
    for pid in net.profiles:
        degree = net.out_degree(pid)
        if 100 * degree <= LOW_OUTLIER_PERCENT * max_network:
            low += 1
        if 100 * degree >= HIGH_OUTLIER_PERCENT * max_network:
            high += 1
    return low, high


def affinity_stats(net: Network) -> Tuple[float, float]:
    """Population mean and standard deviation of affinity"""
    if len(net) == 0:
        raise ValueError("affinity statistics are undefined for an empty network")
    affinities = np.fromiter((net.profiles[pid].affinity for pid in net.ids()), dtype=float, count=len(net))
    # Deviations from one member are exactly zero when all affinities are equal
    deviations = affinities - affinities[0]
    return float(affinities[0] + deviations.mean()), float(deviations.std())


def link_tier_counts(net: Network) -> Tuple[int, ...]:
    """Link count per tier, Strongest first"""
    counts = [0] * len(Tier)
    for pid in net.profiles:
        for tier in Tier:
            counts[tier] += net.tier_count(pid, tier)
    return tuple(counts)


def collect_metrics(net: Network, max_network: int) -> MetricsRow:
    mean_affinity, std_affinity = affinity_stats(net)
    low, high = outlier_counts(net, max_network)
    strongest, strong, medium, weak, weakest = link_tier_counts(net)
    return MetricsRow(
        step=net.step_index,
        density=network_density(net),
        mean_net_size=mean_personal_network_size(net),
        clustering=clustering_coefficient(net),
        mean_affinity=mean_affinity,
        std_affinity=std_affinity,
        low_outliers=low,
        high_outliers=high,
        links_strongest=strongest,
        links_strong=strong,
        links_medium=medium,
        links_weak=weak,
        links_weakest=weakest,
    )
