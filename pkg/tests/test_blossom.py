"""Exact minimum-weight perfect matching against reference implementations."""

import itertools

import networkx as nx
import numpy as np
import pytest

from ssqec._blossom import min_weight_perfect_matching


def _brute_force_weight(dist: np.ndarray) -> int:
    n = dist.shape[0]

    def rec(nodes):
        if not nodes:
            return 0
        a = nodes[0]
        rest = nodes[1:]
        return min(
            dist[a, b] + rec(tuple(x for x in rest if x != b)) for b in rest
        )

    return rec(tuple(range(n)))


def _nx_min_weight(dist: np.ndarray) -> int:
    n = dist.shape[0]
    g = nx.Graph()
    big = int(dist.max()) + 1
    for i, j in itertools.combinations(range(n), 2):
        g.add_edge(i, j, weight=big - int(dist[i, j]))
    mate = nx.algorithms.matching.max_weight_matching(g, maxcardinality=True)
    assert len(mate) == n // 2
    return sum(int(dist[i, j]) for i, j in mate)


def _matching_weight(dist: np.ndarray, mate: np.ndarray) -> int:
    n = dist.shape[0]
    assert sorted(mate.tolist()) == list(range(n))
    total = 0
    for i in range(n):
        j = int(mate[i])
        assert mate[j] == i and j != i
        if i < j:
            total += int(dist[i, j])
    return total


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_matches_brute_force(n):
    rng = np.random.default_rng(n)
    for _ in range(40):
        dist = rng.integers(0, 50, size=(n, n))
        dist = dist + dist.T
        np.fill_diagonal(dist, 0)
        mate = min_weight_perfect_matching(dist)
        assert _matching_weight(dist, mate) == _brute_force_weight(dist)


@pytest.mark.parametrize("n", [12, 16, 20, 30])
def test_matches_networkx(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(15):
        dist = rng.integers(0, 100, size=(n, n))
        dist = dist + dist.T
        np.fill_diagonal(dist, 0)
        mate = min_weight_perfect_matching(dist)
        assert _matching_weight(dist, mate) == _nx_min_weight(dist)


def test_torus_metric_instances():
    # Distances from a periodic 5x5 grid: triangle inequality holds, many ties.
    L = 5
    coords = [(r, c) for r in range(L) for c in range(L)]

    def d(a, b):
        dr = abs(a[0] - b[0])
        dc = abs(a[1] - b[1])
        return min(dr, L - dr) + min(dc, L - dc)

    rng = np.random.default_rng(3)
    for _ in range(25):
        pts = rng.choice(len(coords), size=8, replace=False)
        dist = np.array(
            [[d(coords[a], coords[b]) for b in pts] for a in pts]
        )
        mate = min_weight_perfect_matching(dist)
        assert _matching_weight(dist, mate) == _brute_force_weight(dist)


def test_two_nodes():
    mate = min_weight_perfect_matching(np.array([[0, 7], [7, 0]]))
    assert mate.tolist() == [1, 0]


def test_zero_weights_all_tied():
    mate = min_weight_perfect_matching(np.zeros((6, 6), dtype=np.int64))
    assert _matching_weight(np.zeros((6, 6), dtype=np.int64), mate) == 0


def test_odd_node_count_rejected():
    with pytest.raises(ValueError):
        min_weight_perfect_matching(np.zeros((3, 3), dtype=np.int64))


def test_greedy_trap():
    # Chain where the locally cheapest edge (1-2) forces an expensive pairing;
    # optimum pairs (0-1)(2-3): 2+2=4, greedy (1-2) would cost 1+9=10.
    dist = np.array(
        [
            [0, 2, 9, 9],
            [2, 0, 1, 9],
            [9, 1, 0, 2],
            [9, 9, 2, 0],
        ]
    )
    mate = min_weight_perfect_matching(dist)
    assert _matching_weight(dist, mate) == 4
