"""Topology queries checked against independent shortest-path oracles."""

import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netoco.graph import (Network, complete_graph, cycle_graph, from_edge_list_text,
                          from_json_dict, grid_graph, laplacian, make_network,
                          path_graph, ring_of_blocks, st_neighborhood, star_graph)


@st.composite
def networks(draw, max_n: int = 9):
    n = draw(st.integers(min_value=2, max_value=max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Network(n, [p for p, k in zip(pairs, keep) if k])


def _nx_graph(net: Network) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(net.vertex_count))
    g.add_edges_from(net.edges)
    return g


@settings(max_examples=60, deadline=None)
@given(networks())
def test_distances_match_networkx(net):
    lengths = dict(nx.all_pairs_shortest_path_length(_nx_graph(net)))
    for u in range(net.vertex_count):
        for v in range(net.vertex_count):
            expected = lengths[u].get(v, math.inf)
            assert net.distance(u, v) == expected, (u, v)


@settings(max_examples=60, deadline=None)
@given(networks(), st.integers(min_value=0, max_value=4))
def test_neighborhood_is_distance_ball(net, r):
    for v in range(net.vertex_count):
        ball = net.neighborhood(v, r)
        ring = net.boundary(v, r)
        assert ball == {u for u in range(net.vertex_count) if net.distance(v, u) <= r}
        assert ring == {u for u in range(net.vertex_count) if net.distance(v, u) == r}
        assert ring <= ball
        assert net.neighborhood(v, r - 1) | ring == ball


@settings(max_examples=40, deadline=None)
@given(networks())
def test_boundary_growth_dominates_every_vertex(net):
    h = net.boundary_growth(net.vertex_count)
    assert h[0] == 1
    for v in range(net.vertex_count):
        for gamma in range(net.vertex_count + 1):
            assert len(net.boundary(v, gamma)) <= h[gamma]


def test_boundary_growth_examples():
    assert cycle_graph(8).boundary_growth(4) == [1, 2, 2, 2, 1]
    assert star_graph(4).boundary_growth(3) == [1, 4, 3, 0]
    assert complete_graph(5).boundary_growth(2) == [1, 4, 0]


def test_generator_shapes():
    p = path_graph(5)
    assert (p.vertex_count, len(p.edges), p.diameter, p.max_degree) == (5, 4, 4, 2)
    c = cycle_graph(8)
    assert (c.vertex_count, len(c.edges), c.diameter, c.max_degree) == (8, 8, 4, 2)
    g = grid_graph(3, 4)
    assert (g.vertex_count, len(g.edges), g.diameter) == (12, 17, 5)
    s = star_graph(6)
    assert (s.vertex_count, s.diameter, s.max_degree, s.min_degree) == (7, 2, 6, 1)
    k = complete_graph(4)
    assert (len(k.edges), k.diameter) == (6, 1)


def test_ring_of_blocks_regularity():
    net = ring_of_blocks(4, 3)
    assert net.vertex_count == 12
    assert len(net.edges) == 4 * 3 * 3
    assert all(net.degree(v) == 6 for v in range(12))
    # same block: two hops via either neighboring block; adjacent blocks: one
    assert net.distance(0, 1) == 2
    assert net.distance(0, 3) == 1
    ring6 = ring_of_blocks(6, 2)
    assert ring6.diameter == 3
    assert ring6.distance(0, 6) == 3  # opposite blocks


def test_st_neighborhood_partition():
    net = path_graph(7)
    interior, boundary = st_neighborhood(net, t=2, v=3, k=3, r=2)
    assert interior == {(tau, u) for tau in (2, 3) for u in (2, 3, 4)}
    window = {(tau, u) for tau in (2, 3, 4) for u in (1, 2, 3, 4, 5)}
    assert interior | boundary == window
    assert interior & boundary == set()
    # final time slice is entirely boundary
    assert all((4, u) in boundary for u in (1, 2, 3, 4, 5))


@settings(max_examples=40, deadline=None)
@given(networks(max_n=7), st.integers(min_value=1, max_value=4),
       st.integers(min_value=1, max_value=3))
def test_st_neighborhood_window_property(net, k, r):
    v = 0
    interior, boundary = st_neighborhood(net, 1, v, k, r)
    ball = net.neighborhood(v, r)
    assert interior.isdisjoint(boundary)
    assert interior | boundary == {(tau, u) for tau in range(1, 1 + k) for u in ball}
    for (tau, u) in interior:
        assert tau < 1 + k - 1
        assert net.distance(v, u) <= r - 1


def test_serialization_round_trips():
    net = grid_graph(3, 3)
    assert from_json_dict(net.to_json_dict()) == net
    assert from_edge_list_text(net.to_edge_list_text()) == net
    assert hash(from_json_dict(net.to_json_dict())) == hash(net)

    parsed = from_edge_list_text("0 1\n# comment\n1 2  # trailing\n", vertex_count=4)
    assert parsed.vertex_count == 4
    assert parsed.edges == ((0, 1), (1, 2))


def test_validation_errors():
    with pytest.raises(ValueError, match="self-loop"):
        Network(3, [(1, 1)])
    with pytest.raises(ValueError, match="out of range"):
        Network(3, [(0, 3)])
    with pytest.raises(ValueError):
        Network(0, [])
    with pytest.raises(ValueError):
        cycle_graph(2)
    with pytest.raises(ValueError):
        ring_of_blocks(2, 2)
    with pytest.raises(ValueError, match="unknown graph generator"):
        make_network("torus", n=4)
    with pytest.raises(ValueError, match="expected 'u v'"):
        from_edge_list_text("0 1 2\n")
    net = path_graph(3)
    with pytest.raises(ValueError, match="out of range"):
        net.distance(0, 5)


def test_disconnected_graph_reports_inf():
    net = Network(5, [(0, 1), (2, 3)])
    assert not net.is_connected
    assert net.distance(0, 2) == math.inf
    assert net.diameter == math.inf
    assert net.eccentricity(0) == math.inf
    assert net.neighborhood(0, 10) == {0, 1}


def test_edges_within_and_closure():
    net = cycle_graph(6)
    assert net.edges_within({0, 1, 2}) == [(0, 1), (1, 2)]
    assert net.closure({0}) == {0, 1, 5}
    assert net.closure({1, 2}) == {0, 1, 2, 3}


def test_laplacian_structure():
    net = cycle_graph(8)
    L = laplacian(net)
    assert np.allclose(L, L.T)
    assert np.allclose(L @ np.ones(8), 0.0)
    assert np.allclose(np.diag(L), [net.degree(v) for v in range(8)])
    rng = np.random.default_rng(0)
    x = rng.standard_normal(8)
    quad = sum((x[u] - x[v]) ** 2 for u, v in net.edges)
    assert abs(x @ L @ x - quad) < 1e-12 * max(1.0, abs(quad))
    assert np.linalg.eigvalsh(L).min() > -1e-12


def test_make_network_registry_matches_generators():
    assert make_network("cycle", n=8) == cycle_graph(8)
    assert make_network("grid", rows=2, cols=5) == grid_graph(2, 5)
    assert make_network("ring_of_blocks", N=4, d=2) == ring_of_blocks(4, 2)
