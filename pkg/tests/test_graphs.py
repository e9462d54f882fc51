"""Weighted graphs, families, sampling, alpha constant, expansion."""

import json

import numpy as np
import pytest

from denseust import seeding
from denseust.graphs import (
    GAMMA_EXACT_CAP,
    WeightedGraph,
    alpha_tilde,
    complete,
    complete_bipartite,
    component_labels,
    connected_components,
    expander_gamma_exact,
    expander_gamma_mc,
    load_graph,
    min_degree_density,
    sample_g,
    sample_h,
    save_graph,
)
from denseust.seeding import derived_rng


def two_k4_bridge():
    # Two K4 blocks joined by a single edge 3-4.
    w = np.zeros((8, 8))
    for block in (range(4), range(4, 8)):
        for i in block:
            for j in block:
                if i < j:
                    w[i, j] = w[j, i] = 1.0
    w[3, 4] = w[4, 3] = 1.0
    return WeightedGraph(w)


# ------------------------------------------------------------- validation

def test_rejects_nonsquare():
    with pytest.raises(ValueError):
        WeightedGraph(np.ones((2, 3)))


def test_rejects_asymmetric():
    w = np.zeros((3, 3))
    w[0, 1] = 1.0
    with pytest.raises(ValueError):
        WeightedGraph(w)


def test_rejects_nonzero_diagonal():
    w = np.ones((3, 3))
    with pytest.raises(ValueError):
        WeightedGraph(w)


def test_rejects_negative_and_nonfinite():
    w = np.zeros((2, 2))
    w[0, 1] = w[1, 0] = -1.0
    with pytest.raises(ValueError):
        WeightedGraph(w)
    w[0, 1] = w[1, 0] = np.inf
    with pytest.raises(ValueError):
        WeightedGraph(w)


def test_weights_frozen():
    G = complete(4)
    with pytest.raises(ValueError):
        G.weights[0, 1] = 5.0


# --------------------------------------------------------------- families

def test_complete_shape():
    G = complete(5)
    assert G.n == 5
    assert G.total_weight == 5 * 4
    assert np.all(G.degrees == 4)


def test_complete_bipartite_shape():
    G = complete_bipartite(2, 3)
    assert G.n == 5
    assert G.weights[0, 1] == 0 and G.weights[2, 3] == 0
    assert G.weights[0, 2] == 1 and G.weights[1, 4] == 1
    assert sorted(G.degrees) == [2, 2, 2, 3, 3]


def test_degree_and_neighbors():
    G = complete_bipartite(1, 3)
    assert G.degree(0) == 3
    assert list(G.neighbors(0)) == [1, 2, 3]
    assert list(G.neighbors(1)) == [0]


# ----------------------------------------------------------- alpha_tilde

def test_alpha_tilde_complete_exact():
    for n in (3, 50, 1000):
        assert alpha_tilde(complete(n)) == 1.0


def test_alpha_tilde_bipartite():
    # One-third/two-thirds split has constant 9/8.
    for n in (30, 300):
        a = n // 3
        got = alpha_tilde(complete_bipartite(a, n - a))
        assert abs(got - 9.0 / 8.0) < 1e-12


def test_alpha_tilde_star():
    # Star on m leaves: degrees (m, 1, ..., 1), total 2m.
    # sum d_v^2 = m^2 + m, alpha = n * (m^2 + m) / (2m)^2 = (m + 1)^2 / (4m).
    for m in (3, 7):
        G = complete_bipartite(1, m)
        want = (m + 1) ** 2 / (4.0 * m)
        assert abs(alpha_tilde(G) - want) < 1e-12


def test_min_degree_density():
    assert min_degree_density(complete(10)) == 9.0 / 10.0
    G = complete_bipartite(2, 6)
    assert min_degree_density(G) == 2.0 / 8.0


# ---------------------------------------------------------------- sampling

def test_sample_g_constant_one_gives_complete():
    from denseust.graphon import StepGraphon
    W = StepGraphon.constant(1.0)
    G = sample_g(12, W, derived_rng(0, seeding.EDGES))
    assert np.array_equal(G.weights, complete(12).weights)


def test_sample_g_entries_binary():
    from denseust.graphon import StepGraphon
    W = StepGraphon.constant(0.5)
    G = sample_g(30, W, derived_rng(1, seeding.EDGES))
    vals = np.unique(G.weights)
    assert set(vals).issubset({0.0, 1.0})


def test_sample_h_entries_are_graphon_values():
    from denseust.graphon import bipartite_graphon
    W = bipartite_graphon()
    G = sample_h(25, W, derived_rng(2, seeding.EDGES))
    assert set(np.unique(G.weights)).issubset({0.0, 1.0})
    # h-mode is deterministic given latents: w_ij = W(x_i, x_j)
    x = G.latents
    for _ in range(50):
        i, j = np.random.default_rng(3).integers(0, 25, 2)
        if i != j:
            assert G.weights[i, j] == W.eval(x[i], x[j])


def test_g_and_h_share_latents():
    from denseust.graphon import StepGraphon
    W = StepGraphon.constant(0.7)
    Gg = sample_g(20, W, derived_rng(5, seeding.EDGES))
    Gh = sample_h(20, W, derived_rng(5, seeding.EDGES))
    assert np.array_equal(Gg.latents, Gh.latents)


def test_sample_g_edge_rate_near_density():
    from denseust.graphon import StepGraphon
    p = 0.3
    n = 400
    W = StepGraphon.constant(p)
    G = sample_g(n, W, derived_rng(7, seeding.EDGES))
    pairs = n * (n - 1) / 2
    rate = G.total_weight / 2 / pairs
    sigma = np.sqrt(p * (1 - p) / pairs)
    assert abs(rate - p) < 4 * sigma


# -------------------------------------------------------------- components

def test_connected_components_counts():
    assert connected_components(complete(6)) == 1
    w = np.zeros((4, 4))
    w[0, 1] = w[1, 0] = 1.0
    w[2, 3] = w[3, 2] = 1.0
    G = WeightedGraph(w)
    assert connected_components(G) == 2
    labels = component_labels(G)
    assert labels[0] == labels[1] and labels[2] == labels[3]
    assert labels[0] != labels[2]
    assert not G.is_connected()


def test_isolated_vertices_are_components():
    G = WeightedGraph(np.zeros((3, 3)))
    assert connected_components(G) == 3


# ---------------------------------------------------------------- expander

def test_gamma_complete_is_one():
    for n in (3, 6, 10):
        assert abs(expander_gamma_exact(complete(n)) - 1.0) < 1e-12


def test_gamma_two_k4_bridge():
    # Worst cut separates the blocks: weight 1 across, |S||S^c| = 16.
    G = two_k4_bridge()
    got = expander_gamma_exact(G)
    assert abs(got - 1.0 / 16.0) < 1e-12


def test_gamma_exact_rejects_large():
    with pytest.raises(ValueError):
        expander_gamma_exact(complete(GAMMA_EXACT_CAP + 1))


def test_gamma_mc_upper_bounds_exact():
    # MC minimizes over sampled cuts only, so it can only overestimate.
    G = two_k4_bridge()
    exact = expander_gamma_exact(G)
    for s in range(4):
        mc = expander_gamma_mc(G, derived_rng(s, seeding.GAMMA), trials=300)
        assert mc >= exact - 1e-12
    # With enough trials on 8 vertices the bridge cut is found.
    mc = expander_gamma_mc(G, derived_rng(11, seeding.GAMMA), trials=2000)
    assert abs(mc - exact) < 1e-12


# -------------------------------------------------------------------- json

def test_json_round_trip(tmp_path):
    w = np.zeros((4, 4))
    w[0, 1] = w[1, 0] = 0.5
    w[1, 2] = w[2, 1] = 1.0
    w[2, 3] = w[3, 2] = 2.0
    G = WeightedGraph(w)
    path = tmp_path / "g.json"
    save_graph(G, str(path))
    H = load_graph(str(path))
    assert H.n == 4
    assert np.array_equal(H.weights, G.weights)
    obj = json.loads(path.read_text())
    assert obj["n"] == 4
    assert all(i < j for i, j, _ in obj["edges"])


def test_from_json_rejects_bad_indices():
    with pytest.raises(ValueError):
        WeightedGraph.from_json({"n": 3, "edges": [[1, 0, 1.0]]})
    with pytest.raises(ValueError):
        WeightedGraph.from_json({"n": 3, "edges": [[0, 3, 1.0]]})
