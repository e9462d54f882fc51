"""KS machinery, scaling verification runs, mass bounds, tree diagnostics."""

import math

import numpy as np
import pytest

from denseust import seeding, thresholds
from denseust.crt import stick_increment_cdf
from denseust.graphon import StepGraphon, bipartite_graphon
from denseust.graphs import WeightedGraph, complete, complete_bipartite
from denseust.seeding import derived_rng
from denseust.stats import (
    EmpiricalDistribution,
    ExperimentConfig,
    goodtree_check,
    ks_distance,
    ks_two_sample,
    lmb_experiment,
    lower_mass_bound,
    lower_mass_bound_brute,
    resolve_graph,
    two_point_cdf,
    verify_scaling,
)
from denseust.ust import wilson_prefix, wilson_ust


def path_graph(n):
    w = np.zeros((n, n))
    for i in range(n - 1):
        w[i, i + 1] = w[i + 1, i] = 1.0
    return WeightedGraph(w)


# --------------------------------------------------------------------- ks

def test_ks_distance_inverse_cdf_grid():
    # Samples placed exactly at CDF^{-1} of a uniform grid: the empirical
    # CDF interleaves the target within 1/m.
    m = 500
    us = (np.arange(m) + 0.5) / m
    xs = np.sqrt(-2 * np.log1p(-us))
    ks = ks_distance(xs, two_point_cdf)
    assert ks <= 1.0 / m + 1e-12


def test_ks_distance_uniform_seeded():
    rng = derived_rng(1, seeding.CRT)
    m = 10000
    xs = rng.random(m)
    ks = ks_distance(xs, lambda x: np.clip(x, 0.0, 1.0))
    assert ks <= 1.63 / math.sqrt(m)


def test_ks_distance_hand_case():
    # Single sample at the median of uniform: D = 1/2 both sides.
    ks = ks_distance([0.5], lambda x: np.clip(x, 0.0, 1.0))
    assert abs(ks - 0.5) < 1e-12


def test_ks_two_sample_bounds():
    assert ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    assert ks_two_sample([0.0], [1.0]) == 1.0
    a = [0.0, 1.0]
    b = [0.5]
    assert abs(ks_two_sample(a, b) - 0.5) < 1e-12


def test_two_point_cdf_is_zero_length_increment_law():
    xs = np.linspace(0, 3, 50)
    assert np.allclose(two_point_cdf(xs), stick_increment_cdf(0.0, xs))


def test_empirical_distribution():
    emp = EmpiricalDistribution([3.0, 1.0, 2.0])
    assert emp.count == 3
    assert emp.cdf(0.5) == 0.0
    assert emp.cdf(1.0) == pytest.approx(1 / 3)
    assert emp.cdf(2.5) == pytest.approx(2 / 3)
    assert emp.cdf(9.0) == 1.0


# ------------------------------------------------------------------ config

def test_config_validation():
    good = ExperimentConfig(source={"family": "complete", "n": 50})
    good.validate()
    with pytest.raises(ValueError):
        ExperimentConfig(source={}, k=1).validate()
    with pytest.raises(ValueError):
        ExperimentConfig(source={}, replicates=0).validate()
    with pytest.raises(ValueError):
        ExperimentConfig(source={}, rescale="magic").validate()
    with pytest.raises(ValueError):
        ExperimentConfig(source={}, rescale="fixed").validate()
    with pytest.raises(ValueError):
        ExperimentConfig(source="complete").validate()


def test_resolve_graph_families():
    G = resolve_graph({"family": "complete", "n": 9}, 0)
    assert G.n == 9 and G.total_weight == 9 * 8
    G = resolve_graph({"family": "complete_bipartite", "a": 2, "b": 5}, 0)
    assert G.n == 7
    G = resolve_graph({"family": "bipartite", "n": 30}, 0)
    assert sorted(np.unique(G.degrees)) == [10, 20]
    with pytest.raises(ValueError):
        resolve_graph({"family": "petersen", "n": 10}, 0)
    with pytest.raises(ValueError):
        resolve_graph({"n": 10}, 0)


def test_resolve_graph_graphon_modes():
    W = bipartite_graphon()
    a = resolve_graph({"graphon": W, "n": 40, "mode": "g"}, 5)
    b = resolve_graph({"graphon": W.to_json(), "n": 40, "mode": "g"}, 5)
    assert np.array_equal(a.weights, b.weights)
    with pytest.raises(ValueError):
        resolve_graph({"graphon": W, "n": 40, "mode": "x"}, 5)


def test_resolve_graph_same_seed_same_instance():
    src = {"graphon": StepGraphon.constant(0.5).to_json(), "n": 60,
           "mode": "g"}
    a = resolve_graph(src, 7)
    b = resolve_graph(src, 7)
    c = resolve_graph(src, 8)
    assert np.array_equal(a.weights, b.weights)
    assert not np.array_equal(a.weights, c.weights)


# --------------------------------------------------------- verify_scaling

def test_verify_scaling_report_fields():
    cfg = ExperimentConfig(source={"family": "complete", "n": 300},
                           k=2, replicates=120, seed=3)
    rep = verify_scaling(cfg)
    assert rep["n"] == 300
    assert rep["alpha"] == 1.0
    assert rep["alpha_stderr"] is None
    assert rep["factor"] == pytest.approx(1.0 / math.sqrt(300))
    assert rep["ks"]["joint"] is None
    assert 0 <= rep["ks"]["two_point"] <= 1
    assert rep["moments"]["count"] == 120
    assert isinstance(rep["pass"], bool)
    assert rep["csv_schema"].startswith("replicate,")


def test_verify_scaling_mean_near_rayleigh():
    cfg = ExperimentConfig(source={"family": "complete", "n": 900},
                           k=2, replicates=500, seed=4)
    rep = verify_scaling(cfg)
    want = math.sqrt(math.pi / 2)
    sd = math.sqrt((2 - math.pi / 2) / 500)
    assert abs(rep["moments"]["mean"] - want) < max(4 * sd, 0.06 * want)


def test_verify_scaling_k3_joint():
    cfg = ExperimentConfig(source={"family": "complete", "n": 400},
                           k=3, replicates=150, seed=5, crt_replicates=300)
    rep = verify_scaling(cfg)
    assert rep["ks"]["joint"] is not None
    assert rep["moments"]["count"] == 150 * 3


def test_verify_scaling_csv_deterministic(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    for out in (out1, out2):
        cfg = ExperimentConfig(source={"family": "complete", "n": 200},
                               k=2, replicates=50, seed=6, out=str(out))
        verify_scaling(cfg)
    assert out1.read_bytes() == out2.read_bytes()
    header = out1.read_text().splitlines()[0]
    assert header == "replicate,i,j,raw_distance,rescaled_distance"


def test_verify_scaling_fixed_alpha_changes_factor_only(tmp_path):
    src = {"family": "complete", "n": 250}
    a = verify_scaling(ExperimentConfig(source=src, k=2, replicates=60,
                                        seed=7))
    b = verify_scaling(ExperimentConfig(source=src, k=2, replicates=60,
                                        seed=7, rescale="fixed", alpha=4.0))
    assert b["factor"] == pytest.approx(2 * a["factor"])
    assert b["moments"]["mean"] == pytest.approx(2 * a["moments"]["mean"])


def test_verify_scaling_alpha_mc_close_to_exact():
    src = {"family": "complete", "n": 600}
    cfg = ExperimentConfig(source=src, k=2, replicates=100, seed=8,
                           rescale="alpha_mc", kappa=0.02)
    rep = verify_scaling(cfg)
    assert rep["alpha_stderr"] is not None
    assert abs(rep["alpha"] - 1.0) < max(5 * rep["alpha_stderr"], 0.08)


def test_verify_scaling_rejects_bad_inputs():
    with pytest.raises(ValueError):
        verify_scaling(ExperimentConfig(
            source={"family": "complete", "n": 5}, k=9, replicates=5))
    w = np.zeros((4, 4))
    w[0, 1] = w[1, 0] = 1.0
    w[2, 3] = w[3, 2] = 1.0
    with pytest.raises(ValueError):
        verify_scaling(ExperimentConfig(source={}, k=2, replicates=5),
                       graph=WeightedGraph(w))


# -------------------------------------------------------- lower mass bound

def test_lmb_path_tree_golden():
    G = path_graph(49)
    T = wilson_ust(G, rng=derived_rng(9, seeding.WILSON))
    # r = floor(c * 7); end vertices have the smallest balls: r + 1 points.
    for c in (0.3, 0.5, 1.0):
        r = math.floor(c * math.sqrt(49))
        assert lower_mass_bound(T, c) == (r + 1) / 49


def test_lmb_star_tree():
    G = complete_bipartite(1, 30)
    T = wilson_ust(G, rng=derived_rng(10, seeding.WILSON))
    # radius floor(c sqrt(31)) >= 2 covers the whole star from any leaf
    assert lower_mass_bound(T, 0.5) == 1.0


def test_lmb_radius_past_diameter_is_one():
    T = wilson_ust(complete(64), rng=derived_rng(11, seeding.WILSON))
    from denseust.ust import diameter
    c = (diameter(T) + 1) / math.sqrt(64)
    assert lower_mass_bound(T, c) == 1.0


def test_lmb_truncated_matches_brute():
    for n, seed in ((60, 12), (150, 13), (300, 14)):
        T = wilson_ust(complete(n), rng=derived_rng(seed, seeding.WILSON))
        for c in (0.1, 0.4, 0.8, 1.5):
            assert lower_mass_bound(T, c) == lower_mass_bound_brute(T, c)


def test_lmb_monotone_in_c():
    T = wilson_ust(complete(120), rng=derived_rng(15, seeding.WILSON))
    vals = [lower_mass_bound(T, c) for c in (0.2, 0.5, 1.0, 2.0)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_lmb_rejects_bad_c():
    T = wilson_ust(complete(10), rng=derived_rng(16, seeding.WILSON))
    with pytest.raises(ValueError):
        lower_mass_bound(T, 0.0)


def test_lmb_single_vertex():
    G = complete(1)
    T = wilson_ust(G, rng=derived_rng(17, seeding.WILSON))
    assert lower_mass_bound(T, 1.0) == 1.0


def test_lmb_experiment_report():
    rep = lmb_experiment({"family": "complete", "n": 150}, c=1.0,
                         replicates=12, seed=18)
    qs = rep["quantiles"]
    assert qs["p5"] <= qs["p25"] <= qs["p50"] <= qs["p75"] <= qs["p95"]
    assert rep["min"] <= qs["p5"] and qs["p95"] <= rep["max"]
    assert 0.0 <= rep["fraction_below_eps"] <= 1.0
    assert rep["golden_p5"] == thresholds.LMB_GOLDEN_P5
    assert rep["config"]["eps"] == thresholds.LMB_EPS
    rep2 = lmb_experiment({"family": "complete", "n": 150}, c=1.0,
                          replicates=12, seed=18)
    assert rep == rep2


def test_lmb_experiment_fraction_monotone_in_eps():
    src = {"family": "complete", "n": 150}
    fracs = [lmb_experiment(src, 0.5, 10, 19,
                            eps=e)["fraction_below_eps"]
             for e in (0.01, 0.05, 0.2)]
    assert fracs[0] <= fracs[1] <= fracs[2]


# ---------------------------------------------------------------- goodtree

def test_goodtree_prefix_passes_on_complete():
    G = complete(800)
    run = wilson_prefix(G, [0, 1], derived_rng(20, seeding.WILSON))
    rep = goodtree_check(G, run, kappa=1 / 32, inner_reps=600,
                         rng=derived_rng(21, seeding.SUBSETS))
    assert rep["is_tree"]
    assert rep["M"] == math.ceil(800 ** (1 / 32))
    if rep["subsets"]:
        assert rep["fraction_within"] >= 0.5


def test_goodtree_full_tree_size_fails():
    # A spanning tree has n vertices, far above n^(1/2 + kappa).
    G = complete(50)
    T = wilson_ust(G, rng=derived_rng(22, seeding.WILSON))
    rep = goodtree_check(G, T, kappa=0.02, inner_reps=50,
                         rng=derived_rng(23, seeding.SUBSETS))
    assert rep["is_tree"]
    assert not rep["size_ok"]
    assert not rep["pass"]


def test_goodtree_tiny_prefix_vacuous():
    G = path_graph(3)
    run = wilson_prefix(G, [0, 1], derived_rng(24, seeding.WILSON))
    rep = goodtree_check(G, run, kappa=0.02, inner_reps=10,
                         rng=derived_rng(25, seeding.SUBSETS))
    # size 2 with min subset size 1: subsets sampled, verdicts recorded
    assert rep["is_tree"]
    assert rep["size"] == 2
    assert isinstance(rep["fraction_within"], float)


def test_goodtree_validates():
    G = complete(50)
    T = wilson_ust(G, rng=derived_rng(26, seeding.WILSON))
    rng = derived_rng(27, seeding.SUBSETS)
    with pytest.raises(ValueError):
        goodtree_check(G, T, kappa=0.5, inner_reps=10, rng=rng)
    with pytest.raises(ValueError):
        goodtree_check(G, T, kappa=0.02, inner_reps=0, rng=rng)


def test_goodtree_detects_foreign_edges():
    # Tree edges must exist in the graph the check runs against.
    G = path_graph(4)
    T = wilson_ust(complete(4), rng=derived_rng(28, seeding.WILSON))
    rep = goodtree_check(G, T, kappa=0.02, inner_reps=10,
                         rng=derived_rng(29, seeding.SUBSETS))
    if any(T.parent[v] >= 0 and G.weights[v, T.parent[v]] == 0
           for v in range(4)):
        assert not rep["is_tree"]
