"""Uniform spanning trees of dense weighted graphs and their scaling limit.

The package samples spanning trees by loop-erased branch growth, computes
the scaling constants that turn tree distances into continuum ones, builds
continuum reference trees by stick breaking, and ships the experiments
that compare the two worlds.
"""

__version__ = "0.1.0"

from .crt import (MarkedTree, StickSequence, attachment_uniformity_test,
                  crt_distance_matrix, crt_sample_sticks,
                  discrete_stick_encoding, perturbation_check, sb_build,
                  stick_increment_cdf)
from .graphon import (StepGraphon, alpha_w, bipartite_graphon,
                      cut_distance_upper, cut_norm, graphon_of_graph,
                      is_connected, load_graphon, save_graphon)
from .graphs import (WeightedGraph, alpha_tilde, complete,
                     complete_bipartite, expander_gamma_exact,
                     expander_gamma_mc, load_graph, min_degree_density,
                     sample_g, sample_h, save_graph)
from .seeding import derived_rng
from .stats import (EmpiricalDistribution, ExperimentConfig, goodtree_check,
                    ks_distance, ks_two_sample, lmb_experiment,
                    lower_mass_bound, resolve_graph, verify_scaling)
from .ust import (BranchPrefix, SpanningTree, diameter, distance_matrix,
                  edge_prob_exact, height, laplacian_next_step_dist,
                  lerw_to_set, load_tree, loop_erase, save_tree,
                  tree_distance, wilson_prefix, wilson_ust)
from .walk import (alpha_n_capacity, capacity_exact, capacity_mc,
                   check_mixing_bound, closeness_mc, hitting_prob_exact,
                   hitting_prob_plus_exact, mixing_time_exact, stationary,
                   transition_matrix)

__all__ = [
    "__version__",
    "MarkedTree", "StickSequence", "attachment_uniformity_test",
    "crt_distance_matrix", "crt_sample_sticks", "discrete_stick_encoding",
    "perturbation_check", "sb_build", "stick_increment_cdf",
    "StepGraphon", "alpha_w", "bipartite_graphon", "cut_distance_upper",
    "cut_norm", "graphon_of_graph", "is_connected", "load_graphon",
    "save_graphon",
    "WeightedGraph", "alpha_tilde", "complete", "complete_bipartite",
    "expander_gamma_exact", "expander_gamma_mc", "load_graph",
    "min_degree_density", "sample_g", "sample_h", "save_graph",
    "derived_rng",
    "EmpiricalDistribution", "ExperimentConfig", "goodtree_check",
    "ks_distance", "ks_two_sample", "lmb_experiment", "lower_mass_bound",
    "resolve_graph", "verify_scaling",
    "BranchPrefix", "SpanningTree", "diameter", "distance_matrix",
    "edge_prob_exact", "height", "laplacian_next_step_dist", "lerw_to_set",
    "load_tree", "loop_erase", "save_tree", "tree_distance",
    "wilson_prefix", "wilson_ust",
    "alpha_n_capacity", "capacity_exact", "capacity_mc",
    "check_mixing_bound", "closeness_mc", "hitting_prob_exact",
    "hitting_prob_plus_exact", "mixing_time_exact", "stationary",
    "transition_matrix",
]
