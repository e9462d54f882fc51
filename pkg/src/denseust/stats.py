"""KS statistics, the scaling-limit experiment, and tree diagnostics.

The headline experiment samples spanning trees, rescales pairwise
distances among uniformly marked vertices by sqrt(alpha)/sqrt(n), and
compares them against the corresponding continuum laws. The limit
statements are asymptotic with no rate, so every tolerance here is a
pilot-calibrated constant from thresholds.py, and reports say so.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import seeding, thresholds
from .crt import crt_distance_matrix, stick_increment_cdf
from .graphon import StepGraphon, load_graphon
from .graphs import (WeightedGraph, alpha_tilde, complete, complete_bipartite,
                     connected_components, load_graph, sample_g, sample_h)
from .seeding import derived_rng
from .ust import BranchPrefix, _bfs_depths, chain_distance, wilson_prefix, \
    wilson_ust
from .walk import KAPPA_MAX, alpha_n_capacity, capacity_mc

ASYMPTOTIC_NOTE = ("limit theorems carry no finite-size rate; thresholds "
                   "are pilot-calibrated, see thresholds.py")


class EmpiricalDistribution:
    """Sorted sample container with ECDF evaluation."""

    def __init__(self, samples):
        arr = np.sort(np.asarray(samples, dtype=float))
        if arr.size == 0:
            raise ValueError("need at least one sample")
        self.samples = arr
        self.count = int(arr.size)

    def cdf(self, x):
        return np.searchsorted(self.samples, x, side="right") / self.count


def ks_distance(samples, cdf):
    """sup |ECDF - cdf| over the sample points (where the sup is attained)."""
    xs = np.sort(np.asarray(samples, dtype=float))
    m = xs.size
    if m == 0:
        raise ValueError("need at least one sample")
    F = np.asarray(cdf(xs), dtype=float)
    grid = np.arange(1, m + 1) / m
    d_plus = float((grid - F).max())
    d_minus = float((F - (grid - 1.0 / m)).max())
    return max(d_plus, d_minus, 0.0)


def ks_two_sample(a, b):
    """sup distance between the two ECDFs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("need at least one sample on each side")
    grid = np.concatenate([a, b])
    Fa = np.searchsorted(a, grid, side="right") / a.size
    Fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(Fa - Fb).max())


def two_point_cdf(x):
    """CDF of the distance between two uniform CRT points, 1 - exp(-x^2/2)."""
    return stick_increment_cdf(0.0, x)


@dataclass
class ExperimentConfig:
    """Inputs of a scaling-limit run.

    source examples: {"family": "complete", "n": 2000},
    {"family": "complete_bipartite", "a": 1000, "b": 2000},
    {"file": "graph.json"}, {"graphon": "w.json", "n": 500, "mode": "g"}.
    rescale: "alpha_tilde" (exact per-graph constant), "alpha_mc"
    (capacity-based estimate), or "fixed" (use .alpha as given).
    """

    source: dict
    k: int = 2
    replicates: int = 100
    rescale: str = "alpha_tilde"
    alpha: float = None
    seed: int = 0
    out: str = None
    kappa: float = 0.02
    crt_replicates: int = None

    def validate(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.replicates < 1:
            raise ValueError("need at least one replicate")
        if self.rescale not in ("alpha_tilde", "alpha_mc", "fixed"):
            raise ValueError("unknown rescale mode %r" % self.rescale)
        if self.rescale == "fixed":
            if self.alpha is None or self.alpha <= 0:
                raise ValueError("fixed rescaling needs alpha > 0")
        if not isinstance(self.source, dict):
            raise ValueError("source must be a dict")


def resolve_graph(source, seed):
    """Build the graph instance a config's source field describes."""
    if "file" in source:
        return load_graph(source["file"])
    if "family" in source:
        fam = source["family"]
        if fam == "complete":
            return complete(int(source["n"]))
        if fam in ("complete_bipartite", "bipartite"):
            if "a" in source:
                a, b = int(source["a"]), int(source["b"])
            else:
                n = int(source["n"])
                a = n // 3
                b = n - a
            return complete_bipartite(a, b)
        raise ValueError("unknown family %r" % fam)
    if "graphon" in source:
        w = source["graphon"]
        W = w if isinstance(w, StepGraphon) else (
            StepGraphon.from_json(w) if isinstance(w, dict)
            else load_graphon(w))
        n = int(source["n"])
        mode = source.get("mode", "g")
        rng = derived_rng(seed, seeding.EDGES)
        if mode == "g":
            return sample_g(n, W, rng)
        if mode == "h":
            return sample_h(n, W, rng)
        raise ValueError("graphon sampling mode must be 'g' or 'h'")
    raise ValueError("source must name a family, file, or graphon")


def _resolve_alpha(config, G):
    if config.rescale == "alpha_tilde":
        return alpha_tilde(G), None
    if config.rescale == "fixed":
        return float(config.alpha), None
    est = alpha_n_capacity(G, config.kappa, outer_reps=1500, inner_reps=1600,
                           rng=derived_rng(config.seed, seeding.OUTER))
    return est.estimate, est.stderr


CSV_SCHEMA = "replicate,i,j,raw_distance,rescaled_distance"


def verify_scaling(config, graph=None):
    """Distance statistics of sampled spanning trees vs continuum laws.

    Per replicate: mark k uniform vertices, run their Wilson branches,
    record all pairwise tree distances, rescaled by sqrt(alpha)/sqrt(n).
    Pooled rescaled distances are KS-tested against 1 - exp(-x^2/2); for
    k >= 3 they are also two-sample tested against pooled continuum
    distance matrices. Returns the report dict; writes CSV if config.out.
    """
    config.validate()
    G = graph if graph is not None else resolve_graph(config.source,
                                                      config.seed)
    n = G.n
    if config.k > n:
        raise ValueError("k exceeds the vertex count")
    if connected_components(G) != 1:
        raise ValueError("instance is disconnected")
    alpha, alpha_stderr = _resolve_alpha(config, G)
    factor = math.sqrt(alpha) / math.sqrt(n)
    k = config.k
    rows = []
    collided = 0
    for r in range(config.replicates):
        marks = derived_rng(config.seed, seeding.MARKS, r).choice(
            n, size=k, replace=False)
        run = wilson_prefix(G, marks,
                            derived_rng(config.seed, seeding.WILSON, r))
        if run.collided:
            collided += 1
        for i in range(k):
            for j in range(i + 1, k):
                d = chain_distance(run.parent, marks[i], marks[j])
                rows.append((r, i, j, float(d), float(d) * factor))
    rescaled = np.asarray([row[4] for row in rows])
    ks_two_point = ks_distance(rescaled, two_point_cdf)
    ks_joint = None
    if k >= 3:
        crt_reps = config.crt_replicates or 2 * config.replicates
        pool = []
        for r in range(crt_reps):
            D = crt_distance_matrix(k, derived_rng(config.seed,
                                                   seeding.CRT, r))
            pool.extend(D[np.triu_indices(k, 1)])
        ks_joint = ks_two_sample(rescaled, np.asarray(pool))
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(CSV_SCHEMA + "\n")
            for r, i, j, raw, res in rows:
                fh.write("%d,%d,%d,%s,%s\n" % (r, i, j, repr(raw),
                                               repr(res)))
    passes = ks_two_point <= thresholds.KS_TWO_POINT and (
        ks_joint is None or ks_joint <= thresholds.KS_JOINT)
    report = {
        "config": {"source": config.source, "k": k,
                   "replicates": config.replicates,
                   "rescale": config.rescale, "seed": config.seed,
                   "kappa": config.kappa},
        "n": n,
        "alpha": float(alpha),
        "alpha_stderr": alpha_stderr,
        "factor": factor,
        "ks": {"two_point": ks_two_point, "joint": ks_joint},
        "moments": {"mean": float(rescaled.mean()),
                    "std": float(rescaled.std(ddof=1)) if len(rescaled) > 1
                    else 0.0,
                    "count": int(rescaled.size)},
        "collided_replicates": collided,
        "thresholds": {"two_point": thresholds.KS_TWO_POINT,
                       "joint": thresholds.KS_JOINT},
        "csv_schema": CSV_SCHEMA,
        "pass": bool(passes),
        "note": ASYMPTOTIC_NOTE,
    }
    return report


def lower_mass_bound(T, c):
    """Smallest relative ball mass min_v |B_T(v, c sqrt(n))| / n.

    Truncated breadth-first search from every vertex, visiting peripheral
    vertices first and aborting any search that already matches the best
    ball found, so typical cost is far below n * ball size.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    n = T.n
    if n == 1:
        return 1.0
    r = int(math.floor(c * math.sqrt(n)))
    if r <= 0:
        return 1.0 / n
    adj = T.adjacency()
    far = int(_bfs_depths(adj, T.root).argmax())
    order = np.argsort(-_bfs_depths(adj, far), kind="stable")
    stamp = np.full(n, -1, dtype=int)
    best = n + 1
    for v in order:
        v = int(v)
        stamp[v] = v
        frontier = [v]
        count = 1
        depth = 0
        while frontier and depth < r and count < best:
            depth += 1
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if stamp[w] != v:
                        stamp[w] = v
                        nxt.append(w)
            count += len(nxt)
            frontier = nxt
        if count < best:
            best = count
    return best / n


def lower_mass_bound_brute(T, c):
    """All-pairs oracle for lower_mass_bound; fine up to a few hundred."""
    if c <= 0:
        raise ValueError("c must be positive")
    n = T.n
    r = math.floor(c * math.sqrt(n))
    adj = T.adjacency()
    best = n
    for v in range(n):
        depths = _bfs_depths(adj, v)
        best = min(best, int((depths <= r).sum()))
    return best / n


def lmb_experiment(source, c, replicates, seed, eps=None, graph=None):
    """Distribution of the lower mass bound over sampled spanning trees."""
    if replicates < 1:
        raise ValueError("need at least one replicate")
    if eps is None:
        eps = thresholds.LMB_EPS
    G = graph if graph is not None else resolve_graph(source, seed)
    vals = []
    for rep in range(replicates):
        T = wilson_ust(G, rng=derived_rng(seed, seeding.WILSON, rep))
        vals.append(lower_mass_bound(T, c))
    vals = np.asarray(vals)
    qs = {("p%d" % q): float(np.percentile(vals, q))
          for q in (5, 25, 50, 75, 95)}
    report = {
        "config": {"source": source, "c": c, "replicates": replicates,
                   "seed": seed, "eps": eps},
        "n": G.n,
        "quantiles": qs,
        "mean": float(vals.mean()),
        "min": float(vals.min()),
        "max": float(vals.max()),
        "fraction_below_eps": float((vals < eps).mean()),
        "golden_p5": thresholds.LMB_GOLDEN_P5,
        "pass": bool(qs["p5"] >= thresholds.LMB_GOLDEN_P5),
        "note": ASYMPTOTIC_NOTE,
    }
    return report


def _tree_members(T):
    if isinstance(T, BranchPrefix):
        members = [int(v) for v in np.flatnonzero(T.in_tree)]
    else:
        members = list(range(T.n))
    return members


def _is_tree_over(T, G, members):
    parent = T.parent
    mset = set(members)
    roots = [v for v in members if parent[v] < 0]
    if len(roots) != 1:
        return False
    state = {v: 0 for v in members}  # 0 new, 1 on current chain, 2 done
    for v in members:
        chain = []
        x = v
        while x != -1:
            if x not in mset:
                return False
            if state[x] == 2:
                break
            if state[x] == 1:
                return False
            state[x] = 1
            chain.append(x)
            x = parent[x]
        for u in chain:
            state[u] = 2
    for v in members:
        p = int(parent[v])
        if p >= 0 and G.weights[v, p] <= 0:
            return False
    return True


def goodtree_check(G, T, kappa, inner_reps, rng, subsets=12):
    """Diagnostic for the capacity regularity of a partial tree.

    Checks that T is a tree in G, that its size is at most n^(1/2+kappa),
    and that for sampled connected subsets A of at least n^(3 kappa)
    vertices the M-position stationary hitting probability of A sits in
    the band alpha_tilde * M * |A| / n * (1 +- n^(-kappa/16)), up to three
    Monte-Carlo standard errors. M = ceil(n^kappa).
    """
    if not (0 < kappa <= KAPPA_MAX):
        raise ValueError("kappa must lie in (0, 1/32]")
    if inner_reps < 1:
        raise ValueError("inner_reps must be positive")
    n = G.n
    M = math.ceil(n ** kappa)
    members = _tree_members(T)
    size = len(members)
    size_bound = n ** (0.5 + kappa)
    min_subset = math.ceil(n ** (3 * kappa))
    is_tree = _is_tree_over(T, G, members)
    size_ok = size <= size_bound
    at = alpha_tilde(G)
    rel_band = n ** (-kappa / 16.0)
    verdicts = []
    if size >= max(2, min_subset):
        adj = {}
        parent = T.parent
        for v in members:
            adj.setdefault(v, [])
            p = int(parent[v])
            if p >= 0:
                adj.setdefault(p, []).append(v)
                adj[v].append(p)
        member_arr = np.asarray(members)
        for _ in range(subsets):
            s = int(rng.integers(min_subset, size + 1))
            start = int(member_arr[rng.integers(len(member_arr))])
            A = [start]
            seen = {start}
            frontier = [start]
            while frontier and len(A) < s:
                nxt = []
                for u in frontier:
                    for w in adj[u]:
                        if w not in seen and len(A) < s:
                            seen.add(w)
                            A.append(w)
                            nxt.append(w)
                frontier = nxt
            est = capacity_mc(G, A, M - 1, inner_reps, rng)
            center = at * M * len(A) / n
            band = center * rel_band
            within = abs(est.estimate - center) <= band + 3 * est.stderr
            verdicts.append({"size": len(A), "estimate": est.estimate,
                             "stderr": est.stderr, "center": center,
                             "band": band, "within": bool(within)})
    frac = (sum(v["within"] for v in verdicts) / len(verdicts)
            if verdicts else 1.0)
    majority_ok = frac >= 0.5
    report = {
        "n": n,
        "kappa": kappa,
        "M": M,
        "is_tree": bool(is_tree),
        "size": size,
        "size_bound": size_bound,
        "size_ok": bool(size_ok),
        "min_subset_size": min_subset,
        "subsets": verdicts,
        "fraction_within": frac,
        "pass": bool(is_tree and size_ok and majority_ok),
        "note": ASYMPTOTIC_NOTE,
    }
    return report
