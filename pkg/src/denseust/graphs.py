"""Dense weighted graphs: constructors, graphon samplers, scaling stats.

Graphs are immutable dense matrices. The regime of interest is dense (minimum
degree a positive fraction of n), so O(n^2) storage is the honest cost and
gives O(1) weight lookups inside walk kernels.
"""

import json
import math

import numpy as np


class WeightedGraph:
    """Symmetric nonnegative weights, zero diagonal, cached degrees.

    Graphon-sampled instances carry weights in [0,1]; the dense-limit
    statements assume that range. General nonnegative weights are accepted
    because the tree and walk laws only depend on weight ratios (and the
    reference oracles use weighted instances like the (1,1,2) triangle).
    """

    def __init__(self, weights, latents=None):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square matrix")
        if not np.array_equal(w, w.T):
            raise ValueError("weights must be symmetric")
        if np.any(np.diag(w) != 0.0):
            raise ValueError("diagonal must be zero")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and nonnegative")
        self.weights = w
        self.n = w.shape[0]
        self.degrees = w.sum(axis=1)
        self.total_weight = float(self.degrees.sum())  # = 2 * sum of w_e
        self.latents = None if latents is None else np.asarray(latents, float)
        w.flags.writeable = False
        self.degrees.flags.writeable = False
        self._sampler = None

    def degree(self, v):
        return float(self.degrees[v])

    def neighbors(self, v):
        return np.flatnonzero(self.weights[v] > 0)

    def is_connected(self):
        return connected_components(self) == 1

    def to_json(self):
        iu, ju = np.triu_indices(self.n, k=1)
        mask = self.weights[iu, ju] > 0
        edges = [[int(i), int(j), float(self.weights[i, j])]
                 for i, j in zip(iu[mask], ju[mask])]
        return {"n": self.n, "edges": edges}

    @classmethod
    def from_json(cls, obj):
        n = int(obj["n"])
        w = np.zeros((n, n))
        for i, j, wt in obj["edges"]:
            i, j = int(i), int(j)
            if not 0 <= i < j < n:
                raise ValueError("edge indices must satisfy 0 <= i < j < n")
            w[i, j] = w[j, i] = float(wt)
        return cls(w)


def save_graph(G, path):
    with open(path, "w") as fh:
        json.dump(G.to_json(), fh, sort_keys=True)
        fh.write("\n")


def load_graph(path):
    with open(path) as fh:
        return WeightedGraph.from_json(json.load(fh))


def complete(n):
    if n < 1:
        raise ValueError("n >= 1 required")
    w = np.ones((n, n)) - np.eye(n)
    return WeightedGraph(w)


def complete_bipartite(a, b):
    if a < 1 or b < 1:
        raise ValueError("both part sizes must be >= 1")
    n = a + b
    w = np.zeros((n, n))
    w[:a, a:] = 1.0
    w[a:, :a] = 1.0
    return WeightedGraph(w)


def _latent_blocks(W, n, rng):
    x = rng.random(n)
    idx = np.minimum(np.searchsorted(W.breakpoints, x, side="right") - 1,
                     W.m - 1)
    return x, W.values[np.ix_(idx, idx)]


def sample_h(n, W, rng):
    """Weighted sample: w_ij = W(x_i, x_j) for iid uniform latents."""
    x, vals = _latent_blocks(W, n, rng)
    w = vals.copy()
    np.fill_diagonal(w, 0.0)
    return WeightedGraph(w, latents=x)


def sample_g(n, W, rng):
    """0/1 sample: each pair present independently with probability W(x_i, x_j).

    Shares its latent draw order with sample_h: the same rng state yields the
    same latents, so the edge indicators have conditional mean equal to the
    h-sample's weights.
    """
    x, vals = _latent_blocks(W, n, rng)
    u = rng.random((n, n))
    u = np.triu(u, k=1)
    u = u + u.T
    w = (u < vals).astype(float)
    np.fill_diagonal(w, 0.0)
    w = np.triu(w, k=1)
    w = w + w.T
    return WeightedGraph(w, latents=x)


def min_degree_density(G):
    return float(G.degrees.min()) / G.n


def alpha_tilde(G):
    """n * sum(deg^2) / (sum deg)^2; 1 exactly iff regular."""
    if G.total_weight <= 0:
        raise ValueError("zero total weight")
    s1 = math.fsum(G.degrees.tolist())
    s2 = math.fsum((d * d for d in G.degrees.tolist()))
    return G.n * s2 / (s1 * s1)


def connected_components(G):
    n = G.n
    seen = np.zeros(n, dtype=bool)
    comps = 0
    for s in range(n):
        if seen[s]:
            continue
        comps += 1
        stack = [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            nbrs = np.flatnonzero((G.weights[v] > 0) & ~seen)
            seen[nbrs] = True
            stack.extend(nbrs.tolist())
    return comps


def component_labels(G):
    n = G.n
    label = np.full(n, -1, dtype=int)
    cur = 0
    for s in range(n):
        if label[s] >= 0:
            continue
        stack = [s]
        label[s] = cur
        while stack:
            v = stack.pop()
            nbrs = np.flatnonzero((G.weights[v] > 0) & (label < 0))
            label[nbrs] = cur
            stack.extend(nbrs.tolist())
        cur += 1
    return label


GAMMA_EXACT_CAP = 22


def _cut_ratio(G, mask):
    k = int(mask.sum())
    if k == 0 or k == G.n:
        raise ValueError("cut must be proper and nonempty")
    inside = float(mask @ G.weights @ mask)
    cut = float(G.degrees @ mask) - inside
    return cut / (k * (G.n - k))


def expander_gamma_exact(G):
    """min over proper nonempty U of w(U, U^c) / (|U| (n - |U|)).

    Enumerates all cuts (vertex 0 pinned to one side), so capped at n <= 22.
    """
    n = G.n
    if n > GAMMA_EXACT_CAP:
        raise ValueError("exact gamma enumeration capped at n = %d"
                         % GAMMA_EXACT_CAP)
    if n == 1:
        return 0.0
    W = G.weights
    deg = G.degrees
    best = math.inf
    total = 1 << (n - 1)
    chunk = 1 << min(n - 1, 14)
    cols = np.arange(n - 1)
    for base in range(0, total, chunk):
        masks = np.arange(base, min(base + chunk, total))
        bits = ((masks[:, None] >> cols) & 1).astype(float)
        # vertex 0 always in U; bits cover vertices 1..n-1
        full = np.concatenate([np.ones((len(masks), 1)), bits], axis=1)
        sizes = full.sum(axis=1)
        inside = ((full @ W) * full).sum(axis=1)
        cut = full @ deg - inside
        valid = sizes < n
        ratio = cut[valid] / (sizes[valid] * (n - sizes[valid]))
        if len(ratio):
            best = min(best, float(ratio.min()))
    return max(best, 0.0)


def expander_gamma_mc(G, rng, trials=200):
    """Upper bound on gamma from sampled cuts with local improvement.

    Tries all singleton cuts, the connected-component cuts, and `trials`
    random subsets, each improved by greedy single-vertex moves.
    """
    if trials < 1:
        raise ValueError("trials >= 1 required")
    n = G.n
    if n < 2:
        return 0.0
    W = G.weights
    deg = G.degrees

    def ratio_of(mask):
        return _cut_ratio(G, mask)

    best = math.inf
    candidates = []
    for v in range(min(n, 64)):
        m = np.zeros(n)
        m[v] = 1.0
        candidates.append(m)
    labels = component_labels(G)
    if labels.max() > 0:
        for c in range(labels.max() + 1):
            candidates.append((labels == c).astype(float))
    for _ in range(trials):
        size = int(rng.integers(1, n))
        idx = rng.choice(n, size=size, replace=False)
        m = np.zeros(n)
        m[idx] = 1.0
        candidates.append(m)

    for mask in candidates:
        k = float(mask.sum())
        if k == 0 or k == n:
            continue
        cut_vec = W @ mask  # w(v, U) per vertex
        cut = float(deg @ mask) - float(mask @ cut_vec)
        val = cut / (k * (n - k))
        improved = True
        while improved:
            improved = False
            # moving v across the cut changes it by +-(deg_v - 2 w(v, U))
            for v in range(n):
                if mask[v] == 1.0:
                    nk, ncut = k - 1, cut + 2 * cut_vec[v] - deg[v]
                else:
                    nk, ncut = k + 1, cut + deg[v] - 2 * cut_vec[v]
                if nk == 0 or nk == n:
                    continue
                nval = ncut / (nk * (n - nk))
                if nval < val - 1e-15:
                    if mask[v] == 1.0:
                        mask[v] = 0.0
                        cut_vec = cut_vec - W[v]
                    else:
                        mask[v] = 1.0
                        cut_vec = cut_vec + W[v]
                    k, cut, val = nk, ncut, nval
                    improved = True
                    break
        best = min(best, val)
    return float(max(best, 0.0))
