"""Step graphons: evaluation, degree functionals, connectivity, cut-norm.

A step graphon is a symmetric function on [0,1]^2 that is constant on the
cells of a finite interval partition. All integrals reduce to exact block
sums, which keeps the scaling constant alpha_w and the cut-norm enumerable.
"""

import itertools
import json
import math

import numpy as np


class StepGraphon:
    """Symmetric step function on [0,1]^2 with values in [0,1].

    breakpoints: strictly increasing, first 0, last 1 (m+1 entries).
    values: symmetric m x m matrix of block values.
    """

    def __init__(self, breakpoints, values):
        bp = np.asarray(breakpoints, dtype=float)
        vals = np.asarray(values, dtype=float)
        if bp.ndim != 1 or len(bp) < 2:
            raise ValueError("need at least two breakpoints")
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        m = len(bp) - 1
        if vals.shape != (m, m):
            raise ValueError("values must be %d x %d" % (m, m))
        if not np.array_equal(vals, vals.T):
            raise ValueError("values must be symmetric")
        if np.any(vals < 0) or np.any(vals > 1):
            raise ValueError("values must lie in [0,1]")
        self.breakpoints = bp
        self.values = vals
        self.lengths = np.diff(bp)
        self.m = m
        bp.flags.writeable = False
        vals.flags.writeable = False
        self.lengths.flags.writeable = False

    def block_of(self, x):
        """Block index containing x; left-closed blocks, last block closed."""
        if x < 0.0 or x > 1.0:
            raise ValueError("coordinate out of [0,1]")
        i = int(np.searchsorted(self.breakpoints, x, side="right")) - 1
        return min(i, self.m - 1)

    def eval(self, x, y):
        return float(self.values[self.block_of(x), self.block_of(y)])

    def degree_function(self, x):
        """deg_W(x) = integral of W(x, .) over [0,1]."""
        return float(self.block_degrees()[self.block_of(x)])

    def block_degrees(self):
        return self.values @ self.lengths

    def total_integral(self):
        """Integral of W over the square."""
        return float(self.lengths @ self.values @ self.lengths)

    def cut_integral(self, blocks_a):
        """Integral of W over A x A^c for A = union of the given blocks."""
        ind = np.zeros(self.m)
        ind[list(blocks_a)] = 1.0
        a = self.lengths * ind
        b = self.lengths * (1.0 - ind)
        return float(a @ self.values @ b)

    def to_json(self):
        return {"breakpoints": list(map(float, self.breakpoints)),
                "values": [list(map(float, row)) for row in self.values]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["breakpoints"], obj["values"])

    @classmethod
    def constant(cls, p):
        return cls([0.0, 1.0], [[p]])


def save_graphon(W, path):
    with open(path, "w") as fh:
        json.dump(W.to_json(), fh, sort_keys=True)
        fh.write("\n")


def load_graphon(path):
    with open(path) as fh:
        return StepGraphon.from_json(json.load(fh))


def bipartite_graphon(split=1.0 / 3.0):
    """Two blocks split at `split`, cross-value 1, within-value 0."""
    return StepGraphon([0.0, split, 1.0], [[0.0, 1.0], [1.0, 0.0]])


def alpha_w(W):
    """Scaling constant: (integral of deg^2) / (integral of W)^2, always >= 1."""
    deg = W.block_degrees()
    total = W.total_integral()
    if total <= 0.0:
        raise ValueError("degenerate graphon: integral is zero")
    num = float(W.lengths @ (deg * deg))
    return num / (total * total)


def is_connected(W):
    """No positive-measure set has zero cut integral against its complement.

    For a step graphon this reduces to connectivity of the support graph on
    positive-length blocks (cross edges where v_ij > 0); a lone block needs a
    positive within-block value.
    """
    alive = [i for i in range(W.m) if W.lengths[i] > 0]
    if len(alive) == 1:
        return bool(W.values[alive[0], alive[0]] > 0)
    parent = {i: i for i in alive}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(alive, 2):
        if W.values[i, j] > 0:
            parent[find(i)] = find(j)
    roots = {find(i) for i in alive}
    return len(roots) == 1


def graphon_of_graph(G):
    """n equal-width blocks carrying the weight matrix (zero diagonal)."""
    n = G.n
    bp = np.arange(n + 1, dtype=float) / n
    return StepGraphon(bp, G.weights.copy())


class CutNormResult:
    """Value plus block-index witness sets and an exactness flag."""

    def __init__(self, value, witness_s, witness_t, exact):
        self.value = float(value)
        self.witness_s = tuple(sorted(witness_s))
        self.witness_t = tuple(sorted(witness_t))
        self.exact = bool(exact)

    def __repr__(self):
        return ("CutNormResult(value=%.6g, |S|=%d, |T|=%d, exact=%s)"
                % (self.value, len(self.witness_s), len(self.witness_t),
                   self.exact))


def _rectangle_value(M, s_idx, t_idx):
    if len(s_idx) == 0 or len(t_idx) == 0:
        return 0.0
    return float(M[np.ix_(s_idx, t_idx)].sum())


def _best_t_for_s(M, s_mask):
    # With S fixed, the optimal T is the positive-sum (resp. negative-sum)
    # columns; check both signs.
    col = s_mask @ M
    pos = float(col[col > 0].sum())
    neg = float(-col[col < 0].sum())
    if pos >= neg:
        return pos, np.flatnonzero(col > 0)
    return neg, np.flatnonzero(col < 0)


EXACT_BLOCK_CAP = 24


def cut_norm(breakpoints, values, mode="auto", rng=None, restarts=24):
    """Cut-norm of a signed symmetric step kernel.

    values entries lie in [-1, 1] on the partition given by breakpoints
    (typically a difference of two graphons on a common refinement).

    exact mode enumerates all 2^m block subsets S (optimal T is greedy per
    column sign), feasible for m <= 24. heuristic mode runs randomized
    restarts of single-block-flip local search and returns a certified lower
    bound: the witness rectangle is re-evaluated exactly.
    """
    bp = np.asarray(breakpoints, dtype=float)
    vals = np.asarray(values, dtype=float)
    m = len(bp) - 1
    if vals.shape != (m, m):
        raise ValueError("values shape does not match breakpoints")
    if np.any(np.abs(vals) > 1 + 1e-12):
        raise ValueError("kernel entries must lie in [-1, 1]")
    if not np.allclose(vals, vals.T, atol=1e-12):
        raise ValueError("kernel must be symmetric")
    lengths = np.diff(bp)
    M = vals * np.outer(lengths, lengths)

    if mode == "auto":
        mode = "exact" if m <= EXACT_BLOCK_CAP else "heuristic"
    if mode == "exact":
        if m > EXACT_BLOCK_CAP:
            raise ValueError("exact cut_norm refused for m > %d blocks"
                             % EXACT_BLOCK_CAP)
        return _cut_norm_exact(M, m)
    if mode == "heuristic":
        return _cut_norm_heuristic(M, m, rng, restarts)
    raise ValueError("unknown mode %r" % (mode,))


def _cut_norm_exact(M, m):
    best = -1.0
    best_s = best_t = np.array([], dtype=int)
    # Chunked enumeration of subset indicator rows keeps memory flat.
    chunk = 1 << min(m, 14)
    total = 1 << m
    bits = ((np.arange(chunk)[:, None] >> np.arange(m)) & 1).astype(float)
    for base in range(0, total, chunk):
        if base > 0:
            bits_hi = ((np.arange(base, base + chunk)[:, None]
                        >> np.arange(m)) & 1).astype(float)
        else:
            bits_hi = bits[: min(chunk, total)]
        cols = bits_hi @ M
        pos = np.where(cols > 0, cols, 0.0).sum(axis=1)
        neg = np.where(cols < 0, -cols, 0.0).sum(axis=1)
        vals = np.maximum(pos, neg)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            s_mask = bits_hi[k]
            best_s = np.flatnonzero(s_mask > 0)
            _, best_t = _best_t_for_s(M, s_mask)
    value = _rectangle_value(M, best_s, best_t)
    return CutNormResult(abs(value), best_s, best_t, exact=True)


def _cut_norm_heuristic(M, m, rng, restarts):
    if rng is None:
        rng = np.random.default_rng(0)
    best = -1.0
    best_s = best_t = np.array([], dtype=int)
    for _ in range(max(1, restarts)):
        s = (rng.random(m) < 0.5).astype(float)
        col = s @ M
        val, _ = _best_t_for_s(M, s)
        improved = True
        while improved:
            improved = False
            for i in range(m):
                delta = M[i] if s[i] == 0.0 else -M[i]
                cand_col = col + delta
                pos = float(cand_col[cand_col > 0].sum())
                neg = float(-cand_col[cand_col < 0].sum())
                cand = max(pos, neg)
                if cand > val + 1e-15:
                    s[i] = 1.0 - s[i]
                    col = cand_col
                    val = cand
                    improved = True
        if val > best:
            best = val
            best_s = np.flatnonzero(s > 0)
            _, best_t = _best_t_for_s(M, s)
    value = _rectangle_value(M, best_s, best_t)
    return CutNormResult(abs(value), best_s, best_t, exact=False)


def _refine_pair(W1, W2):
    bp = np.union1d(W1.breakpoints, W2.breakpoints)
    mids = (bp[:-1] + bp[1:]) / 2.0
    idx1 = [W1.block_of(x) for x in mids]
    idx2 = [W2.block_of(x) for x in mids]
    v1 = W1.values[np.ix_(idx1, idx1)]
    v2 = W2.values[np.ix_(idx2, idx2)]
    return bp, v1, v2


def _permute_blocks(bp, vals, perm):
    lengths = np.diff(bp)[list(perm)]
    new_bp = np.concatenate([[0.0], np.cumsum(lengths)])
    new_bp[-1] = 1.0
    return new_bp, vals[np.ix_(perm, perm)]


PERM_BLOCK_CAP = 8


def cut_distance_upper(W1, W2, strategy="degree-sort", rng=None, restarts=24):
    """Upper bound on the cut-distance between two step graphons.

    Any block alignment bounds the infimum over measure-preserving maps from
    above. exact-permutation tries every length-preserving block permutation
    (<= 8 refined blocks); degree-sort aligns blocks by ascending degree and
    evaluates the cut-norm once (heuristic cut-norm above 24 blocks).
    """
    bp, v1, v2 = _refine_pair(W1, W2)
    m = len(bp) - 1
    lengths = np.diff(bp)
    if strategy == "exact-permutation":
        if m > PERM_BLOCK_CAP:
            raise ValueError("exact-permutation refused for > %d blocks"
                             % PERM_BLOCK_CAP)
        best = math.inf
        for perm in itertools.permutations(range(m)):
            if not np.allclose(lengths[list(perm)], lengths, atol=1e-12):
                continue
            _, pv1 = _permute_blocks(bp, v1, perm)
            res = cut_norm(bp, pv1 - v2, mode="exact")
            best = min(best, res.value)
        return best
    if strategy == "degree-sort":
        d1 = v1 @ lengths
        d2 = v2 @ lengths
        p1 = np.argsort(d1, kind="stable")
        p2 = np.argsort(d2, kind="stable")
        bp1, sv1 = _permute_blocks(bp, v1, p1)
        bp2, sv2 = _permute_blocks(bp, v2, p2)
        # The two sorted partitions need a fresh common refinement because
        # permuting unequal-length blocks moves the breakpoints.
        rbp = np.union1d(bp1, bp2)
        mode = "exact" if len(rbp) - 1 <= EXACT_BLOCK_CAP else "heuristic"
        mids = (rbp[:-1] + rbp[1:]) / 2.0
        i1 = np.minimum(np.searchsorted(bp1, mids, side="right") - 1,
                        len(bp1) - 2)
        i2 = np.minimum(np.searchsorted(bp2, mids, side="right") - 1,
                        len(bp2) - 2)
        diff = sv1[np.ix_(i1, i1)] - sv2[np.ix_(i2, i2)]
        res = cut_norm(rbp, diff, mode=mode, rng=rng, restarts=restarts)
        return res.value
    raise ValueError("unknown strategy %r" % (strategy,))
