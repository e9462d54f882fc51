"""Loop-erased walks, Wilson's algorithm, and spanning-tree geometry.

Branch provenance is recorded at sampling time: which branch added each
vertex and its position along that branch. The stick-breaking encoding and
the attachment-uniformity experiment both consume it.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import connected_components
from .seeding import UniformBuffer
from .walk import _harmonic_hitting, sampler_for, transition_matrix

DEFAULT_STEP_CAP = 10 ** 9


def loop_erase(walk):
    """Erase loops by the last-exit recursion.

    Y_0 = X_0, then repeatedly jump to one past the last visit of the
    current vertex. The output is a simple path.
    """
    if len(walk) == 0:
        raise ValueError("empty walk")
    last = {}
    for t, v in enumerate(walk):
        last[v] = t
    out = [walk[0]]
    t = last[walk[0]] + 1
    end = len(walk)
    while t < end:
        out.append(walk[t])
        t = last[walk[t]] + 1
    return out


def _target_mask(targets, n):
    if isinstance(targets, np.ndarray) and targets.dtype == np.bool_:
        return targets
    mask = np.zeros(n, dtype=bool)
    idx = [int(v) for v in targets]
    if len(idx) == 0:
        raise ValueError("target set must be nonempty")
    mask[idx] = True
    return mask


def lerw_to_set(G, start, targets, rng, step_cap=DEFAULT_STEP_CAP):
    """Loop-erased random walk from start until it hits the target set.

    Loops are erased chronologically while walking, which yields the same
    path as erasing the completed walk (lerw_to_set_literal is the oracle
    for that, consuming the identical uniform stream).
    """
    mask = _target_mask(targets, G.n)
    start = int(start)
    if mask[start]:
        raise ValueError("start must lie outside the target set")
    samp = sampler_for(G)
    buf = UniformBuffer(rng)
    path = [start]
    pos = {start: 0}
    cur = start
    steps = 0
    while True:
        if steps >= step_cap:
            raise RuntimeError("step cap %d exceeded; disconnected or "
                               "pathological instance" % step_cap)
        cur = samp.step(cur, buf.next())
        steps += 1
        if mask[cur]:
            path.append(cur)
            return path
        seen = pos.get(cur)
        if seen is not None:
            for u in path[seen + 1:]:
                del pos[u]
            del path[seen + 1:]
        else:
            path.append(cur)
            pos[cur] = len(path) - 1


def lerw_to_set_literal(G, start, targets, rng, step_cap=DEFAULT_STEP_CAP):
    """Record the whole walk, then erase loops. Test oracle for lerw_to_set."""
    mask = _target_mask(targets, G.n)
    start = int(start)
    if mask[start]:
        raise ValueError("start must lie outside the target set")
    samp = sampler_for(G)
    buf = UniformBuffer(rng)
    walk = [start]
    cur = start
    while not mask[cur]:
        if len(walk) > step_cap:
            raise RuntimeError("step cap exceeded")
        cur = samp.step(cur, buf.next())
        walk.append(cur)
    return loop_erase(walk)


def _check_parent_structure(n, root, parent):
    """Reject anything that is not a single rooted tree over n vertices."""
    if parent.shape != (n,):
        raise ValueError("parent must have length n")
    if not 0 <= root < n or parent[root] != -1:
        raise ValueError("root must have parent -1")
    if (parent == -1).sum() != 1:
        raise ValueError("exactly one root expected")
    if np.any(parent < -1) or np.any(parent >= n):
        raise ValueError("parent entries must be -1 or vertex indices")
    state = np.zeros(n, dtype=np.int8)  # 0 new, 1 active, 2 done
    for v in range(n):
        chain = []
        x = v
        while x != -1 and state[x] == 0:
            state[x] = 1
            chain.append(x)
            x = parent[x]
        if x != -1 and state[x] == 1:
            raise ValueError("parent structure contains a cycle")
        for u in chain:
            state[u] = 2


class SpanningTree:
    """Rooted spanning tree with per-branch provenance.

    parent[root] = -1. branch_step[v] is the 1-based branch that added v
    (the root belongs to branch 1); branch_pos[v] is the hop distance from
    that branch's starting vertex to v.
    """

    def __init__(self, n, root, parent, branch_step, branch_pos,
                 branch_lengths, branch_hits, branch_starts, graph=None):
        self.n = n
        self.root = int(root)
        self.parent = np.asarray(parent, dtype=int)
        self.branch_step = np.asarray(branch_step, dtype=int)
        self.branch_pos = np.asarray(branch_pos, dtype=int)
        self.branch_lengths = list(branch_lengths)
        self.branch_hits = list(branch_hits)
        self.branch_starts = list(branch_starts)
        self._adj = None
        self._validate(graph)

    @property
    def marks(self):
        """Branch starting vertices v_1, v_2, ... (root first)."""
        return [self.root] + list(self.branch_starts)

    def _validate(self, graph):
        n, parent = self.n, self.parent
        _check_parent_structure(n, self.root, parent)
        if graph is not None:
            for v in range(n):
                if parent[v] >= 0 and graph.weights[v, parent[v]] <= 0:
                    raise ValueError("tree edge %d-%d has no positive weight"
                                     % (v, parent[v]))

    def adjacency(self):
        if self._adj is None:
            adj = [[] for _ in range(self.n)]
            for v in range(self.n):
                p = self.parent[v]
                if p >= 0:
                    adj[v].append(int(p))
                    adj[p].append(v)
            self._adj = adj
        return self._adj

    def to_json(self):
        return {"root": self.root,
                "parent": [int(p) for p in self.parent],
                "branch_step": [int(s) for s in self.branch_step]}

    @classmethod
    def from_json(cls, obj, graph=None):
        parent = np.asarray(obj["parent"], dtype=int)
        branch_step = np.asarray(obj["branch_step"], dtype=int)
        root = int(obj["root"])
        n = len(parent)
        # Provenance reconstruction walks parent chains, so the structure
        # must be checked before anything else or a cycle would hang it.
        _check_parent_structure(n, root, parent)
        # Rebuild positions, lengths, hits and starts from branch membership:
        # within a branch the parent chain runs toward the hit vertex.
        steps = int(branch_step.max()) if n > 1 else 0
        sizes = np.bincount(branch_step[branch_step > 0], minlength=steps + 1)
        lengths = [0] * steps
        for s in range(1, steps + 1):
            lengths[s - 1] = int(sizes[s]) - (1 if s == 1 else 0)
        exit_dist = np.full(n, -1, dtype=int)
        branch_pos = np.zeros(n, dtype=int)
        hits = [None] * steps
        starts = [None] * steps

        def exit_of(v):
            chain = []
            x = v
            while exit_dist[x] < 0:
                p = parent[x]
                if p < 0 or branch_step[p] != branch_step[x]:
                    exit_dist[x] = 0
                    if branch_step[x] > 0:
                        s = branch_step[x]
                        if s >= 2 and p >= 0:
                            hits[s - 1] = int(p)
                    break
                chain.append(x)
                x = p
            base = exit_dist[x]
            for u in reversed(chain):
                base += 1
                exit_dist[u] = base
            return exit_dist[v]

        for v in range(n):
            if branch_step[v] > 0:
                exit_of(v)
                s = branch_step[v]
                # Branch 1 carries the root at position length (its own hit);
                # later branches end one hop before their hit vertex.
                last = lengths[s - 1] if s == 1 else lengths[s - 1] - 1
                branch_pos[v] = last - exit_dist[v]
        if steps >= 1:
            hits[0] = root
        for v in range(n):
            s = branch_step[v]
            if s > 0 and branch_pos[v] == 0:
                starts[s - 1] = v
        return cls(n, root, parent, branch_step, branch_pos,
                   lengths, hits, starts, graph=graph)


def save_tree(T, path):
    with open(path, "w") as fh:
        json.dump(T.to_json(), fh, sort_keys=True)
        fh.write("\n")


def load_tree(path, graph=None):
    with open(path) as fh:
        return SpanningTree.from_json(json.load(fh), graph=graph)


@dataclass
class BranchPrefix:
    """First branches of a Wilson run, spanning only part of the graph.

    branch slot j (0-based) belongs to mark j+1; a zero length records a
    collision (the mark was already in the tree, no walk was run).
    """

    n: int
    marks: list
    parent: np.ndarray
    in_tree: np.ndarray
    branch_step: np.ndarray
    branch_pos: np.ndarray
    branch_lengths: list
    branch_hits: list
    branch_starts: list

    @property
    def collided(self):
        return any(l == 0 for l in self.branch_lengths)


def _run_branches(G, root, toattach, rng, step_cap, slot_per_mark):
    n = G.n
    parent = np.full(n, -1, dtype=int)
    in_tree = np.zeros(n, dtype=bool)
    branch_step = np.zeros(n, dtype=int)
    branch_pos = np.zeros(n, dtype=int)
    in_tree[root] = True
    lengths, hits, starts = [], [], []
    step = 0
    for v in toattach:
        if in_tree[v]:
            if slot_per_mark:
                step += 1
                lengths.append(0)
                hits.append(int(v))
                starts.append(int(v))
            continue
        path = lerw_to_set(G, v, in_tree, rng, step_cap)
        step += 1
        for i in range(len(path) - 1):
            u = path[i]
            parent[u] = path[i + 1]
            in_tree[u] = True
            branch_step[u] = step
            branch_pos[u] = i
        if step == 1:
            branch_step[root] = 1
            branch_pos[root] = len(path) - 1
        lengths.append(len(path) - 1)
        hits.append(int(path[-1]))
        starts.append(int(v))
    return parent, in_tree, branch_step, branch_pos, lengths, hits, starts


def wilson_ust(G, ordering=None, rng=None, step_cap=DEFAULT_STEP_CAP):
    """Sample a uniform (weight-proportional) spanning tree.

    Grows the tree by loop-erased branches from the ordering's vertices;
    the resulting law does not depend on the ordering.
    """
    if rng is None:
        raise ValueError("an explicit rng is required")
    n = G.n
    if ordering is None:
        ordering = list(range(n))
    ordering = [int(v) for v in ordering]
    if sorted(ordering) != list(range(n)):
        raise ValueError("ordering must be a permutation of all vertices")
    if connected_components(G) != 1:
        raise ValueError("graph is disconnected")
    root = ordering[0]
    parent, _, bstep, bpos, lengths, hits, starts = _run_branches(
        G, root, ordering[1:], rng, step_cap, slot_per_mark=False)
    return SpanningTree(n, root, parent, bstep, bpos,
                        lengths, hits, starts, graph=G)


def wilson_prefix(G, marks, rng, step_cap=DEFAULT_STEP_CAP):
    """Run Wilson branches for the given marked vertices only.

    Returns the partial tree spanned by the marks; every mark keeps its
    branch slot, so a collision shows up as a zero-length branch.
    """
    marks = [int(v) for v in marks]
    if len(marks) < 2:
        raise ValueError("need at least two marked vertices")
    if len(set(marks)) != len(marks):
        raise ValueError("marked vertices must be distinct")
    root = marks[0]
    parent, in_tree, bstep, bpos, lengths, hits, starts = _run_branches(
        G, root, marks[1:], rng, step_cap, slot_per_mark=True)
    return BranchPrefix(G.n, marks, parent, in_tree, bstep, bpos,
                        lengths, hits, starts)


def chain_distance(parent, u, v):
    """Hop distance between u and v along parent pointers (shared root)."""
    anc = {}
    x, d = int(u), 0
    while x != -1:
        anc[x] = d
        x = parent[x]
        d += 1
    x, d = int(v), 0
    while x not in anc:
        x = parent[x]
        if x == -1:
            raise ValueError("vertices do not share a root")
        d += 1
    return anc[x] + d


def tree_distance(T, u, v):
    return chain_distance(T.parent, u, v)


def distance_matrix(T, vertices):
    vs = [int(v) for v in vertices]
    k = len(vs)
    D = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            D[a, b] = D[b, a] = chain_distance(T.parent, vs[a], vs[b])
    return D


def _bfs_depths(adj, src):
    n = len(adj)
    depth = np.full(n, -1, dtype=int)
    depth[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for v in frontier:
            for u in adj[v]:
                if depth[u] < 0:
                    depth[u] = depth[v] + 1
                    nxt.append(u)
        frontier = nxt
    return depth


def diameter(T):
    """Largest hop distance, by the double-sweep on trees."""
    adj = T.adjacency()
    d0 = _bfs_depths(adj, T.root)
    a = int(d0.argmax())
    d1 = _bfs_depths(adj, a)
    return int(d1.max())


def height(T, root=None):
    adj = T.adjacency()
    src = T.root if root is None else int(root)
    return int(_bfs_depths(adj, src).max())


def edge_prob_exact(G, edge):
    """P(edge in UST) = w_e * effective resistance across the edge."""
    i, j = (int(edge[0]), int(edge[1]))
    if i == j:
        raise ValueError("self-loops are not edges")
    w = float(G.weights[i, j])
    if w <= 0:
        raise ValueError("edge must have positive weight")
    n = G.n
    L = np.diag(G.degrees) - G.weights
    ground = j if n == 2 else next(v for v in range(n) if v not in (i, j))
    keep = [v for v in range(n) if v != ground]
    Lr = L[np.ix_(keep, keep)]
    b = np.zeros(n)
    b[i], b[j] = 1.0, -1.0
    br = b[keep]
    try:
        x = np.linalg.solve(Lr, br)
    except np.linalg.LinAlgError:
        raise ValueError("graph is disconnected: Laplacian solve is singular")
    if np.abs(Lr @ x - br).max() > 1e-8:
        raise ValueError("graph is disconnected or ill-conditioned")
    pot = np.zeros(n)
    pot[keep] = x
    return w * float(pot[i] - pot[j])


def laplacian_next_step_dist(G, T, path):
    """Exact next-step law of the loop-erased walk.

    Given the already-built tree part T and the current loop-erased path,
    the next vertex v is chosen with probability proportional to
    P(current, v) * P_v(hit T before the path). Returns a full-length
    probability vector.
    """
    Tset = sorted(set(int(v) for v in T))
    path = [int(v) for v in path]
    if len(path) == 0:
        raise ValueError("path must contain at least the current vertex")
    if set(path) & set(Tset):
        raise ValueError("path and target tree must be disjoint")
    current = path[-1]
    h = _harmonic_hitting(G, Tset, path)
    P = transition_matrix(G)
    num = P[current] * h
    den = float(num.sum())
    if den <= 1e-300:
        raise ValueError("walk cannot reach the tree before re-hitting "
                         "the path from this position")
    out = num / den
    if abs(out.sum() - 1.0) > 1e-8:
        raise AssertionError("next-step masses failed to normalize")
    return out
