"""Stick-breaking trees, the Brownian CRT, and the discrete encoding.

A k-marked stick-breaking tree is built from breakpoints
ys = (0 = y_0 < y_1 < ... < y_{k-1}) and attachments
zs = (0 = z_0, z_1, ..., z_{k-2}) with z_i <= y_i: stick i is the interval
[y_{i-1}, y_i], glued at its base to the point z_{i-1} of the earlier tree.
Marked point i sits at the tip y_i. CRT marginals arise when the stick
lengths come from the inhomogeneous Poisson process with intensity t dt and
each z is uniform on the tree built so far.
"""

import json
import math
from dataclasses import dataclass

import numpy as np


class StickSequence:

    def __init__(self, ys, zs):
        ys = np.array(ys, dtype=float)
        zs = np.array(zs, dtype=float)
        if ys.ndim != 1 or zs.ndim != 1:
            raise ValueError("ys and zs must be one-dimensional")
        if len(ys) < 2:
            raise ValueError("need at least two marked points")
        if len(zs) != len(ys) - 1:
            raise ValueError("zs must have one entry fewer than ys")
        if ys[0] != 0.0:
            raise ValueError("y_0 must be 0")
        if not np.all(np.diff(ys) > 0):
            raise ValueError("ys must be strictly increasing")
        if zs[0] != 0.0:
            raise ValueError("z_0 must be 0")
        if np.any(zs < 0) or np.any(zs > ys[:-1]):
            raise ValueError("each z_i must lie in [0, y_i]")
        self.ys = ys
        self.zs = zs
        self.ys.flags.writeable = False
        self.zs.flags.writeable = False

    @property
    def k(self):
        """Number of marked points (including the root y_0 = 0)."""
        return len(self.ys)

    def to_json(self):
        return {"ys": [float(y) for y in self.ys],
                "zs": [float(z) for z in self.zs]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["ys"], obj["zs"])

    def __eq__(self, other):
        return (isinstance(other, StickSequence)
                and np.array_equal(self.ys, other.ys)
                and np.array_equal(self.zs, other.zs))


class MarkedTree:
    """Tree realized from a StickSequence; distances are exact reals.

    A point of the tree is an arclength position p in [0, y_{k-1}]; position
    p belongs to stick s(p) = the first stick whose tip is >= p. Distances
    descend the higher-numbered stick to its attachment until both points
    share a stick.
    """

    def __init__(self, seq):
        if not isinstance(seq, StickSequence):
            seq = StickSequence(*seq)
        self.seq = seq
        self.k = seq.k
        self.ys = seq.ys
        self.zs = seq.zs
        # genealogy: stick_of_attach[i] = stick carrying the base of stick i+2
        self.stick_of_attach = np.array(
            [self._stick(z) for z in self.zs[1:]], dtype=int)
        self.dist = self._marked_distances()

    @property
    def total_length(self):
        return float(self.ys[-1])

    def _stick(self, p):
        s = int(np.searchsorted(self.ys, p, side="left"))
        return max(1, s)

    def point_distance(self, p, q):
        """Tree distance between arclength positions p and q."""
        ys, zs = self.ys, self.zs
        if not (0 <= p <= ys[-1] and 0 <= q <= ys[-1]):
            raise ValueError("positions must lie within the tree")
        sp, sq = self._stick(p), self._stick(q)
        d = 0.0
        while sp != sq:
            if sp > sq:
                d += p - ys[sp - 1]
                p = zs[sp - 1]
                sp = self._stick(p)
            else:
                d += q - ys[sq - 1]
                q = zs[sq - 1]
                sq = self._stick(q)
        return d + abs(p - q)

    def _marked_distances(self):
        k = self.k
        D = np.zeros((k, k))
        for i in range(k):
            for j in range(i + 1, k):
                D[i, j] = D[j, i] = self.point_distance(self.ys[i],
                                                        self.ys[j])
        return D


def sb_build(seq):
    """Build the marked tree of a stick sequence."""
    return MarkedTree(seq)


def sample_increments(L, count, rng):
    """Stick-length draws at current total length L, by inverse CDF.

    The next length X satisfies P(X > x) = exp(-((x+L)^2 - L^2)/2), so
    X = sqrt(L^2 - 2 ln U) - L with U uniform. U = 0 (probability 2^-53)
    is clamped to the smallest positive float; U = 1 cannot occur, so the
    increment is strictly positive.
    """
    if L < 0:
        raise ValueError("current length must be nonnegative")
    u = rng.random(count)
    u[u == 0.0] = np.nextafter(0.0, 1.0)
    return np.sqrt(L * L - 2.0 * np.log(u)) - L


def crt_sample_sticks(k, rng):
    """Stick sequence of the CRT subtree spanned by k uniform points.

    Draw order: the k-1 length increments first, then the k-2 attachment
    points, z_i uniform on [0, Y_i).
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    ys = [0.0]
    for _ in range(k - 1):
        ys.append(ys[-1] + float(sample_increments(ys[-1], 1, rng)[0]))
    zs = [0.0]
    for i in range(1, k - 1):
        zs.append(ys[i] * rng.random())
    return StickSequence(ys, zs)


def crt_distance_matrix(k, rng):
    """Pairwise distances among k uniform points of the CRT."""
    return sb_build(crt_sample_sticks(k, rng)).dist


def stick_increment_cdf(L, x):
    """CDF of the next stick length when the tree has total length L."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    x = np.asarray(x, dtype=float)
    out = -np.expm1(-0.5 * ((x + L) ** 2 - L * L))
    out = np.where(x > 0, out, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass
class PerturbationReport:
    hypotheses_hold: bool
    max_distance_gap: float
    bound: float
    eps: float


def perturbation_check(seqA, seqB, eps):
    """Stability of stick-breaking under eps-perturbations.

    Hypotheses: (i) each y and z moves by at most eps between the two
    sequences, (ii) on seqA every true attachment z_i (i >= 1) stays at
    distance >= 3 eps from every breakpoint y_j. When both hold, the
    pairwise marked distances of the built trees may differ by at most
    2 * (stick count) * eps, and that inequality is asserted.
    """
    if not isinstance(seqA, StickSequence):
        seqA = StickSequence(*seqA)
    if not isinstance(seqB, StickSequence):
        seqB = StickSequence(*seqB)
    if seqA.k != seqB.k:
        raise ValueError("sequences must have equal length")
    if eps <= 0:
        raise ValueError("eps must be positive")
    sticks = seqA.k - 1
    bound = 2.0 * sticks * eps
    close = (np.abs(seqA.ys - seqB.ys).max() <= eps
             and np.abs(seqA.zs - seqB.zs).max() <= eps)
    separated = True
    if sticks >= 2:
        gaps = np.abs(seqA.zs[1:, None] - seqA.ys[None, :])
        separated = bool(gaps.min() >= 3.0 * eps)
    holds = bool(close and separated)
    gap = float(np.abs(sb_build(seqA).dist - sb_build(seqB).dist).max())
    if holds and gap > bound:
        raise AssertionError(
            "distance gap %.6g exceeds the %.6g bound although the "
            "perturbation hypotheses hold" % (gap, bound))
    return PerturbationReport(holds, gap, bound, eps)


def discrete_stick_encoding(G, run, beta=None):
    """Stick sequence of a Wilson run, rescaled by 1/(beta sqrt(n)).

    Branch m becomes stick m with length |P_m|/(beta sqrt(n)). The map I
    places every tree vertex on the realized interval: a vertex v added by
    branch m at distance d from the branch's starting vertex sits at
    I(v) = Y_m - d/(beta sqrt(n)); attachments are z_m = I(hit vertex).
    A hit at an earlier mark lands exactly on that mark's breakpoint.

    Returns (StickSequence, dict vertex -> position). beta defaults to
    1/sqrt(alpha_tilde(G)).
    """
    lengths = getattr(run, "branch_lengths", None)
    if lengths is None or getattr(run, "branch_hits", None) is None:
        raise ValueError("run lacks branch provenance")
    if len(lengths) == 0:
        raise ValueError("run has no branches to encode")
    if any(l == 0 for l in lengths):
        raise ValueError("zero-length branch (marked vertex collision) "
                         "cannot be encoded")
    if beta is None:
        from .graphs import alpha_tilde
        beta = 1.0 / math.sqrt(alpha_tilde(G))
    if beta <= 0:
        raise ValueError("beta must be positive")
    n = run.n
    scale = beta * math.sqrt(n)
    ys = np.zeros(len(lengths) + 1)
    np.cumsum(np.asarray(lengths, dtype=float) / scale, out=ys[1:])
    bstep = run.branch_step
    bpos = run.branch_pos
    if hasattr(run, "in_tree"):
        members = np.flatnonzero(run.in_tree)
    else:
        members = np.arange(n)
    imap = {int(v): float(ys[bstep[v]] - bpos[v] / scale) for v in members}
    zs = [0.0]
    for m in range(1, len(lengths)):
        zs.append(imap[int(run.branch_hits[m])])
    return StickSequence(ys, zs), imap


def attachment_uniformity_test(G, k, reps, rng, beta=None):
    """KS statistic of last-branch attachment positions against uniform.

    Each replicate marks k uniform vertices, runs the k-1 Wilson branches,
    and records where the final branch attached, as a fraction of the tree
    length built before it. Replicates whose marks collide with an earlier
    branch are skipped (they have no final walk to measure).
    """
    from .stats import ks_distance
    from .ust import wilson_prefix

    if k < 3:
        raise ValueError("k must be at least 3: the first branch has no "
                         "prior tree to attach to")
    n = G.n
    if k > n:
        raise ValueError("k exceeds the vertex count")
    vals = []
    for _ in range(reps):
        marks = rng.choice(n, size=k, replace=False)
        run = wilson_prefix(G, marks, rng)
        if run.collided:
            continue
        seq, _ = discrete_stick_encoding(G, run, beta=beta)
        vals.append(seq.zs[-1] / seq.ys[-2])
    if not vals:
        raise RuntimeError("every replicate collided; increase n or reps")
    return ks_distance(np.asarray(vals), lambda x: np.clip(x, 0.0, 1.0))
