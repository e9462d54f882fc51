"""Random-walk machinery on dense weighted graphs.

Conventions, used consistently across the package:
  * the walk picks a neighbor with probability proportional to edge weight;
  * the lazy kernel halves all moves and stays put with probability 1/2;
  * mixing time uses the lazy kernel, capacity and hitting use the plain one;
  * tau_U = inf{t >= 0 : X_t in U}, so a "length-k" walk has k+1 positions
    and Cap_0(U) = pi(U); the closeness of two sets counts k positions
    (tau < k), matching its source definition.
"""

import math
from dataclasses import dataclass

import numpy as np

from .graphs import expander_gamma_exact, expander_gamma_mc, GAMMA_EXACT_CAP


def stationary(G):
    """pi(v) = deg(v) / total degree."""
    if G.total_weight <= 0:
        raise ValueError("stationary distribution needs positive total weight")
    return G.degrees / G.degrees.sum()


def transition_matrix(G, laziness="none"):
    if np.any(G.degrees <= 0):
        raise ValueError("walk kernels need every degree positive")
    P = G.weights / G.degrees[:, None]
    if laziness == "half":
        P = 0.5 * P + 0.5 * np.eye(G.n)
    elif laziness != "none":
        raise ValueError("laziness must be 'none' or 'half'")
    return P


class WalkSampler:
    """Inverse-CDF walk stepping over one flattened cumulative table.

    Row v of the cumulative transition matrix is stored shifted by +v, so the
    whole table is globally sorted and one searchsorted serves every vertex:
    the next state from v with uniform u is searchsorted(flat, v + u) - v*n.
    """

    def __init__(self, G):
        if np.any(G.degrees <= 0):
            raise ValueError("walk sampling needs every degree positive")
        n = G.n
        cum = np.cumsum(G.weights / G.degrees[:, None], axis=1)
        cum[:, -1] = 1.0
        self.flat = (cum + np.arange(n)[:, None]).ravel()
        pi = stationary(G)
        self.pi_cum = np.cumsum(pi)
        self.pi_cum[-1] = 1.0
        self.n = n

    def step(self, v, u):
        """Single step from vertex v using uniform u in [0,1)."""
        return int(self.flat.searchsorted(v + u, side="right")) - v * self.n

    def step_many(self, cur, u):
        """Vectorized step for an int array of current vertices."""
        idx = np.searchsorted(self.flat, cur + u, side="right")
        return idx - cur * self.n

    def sample_stationary(self, u):
        """Vertex draws from pi for uniform(s) u."""
        return np.searchsorted(self.pi_cum, u, side="right")


def sampler_for(G):
    if G._sampler is None:
        G._sampler = WalkSampler(G)
    return G._sampler


MIXING_N_CAP = 2000


def mixing_time_exact(G, laziness="half", max_steps=4096):
    """Smallest t with max_{x,y} |p_t(x,y) - pi(y)| <= 1/4.

    Iterates the full n x n distribution matrix, so refused above n = 2000.
    """
    if G.n > MIXING_N_CAP:
        raise ValueError("mixing_time_exact capped at n = %d" % MIXING_N_CAP)
    if G.n == 1:
        return 0
    pi = stationary(G)
    P = transition_matrix(G, laziness)
    D = np.eye(G.n)
    for t in range(max_steps + 1):
        if np.abs(D - pi).max() <= 0.25:
            return t
        D = D @ P
    raise RuntimeError("walk did not mix within %d steps" % max_steps)


@dataclass
class MixingBoundReport:
    t_mix: int
    gamma: float
    gamma_exact: bool
    bound: float
    holds: bool
    note: str


def check_mixing_bound(G, rng=None, trials=200):
    """Compare lazy t_mix against the expander bound 64 gamma^-4 log n.

    The bound is asymptotic, so `holds = False` at small n is flagged as
    informational rather than an error.
    """
    if G.n <= GAMMA_EXACT_CAP:
        gamma, exact = expander_gamma_exact(G), True
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        gamma, exact = expander_gamma_mc(G, rng, trials), False
    t = mixing_time_exact(G, "half")
    bound = math.inf if gamma == 0 else 64.0 * gamma ** -4 * math.log(G.n)
    holds = t <= bound
    note = "asymptotic claim; failure at small n is expected occasionally"
    return MixingBoundReport(t, gamma, exact, bound, holds, note)


def _as_index_array(vs, n):
    arr = np.asarray(sorted(set(int(v) for v in vs)), dtype=int)
    if len(arr) and (arr[0] < 0 or arr[-1] >= n):
        raise ValueError("vertex index out of range")
    return arr


def _harmonic_hitting(G, A, B):
    """h with h=1 on A, 0 on B, harmonic elsewhere. Returns the full vector."""
    n = G.n
    A = _as_index_array(A, n)
    B = _as_index_array(B, n)
    if len(A) == 0 or len(B) == 0:
        raise ValueError("both vertex sets must be nonempty")
    if np.intersect1d(A, B).size:
        raise ValueError("vertex sets must be disjoint")
    h = np.zeros(n)
    h[A] = 1.0
    boundary = np.zeros(n, dtype=bool)
    boundary[A] = boundary[B] = True
    F = np.flatnonzero(~boundary)
    if len(F):
        P = transition_matrix(G)
        M = np.eye(len(F)) - P[np.ix_(F, F)]
        rhs = P[np.ix_(F, A)].sum(axis=1)
        try:
            sol = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            raise ValueError("hitting system is singular: "
                             "some vertices cannot reach the target sets")
        resid = np.abs(M @ sol - rhs).max()
        if resid > 1e-8:
            raise ValueError("hitting solve residual %.3g exceeds 1e-8; "
                             "target sets unreachable?" % resid)
        h[F] = sol
    return h


def hitting_prob_exact(G, A, B, start=None):
    """P_start(tau_A < tau_B); start=None averages over pi.

    Boundary convention: 1 on A, 0 on B, harmonic off A u B.
    """
    h = _harmonic_hitting(G, A, B)
    if start is None:
        return float(stationary(G) @ h)
    return float(h[int(start)])


def hitting_prob_plus_exact(G, A, B, start):
    """P_start(tau_A^+ < tau_B^+): one explicit step, then the harmonic value.

    Differs from hitting_prob_exact only when start lies in A u B (the walk
    must leave before the boundary values apply); needed as the denominator
    of the next-step law of the loop-erased walk.
    """
    h = _harmonic_hitting(G, A, B)
    P = transition_matrix(G)
    return float(P[int(start)] @ h)


def capacity_exact(G, U, k):
    """Cap_k(U) = P_pi(tau_U <= k), by k kills of the restricted kernel."""
    if k < 0:
        raise ValueError("k >= 0 required")
    U = _as_index_array(U, G.n)
    if len(U) == 0:
        raise ValueError("U must be nonempty")
    pi = stationary(G)
    outside = np.ones(G.n)
    outside[U] = 0.0
    s = pi * outside
    if k > 0:
        P = transition_matrix(G)
        for _ in range(k):
            s = (s @ P) * outside
    return float(1.0 - s.sum())


@dataclass
class MCEstimate:
    estimate: float
    stderr: float


def _bernoulli_stderr(p, reps):
    return math.sqrt(max(p * (1.0 - p), 0.0) / reps)


def capacity_mc(G, U, k, reps, rng):
    """Fraction of stationary-start length-k walks touching U.

    A length-k walk has k+1 positions (the start counts), matching
    capacity_exact.
    """
    if reps < 1:
        raise ValueError("reps >= 1 required")
    U = _as_index_array(U, G.n)
    in_u = np.zeros(G.n, dtype=bool)
    in_u[U] = True
    samp = sampler_for(G)
    cur = samp.sample_stationary(rng.random(reps))
    hit = in_u[cur]
    for _ in range(k):
        cur = samp.step_many(cur, rng.random(reps))
        hit |= in_u[cur]
    p = float(hit.mean())
    return MCEstimate(p, _bernoulli_stderr(p, reps))


def closeness_mc(G, U, Wset, k, reps, rng):
    """Fraction of stationary-start walks hitting both sets before time k.

    Strict convention: both tau's < k, i.e. positions 0..k-1 are inspected.
    """
    if reps < 1:
        raise ValueError("reps >= 1 required")
    if k < 1:
        raise ValueError("k >= 1 required")
    U = _as_index_array(U, G.n)
    Wv = _as_index_array(Wset, G.n)
    if np.intersect1d(U, Wv).size:
        raise ValueError("sets must be disjoint")
    if len(U) == 0 or len(Wv) == 0:
        return MCEstimate(0.0, 0.0)
    in_u = np.zeros(G.n, dtype=bool)
    in_u[U] = True
    in_w = np.zeros(G.n, dtype=bool)
    in_w[Wv] = True
    samp = sampler_for(G)
    cur = samp.sample_stationary(rng.random(reps))
    hit_u = in_u[cur]
    hit_w = in_w[cur]
    for _ in range(k - 1):
        cur = samp.step_many(cur, rng.random(reps))
        hit_u |= in_u[cur]
        hit_w |= in_w[cur]
    p = float((hit_u & hit_w).mean())
    return MCEstimate(p, _bernoulli_stderr(p, reps))


@dataclass
class AlphaEstimate:
    estimate: float
    stderr: float
    M: int
    outer_len: int
    kappa: float
    outer_reps: int
    inner_reps: int


KAPPA_MAX = 1.0 / 32.0


def alpha_n_capacity(G, kappa, outer_reps, inner_reps, rng):
    """Capacity-based scaling constant n E[Cap_M(X[0,L))] / (M L).

    M = ceil(n^kappa) and L = ceil(n^(kappa/2)). Outer walks visit L
    positions from stationarity; each visited set gets inner_reps stationary
    inner walks of M positions (capacity here counts M positions so the M L
    normalization is exact at finite n, not just in the limit). The standard
    error is the spread of the per-outer-walk means.
    """
    if not 0.0 < kappa <= KAPPA_MAX:
        raise ValueError("kappa must lie in (0, 1/32]")
    if outer_reps < 2 or inner_reps < 1:
        raise ValueError("need outer_reps >= 2 and inner_reps >= 1")
    n = G.n
    M = math.ceil(n ** kappa)
    L = math.ceil(n ** (kappa / 2.0))
    if M < 2:
        raise ValueError("n too small for kappa: M = ceil(n^kappa) < 2")
    samp = sampler_for(G)

    # outer walks, batched: (outer_reps, L) visited vertices
    cur = samp.sample_stationary(rng.random(outer_reps))
    visited = np.empty((outer_reps, L), dtype=np.int64)
    visited[:, 0] = cur
    for t in range(1, L):
        cur = samp.step_many(cur, rng.random(outer_reps))
        visited[:, t] = cur

    # inner walks, batched: inner_reps walks of M positions per outer walk
    W = outer_reps * inner_reps
    owner = np.repeat(np.arange(outer_reps), inner_reps)
    x = samp.sample_stationary(rng.random(W))
    hit = (x[:, None] == visited[owner]).any(axis=1)
    for _ in range(M - 1):
        x = samp.step_many(x, rng.random(W))
        hit |= (x[:, None] == visited[owner]).any(axis=1)

    cap = hit.reshape(outer_reps, inner_reps).mean(axis=1)
    scale = n / (M * L)
    alphas = scale * cap
    est = float(alphas.mean())
    stderr = float(alphas.std(ddof=1) / math.sqrt(outer_reps))
    return AlphaEstimate(est, stderr, M, L, kappa, outer_reps, inner_reps)
