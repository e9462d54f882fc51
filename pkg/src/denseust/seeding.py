"""Deterministic RNG derivation.

Every source of randomness in the package is a numpy Generator derived from a
single master seed through a (stream tag, replicate index) spawn key, so runs
are reproducible and independent of execution order or worker count.
"""

import numpy as np

# Stream tags. Never renumber: derived streams are part of the
# reproducibility contract.
LATENTS = 1   # graphon latent uniforms
EDGES = 2     # edge indicator draws
WILSON = 3    # Wilson branch walks
MARKS = 4     # marked-vertex choices in experiments
CRT = 5       # stick-breaking draws
OUTER = 6     # outer walks of the capacity estimator
INNER = 7     # inner walks of the capacity estimator
CUTNORM = 8   # cut-norm heuristic restarts
GAMMA = 9     # expander cut sampling
SUBSETS = 10  # subset sampling in the good-tree check


def derived_rng(master_seed, stream, index=0):
    """Generator for (master seed, stream tag, replicate index)."""
    seq = np.random.SeedSequence(entropy=int(master_seed),
                                 spawn_key=(int(stream), int(index)))
    return np.random.default_rng(seq)


class UniformBuffer:
    """Scalar uniforms pulled from a Generator in blocks.

    Per-call overhead of Generator.random() dominates tight walk loops; this
    amortizes it. Draw order is identical to repeated rng.random(block).
    """

    __slots__ = ("rng", "block", "buf", "pos")

    def __init__(self, rng, block=8192):
        self.rng = rng
        self.block = block
        self.buf = rng.random(block)
        self.pos = 0

    def next(self):
        if self.pos == self.block:
            self.buf = self.rng.random(self.block)
            self.pos = 0
        u = self.buf[self.pos]
        self.pos += 1
        return u
