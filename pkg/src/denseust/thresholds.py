"""Pilot-calibrated acceptance constants.

The scaling-limit statements are asymptotic and come with no rate, so
every finite-size tolerance below was measured, not derived. The values
are frozen outputs of scripts/calibrate.py (see the calibration banner it
prints); rerunning that script reproduces them from the recorded seeds.
"""

# Two-point KS threshold: rescaled pairwise tree distances against the
# CDF 1 - exp(-x^2/2), n = 2000..3000, 2000 replicates.
KS_TWO_POINT = 0.08

# Two-sample KS threshold for pooled k = 4 distances against pooled CRT
# distance-matrix entries, 1500 replicates.
KS_JOINT = 0.08

# KS-vs-uniform threshold for third-branch attachment positions,
# n = 2000, 2000 replicates.
ATTACH_KS = 0.05

# Golden lower bound for the 5th percentile of the lower mass bound m_c,
# complete graph n = 2000, c = 1, 50 replicates.
LMB_GOLDEN_P5 = 0.02

# Default epsilon used when reporting "fraction of replicates below eps"
# in lower-mass-bound experiments.
LMB_EPS = 0.01

# Monte-Carlo vs exact alpha consistency: |alpha_n - alpha_tilde| must not
# exceed max(3 sigma, ALPHA_TOL).
ALPHA_TOL = 0.05
